"""
Heuristic classification of the omega-limit set of a sampled trajectory.

Checks run in a fixed order and the first one that applies gives the verdict:
equilibrium, heteroclinic cycle between pure corners, convergence to a pure
corner, periodic orbit, otherwise undetermined.
"""

from dataclasses import dataclass, field
from typing import Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np
from dataclasses_json import dataclass_json

from forelpb.solver import COMPLETED, STEP_FAILURE, Z_OVERFLOW, Trajectory
from forelpb.dynamics import Z_COORDINATES

EQUILIBRIUM = "Equilibrium"
PERIODIC = "Periodic"
HETEROCLINIC_CYCLE = "HeteroclinicCycle"
BOUNDARY_FIXED = "BoundaryFixed"
UNDETERMINED = "Undetermined"

VERDICT_KINDS = (EQUILIBRIUM, PERIODIC, HETEROCLINIC_CYCLE, BOUNDARY_FIXED, UNDETERMINED)

CornerPull = Callable[[Sequence[int]], np.ndarray]


@dataclass_json
@dataclass
class ClassifierParams:
    transient_fraction: float = 0.5
    equilibrium_tol: float = 1e-8
    corner_tol: float = 1e-6
    corner_eps: float = 1e-2
    # consecutive corner visits whose depth must grow
    min_visits: int = 3
    # relative margin for "strictly deeper"
    depth_growth: float = 1e-6
    return_tol: float = 1e-4
    min_period: float = 0.5
    period_rtol: float = 0.01

    def __post_init__(self):
        assert 0.0 <= self.transient_fraction < 1.0
        assert self.min_visits >= 2
        assert self.corner_eps > 0 and self.return_tol > 0 and self.min_period > 0


@dataclass_json
@dataclass
class LimitSetVerdict:
    kind: str
    point: Optional[List[float]] = None
    period: Optional[float] = None
    corner: Optional[List[int]] = None
    corners: List[List[int]] = field(default_factory=list)
    dwell_times: List[float] = field(default_factory=list)
    diagnostics: Dict[str, float] = field(default_factory=dict)


@dataclass
class _Visit:
    corner: Tuple[int, ...]
    t_enter: float
    t_exit: float
    depth: float


def nearest_corner(x: np.ndarray) -> Tuple[Tuple[int, ...], float]:
    """Nearest pure profile (strategy 0 where x >= 1/2) and its sup-norm distance."""
    corner = tuple(0 if v >= 0.5 else 1 for v in x)
    vertex = np.array([1.0 if s == 0 else 0.0 for s in corner])
    return corner, float(np.max(np.abs(x - vertex)))


def classify_limit_set(
    traj: Trajectory,
    params: Optional[ClassifierParams] = None,
    corner_pull: Optional[CornerPull] = None,
) -> LimitSetVerdict:
    """
    :param corner_pull: per-player pull at a pure corner (positive toward the
        player's own strategy); when given, heteroclinic cycles must end at a
        corner some player is pushed away from and corner convergence requires
        a corner nobody is pushed away from.
    """
    params = params or ClassifierParams()
    diagnostics: Dict[str, float] = {}
    if traj.termination.reason == STEP_FAILURE or traj.n_samples < 3:
        return LimitSetVerdict(UNDETERMINED, diagnostics={"samples": float(traj.n_samples)})

    start = min(traj.tail_start(params.transient_fraction), traj.n_samples - 2)
    tail_x = traj.x[start:]
    tail_rates = traj.x_rates[start:]
    end = traj.x[-1]
    max_rate = float(np.max(np.abs(tail_rates)))
    drift = float(np.max(np.abs(tail_x - end)))
    corner, corner_distance = nearest_corner(end)
    diagnostics.update(
        tail_max_rate=max_rate, tail_drift=drift, corner_distance=corner_distance
    )

    if (
        traj.termination.reason == COMPLETED
        and max_rate < params.equilibrium_tol
        and drift < params.equilibrium_tol
        and corner_distance > params.corner_tol
    ):
        return LimitSetVerdict(EQUILIBRIUM, point=_floats(end), diagnostics=diagnostics)

    visits = _corner_visits(traj, params.corner_eps)
    diagnostics["corner_visits"] = float(len(visits))
    if _heteroclinic(visits, params, corner_pull):
        window = visits[-params.min_visits :]
        return LimitSetVerdict(
            HETEROCLINIC_CYCLE,
            corners=[list(v.corner) for v in window],
            dwell_times=[v.t_exit - v.t_enter for v in window],
            diagnostics=diagnostics,
        )

    pull_ok = corner_pull is None or bool(np.all(np.asarray(corner_pull(corner)) >= 0.0))
    at_corner = (
        corner_distance < params.corner_tol
        and float(np.max(np.abs(traj.x_rates[-1]))) < params.equilibrium_tol
    )
    if (traj.termination.reason == Z_OVERFLOW or at_corner) and pull_ok:
        return LimitSetVerdict(BOUNDARY_FIXED, corner=list(corner), diagnostics=diagnostics)
    if traj.termination.reason == Z_OVERFLOW:
        return LimitSetVerdict(UNDETERMINED, diagnostics=diagnostics)

    first = _return_period(traj, start, params)
    mid = traj.tail_start(0.5 * (1.0 + params.transient_fraction))
    second = _return_period(traj, mid, params)
    if first is not None:
        diagnostics["return_distance"] = first[1]
    if first is not None and second is not None:
        p1, p2 = first[0], second[0]
        diagnostics["period_first_window"] = p1
        diagnostics["period_second_window"] = p2
        if abs(p1 - p2) <= params.period_rtol * max(p1, p2):
            return LimitSetVerdict(
                PERIODIC,
                point=_floats(traj.x[start]),
                period=0.5 * (p1 + p2),
                diagnostics=diagnostics,
            )
    return LimitSetVerdict(UNDETERMINED, diagnostics=diagnostics)


def _floats(v: np.ndarray) -> List[float]:
    return [float(a) for a in v]


def _sample_depths(traj: Trajectory, corners: List[Tuple[int, ...]]) -> np.ndarray:
    if traj.coordinates == Z_COORDINATES:
        return np.max(np.abs(traj.states), axis=1)
    res = np.empty(traj.n_samples)
    for k, c in enumerate(corners):
        vertex = np.array([1.0 if s == 0 else 0.0 for s in c])
        res[k] = float(np.max(-np.log(np.maximum(np.abs(traj.x[k] - vertex), 1e-300))))
    return res


def _corner_visits(traj: Trajectory, eps: float) -> List[_Visit]:
    """
    Maximal runs of samples inside the eps-ball of a corner. Consecutive runs at
    the same corner are merged; depth is the largest excursion during the visit.
    """
    located = [nearest_corner(x) for x in traj.x]
    corners = [c for c, _ in located]
    depths = _sample_depths(traj, corners)
    visits: List[_Visit] = []
    current: Optional[_Visit] = None
    for k, (c, dist) in enumerate(located):
        t = float(traj.times[k])
        if dist < eps:
            if current is not None and current.corner == c:
                current.t_exit = t
                current.depth = max(current.depth, float(depths[k]))
            else:
                if current is not None:
                    visits.append(current)
                if visits and visits[-1].corner == c:
                    current = visits.pop()
                    current.t_exit = t
                    current.depth = max(current.depth, float(depths[k]))
                else:
                    current = _Visit(c, t, t, float(depths[k]))
        elif current is not None:
            visits.append(current)
            current = None
    if current is not None:
        visits.append(current)
    return visits


def _heteroclinic(
    visits: List[_Visit], params: ClassifierParams, corner_pull: Optional[CornerPull]
) -> bool:
    """
    Growth along the itinerary is measured on visit depth (largest |z|, or
    -ln of the distance to the vertex in x coordinates), not on dwell time:
    the last visit is cut short by the end of the run and would fail a strict
    dwell-time test. Dwell times are reported with the verdict only.
    """
    if len(visits) < params.min_visits:
        return False
    window = visits[-params.min_visits :]
    if len({v.corner for v in window}) < 2:
        return False
    for a, b in zip(window, window[1:]):
        if sum(x != y for x, y in zip(a.corner, b.corner)) != 1:
            return False
        if not b.depth > a.depth * (1.0 + params.depth_growth):
            return False
    # revisits of a corner must be deeper than the previous visit there
    last_depth: Dict[Tuple[int, ...], float] = {}
    for v in visits:
        previous = last_depth.get(v.corner)
        if previous is not None and not v.depth > previous * (1.0 + params.depth_growth):
            return False
        last_depth[v.corner] = v.depth
    if corner_pull is not None:
        pull = np.asarray(corner_pull(window[-1].corner))
        if not np.any(pull < 0.0):
            return False
    return True


def _hermite(t0, t1, y0, y1, d0, d1, t):
    """Cubic Hermite interpolation on [t0, t1] (values may be arrays)."""
    h = t1 - t0
    s = (t - t0) / h
    h00 = 2 * s**3 - 3 * s**2 + 1
    h10 = s**3 - 2 * s**2 + s
    h01 = -2 * s**3 + 3 * s**2
    h11 = s**3 - s**2
    return h00 * y0 + h10 * h * d0 + h01 * y1 + h11 * h * d1


def _section_crossings(traj: Trajectory, ref: int) -> List[Tuple[float, np.ndarray]]:
    """
    Crossings of the hyperplane through x[ref] normal to the velocity there, in
    the direction of the flow, located on the cubic Hermite interpolant.
    """
    x_ref = traj.x[ref]
    normal = traj.x_rates[ref]
    norm = float(np.linalg.norm(normal))
    if norm == 0.0:
        return []
    normal = normal / norm
    g = (traj.x[ref:] - x_ref) @ normal
    dg = traj.x_rates[ref:] @ normal
    res = []
    for k in range(1, len(g) - 1):
        if not (g[k] < 0.0 <= g[k + 1]):
            continue
        i, j = ref + k, ref + k + 1
        t0, t1 = float(traj.times[i]), float(traj.times[j])
        lo, hi = t0, t1
        for _ in range(60):
            mid = 0.5 * (lo + hi)
            if _hermite(t0, t1, g[k], g[k + 1], dg[k], dg[k + 1], mid) < 0.0:
                lo = mid
            else:
                hi = mid
        tc = 0.5 * (lo + hi)
        xc = _hermite(
            t0, t1, traj.x[i], traj.x[j], traj.x_rates[i], traj.x_rates[j], tc
        )
        res.append((tc, xc))
    return res


def _return_period(
    traj: Trajectory, ref: int, params: ClassifierParams
) -> Optional[Tuple[float, float]]:
    """(period, return distance) at the first close return to x[ref], if any."""
    if ref >= traj.n_samples - 2:
        return None
    t_ref = float(traj.times[ref])
    x_ref = traj.x[ref]
    for tc, xc in _section_crossings(traj, ref):
        if tc - t_ref <= params.min_period:
            continue
        distance = float(np.max(np.abs(xc - x_ref)))
        if distance < params.return_tol:
            return tc - t_ref, distance
    return None
