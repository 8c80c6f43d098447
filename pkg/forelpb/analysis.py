"""
Equilibria, minimax values, welfare bounds and linear stability of binary
one-predecessor games.
"""

from dataclasses import dataclass, field
from typing import Callable, Final, List, Optional, Sequence

import numpy as np
from dataclasses_json import dataclass_json

from forelpb.conditions import NonGenericMatrix, mixed_difference
from forelpb.game import (
    BinaryGame,
    PayoffMatrix,
    kl_divergence,
    payoff_vector,
)
from forelpb.graph import root_decomposition, Disconnected
from forelpb.dynamics import score_drift
from forelpb.limit_sets import LimitSetVerdict
from forelpb.solver import TimeAverages, Trajectory, time_average_payoffs

DEFAULT_JACOBIAN_STEP: Final[float] = 1e-6
DEFAULT_CENTER_TOL: Final[float] = 1e-6
BOUNDARY_CYCLE_TOLERANCE: Final[float] = 0.15


class NotCyclic(ValueError):
    pass


def equalizing_strategy(a: PayoffMatrix) -> Optional[float]:
    """
    Predecessor mix that makes the successor indifferent between its strategies,
    or None when that mix is not strictly inside (0, 1).
    """
    d = mixed_difference(a)
    if d == 0.0:
        raise NonGenericMatrix(f"mixed difference is 0 for {a.to_list()}")
    x_hat = (a.a11 - a.a10) / d
    return x_hat if 0.0 < x_hat < 1.0 else None


def equalizer_value(a: PayoffMatrix) -> Optional[float]:
    """Successor payoff when the predecessor plays the equalizing mix."""
    x_hat = equalizing_strategy(a)
    if x_hat is None:
        return None
    return x_hat * a.a00 + (1.0 - x_hat) * a.a10


def minimax_value(a: PayoffMatrix) -> float:
    """
    min over the predecessor mix q of max over the successor's pure strategies.
    The upper envelope of the two payoff lines is convex in q, so the minimum is
    at an end of [0, 1] or at the crossing of the lines.
    """
    d = mixed_difference(a)
    if d == 0.0:
        raise NonGenericMatrix(f"mixed difference is 0 for {a.to_list()}")

    def envelope(q: float) -> float:
        return max(q * a.a00 + (1.0 - q) * a.a10, q * a.a01 + (1.0 - q) * a.a11)

    candidates = [envelope(0.0), envelope(1.0)]
    x_hat = (a.a11 - a.a10) / d
    if 0.0 < x_hat < 1.0:
        candidates.append(envelope(x_hat))
    return float(min(candidates))


def interior_nash(game: BinaryGame) -> Optional[np.ndarray]:
    """
    Interior Nash equilibrium of a game whose graph is a single directed cycle:
    every player mixes so as to equalize its successor. None when some edge
    admits a dominant strategy.
    """
    game.require_one_predecessor()
    try:
        decomposition = root_decomposition(game.graph)
    except Disconnected:
        raise NotCyclic("interaction graph is disconnected") from None
    if not decomposition.is_cycle or len(decomposition.cycle) != game.n_players:
        raise NotCyclic(f"interaction graph is not a single cycle ({decomposition.kind})")

    x = np.empty(game.n_players)
    missing = False
    for e in game.edges:
        x_hat = equalizing_strategy(e.matrix)
        if x_hat is None:
            missing = True
        else:
            x[e.pred] = x_hat
    return None if missing else x


def minimax_values(game: BinaryGame) -> List[Optional[float]]:
    """Per player minimax value of its incoming matrix, None without predecessor."""
    game.require_one_predecessor()
    res: List[Optional[float]] = []
    for k in range(game.n_players):
        a = game.incoming_matrix(k)
        res.append(None if a is None else minimax_value(a))
    return res


def welfare_bound(game: BinaryGame) -> float:
    """Sum of the players' minimax values; players without predecessor count 0."""
    return float(sum(v for v in minimax_values(game) if v is not None))


def jacobian(
    field: Callable[[np.ndarray], np.ndarray],
    state,
    h: float = DEFAULT_JACOBIAN_STEP,
) -> np.ndarray:
    """Central finite-difference Jacobian with per-coordinate step h max(1, |s_i|)."""
    s = np.asarray(state, dtype=float)
    n = len(s)
    res = np.empty((n, n))
    for i in range(n):
        step = h * max(1.0, abs(s[i]))
        plus, minus = s.copy(), s.copy()
        plus[i] += step
        minus[i] -= step
        res[:, i] = (np.asarray(field(plus)) - np.asarray(field(minus))) / (2.0 * step)
    if not np.all(np.isfinite(res)):
        raise ValueError(f"non-finite Jacobian at {s}")
    return res


def replicator_jacobian_x(game: BinaryGame, x) -> np.ndarray:
    """Analytic Jacobian of the x-coordinate replicator field."""
    xv = np.asarray(x, dtype=float)
    w = xv * (1.0 - xv)
    res = np.diag((1.0 - 2.0 * xv) * score_drift(game, xv))
    a = game.arrays
    d = a.a00 - a.a01 - a.a10 + a.a11
    np.add.at(res, (a.succ, a.pred), w[a.succ] * d)
    return res


@dataclass_json
@dataclass
class StabilityCounts:
    stable: int
    unstable: int
    center: int


def stability_classify(
    eigs: Sequence[complex], tol: float = DEFAULT_CENTER_TOL
) -> StabilityCounts:
    stable = sum(1 for v in eigs if v.real < -tol)
    unstable = sum(1 for v in eigs if v.real > tol)
    return StabilityCounts(stable, unstable, len(eigs) - stable - unstable)


@dataclass_json
@dataclass
class WelfareVerdict:
    average_sw: float
    bound: float
    slack: float
    tolerance: float
    passed: bool


def check_welfare_theorem(
    game: BinaryGame, traj: Trajectory, tol: float = 0.05
) -> WelfareVerdict:
    averages = time_average_payoffs(traj)
    bound = welfare_bound(game)
    return WelfareVerdict(
        average_sw=averages.sw,
        bound=bound,
        slack=averages.sw - bound,
        tolerance=tol,
        passed=averages.sw >= bound - tol,
    )


@dataclass_json
@dataclass
class KLDiagnostic:
    times: List[float]
    kl: List[float]
    kl_rate: List[float]
    sw_difference: List[float]
    residual: List[float]
    max_abs_residual: float


def kl_derivative_diagnostic(game: BinaryGame, traj: Trajectory, p) -> KLDiagnostic:
    """
    Measures d/dt KL(p || x(t)) along the samples (finite differences) next to
    SW(x(t)) - SW(p). Nothing is asserted about the residual between them.
    """
    pv = np.asarray(p, dtype=float)
    kl = np.array([kl_divergence(pv, x) for x in traj.x])
    kl_rate = np.gradient(kl, traj.times) if traj.n_samples > 1 else np.zeros(1)
    sw_p = float(np.sum(payoff_vector(game, pv)))
    sw_difference = traj.welfare - sw_p
    residual = kl_rate - sw_difference
    return KLDiagnostic(
        times=[float(t) for t in traj.times],
        kl=[float(v) for v in kl],
        kl_rate=[float(v) for v in kl_rate],
        sw_difference=[float(v) for v in sw_difference],
        residual=[float(v) for v in residual],
        max_abs_residual=float(np.max(np.abs(residual))),
    )


@dataclass_json
@dataclass
class BoundaryCycleComparison:
    quoted: float
    measured: float
    relative_error: float
    within_tolerance: bool


def boundary_cycle_comparison(
    n_players: int, p: float, measured: float, tolerance: float = BOUNDARY_CYCLE_TOLERANCE
) -> BoundaryCycleComparison:
    """
    Compares a measured welfare average with the boundary-cycle value
    (p + 1)(N - 1) / 2 of asymmetric cyclic pennies. Report only.
    """
    quoted = (p + 1.0) * (n_players - 1) / 2.0
    relative_error = abs(measured - quoted) / abs(quoted)
    return BoundaryCycleComparison(
        quoted=quoted,
        measured=measured,
        relative_error=relative_error,
        within_tolerance=relative_error <= tolerance,
    )


@dataclass_json
@dataclass
class AnalysisReport:
    game: str
    n_players: int
    interior_nash: Optional[List[float]] = None
    nash_payoffs: Optional[List[float]] = None
    dominance_profile: List[Optional[int]] = field(default_factory=list)
    minimax: List[Optional[float]] = field(default_factory=list)
    welfare_bound: Optional[float] = None
    # (re, im) pairs
    spectrum: List[List[float]] = field(default_factory=list)
    stability: Optional[StabilityCounts] = None
    verdict: Optional[LimitSetVerdict] = None
    termination: str = ""
    averages: Optional[TimeAverages] = None
    welfare: Optional[WelfareVerdict] = None
    state_average_distance: Optional[float] = None
    boundary_cycle: Optional[BoundaryCycleComparison] = None
    kl_max_abs_residual: Optional[float] = None
    notes: List[str] = field(default_factory=list)
