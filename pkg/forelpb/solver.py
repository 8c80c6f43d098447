"""
Explicit Runge-Kutta integration of a FlowSystem and time-average statistics
of the sampled payoffs.
"""

import math
from dataclasses import dataclass, field
from typing import Dict, Final, List, Optional, Tuple

import numpy as np
import pandas as pd
import xarray as xr
from dataclasses_json import dataclass_json

from forelpb.dynamics import X_COORDINATES, Z_COORDINATES, FlowSystem

RK4: Final[str] = "rk4"
RK45: Final[str] = "rk45"

COMPLETED: Final[str] = "Completed"
Z_OVERFLOW: Final[str] = "ZOverflow"
STEP_FAILURE: Final[str] = "StepFailure"

# largest tolerated excursion outside [0, 1] per step when integrating in x
CLAMP_LIMIT: Final[float] = 1e-12

# Dormand-Prince 5(4) for autonomous fields: stage coefficients (the last row
# holds the 5th order weights) and the (5th - 4th) order error weights.
DP_A: Final[Dict[int, List[float]]] = {
    1: [1 / 5],
    2: [3 / 40, 9 / 40],
    3: [44 / 45, -56 / 15, 32 / 9],
    4: [19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729],
    5: [9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656],
    6: [35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84],
}
DP_E: Final[Tuple[float, ...]] = (
    71 / 57600,
    0.0,
    -71 / 16695,
    71 / 1920,
    -17253 / 339200,
    22 / 525,
    -1 / 40,
)


@dataclass_json
@dataclass
class IntegratorConfig:
    """
    ``dt`` is the fixed step of RK4 and the initial step of RK45.
    ``stride`` keeps every stride-th accepted step (first and last always kept).
    """

    method: str = RK45
    t_end: float = 100.0
    dt: float = 1e-2
    rtol: float = 1e-9
    atol: float = 1e-9
    max_step: float = 0.1
    stride: int = 1
    z_cap: float = 700.0
    t_start: float = 0.0

    def __post_init__(self):
        if self.method not in (RK4, RK45):
            raise ValueError(f"unknown method '{self.method}', expecting {RK4} or {RK45}")
        if not self.dt > 0:
            raise ValueError(f"dt must be positive, got {self.dt}")
        if not self.t_end > self.t_start:
            raise ValueError(f"t_end must exceed t_start, got {self.t_end}")
        if not self.z_cap > 0:
            raise ValueError(f"z_cap must be positive, got {self.z_cap}")
        if not (self.rtol > 0 and self.atol > 0 and self.max_step > 0):
            raise ValueError("tolerances and max_step must be positive")
        if self.stride < 1:
            raise ValueError(f"stride must be at least 1, got {self.stride}")


@dataclass_json
@dataclass
class Termination:
    reason: str = COMPLETED
    player: Optional[int] = None
    message: str = ""


@dataclass
class Trajectory:
    """
    Samples of one integration run. ``states`` are in the integration coordinate,
    ``rates`` the field there; ``x`` and ``x_rates`` are the mixed profiles and
    their time derivatives.
    """

    coordinates: str
    times: np.ndarray
    states: np.ndarray
    rates: np.ndarray
    x: np.ndarray
    x_rates: np.ndarray
    payoffs: np.ndarray
    welfare: np.ndarray
    termination: Termination = field(default_factory=Termination)

    @property
    def n_samples(self) -> int:
        return len(self.times)

    @property
    def n_players(self) -> int:
        return int(self.x.shape[1])

    @property
    def span(self) -> float:
        return float(self.times[-1] - self.times[0])

    def tail_start(self, fraction: float) -> int:
        """Index of the first sample at or after the given fraction of the span."""
        assert 0.0 <= fraction < 1.0
        cutoff = self.times[0] + fraction * self.span
        return int(np.searchsorted(self.times, cutoff, side="left"))

    def to_dataframe(self) -> pd.DataFrame:
        n = self.n_players
        columns: Dict[str, np.ndarray] = {"t": self.times}
        for i in range(n):
            columns[f"x_{i}"] = self.x[:, i]
        for i in range(n):
            columns[f"u_{i}"] = self.payoffs[:, i]
        columns["sw"] = self.welfare
        if self.coordinates == Z_COORDINATES:
            for i in range(n):
                columns[f"z_{i}"] = self.states[:, i]
        return pd.DataFrame(columns)

    def to_dataset(self) -> xr.Dataset:
        coords = {"time": self.times, "player": np.arange(self.n_players)}
        data_vars = {
            "x": (("time", "player"), self.x),
            "payoff": (("time", "player"), self.payoffs),
            "sw": (("time",), self.welfare),
        }
        if self.coordinates == Z_COORDINATES:
            data_vars["z"] = (("time", "player"), self.states)
        return xr.Dataset(
            data_vars=data_vars,
            coords=coords,
            attrs={
                "coordinates": self.coordinates,
                "termination": self.termination.reason,
            },
        )


class _Recorder:
    def __init__(self, system: FlowSystem, stride: int):
        self.system = system
        self.stride = stride
        self.count = 0
        self.times: List[float] = []
        self.states: List[np.ndarray] = []
        self.rates: List[np.ndarray] = []

    def offer(self, t: float, y: np.ndarray, rate: np.ndarray, force: bool = False):
        if force or self.count % self.stride == 0:
            if not self.times or t > self.times[-1]:
                self.times.append(t)
                self.states.append(y.copy())
                self.rates.append(rate.copy())
        self.count += 1

    def trajectory(self, termination: Termination) -> Trajectory:
        system = self.system
        states = np.array(self.states)
        rates = np.array(self.rates)
        x = np.array([system.to_x(s) for s in states])
        x_rates = np.array([system.x_rate(s, r) for s, r in zip(states, rates)])
        payoffs = np.array([system.payoffs(xs) for xs in x])
        return Trajectory(
            coordinates=system.coordinates,
            times=np.array(self.times),
            states=states,
            rates=rates,
            x=x,
            x_rates=x_rates,
            payoffs=payoffs,
            welfare=payoffs.sum(axis=1),
            termination=termination,
        )


def rk4_step(system: FlowSystem, y: np.ndarray, k1: np.ndarray, h: float) -> np.ndarray:
    f = system.field
    k2 = f(y + 0.5 * h * k1)
    k3 = f(y + 0.5 * h * k2)
    k4 = f(y + h * k3)
    return y + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)


def dp45_step(
    system: FlowSystem, y: np.ndarray, k1: np.ndarray, h: float
) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """
    One Dormand-Prince step. Returns the 5th order solution, the field at it
    (first stage of the next step) and the local error estimate.
    """
    ks = [k1]
    for stage in range(1, 7):
        increment = sum(a * k for a, k in zip(DP_A[stage], ks) if a != 0.0)
        ks.append(system.field(y + h * increment))
    y_new = y + h * sum(a * k for a, k in zip(DP_A[6], ks) if a != 0.0)
    # ks[6] was evaluated at y_new
    error = h * sum(e * k for e, k in zip(DP_E, ks) if e != 0.0)
    return y_new, ks[6], error


def integrate(
    log,  # : loguru.Logger,
    system: FlowSystem,
    state0,
    config: IntegratorConfig,
) -> Trajectory:
    """
    Integrates the system from ``state0`` over [config.t_start, config.t_end].

    Integration in z stops early with ZOverflow when some |z_i| exceeds z_cap.
    Integration in x clips round-off excursions outside [0, 1]; larger
    excursions, step-size underflow, or non-finite values stop the run with
    StepFailure. The samples gathered so far are always returned.
    """
    y = np.array(state0, dtype=float)
    if y.shape != (system.n_players,):
        raise ValueError(f"initial state must have {system.n_players} entries")
    if not np.all(np.isfinite(y)):
        raise ValueError(f"non-finite initial state: {y}")
    if system.coordinates == X_COORDINATES and (np.any(y < 0) or np.any(y > 1)):
        raise ValueError(f"initial x must be in [0, 1]: {y}")

    log.debug(
        f"integrate {system.label or '(system)'}: method={config.method}"
        f" coords={system.coordinates} t=[{config.t_start}, {config.t_end}]"
    )
    rate = system.field(y)
    recorder = _Recorder(system, config.stride)
    recorder.offer(config.t_start, y, rate, force=True)

    if config.method == RK4:
        termination = _run_rk4(system, y, rate, config, recorder)
    else:
        termination = _run_rk45(system, y, rate, config, recorder)

    traj = recorder.trajectory(termination)
    if termination.reason != COMPLETED:
        log.info(
            f"integration stopped at t={traj.times[-1]}: {termination.reason}"
            + (f" player={termination.player}" if termination.player is not None else "")
            + (f" ({termination.message})" if termination.message else "")
        )
    log.debug(f"integrate done: {traj.n_samples} samples")
    return traj


def _run_rk4(system, y, rate, config, recorder) -> Termination:
    t0, t_end, dt = config.t_start, config.t_end, config.dt
    n_full = int(math.floor((t_end - t0) / dt + 1e-9))
    times = [t0 + i * dt for i in range(1, n_full + 1)]
    if t_end - (t0 + n_full * dt) > 1e-12 * max(1.0, abs(t_end)):
        times.append(t_end)
    t = t0
    for i, t_next in enumerate(times):
        y = rk4_step(system, y, rate, t_next - t)
        t = t_next
        termination, y = _post_step(system, y, config)
        if termination is not None:
            if np.all(np.isfinite(y)):
                recorder.offer(t, y, system.field(y), True)
            return termination
        rate = system.field(y)
        recorder.offer(t, y, rate, force=i == len(times) - 1)
    return Termination()


def _run_rk45(system, y, rate, config, recorder) -> Termination:
    t, t_end = config.t_start, config.t_end
    h = min(config.dt, config.max_step)
    while t < t_end:
        h = min(h, t_end - t)
        if h < 1e-12 * max(1.0, abs(t)):
            return Termination(STEP_FAILURE, message=f"step size underflow at t={t}")
        y_new, rate_new, error = dp45_step(system, y, rate, h)
        if not (np.all(np.isfinite(y_new)) and np.all(np.isfinite(error))):
            h *= 0.2
            continue
        scale = config.atol + config.rtol * np.maximum(np.abs(y), np.abs(y_new))
        err = float(np.sqrt(np.mean((error / scale) ** 2)))
        if err <= 1.0:
            t = t_end if t_end - (t + h) <= 1e-12 * max(1.0, abs(t_end)) else t + h
            termination, y = _post_step(system, y_new, config)
            if termination is not None:
                recorder.offer(t, y, rate_new, force=True)
                return termination
            rate = rate_new if system.coordinates == Z_COORDINATES else system.field(y)
            recorder.offer(t, y, rate, force=t >= t_end)
        factor = 5.0 if err == 0.0 else min(5.0, max(0.2, 0.9 * err ** (-0.2)))
        h = min(h * factor, config.max_step)
    return Termination()


def _post_step(
    system: FlowSystem, y: np.ndarray, config: IntegratorConfig
) -> Tuple[Optional[Termination], np.ndarray]:
    if not np.all(np.isfinite(y)):
        return Termination(STEP_FAILURE, message="non-finite state"), y
    if system.coordinates == X_COORDINATES:
        excursion = max(0.0, -float(np.min(y)), float(np.max(y)) - 1.0)
        clipped = np.clip(y, 0.0, 1.0)
        if excursion > CLAMP_LIMIT:
            return (
                Termination(STEP_FAILURE, message=f"x left [0, 1] by {excursion:.3e}"),
                clipped,
            )
        return None, clipped
    magnitude = np.abs(y)
    player = int(np.argmax(magnitude))
    if magnitude[player] > config.z_cap:
        return Termination(Z_OVERFLOW, player=player), y
    return None, y


@dataclass_json
@dataclass
class TimeAverages:
    per_player: List[float]
    sw: float
    span: float


@dataclass
class RunningAverages:
    times: np.ndarray
    per_player: np.ndarray
    sw: np.ndarray


def running_mean(times: np.ndarray, values: np.ndarray) -> np.ndarray:
    """Prefix trapezoidal averages; the first entry is the first value."""
    res = np.empty_like(values, dtype=float)
    res[0] = values[0]
    if len(times) > 1:
        dt = np.diff(times)
        shape = (-1,) + (1,) * (values.ndim - 1)
        increments = 0.5 * (values[1:] + values[:-1]) * dt.reshape(shape)
        elapsed = (times[1:] - times[0]).reshape(shape)
        res[1:] = np.cumsum(increments, axis=0) / elapsed
    return res


def time_average_payoffs(traj: Trajectory) -> TimeAverages:
    if traj.n_samples == 0:
        raise ValueError("empty trajectory")
    per_player = running_mean(traj.times, traj.payoffs)[-1]
    return TimeAverages(
        per_player=[float(v) for v in per_player],
        sw=float(np.sum(per_player)),
        span=traj.span,
    )


def running_average_series(traj: Trajectory) -> RunningAverages:
    if traj.n_samples == 0:
        raise ValueError("empty trajectory")
    per_player = running_mean(traj.times, traj.payoffs)
    return RunningAverages(
        times=traj.times, per_player=per_player, sw=per_player.sum(axis=1)
    )


def running_state_average(traj: Trajectory) -> np.ndarray:
    """Running time-average of the mixed profile, one row per sample."""
    if traj.n_samples == 0:
        raise ValueError("empty trajectory")
    return running_mean(traj.times, traj.x)
