"""
Steep strictly convex regularizers on (0, 1) and their choice maps.

The choice map Q sends a score difference z to the unique x with h'(x) = z.
"""

import math
from abc import ABC, abstractmethod
from typing import Dict, Final, List, Sequence, Type

import numpy as np

# bracket used by the generic solver; the upper end is the largest double below 1
BRACKET_LOWER: Final[float] = 1e-300
BRACKET_UPPER: Final[float] = 1.0 - 2.0**-53
MAX_SOLVER_ITERATIONS: Final[int] = 2000


class SolverFailure(RuntimeError):
    pass


class BoundaryStateError(ValueError):
    pass


class Regularizer(ABC):
    name: str = ""

    @abstractmethod
    def h(self, x: float) -> float: ...

    @abstractmethod
    def dh(self, x: float) -> float: ...

    @abstractmethod
    def d2h(self, x: float) -> float: ...

    def choice_map(self, z: float) -> float:
        return self.solve_choice(z)

    def choice_map_array(self, z: np.ndarray) -> np.ndarray:
        return np.array([self.choice_map(float(v)) for v in np.ravel(z)]).reshape(
            np.shape(z)
        )

    def choice_map_derivative(self, z: float) -> float:
        return 1.0 / self.d2h(self.choice_map(z))

    def inverse_choice(self, x: float) -> float:
        if not 0.0 < x < 1.0:
            raise BoundaryStateError(f"x must be in (0, 1), got {x}")
        return self.dh(x)

    def solve_choice(self, z: float) -> float:
        """
        Solves h'(x) = z by bisection on a shrinking bracket, taking Newton steps
        whenever they stay inside the bracket.
        """
        if not math.isfinite(z):
            raise ValueError(f"non-finite score {z}")
        lo, hi = BRACKET_LOWER, BRACKET_UPPER
        if self.dh(lo) > z or self.dh(hi) < z:
            raise SolverFailure(f"{self.name}: score {z} outside the solver bracket")
        tol = 1e-12 * max(1.0, abs(z))
        x = 0.5
        for _ in range(MAX_SOLVER_ITERATIONS):
            r = self.dh(x) - z
            if abs(r) <= tol:
                return x
            if r > 0:
                hi = x
            else:
                lo = x
            newton = x - r / self.d2h(x)
            nxt = newton if lo < newton < hi else _split(lo, hi)
            if nxt == x:
                return x
            x = nxt
        raise SolverFailure(f"{self.name}: no convergence for score {z}")

    def __repr__(self) -> str:
        return f"{type(self).__name__}()"

    def __eq__(self, other) -> bool:
        return type(self) is type(other)

    def __hash__(self) -> int:
        return hash(type(self))


def _split(lo: float, hi: float) -> float:
    # geometric midpoints near the ends keep relative precision for tiny x or 1 - x
    if hi <= 0.5 and hi > 4.0 * lo:
        return math.sqrt(lo * hi)
    if lo >= 0.5 and (1.0 - lo) > 4.0 * (1.0 - hi):
        return 1.0 - math.sqrt((1.0 - lo) * (1.0 - hi))
    return 0.5 * (lo + hi)


def logistic(z):
    """Overflow-safe e^z / (1 + e^z), scalar or array."""
    za = np.asarray(z, dtype=float)
    e = np.exp(-np.abs(za))
    res = np.where(za >= 0.0, 1.0 / (1.0 + e), e / (1.0 + e))
    return float(res) if res.ndim == 0 else res


class Entropy(Regularizer):
    """h(x) = x ln x + (1 - x) ln(1 - x); the choice map is the logistic function."""

    name = "entropy"

    def h(self, x: float) -> float:
        return _xlogx(x) + _xlogx(1.0 - x)

    def dh(self, x: float) -> float:
        return math.log(x) - math.log1p(-x)

    def d2h(self, x: float) -> float:
        return 1.0 / (x * (1.0 - x))

    def choice_map(self, z: float) -> float:
        if not math.isfinite(z):
            raise ValueError(f"non-finite score {z}")
        return logistic(z)

    def choice_map_array(self, z: np.ndarray) -> np.ndarray:
        return logistic(z)

    def choice_map_derivative(self, z: float) -> float:
        x = self.choice_map(z)
        return x * (1.0 - x)


class LogBarrier(Regularizer):
    """h(x) = -ln x - ln(1 - x)."""

    name = "log_barrier"

    def h(self, x: float) -> float:
        return -math.log(x) - math.log1p(-x)

    def dh(self, x: float) -> float:
        return 1.0 / (1.0 - x) - 1.0 / x

    def d2h(self, x: float) -> float:
        return 1.0 / (x * x) + 1.0 / ((1.0 - x) * (1.0 - x))


def _xlogx(v: float) -> float:
    return 0.0 if v == 0.0 else v * math.log(v)


REGULARIZERS: Dict[str, Type[Regularizer]] = {
    Entropy.name: Entropy,
    LogBarrier.name: LogBarrier,
}


def get_regularizer(name: str) -> Regularizer:
    try:
        return REGULARIZERS[name]()
    except KeyError:
        raise ValueError(
            f"unknown regularizer '{name}', expecting one of {list(REGULARIZERS)}"
        ) from None


def regularizers_for(n_players: int, names: Sequence[str]) -> List[Regularizer]:
    """One regularizer per player from a single name or a per-player list."""
    if len(names) == 1:
        names = list(names) * n_players
    if len(names) != n_players:
        raise ValueError(f"expecting 1 or {n_players} regularizer names, got {len(names)}")
    return [get_regularizer(n) for n in names]


def choice_map(r: Regularizer, z: float) -> float:
    return r.choice_map(z)


def choice_map_derivative(r: Regularizer, z: float) -> float:
    return r.choice_map_derivative(z)


def inverse_choice(r: Regularizer, x: float) -> float:
    return r.inverse_choice(x)
