"""
Binary graphical polymatrix games.

Every player has two strategies, 0 and 1. A directed edge (pred, succ) carries a
2x2 payoff matrix for the successor, indexed ``A[pred strategy][own strategy]``.
A player's payoff is the sum over its incoming edges; players without incoming
edges get a constant payoff of 0.

Mixed profiles are numpy vectors with ``x[i]`` = probability that player i plays
strategy 0.
"""

import math
from dataclasses import dataclass
from functools import cached_property
from typing import Any, List, Optional, Sequence, Tuple

import numpy as np

from forelpb.graph import GameGraph, validate_one_predecessor, OnePredecessorViolation


class InvalidGame(ValueError):
    """Structural problem in a game definition (ids, self-edges, duplicates)."""


class BoundaryProfileError(ValueError):
    """A strictly interior profile was required."""


@dataclass(frozen=True)
class PayoffMatrix:
    """
    2x2 payoffs of a successor, rows = predecessor strategy, columns = own strategy.
    """

    entries: Tuple[Tuple[float, float], Tuple[float, float]]

    def __post_init__(self):
        rows = tuple(tuple(float(v) for v in row) for row in self.entries)
        if len(rows) != 2 or any(len(row) != 2 for row in rows):
            raise InvalidGame(f"payoff matrix must be 2x2, got {self.entries}")
        if not all(math.isfinite(v) for row in rows for v in row):
            raise InvalidGame(f"payoff entries must be finite, got {self.entries}")
        object.__setattr__(self, "entries", rows)

    @classmethod
    def of(cls, a00: float, a01: float, a10: float, a11: float) -> "PayoffMatrix":
        return cls(((a00, a01), (a10, a11)))

    def __getitem__(self, row: int) -> Tuple[float, float]:
        return self.entries[row]

    @property
    def a00(self) -> float:
        return self.entries[0][0]

    @property
    def a01(self) -> float:
        return self.entries[0][1]

    @property
    def a10(self) -> float:
        return self.entries[1][0]

    @property
    def a11(self) -> float:
        return self.entries[1][1]

    def scaled(self, factor: float) -> "PayoffMatrix":
        (a00, a01), (a10, a11) = self.entries
        return PayoffMatrix.of(factor * a00, factor * a01, factor * a10, factor * a11)

    def to_list(self) -> List[List[float]]:
        return [list(row) for row in self.entries]


@dataclass(frozen=True)
class Edge:
    pred: int
    succ: int
    matrix: PayoffMatrix


@dataclass(frozen=True)
class _EdgeArrays:
    pred: np.ndarray
    succ: np.ndarray
    a00: np.ndarray
    a01: np.ndarray
    a10: np.ndarray
    a11: np.ndarray


@dataclass(frozen=True)
class BinaryGame:
    """
    Immutable binary game. Constructors accept graphs with several predecessors
    per player so that the graph checks can report them; the dynamics require
    at most one.

    ``drift`` is an optional per-player constant score drift applied to players
    without incoming edges (empty means all zeros).
    """

    n_players: int
    edges: Tuple[Edge, ...]
    drift: Tuple[float, ...] = ()
    name: str = ""

    def __post_init__(self):
        if self.n_players < 1:
            raise InvalidGame(f"n_players must be positive, got {self.n_players}")
        object.__setattr__(self, "edges", tuple(self.edges))
        seen = set()
        for e in self.edges:
            for v in (e.pred, e.succ):
                if not 0 <= v < self.n_players:
                    raise InvalidGame(f"vertex id {v} out of range [0, {self.n_players})")
            if e.pred == e.succ:
                raise InvalidGame(f"self-edge at vertex {e.pred}")
            if (e.pred, e.succ) in seen:
                raise InvalidGame(f"duplicate edge {e.pred}->{e.succ}")
            seen.add((e.pred, e.succ))
        drift = tuple(float(d) for d in self.drift)
        if drift and len(drift) != self.n_players:
            raise InvalidGame(
                f"drift must have {self.n_players} entries, got {len(drift)}"
            )
        if not all(math.isfinite(d) for d in drift):
            raise InvalidGame("drift entries must be finite")
        object.__setattr__(self, "drift", drift)

    @classmethod
    def from_triples(
        cls,
        n_players: int,
        triples: Sequence[Tuple[int, int, Any]],
        drift: Sequence[float] = (),
        name: str = "",
    ) -> "BinaryGame":
        """
        Convenience constructor from (pred, succ, matrix) triples where the matrix
        is a PayoffMatrix or a nested 2x2 sequence.
        """
        edges = []
        for pred, succ, m in triples:
            matrix = m if isinstance(m, PayoffMatrix) else PayoffMatrix(m)
            edges.append(Edge(int(pred), int(succ), matrix))
        return cls(n_players, tuple(edges), tuple(drift), name)

    @cached_property
    def graph(self) -> GameGraph:
        return GameGraph(self.n_players, tuple((e.pred, e.succ) for e in self.edges))

    @cached_property
    def arrays(self) -> _EdgeArrays:
        return _EdgeArrays(
            pred=np.array([e.pred for e in self.edges], dtype=np.intp),
            succ=np.array([e.succ for e in self.edges], dtype=np.intp),
            a00=np.array([e.matrix.a00 for e in self.edges], dtype=float),
            a01=np.array([e.matrix.a01 for e in self.edges], dtype=float),
            a10=np.array([e.matrix.a10 for e in self.edges], dtype=float),
            a11=np.array([e.matrix.a11 for e in self.edges], dtype=float),
        )

    @cached_property
    def root_drift(self) -> np.ndarray:
        """Drift of players without incoming edges, 0 elsewhere."""
        res = np.zeros(self.n_players)
        if self.drift:
            has_pred = np.zeros(self.n_players, dtype=bool)
            has_pred[self.arrays.succ] = True
            res = np.where(has_pred, 0.0, np.array(self.drift))
        return res

    def incoming(self, k: int) -> List[Edge]:
        self._check_player(k)
        return [e for e in self.edges if e.succ == k]

    def predecessor(self, k: int) -> Optional[int]:
        """The unique predecessor of k, or None for players without incoming edges."""
        edges = self.incoming(k)
        if len(edges) > 1:
            raise OnePredecessorViolation([k])
        return edges[0].pred if edges else None

    def incoming_matrix(self, k: int) -> Optional[PayoffMatrix]:
        edges = self.incoming(k)
        if len(edges) > 1:
            raise OnePredecessorViolation([k])
        return edges[0].matrix if edges else None

    def require_one_predecessor(self) -> None:
        violations = self._one_predecessor_violations
        if violations:
            raise OnePredecessorViolation(violations)

    @cached_property
    def _one_predecessor_violations(self) -> List[int]:
        return validate_one_predecessor(self.graph)

    def _check_player(self, k: int) -> None:
        if not 0 <= k < self.n_players:
            raise IndexError(f"player {k} out of range [0, {self.n_players})")


def as_mixed_profile(game: BinaryGame, x: Any) -> np.ndarray:
    res = np.asarray(x, dtype=float)
    if res.shape != (game.n_players,):
        raise ValueError(f"profile must have {game.n_players} entries, got {res.shape}")
    if np.any(res < 0.0) or np.any(res > 1.0) or not np.all(np.isfinite(res)):
        raise ValueError(f"profile entries must be in [0, 1]: {res}")
    return res


def strategy_values(game: BinaryGame, x: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """
    Per-player expected payoff of playing strategy 0 and of playing strategy 1
    against the current mix of the predecessors.
    """
    a = game.arrays
    n = game.n_players
    xp = x[a.pred]
    v0 = np.bincount(a.succ, weights=xp * a.a00 + (1.0 - xp) * a.a10, minlength=n)
    v1 = np.bincount(a.succ, weights=xp * a.a01 + (1.0 - xp) * a.a11, minlength=n)
    return v0.astype(float), v1.astype(float)


def payoff_vector(game: BinaryGame, x: np.ndarray) -> np.ndarray:
    """Expected payoffs of all players at the mixed profile x."""
    v0, v1 = strategy_values(game, x)
    return x * v0 + (1.0 - x) * v1


def expected_payoff(game: BinaryGame, x: Any, k: int) -> float:
    game._check_player(k)
    xv = as_mixed_profile(game, x)
    total = 0.0
    for e in game.incoming(k):
        xp, xk = xv[e.pred], xv[k]
        m = e.matrix
        total += (
            xp * xk * m.a00
            + xp * (1.0 - xk) * m.a01
            + (1.0 - xp) * xk * m.a10
            + (1.0 - xp) * (1.0 - xk) * m.a11
        )
    return float(total)


def pure_payoff(game: BinaryGame, s: Sequence[int], k: int) -> float:
    game._check_player(k)
    if len(s) != game.n_players or any(v not in (0, 1) for v in s):
        raise ValueError(f"pure profile must be {game.n_players} entries in {{0,1}}: {s}")
    return float(sum(e.matrix[s[e.pred]][s[k]] for e in game.incoming(k)))


def social_welfare(game: BinaryGame, x: Any) -> float:
    xv = as_mixed_profile(game, x)
    return float(sum(expected_payoff(game, xv, k) for k in range(game.n_players)))


def kl_divergence(p: Any, x: Any) -> float:
    """
    Sum over players of the KL divergence between the Bernoulli laws p_i and x_i.
    """
    pv = np.asarray(p, dtype=float)
    xv = np.asarray(x, dtype=float)
    if pv.shape != xv.shape:
        raise ValueError(f"shape mismatch: p {pv.shape} vs x {xv.shape}")
    if np.any(xv <= 0.0) or np.any(xv >= 1.0):
        raise BoundaryProfileError(f"x must be strictly interior: {xv}")
    if np.any(pv < 0.0) or np.any(pv > 1.0):
        raise ValueError(f"p entries must be in [0, 1]: {pv}")
    q = 1.0 - pv
    # 0 ln 0 := 0
    t0 = np.where(pv > 0.0, pv * np.log(np.where(pv > 0.0, pv, 1.0) / xv), 0.0)
    t1 = np.where(q > 0.0, q * np.log(np.where(q > 0.0, q, 1.0) / (1.0 - xv)), 0.0)
    return float(max(0.0, np.sum(t0 + t1)))


def nash_gap(game: BinaryGame, x: Any) -> float:
    """
    Largest payoff gain available to a single player by a pure unilateral deviation;
    0 at a Nash equilibrium.
    """
    xv = as_mixed_profile(game, x)
    v0, v1 = strategy_values(game, xv)
    current = xv * v0 + (1.0 - xv) * v1
    return float(np.max(np.maximum(v0, v1) - current))


def vertex_profile(s: Sequence[int]) -> np.ndarray:
    """Mixed profile of the pure profile s (strategy 0 means x = 1)."""
    return np.array([1.0 if v == 0 else 0.0 for v in s])

