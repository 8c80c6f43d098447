"""
Vector fields of FoReL dynamics on binary one-predecessor games.

Scores are ``z_i`` = (accumulated payoff of strategy 0) - (of strategy 1), so
``x_i = Q_i(z_i)`` is increasing in ``z_i``.
"""

from dataclasses import dataclass
from typing import Callable, Optional, Sequence

import numpy as np

from forelpb.game import BinaryGame, PayoffMatrix, payoff_vector, strategy_values
from forelpb.regularizer import BoundaryStateError, Entropy, Regularizer, logistic

Field = Callable[[np.ndarray], np.ndarray]

Z_COORDINATES = "z"
X_COORDINATES = "x"


def all_entropy(regs: Sequence[Regularizer]) -> bool:
    return all(isinstance(r, Entropy) for r in regs)


def z_to_x(regs: Sequence[Regularizer], z) -> np.ndarray:
    zv = np.asarray(z, dtype=float)
    if not np.all(np.isfinite(zv)):
        raise ValueError(f"non-finite scores: {zv}")
    if len(set(regs)) == 1:
        return np.asarray(regs[0].choice_map_array(zv), dtype=float)
    return np.array([r.choice_map(float(v)) for r, v in zip(regs, zv)])


def x_to_z(regs: Sequence[Regularizer], x) -> np.ndarray:
    xv = np.asarray(x, dtype=float)
    if np.any(xv <= 0.0) or np.any(xv >= 1.0):
        raise BoundaryStateError(f"x must be strictly interior: {xv}")
    if all_entropy(regs):
        return np.log(xv) - np.log1p(-xv)
    return np.array([r.inverse_choice(float(v)) for r, v in zip(regs, xv)])


def score_drift(game: BinaryGame, x: np.ndarray) -> np.ndarray:
    """
    v_{i,0}(x) - v_{i,1}(x) summed over incoming edges, plus the root drift of
    players without incoming edges.
    """
    v0, v1 = strategy_values(game, x)
    return v0 - v1 + game.root_drift


def forel_field(game: BinaryGame, regs: Sequence[Regularizer], z) -> np.ndarray:
    game.require_one_predecessor()
    return score_drift(game, z_to_x(regs, z))


def replicator_field_z(game: BinaryGame, z) -> np.ndarray:
    """
    Entropy-regularized score field written as c + (D/2) tanh(z_pred/2) per edge.
    The odd form keeps sign-symmetric subspaces exactly invariant in floating point.
    """
    game.require_one_predecessor()
    zv = np.asarray(z, dtype=float)
    a = game.arrays
    base = 0.5 * ((a.a00 - a.a01) + (a.a10 - a.a11))
    half_d = 0.5 * (a.a00 - a.a01 - a.a10 + a.a11)
    per_edge = base + half_d * np.tanh(0.5 * zv[a.pred])
    res = np.bincount(a.succ, weights=per_edge, minlength=game.n_players)
    return res.astype(float) + game.root_drift


def replicator_field_x(game: BinaryGame, x) -> np.ndarray:
    xv = np.asarray(x, dtype=float)
    return xv * (1.0 - xv) * score_drift(game, xv)


def corner_drift(game: BinaryGame, s: Sequence[int]) -> np.ndarray:
    """Score drift at the vertex of the pure profile s."""
    x = np.array([1.0 if v == 0 else 0.0 for v in s])
    return score_drift(game, x)


def corner_pull(game: BinaryGame, s: Sequence[int]) -> np.ndarray:
    """
    Per player: positive when the drift pushes further toward its own pure
    strategy in s, negative when it pushes away, 0 when neutral.
    """
    sign = np.array([1.0 if v == 0 else -1.0 for v in s])
    return sign * corner_drift(game, s)


@dataclass(frozen=True)
class NearestNeighborGame:
    """
    Cyclic game where player k's payoff is T_k[s_{k-1}][s_k][s_{k+1}]
    (player 0's previous neighbor is N-1, its next is 1).
    """

    tensors: np.ndarray

    def __post_init__(self):
        t = np.array(self.tensors, dtype=float)
        if t.ndim != 4 or t.shape[1:] != (2, 2, 2):
            raise ValueError(f"expecting N x 2 x 2 x 2 tensors, got shape {t.shape}")
        if t.shape[0] < 3:
            raise ValueError("nearest-neighbor games need at least 3 players")
        if not np.all(np.isfinite(t)):
            raise ValueError("tensor entries must be finite")
        t.setflags(write=False)
        object.__setattr__(self, "tensors", t)

    @property
    def n_players(self) -> int:
        return int(self.tensors.shape[0])

    def __eq__(self, other) -> bool:
        return isinstance(other, NearestNeighborGame) and np.array_equal(
            self.tensors, other.tensors
        )

    def __hash__(self) -> int:
        return hash(self.tensors.tobytes())


def nn_fitness(game: NearestNeighborGame, x) -> np.ndarray:
    """(N, 2) array with the expected payoff of each own strategy."""
    xv = np.asarray(x, dtype=float)
    prev = np.roll(xv, 1)
    nxt = np.roll(xv, -1)
    wp = np.stack([prev, 1.0 - prev], axis=1)
    wn = np.stack([nxt, 1.0 - nxt], axis=1)
    return np.einsum("kp,kpsn,kn->ks", wp, game.tensors, wn)


def nn_payoff_vector(game: NearestNeighborGame, x) -> np.ndarray:
    xv = np.asarray(x, dtype=float)
    f = nn_fitness(game, xv)
    return xv * f[:, 0] + (1.0 - xv) * f[:, 1]


def nn_replicator_field_x(game: NearestNeighborGame, x) -> np.ndarray:
    xv = np.asarray(x, dtype=float)
    f = nn_fitness(game, xv)
    return xv * (1.0 - xv) * (f[:, 0] - f[:, 1])


def nn_g(t: np.ndarray, a: float, b: float, c: float) -> float:
    """Trilinear expected payoff for neighbor mixes (a, b, c) = (prev, self, next)."""
    w = [np.array([v, 1.0 - v]) for v in (a, b, c)]
    return float(np.einsum("p,psn,s,n->", w[0], np.asarray(t, dtype=float), w[1], w[2]))


def nn_replicator_field_x_via_g(game: NearestNeighborGame, x) -> np.ndarray:
    """The same field as nn_replicator_field_x written as x_k (g(., 1, .) - g(., x_k, .))."""
    xv = np.asarray(x, dtype=float)
    n = game.n_players
    res = np.empty(n)
    for k in range(n):
        a, c = xv[(k - 1) % n], xv[(k + 1) % n]
        t = game.tensors[k]
        res[k] = xv[k] * (nn_g(t, a, 1.0, c) - nn_g(t, a, xv[k], c))
    return res


def prev_neighbor_g(a: PayoffMatrix, x_prev: float, x_self: float) -> float:
    """Bilinear expected payoff of a successor given both mixes."""
    return (
        x_prev * x_self * a.a00
        + x_prev * (1.0 - x_self) * a.a01
        + (1.0 - x_prev) * x_self * a.a10
        + (1.0 - x_prev) * (1.0 - x_self) * a.a11
    )


def prev_neighbor_replicator_derivative(
    a: PayoffMatrix, x_prev: float, x_self: float
) -> float:
    """
    Derivative in x_prev of x_self (g(x_prev, 1) - g(x_prev, x_self)), which
    equals x_self (1 - x_self) times the mixed difference.
    """
    dg_self1 = a.a00 - a.a10
    dg_mix = (a.a00 - a.a10) * x_self + (a.a01 - a.a11) * (1.0 - x_self)
    return x_self * (dg_self1 - dg_mix)


@dataclass(frozen=True)
class FlowSystem:
    """
    What the solver needs to integrate one set of dynamics and derive samples:
    the autonomous field in the integration coordinate, the map to mixed
    profiles, the induced rate of the mixed profile, and the payoffs.
    """

    field: Field
    coordinates: str
    n_players: int
    to_x: Callable[[np.ndarray], np.ndarray]
    x_rate: Callable[[np.ndarray, np.ndarray], np.ndarray]
    payoffs: Callable[[np.ndarray], np.ndarray]
    label: str = ""


def binary_game_system(
    game: BinaryGame,
    regs: Optional[Sequence[Regularizer]] = None,
    coordinates: str = Z_COORDINATES,
) -> FlowSystem:
    """
    FoReL dynamics of a binary game. With entropy everywhere the closed-form
    replicator fields are used.
    """
    game.require_one_predecessor()
    regs = list(regs) if regs is not None else [Entropy()] * game.n_players
    assert len(regs) == game.n_players
    entropy = all_entropy(regs)

    def payoffs(x: np.ndarray) -> np.ndarray:
        return payoff_vector(game, x)

    if coordinates == X_COORDINATES:
        if not entropy:
            raise ValueError("x-coordinate integration requires entropy regularizers")
        return FlowSystem(
            field=lambda x: replicator_field_x(game, x),
            coordinates=X_COORDINATES,
            n_players=game.n_players,
            to_x=lambda x: x,
            x_rate=lambda x, rate: rate,
            payoffs=payoffs,
            label=game.name,
        )

    assert coordinates == Z_COORDINATES, f"unknown coordinates {coordinates}"
    if entropy:

        def field(z: np.ndarray) -> np.ndarray:
            return replicator_field_z(game, z)

        def x_rate(z: np.ndarray, rate: np.ndarray) -> np.ndarray:
            x = logistic(z)
            return x * (1.0 - x) * rate

    else:

        def field(z: np.ndarray) -> np.ndarray:
            return forel_field(game, regs, z)

        def x_rate(z: np.ndarray, rate: np.ndarray) -> np.ndarray:
            derivative = np.array(
                [r.choice_map_derivative(float(v)) for r, v in zip(regs, z)]
            )
            return derivative * rate

    return FlowSystem(
        field=field,
        coordinates=Z_COORDINATES,
        n_players=game.n_players,
        to_x=lambda z: z_to_x(regs, z),
        x_rate=x_rate,
        payoffs=payoffs,
        label=game.name,
    )


def nearest_neighbor_system(game: NearestNeighborGame, label: str = "") -> FlowSystem:
    return FlowSystem(
        field=lambda x: nn_replicator_field_x(game, x),
        coordinates=X_COORDINATES,
        n_players=game.n_players,
        to_x=lambda x: x,
        x_rate=lambda x, rate: rate,
        payoffs=lambda x: nn_payoff_vector(game, x),
        label=label,
    )


def bare_system(field: Field, n: int, coordinates: str = Z_COORDINATES) -> FlowSystem:
    """A field without game: zero payoffs, entropy choice map in z coordinates."""
    if coordinates == X_COORDINATES:
        return FlowSystem(field, coordinates, n, lambda x: x, lambda x, r: r, _zeros)
    return FlowSystem(
        field,
        coordinates,
        n,
        lambda z: np.asarray(logistic(z), dtype=float),
        lambda z, r: logistic(z) * (1.0 - logistic(z)) * r,
        _zeros,
    )


def _zeros(x: np.ndarray) -> np.ndarray:
    return np.zeros_like(x)

