"""
Hypotheses on payoff matrices and graphs: genericity, feedback signs,
dominance, cooperation conditions, and the combined certification report.
"""

from dataclasses import dataclass, field
from typing import Final, List, Optional

import numpy as np
from dataclasses_json import dataclass_json

from forelpb.game import BinaryGame, PayoffMatrix
from forelpb.graph import (
    GraphDecomposition,
    root_decomposition,
    validate_one_predecessor,
    weakly_connected,
)

DEFAULT_GENERIC_TOL: Final[float] = 1e-9


class NonGenericMatrix(ValueError):
    pass


class DegenerateMatrix(ValueError):
    """Own-strategy advantage is exactly 0 under some predecessor action."""


def mixed_difference(a: PayoffMatrix) -> float:
    return a.a00 - a.a01 - a.a10 + a.a11


def is_generic(a: PayoffMatrix, tol: float = DEFAULT_GENERIC_TOL) -> bool:
    assert tol >= 0
    return abs(mixed_difference(a)) > tol


def feedback_sign(a: PayoffMatrix) -> int:
    d = mixed_difference(a)
    if d == 0.0:
        raise NonGenericMatrix(f"mixed difference is 0 for {a.to_list()}")
    return 1 if d > 0 else -1


def own_advantages(a: PayoffMatrix):
    """(d0, d1): advantage of own strategy 0 when the predecessor plays 0 resp. 1."""
    return a.a00 - a.a01, a.a10 - a.a11


def dominant_strategy(a: PayoffMatrix) -> Optional[int]:
    d0, d1 = own_advantages(a)
    if d0 * d1 == 0.0:
        raise DegenerateMatrix(f"tie in own-strategy advantage for {a.to_list()}")
    if d0 > 0 and d1 > 0:
        return 0
    if d0 < 0 and d1 < 0:
        return 1
    return None


def prev_neighbor_cooperation(a: PayoffMatrix) -> bool:
    return mixed_difference(a) > 0


def zero_sum_saddle(a: PayoffMatrix) -> bool:
    """
    True iff the successor's payoff, seen as a zero-sum game against the
    predecessor, has an interior saddle point: the two pure-response lines have
    slopes of opposite sign in the predecessor's mix.
    """
    return (a.a00 - a.a10) * (a.a01 - a.a11) < 0


@dataclass_json
@dataclass
class CooperationVerdict:
    holds: bool
    # next-grouped pair first (next = 0, next = 1), then prev-grouped (prev = 0, 1)
    values: List[float]
    satisfied: List[bool]


def nearest_neighbor_cooperation(t) -> CooperationVerdict:
    """
    :param t: 2x2x2 payoffs indexed [prev][self][next].
    """
    m = np.asarray(t, dtype=float)
    assert m.shape == (2, 2, 2) and np.all(np.isfinite(m))
    values = [
        m[0, 0, n] - m[0, 1, n] - m[1, 0, n] + m[1, 1, n] for n in (0, 1)
    ] + [m[p, 0, 0] - m[p, 0, 1] - m[p, 1, 0] + m[p, 1, 1] for p in (0, 1)]
    satisfied = [bool(v > 0) for v in values]
    return CooperationVerdict(
        holds=all(satisfied), values=[float(v) for v in values], satisfied=satisfied
    )


@dataclass_json
@dataclass
class EdgeCondition:
    pred: int
    succ: int
    mixed_difference: float
    generic: bool
    feedback_sign: Optional[int]
    dominant_strategy: Optional[int]
    degenerate: bool
    zero_sum_saddle: bool


@dataclass_json
@dataclass
class ConditionReport:
    n_players: int
    edges: List[EdgeCondition]
    one_predecessor_violations: List[int]
    connected: bool
    certified: bool
    reasons: List[str] = field(default_factory=list)
    decomposition: Optional[GraphDecomposition] = None


def edge_condition(
    pred: int, succ: int, a: PayoffMatrix, tol: float = DEFAULT_GENERIC_TOL
) -> EdgeCondition:
    generic = is_generic(a, tol)
    try:
        dominant = dominant_strategy(a)
        degenerate = False
    except DegenerateMatrix:
        dominant = None
        degenerate = True
    return EdgeCondition(
        pred=pred,
        succ=succ,
        mixed_difference=mixed_difference(a),
        generic=generic,
        feedback_sign=feedback_sign(a) if generic else None,
        dominant_strategy=dominant,
        degenerate=degenerate,
        zero_sum_saddle=zero_sum_saddle(a),
    )


def certify_pb(game: BinaryGame, tol: float = DEFAULT_GENERIC_TOL) -> ConditionReport:
    """
    Certified iff every player has at most one predecessor, the graph is weakly
    connected, and every edge matrix is generic at ``tol``.
    """
    edges = [edge_condition(e.pred, e.succ, e.matrix, tol) for e in game.edges]
    violations = validate_one_predecessor(game.graph)
    connected = weakly_connected(game.graph)

    reasons = []
    if violations:
        reasons.append(f"one-predecessor violation at vertices {violations}")
    if not connected:
        reasons.append("disconnected interaction graph")
    for ec in edges:
        if not ec.generic:
            reasons.append(
                f"non-generic edge {ec.pred}->{ec.succ}"
                f" (mixed difference {ec.mixed_difference})"
            )

    decomposition = None
    if not violations and connected:
        decomposition = root_decomposition(game.graph)

    return ConditionReport(
        n_players=game.n_players,
        edges=edges,
        one_predecessor_violations=violations,
        connected=connected,
        certified=not reasons,
        reasons=reasons,
        decomposition=decomposition,
    )


def dominance_profile(game: BinaryGame) -> List[Optional[int]]:
    """
    Pure strategies forced by dominance, propagated along the predecessor links.

    A player takes its dominant strategy when its incoming matrix has one; a player
    whose predecessor is determined takes its strict best response to it; a player
    without predecessor takes the strategy favored by a nonzero drift.
    Entries stay None where nothing is forced.
    """
    game.require_one_predecessor()
    n = game.n_players
    drift = game.root_drift
    res: List[Optional[int]] = [None] * n
    matrices = [game.incoming_matrix(k) for k in range(n)]
    preds = [game.predecessor(k) for k in range(n)]

    for k in range(n):
        a = matrices[k]
        if a is None:
            if drift[k] != 0.0:
                res[k] = 0 if drift[k] > 0 else 1
            continue
        try:
            res[k] = dominant_strategy(a)
        except DegenerateMatrix:
            pass

    changed = True
    while changed:
        changed = False
        for k in range(n):
            a, p = matrices[k], preds[k]
            if res[k] is not None or a is None or p is None or res[p] is None:
                continue
            row = a[res[p]]
            if row[0] != row[1]:
                res[k] = 0 if row[0] > row[1] else 1
                changed = True
    return res
