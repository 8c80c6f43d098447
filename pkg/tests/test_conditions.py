import numpy as np
import pytest

from forelpb.conditions import (
    DegenerateMatrix,
    NonGenericMatrix,
    certify_pb,
    dominance_profile,
    dominant_strategy,
    edge_condition,
    feedback_sign,
    is_generic,
    mixed_difference,
    nearest_neighbor_cooperation,
    prev_neighbor_cooperation,
    zero_sum_saddle,
)
from forelpb.demos import MATCH, MISMATCH, chain_dominant, mmp4, nn_coop, torus
from forelpb.dynamics import (
    nn_g,
    prev_neighbor_g,
    prev_neighbor_replicator_derivative,
    replicator_field_z,
)
from forelpb.game import BinaryGame, PayoffMatrix
from forelpb.graph import ROOT_CYCLE


def test_matrix_conditions():
    assert mixed_difference(MATCH) == 4.0
    assert mixed_difference(MISMATCH) == -4.0
    assert feedback_sign(MATCH) == 1
    assert feedback_sign(MISMATCH) == -1
    assert prev_neighbor_cooperation(MATCH)
    assert not prev_neighbor_cooperation(MISMATCH)

    flat = PayoffMatrix.of(1, 0, 0, -1)
    assert mixed_difference(flat) == 0.0
    assert not is_generic(flat)
    with pytest.raises(NonGenericMatrix):
        feedback_sign(flat)

    assert dominant_strategy(PayoffMatrix.of(2, 0, 1, 0)) == 0
    assert dominant_strategy(PayoffMatrix.of(0, 1, 0, 2)) == 1
    assert dominant_strategy(MATCH) is None
    with pytest.raises(DegenerateMatrix):
        dominant_strategy(PayoffMatrix.of(1, 1, 0, 1))

    assert zero_sum_saddle(MATCH)
    assert zero_sum_saddle(MISMATCH)
    assert not zero_sum_saddle(PayoffMatrix.of(2, 0, 1, 0))


def test_edge_condition():
    ec = edge_condition(3, 0, MISMATCH)
    assert (ec.pred, ec.succ) == (3, 0)
    assert ec.generic
    assert ec.feedback_sign == -1
    assert ec.dominant_strategy is None
    assert not ec.degenerate

    ec = edge_condition(0, 1, PayoffMatrix.of(1, 1, 0, 1))
    assert ec.degenerate
    assert ec.dominant_strategy is None


def test_feedback_sign_matches_sampled_partial():
    rng = np.random.default_rng(5)
    step = 1e-5
    for _ in range(100):
        a = PayoffMatrix(rng.uniform(-5, 5, (2, 2)).tolist())
        if not is_generic(a, 0.5):
            continue
        game = BinaryGame.from_triples(2, [(0, 1, a)])
        sign = feedback_sign(a)
        for z0 in rng.uniform(-4, 4, 100):
            z1 = rng.uniform(-4, 4)
            plus = replicator_field_z(game, [z0 + step, z1])[1]
            minus = replicator_field_z(game, [z0 - step, z1])[1]
            assert np.sign((plus - minus) / (2 * step)) == sign


def test_prev_neighbor_derivative_sign():
    rng = np.random.default_rng(9)
    for _ in range(200):
        a = PayoffMatrix(rng.uniform(-5, 5, (2, 2)).tolist())
        x_prev, x_self = rng.uniform(0.01, 0.99, 2)
        derivative = prev_neighbor_replicator_derivative(a, x_prev, x_self)
        expected = x_self * (1.0 - x_self) * mixed_difference(a)
        assert derivative == pytest.approx(expected, rel=1e-9, abs=1e-12)

        def r(xp):
            return x_self * (prev_neighbor_g(a, xp, 1.0) - prev_neighbor_g(a, xp, x_self))

        h = 1e-6
        sampled = (r(x_prev + h) - r(x_prev - h)) / (2 * h)
        assert sampled == pytest.approx(expected, rel=1e-5, abs=1e-8)


def test_certify_mmp4():
    game = mmp4().game
    assert game is not None
    report = certify_pb(game)
    assert report.certified
    assert report.reasons == []
    assert report.connected
    assert report.one_predecessor_violations == []
    assert report.decomposition is not None
    assert report.decomposition.kind == ROOT_CYCLE
    assert [ec.feedback_sign for ec in report.edges] == [-1, 1, -1, 1]

    # the report serializes
    assert '"certified": true' in report.to_json()


def test_certify_failures():
    game = torus().game
    assert game is not None
    report = certify_pb(game)
    assert not report.certified
    assert not report.connected
    assert report.decomposition is None
    assert any("disconnected" in r for r in report.reasons)

    two = BinaryGame.from_triples(3, [(0, 2, MATCH), (1, 2, MATCH), (2, 0, MATCH)])
    report = certify_pb(two)
    assert not report.certified
    assert report.one_predecessor_violations == [2]

    flat = BinaryGame.from_triples(2, [(0, 1, PayoffMatrix.of(1, 0, 0, -1))])
    report = certify_pb(flat)
    assert not report.certified
    assert any("non-generic" in r for r in report.reasons)


def test_dominance_profile():
    game = chain_dominant().game
    assert game is not None
    assert dominance_profile(game) == [0, 0, 1, 1]

    game = mmp4().game
    assert game is not None
    assert dominance_profile(game) == [None, None, None, None]

    # without drift the root stays undetermined, and so does its matching successor
    game = BinaryGame.from_triples(2, [(0, 1, MATCH)])
    assert dominance_profile(game) == [None, None]
    game = BinaryGame.from_triples(2, [(0, 1, MATCH)], drift=(-1.0, 0.0))
    assert dominance_profile(game) == [1, 1]


def test_nearest_neighbor_cooperation():
    demo = nn_coop()
    assert demo.nn_game is not None
    for t in demo.nn_game.tensors:
        verdict = nearest_neighbor_cooperation(t)
        assert verdict.holds
        assert verdict.values == [2.0, 2.0, 2.0, 2.0]

    t = np.zeros((2, 2, 2))
    t[0, 1, 0] = 1.0
    verdict = nearest_neighbor_cooperation(t)
    assert not verdict.holds
    assert verdict.satisfied == [False, False, False, False]

    verdict = nearest_neighbor_cooperation(np.zeros((2, 2, 2)))
    assert not verdict.holds

    # coordination with the previous neighbor only
    t = np.zeros((2, 2, 2))
    for p in (0, 1):
        t[p, p, :] = 1.0
    verdict = nearest_neighbor_cooperation(t)
    assert verdict.values == [2.0, 2.0, 0.0, 0.0]
    assert verdict.satisfied == [True, True, False, False]
    assert not verdict.holds


def mixed_partial(f, u: float, v: float, h: float = 1e-3) -> float:
    return (f(u + h, v + h) - f(u + h, v - h) - f(u - h, v + h) + f(u - h, v - h)) / (
        4 * h * h
    )


def nn_mixed_partials(t, a: float, b: float, c: float):
    """Sampled d2g/(d prev d self) and d2g/(d next d self)."""
    d12 = mixed_partial(lambda u, v: nn_g(t, u, v, c), a, b)
    d32 = mixed_partial(lambda u, v: nn_g(t, a, v, u), c, b)
    return d12, d32


def test_prev_neighbor_cooperation_matches_sampled_partial():
    rng = np.random.default_rng(23)
    grid = np.linspace(0.1, 0.9, 5)
    for _ in range(200):
        a = PayoffMatrix.of(*rng.normal(size=4))
        signs = {
            mixed_partial(lambda u, v, m=a: prev_neighbor_g(m, u, v), xp, xs) > 0
            for xp in grid
            for xs in grid
        }
        assert signs == {prev_neighbor_cooperation(a)}


def test_nearest_neighbor_cooperation_matches_sampled_partials():
    rng = np.random.default_rng(29)
    # the mixed partials are affine in the remaining mix, so the ends decide the sign
    ends = (0.0, 0.5, 1.0)
    holds_count = 0
    for _ in range(200):
        t = rng.normal(size=(2, 2, 2))
        t[0, 0, :] += 1.0
        t[1, 1, :] += 1.0
        t[:, 0, 0] += 1.0
        t[:, 1, 1] += 1.0

        sampled = all(nn_mixed_partials(t, 0.5, 0.5, c)[0] > 0 for c in ends) and all(
            nn_mixed_partials(t, a, 0.5, 0.5)[1] > 0 for a in ends
        )
        verdict = nearest_neighbor_cooperation(t)
        assert verdict.holds == sampled
        if verdict.holds:
            holds_count += 1
            for a, b, c in rng.uniform(0.05, 0.95, size=(50, 3)):
                d12, d32 = nn_mixed_partials(t, a, b, c)
                assert d12 > 0 and d32 > 0
    assert 0 < holds_count < 200
