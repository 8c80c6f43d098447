import itertools

import numpy as np
import pytest

from forelpb.demos import MATCH, MISMATCH, mmp4
from forelpb.game import (
    BinaryGame,
    BoundaryProfileError,
    InvalidGame,
    PayoffMatrix,
    expected_payoff,
    kl_divergence,
    nash_gap,
    payoff_vector,
    pure_payoff,
    social_welfare,
    vertex_profile,
)
from forelpb.graph import OnePredecessorViolation


def random_cycle_game(rng, n: int) -> BinaryGame:
    triples = []
    for i in range(n):
        triples.append((i, (i + 1) % n, rng.uniform(-3, 3, (2, 2)).tolist()))
    return BinaryGame.from_triples(n, triples)


def test_payoff_matrix():
    a = PayoffMatrix.of(1, 2, 3, 4)
    assert a[0] == (1.0, 2.0)
    assert a[1][0] == 3.0
    assert (a.a00, a.a01, a.a10, a.a11) == (1.0, 2.0, 3.0, 4.0)
    assert a.scaled(2).to_list() == [[2.0, 4.0], [6.0, 8.0]]

    with pytest.raises(InvalidGame):
        PayoffMatrix(((1, 2), (3,)))
    with pytest.raises(InvalidGame):
        PayoffMatrix.of(1, float("nan"), 0, 0)


def test_invalid_games():
    def check(n, triples):
        with pytest.raises(InvalidGame):
            BinaryGame.from_triples(n, triples)

    check(0, [])
    check(2, [(0, 0, MATCH)])
    check(2, [(0, 2, MATCH)])
    check(2, [(0, 1, MATCH), (0, 1, MISMATCH)])


def test_mmp4_payoffs():
    game = mmp4().game
    assert game is not None

    half = np.full(4, 0.5)
    assert np.allclose(payoff_vector(game, half), 0.0)

    # everybody plays strategy 0: matchers gain 1, mismatchers lose 1
    s = (0, 0, 0, 0)
    assert [pure_payoff(game, s, k) for k in range(4)] == [-1.0, 1.0, -1.0, 1.0]
    assert social_welfare(game, vertex_profile(s)) == 0.0

    # a pure equilibrium of the cycle
    s = (0, 0, 1, 1)
    assert [pure_payoff(game, s, k) for k in range(4)] == [1.0, 1.0, 1.0, 1.0]
    assert nash_gap(game, vertex_profile(s)) == 0.0


def test_expected_payoff_matches_brute_force():
    rng = np.random.default_rng(11)

    def brute_force(game: BinaryGame, x: np.ndarray, k: int) -> float:
        total = 0.0
        for s in itertools.product((0, 1), repeat=game.n_players):
            prob = np.prod([x[i] if s[i] == 0 else 1.0 - x[i] for i in range(len(s))])
            total += prob * pure_payoff(game, s, k)
        return total

    for n in range(2, 7):
        game = random_cycle_game(rng, n)
        x = rng.uniform(0, 1, n)
        vector = payoff_vector(game, x)
        for k in range(n):
            expected = brute_force(game, x, k)
            assert abs(expected_payoff(game, x, k) - expected) < 1e-12
            assert abs(vector[k] - expected) < 1e-12


def test_root_drift_and_predecessors():
    game = BinaryGame.from_triples(3, [(0, 1, MATCH), (1, 2, MISMATCH)], drift=(2, 5, 7))
    assert game.root_drift.tolist() == [2.0, 0.0, 0.0]
    assert game.predecessor(0) is None
    assert game.predecessor(2) == 1
    assert game.incoming_matrix(1) == MATCH
    game.require_one_predecessor()

    with pytest.raises(InvalidGame):
        BinaryGame.from_triples(3, [(0, 1, MATCH)], drift=(1, 2))

    two = BinaryGame.from_triples(3, [(0, 2, MATCH), (1, 2, MATCH)])
    with pytest.raises(OnePredecessorViolation):
        two.require_one_predecessor()
    with pytest.raises(OnePredecessorViolation):
        two.predecessor(2)
    # payoffs still sum over incoming edges
    assert pure_payoff(two, (0, 0, 0), 2) == 2.0


def test_kl_divergence():
    assert kl_divergence([0.5, 0.3], [0.5, 0.3]) == 0.0
    assert kl_divergence([1.0, 0.0], [0.5, 0.5]) == pytest.approx(2 * np.log(2.0))
    assert kl_divergence([0.2], [0.7]) > 0.0
    with pytest.raises(BoundaryProfileError):
        kl_divergence([0.5], [1.0])
    with pytest.raises(ValueError):
        kl_divergence([0.5, 0.5], [0.5])
    with pytest.raises(ValueError):
        kl_divergence([0.5], [[0.5, 0.5]])


def test_profile_checks():
    game = mmp4().game
    assert game is not None
    with pytest.raises(ValueError):
        social_welfare(game, [0.5, 0.5, 0.5])
    with pytest.raises(ValueError):
        social_welfare(game, [0.5, 0.5, 0.5, 1.5])
    with pytest.raises(ValueError):
        pure_payoff(game, (0, 1, 2, 0), 0)
    with pytest.raises(IndexError):
        expected_payoff(game, np.full(4, 0.5), 4)
