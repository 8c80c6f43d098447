import numpy as np
import pytest

from forelpb.analysis import interior_nash, welfare_bound
from forelpb.conditions import certify_pb
from forelpb.demos import (
    DEFAULT_ASYM,
    UnknownDemo,
    asym_game,
    demo_listing,
    demo_names,
    get_demo,
    mmp4_manifold_point,
)
from forelpb.game import payoff_vector


def test_demo_names(snapshot):
    assert demo_names() == snapshot(name="demo_names")


def test_demo_listing():
    listing = demo_listing().splitlines()
    assert len(listing) == len(demo_names()) + 1
    for name, line in zip(demo_names(), listing):
        assert line.startswith(name)
    assert listing[-1].startswith("asym(N,p)")


def test_get_demo():
    for name in demo_names():
        demo = get_demo(name)
        assert len(demo.x0) == demo.n_players
        assert all(0.0 < v < 1.0 for v in demo.x0)
        assert demo.t_end > 0

    demo = get_demo("asym")
    assert demo.asym == (DEFAULT_ASYM[0], DEFAULT_ASYM[1])
    assert demo.name == "asym(3,8)"

    demo = get_demo("asym(5, 3)")
    assert demo.n_players == 5
    assert demo.asym == (5, 3.0)

    for bad in ["nope", "asym(1,3)", "asym(3,-2)", "asym(3)"]:
        with pytest.raises(UnknownDemo):
            get_demo(bad)


def test_certified_demos():
    for name in ["mmp4", "asym", "chain-dominant"]:
        game = get_demo(name).game
        assert game is not None
        assert certify_pb(game).certified, name

    torus = get_demo("torus")
    assert torus.simulate_only
    assert torus.game is not None
    assert not certify_pb(torus.game).certified

    assert get_demo("nn-coop").game is None


def test_asym_equilibrium_payoffs():
    for n, p in [(3, 8.0), (5, 3.0), (4, 2.5)]:
        game = asym_game(n, p)
        nash = interior_nash(game)
        assert nash is not None
        assert np.allclose(nash, p / (p + 1))
        assert np.max(np.abs(payoff_vector(game, nash) - p / (p + 1))) < 1e-12
        assert welfare_bound(game) == pytest.approx(n * p / (p + 1), abs=1e-12)


def test_mmp4_manifold_points():
    assert mmp4_manifold_point("center", 0.3, 0.6).tolist() == [0.3, 0.6, 0.3, 0.6]
    assert mmp4_manifold_point("stable", 0.2).tolist() == pytest.approx([0.8, 0.2, 0.2, 0.8])
    assert mmp4_manifold_point("unstable", 0.2).tolist() == pytest.approx([0.2, 0.2, 0.8, 0.8])
    with pytest.raises(ValueError):
        mmp4_manifold_point("sideways", 0.2)
