"""
Built-in demo games.
"""

import math
import re
from dataclasses import dataclass
from typing import Callable, Dict, Final, List, Optional, Tuple

import numpy as np

from forelpb.dynamics import NearestNeighborGame
from forelpb.game import BinaryGame, PayoffMatrix

MATCH: Final[PayoffMatrix] = PayoffMatrix.of(1, -1, -1, 1)
MISMATCH: Final[PayoffMatrix] = PayoffMatrix.of(-1, 1, 1, -1)

# long boundary excursions stay below this cap over the default horizons
BOUNDARY_Z_CAP: Final[float] = 1e4

DEFAULT_ASYM: Final[Tuple[int, float]] = (3, 8.0)

_ASYM_RE = re.compile(r"^asym\(\s*(\d+)\s*,\s*([-+0-9.eE]+)\s*\)$")


class UnknownDemo(ValueError):
    pass


@dataclass(frozen=True)
class Demo:
    name: str
    description: str
    x0: Tuple[float, ...]
    t_end: float
    z_cap: float = 700.0
    game: Optional[BinaryGame] = None
    nn_game: Optional[NearestNeighborGame] = None
    simulate_only: bool = False
    asym: Optional[Tuple[int, float]] = None

    @property
    def n_players(self) -> int:
        if self.game is not None:
            return self.game.n_players
        assert self.nn_game is not None
        return self.nn_game.n_players


def mmp4() -> Demo:
    """Matched-mismatched pennies on a 4-cycle 3 -> 0 -> 1 -> 2 -> 3."""
    game = BinaryGame.from_triples(
        4,
        [(3, 0, MISMATCH), (0, 1, MATCH), (1, 2, MISMATCH), (2, 3, MATCH)],
        name="mmp4",
    )
    return Demo(
        name="mmp4",
        description="matched-mismatched pennies on a 4-cycle",
        x0=(0.3, 0.6, 0.3, 0.6),
        t_end=100.0,
        z_cap=BOUNDARY_Z_CAP,
        game=game,
    )


def mmp4_manifold_point(kind: str, t: float, s: float = 0.5) -> np.ndarray:
    """
    Points on the invariant sets through the mixed equilibrium of mmp4:
    "center" (t, s, t, s), "stable" (1-t, t, t, 1-t), "unstable" (t, t, 1-t, 1-t).
    """
    if kind == "center":
        return np.array([t, s, t, s])
    if kind == "stable":
        return np.array([1.0 - t, t, t, 1.0 - t])
    if kind == "unstable":
        return np.array([t, t, 1.0 - t, 1.0 - t])
    raise ValueError(f"unknown manifold kind '{kind}'")


def asym_game(n: int, p: float) -> BinaryGame:
    """Asymmetric cyclic pennies: each player gains 1 or p by mismatching its predecessor."""
    if n < 2:
        raise ValueError(f"asym needs at least 2 players, got {n}")
    if not p > 0:
        raise ValueError(f"asym needs p > 0, got {p}")
    m = PayoffMatrix.of(0, 1, p, 0)
    return BinaryGame.from_triples(
        n, [(i, (i + 1) % n, m) for i in range(n)], name=f"asym({n},{p:g})"
    )


def asym(n: int = DEFAULT_ASYM[0], p: float = DEFAULT_ASYM[1]) -> Demo:
    game = asym_game(n, p)
    return Demo(
        name=game.name,
        description=f"asymmetric cyclic pennies, N={n}, p={p:g}",
        x0=tuple(float(v) for v in np.linspace(0.3, 0.7, n)),
        t_end=500.0,
        z_cap=BOUNDARY_Z_CAP,
        game=game,
        asym=(n, float(p)),
    )


def chain_dominant() -> Demo:
    """Chain rooted at 0 (positive drift) with dominant strategies downstream."""
    game = BinaryGame.from_triples(
        4,
        [
            (0, 1, PayoffMatrix.of(2, 0, 1, 0)),
            (1, 2, PayoffMatrix.of(0, 1, 0, 2)),
            (2, 3, MATCH),
        ],
        drift=(1.0, 0.0, 0.0, 0.0),
        name="chain-dominant",
    )
    return Demo(
        name="chain-dominant",
        description="root-vertex chain with dominant strategies",
        x0=(0.5, 0.5, 0.5, 0.5),
        t_end=100.0,
        z_cap=BOUNDARY_Z_CAP,
        game=game,
    )


def torus() -> Demo:
    """Two disjoint pennies pairs; the second pair's payoffs are scaled by sqrt(2)."""
    r = math.sqrt(2.0)
    game = BinaryGame.from_triples(
        4,
        [
            (1, 0, MISMATCH),
            (0, 1, MATCH),
            (3, 2, MISMATCH.scaled(r)),
            (2, 3, MATCH.scaled(r)),
        ],
        name="torus",
    )
    return Demo(
        name="torus",
        description="two disconnected pennies pairs (simulate only)",
        x0=(0.3, 0.6, 0.35, 0.7),
        t_end=100.0,
        game=game,
        simulate_only=True,
    )


def nn_coop(n: int = 5) -> Demo:
    """Nearest-neighbor coordination: payoff 2 when agreeing with both neighbors."""
    t = np.zeros((n, 2, 2, 2))
    t[:, 0, 0, 0] = 2.0
    t[:, 1, 1, 1] = 2.0
    return Demo(
        name="nn-coop",
        description=f"nearest-neighbor coordination tensors, N={n}",
        x0=tuple(float(v) for v in np.linspace(0.35, 0.65, n)),
        t_end=100.0,
        nn_game=NearestNeighborGame(t),
    )


DEMOS: Dict[str, Callable[[], Demo]] = {
    "mmp4": mmp4,
    "asym": asym,
    "chain-dominant": chain_dominant,
    "torus": torus,
    "nn-coop": nn_coop,
}


def demo_names() -> List[str]:
    return list(DEMOS)


def get_demo(name: str) -> Demo:
    """
    One of the names in DEMOS, or "asym(N,p)".
    """
    key = name.strip()
    if key in DEMOS:
        return DEMOS[key]()
    match = _ASYM_RE.match(key)
    if match:
        try:
            return asym(int(match.group(1)), float(match.group(2)))
        except ValueError as e:
            raise UnknownDemo(str(e)) from e
    raise UnknownDemo(
        f"unknown demo '{name}', expecting one of {demo_names()} or asym(N,p)"
    )


def demo_listing() -> str:
    lines = []
    for name in demo_names():
        d = get_demo(name)
        lines.append(f"{name:16} {d.description}")
    lines.append(f"{'asym(N,p)':16} asymmetric cyclic pennies with N players and payoff p")
    return "\n".join(lines)
