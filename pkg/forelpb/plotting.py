from itertools import combinations
from typing import List, Optional, Tuple

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402
import pandas as pd  # noqa: E402

from forelpb.plot_const import (  # noqa: E402
    DEFAULT_DPI,
    DEFAULT_FIGSIZE,
    DEFAULT_SVG_HASHSALT,
    DEFAULT_TITLE,
    MAX_PROJECTION_PANELS,
)
from forelpb.solver import Trajectory, running_mean  # noqa: E402

plt.rc("axes", linewidth=0.5)
plt.rc("font", size=9)
plt.rc("svg", hashsalt=DEFAULT_SVG_HASHSALT)


def _frame(data) -> pd.DataFrame:
    return data.to_dataframe() if isinstance(data, Trajectory) else data


def _players(df: pd.DataFrame) -> int:
    return sum(1 for c in df.columns if c.startswith("x_"))


def _save(fig, filename: Optional[str], dpi: int, show: bool):
    if filename is not None:
        # no date metadata so that identical runs give identical files
        fig.savefig(filename, dpi=dpi, metadata={"Date": None})
    if show:
        plt.show()
    plt.close(fig)


def plot_projections(
    data,
    svg_filename: Optional[str] = None,
    title: str = DEFAULT_TITLE,
    pairs: Optional[List[Tuple[int, int]]] = None,
    dpi: int = DEFAULT_DPI,
    show: bool = False,
):
    """
    Coordinate-pair projections (x_i, x_j) of a trajectory.
    :param data: Trajectory, or DataFrame with the trajectory CSV layout.
    :param pairs: Pairs to plot; by default the first consecutive pairs.
    """
    df = _frame(data)
    n = _players(df)
    if pairs is None:
        if n > 2:
            pairs = [(i, (i + 1) % n) for i in range(n)][:MAX_PROJECTION_PANELS]
        else:
            pairs = list(combinations(range(n), 2))
    cols = min(3, max(1, len(pairs)))
    rows = int(np.ceil(len(pairs) / cols)) if pairs else 1
    fig, axes = plt.subplots(
        rows, cols, figsize=(3.0 * cols, 3.0 * rows), squeeze=False
    )
    for ax, (i, j) in zip(axes.flat, pairs):
        ax.plot(df[f"x_{i}"], df[f"x_{j}"], linewidth=0.7)
        ax.plot(df[f"x_{i}"].iloc[0], df[f"x_{j}"].iloc[0], "o", markersize=3)
        ax.set_xlim(-0.02, 1.02)
        ax.set_ylim(-0.02, 1.02)
        ax.set_xlabel(f"$x_{i}$")
        ax.set_ylabel(f"$x_{j}$")
        ax.set_aspect("equal")
    for ax in list(axes.flat)[len(pairs) :]:
        ax.set_visible(False)
    fig.suptitle(title)
    fig.tight_layout()
    _save(fig, svg_filename, dpi, show)


def plot_running_averages(
    data,
    svg_filename: Optional[str] = None,
    title: str = DEFAULT_TITLE,
    dpi: int = DEFAULT_DPI,
    show: bool = False,
):
    """
    Running time-averages of each player's payoff and of the social welfare.
    """
    df = _frame(data)
    n = _players(df)
    times = df["t"].to_numpy()
    payoffs = df[[f"u_{i}" for i in range(n)]].to_numpy()
    averages = running_mean(times, payoffs)

    fig, ax = plt.subplots(figsize=DEFAULT_FIGSIZE)
    for i in range(n):
        ax.plot(times, averages[:, i], linewidth=0.8, label=f"player {i}")
    ax.plot(times, averages.sum(axis=1), "k", linewidth=1.2, label="social welfare")
    ax.set_xlabel("t")
    ax.set_ylabel("time-average payoff")
    ax.legend(loc="best", fontsize=7)
    ax.set_title(title)
    fig.tight_layout()
    _save(fig, svg_filename, dpi, show)
