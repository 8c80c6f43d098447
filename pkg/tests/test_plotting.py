import pandas as pd

from forelpb.demos import mmp4
from forelpb.dynamics import binary_game_system, x_to_z
from forelpb.logging_helper import create_logger
from forelpb.plotting import plot_projections, plot_running_averages
from forelpb.regularizer import Entropy
from forelpb.solver import IntegratorConfig, integrate


def test_plots_from_trajectory_and_csv(tmp_path):
    game = mmp4().game
    assert game is not None
    z0 = x_to_z([Entropy()] * 4, [0.3, 0.6, 0.3, 0.6])
    config = IntegratorConfig(t_end=5.0)
    traj = integrate(create_logger(), binary_game_system(game), z0, config)

    plot_projections(traj, str(tmp_path / "p.svg"), title="mmp4")
    plot_running_averages(traj, str(tmp_path / "a.svg"), title="mmp4")
    assert (tmp_path / "p.svg").read_text().startswith("<?xml")
    assert (tmp_path / "a.svg").exists()

    csv = tmp_path / "traj.csv"
    traj.to_dataframe().to_csv(csv, index=False)
    df = pd.read_csv(csv)
    plot_projections(df, str(tmp_path / "p2.svg"), pairs=[(0, 2)])
    assert (tmp_path / "p2.svg").exists()


def test_svg_is_reproducible(tmp_path):
    df = pd.DataFrame(
        {
            "t": [0.0, 1.0, 2.0],
            "x_0": [0.2, 0.5, 0.8],
            "x_1": [0.3, 0.4, 0.5],
            "u_0": [0.1, 0.2, 0.3],
            "u_1": [-0.1, -0.2, -0.3],
            "sw": [0.0, 0.0, 0.0],
        }
    )
    plot_projections(df, str(tmp_path / "a.svg"))
    plot_projections(df, str(tmp_path / "b.svg"))
    assert (tmp_path / "a.svg").read_bytes() == (tmp_path / "b.svg").read_bytes()
