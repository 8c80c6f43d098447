import json
from pathlib import Path

import numpy as np
import pytest
import xarray as xr

from forelpb.game_spec import GameSpecError
from forelpb.graph import OnePredecessorViolation
from forelpb.limit_sets import HETEROCLINIC_CYCLE, UNDETERMINED
from forelpb.logging_helper import create_logger
from forelpb.run_helper import RunHelper, RunSpec, RunSpecError
from forelpb.solver import COMPLETED

GAMES = Path(__file__).parent / "games"


def helper_for(tmp_path, **kwargs) -> RunHelper:
    kwargs.setdefault("output_dir", str(tmp_path))
    return RunHelper(create_logger(), RunSpec(**kwargs))


def test_run_spec_validation():
    def check(**kwargs):
        with pytest.raises(RunSpecError):
            RunSpec(**kwargs)

    check()
    check(demo="mmp4", game_spec="x.json")
    check(demo="mmp4", x0=[0.5] * 4, z0=[0.0] * 4)
    check(demo="mmp4", random_interior=True)
    check(demo="mmp4", coordinates="y")


def test_run_spec_json():
    rs = RunSpec(demo="mmp4", x0=[0.3, 0.6, 0.3, 0.6], t_end=20.0)
    data = json.loads(rs.to_json())  # type: ignore [attr-defined]
    assert data["demo"] == "mmp4"
    assert data["classifier"]["min_visits"] == 3
    assert RunSpec.from_json(rs.to_json()) == rs  # type: ignore [attr-defined]


def test_initial_conditions(tmp_path):
    helper = helper_for(tmp_path, demo="mmp4")
    assert np.allclose(helper.initial_x(), [0.3, 0.6, 0.3, 0.6])

    helper = helper_for(tmp_path, demo="mmp4", z0=[0.0, 0.0, 0.0, 0.0])
    assert np.allclose(helper.initial_x(), 0.5)

    a = helper_for(tmp_path, demo="mmp4", random_interior=True, seed=11).initial_x()
    b = helper_for(tmp_path, demo="mmp4", random_interior=True, seed=11).initial_x()
    assert np.array_equal(a, b)
    assert np.all((a >= 0.05) & (a <= 0.95))

    helper = helper_for(tmp_path, game_spec=str(GAMES / "mmp4.json"))
    with pytest.raises(RunSpecError):
        helper.initial_x()


def test_per_player_regularizers(tmp_path):
    helper = helper_for(
        tmp_path, game_spec=str(GAMES / "chain.yaml"), x0=[0.4, 0.5, 0.6]
    )
    assert [r.name for r in helper.regularizers] == ["entropy", "log_barrier", "entropy"]
    helper = helper_for(
        tmp_path,
        game_spec=str(GAMES / "chain.yaml"),
        regularizers=["log_barrier"],
        x0=[0.4, 0.5, 0.6],
    )
    assert [r.name for r in helper.regularizers] == ["log_barrier"] * 3
    with pytest.raises(GameSpecError):
        helper_for(tmp_path, game_spec=str(GAMES / "chain.yaml"), regularizers=["nope"])
    with pytest.raises(RunSpecError):
        helper_for(tmp_path, demo="mmp4", regularizers=["entropy", "entropy"])

    # x coordinates need the entropy regularizer
    helper = helper_for(tmp_path, demo="mmp4", regularizers=["log_barrier"], coordinates="x")
    with pytest.raises(RunSpecError):
        helper.system()


def test_integrator_defaults(tmp_path):
    config = helper_for(tmp_path, demo="asym").integrator_config()
    assert config.t_end == 500.0
    assert config.z_cap == 1e4

    config = helper_for(tmp_path, game_spec=str(GAMES / "mmp4.json")).integrator_config()
    assert config.t_end == 100.0
    assert config.z_cap == 700.0

    with pytest.raises(RunSpecError):
        helper_for(tmp_path, demo="mmp4", stride=0).integrator_config()


def test_conditions_nearest_neighbor(tmp_path):
    summary = helper_for(tmp_path, demo="nn-coop").conditions()
    assert not summary.report.certified
    assert len(summary.cooperation) == 5
    assert all(v.holds for v in summary.cooperation)
    with pytest.raises(RunSpecError):
        helper_for(tmp_path, demo="nn-coop").nash()


def test_write_outputs(tmp_path):
    attrs = tmp_path / "attrs.yaml"
    attrs.write_text(
        'title: "FoReL run of {{game}}"\n'
        'creator_name: "{{creator}}"\n'
        'forelpb_version: "{{forelpb_version}}"\n',
        encoding="UTF-8",
    )
    helper = helper_for(
        tmp_path,
        demo="mmp4",
        t_end=5.0,
        netcdf=True,
        output_prefix="run",
        global_attrs_uri=str(attrs),
        set_global_attrs=[["creator", "Jane"]],
    )
    traj = helper.simulate()
    report = helper.analyze(traj)
    generated = helper.write_outputs(traj, report)
    assert generated == [
        f"{tmp_path}/run.csv",
        f"{tmp_path}/run.json",
        f"{tmp_path}/run.nc",
    ]
    ds = xr.open_dataset(tmp_path / "run.nc", engine="h5netcdf")
    assert ds.attrs["title"] == "FoReL run of mmp4"
    assert ds.attrs["creator_name"] == "Jane"
    assert ds.attrs["forelpb_version"] != "{{forelpb_version}}"
    assert ds["x"].attrs["long_name"] == "probability of strategy 0"
    assert ds.sizes["player"] == 4
    ds.close()


def test_analyze_torus_is_undetermined(tmp_path):
    helper = helper_for(tmp_path, demo="torus")
    traj = helper.simulate()
    report = helper.analyze(traj)
    assert report.termination == COMPLETED
    assert report.verdict is not None
    assert report.verdict.kind == UNDETERMINED
    assert np.max(np.abs(traj.states)) < helper.integrator_config().z_cap
    # disconnected: no welfare verdict
    assert report.welfare is None
    assert any("outside the certified class" in n for n in report.notes)


def test_analyze_asymmetric_pennies(tmp_path):
    report = helper_for(tmp_path, demo="asym(3,8)", t_end=10.0).analyze()
    assert report.nash_payoffs is not None
    assert np.max(np.abs(np.array(report.nash_payoffs) - 8 / 9)) < 1e-12
    assert report.welfare_bound == pytest.approx(8 / 3)


def test_analyze_boundary_cycle_average(tmp_path):
    helper = helper_for(
        tmp_path, demo="asym(5,3)", random_interior=True, seed=42, t_end=1000.0
    )
    report = helper.analyze()
    assert report.verdict is not None
    assert report.verdict.kind == HETEROCLINIC_CYCLE
    assert report.averages is not None
    assert report.boundary_cycle is not None
    assert report.boundary_cycle.quoted == 8.0
    assert report.boundary_cycle.measured == report.averages.sw
    assert report.boundary_cycle.within_tolerance


def test_zero_times_are_rejected(tmp_path):
    with pytest.raises(RunSpecError):
        helper_for(tmp_path, demo="mmp4", t_end=0.0).integrator_config()
    with pytest.raises(RunSpecError):
        helper_for(tmp_path, demo="mmp4", z_cap=0.0).integrator_config()


def test_two_predecessors_is_a_hypothesis_failure(tmp_path):
    helper = helper_for(
        tmp_path, game_spec=str(GAMES / "two_predecessors.json"), x0=[0.5, 0.5, 0.5]
    )
    with pytest.raises(OnePredecessorViolation):
        helper.system()
