import pytest

from forelpb.limit_sets import HETEROCLINIC_CYCLE, UNDETERMINED, VERDICT_KINDS
from forelpb.logging_helper import create_logger
from forelpb.run_helper import RunSpec
from forelpb.sweep import run_seed, run_sweep, summary_dataframe


@pytest.fixture
def base(tmp_path) -> RunSpec:
    return RunSpec(demo="mmp4", t_end=10.0, output_dir=str(tmp_path), output_prefix="mmp4")


def test_run_seed(base, tmp_path):
    row = run_seed(base, 3)
    assert row.ok
    assert row.seed == 3
    assert row.termination == "Completed"
    assert row.verdict is not None
    assert row.bound == 0.0
    assert row.welfare_passed is not None
    assert (tmp_path / "mmp4_seed3.log").exists()


def test_run_seed_error_is_recorded(tmp_path):
    base = RunSpec(
        demo="mmp4",
        regularizers=["nope"],
        t_end=1.0,
        output_dir=str(tmp_path),
        output_prefix="bad",
    )
    row = run_seed(base, 0)
    assert not row.ok
    assert "nope" in (row.error or "")


def test_run_sweep(base):
    summary = run_sweep(create_logger(), base, [0, 1, 2, 5], "synchronous")
    assert summary.game == "mmp4"
    assert summary.seeds == [0, 1, 2, 5]
    assert [r.seed for r in summary.rows] == [0, 1, 2, 5]
    assert summary.successes == 4
    assert sum(summary.verdict_counts.values()) == 4

    df = summary_dataframe(summary)
    assert list(df["seed"]) == [0, 1, 2, 5]
    assert "sw_average" in df.columns
    assert df["error"].isna().all()


def test_sweep_is_deterministic(base):
    a = run_sweep(create_logger(), base, [4], "synchronous")
    b = run_sweep(create_logger(), base, [4], "synchronous")
    assert a.rows[0].sw_average == b.rows[0].sw_average
    assert a.rows[0].verdict == b.rows[0].verdict


@pytest.fixture(scope="module")
def mmp4_sweep(tmp_path_factory):
    out = tmp_path_factory.mktemp("mmp4")
    base = RunSpec(demo="mmp4", t_end=1000.0, output_dir=str(out), output_prefix="w")
    return run_sweep(create_logger(), base, list(range(20)), "synchronous")


@pytest.fixture(scope="module")
def asym_sweep(tmp_path_factory):
    out = tmp_path_factory.mktemp("asym")
    base = RunSpec(demo="asym(3,8)", output_dir=str(out), output_prefix="a")
    return run_sweep(create_logger(), base, list(range(20)), "synchronous")


def test_mmp4_welfare_over_random_starts(mmp4_sweep):
    assert mmp4_sweep.successes == 20
    averages = [r.sw_average for r in mmp4_sweep.rows]
    assert all(a is not None and a >= 0.0 for a in averages)
    assert all(r.welfare_passed for r in mmp4_sweep.rows)
    near_max = [a for a in averages if a is not None and 3.8 <= a <= 4.05]
    assert len(near_max) >= 18


def test_asymmetric_pennies_over_random_starts(asym_sweep):
    assert asym_sweep.successes == 20
    cycles = [r for r in asym_sweep.rows if r.verdict == HETEROCLINIC_CYCLE]
    assert len(cycles) >= 18
    for r in asym_sweep.rows:
        assert r.sw_average is not None
        assert r.sw_average >= 3 * 8 / 9 - 0.1
        assert r.welfare_passed


def test_certified_games_are_rarely_undetermined(mmp4_sweep, asym_sweep):
    rows = mmp4_sweep.rows + asym_sweep.rows
    assert all(r.verdict in VERDICT_KINDS for r in rows)
    undetermined = [r for r in rows if r.verdict == UNDETERMINED]
    assert len(undetermined) < 0.1 * len(rows)
