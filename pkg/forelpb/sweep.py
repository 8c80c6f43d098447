"""
Parameter sweeps: the same run spec over many random-interior seeds, executed
in parallel with dask.
"""

import time
from dataclasses import dataclass, field, replace
from typing import List, Optional

import dask
import pandas as pd
from dataclasses_json import dataclass_json

from forelpb.logging_helper import close_logger, create_logger
from forelpb.run_helper import RunHelper, RunSpec

SCHEDULERS = ("processes", "threads", "synchronous")


@dataclass_json
@dataclass
class SweepRow:
    seed: int
    verdict: Optional[str] = None
    sw_average: Optional[float] = None
    bound: Optional[float] = None
    slack: Optional[float] = None
    welfare_passed: Optional[bool] = None
    termination: Optional[str] = None
    error: Optional[str] = None

    @property
    def ok(self) -> bool:
        return self.error is None


@dataclass_json
@dataclass
class SweepSummary:
    game: str
    seeds: List[int]
    rows: List[SweepRow] = field(default_factory=list)
    successes: int = 0
    verdict_counts: dict = field(default_factory=dict)


def run_seed(base: RunSpec, seed: int) -> SweepRow:
    """
    One sweep member. Logs to its own file under the base output directory.
    """
    run_spec = replace(
        base,
        x0=None,
        z0=None,
        random_interior=True,
        seed=seed,
        output_prefix=f"{base.output_prefix}_seed{seed}",
        svg=False,
        netcdf=False,
    )
    log = create_logger(
        log_filename_and_level=(f"{base.output_dir}/{run_spec.output_prefix}.log", "INFO"),
        console_level=None,
    )
    row = SweepRow(seed=seed)
    try:
        helper = RunHelper(log, run_spec)
        report = helper.analyze()
        row.termination = report.termination
        row.verdict = report.verdict.kind if report.verdict else None
        row.sw_average = report.averages.sw if report.averages else None
        if report.welfare is not None:
            row.bound = report.welfare.bound
            row.slack = report.welfare.slack
            row.welfare_passed = report.welfare.passed
    except Exception as e:  # pylint: disable=broad-exception-caught
        log.error(f"seed {seed}: {e!r}")
        row.error = repr(e)
    finally:
        close_logger(log)
    return row


def run_sweep(
    log,  # : loguru.Logger,
    base: RunSpec,
    seeds: List[int],
    scheduler: str = "processes",
) -> SweepSummary:
    assert scheduler in SCHEDULERS, f"unknown scheduler {scheduler}"
    name = base.demo or base.game_spec or ""
    log.info(f"sweep over {len(seeds)} seeds of {name} with scheduler={scheduler}")

    @dask.delayed
    def delayed_run_seed(seed: int) -> SweepRow:
        return run_seed(base, seed)

    start_time = time.time()
    rows = list(dask.compute(*[delayed_run_seed(s) for s in seeds], scheduler=scheduler))
    elapsed_time = time.time() - start_time

    counts: dict = {}
    for row in rows:
        key = row.verdict or "error"
        counts[key] = counts.get(key, 0) + 1
    summary = SweepSummary(
        game=name,
        seeds=list(seeds),
        rows=rows,
        successes=sum(1 for r in rows if r.ok),
        verdict_counts=counts,
    )
    log.info(
        f"sweep completed: {summary.successes}/{len(rows)} runs succeeded"
        f" in {elapsed_time:.1f} seconds; verdicts: {counts}"
    )
    return summary


def summary_dataframe(summary: SweepSummary) -> pd.DataFrame:
    return pd.DataFrame([r.to_dict() for r in summary.rows])  # type: ignore [attr-defined]
