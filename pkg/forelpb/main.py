import re
import sys

from forelpb.main_args import parse_arguments

# Some imports, in particular involving numerical processing and plotting, cause a
# delay that is noticeable when just running the --help option. We get around this
# issue by postponing the imports until actually needed. See the run() function.

EXIT_OK = 0
EXIT_HYPOTHESIS = 1
EXIT_INPUT = 2
EXIT_RUNTIME = 3


def default_output_prefix(opts) -> str:
    if opts.output_prefix:
        return opts.output_prefix
    if opts.demo:
        name = opts.demo
    else:
        name = re.sub(r"\.(json|ya?ml)$", "", opts.spec.split("/")[-1])
    return re.sub(r"[^A-Za-z0-9_.-]+", "_", name).strip("_") or "forelpb"


def make_run_spec(opts, prefix: str):
    # pylint: disable=import-outside-toplevel
    from forelpb.misc_helper import parse_floats
    from forelpb.run_helper import RunSpec

    regularizers = None
    if opts.regularizer:
        regularizers = [s.strip() for s in opts.regularizer.split(",")]

    kwargs = {}
    if hasattr(opts, "method"):
        kwargs = dict(
            coordinates=opts.coords,
            method=opts.method,
            t_end=opts.t_end,
            dt=opts.dt,
            rtol=opts.rtol,
            atol=opts.atol,
            max_step=opts.max_step,
            stride=opts.stride,
            z_cap=opts.z_cap,
            welfare_tol=opts.welfare_tol,
        )
    if hasattr(opts, "x0"):
        kwargs.update(
            x0=parse_floats(opts.x0) if opts.x0 else None,
            z0=parse_floats(opts.z0) if opts.z0 else None,
            random_interior=opts.random_interior,
            seed=opts.seed,
        )
    if hasattr(opts, "svg"):
        kwargs.update(
            svg=opts.svg,
            netcdf=opts.netcdf,
            global_attrs_uri=opts.global_attrs,
            set_global_attrs=opts.set_global_attrs,
        )
    return RunSpec(
        game_spec=opts.spec,
        demo=opts.demo,
        regularizers=regularizers,
        output_dir=opts.out_dir,
        output_prefix=prefix,
        **kwargs,
    )


def emit_report(log, helper, opts, report) -> str:
    # pylint: disable=import-outside-toplevel
    from forelpb.run_helper import write_json

    contents = report.to_json(indent=2)
    filename = f"{helper.output_base}.json"
    write_json(log, contents, filename)
    if opts.json:
        print(contents)
    return filename


def cmd_validate(log, opts, helper) -> int:
    summary = helper.conditions()
    emit_report(log, helper, opts, summary.report)
    if summary.report.certified:
        log.info(f"{helper.game_name}: certified")
        return EXIT_OK
    log.warning(f"{helper.game_name}: not certified: {'; '.join(summary.report.reasons)}")
    return EXIT_HYPOTHESIS


def cmd_conditions(log, opts, helper) -> int:
    summary = helper.conditions()
    emit_report(log, helper, opts, summary)
    return EXIT_OK


def cmd_nash(log, opts, helper) -> int:
    summary = helper.nash()
    emit_report(log, helper, opts, summary)
    return EXIT_OK


def cmd_simulate(log, opts, helper) -> int:
    # pylint: disable=import-outside-toplevel
    from forelpb.solver import STEP_FAILURE

    traj = helper.simulate()
    helper.write_outputs(traj)
    if opts.json:
        print(traj.termination.to_json(indent=2))
    if traj.termination.reason == STEP_FAILURE:
        log.error(f"integration failed: {traj.termination.message}")
        return EXIT_RUNTIME
    return EXIT_OK


def cmd_analyze(log, opts, helper) -> int:
    # pylint: disable=import-outside-toplevel
    from forelpb.solver import STEP_FAILURE

    traj = helper.simulate()
    report = helper.analyze(traj)
    helper.write_outputs(traj, report)
    if opts.json:
        print(report.to_json(indent=2))
    if traj.termination.reason == STEP_FAILURE:
        log.error(f"integration failed: {traj.termination.message}")
        return EXIT_RUNTIME
    if report.welfare is not None and not report.welfare.passed:
        log.warning(
            f"time-average welfare {report.welfare.average_sw:.6g}"
            f" below the bound {report.welfare.bound:.6g}"
        )
        return EXIT_HYPOTHESIS
    return EXIT_OK


def cmd_sweep(log, opts, helper) -> int:
    # pylint: disable=import-outside-toplevel
    from forelpb.misc_helper import parse_seeds
    from forelpb.run_helper import write_json
    from forelpb.sweep import run_sweep, summary_dataframe

    seeds = parse_seeds(opts.seeds)
    if not seeds:
        log.error("empty seed grid")
        return EXIT_INPUT
    summary = run_sweep(log, helper.run_spec, seeds, opts.scheduler)
    contents = summary.to_json(indent=2)
    write_json(log, contents, f"{helper.output_base}_sweep.json")
    csv_filename = f"{helper.output_base}_sweep.csv"
    log.info(f"  - saving sweep summary to: {csv_filename}")
    summary_dataframe(summary).to_csv(csv_filename, index=False)
    if opts.json:
        print(contents)
    return EXIT_OK if summary.successes > 0 else EXIT_RUNTIME


COMMANDS = {
    "validate": cmd_validate,
    "conditions": cmd_conditions,
    "nash": cmd_nash,
    "simulate": cmd_simulate,
    "analyze": cmd_analyze,
    "sweep": cmd_sweep,
}


def run(argv=None) -> int:
    opts = parse_arguments(argv)

    # pylint: disable=import-outside-toplevel
    from forelpb.analysis import NotCyclic
    from forelpb.conditions import DegenerateMatrix, NonGenericMatrix
    from forelpb.graph import Disconnected, OnePredecessorViolation
    from forelpb.logging_helper import close_logger, create_run_logger

    if opts.command == "demo-list":
        from forelpb.demos import demo_listing

        print(demo_listing())
        return EXIT_OK

    prefix = default_output_prefix(opts)
    log = create_run_logger(opts.out_dir, prefix, console_level=opts.log_level)
    try:
        from forelpb.run_helper import RunHelper

        helper = RunHelper(log, make_run_spec(opts, prefix))
        return COMMANDS[opts.command](log, opts, helper)
    except KeyboardInterrupt:
        log.info("INTERRUPTED")
        return EXIT_RUNTIME
    except (
        OnePredecessorViolation,
        Disconnected,
        NotCyclic,
        NonGenericMatrix,
        DegenerateMatrix,
    ) as e:
        log.error(f"hypothesis not satisfied: {e}")
        return EXIT_HYPOTHESIS
    except ValueError as e:
        log.error(f"invalid input: {e}")
        return EXIT_INPUT
    except Exception as e:  # pylint: disable=broad-exception-caught
        log.error(f"{opts.command} failed: {e!r}")
        return EXIT_RUNTIME
    finally:
        close_logger(log)


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
