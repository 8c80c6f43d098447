from argparse import ArgumentParser, RawTextHelpFormatter

from forelpb import get_forelpb_version


def _add_game_arguments(parser: ArgumentParser):
    group = parser.add_mutually_exclusive_group(required=True)
    group.add_argument(
        "--spec",
        type=str,
        metavar="file",
        default=None,
        help="Game spec file (.json, .yaml or .yml)",
    )
    group.add_argument(
        "--demo",
        type=str,
        metavar="name",
        default=None,
        help="Built-in demo game (see demo-list), e.g. mmp4 or 'asym(5,3)'",
    )

    parser.add_argument(
        "--regularizer",
        type=str,
        metavar="names",
        default=None,
        help="Regularizer name, or comma-separated list with one name per player."
        " Default: the game spec file's, else entropy",
    )

    parser.add_argument(
        "--out-dir",
        type=str,
        metavar="dir",
        default=".",
        help="Output directory. Default: %(default)s",
    )

    parser.add_argument(
        "--output-prefix",
        type=str,
        metavar="prefix",
        default=None,
        help="Output filename prefix. Default: derived from the game name",
    )

    parser.add_argument(
        "--json",
        default=False,
        action="store_true",
        help="Also print the JSON report to stdout",
    )

    parser.add_argument(
        "--log-level",
        type=str,
        metavar="level",
        default="WARNING",
        help="Console log level. Default: %(default)s",
    )


def _add_run_arguments(parser: ArgumentParser, initial_condition: bool = True):
    if initial_condition:
        group = parser.add_mutually_exclusive_group()
        group.add_argument(
            "--x0",
            type=str,
            metavar="x,...",
            default=None,
            help="Initial mixed profile (probabilities of strategy 0)",
        )
        group.add_argument(
            "--z0",
            type=str,
            metavar="z,...",
            default=None,
            help="Initial scores",
        )
        group.add_argument(
            "--random-interior",
            default=False,
            action="store_true",
            help="Draw the initial profile uniformly from [0.05, 0.95]^N (needs --seed)",
        )
        parser.add_argument(
            "--seed",
            type=int,
            metavar="n",
            default=None,
            help="Seed for --random-interior",
        )

    parser.add_argument(
        "--coords",
        type=str,
        choices=["z", "x"],
        default="z",
        help="Integration coordinates. Default: %(default)s",
    )
    parser.add_argument(
        "--method",
        type=str,
        choices=["rk45", "rk4"],
        default="rk45",
        help="Integration method. Default: %(default)s",
    )
    parser.add_argument(
        "--t-end",
        type=float,
        metavar="T",
        default=None,
        help="Final time. Default: the demo's, else 100",
    )
    parser.add_argument(
        "--dt",
        type=float,
        metavar="h",
        default=1e-2,
        help="Fixed step (rk4) or initial step (rk45). Default: %(default)s",
    )
    parser.add_argument(
        "--rtol",
        type=float,
        metavar="value",
        default=1e-9,
        help="Relative tolerance (rk45). Default: %(default)s",
    )
    parser.add_argument(
        "--atol",
        type=float,
        metavar="value",
        default=1e-9,
        help="Absolute tolerance (rk45). Default: %(default)s",
    )
    parser.add_argument(
        "--max-step",
        type=float,
        metavar="h",
        default=0.1,
        help="Largest rk45 step. Default: %(default)s",
    )
    parser.add_argument(
        "--z-cap",
        type=float,
        metavar="value",
        default=None,
        help="Stop when some |z_i| exceeds this value. Default: the demo's, else 700",
    )
    parser.add_argument(
        "--stride",
        type=int,
        metavar="k",
        default=1,
        help="Keep every k-th accepted step. Default: %(default)s",
    )
    parser.add_argument(
        "--welfare-tol",
        type=float,
        metavar="value",
        default=0.05,
        help="Tolerance of the welfare check. Default: %(default)s",
    )


def _add_output_arguments(parser: ArgumentParser):
    parser.add_argument(
        "--svg",
        default=False,
        action="store_true",
        help="Also generate SVG plots",
    )
    parser.add_argument(
        "--netcdf",
        default=False,
        action="store_true",
        help="Also generate a NetCDF file with the trajectory",
    )
    parser.add_argument(
        "--global-attrs",
        type=str,
        metavar="file",
        default=None,
        help="JSON or YAML file with global attributes for the NetCDF file.",
    )
    parser.add_argument(
        "--set-global-attr",
        type=str,
        nargs=2,
        default=None,
        metavar=("key", "value"),
        dest="set_global_attrs",
        action="append",
        help="Replace {{key}} with the given value for every occurrence of {{key}}"
        " in the global attrs file.",
    )


def parse_arguments(argv=None):
    description = (
        "FoReL dynamics on binary one-predecessor graphical polymatrix games:"
        " validation, equilibria, simulation, limit-set analysis and sweeps."
    )
    example = """
Examples:
    forelpb demo-list
    forelpb validate --demo mmp4
    forelpb simulate --demo mmp4 --x0 0.3,0.6,0.3,0.6 --t-end 200 --svg --out-dir output
    forelpb analyze --demo 'asym(3,8)' --random-interior --seed 7 --out-dir output
    forelpb sweep --demo mmp4 --seeds 0-19 --t-end 1000 --out-dir output
    """

    parser = ArgumentParser(
        prog="forelpb",
        description=description,
        epilog=example,
        formatter_class=RawTextHelpFormatter,
    )

    parser.add_argument(
        "--version",
        action="version",
        version=get_forelpb_version(),
    )

    subparsers = parser.add_subparsers(dest="command", metavar="command", required=True)

    p = subparsers.add_parser(
        "validate",
        help="Check the one-predecessor, connectivity and genericity hypotheses",
        formatter_class=RawTextHelpFormatter,
    )
    _add_game_arguments(p)

    p = subparsers.add_parser(
        "conditions",
        help="Per-edge conditions, dominance and cooperation checks",
        formatter_class=RawTextHelpFormatter,
    )
    _add_game_arguments(p)

    p = subparsers.add_parser(
        "nash",
        help="Interior Nash equilibrium, equalizers, minimax values and welfare bound",
        formatter_class=RawTextHelpFormatter,
    )
    _add_game_arguments(p)

    p = subparsers.add_parser(
        "simulate",
        help="Integrate the dynamics and write the trajectory CSV",
        formatter_class=RawTextHelpFormatter,
    )
    _add_game_arguments(p)
    _add_run_arguments(p)
    _add_output_arguments(p)

    p = subparsers.add_parser(
        "analyze",
        help="Simulate, classify the limit set and check the welfare bound",
        formatter_class=RawTextHelpFormatter,
    )
    _add_game_arguments(p)
    _add_run_arguments(p)
    _add_output_arguments(p)

    p = subparsers.add_parser(
        "sweep",
        help="Analyze many random-interior starts in parallel",
        formatter_class=RawTextHelpFormatter,
    )
    _add_game_arguments(p)
    _add_run_arguments(p, initial_condition=False)
    p.add_argument(
        "--seeds",
        type=str,
        metavar="list",
        required=True,
        help="Seeds, comma-separated with inclusive ranges, e.g. 0-19 or 1,5,9",
    )
    p.add_argument(
        "--scheduler",
        type=str,
        choices=["processes", "threads", "synchronous"],
        default="processes",
        help="Dask scheduler. Default: %(default)s",
    )

    subparsers.add_parser("demo-list", help="List the built-in demos")

    return parser.parse_args(argv)
