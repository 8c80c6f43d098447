from argparse import ArgumentParser, RawTextHelpFormatter

from forelpb import get_forelpb_version
from forelpb.plot_const import DEFAULT_DPI


def parse_arguments():
    description = "Generate plots for given trajectory CSV files."
    example = """
Examples:
    forelpb-plot output/mmp4.csv
    forelpb-plot --only-averages output/asym_seed3.csv
    """

    parser = ArgumentParser(
        description=description, epilog=example, formatter_class=RawTextHelpFormatter
    )

    parser.add_argument(
        "--version",
        action="version",
        version=get_forelpb_version(),
    )

    parser.add_argument(
        "--title",
        type=str,
        default=None,
        metavar="string",
        help="Title for the plots. Default: the CSV file name",
    )

    parser.add_argument(
        "--dpi",
        type=int,
        default=DEFAULT_DPI,
        metavar="value",
        help="DPI to use for the plots. Default: %(default)s",
    )

    parser.add_argument(
        "--only-averages",
        default=False,
        action="store_true",
        help="Only generate the running-average plot",
    )

    parser.add_argument(
        "--show",
        default=False,
        action="store_true",
        help="Also show the plots",
    )

    parser.add_argument("csv", nargs="+", help="trajectory CSV file(s) to plot")

    return parser.parse_args()


def main():
    opts = parse_arguments()
    # pylint: disable=import-outside-toplevel
    import pathlib

    import pandas as pd

    from forelpb.plotting import plot_projections, plot_running_averages

    for csv_filename in opts.csv:
        path = pathlib.Path(csv_filename)
        title = opts.title or path.stem
        print(f"plotting {csv_filename}")
        df = pd.read_csv(csv_filename)
        base = str(path.with_suffix(""))
        plot_running_averages(
            df, f"{base}_averages.svg", title=title, dpi=opts.dpi, show=opts.show
        )
        if not opts.only_averages:
            plot_projections(
                df, f"{base}_projections.svg", title=title, dpi=opts.dpi, show=opts.show
            )
        print(f"   done: {base}_*.svg")


if __name__ == "__main__":
    main()
