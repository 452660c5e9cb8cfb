"""
The ``confdec`` command line interface.

Exit codes: 0 on success, 2 for bad arguments and 3 for numerical failures.
"""
import argparse
import logging
import math
import sys

from .exceptions import ConfDecError, ArgumentError
from . import experiments

logger = logging.getLogger(__name__)


def _float_list(text):
    try:
        return [float(v) for v in text.split(',') if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError("Expected a comma separated list of numbers, got '{}'".format(text))


def _int_list(text):
    try:
        return [int(v) for v in text.split(',') if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError("Expected a comma separated list of integers, got '{}'".format(text))


def _fig1(config):
    opts = config.options
    df = experiments.run_fig1(n_max=opts.get('n_max', 100), theta=opts.get('theta', 2. / 3.),
                              region=opts.get('region', '0.25,0.75'))
    experiments.write_csv(df, config.out_path)
    if 'plot' in opts:
        import matplotlib
        matplotlib.use('Agg')
        from .utils import plot_confidence_levels
        ax = plot_confidence_levels(df)
        ax.figure.savefig(opts['plot'], bbox_inches='tight')
        logger.info("Saved the figure to %s", opts['plot'])


def _coverage_audit(config):
    opts = config.options
    theta_grid = opts.get('theta_grid', [round(0.05 * i, 2) for i in range(1, 20)])
    rho_grid = opts.get('rho_grid', [0.5, 0.8, 0.9, 0.95])
    df = experiments.run_coverage_audit(opts.get('n', 10), theta_grid, rho_grid, alpha=opts.get('alpha'))
    experiments.write_csv(df, config.out_path)


def _consistency(config):
    opts = config.options
    df = experiments.run_consistency(n_list=opts.get('n_list', [10, 100, 1000]), theta_true=opts.get('theta', 0.5),
                                     region=opts.get('region', '0,1'), reps=config.reps or 2000,
                                     stream=config.stream, sigma=opts.get('sigma', 1.),
                                     progress=logger.isEnabledFor(logging.INFO))
    experiments.write_csv(df, config.out_path)


def _regions_sphere(config):
    from .regions import as_region
    opts = config.options
    piece, = as_region(opts.get('region', '1,4')).pieces
    report = experiments.run_regions_sphere(opts.get('dim', 2), opts.get('norm', 2.), piece.lo, piece.hi)
    experiments.write_report(report, config.out_path)


def _bioequiv(config):
    from .pvalue_functions import NormalMeanFamily
    opts = config.options
    theta0 = opts.get('theta0', 0.)
    family = NormalMeanFamily(opts.get('n', 20), opts.get('mean', theta0), opts.get('sd', 0.2))
    report = experiments.run_bioequiv(theta0, opts.get('delta', math.log(1.25)), family)
    experiments.write_report(report, config.out_path)


def _combine_demo(config):
    opts = config.options
    report = experiments.run_combine_demo(n=opts.get('n', 20), theta=opts.get('theta', 1.),
                                          sigma=opts.get('sigma', 2.), n_sims=config.reps or 10000,
                                          stream=config.stream)
    experiments.write_report(report, config.out_path)


def build_parser():
    parser = argparse.ArgumentParser(prog='confdec', description="Confidence measures, metameasures and "
                                                                 "decisions: desk-scale experiments")
    parser.add_argument('-v', '--verbose', action='count', default=0,
                        help="Log progress (-v) or debugging output (-vv) to stderr")
    shared = argparse.ArgumentParser(add_help=False)
    shared.add_argument('--seed', type=int, default=42, help="Seed for the random streams")
    shared.add_argument('--reps', type=int, help="Number of replicates")
    shared.add_argument('--out', help="Output path (standard output by default)")

    subparsers = parser.add_subparsers(dest='subcommand', required=True)

    fig1 = subparsers.add_parser('fig1', parents=[shared],
                                 help="Binomial confidence levels of a region against the number of trials")
    fig1.add_argument('--n-max', type=int, help="Largest number of trials (default 100)")
    fig1.add_argument('--theta', type=float, help="Success rate the outcomes are taken from (default 2/3)")
    fig1.add_argument('--region', help="Hypothesis region as lo,hi (default 0.25,0.75)")
    fig1.add_argument('--plot', help="Also render the levels to this image file")
    fig1.set_defaults(func=_fig1)

    coverage = subparsers.add_parser('coverage-audit', parents=[shared],
                                     help="Exact coverage of the valid and nonconservative binomial estimators")
    coverage.add_argument('--n', type=int, help="Number of trials (default 10)")
    coverage.add_argument('--theta-grid', type=_float_list, help="Comma separated success probabilities")
    coverage.add_argument('--rho-grid', type=_float_list, help="Comma separated confidence coefficients")
    coverage.add_argument('--alpha', type=float, help="Lower tail level (default (1 - rho) / 2)")
    coverage.set_defaults(func=_coverage_audit)

    consistency = subparsers.add_parser('consistency', parents=[shared],
                                        help="Simulate the confidence level of a region as n grows")
    consistency.add_argument('--n-list', type=_int_list, help="Comma separated sample sizes (default 10,100,1000)")
    consistency.add_argument('--theta', type=float, help="True mean (default 0.5)")
    consistency.add_argument('--region', help="Hypothesis region as lo,hi (default 0,1)")
    consistency.add_argument('--sigma', type=float, help="True standard deviation (default 1)")
    consistency.set_defaults(func=_consistency)

    sphere = subparsers.add_parser('regions-sphere', parents=[shared],
                                   help="Confidence about the norm of a normal mean")
    sphere.add_argument('--dim', type=int, help="Dimension (default 2)")
    sphere.add_argument('--norm', type=float, help="Norm of the observation (default 2)")
    sphere.add_argument('--region', help="Radii as lo,hi (default 1,4)")
    sphere.set_defaults(func=_regions_sphere)

    bioequiv = subparsers.add_parser('bioequiv', parents=[shared],
                                     help="Confidence about a mean relative to an equivalence margin")
    bioequiv.add_argument('--theta0', type=float, help="Centre of the equivalence interval (default 0)")
    bioequiv.add_argument('--delta', type=float, help="Equivalence margin (default log 1.25)")
    bioequiv.add_argument('--n', type=int, help="Sample size (default 20)")
    bioequiv.add_argument('--mean', type=float, help="Sample mean (default theta0)")
    bioequiv.add_argument('--sd', type=float, help="Sample standard deviation (default 0.2)")
    bioequiv.set_defaults(func=_bioequiv)

    demo = subparsers.add_parser('combine-demo', parents=[shared],
                                 help="Combine the measures from two independent normal samples")
    demo.add_argument('--n', type=int, help="Size of each sample (default 20)")
    demo.add_argument('--theta', type=float, help="True mean (default 1)")
    demo.add_argument('--sigma', type=float, help="True standard deviation (default 2)")
    demo.set_defaults(func=_combine_demo)

    return parser


def main(argv=None):
    """
    Run the command line interface

    Parameters
    ----------
    argv: list of str, optional
        The arguments (``sys.argv[1:]`` by default)

    Returns
    -------
    int
        The exit code
    """
    parser = build_parser()
    args = parser.parse_args(argv)

    level = logging.WARNING if args.verbose == 0 else (logging.INFO if args.verbose == 1 else logging.DEBUG)
    logging.basicConfig(level=level, format='%(asctime)s %(name)s %(levelname)s: %(message)s')
    logging.captureWarnings(True)

    try:
        config = experiments.ExperimentConfig.from_args(args)
        args.func(config)
    except ConfDecError as err:
        logger.error("%s", err)
        return err.exit_code
    except OSError as err:
        logger.error("Couldn't write output: %s", err)
        return ArgumentError.exit_code
    return 0


if __name__ == '__main__':
    sys.exit(main())
