"""
Desk-scale experiments: the binomial confidence-level figure, exact coverage audits, consistency of the
confidence level of a region, region confidence for a sphere and a bioequivalence-style interval, and the
combination of two independent normal-mean measures.

Each ``run_*`` function returns a pandas DataFrame (tabular results) or a dict (reports); the command line
interface writes these with :func:`write_csv` and :func:`write_report`.
"""
from dataclasses import dataclass, field
from fractions import Fraction
import logging
import math
import os
import sys
import warnings

import numpy as np
import pandas as pd
from scipy import stats

from .exceptions import ArgumentError
from .numerics import SeededStream
from .regions import Region, as_region
from .pvalue_functions import BinomialFamily, NormalMeanFamily, NormNormalFamily, exactness_audit
from .confidence_measure import ConfidenceMeasure
from .metameasure import ConfidenceMetameasure
from .combine import combine, CombinationRule, CombinationSimulator
from .utils import progress_bar, ks_uniform_distance

logger = logging.getLogger(__name__)

# Replicate counts below this are too small for the consistency summaries to mean much
MIN_RECOMMENDED_REPS = 100
# Exact enumeration of the coverage is limited to this many trials
MAX_COVERAGE_TRIALS = 10 ** 4
# Inclusive tolerance for the p-value inequalities defining set membership
MEMBERSHIP_TOLERANCE = 1e-13

SUBCOMMANDS = ('fig1', 'coverage-audit', 'consistency', 'regions-sphere', 'bioequiv', 'combine-demo')


@dataclass
class ExperimentConfig:
    """
    The configuration of a single experiment run

    Attributes
    ----------
    subcommand: str
        One of SUBCOMMANDS
    seed: int
        The seed for any random streams
    reps: int or None
        The number of replicates (None for the experiment's default)
    out_path: str or None
        Where to write the output (standard output if None)
    options: dict
        The experiment-specific options
    """
    subcommand: str
    seed: int = 42
    reps: int = None
    out_path: str = None
    options: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.subcommand not in SUBCOMMANDS:
            raise ArgumentError("Unknown experiment '{}'".format(self.subcommand))
        if self.reps is not None and (int(self.reps) != self.reps or self.reps < 1):
            raise ArgumentError("reps must be a positive integer, got {}".format(self.reps))
        if int(self.seed) != self.seed or not 0 <= self.seed < 2 ** 64:
            raise ArgumentError("seed must be a 64-bit unsigned integer, got {}".format(self.seed))
        if self.out_path is not None:
            directory = os.path.dirname(os.path.abspath(self.out_path))
            if not os.path.isdir(directory) or not os.access(directory, os.W_OK):
                raise ArgumentError("Can't write output to '{}': directory doesn't exist or isn't writable".format(
                    self.out_path))

    @classmethod
    def from_args(cls, args):
        """Build a configuration from parsed command line arguments"""
        shared = {'subcommand', 'seed', 'reps', 'out', 'verbose', 'func'}
        options = {k: v for k, v in vars(args).items() if k not in shared and v is not None}
        return cls(subcommand=args.subcommand, seed=args.seed, reps=args.reps, out_path=args.out,
                   options=options)

    @property
    def stream(self):
        return SeededStream(self.seed)


def successes_for(n, theta):
    """The smallest integer greater than or equal to n * theta, with theta read as the nearest simple fraction"""
    return int(math.ceil(Fraction(theta).limit_denominator(10 ** 6) * n))


def run_fig1(n_max=100, theta=2. / 3., region=(0.25, 0.75)):
    """
    Confidence levels of a region for x = ceil(n theta) successes in n = 1, ..., n_max trials under the
    valid, nonconservative and half-corrected binomial measures, and the mean of the convex family spanned
    by the first two

    Parameters
    ----------
    n_max: int
    theta: float
        The success rate the outcomes are taken from, in (0, 1)
    region: Region or tuple or str

    Returns
    -------
    pandas.DataFrame
        With columns n, valid_level, nonconservative_level, half_corrected_level, convex_mean_level
    """
    if int(n_max) != n_max or n_max < 1:
        raise ArgumentError("n_max must be a positive integer, got {}".format(n_max))
    if not 0. < theta < 1.:
        raise ArgumentError("theta must lie in (0, 1), got {}".format(theta))
    region = as_region(region)

    rows = []
    for n in range(1, int(n_max) + 1):
        x = successes_for(n, theta)
        mm = ConfidenceMetameasure.from_binomial(n, x)
        valid, nonconservative = mm.levels(region)
        half = ConfidenceMeasure.from_pvalue_function(BinomialFamily(n, x, 0.5)).prob(region)
        rows.append((n, valid, nonconservative, half, mm.reduce_convex_mean().prob(region)))
    return pd.DataFrame(rows, columns=['n', 'valid_level', 'nonconservative_level', 'half_corrected_level',
                                       'convex_mean_level'])


def run_coverage_audit(n, theta_grid, rho_grid, alpha=None):
    """
    The exact coverage of the valid (C = 0) and nonconservative (C = 1) binomial set estimators, found by
    summing the binomial pmf over every outcome whose set estimate contains theta.

    Parameters
    ----------
    n: int
        The number of trials
    theta_grid: list of float
        The true success probabilities
    rho_grid: list of float
        The confidence coefficients
    alpha: float, optional
        The lower tail level of the set estimates. Defaults to the central choice (1 - rho) / 2.

    Returns
    -------
    pandas.DataFrame
        With columns theta, rho, valid_coverage, nonconservative_coverage
    """
    if len(theta_grid) == 0 or len(rho_grid) == 0:
        raise ArgumentError("The theta and rho grids must be non-empty")
    if int(n) != n or not 1 <= n <= MAX_COVERAGE_TRIALS:
        raise ArgumentError("n must be an integer in [1, {}], got {}".format(MAX_COVERAGE_TRIALS, n))
    n = int(n)

    rows = []
    for theta in theta_grid:
        if not 0. <= theta <= 1.:
            raise ArgumentError("theta must lie in [0, 1], got {}".format(theta))
        pmf = stats.binom.pmf(np.arange(n + 1), n, theta)
        strictly_above = BinomialFamily.tails_by_outcome(n, theta, 0.)
        at_or_above = BinomialFamily.tails_by_outcome(n, theta, 1.)
        for rho in rho_grid:
            a = (1. - rho) / 2. if alpha is None else alpha
            if not (0. <= rho <= 1. and a >= 0. and a + rho <= 1. + 1e-15):
                raise ArgumentError("Need 0 <= rho <= 1, alpha >= 0 and alpha + rho <= 1, got rho={}, "
                                    "alpha={}".format(rho, a))
            if rho >= 1.:
                rows.append((theta, rho, 1., 1.))
                continue
            # The valid estimator takes its lower end from the C = 1 member and its upper end from C = 0
            valid = (at_or_above >= a - MEMBERSHIP_TOLERANCE) & (strictly_above <= a + rho + MEMBERSHIP_TOLERANCE)
            nonconservative = ((strictly_above >= a - MEMBERSHIP_TOLERANCE) &
                               (at_or_above <= a + rho + MEMBERSHIP_TOLERANCE))
            rows.append((theta, rho, math.fsum(pmf[valid]), math.fsum(pmf[nonconservative])))
    return pd.DataFrame(rows, columns=['theta', 'rho', 'valid_coverage', 'nonconservative_coverage'])


def run_consistency(n_list=(10, 100, 1000), theta_true=0.5, region=(0., 1.), reps=2000, stream=None, sigma=1.,
                    progress=False):
    """
    Simulate the confidence level of a region from normal samples of increasing size.

    For each n, `reps` samples are drawn from N(theta_true, sigma^2) and the confidence level of `region`
    under the t-based measure is summarised. The two-sided p-value of the point null at theta_true is
    recorded for each replicate: it stays uniform however large n gets, while the confidence level of any
    interior point is always zero.

    Parameters
    ----------
    n_list: list of int
        The sample sizes (each at least 2)
    theta_true: float
    region: Region or tuple or str
    reps: int
    stream: SeededStream
    sigma: float
        The true standard deviation
    progress: bool
        Show a progress bar over the sample sizes

    Returns
    -------
    pandas.DataFrame
        With columns n, mean_conf, q05, q95, ks_pvalue_uniformity and point_null_conf. Any warnings are
        listed in ``DataFrame.attrs['warnings']``.
    """
    if len(n_list) == 0:
        raise ArgumentError("Need at least one sample size")
    if int(reps) != reps or reps < 1:
        raise ArgumentError("reps must be a positive integer, got {}".format(reps))
    if not sigma > 0:
        raise ArgumentError("sigma must be positive, got {}".format(sigma))
    region = as_region(region)
    point = Region.point(theta_true)
    stream = stream if stream is not None else SeededStream()

    notes = []
    if reps < MIN_RECOMMENDED_REPS:
        notes.append("reps={} is below the recommended minimum of {}; summaries are unreliable".format(
            reps, MIN_RECOMMENDED_REPS))
        warnings.warn(notes[-1])

    rows = []
    for i, n in enumerate(progress_bar(n_list, progress, desc='Sample sizes')):
        if int(n) != n or n < 2:
            raise ArgumentError("Sample sizes must be integers of at least 2, got {}".format(n))
        rng = stream.derive(i).rng
        # Sufficient statistics of a normal sample
        means = rng.normal(theta_true, sigma / np.sqrt(n), size=reps)
        sds = sigma * np.sqrt(rng.chisquare(n - 1, size=reps) / (n - 1))

        levels, point_levels, two_sided = np.empty(reps), np.empty(reps), np.empty(reps)
        for r in range(reps):
            pf = NormalMeanFamily(n, means[r], sds[r])
            measure = ConfidenceMeasure.from_pvalue_function(pf)
            levels[r] = measure.prob(region)
            point_levels[r] = measure.prob(point)
            two_sided[r] = pf.two_sided_p(point)
        rows.append((int(n), levels.mean(), np.quantile(levels, 0.05), np.quantile(levels, 0.95),
                     ks_uniform_distance(two_sided), point_levels.max()))
        logger.info("n=%d: mean confidence %.4f", n, levels.mean())

    df = pd.DataFrame(rows, columns=['n', 'mean_conf', 'q05', 'q95', 'ks_pvalue_uniformity', 'point_null_conf'])
    df.attrs['warnings'] = notes
    return df


def run_regions_sphere(dim, norm_obs, theta_lo, theta_hi):
    """
    Confidence that the norm of a normal mean lies below, between or above two radii, given the norm of a
    `dim`-dimensional observation

    Returns
    -------
    dict
        below, middle, above and their total
    """
    if not 0. < theta_lo:
        raise ArgumentError("theta_lo must be positive, got {}".format(theta_lo))
    if not theta_lo < theta_hi:
        raise ArgumentError("theta_lo ({}) must be smaller than theta_hi ({})".format(theta_lo, theta_hi))
    measure = ConfidenceMeasure.from_pvalue_function(NormNormalFamily(dim, norm_obs))
    below = measure.prob(Region.interval(0., theta_lo))
    middle = measure.prob(Region.interval(theta_lo, theta_hi, True, True))
    above = measure.prob(Region.interval(theta_hi, np.inf))
    return {'below': below, 'middle': middle, 'above': above, 'total': below + middle + above}


def run_bioequiv(theta0=0., delta=math.log(1.25), family=None):
    """
    Confidence that a (log-scale) mean lies below, within or above an equivalence margin around `theta0`

    Parameters
    ----------
    theta0: float
        The centre of the equivalence interval
    delta: float
        The equivalence margin (log(1.25) by default)
    family: NormalMeanFamily
        The p-value function of the mean

    Returns
    -------
    dict
        left, middle, right, their total and the confidence of being above the margin given being outside it
    """
    if not delta > 0:
        raise ArgumentError("delta must be positive, got {}".format(delta))
    family = family if family is not None else NormalMeanFamily(20, theta0, 0.2)
    measure = ConfidenceMeasure.from_pvalue_function(family)
    left = measure.prob(Region.interval(-np.inf, theta0 - delta, hi_open=True))
    middle = measure.prob(Region.interval(theta0 - delta, theta0 + delta))
    right = measure.prob(Region.interval(theta0 + delta, np.inf, lo_open=True))
    outside = left + right
    return {'left': left, 'middle': middle, 'right': right, 'total': left + middle + right,
            'conditional_right': right / outside if outside > 0. else float('nan')}


def run_combine_demo(n=20, theta=1., sigma=2., n_sims=10000, stream=None, rule=None):
    """
    Combine the confidence measures from two independent normal samples and audit the combination.

    Parameters
    ----------
    n: int
        The size of each sample
    theta: float
        The true mean
    sigma: float
        The true standard deviation
    n_sims: int
        The number of simulations for the exactness audit
    stream: SeededStream
    rule: CombinationRule

    Returns
    -------
    dict
        The median and central 95% interval of each input and of the combination, and the KS distance of the
        combined p-values to uniform
    """
    stream = stream if stream is not None else SeededStream()
    rule = rule if rule is not None else CombinationRule()
    measures = [ConfidenceMeasure.from_pvalue_function(
        NormalMeanFamily.from_sample(stream.derive(i).normal(theta, sigma, size=n))) for i in range(2)]
    combined = combine(measures, rule)

    report = {}
    for label, measure in [('first', measures[0]), ('second', measures[1]), ('combined', combined)]:
        interval = measure.set_estimate(0.95)
        report[label + '_median'] = measure.median()
        report[label + '_lower_95'] = interval.lo
        report[label + '_upper_95'] = interval.hi
    simulator = CombinationSimulator([(NormalMeanFamily, {'n': n})] * 2, rule)
    report['ks_distance'] = exactness_audit(simulator, theta, sigma, n_sims, stream.derive(2)).ks_distance
    return report


def _write(text, out_path):
    if out_path is None:
        sys.stdout.write(text)
    else:
        with open(out_path, 'w', encoding='utf-8', newline='\n') as f:
            f.write(text)


def write_csv(df, out_path=None):
    """Write a results table as CSV (with any warnings as leading '# ' lines)"""
    header = "".join("# {}\n".format(w) for w in df.attrs.get('warnings', []))
    body = df.to_csv(index=False, float_format='%.12g', lineterminator='\n')
    _write(header + body, out_path)


def write_report(report, out_path=None):
    """Write a report as key=value lines"""
    lines = ["{}={}".format(k, "{:.12g}".format(v) if isinstance(v, float) else v) for k, v in report.items()]
    _write("\n".join(lines) + "\n", out_path)
