"""
A package for inference and decisions with confidence measures (frequentist posteriors)

.. note ::

    The confdec documentation has detailed usage information, including a :doc:`user guide <../index>`
    for new users.

"""
from .exceptions import ConfDecError, ArgumentError
from .numerics import ToleranceConfig, SeededStream, DEFAULT_TOLERANCE
from .regions import Interval, Region, as_region
from .pvalue_functions import (PValueFunction, NormalMeanFamily, BinomialFamily, NormNormalFamily,
                               exactness_audit)
from .confidence_measure import ConfidenceMeasure
from .metameasure import ConfidenceMetameasure, ProbabilityInterval
from .combine import combine, CombinationRule
import pkg_resources

try:
    __version__ = pkg_resources.get_distribution("confdec").version
except Exception:
    # Local copy or not installed with setuptools.
    # Disable minimum version checks on downstream libraries.
    __version__ = "999"


def normal_mean_measure(data=None, n=None, sample_mean=None, sample_sd=None, tol=None):
    """
    Create the confidence measure for the mean of a normal sample with unknown variance, either from the
    sample itself or from its summary statistics.

    Parameters
    ----------
    data: array_like, optional
        The sample
    n: int, optional
        The sample size (if `data` isn't given)
    sample_mean: float, optional
        The sample mean (if `data` isn't given)
    sample_sd: float, optional
        The sample standard deviation (if `data` isn't given)
    tol: ToleranceConfig, optional
        Tolerances for numerical inversion

    Returns
    -------
    ConfidenceMeasure
        A measure whose CDF is the t-based upper-tail p-value function
    """
    if data is not None:
        if any(v is not None for v in (n, sample_mean, sample_sd)):
            raise ArgumentError("Specify either the data or its summary statistics, not both")
        pf = NormalMeanFamily.from_sample(data)
    elif any(v is None for v in (n, sample_mean, sample_sd)):
        raise ArgumentError("n, sample_mean and sample_sd must all be given when data isn't")
    else:
        pf = NormalMeanFamily(n, sample_mean, sample_sd)
    return ConfidenceMeasure.from_pvalue_function(pf, tol)


def norm_normal_measure(dim, norm_obs, tol=None):
    """
    Create the confidence measure for the norm of the mean of a multivariate normal observation with identity
    covariance.

    Parameters
    ----------
    dim: int
        The dimension of the observation
    norm_obs: float
        The Euclidean norm of the observation
    tol: ToleranceConfig, optional

    Returns
    -------
    ConfidenceMeasure
    """
    return ConfidenceMeasure.from_pvalue_function(NormNormalFamily(dim, norm_obs), tol)


def binomial_metameasure(n, x, tol=None):
    """
    Create the confidence metameasure for a binomial success probability from its valid (C=0) and
    nonconservative (C=1) p-value functions.

    The half-corrected (C=1/2) measure, which gives the same levels of confidence as the mean of the convex
    family the two members span, is available from `.reduce_convex_mean()`.

    Parameters
    ----------
    n: int
        The number of trials
    x: int
        The number of successes
    tol: ToleranceConfig, optional

    Returns
    -------
    ConfidenceMetameasure
    """
    return ConfidenceMetameasure.from_binomial(n, x, tol)
