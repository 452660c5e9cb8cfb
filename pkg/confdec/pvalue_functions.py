from abc import ABC, abstractmethod
from dataclasses import dataclass
import logging

import numpy as np
from scipy import special, stats

from .exceptions import ParameterDomainError, ArgumentError, DomainError, CapabilityError
from .numerics import binomial_upper_tail, invert_monotone_many, SeededStream
from .regions import Interval, as_region

logger = logging.getLogger(__name__)


class PValueFunction(ABC):
    """
    The upper-tail p-value function of a scalar interest parameter given fixed data. As a function of theta
    it is a CDF on the parameter space, and it is the canonical description of a nested set estimator's
    confidence content.

    See the `API documentation <../api.html#pvaluefunction>`_ for a list of concrete
    classes implementing this interface.

    Attributes
    ----------
    domain: Interval
        The parameter space
    exact: bool
        Whether p-values at the true parameter are exactly uniform over repeated sampling
    provenance: str
        A free-text description of the data the function was computed from
    max_moment: float
        The supremum of the orders of the moments which exist for the corresponding measure
    """

    exact = False
    max_moment = np.inf

    def __init__(self, domain, provenance=''):
        self.domain = domain
        self.provenance = provenance

    @abstractmethod
    def upper_tail(self, theta):
        """
        The (vectorised) upper-tail p-value function, without any domain checking. Implementations must
        accept the (possibly infinite) end points of the domain and return the limits there.
        """
        pass

    def _check_domain(self, theta):
        theta = np.asarray(theta, dtype=float)
        lo, hi = self.domain.lo, self.domain.hi
        if np.any(np.isnan(theta)) or np.any(theta < lo) or np.any(theta > hi):
            raise DomainError("Parameter values must lie within {}".format(self.domain))
        return theta

    def eval(self, theta, tail='upper'):
        """
        Evaluate the p-value function

        Parameters
        ----------
        theta: float or array_like
            The hypothesised parameter value(s)
        tail: {'upper', 'lower'}
            Which tail to return. The lower tail is always 1 minus the upper tail.

        Returns
        -------
        float or ndarray
        """
        theta = self._check_domain(theta)
        upper = np.clip(self.upper_tail(theta), 0., 1.)
        if tail == 'upper':
            res = upper
        elif tail == 'lower':
            res = 1. - upper
        else:
            raise ArgumentError("tail must be one of 'upper' or 'lower', got '{}'".format(tail))
        return float(res) if np.ndim(res) == 0 else res

    def lower_tail(self, theta):
        return 1. - np.clip(self.upper_tail(theta), 0., 1.)

    @property
    def has_density(self):
        return type(self).density is not PValueFunction.density

    def density(self, theta):
        """The derivative of the upper tail with respect to theta"""
        raise CapabilityError("{} doesn't provide a density".format(type(self).__name__))

    def _closed_form_quantile(self, p):
        return None

    def invert(self, alpha, tol=None):
        """
        The left-continuous generalized inverse: the smallest theta with upper_tail(theta) >= alpha

        Parameters
        ----------
        alpha: float or array_like
            The level(s) to invert
        tol: ToleranceConfig

        Returns
        -------
        float or ndarray

        Raises
        ------
        InversionRangeError
            If alpha lies above the largest attainable value of the upper tail
        """
        alpha = np.asarray(alpha, dtype=float)
        if np.any(np.isnan(alpha)) or np.any(alpha < 0.) or np.any(alpha > 1.):
            raise ArgumentError("Levels must lie in [0, 1], got {}".format(alpha))
        res = self._closed_form_quantile(alpha)
        if res is None:
            res = invert_monotone_many(self.upper_tail, alpha, self.domain.lo, self.domain.hi, tol)
        return float(res) if np.ndim(res) == 0 else res

    def two_sided_p(self, region):
        """
        The two-sided p-value of the hypothesis that theta lies in `region`: twice the largest value of the
        smaller of the two tails over the region, clamped to [0, 1].

        The smaller tail increases while the upper tail is below 1/2 and decreases afterwards, so the supremum
        over each piece is found at its end points or is 1/2 if the piece straddles the median.

        Parameters
        ----------
        region: Region or Interval or float or tuple

        Returns
        -------
        float
        """
        region = as_region(region)
        if region.is_empty:
            raise ArgumentError("Can't compute the p-value of an empty region")
        if not region.is_subset_of(self.domain):
            raise DomainError("Region {} isn't contained in the domain {}".format(region, self.domain))
        best = 0.
        for piece in region:
            f_lo, f_hi = np.clip(self.upper_tail(np.array([piece.lo, piece.hi])), 0., 1.)
            if f_lo <= 0.5 <= f_hi:
                return 1.
            best = max(best, min(f_lo, 1. - f_lo), min(f_hi, 1. - f_hi))
        return min(1., 2. * best)

    def __repr__(self):
        return "{}({})".format(type(self).__name__, self.provenance)


class NormalMeanFamily(PValueFunction):
    """
    The p-value function for the mean of a normal sample with unknown variance, based on the Student t pivot
    with n - 1 degrees of freedom. Exact.

    Parameters
    ----------
    n: int
        The sample size (at least 2)
    sample_mean: float
        The sample mean
    sample_sd: float
        The sample standard deviation (positive)
    """

    exact = True

    def __init__(self, n, sample_mean, sample_sd):
        if int(n) != n or n < 2:
            raise ParameterDomainError("The sample size must be an integer of at least 2, got {}".format(n))
        if not sample_sd > 0 or not np.isfinite(sample_sd):
            raise ParameterDomainError("The sample standard deviation must be positive, got {}".format(sample_sd))
        if not np.isfinite(sample_mean):
            raise ParameterDomainError("The sample mean must be finite, got {}".format(sample_mean))
        self.n = int(n)
        self.sample_mean = float(sample_mean)
        self.sample_sd = float(sample_sd)
        self.df = self.n - 1
        self.scale = self.sample_sd / np.sqrt(self.n)
        super().__init__(Interval(-np.inf, np.inf),
                         "n={}, mean={:g}, sd={:g}".format(self.n, self.sample_mean, self.sample_sd))

    @classmethod
    def from_sample(cls, values):
        """Build the family from a one-dimensional sample"""
        values = np.asarray(values, dtype=float)
        return cls(values.size, values.mean(), values.std(ddof=1))

    @property
    def max_moment(self):
        return float(self.df)

    def upper_tail(self, theta):
        return special.stdtr(self.df, (np.asarray(theta, dtype=float) - self.sample_mean) / self.scale)

    def density(self, theta):
        return stats.t.pdf((np.asarray(theta, dtype=float) - self.sample_mean) / self.scale, self.df) / self.scale

    def _closed_form_quantile(self, p):
        p = np.asarray(p, dtype=float)
        inner = np.clip(p, 1e-300, 1. - 1e-16)
        res = self.sample_mean + special.stdtrit(self.df, inner) * self.scale
        # stdtrit returns nan at the ends
        return np.where(p <= 0., -np.inf, np.where(p >= 1., np.inf, res))

    @classmethod
    def simulate_pvalues(cls, theta, nuisance, size, rng, n=5):
        """
        Simulate `size` normal samples of size `n` with mean `theta` and standard deviation `nuisance`, and
        return the upper-tail p-value of each at `theta`
        """
        data = rng.normal(theta, nuisance, size=(size, n))
        means = data.mean(axis=1)
        sds = data.std(axis=1, ddof=1)
        return special.stdtr(n - 1, (theta - means) * np.sqrt(n) / sds)


class BinomialFamily(PValueFunction):
    """
    The C-corrected upper-tail p-value function for a binomial success probability

        p(theta) = P_theta(X > x) + C P_theta(X = x)

    C = 0 gives the valid (Clopper-Pearson) member, C = 1 the nonconservative member and C = 1/2 the
    half-corrected approximation.

    Parameters
    ----------
    n: int
        The number of trials (at least 1)
    x: int
        The observed number of successes
    C: float
        The correction, in [0, 1]
    """

    def __init__(self, n, x, C=0.5):
        if int(n) != n or n < 1:
            raise ParameterDomainError("The number of trials must be a positive integer, got {}".format(n))
        if int(x) != x or not 0 <= x <= n:
            raise ParameterDomainError("The number of successes must be an integer in [0, {}], got {}".format(n, x))
        if not 0. <= C <= 1.:
            raise ParameterDomainError("The correction must lie in [0, 1], got {}".format(C))
        self.n = int(n)
        self.x = int(x)
        self.C = float(C)
        super().__init__(Interval(0., 1.), "n={}, x={}, C={:g}".format(self.n, self.x, self.C))

    def dual(self):
        """The member with correction 1 - C (the valid member for the nonconservative one and vice versa)"""
        return BinomialFamily(self.n, self.x, 1. - self.C)

    @staticmethod
    def tails_by_outcome(n, theta, C):
        """
        The C-corrected upper tail at `theta` for every possible outcome x = 0, ..., n

        Returns
        -------
        ndarray of shape (n + 1,)
        """
        x = np.arange(n + 1)
        strictly_above = binomial_upper_tail(x, n, theta)
        at_or_above = binomial_upper_tail(x - 1, n, theta)
        return (1. - C) * strictly_above + C * at_or_above

    def upper_tail(self, theta):
        theta = np.asarray(theta, dtype=float)
        strictly_above = binomial_upper_tail(self.x, self.n, theta)
        at_or_above = binomial_upper_tail(self.x - 1, self.n, theta)
        return (1. - self.C) * strictly_above + self.C * at_or_above

    def density(self, theta):
        theta = np.asarray(theta, dtype=float)
        return self.n * ((1. - self.C) * stats.binom.pmf(self.x, self.n - 1, theta) +
                         self.C * stats.binom.pmf(self.x - 1, self.n - 1, theta))

    @classmethod
    def simulate_pvalues(cls, theta, nuisance, size, rng, n=10, C=0.5):
        """Simulate `size` binomial outcomes at `theta` and return each upper-tail p-value at `theta`"""
        x = rng.binomial(n, theta, size=size)
        return cls.tails_by_outcome(n, theta, C)[x]


class NormNormalFamily(PValueFunction):
    """
    The p-value function for the norm of the mean of a `dim`-dimensional normal vector with identity
    covariance, given the norm of a single observation:

        F(theta) = 1 - chi2_dim((norm_obs / theta)^2),  theta > 0

    The observed norm is a stochastically increasing function of the true norm, so F is a CDF in theta, but
    the p-values are only approximately uniform (the non-central chi-squared isn't a pivot).

    Parameters
    ----------
    dim: int
        The dimension of the observation (at least 1)
    norm_obs: float
        The Euclidean norm of the observation (non-negative)
    """

    def __init__(self, dim, norm_obs):
        if int(dim) != dim or dim < 1:
            raise ParameterDomainError("The dimension must be a positive integer, got {}".format(dim))
        if not norm_obs >= 0 or not np.isfinite(norm_obs):
            raise ParameterDomainError("The observed norm must be non-negative, got {}".format(norm_obs))
        self.dim = int(dim)
        self.norm_obs = float(norm_obs)
        super().__init__(Interval(0., np.inf), "dim={}, norm={:g}".format(self.dim, self.norm_obs))

    @property
    def max_moment(self):
        return float(self.dim) if self.norm_obs > 0 else np.inf

    def upper_tail(self, theta):
        theta = np.asarray(theta, dtype=float)
        if self.norm_obs == 0.:
            return np.ones_like(theta)
        with np.errstate(divide='ignore'):
            q = np.square(self.norm_obs / theta)
        return np.where(theta <= 0., 0., special.chdtrc(self.dim, q))

    def density(self, theta):
        theta = np.asarray(theta, dtype=float)
        if self.norm_obs == 0.:
            return np.zeros_like(theta)
        safe = np.where(theta > 0., theta, 1.)
        q = np.square(self.norm_obs / safe)
        res = stats.chi2.pdf(q, self.dim) * 2. * self.norm_obs ** 2 / safe ** 3
        return np.where(theta > 0., res, 0.)

    def _closed_form_quantile(self, p):
        if self.norm_obs == 0.:
            return np.zeros_like(p)
        with np.errstate(divide='ignore'):
            return self.norm_obs / np.sqrt(special.chdtri(self.dim, p))

    @classmethod
    def simulate_pvalues(cls, theta, nuisance, size, rng, dim=2):
        """Simulate `size` observations whose mean has norm `theta` and return each p-value at `theta`"""
        mean = np.zeros(dim)
        mean[0] = theta
        norms = np.linalg.norm(rng.normal(size=(size, dim)) + mean, axis=1)
        if theta == 0.:
            return np.where(norms == 0., 1., 0.)
        return special.chdtrc(dim, np.square(norms / theta))


@dataclass
class AuditReport:
    """
    The result of an exactness audit

    Attributes
    ----------
    ks_distance: float
        The Kolmogorov-Smirnov distance between the simulated p-values and the uniform distribution
    n_sims: int
        The number of simulated data sets
    """
    ks_distance: float
    n_sims: int


def exactness_audit(family, true_theta, nuisance, n_sims, stream=None, progress=False, block_size=1000,
                    **design):
    """
    Check how close the upper-tail p-values at the true parameter are to uniform over repeated sampling.

    Replicates are simulated in blocks, each drawing from its own stream derived from `stream`, so the result
    only depends on the seed.

    Parameters
    ----------
    family: type or object
        Anything with a `simulate_pvalues(theta, nuisance, size, rng, **design)` method, e.g.
        :class:`NormalMeanFamily` or a :class:`confdec.combine.CombinationSimulator`
    true_theta: float
        The parameter value the data are simulated at
    nuisance: float
        The value of any nuisance parameter (e.g. the standard deviation for the normal family)
    n_sims: int
        The number of data sets to simulate
    stream: SeededStream
    progress: bool
        Show a progress bar over the blocks of replicates
    block_size: int
        The number of replicates per block
    design: dict
        Any design parameters passed through to the simulator (e.g. `n`)

    Returns
    -------
    AuditReport
    """
    from .utils import progress_bar, ks_uniform_distance

    if int(n_sims) != n_sims or n_sims < 1:
        raise ArgumentError("n_sims must be a positive integer, got {}".format(n_sims))
    simulator = getattr(family, 'simulate_pvalues', None)
    if simulator is None:
        raise CapabilityError("{!r} can't simulate data".format(family))
    stream = stream if stream is not None else SeededStream()

    n_blocks = -(-int(n_sims) // block_size)
    pvalues = []
    for b in progress_bar(range(n_blocks), progress, desc='Auditing', unit='block'):
        size = min(block_size, n_sims - b * block_size)
        pvalues.append(simulator(true_theta, nuisance, size, stream.derive(b).rng, **design))
    pvalues = np.concatenate(pvalues)

    ks = ks_uniform_distance(pvalues)
    logger.info("Exactness audit of %r at theta=%g: KS distance %.4f over %d simulations",
                family, true_theta, ks, n_sims)
    return AuditReport(ks_distance=float(ks), n_sims=int(n_sims))
