from dataclasses import dataclass
import logging
import warnings

import numpy as np

from .exceptions import (ArgumentError, DomainError, InversionRangeError, AccuracyError, MomentError,
                         MultimodalityError, SamplingRefusedError, CapabilityError)
from .numerics import DEFAULT_TOLERANCE, ToleranceConfig, invert_monotone_many, integrate
from .regions import Interval, Region, as_region

__all__ = ['ConfidenceMeasure', 'MeasureSample', 'Region', 'Interval']

logger = logging.getLogger(__name__)

EXPECTATION_TOLERANCE = ToleranceConfig(abs_tol=1e-10, rel_tol=1e-9, max_iter=500)

# Number of grid points used to scan the density for its maximum
MODE_GRID_SIZE = 2001


@dataclass
class MeasureSample:
    """
    Draws from a confidence measure

    Attributes
    ----------
    values: ndarray
        The draws
    mass_deficiency: float
        The deficiency of the measure the draws were taken from. Non-zero values mean the draws come from the
        attainable part of the CDF only.
    """
    values: np.ndarray
    mass_deficiency: float = 0.

    def __len__(self):
        return len(self.values)

    def __iter__(self):
        return iter(self.values)

    def __getitem__(self, item):
        return self.values[item]


class ConfidenceMeasure:
    """
    A confidence measure (frequentist posterior) on a one-dimensional parameter space, defined by its CDF.

    The CDF may fail to reach 0 and 1 at the ends of the domain (e.g. the valid binomial measure for x = n).
    Such a measure is mass deficient: the shortfall cdf(inf domain) is treated as an atom at the lower end of
    the domain and 1 - cdf(sup domain) as an atom at the upper end, so the whole domain always has
    probability one. Regions which don't touch the end points only ever see raw CDF differences.

    Attributes
    ----------
    domain: Interval
        The parameter space
    cdf_function: callable
        The (vectorised) distribution function, without domain checks
    max_moment: float
        The supremum of the orders of the existing moments
    name: str
        A human-readable name
    source: PValueFunction or None
        The p-value function the measure was constructed from, if any
    """

    def __init__(self, cdf, domain, density=None, quantile=None, max_moment=np.inf, name='', tol=None,
                 source=None):
        """

        Parameters
        ----------
        cdf: callable
            A nondecreasing, vectorised map from the domain to [0, 1] which accepts the (possibly infinite)
            domain end points
        domain: Interval
            The parameter space
        density: callable, optional
            The derivative of `cdf`, if known
        quantile: callable, optional
            A (vectorised) closed-form generalized inverse of `cdf`, valid within its attainable range
        max_moment: float
            The supremum of the orders of the existing moments
        name: str
            Human readable name for the measure
        tol: ToleranceConfig
            Tolerances for numerical inversion
        source: PValueFunction, optional
            The p-value function the CDF was taken from
        """
        if not isinstance(domain, Interval) or domain.is_empty:
            raise ArgumentError("The domain must be a non-empty Interval")
        self.cdf_function = cdf
        self.domain = domain
        self._density = density
        self._quantile = quantile
        self.max_moment = max_moment
        self.name = name
        self.tol = tol or DEFAULT_TOLERANCE
        self.source = source
        self.cdf_lo = float(np.clip(cdf(domain.lo), 0., 1.))
        self.cdf_hi = float(np.clip(cdf(domain.hi), 0., 1.))

    @classmethod
    def from_pvalue_function(cls, pf, tol=None):
        """
        Build the confidence measure whose CDF is the upper-tail p-value function `pf`

        Parameters
        ----------
        pf: confdec.pvalue_functions.PValueFunction
        tol: ToleranceConfig

        Returns
        -------
        ConfidenceMeasure
        """
        return cls(pf.upper_tail, pf.domain,
                   density=pf.density if pf.has_density else None,
                   quantile=pf.invert,
                   max_moment=pf.max_moment,
                   name=repr(pf), tol=tol, source=pf)

    @property
    def mass_deficiency(self):
        """The confidence mass missing from the interior of the domain"""
        return float(np.clip(self.cdf_lo + 1. - self.cdf_hi, 0., 1.))

    @property
    def has_density(self):
        return self._density is not None

    def _check_domain(self, theta):
        theta = np.asarray(theta, dtype=float)
        if np.any(np.isnan(theta)) or np.any(theta < self.domain.lo) or np.any(theta > self.domain.hi):
            raise DomainError("Parameter values must lie within {}".format(self.domain))
        return theta

    def cdf(self, theta):
        """The distribution function (excluding any atom at the upper end point)"""
        res = np.clip(self.cdf_function(self._check_domain(theta)), 0., 1.)
        return float(res) if np.ndim(res) == 0 else res

    def density(self, theta):
        """The density in the interior of the domain"""
        if self._density is None:
            raise CapabilityError("The measure '{}' has no known density".format(self.name))
        res = self._density(self._check_domain(theta))
        return float(res) if np.ndim(res) == 0 else res

    def _F(self, theta):
        return float(np.clip(self.cdf_function(theta), 0., 1.))

    def prob(self, region):
        """
        The confidence level of a region: the sum over its pieces of the CDF differences, including the end
        point atoms of a mass deficient measure for pieces closed at the domain end points.

        Open and closed ends at interior points are treated alike, since only CDF values are used. Measures are
        assumed continuous inside the domain: a jump in a user supplied CDF is not counted as an atom, and a
        single point region has probability 0.

        Parameters
        ----------
        region: Region or Interval or float or tuple

        Returns
        -------
        float
            A probability. The whole domain returns exactly 1 and the empty region exactly 0.

        Raises
        ------
        DomainError
            If the region isn't contained in the domain
        """
        region = as_region(region)
        if not region.is_subset_of(self.domain):
            raise DomainError("Region {} isn't contained in the domain {}".format(region, self.domain))
        if region.is_empty:
            return 0.
        if region.covers(self.domain):
            return 1.
        total = 0.
        for piece in region:
            lower = 0. if (piece.lo == self.domain.lo and not piece.lo_open) else self._F(piece.lo)
            upper = 1. if (piece.hi == self.domain.hi and not piece.hi_open) else self._F(piece.hi)
            total += upper - lower
        return float(np.clip(total, 0., 1.))

    def _quantiles(self, p):
        """Vectorised generalized inverse for levels strictly inside the attainable range"""
        if self._quantile is not None:
            return np.asarray(self._quantile(p), dtype=float)
        return invert_monotone_many(self.cdf_function, p, self.domain.lo, self.domain.hi, self.tol)

    def quantile(self, p):
        """
        The p-quantile: the smallest theta with cdf(theta) >= p

        Parameters
        ----------
        p: float
            A probability strictly between 0 and 1

        Returns
        -------
        float

        Raises
        ------
        InversionRangeError
            If p isn't in (0, 1) or lies outside the attainable CDF range [cdf(inf domain), cdf(sup domain)].
            Deficient discrete measures raise this for levels they can't reach; use :meth:`set_estimate` to
            have such levels mapped to the domain end points.
        """
        if not 0. < p < 1. or p > self.cdf_hi or p < self.cdf_lo:
            raise InversionRangeError(p, self.cdf_lo, self.cdf_hi)
        if p == self.cdf_lo:
            return self.domain.lo
        return float(self._quantiles(p))

    def _endpoint_quantile(self, p):
        """The generalized inverse with unattainable levels mapped to the domain end points"""
        if p <= self.cdf_lo:
            return self.domain.lo
        if p > self.cdf_hi:
            return self.domain.hi
        try:
            return float(self._quantiles(p))
        except InversionRangeError:
            return self.domain.hi

    def median(self):
        return self._endpoint_quantile(0.5)

    def _split_point(self):
        m = self.median()
        if np.isfinite(m):
            return m
        lo, hi = self.domain.lo, self.domain.hi
        if np.isfinite(lo) and np.isfinite(hi):
            return (lo + hi) / 2.
        return lo if np.isfinite(lo) else (hi if np.isfinite(hi) else 0.)

    def mean(self, tol=None):
        """
        The mean of the measure, from the integrated survival function

        Parameters
        ----------
        tol: ToleranceConfig

        Returns
        -------
        float

        Raises
        ------
        MomentError
            If the measure has no finite first moment
        """
        tol = tol or EXPECTATION_TOLERANCE
        if not self.max_moment > 1.:
            raise MomentError("The measure '{}' has no mean".format(self.name))
        lo, hi = self.domain.lo, self.domain.hi
        if (np.isinf(hi) and self.cdf_hi < 1.) or (np.isinf(lo) and self.cdf_lo > 0.):
            raise MomentError("Confidence mass escapes to infinity so the mean doesn't exist")

        def survival(t):
            return 1. - self._F(t)

        try:
            if np.isfinite(lo):
                return lo + integrate(survival, lo, hi, tol)
            elif np.isfinite(hi):
                return hi - integrate(self._F, lo, hi, tol)
            else:
                m = self._split_point()
                return m + integrate(survival, m, hi, tol) - integrate(self._F, lo, m, tol)
        except AccuracyError as err:
            raise MomentError("The mean integral didn't converge: {}".format(err)) from err

    def _central_difference(self, theta, bandwidth):
        lo, hi = self.domain.lo, self.domain.hi
        left = np.maximum(theta - bandwidth, lo)
        right = np.minimum(theta + bandwidth, hi)
        return (np.clip(self.cdf_function(right), 0., 1.) - np.clip(self.cdf_function(left), 0., 1.)) / (right - left)

    def mode(self, bandwidth):
        """
        The value maximising the (central-difference) density, located by a grid scan and refined by bounded
        scalar minimisation.

        Parameters
        ----------
        bandwidth: float
            The central-difference step

        Returns
        -------
        float

        Raises
        ------
        MultimodalityError
            If the maximum isn't unique on the grid
        """
        from scipy.optimize import minimize_scalar

        if not bandwidth > 0:
            raise ArgumentError("The bandwidth must be positive, got {}".format(bandwidth))
        lo, hi = self.domain.lo, self.domain.hi
        grid_lo = lo if np.isfinite(lo) else self._endpoint_quantile(max(1e-3, self.cdf_lo + 1e-3))
        grid_hi = hi if np.isfinite(hi) else self._endpoint_quantile(min(0.999, self.cdf_hi - 1e-3))
        grid = np.linspace(grid_lo, grid_hi, MODE_GRID_SIZE)

        values = self._central_difference(grid, bandwidth)
        peak = values.max()
        near = np.flatnonzero(values >= peak - max(1e-9 * abs(peak), 1e-300))
        if len(near) > 2 or (len(near) == 2 and near[1] - near[0] != 1):
            raise MultimodalityError("The density of '{}' has no unique maximum ({} grid points within "
                                     "tolerance of the peak)".format(self.name, len(near)))
        i = near[0]
        if i == 0 and grid[0] == lo or i == len(grid) - 1 and grid[-1] == hi:
            return float(grid[i])
        bounds = grid[max(i - 1, 0)], grid[min(i + 1, len(grid) - 1)]
        res = minimize_scalar(lambda t: -self._central_difference(t, bandwidth), bounds=bounds, method='bounded',
                              options={'xatol': self.tol.rel_tol * max(1., abs(grid[i]))})
        return float(res.x)

    def sample(self, k, stream):
        """
        Draw `k` values by inverse-CDF sampling. Mass deficient measures are sampled on their attainable CDF
        range (with a warning); sampling is refused if more than half the mass is missing.

        Parameters
        ----------
        k: int
            The number of draws
        stream: SeededStream

        Returns
        -------
        MeasureSample
        """
        if int(k) != k or k < 1:
            raise ArgumentError("The number of draws must be a positive integer, got {}".format(k))
        deficiency = self.mass_deficiency
        if deficiency > 0.5:
            raise SamplingRefusedError("Refusing to sample '{}': mass deficiency {:.3g} exceeds 0.5".format(
                self.name, deficiency))
        if deficiency > 0.:
            warnings.warn("Sampling a mass deficient measure (deficiency {:.3g}); draws only represent the "
                          "attainable part of the CDF".format(deficiency))
        u = stream.uniform(self.cdf_lo, self.cdf_hi, size=int(k))
        values = np.where(u <= self.cdf_lo, self.domain.lo, self._quantiles(np.maximum(u, self.cdf_lo)))
        return MeasureSample(values=values, mass_deficiency=deficiency)

    def set_estimate(self, rho, alpha=None, lower=None):
        """
        The nested set estimate with confidence coefficient `rho`: [quantile(alpha), quantile(alpha + rho)].

        Unattainable quantiles (discrete data) are mapped to the domain end points.

        Parameters
        ----------
        rho: float
            The confidence coefficient
        alpha: float, optional
            The lower tail level. Defaults to the central choice (1 - rho) / 2.
        lower: ConfidenceMeasure, optional
            A dual measure to take the lower end point from (e.g. the C = 1 binomial member for the valid C = 0
            estimator). Defaults to this measure.

        Returns
        -------
        Interval
        """
        alpha = (1. - rho) / 2. if alpha is None else alpha
        if not (rho >= 0 and alpha >= 0 and alpha + rho <= 1. + 1e-15):
            raise ArgumentError("Need rho >= 0, alpha >= 0 and alpha + rho <= 1, got rho={}, alpha={}".format(
                rho, alpha))
        lower = lower if lower is not None else self
        if rho == 0.:
            q = self._endpoint_quantile(alpha)
            return Interval(q, q, True, True)
        if rho >= 1.:
            return self.domain
        return Interval(lower._endpoint_quantile(alpha), self._endpoint_quantile(min(alpha + rho, 1.)))

    def set_contains(self, theta, rho, alpha=None, lower=None):
        """
        Whether `set_estimate(rho, alpha, lower)` contains `theta`, decided from the equivalent p-value
        inequalities lower_cdf(theta) >= alpha and cdf(theta) <= alpha + rho. Ties count as inside.
        """
        alpha = (1. - rho) / 2. if alpha is None else alpha
        lower = lower if lower is not None else self
        if rho >= 1.:
            return self.domain.contains(theta)
        if rho <= 0.:
            return False
        return lower._F(theta) >= alpha - 1e-13 and self._F(theta) <= alpha + rho + 1e-13

    def expect(self, fn, tol=None, breaks=()):
        """
        The expectation of a scalar function under the measure, including any end point atoms.

        Uses density quadrature split at the median (and at `breaks`) when a density is known, and quadrature
        over the quantile transform otherwise.

        Parameters
        ----------
        fn: callable
            A scalar function on the domain
        tol: ToleranceConfig
        breaks: list of float
            Points where `fn` is discontinuous

        Returns
        -------
        float

        Raises
        ------
        MomentError
            If the integral doesn't converge
        """
        tol = tol or EXPECTATION_TOLERANCE
        lo, hi = self.domain.lo, self.domain.hi
        total = 0.
        if self.cdf_lo > 0. and np.isfinite(lo):
            total += self.cdf_lo * fn(lo)
        if self.cdf_hi < 1. and np.isfinite(hi):
            total += (1. - self.cdf_hi) * fn(hi)

        try:
            if self._density is not None:
                cuts = sorted({self._split_point(), *[b for b in breaks if lo < b < hi]})
                edges = [lo] + cuts + [hi]
                for a, b in zip(edges[:-1], edges[1:]):
                    total += integrate(lambda t: fn(t) * float(self._density(t)), a, b, tol)
            elif self.cdf_hi > self.cdf_lo:
                cuts = sorted({float(self._F(b)) for b in breaks if lo < b < hi} - {self.cdf_lo, self.cdf_hi})
                edges = [self.cdf_lo] + cuts + [self.cdf_hi]
                for a, b in zip(edges[:-1], edges[1:]):
                    total += integrate(lambda u: fn(float(self._quantiles(u))), a, b, tol)
        except AccuracyError as err:
            raise MomentError("The expectation under '{}' didn't converge: {}".format(self.name, err)) from err
        return float(total)

    def __repr__(self):
        return "ConfidenceMeasure({})".format(self.name)
