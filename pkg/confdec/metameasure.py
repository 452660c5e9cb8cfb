from dataclasses import dataclass
import logging

import numpy as np

from .exceptions import ArgumentError
from .confidence_measure import ConfidenceMeasure
from .regions import Region, as_region

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class ProbabilityInterval:
    """
    A closed interval of probabilities (a confidence metalevel)

    Attributes
    ----------
    lo: float
        The lower probability
    hi: float
        The upper probability
    """
    lo: float
    hi: float

    def __post_init__(self):
        if not 0. <= self.lo <= self.hi <= 1.:
            raise ArgumentError("Need 0 <= lo <= hi <= 1, got [{}, {}]".format(self.lo, self.hi))

    @property
    def width(self):
        return self.hi - self.lo

    def contains(self, p):
        return self.lo <= p <= self.hi


@dataclass
class DualityReport:
    """
    The result of checking the metalevel end points form a coherent lower/upper probability pair

    Attributes
    ----------
    duality_violation: float
        The largest |lo(A) + hi(domain minus A) - 1| over the regions checked
    superadditivity_violation: float
        The largest amount by which lo(A) + lo(B) exceeds lo(A U B) over disjoint pairs
    subadditivity_violation: float
        The largest amount by which hi(A U B) exceeds hi(A) + hi(B) over disjoint pairs
    n_regions: int
    n_pairs: int
    """
    duality_violation: float
    superadditivity_violation: float
    subadditivity_violation: float
    n_regions: int
    n_pairs: int

    @property
    def max_violation(self):
        return max(self.duality_violation, self.superadditivity_violation, self.subadditivity_violation)

    def passed(self, tol=1e-10):
        return self.max_violation <= tol


class ConfidenceMetameasure:
    """
    A confidence metameasure: the pair of confidence measures from a valid and a nonconservative (dual) set
    estimator. Every region gets the closed interval of confidence levels spanned by the two measures.

    Parameters
    ----------
    valid: ConfidenceMeasure
        The measure from the valid (conservative) estimator
    nonconservative: ConfidenceMeasure
        The measure from the nonconservative estimator

    Raises
    ------
    ArgumentError
        If the two measures live on different domains
    """

    def __init__(self, valid, nonconservative):
        if valid.domain != nonconservative.domain:
            raise ArgumentError("The valid and nonconservative measures must share a domain, got {} and {}".format(
                valid.domain, nonconservative.domain))
        self.valid = valid
        self.nonconservative = nonconservative

    @classmethod
    def from_binomial(cls, n, x, tol=None):
        """The metameasure of the C = 0 (valid) and C = 1 (nonconservative) binomial p-value functions"""
        from .pvalue_functions import BinomialFamily
        return cls(ConfidenceMeasure.from_pvalue_function(BinomialFamily(n, x, 0.), tol),
                   ConfidenceMeasure.from_pvalue_function(BinomialFamily(n, x, 1.), tol))

    @classmethod
    def degenerate(cls, measure):
        """A metameasure whose two members coincide (e.g. from an exact estimator)"""
        return cls(measure, measure)

    @property
    def domain(self):
        return self.valid.domain

    def _grid(self, size):
        lo, hi = self.domain.lo, self.domain.hi
        if np.isfinite(lo) and np.isfinite(hi):
            return np.linspace(lo, hi, size)
        ends = []
        for m in (self.valid, self.nonconservative):
            ends.append(m._endpoint_quantile(max(1e-6, m.cdf_lo + 1e-6)))
            ends.append(m._endpoint_quantile(min(1 - 1e-6, m.cdf_hi - 1e-6)))
        ends = [e for e in ends if np.isfinite(e)] or [0.]
        return np.linspace(max(min(ends) - 1., lo), min(max(ends) + 1., hi), size)

    def is_degenerate(self, grid_size=1001):
        """Whether the two members have the same CDF (compared on a grid over the domain)"""
        if self.valid is self.nonconservative:
            return True
        grid = self._grid(grid_size)
        return bool(np.allclose(self.valid.cdf_function(grid), self.nonconservative.cdf_function(grid),
                                rtol=0., atol=1e-15))

    def levels(self, region):
        """The confidence levels of `region` under the valid and nonconservative measures"""
        region = as_region(region)
        return self.valid.prob(region), self.nonconservative.prob(region)

    def metalevel(self, region):
        """
        The confidence metalevel of a region: the interval between its two confidence levels

        Parameters
        ----------
        region: Region or Interval or float or tuple

        Returns
        -------
        ProbabilityInterval
        """
        p_valid, p_nonconservative = self.levels(region)
        return ProbabilityInterval(min(p_valid, p_nonconservative), max(p_valid, p_nonconservative))

    def lower_probability(self, region):
        return self.metalevel(region).lo

    def upper_probability(self, region):
        return self.metalevel(region).hi

    def indeterminacy(self, region):
        """The width of the metalevel of `region`"""
        return self.metalevel(region).width

    def reduce_mixture(self, D):
        """
        Collapse to the single measure (1 - D) P_valid + D P_nonconservative

        Parameters
        ----------
        D: float
            The mixing weight of the nonconservative member, in [0, 1]

        Returns
        -------
        ConfidenceMeasure
        """
        if not 0. <= D <= 1.:
            raise ArgumentError("The mixing weight must lie in [0, 1], got {}".format(D))
        if D == 0. or self.valid is self.nonconservative:
            return self.valid
        if D == 1.:
            return self.nonconservative
        valid, nonconservative = self.valid, self.nonconservative

        def cdf(theta):
            return (1. - D) * valid.cdf_function(theta) + D * nonconservative.cdf_function(theta)

        density = None
        if valid.has_density and nonconservative.has_density:
            def density(theta):
                return (1. - D) * valid._density(theta) + D * nonconservative._density(theta)

        return ConfidenceMeasure(cdf, self.domain, density=density,
                                 max_moment=min(valid.max_moment, nonconservative.max_moment),
                                 name="{:g} x {} + {:g} x {}".format(1. - D, valid.name, D, nonconservative.name),
                                 tol=valid.tol)

    def reduce_convex_mean(self):
        """The mean of the convex family of mixtures, which is the equal-weight mixture"""
        return self.reduce_mixture(0.5)

    def duality_check(self, regions, disjoint_pairs=None):
        """
        Check the metalevel end points are a coherent pair of lower and upper probabilities: lo(A) and
        hi(complement of A) sum to one, lo is superadditive and hi is subadditive.

        Parameters
        ----------
        regions: list of Region
            The regions to check the duality identity on
        disjoint_pairs: list of (Region, Region), optional
            Pairs of disjoint regions to check super/subadditivity on. By default each region with more than
            one piece is split into its first piece and the rest.

        Returns
        -------
        DualityReport
        """
        regions = [as_region(r) for r in regions]
        duality = 0.
        for region in regions:
            lo = self.lower_probability(region)
            hi_complement = self.upper_probability(region.complement(self.domain))
            duality = max(duality, abs(lo + hi_complement - 1.))

        if disjoint_pairs is None:
            disjoint_pairs = [(Region(r.pieces[:1]), Region(r.pieces[1:])) for r in regions if len(r) > 1]
        superadditivity, subadditivity = 0., 0.
        for a, b in disjoint_pairs:
            a, b = as_region(a), as_region(b)
            both = self.metalevel(a.union(b))
            first, second = self.metalevel(a), self.metalevel(b)
            superadditivity = max(superadditivity, first.lo + second.lo - both.lo)
            subadditivity = max(subadditivity, both.hi - first.hi - second.hi)

        report = DualityReport(duality, superadditivity, subadditivity, len(regions), len(disjoint_pairs))
        logger.info("Duality check over %d regions and %d pairs: max violation %g", report.n_regions,
                    report.n_pairs, report.max_violation)
        return report

    def __repr__(self):
        return "ConfidenceMetameasure(valid={}, nonconservative={})".format(self.valid.name, self.nonconservative.name)
