"""
Combine independent confidence measures (or p-value functions) into a single confidence measure by
combining their CDFs pointwise in the parameter.
"""
import logging
import warnings

import numpy as np
from scipy import special, stats

from .exceptions import ArgumentError, CapabilityError
from .confidence_measure import ConfidenceMeasure

logger = logging.getLogger(__name__)

# Grid sizes for the strict-increase check on the inputs and the monotonicity check on Fisher's rule
INPUT_GRID_SIZE = 1000
FISHER_GRID_SIZE = 10000
# CDF values within this distance of 0 or 1 are in the tails, where rounding flattens the CDF
TAIL_TOLERANCE = 1e-12


def _bulk_steps(values):
    """The steps of a tabulated CDF between grid points which both lie in its bulk"""
    bulk = (values[:-1] > TAIL_TOLERANCE) & (values[1:] < 1. - TAIL_TOLERANCE)
    return np.diff(values)[bulk]


class CombinationRule:
    """
    A rule for combining k CDF values into one

    Parameters
    ----------
    kind: {'inverse_normal', 'fisher'}
        Inverse-normal (Stouffer) combination Phi(sum w_i Phi^-1(F_i) / sqrt(sum w_i^2)), or Fisher's
        chi-squared combination of -2 sum log(1 - F_i) with 2k degrees of freedom
    weights: list of float, optional
        Positive weights (inverse_normal only). Defaults to equal weights.
    """

    kinds = ('inverse_normal', 'fisher')

    def __init__(self, kind='inverse_normal', weights=None):
        if kind not in self.kinds:
            raise ArgumentError("Unknown combination rule '{}', must be one of {}".format(kind, self.kinds))
        if weights is not None:
            if kind != 'inverse_normal':
                raise ArgumentError("Weights are only supported by the inverse_normal rule")
            weights = np.asarray(weights, dtype=float)
            if weights.ndim != 1 or np.any(~(weights > 0)) or np.any(~np.isfinite(weights)):
                raise ArgumentError("Weights must be a list of positive numbers, got {}".format(weights))
        self.kind = kind
        self.weights = weights

    def _weights(self, k):
        if self.weights is None:
            return np.ones(k)
        if len(self.weights) != k:
            raise ArgumentError("Got {} weights for {} inputs".format(len(self.weights), k))
        return self.weights

    def combine_values(self, values):
        """
        Combine CDF values

        Parameters
        ----------
        values: array_like of shape (k, ...)
            The CDF of each of the k inputs

        Returns
        -------
        ndarray
            The combined CDF values
        """
        values = np.clip(np.asarray(values, dtype=float), 0., 1.)
        k = values.shape[0]
        with np.errstate(divide='ignore', invalid='ignore'):
            if self.kind == 'inverse_normal':
                w = self._weights(k).reshape((k,) + (1,) * (values.ndim - 1))
                # Use the smaller tail for accuracy far out in the upper tail
                z = np.where(values < 0.5, special.ndtri(values), -special.ndtri(1. - values))
                res = special.ndtr(np.sum(w * z, axis=0) / np.sqrt(np.sum(np.square(w))))
            else:
                s = -2. * np.sum(np.log1p(-values), axis=0)
                res = special.chdtr(2 * k, s)
        return np.clip(res, 0., 1.)

    def combine_densities(self, values, densities):
        """The derivative of the combined CDF, given the CDF values and densities of the inputs"""
        values = np.clip(np.asarray(values, dtype=float), 0., 1.)
        densities = np.asarray(densities, dtype=float)
        k = values.shape[0]
        with np.errstate(divide='ignore', invalid='ignore'):
            if self.kind == 'inverse_normal':
                w = self._weights(k).reshape((k,) + (1,) * (values.ndim - 1))
                z = np.where(values < 0.5, special.ndtri(values), -special.ndtri(1. - values))
                norm = np.sqrt(np.sum(np.square(w)))
                zc = np.sum(w * z, axis=0) / norm
                res = stats.norm.pdf(zc) * np.sum(w * densities / stats.norm.pdf(z), axis=0) / norm
            else:
                s = -2. * np.sum(np.log1p(-values), axis=0)
                res = stats.chi2.pdf(s, 2 * k) * np.sum(2. * densities / (1. - values), axis=0)
        return np.where(np.isfinite(res), res, 0.)

    def __repr__(self):
        return "CombinationRule('{}')".format(self.kind)


def _check_grid(measures):
    """A grid spanning the bulk of every input measure"""
    ends = []
    for m in measures:
        ends.append(m._endpoint_quantile(max(1e-6, m.cdf_lo + 1e-6)))
        ends.append(m._endpoint_quantile(min(1. - 1e-6, m.cdf_hi - 1e-6)))
    ends = [e for e in ends if np.isfinite(e)]
    domain = measures[0].domain
    lo = max(min(ends), domain.lo) if ends else domain.lo
    hi = min(max(ends), domain.hi) if ends else domain.hi
    return lo, hi


def combine(measures, rule=None):
    """
    Combine independent confidence measures on a common domain into one

    Parameters
    ----------
    measures: list of ConfidenceMeasure
        The measures to combine. A single measure is returned unchanged.
    rule: CombinationRule
        Defaults to the equal-weight inverse-normal rule

    Returns
    -------
    ConfidenceMeasure

    Raises
    ------
    ArgumentError
        If no measures are given or their domains differ
    CapabilityError
        If any input CDF isn't strictly increasing, or Fisher's rule produced a decreasing CDF
    """
    measures = list(measures)
    rule = rule if rule is not None else CombinationRule()
    if len(measures) == 0:
        raise ArgumentError("Need at least one measure to combine")
    rule._weights(len(measures))
    if len(measures) == 1:
        return measures[0]

    domain = measures[0].domain
    for m in measures[1:]:
        if m.domain != domain:
            raise ArgumentError("Can only combine measures on a common domain, got {} and {}".format(
                domain, m.domain))

    lo, hi = _check_grid(measures)
    if not lo < hi:
        raise CapabilityError("The input measures have no common support to combine over")
    grid = np.linspace(lo, hi, INPUT_GRID_SIZE)
    for m in measures:
        values = np.clip(m.cdf_function(grid), 0., 1.)
        if not m.cdf_hi > m.cdf_lo or not np.all(_bulk_steps(values) > 0.):
            raise CapabilityError("The CDF of '{}' isn't strictly increasing so can't be combined".format(m.name))

    cdfs = [m.cdf_function for m in measures]

    def cdf(theta):
        theta = np.asarray(theta, dtype=float)
        return rule.combine_values(np.stack([np.broadcast_to(f(theta), theta.shape) for f in cdfs]))

    density = None
    if all(m.has_density for m in measures):
        densities = [m._density for m in measures]

        def density(theta):
            theta = np.asarray(theta, dtype=float)
            return rule.combine_densities(np.stack([np.broadcast_to(f(theta), theta.shape) for f in cdfs]),
                                          np.stack([np.broadcast_to(d(theta), theta.shape) for d in densities]))

    if rule.kind == 'fisher':
        values = cdf(np.linspace(lo, hi, FISHER_GRID_SIZE))
        if np.any(np.diff(values) < -TAIL_TOLERANCE):
            raise CapabilityError("Fisher's rule produced a decreasing CDF for these inputs")
        if np.any(_bulk_steps(values) <= 0.):
            warnings.warn("Fisher's rule produced flat stretches in the combined CDF; check the inputs overlap")

    name = " + ".join(m.name for m in measures)
    logger.info("Combined %d measures with %r", len(measures), rule)
    return ConfidenceMeasure(cdf, domain, density=density, max_moment=min(m.max_moment for m in measures),
                             name="{}({})".format(rule.kind, name), tol=measures[0].tol)


class CombinationSimulator:
    """
    Simulates the combined p-value at the true parameter for independent data sets from several families, so
    a combination can be checked with :func:`confdec.pvalue_functions.exactness_audit`.

    Parameters
    ----------
    components: list of (type, dict)
        The p-value family (anything with a `simulate_pvalues` method) and its design for each input
    rule: CombinationRule
    """

    def __init__(self, components, rule=None):
        if len(components) == 0:
            raise ArgumentError("Need at least one component")
        for family, _ in components:
            if getattr(family, 'simulate_pvalues', None) is None:
                raise CapabilityError("{!r} can't simulate data".format(family))
        self.components = list(components)
        self.rule = rule if rule is not None else CombinationRule()

    def simulate_pvalues(self, theta, nuisance, size, rng):
        pvalues = np.stack([family.simulate_pvalues(theta, nuisance, size, rng, **design)
                            for family, design in self.components])
        return self.rule.combine_values(pvalues)

    def __repr__(self):
        return "CombinationSimulator({} components, {!r})".format(len(self.components), self.rule)
