"""
Loss-based decisions with confidence measures and metameasures: expected losses, expectation intervals,
dominance between actions and the betting-odds rule for accepting a hypothesis.
"""
from abc import ABC, abstractmethod
from dataclasses import dataclass
import logging
import warnings

import numpy as np

from .exceptions import ArgumentError, MomentError
from .numerics import MonteCarloEstimate, SeededStream
from .regions import as_region

logger = logging.getLogger(__name__)

DEFAULT_MONTE_CARLO_DRAWS = 100000


class LossFunction(ABC):
    """
    The loss incurred by an action as a function of the parameter.

    See the `API documentation <../api.html#lossfunction>`_ for a list of concrete
    classes implementing this interface.

    Attributes
    ----------
    smooth: bool
        Whether quadrature can be trusted for the expectation. Non-smooth losses without an exact expectation
        are integrated by Monte Carlo.
    exact: bool
        Whether the loss computes its own expectation without numerical integration
    integrability_hint: str
        A free-text description of the conditions for the expected loss to be finite
    moment_order: float
        The loss grows like |theta|^moment_order, so its expectation needs a measure with moments beyond this
        order
    """

    smooth = True
    exact = False
    integrability_hint = ''
    moment_order = 0.

    @abstractmethod
    def evaluate(self, theta):
        pass

    def __call__(self, theta):
        return self.evaluate(theta)

    def evaluate_many(self, thetas):
        return np.vectorize(self.evaluate, otypes=[float])(thetas)

    def breaks(self):
        """Points where the loss is discontinuous or has a kink"""
        return ()

    def expectation(self, measure, tol=None):
        """The expected loss under `measure`, by quadrature"""
        if not measure.max_moment > self.moment_order:
            raise MomentError("{} needs a {}, which '{}' doesn't have".format(
                type(self).__name__, self.integrability_hint or 'finite moment', measure.name))
        return measure.expect(self.evaluate, tol, breaks=self.breaks())


class ConstantLoss(LossFunction):
    """A loss which doesn't depend on the parameter"""

    exact = True

    def __init__(self, value):
        self.value = float(value)

    def evaluate(self, theta):
        return self.value

    def expectation(self, measure, tol=None):
        return self.value


class IndicatorLoss(LossFunction):
    """
    A loss of `value` when the parameter lies in `region` and nothing otherwise, e.g. the loss of rejecting a
    true hypothesis
    """

    exact = True
    smooth = False

    def __init__(self, region, value=1.):
        self.region = as_region(region)
        self.value = float(value)

    def evaluate(self, theta):
        return self.value if self.region.contains(theta) else 0.

    def breaks(self):
        return tuple(e for p in self.region for e in (p.lo, p.hi))

    def expectation(self, measure, tol=None):
        return self.value * measure.prob(self.region)


class ZeroOneLoss(IndicatorLoss):
    """A loss of one unless the parameter lies in `region`, e.g. the loss of accepting a false hypothesis"""

    def __init__(self, region):
        super().__init__(region, 1.)

    def evaluate(self, theta):
        return 0. if self.region.contains(theta) else 1.

    def expectation(self, measure, tol=None):
        return 1. - measure.prob(self.region)


class SquaredErrorLoss(LossFunction):
    """Squared error of estimating the parameter by `estimate`"""

    integrability_hint = 'finite second moment'
    moment_order = 2.

    def __init__(self, estimate=0.):
        self.estimate = float(estimate)

    def evaluate(self, theta):
        return (theta - self.estimate) ** 2

    def evaluate_many(self, thetas):
        return np.square(np.asarray(thetas) - self.estimate)


class AbsoluteErrorLoss(LossFunction):
    """Absolute error of estimating the parameter by `estimate`"""

    integrability_hint = 'finite first moment'
    moment_order = 1.

    def __init__(self, estimate=0.):
        self.estimate = float(estimate)

    def evaluate(self, theta):
        return abs(theta - self.estimate)

    def evaluate_many(self, thetas):
        return np.abs(np.asarray(thetas) - self.estimate)

    def breaks(self):
        return (self.estimate,)


class PiecewiseConstantLoss(LossFunction):
    """
    A loss which is constant on each of a list of disjoint regions (and `default` elsewhere). The expectation
    is the sum of the region levels weighted by the values.

    Parameters
    ----------
    regions: list of Region
        Disjoint regions
    values: list of float
        The loss on each region
    default: float
        The loss outside all of the regions
    """

    exact = True
    smooth = False

    def __init__(self, regions, values, default=0.):
        if len(regions) != len(values):
            raise ArgumentError("Need one value per region, got {} regions and {} values".format(
                len(regions), len(values)))
        self.regions = [as_region(r) for r in regions]
        self.values = [float(v) for v in values]
        self.default = float(default)
        union = self.regions[0] if self.regions else None
        for r in self.regions[1:]:
            # Raises if the regions overlap
            union = union.union(r)
        self._union = union

    def evaluate(self, theta):
        for region, value in zip(self.regions, self.values):
            if region.contains(theta):
                return value
        return self.default

    def breaks(self):
        return tuple(e for r in self.regions for p in r for e in (p.lo, p.hi))

    def expectation(self, measure, tol=None):
        levels = [measure.prob(r) for r in self.regions]
        rest = 1. - measure.prob(self._union) if self._union is not None else 1.
        return float(np.dot(levels, self.values) + self.default * rest)


class CallableLoss(LossFunction):
    """
    Wrap an arbitrary scalar function as a loss

    Parameters
    ----------
    fn: callable
        The loss as a function of the parameter
    smooth: bool
        Whether quadrature should be used for its expectation (otherwise Monte Carlo)
    breaks: list of float
        Points where `fn` is discontinuous
    integrability_hint: str
    """

    def __init__(self, fn, smooth=True, breaks=(), integrability_hint=''):
        self.fn = fn
        self.smooth = smooth
        self._breaks = tuple(breaks)
        self.integrability_hint = integrability_hint

    def evaluate(self, theta):
        return float(self.fn(theta))

    def breaks(self):
        return self._breaks


@dataclass(frozen=True)
class Action:
    """
    An action together with its loss

    Attributes
    ----------
    id: int
        An ordinal identifier, unique within a set of actions. Ties are broken towards lower ids.
    loss: LossFunction
    label: str
    """
    id: int
    loss: LossFunction
    label: str = ''


@dataclass(frozen=True)
class ExpectationInterval:
    """
    The closed interval of expected losses over the measures of a metameasure

    Attributes
    ----------
    lo: float
    hi: float
    """
    lo: float
    hi: float

    @property
    def width(self):
        return self.hi - self.lo


def monte_carlo_expected_loss(measure, loss, stream=None, n_draws=DEFAULT_MONTE_CARLO_DRAWS):
    """
    Estimate an expected loss from draws of the measure

    Parameters
    ----------
    measure: ConfidenceMeasure
    loss: LossFunction
    stream: SeededStream
    n_draws: int

    Returns
    -------
    MonteCarloEstimate
    """
    stream = stream if stream is not None else SeededStream()
    draws = measure.sample(n_draws, stream).values
    return MonteCarloEstimate.from_draws(loss.evaluate_many(draws))


def expected_loss(measure, loss, stream=None, n_draws=DEFAULT_MONTE_CARLO_DRAWS, tol=None):
    """
    The expected loss under a confidence measure.

    Losses with an exact expectation (constants, indicators, piecewise constants) use it, smooth losses are
    integrated by quadrature and anything else by seeded Monte Carlo.

    Parameters
    ----------
    measure: ConfidenceMeasure
    loss: LossFunction
    stream: SeededStream
        The random stream for the Monte Carlo fallback
    n_draws: int
        The number of Monte Carlo draws
    tol: ToleranceConfig
        Quadrature tolerances

    Returns
    -------
    float

    Raises
    ------
    MomentError
        If the expected loss doesn't exist or the integral doesn't converge
    """
    if loss.exact or loss.smooth:
        return float(loss.expectation(measure, tol))
    estimate = monte_carlo_expected_loss(measure, loss, stream, n_draws)
    warnings.warn("Expected loss of a non-smooth loss estimated by Monte Carlo: {:.6g} +/- {:.2g}".format(
        estimate.value, estimate.std_error))
    return estimate.value


def expectation_interval(mm, loss, **kwargs):
    """
    The smallest closed interval containing the expected loss under every mixture of the two members of a
    metameasure. The expected loss is affine in the mixing weight, so the ends are attained by the members.

    Parameters
    ----------
    mm: ConfidenceMetameasure
    loss: LossFunction
    kwargs: dict
        Passed through to :func:`expected_loss`

    Returns
    -------
    ExpectationInterval
    """
    first = expected_loss(mm.valid, loss, **kwargs)
    if mm.valid is mm.nonconservative:
        return ExpectationInterval(first, first)
    second = expected_loss(mm.nonconservative, loss, **kwargs)
    return ExpectationInterval(min(first, second), max(first, second))


def _interval_dominates(first, second):
    return first.hi <= second.lo and first.lo < second.hi


def dominates(a, b, mm, **kwargs):
    """
    Whether action `a` dominates `b`: every expected loss of `a` is at most every expected loss of `b` and at
    least one pair is strictly ordered

    Parameters
    ----------
    a, b: Action
    mm: ConfidenceMetameasure

    Returns
    -------
    bool
    """
    return _interval_dominates(expectation_interval(mm, a.loss, **kwargs), expectation_interval(mm, b.loss, **kwargs))


def _check_actions(actions):
    if len(actions) == 0:
        raise ArgumentError("Need at least one action")
    ids = [a.id for a in actions]
    if len(set(ids)) != len(ids):
        raise ArgumentError("Action ids must be unique, got {}".format(ids))


def non_dominated_set(actions, mm, **kwargs):
    """
    The actions not dominated by any other, in their input order

    Parameters
    ----------
    actions: list of Action
    mm: ConfidenceMetameasure

    Returns
    -------
    list of Action
    """
    _check_actions(actions)
    intervals = [expectation_interval(mm, a.loss, **kwargs) for a in actions]
    keep = [a for i, a in enumerate(actions)
            if not any(_interval_dominates(other, intervals[i]) for j, other in enumerate(intervals) if j != i)]
    logger.debug("%d of %d actions are non-dominated", len(keep), len(actions))
    return keep


def argmin_expected_loss(measure, actions, **kwargs):
    """
    The action with the smallest expected loss under `measure`, ties going to the lowest id

    Parameters
    ----------
    measure: ConfidenceMeasure
    actions: list of Action

    Returns
    -------
    Action
    """
    _check_actions(actions)
    losses = [expected_loss(measure, a.loss, **kwargs) for a in actions]
    best = min(range(len(actions)), key=lambda i: (losses[i], actions[i].id))
    return actions[best]


def betting_odds(measure, region):
    """The fair betting odds on `region`, prob / (1 - prob)"""
    p = measure.prob(region)
    return np.inf if p >= 1. else p / (1. - p)


def accept_hypothesis(measure, region, cost_benefit_ratio):
    """
    Accept a hypothesis if the fair betting odds on it are strictly greater than the ratio of the cost of
    wrongly accepting it to the benefit of rightly accepting it. Odds equal to the ratio lead to rejection.

    Parameters
    ----------
    measure: ConfidenceMeasure
    region: Region
        The hypothesis
    cost_benefit_ratio: float
        A positive ratio

    Returns
    -------
    bool
    """
    if not cost_benefit_ratio > 0:
        raise ArgumentError("The cost-benefit ratio must be positive, got {}".format(cost_benefit_ratio))
    p = measure.prob(region)
    if p >= 1.:
        return True
    if p <= 0.:
        return False
    return p / (1. - p) > cost_benefit_ratio
