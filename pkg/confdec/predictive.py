from abc import ABC, abstractmethod
import logging

import numpy as np

from .exceptions import ArgumentError, CapabilityError, MomentError, ParameterDomainError
from .numerics import MonteCarloEstimate, SeededStream

logger = logging.getLogger(__name__)

# Predictive probabilities within this distance below 1/2 still classify as 1
CLASSIFY_TOLERANCE = 1e-9


class SamplingModel(ABC):
    """
    A model generating a new observation given the interest parameter (and a fixed or plug-in value of any
    nuisance parameter).

    Attributes
    ----------
    observation_space: {'real', 'binary'}
        The space observations live in
    location_dependent: bool
        Whether observations depend on the parameter (so predictive moments need posterior moments)
    """

    observation_space = 'real'
    location_dependent = True

    @abstractmethod
    def simulate(self, theta, rng):
        """
        Draw one observation for each value in `theta`

        Parameters
        ----------
        theta: ndarray
            Parameter values
        rng: numpy.random.Generator

        Returns
        -------
        ndarray
            Observations with the same shape as `theta`
        """
        pass

    def conditional_mean(self, theta):
        raise CapabilityError("{} doesn't provide a conditional mean".format(type(self).__name__))

    def success_probability(self, theta):
        raise CapabilityError("{} doesn't have a binary observation space".format(type(self).__name__))


class NormalModel(SamplingModel):
    """
    Normal observations with mean theta and a fixed (known or plug-in) standard deviation

    Parameters
    ----------
    sigma: float
        The standard deviation
    """

    def __init__(self, sigma=1.):
        if not sigma > 0:
            raise ParameterDomainError("sigma must be positive, got {}".format(sigma))
        self.sigma = float(sigma)

    def simulate(self, theta, rng):
        theta = np.asarray(theta, dtype=float)
        return theta + self.sigma * rng.standard_normal(theta.shape)

    def conditional_mean(self, theta):
        return theta


class BernoulliModel(SamplingModel):
    """A single success (1) or failure (0) with success probability theta"""

    observation_space = 'binary'

    def simulate(self, theta, rng):
        theta = np.asarray(theta, dtype=float)
        return (rng.random(theta.shape) < theta).astype(int)

    def conditional_mean(self, theta):
        return theta

    def success_probability(self, theta):
        return min(max(theta, 0.), 1.)


class ConstantModel(SamplingModel):
    """Observations equal to `value` whatever the parameter"""

    location_dependent = False

    def __init__(self, value):
        self.value = float(value)

    def simulate(self, theta, rng):
        return np.full(np.shape(theta), self.value)

    def conditional_mean(self, theta):
        return self.value


class PredictiveDistribution:
    """
    The frequentist posterior predictive distribution: the mixture of the sampling model over the
    confidence measure, realised by compound sampling.

    Parameters
    ----------
    posterior: ConfidenceMeasure
        The confidence measure of the interest parameter
    model: SamplingModel
        The model for a new observation
    n_mix: int
        The number of compound draws used for Monte Carlo summaries
    """

    def __init__(self, posterior, model, n_mix=100000):
        if int(n_mix) != n_mix or n_mix < 2:
            raise ArgumentError("n_mix must be an integer of at least 2, got {}".format(n_mix))
        self.posterior = posterior
        self.model = model
        self.n_mix = int(n_mix)

    def sample(self, k, stream):
        """
        Draw `k` observations: a parameter value from the posterior, then an observation from the model.
        Both draws advance `stream`, so repeated calls give fresh observations.

        Parameters
        ----------
        k: int
        stream: SeededStream

        Returns
        -------
        ndarray
        """
        thetas = self.posterior.sample(k, stream).values
        return self.model.simulate(thetas, stream.rng)

    def mean(self, stream=None):
        """
        The Monte Carlo predictive mean (over `n_mix` compound draws) and its standard error

        Parameters
        ----------
        stream: SeededStream

        Returns
        -------
        MonteCarloEstimate

        Raises
        ------
        CapabilityError
            For a binary observation space (use :meth:`classify`)
        MomentError
            If the posterior has no mean
        """
        if self.model.observation_space != 'real':
            raise CapabilityError("The predictive mean needs a real-valued observation space; use classify()")
        if self.model.location_dependent and not self.posterior.max_moment > 1.:
            raise MomentError("The posterior '{}' has no mean so neither does the predictive".format(
                self.posterior.name))
        stream = stream if stream is not None else SeededStream()
        estimate = MonteCarloEstimate.from_draws(self.sample(self.n_mix, stream))
        logger.info("Predictive mean %.6g +/- %.2g from %d draws", estimate.value, estimate.std_error, self.n_mix)
        return estimate

    def success_probability(self):
        """The predictive probability of observing a 1"""
        if self.model.observation_space != 'binary':
            raise CapabilityError("Predictive success probabilities need a binary observation space")
        return self.posterior.expect(self.model.success_probability)

    def classify(self):
        """
        The point prediction for a binary observation: 1 if the predictive probability of a 1 is at least 1/2

        Returns
        -------
        int
        """
        return int(self.success_probability() >= 0.5 - CLASSIFY_TOLERANCE)


def predictive_sample(predictive, k, stream):
    """
    Draw `k` observations from a predictive distribution

    Parameters
    ----------
    predictive: PredictiveDistribution
    k: int
    stream: SeededStream
        Advanced by the draws

    Returns
    -------
    ndarray
    """
    return predictive.sample(k, stream)


def predictive_mean(predictive, stream=None):
    """
    The Monte Carlo predictive mean and its standard error, see :meth:`PredictiveDistribution.mean`

    Raises
    ------
    CapabilityError
        For a binary observation space
    MomentError
        If the posterior has no mean and the observations depend on the parameter
    """
    return predictive.mean(stream)


def classify(predictive):
    """The point prediction (0 or 1) for a binary observation, see :meth:`PredictiveDistribution.classify`"""
    return predictive.classify()
