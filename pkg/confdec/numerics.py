"""
Deterministic numerical building blocks: special CDFs, inversion of monotone
functions, adaptive quadrature and seeded random streams.

Everything here is pure (apart from the state held by a :class:`SeededStream`)
so can be shared between threads.
"""
from dataclasses import dataclass
import logging

import numpy as np
from scipy import special, integrate as sp_integrate

from .exceptions import ParameterDomainError, ArgumentError, InversionRangeError, AccuracyError

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class ToleranceConfig:
    """
    Numerical tolerances shared by the inversion and quadrature routines

    Attributes
    ----------
    abs_tol: float
        Absolute tolerance
    rel_tol: float
        Relative tolerance
    max_iter: int
        Maximum number of iterations (bisection steps, bracket expansions or quadrature sub-intervals)
    """
    abs_tol: float = 1e-12
    rel_tol: float = 1e-10
    max_iter: int = 200

    def __post_init__(self):
        if not self.abs_tol > 0:
            raise ParameterDomainError("abs_tol must be positive, got {}".format(self.abs_tol))
        if not self.rel_tol > 0:
            raise ParameterDomainError("rel_tol must be positive, got {}".format(self.rel_tol))
        if int(self.max_iter) != self.max_iter or self.max_iter < 1:
            raise ParameterDomainError("max_iter must be a positive integer, got {}".format(self.max_iter))


DEFAULT_TOLERANCE = ToleranceConfig()


@dataclass(frozen=True)
class MonteCarloEstimate:
    """
    A Monte Carlo estimate together with its standard error

    Attributes
    ----------
    value: float
    std_error: float
    n_draws: int
    """
    value: float
    std_error: float
    n_draws: int

    @classmethod
    def from_draws(cls, draws):
        draws = np.asarray(draws, dtype=float)
        return cls(float(np.mean(draws)), float(np.std(draws, ddof=1) / np.sqrt(draws.size)), int(draws.size))

    def __float__(self):
        return self.value


class SeededStream:
    """
    A reproducible stream of random numbers.

    Two streams constructed with the same `seed` and `stream_index` produce bitwise identical draws. Independent
    child streams (e.g. one per block of replicates) are obtained with :meth:`derive`. Streams hold state and
    shouldn't be shared between concurrent tasks.

    Attributes
    ----------
    seed: int
        A 64-bit unsigned integer seed
    stream_index: int
        The index of this stream amongst those sharing `seed`
    rng: numpy.random.Generator
        The underlying generator
    """

    def __init__(self, seed=42, stream_index=0, _spawn_path=()):
        if int(seed) != seed or not 0 <= seed < 2 ** 64:
            raise ParameterDomainError("seed must be a 64-bit unsigned integer, got {}".format(seed))
        if int(stream_index) != stream_index or stream_index < 0:
            raise ParameterDomainError("stream_index must be a non-negative integer, got {}".format(stream_index))
        self.seed = int(seed)
        self.stream_index = int(stream_index)
        self._spawn_path = tuple(int(i) for i in _spawn_path)
        seed_seq = np.random.SeedSequence(self.seed, spawn_key=(self.stream_index,) + self._spawn_path)
        self.rng = np.random.default_rng(seed_seq)

    def derive(self, index):
        """
        Return an independent child stream. The child depends only on this stream's seed, index and `index`,
        not on how many numbers have already been drawn.
        """
        return SeededStream(self.seed, self.stream_index, self._spawn_path + (index,))

    def uniform(self, low=0., high=1., size=None):
        return self.rng.uniform(low, high, size)

    def normal(self, loc=0., scale=1., size=None):
        return self.rng.normal(loc, scale, size)

    def __repr__(self):
        return "SeededStream(seed={}, stream_index={}, path={})".format(self.seed, self.stream_index,
                                                                       self._spawn_path)


def _check_df(df):
    if df is None or int(df) != df or df < 1:
        raise ParameterDomainError("Degrees of freedom must be a positive integer, got {}".format(df))
    return int(df)


def binomial_upper_tail(x, n, theta):
    """
    P(X > x) for X ~ Binomial(n, theta), vectorised over `x` and `theta`.

    The regularized incomplete beta function gives the tail directly without summing the pmf, so small tails
    keep their full relative accuracy.
    """
    x = np.floor(np.asarray(x, dtype=float))
    theta = np.asarray(theta, dtype=float)
    inner = (x >= 0) & (x < n)
    k = np.where(inner, x, 0.)
    with np.errstate(invalid='ignore'):
        tail = special.bdtrc(k, n, np.clip(theta, 0., 1.)) if n > 0 else np.zeros(np.broadcast(k, theta).shape)
    tail = np.where(theta <= 0., 0., np.where(theta >= 1., 1., tail))
    out = np.where(x < 0, 1., np.where(inner, tail, 0.))
    return np.clip(out, 0., 1.)


def special_cdf(kind, arg, df=None, n=None, theta=None):
    """
    Evaluate one of the distribution functions used by the built-in p-value families.

    Parameters
    ----------
    kind: {'std_normal', 'student_t', 'chi_squared', 'binomial_tail'}
        The distribution function to evaluate
    arg: float or array_like
        The argument. For 'binomial_tail' this is the (integer) number of successes x.
    df: int
        Degrees of freedom (student_t and chi_squared only)
    n: int
        Number of trials (binomial_tail only)
    theta: float
        Success probability (binomial_tail only)

    Returns
    -------
    float or ndarray
        The CDF at `arg`, or P(X > arg) for 'binomial_tail', clipped to [0, 1]
    """
    arg_arr = np.asarray(arg, dtype=float)
    if kind == 'std_normal':
        res = special.ndtr(arg_arr)
    elif kind == 'student_t':
        res = special.stdtr(_check_df(df), arg_arr)
    elif kind == 'chi_squared':
        with np.errstate(invalid='ignore'):
            res = np.where(arg_arr <= 0., 0., special.chdtr(_check_df(df), np.maximum(arg_arr, 0.)))
    elif kind == 'binomial_tail':
        if n is None or int(n) != n or n < 0:
            raise ParameterDomainError("Number of trials must be a non-negative integer, got {}".format(n))
        if theta is None or not 0. <= theta <= 1.:
            raise ParameterDomainError("Success probability must lie in [0, 1], got {}".format(theta))
        res = binomial_upper_tail(arg_arr, int(n), theta)
    else:
        raise ArgumentError("Unknown distribution kind: {}".format(kind))

    res = np.clip(res, 0., 1.)
    return float(res) if res.ndim == 0 else res


def _expand(f, start, direction, target, tol):
    """Step away from `start` (doubling) until f crosses `target`, returning the bracketing end point"""
    step = 1.
    for _ in range(tol.max_iter):
        point = start + direction * step
        value = f(point)
        if (direction < 0 and np.all(value < target)) or (direction > 0 and np.all(value >= target)):
            return point
        step *= 2.
    raise AccuracyError("Couldn't bracket level {} within {} expansions".format(target, tol.max_iter),
                        estimate=start + direction * step)


def invert_monotone_many(f, targets, lo, hi, tol=None):
    """
    Vectorised generalized inverse of a nondecreasing function.

    For each target t returns the smallest theta in [lo, hi] with f(theta) >= t (to within the bracket
    tolerance). A target equal to f(lo) returns `lo`; targets outside [f(lo), f(hi)] raise an
    :class:`InversionRangeError` carrying the attainable extremes. Infinite end points are allowed as long as
    `f` accepts them (returning its limits there).

    Parameters
    ----------
    f: callable
        Nondecreasing, vectorised function on [lo, hi]
    targets: array_like
        The levels to invert
    lo, hi: float
        The domain (may be infinite)
    tol: ToleranceConfig

    Returns
    -------
    ndarray
        The generalized inverse at each target (same shape as `targets`)
    """
    tol = tol or DEFAULT_TOLERANCE
    if not lo <= hi:
        raise ArgumentError("Empty domain [{}, {}]".format(lo, hi))
    targets = np.asarray(targets, dtype=float)
    f_lo, f_hi = float(f(lo)), float(f(hi))
    outside = (targets < f_lo) | (targets > f_hi) | np.isnan(targets)
    if np.any(outside):
        raise InversionRangeError(float(targets[outside].flat[0]), f_lo, f_hi)

    result = np.full(targets.shape, np.nan)
    at_lo = targets <= f_lo
    result[at_lo] = lo
    at_hi = ~at_lo & (targets >= f_hi) & np.isinf(hi)
    result[at_hi] = hi
    todo = ~(at_lo | at_hi)
    if not np.any(todo):
        return result

    t = targets[todo]
    centre = 0. if np.isinf(lo) and np.isinf(hi) else (hi if np.isinf(lo) else lo)
    a = lo if np.isfinite(lo) else _expand(f, min(centre, hi), -1., t.min(), tol)
    b = hi if np.isfinite(hi) else _expand(f, max(centre, lo), 1., t.max(), tol)

    left = np.full(t.shape, float(a))
    right = np.full(t.shape, float(b))
    for _ in range(tol.max_iter):
        width = right - left
        if np.all(width <= tol.rel_tol * np.maximum(1., np.abs(right))):
            break
        mid = left + width / 2.
        # f(left) < t <= f(right) is preserved, so right tends to the smallest solution
        below = np.asarray(f(mid)) < t
        left = np.where(below, mid, left)
        right = np.where(below, right, mid)
    else:
        raise AccuracyError("Bisection didn't converge in {} iterations".format(tol.max_iter), estimate=right)

    result[todo] = right
    return result


def invert_monotone(f, target, lo, hi, tol=None):
    """
    Invert a monotone function by guarded bisection.

    Parameters
    ----------
    f: callable
        A monotone (nondecreasing or nonincreasing) function on [lo, hi]
    target: float
        The level to invert
    lo, hi: float
        The domain (either may be infinite)
    tol: ToleranceConfig

    Returns
    -------
    float
        The smallest theta with f(theta) >= target (f nondecreasing), or with f(theta) <= target (f
        nonincreasing)

    Raises
    ------
    InversionRangeError
        If `target` can't be attained on [lo, hi]
    """
    if float(f(lo)) > float(f(hi)):
        try:
            return float(invert_monotone_many(lambda x: -np.asarray(f(x)), -target, lo, hi, tol))
        except InversionRangeError as err:
            raise InversionRangeError(target, -err.highest, -err.lowest) from None
    return float(invert_monotone_many(f, target, lo, hi, tol))


def integrate(f, a, b, tol=None, points=None):
    """
    Adaptive quadrature of `f` over [a, b], where either end point may be infinite.

    Parameters
    ----------
    f: callable
        A scalar function integrable over (a, b)
    a, b: float
        The limits of integration (a <= b)
    tol: ToleranceConfig
    points: list of float, optional
        Break points in a finite interval where the integrand is awkward (e.g. narrow peaks)

    Returns
    -------
    float
        The integral

    Raises
    ------
    AccuracyError
        If the error estimate exceeds max(abs_tol, rel_tol * |result|)
    """
    tol = tol or DEFAULT_TOLERANCE
    if not a <= b:
        raise ArgumentError("Lower limit {} exceeds upper limit {}".format(a, b))
    if a == b:
        return 0.

    kwargs = dict(epsabs=tol.abs_tol, epsrel=max(tol.rel_tol, 1e-14), limit=tol.max_iter, full_output=1)
    if points is not None and np.isfinite(a) and np.isfinite(b):
        kwargs['points'] = [p for p in points if a < p < b] or None
    res = sp_integrate.quad(f, a, b, **kwargs)
    value, abserr = res[0], res[1]
    allowed = max(tol.abs_tol, tol.rel_tol * abs(value))
    if len(res) > 3 and not abserr <= allowed:
        raise AccuracyError("Quadrature didn't converge ({}): estimated error {:g}".format(res[3], abserr),
                            estimate=value)
    if not np.isfinite(value):
        raise AccuracyError("Quadrature produced a non-finite value", estimate=value)
    logger.debug("Integrated over [%g, %g]: %g (error %g, %d evaluations)", a, b, value, abserr,
                 res[2].get('neval', -1))
    return float(value)
