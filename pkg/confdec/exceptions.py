"""
Errors raised by confdec.

Every error derives from :class:`ConfDecError` and from the builtin exception
that best describes it, so ``except ValueError`` keeps working for callers that
don't care about the distinction. The ``exit_code`` is used by the command line
interface: 2 for bad input, 3 for numerical failures.
"""


class ConfDecError(Exception):
    """Base class for all confdec errors"""
    exit_code = 1


class ParameterDomainError(ConfDecError, ValueError):
    """A distribution or family parameter is outside its admissible range"""
    exit_code = 2


class ArgumentError(ConfDecError, ValueError):
    """An argument is malformed (empty, wrong length, out of order...)"""
    exit_code = 2


class DomainError(ConfDecError, ValueError):
    """A parameter value or region lies outside the parameter space"""
    exit_code = 2


class InversionRangeError(ConfDecError, ValueError):
    """
    The requested level can't be attained by a monotone function.

    Attributes
    ----------
    target: float
        The level which was requested
    lowest: float
        The smallest value attained over the domain
    highest: float
        The largest value attained over the domain
    """
    exit_code = 3

    def __init__(self, target, lowest, highest):
        self.target = target
        self.lowest = lowest
        self.highest = highest
        super().__init__("Level {} is outside the attainable range [{}, {}]".format(target, lowest, highest))


class AccuracyError(ConfDecError, ArithmeticError):
    """
    A numerical routine didn't reach the requested accuracy.

    Attributes
    ----------
    estimate: float
        The best estimate available when the routine gave up
    """
    exit_code = 3

    def __init__(self, message, estimate=None):
        self.estimate = estimate
        super().__init__(message)


class MomentError(ConfDecError, ArithmeticError):
    """A requested moment doesn't exist (or the integral diverges)"""
    exit_code = 3


class MultimodalityError(ConfDecError, ArithmeticError):
    """The density has no unique maximum"""
    exit_code = 3


class CapabilityError(ConfDecError, NotImplementedError):
    """The object doesn't support the requested operation"""
    exit_code = 3


class SamplingRefusedError(ConfDecError, ValueError):
    """Sampling was refused because too much confidence mass is missing"""
    exit_code = 3
