"""
Regions of the parameter line: finite unions of disjoint intervals, each end of which may be open or closed.
"""
from dataclasses import dataclass
import numpy as np

from .exceptions import ArgumentError


@dataclass(frozen=True)
class Interval:
    """
    A single interval of the real line. Infinite ends are always open.

    Attributes
    ----------
    lo: float
        The lower end point (may be -inf)
    hi: float
        The upper end point (may be +inf)
    lo_open: bool
        Whether `lo` is excluded
    hi_open: bool
        Whether `hi` is excluded
    """
    lo: float
    hi: float
    lo_open: bool = False
    hi_open: bool = False

    def __post_init__(self):
        if np.isnan(self.lo) or np.isnan(self.hi):
            raise ArgumentError("Interval end points can't be NaN")
        object.__setattr__(self, 'lo', float(self.lo))
        object.__setattr__(self, 'hi', float(self.hi))
        if np.isinf(self.lo):
            object.__setattr__(self, 'lo_open', True)
        if np.isinf(self.hi):
            object.__setattr__(self, 'hi_open', True)

    @property
    def is_empty(self):
        return self.lo > self.hi or (self.lo == self.hi and (self.lo_open or self.hi_open))

    @property
    def width(self):
        return max(self.hi - self.lo, 0.)

    def contains(self, theta):
        above = theta > self.lo if self.lo_open else theta >= self.lo
        below = theta < self.hi if self.hi_open else theta <= self.hi
        return bool(above and below)

    def intersect(self, other):
        """The intersection with another Interval (possibly empty)"""
        if self.lo > other.lo:
            lo, lo_open = self.lo, self.lo_open
        elif self.lo < other.lo:
            lo, lo_open = other.lo, other.lo_open
        else:
            lo, lo_open = self.lo, self.lo_open or other.lo_open
        if self.hi < other.hi:
            hi, hi_open = self.hi, self.hi_open
        elif self.hi > other.hi:
            hi, hi_open = other.hi, other.hi_open
        else:
            hi, hi_open = self.hi, self.hi_open or other.hi_open
        if lo > hi:
            # Normalise all empty intersections to the same (open) degenerate interval
            return Interval(lo, lo, True, True)
        return Interval(lo, hi, lo_open, hi_open)

    def is_subset_of(self, other):
        return self.is_empty or self.intersect(other) == self

    def __str__(self):
        return "{}{:g}, {:g}{}".format('(' if self.lo_open else '[', self.lo, self.hi, ')' if self.hi_open else ']')


class Region:
    """
    A finite union of pairwise disjoint intervals, sorted by their lower end points. Empty pieces are dropped
    on construction.

    Parameters
    ----------
    pieces: list of Interval
        The (disjoint) pieces of the region

    Raises
    ------
    ArgumentError
        If any two pieces overlap
    """

    def __init__(self, pieces=()):
        pieces = sorted((p for p in pieces if not p.is_empty), key=lambda p: (p.lo, p.lo_open))
        for left, right in zip(pieces[:-1], pieces[1:]):
            if left.hi > right.lo or (left.hi == right.lo and not (left.hi_open or right.lo_open)):
                raise ArgumentError("Region pieces {} and {} overlap".format(left, right))
        self._pieces = tuple(pieces)

    @classmethod
    def interval(cls, lo, hi, lo_open=False, hi_open=False):
        return cls([Interval(lo, hi, lo_open, hi_open)])

    @classmethod
    def point(cls, theta):
        return cls([Interval(theta, theta)])

    @classmethod
    def whole(cls, domain):
        return cls([domain])

    @property
    def pieces(self):
        return self._pieces

    @property
    def is_empty(self):
        return len(self._pieces) == 0

    def contains(self, theta):
        return any(p.contains(theta) for p in self._pieces)

    def intersect(self, interval):
        """Clip every piece to `interval`"""
        return Region([p.intersect(interval) for p in self._pieces])

    def is_subset_of(self, domain):
        return all(p.is_subset_of(domain) for p in self._pieces)

    def complement(self, domain):
        """
        The complement of this region within `domain`

        Parameters
        ----------
        domain: Interval
            The parameter space

        Returns
        -------
        Region
        """
        gaps = []
        cursor, cursor_open = domain.lo, domain.lo_open
        for piece in self.intersect(domain).pieces:
            gaps.append(Interval(cursor, piece.lo, cursor_open, not piece.lo_open))
            cursor, cursor_open = piece.hi, not piece.hi_open
        gaps.append(Interval(cursor, domain.hi, cursor_open, domain.hi_open))
        return Region(gaps)

    def covers(self, domain):
        return self.complement(domain).is_empty

    def union(self, other):
        """The union with a disjoint region"""
        return Region(self._pieces + as_region(other).pieces)

    def is_disjoint_from(self, other):
        try:
            self.union(other)
        except ArgumentError:
            return False
        return True

    def __iter__(self):
        return iter(self._pieces)

    def __len__(self):
        return len(self._pieces)

    def __eq__(self, other):
        return isinstance(other, Region) and self._pieces == other.pieces

    def __hash__(self):
        return hash(self._pieces)

    def __repr__(self):
        return "Region({})".format(" U ".join(str(p) for p in self._pieces) or "{}")


def _parse_region_string(text):
    try:
        lo, hi = (float(v) for v in text.split(','))
    except ValueError:
        raise ArgumentError("Region must be given as 'lo,hi', got '{}'".format(text)) from None
    if lo > hi:
        raise ArgumentError("Region lower end {} exceeds upper end {}".format(lo, hi))
    return Region.interval(lo, hi)


def as_region(region):
    """
    Utility function for converting the different ways of describing a region into a :class:`Region`.

    Parameters
    ----------
    region: Region or Interval or str or float or tuple or list
        A Region (returned as is), a single Interval, a string 'lo,hi' (closed interval), a scalar (a point),
        a (lo, hi) pair (closed interval) or a list of Intervals / pairs

    Returns
    -------
    Region
    """
    if isinstance(region, Region):
        return region
    elif isinstance(region, Interval):
        return Region([region])
    elif isinstance(region, str):
        return _parse_region_string(region)
    elif np.isscalar(region):
        return Region.point(region)
    elif isinstance(region, tuple) and len(region) == 2 and all(np.isscalar(v) for v in region):
        return Region.interval(*region)
    elif isinstance(region, (list, tuple)):
        pieces = [p if isinstance(p, Interval) else Interval(*p) for p in region]
        return Region(pieces)
    else:
        raise ArgumentError("Can't interpret {!r} as a region".format(region))
