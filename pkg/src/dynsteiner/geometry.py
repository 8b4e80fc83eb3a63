"""Grid points, exact dyadic coordinates, Euclidean distance, and the
multiplicity-tracking active set.

Grid points are plain tuples of 1-based integers inside ``[1, delta]^dim``.
Portal coordinates need sub-integer resolution, so they are represented as
exact dyadic rationals (:class:`DyadicPoint`); two portals from different
quadtree levels compare equal exactly when they denote the same point.
"""

from __future__ import annotations

import bisect
import math
from dataclasses import dataclass

GridPoint = tuple  # d integers, each in [1, delta]


class GridDomainError(ValueError):
    """A coordinate lies outside the configured grid."""


class InvalidOperationError(ValueError):
    """An update the active set cannot accept (e.g. deleting an absent point)."""


def validate_grid_point(point: GridPoint, delta: int, dim: int) -> GridPoint:
    """Check that ``point`` is a dim-tuple of integers in [1, delta]."""
    if len(point) != dim:
        raise GridDomainError(f"expected {dim} coordinates, got {len(point)}")
    for c in point:
        if not isinstance(c, int) or isinstance(c, bool):
            raise GridDomainError(f"coordinates must be integers, got {c!r}")
        if not 1 <= c <= delta:
            raise GridDomainError(f"coordinate {c} outside [1, {delta}]")
    return tuple(point)


@dataclass(frozen=True)
class DyadicPoint:
    """A point with coordinates ``numerators / 2**scale_exponent``.

    Canonical form: either ``scale_exponent == 0`` or some numerator is odd,
    so value-equal points are representation-equal (and hash-equal).
    """

    numerators: tuple[int, ...]
    scale_exponent: int

    def __post_init__(self):
        if self.scale_exponent < 0:
            raise ValueError("scale_exponent must be >= 0")

    @staticmethod
    def of(numerators, scale_exponent: int = 0) -> "DyadicPoint":
        """Build a canonical dyadic point from ``numerators / 2**scale_exponent``."""
        nums = tuple(int(n) for n in numerators)
        g = int(scale_exponent)
        while g > 0 and all(n % 2 == 0 for n in nums):
            nums = tuple(n // 2 for n in nums)
            g -= 1
        return DyadicPoint(nums, g)

    @staticmethod
    def from_grid(point: GridPoint) -> "DyadicPoint":
        return DyadicPoint.of(point, 0)

    @property
    def dim(self) -> int:
        return len(self.numerators)

    def scaled(self, scale_exponent: int) -> tuple[int, ...]:
        """Numerators at a coarser-or-equal denominator ``2**scale_exponent``."""
        if scale_exponent < self.scale_exponent:
            raise ValueError("requested scale finer than representation")
        f = 1 << (scale_exponent - self.scale_exponent)
        return tuple(n * f for n in self.numerators)

    def as_floats(self) -> tuple[float, ...]:
        d = 1 << self.scale_exponent
        return tuple(n / d for n in self.numerators)

    def is_integral(self) -> bool:
        return self.scale_exponent == 0


def distance(p: DyadicPoint, q: DyadicPoint) -> float:
    """Euclidean distance between two exact dyadic points."""
    if p.dim != q.dim:
        raise ValueError(f"dimension mismatch: {p.dim} vs {q.dim}")
    g = max(p.scale_exponent, q.scale_exponent)
    pn, qn = p.scaled(g), q.scaled(g)
    sq = sum((a - b) * (a - b) for a, b in zip(pn, qn))
    return math.sqrt(sq) / (1 << g)


class ActiveSet:
    """Multiset of grid points with per-coordinate multiplicity.

    A point is present iff its multiplicity is >= 1.  The lexicographically
    smallest present point (the designated root of the implicit tree) is
    maintained incrementally via an ordered index, so root-change detection
    after every update is cheap.

    Single-writer; safe for concurrent readers when quiescent.
    """

    def __init__(self, delta: int, dim: int):
        self.delta = delta
        self.dim = dim
        self._multiplicity: dict[GridPoint, int] = {}
        self._ordered: list[GridPoint] = []

    def activate(self, point: GridPoint) -> None:
        point = validate_grid_point(point, self.delta, self.dim)
        m = self._multiplicity.get(point, 0)
        if m == 0:
            bisect.insort(self._ordered, point)
        self._multiplicity[point] = m + 1

    def deactivate(self, point: GridPoint) -> None:
        point = tuple(point)
        m = self._multiplicity.get(point, 0)
        if m == 0:
            raise InvalidOperationError(f"point {point} is not active")
        if m == 1:
            del self._multiplicity[point]
            i = bisect.bisect_left(self._ordered, point)
            del self._ordered[i]
        else:
            self._multiplicity[point] = m - 1

    def lex_min(self) -> GridPoint | None:
        return self._ordered[0] if self._ordered else None

    def multiplicity(self, point: GridPoint) -> int:
        return self._multiplicity.get(tuple(point), 0)

    def __contains__(self, point) -> bool:
        return tuple(point) in self._multiplicity

    def __len__(self) -> int:
        """Number of distinct present points."""
        return len(self._ordered)

    def points(self) -> tuple[GridPoint, ...]:
        """Present points in lexicographic order."""
        return tuple(self._ordered)

    def as_multiset(self) -> dict[GridPoint, int]:
        return dict(self._multiplicity)

    def copy(self) -> "ActiveSet":
        s = ActiveSet(self.delta, self.dim)
        s._multiplicity = dict(self._multiplicity)
        s._ordered = list(self._ordered)
        return s


@dataclass(frozen=True)
class UpdateOp:
    """One step of an operation sequence: insert or delete a grid point."""

    point: GridPoint
    kind: str  # "insert" | "delete"

    def __post_init__(self):
        if self.kind not in ("insert", "delete"):
            raise ValueError(f"kind must be 'insert' or 'delete', got {self.kind!r}")
        object.__setattr__(self, "point", tuple(self.point))
