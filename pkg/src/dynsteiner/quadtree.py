"""The randomly shifted hierarchical grid.

Cells are half-open hypercubes.  The root (level ``L = log2(2*delta)``) has
side ``2*delta`` and covers ``[-s_i, 2*delta - s_i)`` on axis ``i``; level-0
cells have unit side, so each leaf contains exactly one integer coordinate.
Shifts are integers in ``{0, ..., delta-1}``, which keeps every cell boundary
integer-aligned.

All operations are pure functions of the shift and the cell coordinates and
are freely shareable across threads.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass

from .geometry import DyadicPoint, GridPoint

Shift = tuple  # d integers, each in [0, delta-1]


@dataclass(frozen=True)
class CellId:
    """One hypercube of the hierarchy: its level and per-axis position."""

    level: int
    index: tuple[int, ...]

    @property
    def dim(self) -> int:
        return len(self.index)


@dataclass(frozen=True)
class PortalLayout:
    """Designated boundary points of one cell, deduplicated across facets."""

    density: int
    portals: tuple[DyadicPoint, ...]


def draw_shift(seed: int, delta: int, dim: int) -> Shift:
    """Deterministically draw one per-axis shift, uniform over {0, ..., delta-1}."""
    if delta < 2 or delta & (delta - 1):
        raise ValueError("delta must be a power of two >= 2")
    rng = random.Random(seed)
    return tuple(rng.randrange(delta) for _ in range(dim))


def num_levels(delta: int) -> int:
    """Top level L with side 2*delta; levels run 0..L."""
    return (2 * delta).bit_length() - 1


def child_offsets(dim: int) -> list[tuple[int, ...]]:
    """The 2^dim child positions of a cell, in canonical (lexicographic) order."""
    return list(itertools.product((0, 1), repeat=dim))


class ShiftedQuadtree:
    """Cell geometry for one shift: point location, children, portals."""

    def __init__(self, delta: int, dim: int, shift: Shift):
        if delta < 2 or delta & (delta - 1):
            raise ValueError("delta must be a power of two >= 2")
        if dim < 1:
            raise ValueError("dim must be >= 1")
        if len(shift) != dim or any(not 0 <= s < delta for s in shift):
            raise ValueError("shift must have dim components in [0, delta-1]")
        self.delta = delta
        self.dim = dim
        self.shift = tuple(shift)
        self.top_level = num_levels(delta)

    # -- point location ----------------------------------------------------

    def cell_of(self, point: GridPoint, level: int) -> CellId:
        """The unique level-``level`` cell containing a grid point."""
        idx = tuple((c + s) >> level for c, s in zip(point, self.shift))
        return CellId(level, idx)

    def leaf_of(self, point: GridPoint) -> CellId:
        return self.cell_of(point, 0)

    def path_to_root(self, point: GridPoint) -> list[CellId]:
        """Containing cells ordered leaf to root; length ``top_level + 1``."""
        return [self.cell_of(point, lv) for lv in range(self.top_level + 1)]

    def root(self) -> CellId:
        return CellId(self.top_level, (0,) * self.dim)

    # -- structure ----------------------------------------------------------

    def children(self, cell: CellId) -> list[CellId]:
        """The 2^dim half-side cells partitioning ``cell``, canonical order."""
        if cell.level < 1:
            raise ValueError("leaf cells have no children")
        return [
            CellId(cell.level - 1, tuple(2 * i + b for i, b in zip(cell.index, off)))
            for off in child_offsets(cell.dim)
        ]

    def parent(self, cell: CellId) -> CellId:
        if cell.level >= self.top_level:
            raise ValueError("root cell has no parent")
        return CellId(cell.level + 1, tuple(i >> 1 for i in cell.index))

    def contains_point(self, cell: CellId, point: GridPoint) -> bool:
        return self.cell_of(point, cell.level) == cell

    def cell_low(self, cell: CellId) -> tuple[int, ...]:
        """Low corner in grid units (may be negative near the root box edge)."""
        side = 1 << cell.level
        return tuple(i * side - s for i, s in zip(cell.index, self.shift))

    def cell_box(self, cell: CellId) -> tuple[tuple[int, int], ...]:
        """Per-axis half-open interval [low, low + side)."""
        side = 1 << cell.level
        return tuple((lo, lo + side) for lo in self.cell_low(cell))

    # -- portals -------------------------------------------------------------

    def portals(self, cell: CellId, density: int) -> PortalLayout:
        """Boundary lattice of ``cell``: per facet a ``(density+1)^(dim-1)``
        grid with spacing ``side / density``, corners included, deduplicated
        across facets."""
        if density < 1:
            raise ValueError("density must be >= 1")
        low = self.cell_low(cell)
        side = 1 << cell.level
        pts = []
        for rel in boundary_lattice(cell.level, density, self.dim):
            nums = tuple(lo * density + r for lo, r in zip(low, rel))
            pts.append(DyadicPoint.of(nums, density.bit_length() - 1))
        pts.sort(key=lambda p: (p.scaled(p.scale_exponent), p.scale_exponent))
        return PortalLayout(density, tuple(pts))

    def cells_with_portal(self, u: DyadicPoint, level: int, density: int = 1) -> list[CellId]:
        """All level-``level`` cells having ``u`` at a portal position (<= 2^dim)."""
        side = 1 << level
        candidates_per_axis = []
        for a in range(self.dim):
            # exact coordinate of u + shift as (num, scale)
            num = u.numerators[a] + (self.shift[a] << u.scale_exponent)
            den = 1 << u.scale_exponent
            lo_idx = num // (side * den)  # floor division, exact
            cands = {lo_idx}
            if num % (side * den) == 0:
                cands.add(lo_idx - 1)
            n_cells = (2 * self.delta) >> level
            candidates_per_axis.append([i for i in cands if 0 <= i < n_cells])
        out = []
        for idx in itertools.product(*candidates_per_axis):
            cell = CellId(level, idx)
            if self._is_portal_of(cell, u, density):
                out.append(cell)
        out.sort(key=lambda c: c.index)
        return out

    def _is_portal_of(self, cell: CellId, u: DyadicPoint, density: int) -> bool:
        """Whether ``u`` lies on the boundary lattice of ``cell``."""
        low = self.cell_low(cell)
        side = 1 << cell.level
        kappa = density.bit_length() - 1
        if (1 << kappa) != density:
            raise ValueError("density must be a power of two")
        if u.scale_exponent > kappa:
            return False  # finer than the lattice can represent
        rel = []
        for a in range(self.dim):
            r = (u.numerators[a] << (kappa - u.scale_exponent)) - low[a] * density
            if not 0 <= r <= side * density:
                return False
            if r % (1 << cell.level):
                return False  # off-lattice
            rel.append(r)
        return any(r == 0 or r == side * density for r in rel)


def boundary_lattice(level: int, density: int, dim: int) -> list[tuple[int, ...]]:
    """Relative portal positions of a level-``level`` cell, density-scaled.

    Units are grid units times ``density``; positions are the full
    ``(density+1)^dim`` lattice restricted to the boundary (some coordinate
    at 0 or at ``density * 2**level``).  Sorted, deduplicated.
    """
    side = density << level
    step = 1 << level
    axis_vals = range(0, side + 1, step)
    out = [
        p
        for p in itertools.product(axis_vals, repeat=dim)
        if any(c == 0 or c == side for c in p)
    ]
    out.sort()
    return out
