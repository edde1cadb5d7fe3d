"""Phase-space grid specifications and sweep result containers."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

__all__ = ["QUADRATURES", "GridSpec", "SweepResult", "RECORD_COLUMNS"]

QUADRATURES = ("q1", "p1", "q2", "p2")
RECORD_COLUMNS = ("q1", "p1", "q2", "p2", "W", "W2", "I", "budget")


@dataclass(frozen=True)
class GridSpec:
    """One- or two-axis sweep over quadratures, remaining quadratures pinned.

    axes: tuple of (name, lo, hi, count); points are linspace(lo, hi, count)
    and records run row-major over the axes in the order given.  count = 1 is
    allowed only for a degenerate axis with lo == hi (single-point grids).
    """

    axes: tuple[tuple[str, float, float, int], ...]
    fixed: dict[str, float] = field(default_factory=dict)

    def __post_init__(self):
        if not (1 <= len(self.axes) <= 2):
            raise ValueError("grid must sweep one or two axes")
        seen = set()
        for name, lo, hi, count in self.axes:
            if name not in QUADRATURES:
                raise ValueError(f"unknown quadrature {name!r}")
            if name in seen:
                raise ValueError(f"axis {name!r} listed twice")
            seen.add(name)
            if count < 1 or (count == 1 and lo != hi):
                raise ValueError("axis count must be >= 2 (or 1 with lo == hi)")
            if count >= 2 and not lo < hi:
                raise ValueError(f"axis {name!r} needs lo < hi, got [{lo}, {hi}]")
        for name in self.fixed:
            if name not in QUADRATURES:
                raise ValueError(f"unknown fixed quadrature {name!r}")
            if name in seen:
                raise ValueError(f"{name!r} is both swept and fixed")

    @property
    def shape(self) -> tuple[int, ...]:
        return tuple(ax[3] for ax in self.axes)

    @property
    def n_points(self) -> int:
        return int(np.prod(self.shape))

    def coordinates(self) -> np.ndarray:
        """(n_points, 4) array of (q1, p1, q2, p2), row-major over the axes."""
        values = [np.linspace(lo, hi, count) for _, lo, hi, count in self.axes]
        mesh = np.meshgrid(*values, indexing="ij")
        coords = np.zeros((self.n_points, 4))
        for i, name in enumerate(QUADRATURES):
            coords[:, i] = self.fixed.get(name, 0.0)
        for (name, *_), grid in zip(self.axes, mesh):
            coords[:, QUADRATURES.index(name)] = grid.ravel()
        return coords


@dataclass(frozen=True)
class SweepResult:
    """Grid sweep output: a meta echo of the full configuration plus one
    record (q1, p1, q2, p2, W, W^2, I, budget) per grid point."""

    meta: dict
    records: np.ndarray  # shape (n_points, 8), columns RECORD_COLUMNS

    def __post_init__(self):
        if self.records.ndim != 2 or self.records.shape[1] != len(RECORD_COLUMNS):
            raise ValueError(f"records must have {len(RECORD_COLUMNS)} columns")

    def column(self, name: str) -> np.ndarray:
        return self.records[:, RECORD_COLUMNS.index(name)]
