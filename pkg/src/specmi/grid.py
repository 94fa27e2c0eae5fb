"""Unit cells, uniform periodic grids and tagged field containers.

Storage conventions (fixed so that output files are reproducible):

* grid axes are stored row-major, the last axis varying fastest;
* vector fields carry a leading component axis of length 3;
* symmetric second-order tensors carry a leading axis of length 6 in the
  order (11, 22, 33, 23, 13, 12).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import InvalidInputError

SYM_ORDER = ((0, 0), (1, 1), (2, 2), (1, 2), (0, 2), (0, 1))
SYM_LABELS = ("11", "22", "33", "23", "13", "12")

RANKS = {"scalar": 1, "vector": 3, "sym2": 6}
SAMPLINGS = ("node", "center", "mode")


@dataclass(frozen=True)
class UnitCell:
    lengths: tuple[float, ...]

    def __post_init__(self):
        lengths = tuple(float(v) for v in np.atleast_1d(self.lengths))
        if len(lengths) not in (1, 3):
            raise InvalidInputError(f"unit cell must be 1D or 3D, got {len(lengths)} lengths")
        if any(not np.isfinite(v) or v <= 0 for v in lengths):
            raise InvalidInputError(f"cell lengths must be positive, got {lengths}")
        object.__setattr__(self, "lengths", lengths)

    @property
    def dim(self) -> int:
        return len(self.lengths)


@dataclass(frozen=True)
class Grid:
    """Uniform periodic grid with ``counts[r]`` subintervals along axis ``r``."""

    cell: UnitCell
    counts: tuple[int, ...]
    spacings: tuple[float, ...] = field(init=False)
    half_counts: tuple[int, ...] = field(init=False)

    def __post_init__(self):
        counts = tuple(int(v) for v in np.atleast_1d(self.counts))
        if len(counts) != self.cell.dim:
            raise InvalidInputError(
                f"grid has {len(counts)} axes but the cell is {self.cell.dim}D")
        if any(n < 2 for n in counts):
            raise InvalidInputError(f"grid counts must be >= 2, got {counts}")
        object.__setattr__(self, "counts", counts)
        object.__setattr__(self, "spacings",
                           tuple(l / n for l, n in zip(self.cell.lengths, counts)))
        object.__setattr__(self, "half_counts", tuple(n // 2 for n in counts))

    @classmethod
    def regular(cls, lengths: float | Sequence[float], counts: int | Sequence[int]) -> Grid:
        return cls(UnitCell(tuple(np.atleast_1d(lengths))), tuple(np.atleast_1d(counts)))

    @property
    def dim(self) -> int:
        return self.cell.dim

    @property
    def lengths(self) -> tuple[float, ...]:
        return self.cell.lengths

    @property
    def size(self) -> int:
        return int(np.prod(self.counts))

    def nodes(self, axis: int = 0) -> np.ndarray:
        """Node coordinates ``(i-1) h`` along ``axis``."""
        return np.arange(self.counts[axis]) * self.spacings[axis]

    def centers(self, axis: int = 0) -> np.ndarray:
        """Cell-center coordinates ``(i-1/2) h`` along ``axis``."""
        return (np.arange(self.counts[axis]) + 0.5) * self.spacings[axis]

    def coords(self, sampling: str, axis: int = 0) -> np.ndarray:
        if sampling == "node":
            return self.nodes(axis)
        if sampling == "center":
            return self.centers(axis)
        raise InvalidInputError(f"no real-space coordinates for sampling {sampling!r}")

    def mesh(self, sampling: str) -> list[np.ndarray]:
        axes = [self.coords(sampling, r) for r in range(self.dim)]
        return np.meshgrid(*axes, indexing="ij")

    def linear_index(self, multi_index) -> np.ndarray:
        return np.ravel_multi_index(tuple(np.asarray(multi_index)), self.counts)

    def multi_index(self, linear) -> tuple[np.ndarray, ...]:
        return np.unravel_index(linear, self.counts)


@dataclass(frozen=True, eq=False)
class Field:
    """Array of scalar, vector or symmetric-tensor values on a grid.

    ``data`` has shape ``counts`` for scalars and ``(k, *counts)`` otherwise.
    The array is copied and made read-only on construction.
    """

    grid: Grid
    data: np.ndarray
    rank: str = "scalar"
    sampling: str = "node"

    def __post_init__(self):
        if self.rank not in RANKS:
            raise InvalidInputError(f"unknown rank {self.rank!r}")
        if self.sampling not in SAMPLINGS:
            raise InvalidInputError(f"unknown sampling {self.sampling!r}")
        data = np.array(self.data, copy=True)
        expected = self.grid.counts if self.rank == "scalar" else (RANKS[self.rank], *self.grid.counts)
        if data.shape != tuple(expected):
            raise InvalidInputError(f"field data has shape {data.shape}, expected {tuple(expected)}")
        data.flags.writeable = False
        object.__setattr__(self, "data", data)

    @property
    def grid_axes(self) -> tuple[int, ...]:
        offset = 0 if self.rank == "scalar" else 1
        return tuple(range(offset, offset + self.grid.dim))

    def with_data(self, data: np.ndarray, sampling: str | None = None) -> Field:
        return Field(self.grid, data, self.rank, sampling or self.sampling)


def require_sampling(f: Field, *allowed: str) -> None:
    if f.sampling not in allowed:
        raise InvalidInputError(
            f"field sampled at {f.sampling!r}, operation needs one of {allowed}")


def mean(f: Field):
    """Arithmetic average over all grid points (rank-matching result)."""
    require_sampling(f, "node", "center")
    if f.data.size == 0:
        raise InvalidInputError("empty field")
    avg = f.data.mean(axis=f.grid_axes)
    return avg.item() if f.rank == "scalar" else avg


def fluctuation(f: Field) -> Field:
    """``f - mean(f)`` pointwise."""
    avg = np.asarray(mean(f))
    shape = avg.shape + (1,) * f.grid.dim
    return f.with_data(f.data - avg.reshape(shape))


def sym_to_matrix(v: np.ndarray) -> np.ndarray:
    """(6, ...) symmetric storage -> (3, 3, ...) full tensor."""
    v = np.asarray(v)
    out = np.empty((3, 3) + v.shape[1:], dtype=v.dtype)
    for c, (i, j) in enumerate(SYM_ORDER):
        out[i, j] = v[c]
        out[j, i] = v[c]
    return out


def matrix_to_sym(a: np.ndarray) -> np.ndarray:
    """(3, 3, ...) tensor -> (6, ...) storage of its symmetric part."""
    a = np.asarray(a)
    return np.stack([0.5 * (a[i, j] + a[j, i]) for i, j in SYM_ORDER])
