"""Exact incremental rank tracking for decoded-combination matrices.

Across phases the relay accumulates one integer coefficient row per phase
and can recover all k messages once the collected rows span full rank.  The
completion-time experiments need rank updates that are exact (float rank of
integer matrices lies about ties) and cheap per added row, so rows are
reduced incrementally:

* over the rationals, by fraction-free cross-multiplication elimination
  against a pivot row per leading column, with gcd normalisation to stop
  entry growth;
* over GF(2), by XOR elimination on bitmasks.

A float QR-based rank is included only as a cross-check for tests.
"""

from __future__ import annotations

import math
from typing import Iterable, Sequence

import numpy as np
import scipy.linalg

__all__ = [
    "GF2RankTracker",
    "RationalRankTracker",
    "float_rank",
    "gf2_rank",
    "rational_rank",
]


class RationalRankTracker:
    """Incremental rank of integer rows over the rationals.

    Keeps one reduced pivot row per leading column.  ``add_row`` reduces the
    incoming row against existing pivots with exact integer arithmetic
    (r := a*r - b*pivot cancels the leading entry without fractions) and
    reports whether the row increased the rank.
    """

    def __init__(self, ncols: int) -> None:
        if ncols < 1:
            raise ValueError("need at least one column")
        self.ncols = ncols
        self._pivots: dict[int, list[int]] = {}

    @property
    def rank(self) -> int:
        return len(self._pivots)

    @property
    def complete(self) -> bool:
        return self.rank == self.ncols

    def add_row(self, row: Sequence[int]) -> bool:
        r = [int(x) for x in row]
        if len(r) != self.ncols:
            raise ValueError(f"row length {len(r)} != {self.ncols}")
        for col in range(self.ncols):
            if r[col] == 0:
                continue
            pivot = self._pivots.get(col)
            if pivot is None:
                g = math.gcd(*r)
                r = [x // g for x in r]
                if r[col] < 0:
                    r = [-x for x in r]
                self._pivots[col] = r
                return True
            a, b = pivot[col], r[col]
            r = [a * x - b * y for x, y in zip(r, pivot)]
        return False


class GF2RankTracker:
    """Incremental rank of binary rows over GF(2), rows held as bitmasks."""

    def __init__(self, ncols: int) -> None:
        if ncols < 1:
            raise ValueError("need at least one column")
        self.ncols = ncols
        self._pivots: dict[int, int] = {}

    @property
    def rank(self) -> int:
        return len(self._pivots)

    @property
    def complete(self) -> bool:
        return self.rank == self.ncols

    def add_row(self, row: Sequence[int] | int) -> bool:
        if isinstance(row, int):
            mask = row
            if mask >> self.ncols:
                raise ValueError("bitmask has bits beyond the column count")
        else:
            bits = [int(x) % 2 for x in row]
            if len(bits) != self.ncols:
                raise ValueError(f"row length {len(bits)} != {self.ncols}")
            mask = 0
            for i, b in enumerate(bits):
                mask |= b << i
        while mask:
            lead = mask.bit_length() - 1
            pivot = self._pivots.get(lead)
            if pivot is None:
                self._pivots[lead] = mask
                return True
            mask ^= pivot
        return False


def rational_rank(rows: Iterable[Sequence[int]], ncols: int) -> int:
    """Exact rank over the rationals of an iterable of integer rows."""
    t = RationalRankTracker(ncols)
    for row in rows:
        t.add_row(row)
    return t.rank


def gf2_rank(rows: Iterable[Sequence[int] | int], ncols: int) -> int:
    """Rank over GF(2) of an iterable of binary rows (lists or bitmasks)."""
    t = GF2RankTracker(ncols)
    for row in rows:
        t.add_row(row)
    return t.rank


def float_rank(matrix: Sequence[Sequence[float]], tol: float = 1e-9) -> int:
    """Numerical rank via column-pivoted QR; test cross-check only."""
    m = np.atleast_2d(np.asarray(matrix, dtype=float))
    if m.size == 0:
        return 0
    r = scipy.linalg.qr(m, mode="r", pivoting=True)[0]
    d = np.abs(np.diag(r))
    if d.size == 0 or d[0] == 0.0:
        return 0
    return int(np.sum(d > tol * d[0]))
