"""Sparse exact linear algebra over dict-encoded vectors.

Vectors are dicts mapping hashable keys to nonzero exact scalars (ints,
Fractions, or GF(p) elements). Used for rank computations and for deriving
dependent-monomial exclusion lists deterministically.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Dict, Hashable, List, Sequence, Tuple

Vector = Dict[Hashable, object]


def _to_fraction(v: Vector, char: int) -> Vector:
    if char != 0:
        return dict(v)
    return {k: Fraction(c) for k, c in v.items()}


def _reduce(row: Vector, pivots: Dict[Hashable, Vector]) -> Vector:
    """Eliminate all known pivot keys from ``row`` (pivot rows are monic)."""
    row = dict(row)
    # Repeatedly clear pivot keys; pivot rows are already fully reduced
    # against each other, so one pass suffices.
    for key in list(row):
        piv = pivots.get(key)
        if piv is None:
            continue
        c = row.pop(key)
        for k2, c2 in piv.items():
            if k2 == key:
                continue
            s = row.get(k2, 0) - c * c2
            if s:
                row[k2] = s
            else:
                row.pop(k2, None)
    return row


def _insert_pivot(row: Vector, pivots: Dict[Hashable, Vector]) -> Hashable:
    key = min(row)  # deterministic pivot choice
    inv = row[key]
    monic = {k: c / inv for k, c in row.items()}
    # Back-substitute into existing pivot rows so reduction stays one-pass.
    for pkey, prow in pivots.items():
        c = prow.get(key)
        if c:
            for k2, c2 in monic.items():
                if k2 == key:
                    prow.pop(key, None)
                    continue
                s = prow.get(k2, 0) - c * c2
                if s:
                    prow[k2] = s
                else:
                    prow.pop(k2, None)
    pivots[key] = monic
    return key


class Echelon:
    """Incrementally maintained echelon basis for membership tests."""

    __slots__ = ("char", "pivots")

    def __init__(self, char: int = 0):
        self.char = char
        self.pivots: Dict[Hashable, Vector] = {}

    def residue(self, row: Vector) -> Vector:
        return _reduce(_to_fraction(row, self.char), self.pivots)

    def insert(self, row: Vector) -> bool:
        """True if the row was independent of the span (and is now added)."""
        red = self.residue(row)
        if not red:
            return False
        _insert_pivot(red, self.pivots)
        return True

    def __len__(self) -> int:
        return len(self.pivots)


def greedy_independent(rows: Sequence[Vector], char: int = 0) -> Tuple[List[int], List[int]]:
    """Split row indices into (independent, dependent) by greedy elimination.

    Rows are processed in the given order; a row dependent on earlier kept
    rows is reported in the second list. Deterministic.
    """
    pivots: Dict[Hashable, Vector] = {}
    kept: List[int] = []
    dropped: List[int] = []
    for idx, raw in enumerate(rows):
        row = _reduce(_to_fraction(raw, char), pivots)
        if row:
            _insert_pivot(row, pivots)
            kept.append(idx)
        else:
            dropped.append(idx)
    return kept, dropped


def sparse_rank(rows: Sequence[Vector], char: int = 0) -> int:
    kept, _ = greedy_independent(rows, char)
    return len(kept)


def in_span(rows: Sequence[Vector], target: Vector, char: int = 0) -> bool:
    pivots: Dict[Hashable, Vector] = {}
    for raw in rows:
        row = _reduce(_to_fraction(raw, char), pivots)
        if row:
            _insert_pivot(row, pivots)
    return not _reduce(_to_fraction(target, char), pivots)
