"""Sparse exact Gaussian elimination over the rationals.

Vectors are dicts from integer column indices to nonzero ``Fraction``s.
Columns are eliminated left to right, so the pivot of a row is its
smallest column index.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Iterable, Mapping

SparseVec = dict[int, Fraction]


def axpy(acc: SparseVec, vec: Mapping[int, Fraction], coeff: Fraction) -> None:
    for col, c in vec.items():
        new = acc.get(col, 0) + coeff * c
        if new:
            acc[col] = new
        else:
            acc.pop(col, None)


class Echelon:
    """Incrementally built semi-echelon basis of a row space.

    Every stored row is normalised so that its pivot entry is 1, and no
    stored row has a nonzero entry in an earlier row's pivot column.
    ``reduce`` therefore returns the unique representative of a vector
    modulo the row space that vanishes on every pivot column.
    """

    def __init__(self, rows: Iterable[Mapping[int, Fraction]] = ()):
        self.rows: dict[int, SparseVec] = {}
        for r in rows:
            self.add(r)

    @property
    def rank(self) -> int:
        return len(self.rows)

    @property
    def pivots(self) -> list[int]:
        return sorted(self.rows)

    def reduce(self, vec: Mapping[int, Fraction]) -> SparseVec:
        out = {c: Fraction(v) for c, v in vec.items() if v}
        while True:
            hits = [c for c in out if c in self.rows]
            if not hits:
                return out
            col = min(hits)
            axpy(out, self.rows[col], -out[col])

    def add(self, vec: Mapping[int, Fraction]) -> bool:
        """Insert a row; returns True when the rank grows."""
        red = self.reduce(vec)
        if not red:
            return False
        col = min(red)
        inv = 1 / red[col]
        row = {c: v * inv for c, v in red.items()}
        # keep earlier rows free of the new pivot column
        for other in self.rows.values():
            if col in other:
                axpy(other, row, -other[col])
        self.rows[col] = row
        return True

    def contains(self, vec: Mapping[int, Fraction]) -> bool:
        return not self.reduce(vec)


class TrackedEchelon(Echelon):
    """Echelon basis that also records each row as a combination of the inputs."""

    def __init__(self):
        super().__init__()
        self.combos: dict[int, dict[int, Fraction]] = {}
        self.count = 0

    def reduce_tracked(self, vec: Mapping[int, Fraction]) -> tuple[SparseVec, dict[int, Fraction]]:
        out = {c: Fraction(v) for c, v in vec.items() if v}
        combo: dict[int, Fraction] = {}
        while True:
            hits = [c for c in out if c in self.rows]
            if not hits:
                return out, combo
            col = min(hits)
            f = out[col]
            axpy(out, self.rows[col], -f)
            axpy(combo, self.combos[col], -f)

    def add(self, vec: Mapping[int, Fraction]) -> bool:
        idx = self.count
        self.count += 1
        red, combo = self.reduce_tracked(vec)
        combo[idx] = combo.get(idx, 0) + 1
        if not red:
            return False
        col = min(red)
        inv = 1 / red[col]
        row = {c: v * inv for c, v in red.items()}
        combo = {i: v * inv for i, v in combo.items() if v}
        for pc, other in self.rows.items():
            if col in other:
                f = other[col]
                axpy(other, row, -f)
                axpy(self.combos[pc], combo, -f)
        self.rows[col] = row
        self.combos[col] = combo
        return True

    def express(self, vec: Mapping[int, Fraction]) -> dict[int, Fraction] | None:
        """Coefficients writing ``vec`` in terms of the inserted rows, or None."""
        red, combo = self.reduce_tracked(vec)
        if red:
            return None
        return {i: -c for i, c in combo.items() if c}


def rank(rows: Iterable[Mapping[int, Fraction]]) -> int:
    return Echelon(rows).rank


def kernel(columns: int, rows: Iterable[Mapping[int, Fraction]]) -> list[SparseVec]:
    """Basis of ``{x : r . x = 0 for every row r}`` in a space with ``columns`` coordinates."""
    ech = Echelon(rows)
    # fully reduce so each pivot row reads x_p = -sum(row[c] x_c) over free c
    piv = ech.pivots
    for p in reversed(piv):
        row = ech.rows[p]
        for q in piv:
            if q > p and q in row:
                axpy(row, ech.rows[q], -row[q])
    free = [c for c in range(columns) if c not in ech.rows]
    basis = []
    for f in free:
        vec: SparseVec = {f: Fraction(1)}
        for p in piv:
            c = ech.rows[p].get(f)
            if c:
                vec[p] = -c
        basis.append(vec)
    return basis
