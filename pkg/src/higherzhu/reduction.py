"""Canonical forms modulo the span of O-generators.

O-generators are not weight-homogeneous: a residue generator has a leading
component of weight ``wt u + wt v + k + l + p + 1`` and a tail of lower
weights.  The span is therefore filtered rather than graded.  For each slot
we echelonize all generators whose leading weight is at most ``cutoff`` over
the coordinates of ``V_{<= cutoff}``, ordered by weight descending and then by
the PBW order.  Pivots sit at leading monomials, the reduced row echelon form
is unique, and the number of pivots at weight ``w`` measures how much of the
weight-``w`` layer the filtered span kills.
"""

from __future__ import annotations

import hashlib
import json
import os
import random
import tempfile
import warnings
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path
from typing import Mapping

from .formal import format_scalar, to_scalar
from .linalg import Echelon, rank
from .matrix import (
    OGenerator,
    Slot,
    UMatrix,
    diamond,
    enumerate_generators,
    o_generators,
)
from .report import Report
from .voa import Partition, State, TruncationExceeded, VertexAlgebra

CACHE_FORMAT = 1


class CacheWarning(UserWarning):
    """A cache entry was unreadable or failed its content hash."""


class Coordinates:
    """Column indexing of ``V_{<= cutoff}``: heavier monomials get smaller indices."""

    def __init__(self, V: VertexAlgebra, cutoff: int):
        self.cutoff = cutoff
        self.columns: list[Partition] = [p for w in range(cutoff, -1, -1) for p in V.basis(w)]
        self.index = {p: i for i, p in enumerate(self.columns)}

    def __len__(self) -> int:
        return len(self.columns)

    def vector(self, st: State) -> dict[int, Fraction]:
        try:
            return {self.index[p]: c for p, c in st.items()}
        except KeyError as exc:
            raise TruncationExceeded(f"monomial {list(exc.args[0])} is above cutoff {self.cutoff}") from None

    def state(self, vec: Mapping[int, Fraction]) -> State:
        return State({self.columns[i]: c for i, c in vec.items()})


@dataclass
class WeightBlock:
    """Generators on one slot whose leading weight is exactly ``weight``.

    Rows are coordinate vectors over ``ambient_basis`` (all monomials of
    weight at most ``weight``), since generators carry lower-weight tails.
    """

    slot: Slot
    weight: int
    ambient_basis: list[Partition]
    generators: list[OGenerator]
    generator_rows: list[dict[int, Fraction]]

    @property
    def leading_basis(self) -> list[Partition]:
        return [p for p in self.ambient_basis if sum(p) == self.weight]


def assemble_block(V: VertexAlgebra, N: int, slot: Slot, w: int) -> WeightBlock:
    if w > V.W:
        raise TruncationExceeded(f"weight {w} exceeds cutoff {V.W}")
    coords = Coordinates(V, max(w, 0))
    gens = o_generators(V, N, slot, w)
    rows = [coords.vector(g.state) for g in gens]
    for g in gens:
        if g.leading_weight != w:
            raise AssertionError(f"generator {g.label()} misfiled")
    return WeightBlock(slot, w, coords.columns, gens, rows)


@dataclass
class ReducedBasis:
    """Reduced row echelon basis of the O-span on one slot up to ``cutoff``."""

    slot: Slot
    cutoff: int
    coords: Coordinates
    echelon: Echelon
    generator_count: int = 0

    @property
    def rank(self) -> int:
        return self.echelon.rank

    def pivot_monomials(self) -> list[Partition]:
        return [self.coords.columns[i] for i in self.echelon.pivots]

    def pivots_at(self, w: int) -> int:
        return sum(1 for p in self.pivot_monomials() if sum(p) == w)

    def free_monomials(self, w: int | None = None) -> list[Partition]:
        """Monomials that are not pivots; their classes form a basis of the quotient."""
        out = [p for i, p in enumerate(self.coords.columns) if i not in self.echelon.rows]
        if w is not None:
            out = [p for p in out if sum(p) == w]
        return sorted(out, key=lambda p: (sum(p), p))

    def reduce_state(self, st: State) -> State:
        if st.max_weight() > self.cutoff:
            raise TruncationExceeded(f"state of weight {st.max_weight()} above cutoff {self.cutoff}")
        return self.coords.state(self.echelon.reduce(self.coords.vector(st)))

    def contains(self, st: State) -> bool:
        return not self.reduce_state(st)

    # -- serialization --------------------------------------------------
    def to_json(self) -> dict:
        rows = []
        for piv in self.echelon.pivots:
            row = self.echelon.rows[piv]
            rows.append([[list(self.coords.columns[i]), format_scalar(c)] for i, c in sorted(row.items())])
        return {"slot": list(self.slot), "cutoff": self.cutoff, "generators": self.generator_count, "rows": rows}

    @classmethod
    def from_json(cls, V: VertexAlgebra, data: Mapping) -> "ReducedBasis":
        coords = Coordinates(V, int(data["cutoff"]))
        ech = Echelon()
        for row in data["rows"]:
            vec = {coords.index[tuple(p)]: to_scalar(c) for p, c in row}
            ech.rows[min(vec)] = vec
        return cls(tuple(data["slot"]), int(data["cutoff"]), coords, ech, int(data["generators"]))


def _build(V: VertexAlgebra, slot: Slot, cutoff: int) -> ReducedBasis:
    coords = Coordinates(V, cutoff)
    ech = Echelon()
    gens = enumerate_generators(V, slot, cutoff)
    # insert heaviest generators first; the result is independent of order
    for g in sorted(gens, key=lambda g: (-g.leading_weight, g.label())):
        ech.add(coords.vector(g.state))
    return ReducedBasis(slot, cutoff, coords, ech, len(gens))


def config_hash(V: VertexAlgebra, slot: Slot, cutoff: int) -> str:
    text = json.dumps({"format": CACHE_FORMAT, "algebra": V.desc.tag(), "slot": list(slot), "cutoff": cutoff}, sort_keys=True)
    return hashlib.sha256(text.encode()).hexdigest()[:16]


def _content_hash(payload: Mapping) -> str:
    return hashlib.sha256(json.dumps(payload, sort_keys=True).encode()).hexdigest()


def cache_path(cache_dir: Path, V: VertexAlgebra, slot: Slot, cutoff: int) -> Path:
    return Path(cache_dir) / f"{V.desc.tag()}_k{slot[0]}_l{slot[1]}_w{cutoff}.json"


def _read_cache(path: Path, V: VertexAlgebra, slot: Slot, cutoff: int) -> ReducedBasis | None:
    try:
        doc = json.loads(path.read_text())
    except FileNotFoundError:
        return None
    except (OSError, ValueError):
        warnings.warn(f"unreadable cache entry {path}; recomputing", CacheWarning, stacklevel=3)
        return None
    if not isinstance(doc, dict) or doc.get("config") != config_hash(V, slot, cutoff):
        return None
    if doc.get("content") != _content_hash(doc.get("basis", {})):
        warnings.warn(f"corrupt cache entry {path}; recomputing", CacheWarning, stacklevel=3)
        return None
    return ReducedBasis.from_json(V, doc["basis"])


def publish(path: Path, text: str) -> None:
    """Write ``text`` to ``path`` atomically (temporary file, then rename)."""
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=path.name, suffix=".tmp")
    try:
        with os.fdopen(fd, "w") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _write_cache(path: Path, V: VertexAlgebra, red: ReducedBasis) -> None:
    basis = red.to_json()
    doc = {"config": config_hash(V, red.slot, red.cutoff), "content": _content_hash(basis), "basis": basis}
    publish(path, json.dumps(doc, sort_keys=True))


def reduced_basis(V: VertexAlgebra, slot: Slot, cutoff: int | None = None, cache_dir: str | Path | None = None) -> ReducedBasis:
    """The (memoized, optionally disk-cached) reduced basis of one slot."""
    if cutoff is None:
        cutoff = V.W
    if cutoff > V.W:
        raise TruncationExceeded(f"cutoff {cutoff} exceeds algebra cutoff {V.W}")
    memo = V.__dict__.setdefault("_reduced_cache", {})
    key = (tuple(slot), cutoff)
    if key in memo:
        return memo[key]
    if cache_dir is None:
        cache_dir = os.environ.get("HIGHERZHU_CACHE")
    red = None
    path = None
    if cache_dir:
        path = cache_path(Path(cache_dir), V, key[0], cutoff)
        red = _read_cache(path, V, key[0], cutoff)
    if red is None:
        red = _build(V, key[0], cutoff)
        if path is not None:
            _write_cache(path, V, red)
    memo[key] = red
    return red


def canonical_reduce(V: VertexAlgebra, A: UMatrix, cutoff: int | None = None, cache_dir=None) -> UMatrix:
    """The unique representative of ``A`` modulo the O-span at ``cutoff``."""
    if cutoff is None:
        cutoff = V.W
    if A.max_weight() > cutoff:
        raise TruncationExceeded(f"matrix entry of weight {A.max_weight()} above cutoff {cutoff}")
    out = {}
    for slot, st in A.entries().items():
        out[slot] = reduced_basis(V, slot, cutoff, cache_dir).reduce_state(st)
    return UMatrix(A.size, out)


def in_o_span(V: VertexAlgebra, A: UMatrix, cutoff: int | None = None) -> bool:
    return canonical_reduce(V, A, cutoff).is_zero()


def quotient_dimension_table(V: VertexAlgebra, N: int, w_max: int) -> dict[tuple[Slot, int], int]:
    """``dim`` of the weight-``w`` layer of each slot modulo the filtered O-span.

    This is an upper bound for the matching layer of the true quotient,
    whose ideal contains the O-span.
    """
    if w_max > V.W:
        raise TruncationExceeded(f"w_max {w_max} exceeds cutoff {V.W}")
    table = {}
    for k in range(N + 1):
        for l in range(N + 1):
            red = reduced_basis(V, (k, l), w_max)
            for w in range(w_max + 1):
                table[((k, l), w)] = len(V.basis(w)) - red.pivots_at(w)
    return table


def class_basis(V: VertexAlgebra, N: int, w_max: int, cutoff: int | None = None) -> list[UMatrix]:
    """Elementary matrices on free monomials of weight at most ``w_max``, slot by slot."""
    cutoff = V.W if cutoff is None else cutoff
    out = []
    for k in range(N + 1):
        for l in range(N + 1):
            red = reduced_basis(V, (k, l), cutoff)
            for p in red.free_monomials():
                if sum(p) <= w_max:
                    out.append(UMatrix.elementary(State.basis(p), k, l, N))
    return out


def quotient_structure_constants(V: VertexAlgebra, N: int, w_max: int) -> dict[tuple[int, int], UMatrix]:
    """Reduced products of class representatives, keyed by index pairs into ``class_basis``.

    Slot-incompatible pairs are stored as zero.  Products that leave the
    algebra's window raise ``TruncationExceeded``.
    """
    basis = class_basis(V, N, w_max)
    table = {}
    for i, A in enumerate(basis):
        (k, n), = A.slots()
        for j, B in enumerate(basis):
            (n2, l), = B.slots()
            if n != n2:
                table[(i, j)] = UMatrix(N)
                continue
            table[(i, j)] = canonical_reduce(V, diamond(V, A, B))
    return table


def cn_quotient_dimension(V: VertexAlgebra, n: int, w_max: int) -> dict[int, int]:
    """``dim V_(w) / C_n(V)_(w)`` where ``C_n`` is spanned by ``u_(-n) v``."""
    if n < 2:
        raise ValueError("n must be at least 2")
    if w_max > V.W:
        raise TruncationExceeded(f"w_max {w_max} exceeds cutoff {V.W}")
    out = {}
    for w in range(w_max + 1):
        columns = {p: i for i, p in enumerate(V.basis(w))}
        rows = []
        # u_(-n)v has weight wt u + wt v + n - 1
        for wu in range(1, w - n + 2):
            wv = w - n + 1 - wu
            for up in V.basis(wu):
                for vp in V.basis(wv):
                    st = V._mode(State.basis(up), -n, State.basis(vp))
                    rows.append({columns[p]: c for p, c in st.items()})
        out[w] = len(columns) - rank(rows)
    return out


def ideal_experiment(V: VertexAlgebra, N: int, gen_cutoff: int, factor_cutoff: int, samples: int, seed: int = 0) -> Report:
    """Check ``reduce(g <> C) = reduce(C <> g) = 0`` for sampled generators ``g``.

    Since ``A`` and ``A + g`` have the same canonical form, this is the
    well-definedness of the product on reduced representatives.  A failure
    is a finding about the O-span, so callers treat the report as
    informational.
    """
    rng = random.Random(seed)
    gens = [g for k in range(N + 1) for l in range(N + 1) for g in enumerate_generators(V, (k, l), gen_cutoff)]
    factors = [
        UMatrix.elementary(State.basis(p), k, l, N)
        for k in range(N + 1)
        for l in range(N + 1)
        for p in V.basis_upto(factor_cutoff)
    ]
    rep = Report("ideal-experiment", "O-ideal-experiment",
                 {"algebra": V.desc.tag(), "N": N, "gen_cutoff": gen_cutoff, "factor_cutoff": factor_cutoff, "samples": samples, "seed": seed})
    rep.details["informational"] = True
    if not gens:
        return rep
    for _ in range(samples):
        g = rng.choice(gens)
        C = rng.choice(factors)
        G = g.realized(N)
        for side, (X, Y) in (("left", (G, C)), ("right", (C, G))):
            try:
                red = canonical_reduce(V, diamond(V, X, Y))
            except TruncationExceeded:
                rep.skipped += 1
                continue
            rep.record(red.is_zero(), side=side, generator=g.label(), factor=C, residue=red)
    return rep
