"""Matrices with entries in V, the diamond product, units and O-generators."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping

from .formal import LaurentPoly, gen_binomial, to_scalar, truncation_poly
from .voa import State, TruncationExceeded, VertexAlgebra

Slot = tuple[int, int]


class SizeMismatch(ValueError):
    pass


class UMatrix:
    """An ``(N+1) x (N+1)`` matrix whose entries are states of V."""

    __slots__ = ("size", "_entries")

    def __init__(self, size: int, entries: Mapping[Slot, State] | None = None):
        if size < 0:
            raise ValueError("size must be nonnegative")
        self.size = size
        self._entries: dict[Slot, State] = {}
        for (k, l), st in (entries or {}).items():
            if not (0 <= k <= size and 0 <= l <= size):
                raise IndexError(f"slot {(k, l)} outside a size-{size} matrix")
            if st:
                self._entries[(k, l)] = self._entries.get((k, l), State()) + st
                if not self._entries[(k, l)]:
                    del self._entries[(k, l)]

    @classmethod
    def elementary(cls, v: State, k: int, l: int, size: int) -> "UMatrix":
        """``[v]_{kl}``."""
        return cls(size, {(k, l): v})

    def __getitem__(self, slot: Slot) -> State:
        return self._entries.get(tuple(slot), State())

    def slots(self) -> list[Slot]:
        return sorted(self._entries)

    def entries(self) -> dict[Slot, State]:
        return dict(sorted(self._entries.items()))

    def is_zero(self) -> bool:
        return not self._entries

    def max_weight(self) -> int:
        return max((st.max_weight() for st in self._entries.values()), default=-1)

    def _same(self, other: "UMatrix") -> None:
        if self.size != other.size:
            raise SizeMismatch(f"sizes {self.size} and {other.size} differ")

    def __add__(self, other: "UMatrix") -> "UMatrix":
        self._same(other)
        out = dict(self._entries)
        for s, st in other._entries.items():
            out[s] = out.get(s, State()) + st
        return UMatrix(self.size, out)

    def __neg__(self) -> "UMatrix":
        return UMatrix(self.size, {s: -st for s, st in self._entries.items()})

    def __sub__(self, other: "UMatrix") -> "UMatrix":
        return self + (-other)

    def __mul__(self, scalar) -> "UMatrix":
        s = to_scalar(scalar)
        return UMatrix(self.size, {k: st * s for k, st in self._entries.items()})

    __rmul__ = __mul__

    def __eq__(self, other) -> bool:
        if not isinstance(other, UMatrix):
            return NotImplemented
        return self.size == other.size and self._entries == other._entries

    def __hash__(self) -> int:
        return hash((self.size, frozenset(self._entries.items())))

    def __repr__(self) -> str:
        body = ", ".join(f"{s}: {st!r}" for s, st in sorted(self._entries.items()))
        return f"UMatrix(N={self.size}, {{{body}}})"

    def to_json(self) -> dict:
        return {
            "size": self.size,
            "entries": [{"k": k, "l": l, "state": st.to_json()} for (k, l), st in self.entries().items()],
        }

    @classmethod
    def from_json(cls, data: Mapping) -> "UMatrix":
        entries: dict[Slot, State] = {}
        for item in data["entries"]:
            slot = (int(item["k"]), int(item["l"]))
            entries[slot] = entries.get(slot, State()) + State.from_json(item["state"])
        return cls(int(data["size"]), entries)


def diamond_entry(V: VertexAlgebra, u: State, v: State, k: int, n: int, l: int) -> State:
    """The single nonzero entry of ``[u]_{kn} <> [v]_{nl}`` (it sits at ``(k, l)``)."""
    return V.dressed_residue_state(truncation_poly(k, n, l), l, u, v)


def diamond(V: VertexAlgebra, A: UMatrix, B: UMatrix) -> UMatrix:
    A._same(B)
    out: dict[Slot, State] = {}
    for (k, n), u in A._entries.items():
        for (n2, l), v in B._entries.items():
            if n2 != n:
                continue
            out[(k, l)] = out.get((k, l), State()) + diamond_entry(V, u, v, k, n, l)
    return UMatrix(A.size, out)


def unit_matrix(N: int) -> UMatrix:
    return UMatrix(N, {(k, k): State.vacuum() for k in range(N + 1)})


def sl2_shift(V: VertexAlgebra, v: State, shift: int) -> State:
    """``(L(-1) + L(0) + shift) v``."""
    return V.L(-1, v) + V.L(0, v) + v * shift


def operator_binomial(V: VertexAlgebra, v: State, shift: int, order: int) -> State:
    """``C(L(-1) + L(0) + shift, order) v`` via the falling-factorial product."""
    out = v
    for i in range(order):
        out = sl2_shift(V, out, shift - i)
    return out * Fraction(1, _factorial(order))


def _factorial(n: int) -> int:
    out = 1
    for i in range(2, n + 1):
        out *= i
    return out


def right_unit_closed_form(V: VertexAlgebra, v: State, k: int, l: int, N: int) -> UMatrix:
    """Closed form of ``[v]_{kl} <> 1^N`` as a sum of operator binomials."""
    if not (0 <= k <= N and 0 <= l <= N):
        raise IndexError("slot outside the matrix")
    V.check(v)
    acc = State()
    for m in range(l + 1):
        acc = acc + operator_binomial(V, v, l, k + m) * gen_binomial(-k - 1, m)
    V.check(acc, "right unit closed form")
    return UMatrix.elementary(acc, k, l, N)


# -- O-generators ------------------------------------------------------------


@dataclass(frozen=True)
class OGenerator:
    """A spanning element of the O-subspace supported on one slot.

    ``kind`` is ``"residue"`` for ``Res_x x^{-k-l-p-2}(1+x)^l [Y((1+x)^{L(0)}u, x)v]_{kl}``
    and ``"sl2"`` for ``[(L(-1)+L(0)+l-k) v]_{kl}``.
    """

    kind: str
    slot: Slot
    u: tuple | None
    v: tuple
    p: int | None
    state: State

    @property
    def leading_weight(self) -> int:
        return self.state.max_weight()

    def realized(self, N: int) -> UMatrix:
        return UMatrix.elementary(self.state, *self.slot, N)

    def label(self) -> str:
        if self.kind == "sl2":
            return f"sl2[v={list(self.v)}]_{self.slot}"
        return f"res[u={list(self.u)},v={list(self.v)},p={self.p}]_{self.slot}"


def residue_generator_state(V: VertexAlgebra, u: State, v: State, k: int, l: int, p: int) -> State:
    return V._dressed(LaurentPoly.monomial(-k - l - p - 2), l, u, v)


def enumerate_generators(V: VertexAlgebra, slot: Slot, cutoff: int) -> list[OGenerator]:
    """All nonzero O-generators on ``slot`` whose nominal leading weight is at most ``cutoff``.

    The nominal leading weight of a residue generator is ``wt u + wt v + k + l + p + 1``
    and that of an sl2 generator is ``wt v + 1``.  Generators are not homogeneous;
    the lower-weight tail is kept.
    """
    k, l = slot
    cache = V.__dict__.setdefault("_ogen_cache", {})
    key = (slot, cutoff)
    if key in cache:
        return cache[key]
    out: list[OGenerator] = []
    basis = V.basis_upto(cutoff)
    for vp in basis:
        if sum(vp) + 1 > cutoff:
            continue
        st = sl2_shift(V, State.basis(vp), l - k)
        if st:
            out.append(OGenerator("sl2", slot, None, vp, None, st))
    budget = cutoff - k - l - 1
    for up in basis:
        if not up:
            continue  # vacuum gives C(l, k+l+p+1) v = 0
        wu = sum(up)
        for vp in basis:
            wv = sum(vp)
            for p in range(0, budget - wu - wv + 1):
                st = residue_generator_state(V, State.basis(up), State.basis(vp), k, l, p)
                if st:
                    out.append(OGenerator("residue", slot, up, vp, p, st))
    cache[key] = out
    return out


def o_generators(V: VertexAlgebra, N: int, slot: Slot, w: int) -> list[OGenerator]:
    """Generators on ``slot`` whose leading (highest) weight is exactly ``w``."""
    k, l = slot
    if not (0 <= k <= N and 0 <= l <= N):
        raise IndexError("slot outside the matrix")
    if w < 0:
        return []
    if w > V.W:
        raise TruncationExceeded(f"weight {w} exceeds cutoff {V.W}")
    return [g for g in enumerate_generators(V, slot, V.W) if g.leading_weight == w]


def lder_product_sides(V: VertexAlgebra, u: State, v: State, k: int, n: int, l: int) -> tuple[State, State]:
    """Both sides of the closed form for ``[(L(-1)+L(0)+n-k)u]_{kn} <> [v]_{nl}``."""
    left = V._dressed(truncation_poly(k, n, l), l, sl2_shift(V, u, n - k), v)
    right = residue_generator_state(V, u, v, k, l, 0) * lder_coefficient(k, n, l)
    return left, right


def lder_coefficient(k: int, n: int, l: int) -> Fraction:
    """Scalar in front of the ``p = 0`` residue generator.

    From ``(1+x) d/dx T = a T + (n+1) C(a, n+1) x^{-k-l-2}`` with ``a = -k+n-l-1``
    and one integration by parts.
    """
    return -(n + 1) * gen_binomial(-k + n - l - 1, n + 1)


def alternative_lder_coefficient(k: int, n: int, l: int) -> Fraction:
    """``(k-n+l+1) C(-k+n-l-1, n+1)``, a plausible-looking coefficient that fails the identity."""
    return (k - n + l + 1) * gen_binomial(-k + n - l - 1, n + 1)


def lder_product_identity_check(V: VertexAlgebra, u: State, v: State, k: int, n: int, l: int) -> bool:
    V.check(u, "u")
    V.check(v, "v")
    left, right = lder_product_sides(V, u, v, k, n, l)
    V.check(left, "left side")
    V.check(right, "right side")
    return left == right


def elementary_basis(V: VertexAlgebra, N: int, max_weight: int) -> Iterable[UMatrix]:
    for k in range(N + 1):
        for l in range(N + 1):
            for p in V.basis_upto(max_weight):
                yield UMatrix.elementary(State.basis(p), k, l, N)
