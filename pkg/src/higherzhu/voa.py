"""Rank-one Heisenberg and Virasoro vertex algebras with exact mode arithmetic.

Vectors in a lowest-weight space are sparse maps from PBW monomials
(nonincreasing integer partitions) to rationals.  For the Heisenberg
family a partition ``(l1, ..., lr)`` stands for ``a(-l1)...a(-lr)`` applied
to the lowest-weight vector; for Virasoro it stands for
``L(-l1)...L(-lr)``.

Vertex operators of arbitrary states are obtained from the generator
(``a = a(-1)1`` or ``omega = L(-2)1``) through the iterate formula

    (a_(m) u)_(j) = sum_i (-1)^i C(m, i) [a_(m-i) u_(j+i) - (-1)^m u_(m+j-i) a_(i)],

which is finite on every vector because of lower truncation.  The same
recursion serves the algebra acting on itself and on its modules.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Iterator, Mapping

from .formal import LaurentPoly, format_scalar, gen_binomial, to_scalar

Partition = tuple[int, ...]
Vec = dict[Partition, Fraction]

HEISENBERG = "heisenberg"
VIRASORO = "virasoro"
KINDS = (HEISENBERG, VIRASORO)


class TruncationExceeded(ArithmeticError):
    """A result would leave the retained weight window."""


def add_into(acc: dict, vec: Mapping, coeff=1) -> None:
    """``acc += coeff * vec`` in place, dropping cancelled entries."""
    if not coeff:
        return
    for key, c in vec.items():
        new = acc.get(key, 0) + coeff * c
        if new:
            acc[key] = new
        else:
            acc.pop(key, None)


@lru_cache(maxsize=None)
def partitions(n: int, min_part: int = 1, max_part: int | None = None) -> tuple[Partition, ...]:
    """Partitions of ``n`` with parts in ``[min_part, max_part]``, reverse-lex order."""
    if max_part is None:
        max_part = n
    if n == 0:
        return ((),)
    out = []
    for first in range(min(n, max_part), min_part - 1, -1):
        for rest in partitions(n - first, min_part, first):
            out.append((first,) + rest)
    return tuple(out)


def insert_part(part: Partition, p: int) -> Partition:
    lst = list(part)
    i = 0
    while i < len(lst) and lst[i] >= p:
        i += 1
    lst.insert(i, p)
    return tuple(lst)


class State:
    """Finite linear combination of PBW monomials with rational coefficients."""

    __slots__ = ("_terms",)

    def __init__(self, terms: Mapping[Partition, object] | None = None):
        clean: Vec = {}
        if terms:
            for part, c in terms.items():
                part = tuple(part)
                if any(part[i] < part[i + 1] for i in range(len(part) - 1)):
                    raise ValueError(f"partition {part} is not nonincreasing")
                c = to_scalar(c)
                if c:
                    clean[part] = clean.get(part, Fraction(0)) + c
                    if not clean[part]:
                        del clean[part]
        self._terms = clean

    @classmethod
    def _wrap(cls, vec: Vec) -> "State":
        st = cls.__new__(cls)
        st._terms = {k: v for k, v in vec.items() if v}
        return st

    @classmethod
    def basis(cls, part: Iterable[int], coeff=1) -> "State":
        return cls({tuple(part): coeff})

    @classmethod
    def vacuum(cls) -> "State":
        return cls({(): 1})

    @classmethod
    def zero(cls) -> "State":
        return cls()

    @property
    def terms(self) -> Vec:
        return dict(self._terms)

    def coeff(self, part: Partition) -> Fraction:
        return self._terms.get(tuple(part), Fraction(0))

    def items(self):
        return self._terms.items()

    def is_zero(self) -> bool:
        return not self._terms

    def __bool__(self) -> bool:
        return bool(self._terms)

    def weights(self) -> list[int]:
        return sorted({sum(p) for p in self._terms})

    def max_weight(self) -> int:
        return max((sum(p) for p in self._terms), default=-1)

    def is_homogeneous(self) -> bool:
        return len(self.weights()) <= 1

    def components(self) -> dict[int, "State"]:
        """Homogeneous components keyed by weight."""
        out: dict[int, Vec] = {}
        for p, c in self._terms.items():
            out.setdefault(sum(p), {})[p] = c
        return {w: State._wrap(v) for w, v in sorted(out.items())}

    def __add__(self, other: "State") -> "State":
        acc = dict(self._terms)
        add_into(acc, other._terms)
        return State._wrap(acc)

    def __sub__(self, other: "State") -> "State":
        acc = dict(self._terms)
        add_into(acc, other._terms, -1)
        return State._wrap(acc)

    def __neg__(self) -> "State":
        return State._wrap({p: -c for p, c in self._terms.items()})

    def __mul__(self, scalar) -> "State":
        s = to_scalar(scalar)
        return State._wrap({p: c * s for p, c in self._terms.items()} if s else {})

    __rmul__ = __mul__

    def __eq__(self, other) -> bool:
        if isinstance(other, State):
            return self._terms == other._terms
        if other == 0:
            return not self._terms
        return NotImplemented

    def __hash__(self) -> int:
        return hash(frozenset(self._terms.items()))

    def __iter__(self) -> Iterator[tuple[Partition, Fraction]]:
        return iter(sorted(self._terms.items(), key=lambda t: (sum(t[0]), t[0])))

    def __repr__(self) -> str:
        if not self._terms:
            return "State(0)"
        body = " + ".join(f"{c}*{list(p)}" for p, c in self)
        return f"State({body})"

    def to_json(self) -> list:
        """Canonical form: ``[[partition, "p/q"], ...]`` sorted by (weight, partition)."""
        return [[list(p), format_scalar(c)] for p, c in self]

    @classmethod
    def from_json(cls, data) -> "State":
        return cls({tuple(int(x) for x in p): to_scalar(c) for p, c in data})


class LieSpace:
    """Lowest-weight module of the Heisenberg or Virasoro Lie algebra.

    ``lie(n, part)`` applies ``a(n)`` (Heisenberg) or ``L(n)`` (Virasoro)
    to a PBW monomial.  ``vmode(v, j, w)`` applies the ``j``-th mode of the
    vertex-algebra monomial ``v`` to the monomial ``w`` of this space.
    """

    def __init__(self, family: str, lowest: Fraction, *, mu=0, c=0, min_part: int = 1):
        if family not in KINDS:
            raise ValueError(f"unknown family {family!r}")
        self.family = family
        self.mu = to_scalar(mu)
        self.c = to_scalar(c)
        self.lowest = to_scalar(lowest)
        self.min_part = min_part
        self._lie_cache: dict = {}
        self._mode_cache: dict = {}

    def basis(self, depth: int) -> tuple[Partition, ...]:
        if depth < 0:
            return ()
        return partitions(depth, self.min_part)

    # -- Lie algebra action ---------------------------------------------
    def lie(self, n: int, part: Partition) -> Vec:
        key = (n, part)
        hit = self._lie_cache.get(key)
        if hit is None:
            hit = self._heis(n, part) if self.family == HEISENBERG else self._vir(n, part)
            self._lie_cache[key] = hit
        return hit

    def _heis(self, n: int, part: Partition) -> Vec:
        if n < 0:
            return {insert_part(part, -n): Fraction(1)}
        if n == 0:
            return {part: self.mu} if self.mu else {}
        mult = part.count(n)
        if not mult:
            return {}
        lst = list(part)
        lst.remove(n)
        return {tuple(lst): Fraction(n * mult)}

    def _vir(self, n: int, part: Partition) -> Vec:
        if n == 0:
            wt = self.lowest + sum(part)
            return {part: wt} if wt else {}
        if not part:
            if n > 0 or -n < self.min_part:
                return {}
            return {(-n,): Fraction(1)}
        first, rest = part[0], part[1:]
        if n < 0 and -n >= first:
            return {(-n,) + part: Fraction(1)}
        # L(n) L(-f) rest = L(-f) L(n) rest + [L(n), L(-f)] rest
        out: Vec = {}
        for p, c in self._vir(n, rest).items():
            add_into(out, self._vir(-first, p), c)
        coeff = n + first
        if coeff:
            add_into(out, self.lie(n - first, rest), coeff)
        if n == first and self.c:
            central = self.c * (n ** 3 - n) / 12
            if central:
                add_into(out, {rest: Fraction(1)}, central)
        return out

    def lie_vec(self, n: int, vec: Mapping[Partition, Fraction]) -> Vec:
        out: Vec = {}
        for p, c in vec.items():
            add_into(out, self.lie(n, p), c)
        return out

    # -- vertex operators -----------------------------------------------
    def gen_mode(self, i: int, part: Partition) -> Vec:
        """Mode ``i`` of the strong generator (``a`` or ``omega``)."""
        return self.lie(i if self.family == HEISENBERG else i - 1, part)

    def _split(self, vpart: Partition) -> tuple[int, Partition]:
        first = vpart[0]
        m = -first if self.family == HEISENBERG else 1 - first
        return m, vpart[1:]

    def vmode(self, vpart: Partition, j: int, wpart: Partition) -> Vec:
        key = (vpart, j, wpart)
        hit = self._mode_cache.get(key)
        if hit is not None:
            return hit
        depth_w = sum(wpart)
        wt_v = sum(vpart)
        if depth_w + wt_v - j - 1 < 0:
            out: Vec = {}
        elif not vpart:
            out = {wpart: Fraction(1)} if j == -1 else {}
        else:
            out = {}
            m, rest = self._split(vpart)
            wt_rest = sum(rest)
            for i in range(0, wt_rest - j + depth_w):
                inner = self.vmode(rest, j + i, wpart)
                if not inner:
                    continue
                coeff = (-1) ** i * gen_binomial(m, i)
                for p, c in inner.items():
                    add_into(out, self.gen_mode(m - i, p), coeff * c)
            sign = -1 if m % 2 == 0 else 1
            top = depth_w if self.family == HEISENBERG else depth_w + 1
            for i in range(0, top + 1):
                aw = self.gen_mode(i, wpart)
                if not aw:
                    continue
                coeff = sign * (-1) ** i * gen_binomial(m, i)
                for p, c in aw.items():
                    add_into(out, self.vmode(rest, m + j - i, p), coeff * c)
        self._mode_cache[key] = out
        return out

    def vmode_vec(self, v: Mapping[Partition, Fraction], j: int, w: Mapping[Partition, Fraction]) -> Vec:
        out: Vec = {}
        for vp, vc in v.items():
            for wp, wc in w.items():
                add_into(out, self.vmode(vp, j, wp), vc * wc)
        return out


@dataclass(frozen=True)
class AlgebraDescriptor:
    kind: str
    weight_cutoff: int
    central_charge: Fraction | None = None

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"kind must be one of {KINDS}")
        if self.weight_cutoff < 2:
            raise ValueError("weight cutoff must be at least 2")
        if self.kind == VIRASORO:
            if self.central_charge is None:
                raise ValueError("Virasoro needs a central charge")
            object.__setattr__(self, "central_charge", to_scalar(self.central_charge))
        elif self.central_charge is not None:
            raise ValueError("the Heisenberg algebra takes no central charge")

    def tag(self) -> str:
        if self.kind == HEISENBERG:
            return f"heisenberg_W{self.weight_cutoff}"
        c = self.central_charge
        return f"virasoro_c{c.numerator}_{c.denominator}_W{self.weight_cutoff}"


class VertexAlgebra:
    """A built-in vertex operator algebra truncated at ``weight_cutoff``."""

    def __init__(self, desc: AlgebraDescriptor):
        self.desc = desc
        self.kind = desc.kind
        self.W = desc.weight_cutoff
        if self.kind == HEISENBERG:
            self.c = Fraction(1)
            self.space = LieSpace(HEISENBERG, 0, mu=0, min_part=1)
            self.generator = State.basis((1,))
            self.omega = State.basis((1, 1), Fraction(1, 2))
        else:
            self.c = desc.central_charge
            self.space = LieSpace(VIRASORO, 0, c=self.c, min_part=2)
            self.generator = State.basis((2,))
            self.omega = State.basis((2,))
        self.vacuum = State.vacuum()

    @classmethod
    def heisenberg(cls, weight_cutoff: int = 6) -> "VertexAlgebra":
        return cls(AlgebraDescriptor(HEISENBERG, weight_cutoff))

    @classmethod
    def virasoro(cls, c, weight_cutoff: int = 8) -> "VertexAlgebra":
        return cls(AlgebraDescriptor(VIRASORO, weight_cutoff, to_scalar(c)))

    def __repr__(self) -> str:
        return f"VertexAlgebra({self.desc.tag()})"

    # -- bases ------------------------------------------------------------
    def basis(self, w: int) -> tuple[Partition, ...]:
        return self.space.basis(w)

    def basis_upto(self, w: int) -> list[Partition]:
        return [p for k in range(w + 1) for p in self.basis(k)]

    def basis_states(self, w: int) -> list[State]:
        return [State.basis(p) for p in self.basis_upto(w)]

    def contains(self, part: Partition) -> bool:
        return all(x >= self.space.min_part for x in part)

    def check(self, v: State, what: str = "input") -> State:
        if v.max_weight() > self.W:
            raise TruncationExceeded(f"{what} has weight {v.max_weight()} > cutoff {self.W}")
        for p, _ in v.items():
            if not self.contains(p):
                raise ValueError(f"{list(p)} is not a basis monomial of {self.kind}")
        return v

    # -- modes ------------------------------------------------------------
    def _mode(self, u: State, j: int, v: State) -> State:
        return State._wrap(self.space.vmode_vec(u._terms, j, v._terms))

    def mode_product(self, u: State, j: int, v: State) -> State:
        """``u_(j) v``."""
        self.check(u, "u")
        self.check(v, "v")
        out = self._mode(u, j, v)
        return self.check(out, f"u_({j})v")

    def sl2_action(self, which: int, v: State) -> State:
        """``L(-1)v``, ``L(0)v`` or ``L(1)v``."""
        if which not in (-1, 0, 1):
            raise ValueError("which must be -1, 0 or 1")
        self.check(v)
        return self.check(self._L(which, v), f"L({which})v")

    def _L(self, n: int, v: State) -> State:
        if self.kind == VIRASORO:
            return State._wrap(self.space.lie_vec(n, v._terms))
        return self._mode(self.omega, n + 1, v)

    def L(self, n: int, v: State) -> State:
        """Virasoro mode ``L(n)`` without the cutoff check (internal use)."""
        return self._L(n, v)

    def dressed_residue_state(self, f: LaurentPoly, l: int, u: State, v: State) -> State:
        """``Res_x f(x) (1+x)^l Y((1+x)^{L(0)} u, x) v``."""
        self.check(u, "u")
        self.check(v, "v")
        out = self._dressed(f, l, u, v)
        return self.check(out, "dressed residue")

    def _dressed(self, f: LaurentPoly, l: int, u: State, v: State) -> State:
        if f.is_zero() or u.is_zero() or v.is_zero():
            return State.zero()
        acc: Vec = {}
        wv_max = v.max_weight()
        fmin = f.min_exp()
        for wu, comp in u.components().items():
            a = l + wu
            jmax = wu + wv_max - 1
            for j in range(fmin, jmax + 1):
                # coefficient of x^j in f(x) (1+x)^a
                cj = Fraction(0)
                for e, fe in f:
                    if e > j:
                        break
                    cj += fe * gen_binomial(a, j - e)
                if cj:
                    add_into(acc, self.space.vmode_vec(comp._terms, j, v._terms), cj)
        return State._wrap(acc)

    def weight_of(self, part: Partition) -> int:
        return sum(part)
