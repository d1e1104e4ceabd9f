"""Lower-bounded modules, the Omega filtration and the associated graded space.

A module here is a finite direct sum of Fock modules (Heisenberg) or Verma
modules (Virasoro), truncated at a common depth.  Basis keys are pairs
``(summand index, partition)``; the depth of a key is the size of its
partition, and its weight is the summand's lowest weight plus the depth.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Mapping

from .formal import format_scalar, to_scalar
from .linalg import TrackedEchelon, axpy, kernel
from .matrix import SizeMismatch, UMatrix
from .voa import HEISENBERG, VIRASORO, LieSpace, Partition, State, TruncationExceeded, VertexAlgebra, add_into

Key = tuple[int, Partition]
MVec = dict[Key, Fraction]
# a graded element: (level n, weight, representative index) -> coefficient
GrKey = tuple[int, Fraction, int]
GrVec = dict[GrKey, Fraction]


class UnstableFiltration(RuntimeError):
    """The Omega filtration kept changing as the v-weight cutoff was raised."""


class NotInFiltration(ArithmeticError):
    """A vector expected in Omega_n was not found there."""


@dataclass(frozen=True)
class Summand:
    kind: str
    lowest: Fraction
    mu: Fraction | None = None
    h: Fraction | None = None

    def label(self) -> str:
        if self.kind == "fock":
            return f"fock(mu={format_scalar(self.mu)})"
        return f"verma(h={format_scalar(self.h)})"


class LowerBoundedModule:
    """A truncated direct sum of Fock or Verma modules for ``V``."""

    def __init__(self, V: VertexAlgebra, summands: Iterable[Summand], depth_cutoff: int):
        if depth_cutoff < 0:
            raise ValueError("depth cutoff must be nonnegative")
        self.V = V
        self.summands = tuple(summands)
        self.D = depth_cutoff
        self.spaces = [self._space(s) for s in self.summands]

    def _space(self, s: Summand) -> LieSpace:
        cache = self.V.__dict__.setdefault("_module_spaces", {})
        if s not in cache:
            if s.kind == "fock":
                cache[s] = LieSpace(HEISENBERG, s.lowest, mu=s.mu, min_part=1)
            else:
                cache[s] = LieSpace(VIRASORO, s.lowest, c=self.V.c, min_part=1)
        return cache[s]

    @classmethod
    def fock(cls, V: VertexAlgebra, mu, depth_cutoff: int) -> "LowerBoundedModule":
        if V.kind != HEISENBERG:
            raise ValueError("Fock modules need the Heisenberg algebra")
        mu = to_scalar(mu)
        return cls(V, [Summand("fock", mu * mu / 2, mu=mu)], depth_cutoff)

    @classmethod
    def verma(cls, V: VertexAlgebra, h, depth_cutoff: int) -> "LowerBoundedModule":
        if V.kind != VIRASORO:
            raise ValueError("Verma modules need the Virasoro algebra")
        h = to_scalar(h)
        return cls(V, [Summand("verma", h, h=h)], depth_cutoff)

    @classmethod
    def direct_sum(cls, *mods: "LowerBoundedModule") -> "LowerBoundedModule":
        if not mods:
            raise ValueError("need at least one summand module")
        V = mods[0].V
        if any(m.V is not V for m in mods):
            raise ValueError("summands must share the vertex algebra")
        return cls(V, [s for m in mods for s in m.summands], min(m.D for m in mods))

    @classmethod
    def zero(cls, V: VertexAlgebra, depth_cutoff: int) -> "LowerBoundedModule":
        return cls(V, [], depth_cutoff)

    def with_depth(self, depth_cutoff: int) -> "LowerBoundedModule":
        return LowerBoundedModule(self.V, self.summands, depth_cutoff)

    def label(self) -> str:
        return " + ".join(s.label() for s in self.summands) or "zero"

    def to_json(self) -> dict:
        out = []
        for s in self.summands:
            item = {"kind": s.kind, "lowest": format_scalar(s.lowest)}
            if s.mu is not None:
                item["mu"] = format_scalar(s.mu)
            if s.h is not None:
                item["h"] = format_scalar(s.h)
            out.append(item)
        return {"algebra": self.V.desc.tag(), "summands": out, "depth_cutoff": self.D}

    # -- bases and weights ------------------------------------------------
    def key_weight(self, key: Key) -> Fraction:
        return self.summands[key[0]].lowest + sum(key[1])

    def keys(self, depth: int) -> list[Key]:
        return [(i, p) for i, sp in enumerate(self.spaces) for p in sp.basis(depth)]

    def lowest_vector(self, i: int = 0) -> MVec:
        return {(i, ()): Fraction(1)}

    def weight_depths(self, lam: Fraction) -> list[tuple[int, int]]:
        """Pairs ``(summand, depth)`` contributing to weight ``lam``."""
        out = []
        for i, s in enumerate(self.summands):
            d = lam - s.lowest
            if d.denominator == 1 and d >= 0:
                out.append((i, int(d)))
        return out

    def weights(self, max_depth: int | None = None) -> list[Fraction]:
        """Weights whose whole weight space lies within ``max_depth``."""
        max_depth = self.D if max_depth is None else max_depth
        cands = {s.lowest + d for s in self.summands for d in range(max_depth + 1)}
        return sorted(lam for lam in cands if all(d <= max_depth for _, d in self.weight_depths(lam)))

    def weight_space(self, lam: Fraction) -> list[Key]:
        out = []
        for i, d in self.weight_depths(lam):
            if d > self.D:
                raise TruncationExceeded(f"weight {lam} needs depth {d} > {self.D}")
            out.extend((i, p) for p in self.spaces[i].basis(d))
        return out

    def depth_of(self, lam: Fraction) -> int:
        return max((d for _, d in self.weight_depths(lam)), default=-1)

    # -- actions ----------------------------------------------------------
    def _check(self, vec: MVec) -> MVec:
        for i, p in vec:
            if sum(p) > self.D:
                raise TruncationExceeded(f"module vector at depth {sum(p)} > {self.D}")
        return vec

    def mode(self, v: State, j: int, w: Mapping[Key, Fraction]) -> MVec:
        """``(Y_W)_j(v) w``."""
        out: MVec = {}
        for (i, wp), wc in w.items():
            sp = self.spaces[i]
            for vp, vc in v.items():
                for p, c in sp.vmode(vp, j, wp).items():
                    add_into(out, {(i, p): c}, vc * wc)
        return self._check(out)

    def L(self, n: int, w: Mapping[Key, Fraction]) -> MVec:
        if self.V.kind == VIRASORO:
            out: MVec = {}
            for (i, wp), wc in w.items():
                for p, c in self.spaces[i].lie(n, wp).items():
                    add_into(out, {(i, p): c}, wc)
            return self._check(out)
        return self.mode(self.V.omega, n + 1, w)

    def residue_op(self, v: State, l: int, w: Mapping[Key, Fraction]) -> MVec:
        """``Res_x x^{l-1} Y_W(x^{L(0)} v, x) w`` (lowers weight by ``l``)."""
        out: MVec = {}
        for wv, comp in v.components().items():
            add_into(out, self.mode(comp, wv + l - 1, w))
        return out


def split_by_weight(M: LowerBoundedModule, vec: Mapping[Key, Fraction]) -> dict[Fraction, MVec]:
    out: dict[Fraction, MVec] = {}
    for key, c in vec.items():
        out.setdefault(M.key_weight(key), {})[key] = c
    return out


# -- the Omega filtration ----------------------------------------------------


@dataclass
class OmegaFiltration:
    """Omega_n intersected with each retained weight space.

    ``subspaces[(n, lam)]`` is a basis of the common kernel of every mode
    ``v_(j)`` with ``wt v <= v_cutoff`` lowering weight by more than ``n``.
    Raising ``v_cutoff`` can only shrink these spaces; a basis key is
    certified outside Omega_n when ``witnesses`` records a mode that does
    not kill it.
    """

    module: LowerBoundedModule
    n_max: int
    v_cutoff: int
    max_depth: int
    subspaces: dict[tuple[int, Fraction], list[MVec]] = field(default_factory=dict)
    witnesses: dict[tuple[int, Fraction], list[dict]] = field(default_factory=dict)
    history: list[dict] = field(default_factory=list)
    stable: bool = False

    def dims(self) -> dict[tuple[int, Fraction], int]:
        return {key: len(b) for key, b in sorted(self.subspaces.items())}

    def weights(self) -> list[Fraction]:
        return sorted({lam for _, lam in self.subspaces})

    def contains(self, n: int, vec: Mapping[Key, Fraction]) -> bool:
        M = self.module
        for lam, part in split_by_weight(M, vec).items():
            if n < 0:
                return False
            if M.depth_of(lam) <= n:
                continue
            if n > self.n_max:
                raise ValueError(f"level {n} above the computed {self.n_max}")
            if (n, lam) not in self.subspaces:
                raise TruncationExceeded(f"weight {lam} outside the computed filtration")
            keys = M.weight_space(lam)
            idx = {k: i for i, k in enumerate(keys)}
            ech = TrackedEchelon()
            for b in self.subspaces[(n, lam)]:
                ech.add({idx[k]: c for k, c in b.items()})
            if ech.express({idx[k]: c for k, c in part.items()}) is None:
                return False
        return True

    def truncation_space(self, n: int, lam: Fraction) -> list[Key]:
        """Keys of depth at most ``n`` at weight ``lam``: the space T_n."""
        return [k for k in self.module.weight_space(lam) if sum(k[1]) <= n]

    def to_json(self) -> dict:
        return {
            "module": self.module.to_json(),
            "n_max": self.n_max,
            "v_cutoff": self.v_cutoff,
            "max_depth": self.max_depth,
            "stable": self.stable,
            "dims": [[n, format_scalar(lam), d] for (n, lam), d in self.dims().items()],
            "history": self.history,
        }


def _weight_ops(M: LowerBoundedModule, lam: Fraction, v_cutoff: int):
    """Every nonzero restriction of a weight-lowering mode to ``W_lam``.

    Returns ``(shift, vpart, j, images)`` tuples where ``images[i]`` is the
    image of the ``i``-th key of the weight space.  Layers of fixed ``wt v``
    are memoized on the module so raising the cutoff only adds new layers.
    """
    memo = M.__dict__.setdefault("_ops_memo", {})
    out = []
    for wv in range(1, v_cutoff + 1):
        key = (lam, wv)
        if key not in memo:
            memo[key] = _ops_layer(M, lam, wv)
        out.extend(memo[key])
    return out


def _ops_layer(M: LowerBoundedModule, lam: Fraction, wv: int) -> list:
    keys = M.weight_space(lam)
    top = M.depth_of(lam)
    layer = []
    for vp in M.V.basis(wv):
        v = State.basis(vp)
        for s in range(1, top + 1):
            j = s + wv - 1
            images = [M.mode(v, j, {k: Fraction(1)}) for k in keys]
            if any(images):
                layer.append((s, vp, j, images))
    return layer


def omega_filtration(M: LowerBoundedModule, n_max: int, v_cutoff: int, max_depth: int | None = None) -> OmegaFiltration:
    max_depth = M.D if max_depth is None else min(max_depth, M.D)
    filt = OmegaFiltration(M, n_max, v_cutoff, max_depth)
    for lam in M.weights(max_depth):
        keys = M.weight_space(lam)
        ops = _weight_ops(M, lam, v_cutoff)
        for n in range(n_max + 1):
            rows = []
            wit = []
            found: set[Key] = set()
            for s, vp, j, images in ops:
                if s <= n:
                    continue
                # one row per (operator, target coordinate)
                op_rows: dict[Key, dict[int, Fraction]] = {}
                for col, img in enumerate(images):
                    for t, c in img.items():
                        op_rows.setdefault(t, {})[col] = c
                    if img and keys[col] not in found:
                        found.add(keys[col])
                        wit.append({"key": [keys[col][0], list(keys[col][1])], "v": list(vp), "j": j})
                rows.extend(op_rows[t] for t in sorted(op_rows))
            basis = kernel(len(keys), rows)
            filt.subspaces[(n, lam)] = [{keys[i]: c for i, c in sorted(b.items())} for b in basis]
            filt.witnesses[(n, lam)] = sorted(wit, key=lambda w: (w["key"], w["v"], w["j"]))
    return filt


def stabilized_filtration(
    M: LowerBoundedModule, n_max: int, v_cutoff: int, max_depth: int | None = None, max_steps: int = 8
) -> OmegaFiltration:
    """Raise the v-weight cutoff until the dimensions stay fixed for two increments.

    Returns the filtration at the final cutoff with ``stable`` set
    accordingly and the dimension history attached.
    """
    history = []
    filts = []
    for step in range(max_steps + 3):
        vc = v_cutoff + step
        filt = omega_filtration(M, n_max, vc, max_depth)
        filts.append(filt)
        history.append({"v_cutoff": vc, "dims": [[n, format_scalar(lam), d] for (n, lam), d in filt.dims().items()]})
        if len(filts) >= 3 and filts[-1].dims() == filts[-2].dims() == filts[-3].dims():
            filt.stable = True
            break
    filt = filts[-1]
    filt.history = history
    return filt


# -- the associated graded space ----------------------------------------------


class _Piece:
    """``Gr_n`` at one weight: complement representatives and coordinates."""

    def __init__(self, keys: list[Key], lower: list[MVec], upper: list[MVec]):
        self.keys = keys
        self.idx = {k: i for i, k in enumerate(keys)}
        self.ech = TrackedEchelon()
        self.rep_of_input: dict[int, int] = {}
        self.reps: list[MVec] = []
        for b in lower:
            self.ech.add(self._vec(b))
        self.n_lower = self.ech.count
        for b in upper:
            i = self.ech.count
            if self.ech.add(self._vec(b)):
                self.rep_of_input[i] = len(self.reps)
                self.reps.append(b)

    def _vec(self, x: Mapping[Key, Fraction]) -> dict[int, Fraction]:
        return {self.idx[k]: c for k, c in x.items()}

    def coordinates(self, x: Mapping[Key, Fraction]) -> dict[int, Fraction] | None:
        combo = self.ech.express(self._vec(x))
        if combo is None:
            return None
        return {self.rep_of_input[i]: c for i, c in combo.items() if i in self.rep_of_input}

    def in_lower(self, x: Mapping[Key, Fraction]) -> bool:
        coords = self.coordinates(x)
        return coords is not None and not any(coords.values())


class GrStructure:
    """Levels ``0..N`` of ``Gr(W)`` at the weights retained by the filtration.

    Level ``N + 1`` is also built so that ``L(-1)`` on ``Gr_N`` and the
    raising checks have a target; it is not part of ``Gr^N``.
    """

    def __init__(self, filt: OmegaFiltration, N: int):
        self.filt = filt
        self.M = filt.module
        self.V = self.M.V
        self.N = N
        self.top = min(N + 1, filt.n_max)
        self.pieces: dict[tuple[int, Fraction], _Piece] = {}
        for lam in filt.weights():
            keys = self.M.weight_space(lam)
            for n in range(self.top + 1):
                lower = filt.subspaces[(n - 1, lam)] if n > 0 else []
                self.pieces[(n, lam)] = _Piece(keys, lower, filt.subspaces[(n, lam)])
        self._theta_cache: dict = {}

    # -- bookkeeping ------------------------------------------------------
    def dim(self, n: int, lam: Fraction) -> int:
        piece = self.pieces.get((n, lam))
        return len(piece.reps) if piece else 0

    def weights(self, n: int | None = None) -> list[Fraction]:
        lams = self.filt.weights()
        if n is None:
            return lams
        return [lam for lam in lams if self.dim(n, lam)]

    def basis(self, n: int, max_depth: int | None = None) -> list[GrVec]:
        out = []
        for lam in self.filt.weights():
            if max_depth is not None and self.M.depth_of(lam) > max_depth:
                continue
            out.extend({(n, lam, r): Fraction(1)} for r in range(self.dim(n, lam)))
        return out

    def all_basis(self, max_depth: int | None = None, levels: Iterable[int] | None = None) -> list[GrVec]:
        levels = range(self.N + 1) if levels is None else levels
        return [g for n in levels for g in self.basis(n, max_depth)]

    def lift(self, g: Mapping[GrKey, Fraction]) -> dict[int, dict[Fraction, MVec]]:
        """Representatives in ``Omega_n`` of each level and weight component."""
        out: dict[int, dict[Fraction, MVec]] = {}
        for (n, lam, r), c in g.items():
            vec = out.setdefault(n, {}).setdefault(lam, {})
            add_into(vec, self.pieces[(n, lam)].reps[r], c)
        return out

    def project(self, n: int, x: Mapping[Key, Fraction]) -> GrVec:
        """The class of ``x`` in ``Gr_n``; raises if ``x`` is not in Omega_n."""
        out: GrVec = {}
        if n < 0:
            if x:
                raise NotInFiltration("nonzero vector in Omega_{-1}")
            return out
        for lam, part in split_by_weight(self.M, x).items():
            piece = self.pieces.get((n, lam))
            if piece is None:
                raise TruncationExceeded(f"weight {lam} at level {n} is outside the retained window")
            coords = piece.coordinates(part)
            if coords is None:
                raise NotInFiltration(f"vector at weight {lam} is not in Omega_{n}")
            for r, c in coords.items():
                if c:
                    out[(n, lam, r)] = c
        return out

    def in_lower(self, n: int, x: Mapping[Key, Fraction]) -> bool:
        """Whether ``x`` lies in Omega_{n-1}."""
        if not x:
            return True
        if n <= 0:
            return False
        return all(self.pieces[(n, lam)].in_lower(part) for lam, part in split_by_weight(self.M, x).items())

    # -- operators ----------------------------------------------------------
    def raw_theta(self, v: State, k: int, l: int, x: Mapping[Key, Fraction]) -> MVec:
        """``Res_x x^{l-k-1} Y_W(x^{L(0)} v, x) x`` on the module itself."""
        out: MVec = {}
        for wv, comp in v.components().items():
            add_into(out, self.M.mode(comp, wv + l - k - 1, x))
        return out

    def theta(self, v: State, k: int, l: int, g: Mapping[GrKey, Fraction]) -> GrVec:
        """``theta([v]_{kl}) g``."""
        if k < 0 or l < 0:
            return {}
        out: GrVec = {}
        for lam, x in self.lift(g).get(l, {}).items():
            y = self.raw_theta(v, k, l, x)
            add_into(out, self.project(k, y))
        return out

    def L(self, n: int, g: Mapping[GrKey, Fraction]) -> GrVec:
        """``L(n)`` for ``n`` in ``(-1, 0, 1)``; it moves level ``m`` to ``m - n``."""
        if n not in (-1, 0, 1):
            raise ValueError("only L(-1), L(0), L(1) act on Gr")
        out: GrVec = {}
        for level, comps in self.lift(g).items():
            for lam, x in comps.items():
                add_into(out, self.project(level - n, self.M.L(n, x)))
        return out

    def theta_matrix(self, v: State, k: int, l: int, lam: Fraction) -> list[GrVec]:
        """Images of the basis of ``Gr_l`` at weight ``lam``."""
        key = (v, k, l, lam)
        if key not in self._theta_cache:
            self._theta_cache[key] = [self.theta(v, k, l, {(l, lam, r): Fraction(1)}) for r in range(self.dim(l, lam))]
        return self._theta_cache[key]

    def to_json(self) -> dict:
        return {
            "N": self.N,
            "module": self.M.to_json(),
            "v_cutoff": self.filt.v_cutoff,
            "pieces": [
                {"level": n, "weight": format_scalar(lam), "reps": [mvec_to_json(r) for r in p.reps]}
                for (n, lam), p in sorted(self.pieces.items())
                if n <= self.N
            ],
        }


def mvec_to_json(x: Mapping[Key, Fraction]) -> list:
    return [[i, list(p), format_scalar(c)] for (i, p), c in sorted(x.items(), key=lambda t: (t[0][0], sum(t[0][1]), t[0][1]))]


def grvec_to_json(g: Mapping[GrKey, Fraction]) -> list:
    return [[n, format_scalar(lam), r, format_scalar(c)] for (n, lam, r), c in sorted(g.items())]


def build_gr(
    M: LowerBoundedModule, N: int, v_weight_cutoff: int, max_steps: int = 8, require_stable: bool = True
) -> GrStructure:
    """``Gr^N(W)`` over the weights the module window supports.

    The filtration is computed to level ``N + 1`` and stabilized in the
    v-weight cutoff; ``UnstableFiltration`` is raised if it never settles.
    """
    filt = stabilized_filtration(M, N + 1, v_weight_cutoff, max_steps=max_steps)
    if require_stable and not filt.stable:
        raise UnstableFiltration(f"Omega filtration still changing at v-cutoff {filt.v_cutoff}")
    return GrStructure(filt, N)


def theta_apply(G: GrStructure, A: UMatrix, g: Mapping[GrKey, Fraction]) -> GrVec:
    """Linear extension of ``theta`` over the entries of ``A``."""
    if A.size != G.N:
        raise SizeMismatch(f"matrix of size {A.size} acting on Gr^{G.N}")
    out: GrVec = {}
    for (k, l), v in A.entries().items():
        add_into(out, G.theta(v, k, l, g))
    return out


def grvec_sub(a: Mapping[GrKey, Fraction], b: Mapping[GrKey, Fraction]) -> GrVec:
    out = dict(a)
    axpy(out, b, Fraction(-1))
    return out


def grvec_scale(a: Mapping[GrKey, Fraction], c) -> GrVec:
    c = to_scalar(c)
    return {k: v * c for k, v in a.items()} if c else {}
