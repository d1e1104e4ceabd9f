"""Zhu's product, its level-N generalization, and checks at the (N, N) corner."""

from __future__ import annotations

from .formal import LaurentPoly, gen_binomial
from .linalg import TrackedEchelon
from .matrix import UMatrix, diamond
from .reduction import canonical_reduce, reduced_basis
from .report import Report
from .voa import HEISENBERG, State, TruncationExceeded, VertexAlgebra


def dlm_kernel(N: int) -> LaurentPoly:
    """``sum_{m=0}^{N} C(-N-1, m) x^{-N-m-1}``."""
    return LaurentPoly({-N - m - 1: gen_binomial(-N - 1, m) for m in range(N + 1)})


def dlm_product(V: VertexAlgebra, N: int, u: State, v: State) -> State:
    """``u *_N v``; for ``N = 0`` this is Zhu's ``u * v``."""
    if N < 0:
        raise ValueError("level must be nonnegative")
    return V.dressed_residue_state(dlm_kernel(N), N, u, v)


def zhu_product(V: VertexAlgebra, u: State, v: State) -> State:
    return dlm_product(V, 0, u, v)


def corner_agreement(V: VertexAlgebra, N_max: int, wt_max: int) -> Report:
    """``u *_N v`` against the ``(N, N)`` entry of ``[u]_{NN} <> [v]_{NN}``."""
    rep = Report("corner-agreement", "corner-product", {"N_max": N_max, "weight": wt_max, "algebra": V.desc.tag()})
    basis = V.basis_upto(wt_max)
    for N in range(N_max + 1):
        for up in basis:
            for vp in basis:
                u, v = State.basis(up), State.basis(vp)
                try:
                    lhs = dlm_product(V, N, u, v)
                    rhs = diamond(V, UMatrix.elementary(u, N, N, N), UMatrix.elementary(v, N, N, N))[(N, N)]
                except TruncationExceeded:
                    rep.skipped += 1
                    continue
                rep.record(lhs == rhs, N=N, u=up, v=vp, product=lhs, corner=rhs)
    return rep


def center_check(V: VertexAlgebra, N: int, v_cutoff: int) -> Report:
    """``[omega *_N v - v *_N omega]_{NN}`` reduces to zero for every basis ``v``."""
    rep = Report("center", "omega-central", {"N": N, "v_cutoff": v_cutoff, "algebra": V.desc.tag()})
    for vp in V.basis_upto(v_cutoff):
        v = State.basis(vp)
        diff = dlm_product(V, N, V.omega, v) - dlm_product(V, N, v, V.omega)
        red = canonical_reduce(V, UMatrix.elementary(diff, N, N, N))
        rep.record(red.is_zero(), v=vp, commutator=diff, residue=red)
    return rep


def zhu_associativity(V: VertexAlgebra, triples, N: int = 0) -> Report:
    """``[(u*v)*w - u*(v*w)]_{NN}`` reduces to zero on the given triples."""
    rep = Report("zhu-associativity", "corner-associative", {"N": N, "algebra": V.desc.tag()})
    for u, v, w in triples:
        try:
            diff = dlm_product(V, N, dlm_product(V, N, u, v), w) - dlm_product(V, N, u, dlm_product(V, N, v, w))
            red = canonical_reduce(V, UMatrix.elementary(diff, N, N, N))
        except TruncationExceeded:
            rep.skipped += 1
            continue
        rep.record(red.is_zero(), u=u, v=v, w=w, residue=red)
    return rep


def polynomial_algebra_probe(V: VertexAlgebra, w_max: int) -> Report:
    """Evidence that the (0, 0) corner of the Heisenberg quotient is ``C[x]``.

    Checks that the classes of ``a(-1)^m 1`` for ``m <= w_max`` are linearly
    independent modulo the O-span (one free monomial per weight), and that
    the ``m``-th Zhu power of ``a`` reduces to the class of ``a(-1)^m 1``.
    The certificate maps each monomial to the coefficients of its reduced
    form in the power basis (keyed by the exponent ``m``).
    """
    if V.kind != HEISENBERG:
        raise ValueError("the probe is defined for the Heisenberg algebra")
    if w_max > V.W:
        raise TruncationExceeded(f"w_max {w_max} exceeds cutoff {V.W}")
    rep = Report("polynomial-algebra", "zhu-algebra-polynomial", {"w_max": w_max, "algebra": V.desc.tag()})
    red = reduced_basis(V, (0, 0), V.W)
    powers = [State.basis((1,) * m) for m in range(w_max + 1)]

    # independence: the powers reduce to themselves and are linearly independent
    ech = TrackedEchelon()
    coords = red.coords
    for m, st in enumerate(powers):
        reduced = red.reduce_state(st)
        grew = ech.add(coords.vector(reduced))
        rep.record(grew, check="independent", m=m, reduced=reduced)
    ranks = {w: len(red.free_monomials(w)) for w in range(w_max + 1)}
    rep.details["free_per_weight"] = ranks
    for w, r in ranks.items():
        rep.record(r == 1, check="rank-one", weight=w, rank=r)

    # certificates: every monomial reduces to a combination of powers
    certs = {}
    for w in range(w_max + 1):
        row = {}
        for p in V.basis(w):
            reduced = red.reduce_state(State.basis(p))
            combo = {len(q): c for q, c in reduced.items()}
            in_span = all(q == (1,) * len(q) for q, _ in reduced.items())
            row[",".join(map(str, p)) or "vac"] = combo
            rep.record(in_span, check="certificate", monomial=p, reduced=reduced)
        certs[w] = row
    rep.details["certificates"] = certs

    # a^{*m} reduces to a(-1)^m 1
    acc = State.vacuum()
    for m in range(w_max + 1):
        reduced = red.reduce_state(acc)
        rep.record(reduced == powers[m], check="power", m=m, reduced=reduced)
        if m < w_max:
            acc = zhu_product(V, acc, V.generator)
    return rep

