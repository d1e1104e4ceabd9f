from fractions import Fraction
from math import factorial

import pytest
from hypothesis import given
from hypothesis import strategies as st

from higherzhu.formal import LaurentPoly
from higherzhu.suites import FaultyAlgebra, voa_axiom_suite
from higherzhu.voa import AlgebraDescriptor, State, TruncationExceeded, VertexAlgebra, partitions


# -- an independent free-boson oracle ------------------------------------------
# States are dicts partition -> coefficient with alpha(-n) creation operators;
# alpha(n) for n > 0 annihilates with [alpha(m), alpha(n)] = m delta_{m+n,0}.


def osc(n, vec):
    out = {}
    for part, c in vec.items():
        if n < 0:
            new = tuple(sorted(part + (-n,), reverse=True))
            out[new] = out.get(new, 0) + c
        elif n > 0:
            hits = part.count(n)
            if hits:
                lst = list(part)
                lst.remove(n)
                new = tuple(lst)
                out[new] = out.get(new, 0) + c * n * hits
    return {p: c for p, c in out.items() if c}


def add(acc, vec, c=1):
    for p, x in vec.items():
        acc[p] = acc.get(p, 0) + c * x
    return {p: x for p, x in acc.items() if x}


def oracle_mode(u, j, v):
    """``u_(j) v`` for ``u`` in {a, alpha(-2)1, alpha(-1)^2 1}."""
    if u == (1,):
        return osc(j, v)
    if u == (2,):
        return {p: -j * c for p, c in osc(j - 1, v).items()}
    if u == (1, 1):
        acc = {}
        span = sum(sum(p) for p in v) + abs(j) + 4
        for m in range(-span, span + 1):
            n = j - 1 - m
            lo, hi = min(m, n), max(m, n)
            acc = add(acc, osc(lo, osc(hi, v)))
        return acc
    raise ValueError(u)


@pytest.fixture(scope="module")
def wide():
    return VertexAlgebra.heisenberg(12)


@pytest.mark.parametrize("u", [(1,), (2,), (1, 1)])
def test_modes_match_oscillator_oracle(wide, u):
    for vp in wide.basis_upto(4):
        for j in range(-3, 5):
            got = wide.mode_product(State.basis(u), j, State.basis(vp))
            want = oracle_mode(u, j, {vp: Fraction(1)})
            assert got == State(want), (u, j, vp)


def test_mode_examples(heis, vir, a):
    one = State.vacuum()
    assert heis.mode_product(a, 1, a) == one
    assert heis.mode_product(a, 0, a) == 0
    for vp in heis.basis_upto(4):
        v = State.basis(vp)
        assert heis.mode_product(one, -1, v) == v
    assert vir.mode_product(vir.omega, 3, vir.omega) == one * Fraction(1, 4)


def test_sl2_examples(heis, a):
    assert heis.sl2_action(0, a) == a
    assert heis.sl2_action(1, heis.omega) == 0
    assert heis.sl2_action(-1, State.vacuum()) == 0
    with pytest.raises(ValueError):
        heis.sl2_action(2, a)


def test_dressed_residue_examples(heis, a):
    x = LaurentPoly.monomial
    for vp in heis.basis_upto(3):
        v = State.basis(vp)
        assert heis.dressed_residue_state(x(-1), 0, State.vacuum(), v) == v
    # Res x^-1 (1+x)^2 Y(a,x)a = a_(-1)a + 2 a_(0)a + a_(1)a
    assert heis.dressed_residue_state(x(-1), 1, a, a) == State({(1, 1): 1, (): 1})
    # Res x^-2 (1+x) Y(a,x)a = a_(-2)a + a_(-1)a
    assert heis.dressed_residue_state(x(-2), 0, a, a) == State({(2, 1): 1, (1, 1): 1})


def test_lower_truncation_and_vacuum(heis, vir):
    for V in (heis, vir):
        for up in V.basis_upto(3):
            u = State.basis(up)
            assert V.mode_product(u, 0, State.vacuum()) == 0
            for vp in V.basis_upto(3):
                v = State.basis(vp)
                for j in range(sum(up) + sum(vp), sum(up) + sum(vp) + 3):
                    assert V.mode_product(u, j, v) == 0


def test_creation_is_translation(vir):
    for up in vir.basis_upto(4):
        u = State.basis(up)
        lifted = u
        for p in range(0, 8 - sum(up) + 1):
            assert vir.mode_product(u, -1 - p, State.vacuum()) == lifted * Fraction(1, factorial(p))
            lifted = vir.L(-1, lifted)


def test_virasoro_bracket_on_vacuum_module():
    c = Fraction(-22, 5)
    V = VertexAlgebra.virasoro(c, 8)
    for vp in V.basis_upto(4):
        v = State.basis(vp)
        for m in range(-2, 3):
            for n in range(-2, 3):
                lhs = V.L(m, V.L(n, v)) - V.L(n, V.L(m, v))
                rhs = V.L(m + n, v) * (m - n)
                if m + n == 0:
                    rhs = rhs + v * (c / 12 * (m**3 - m))
                assert lhs == rhs


def test_truncation_window_enforced(heis, a):
    big = State.basis((4, 4))
    with pytest.raises(TruncationExceeded):
        heis.mode_product(big, -2, big)
    with pytest.raises(TruncationExceeded):
        heis.check(State.basis((9,)))


def test_rejects_foreign_monomials(vir):
    with pytest.raises(ValueError):
        vir.check(State.basis((1,)))
    with pytest.raises(ValueError):
        State({(1, 2): 1})


def test_descriptor_validation():
    with pytest.raises(ValueError):
        AlgebraDescriptor("lattice", 4)
    with pytest.raises(ValueError):
        AlgebraDescriptor("virasoro", 4)
    with pytest.raises(ValueError):
        AlgebraDescriptor("heisenberg", 4, Fraction(1))
    with pytest.raises(ValueError):
        VertexAlgebra.virasoro("0.5", 4)
    assert VertexAlgebra.virasoro("-22/5", 4).desc.tag() == "virasoro_c-22_5_W4"


def test_partition_counts():
    assert [len(partitions(n)) for n in range(8)] == [1, 1, 2, 3, 5, 7, 11, 15]
    assert [len(partitions(n, min_part=2)) for n in range(8)] == [1, 0, 1, 1, 2, 2, 4, 4]


coeffs = st.fractions(max_denominator=9).filter(bool)
states = st.dictionaries(st.sampled_from(partitions(4) + partitions(3) + ((),)), coeffs, max_size=6).map(State)


@given(states)
def test_state_json_roundtrip(s):
    assert State.from_json(s.to_json()) == s
    assert all(isinstance(c, str) and "/" in c for _, c in s.to_json())


@given(states, states, st.integers(-3, 3))
def test_modes_are_linear(s, t, j):
    V = VertexAlgebra.heisenberg(14)
    a = State.basis((1,))
    assert V._mode(a, j, s + t) == V._mode(a, j, s) + V._mode(a, j, t)
    assert V._mode(s + t, j, a) == V._mode(s, j, a) + V._mode(t, j, a)


def test_axiom_suite_small(heis, vir):
    for V in (VertexAlgebra.heisenberg(5), VertexAlgebra.virasoro(1, 6)):
        rep = voa_axiom_suite(V, op_weight=2)
        assert rep.passed, rep.failures[:2]
        assert rep.checks > 100


def test_axiom_suite_detects_corrupted_modes():
    rep = voa_axiom_suite(FaultyAlgebra(VertexAlgebra.heisenberg(5)), op_weight=2)
    assert not rep.passed
    assert rep.failures and rep.failure_count >= len(rep.failures)
