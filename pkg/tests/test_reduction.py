import json
import random
import threading
from concurrent.futures import ProcessPoolExecutor
from fractions import Fraction
from itertools import product

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from higherzhu.linalg import Echelon, kernel, rank
from higherzhu.matrix import UMatrix, diamond, enumerate_generators, sl2_shift, unit_matrix
from higherzhu.reduction import (
    CacheWarning,
    ReducedBasis,
    assemble_block,
    cache_path,
    canonical_reduce,
    class_basis,
    cn_quotient_dimension,
    ideal_experiment,
    in_o_span,
    publish,
    quotient_dimension_table,
    quotient_structure_constants,
    reduced_basis,
)
from higherzhu.voa import State, TruncationExceeded, VertexAlgebra

E = UMatrix.elementary


# -- linear algebra ---------------------------------------------------------------

vectors = st.dictionaries(st.integers(0, 5), st.fractions(max_denominator=5).filter(bool), max_size=4)


@given(st.lists(vectors, max_size=6))
def test_echelon_rank_and_kernel(rows):
    r = rank(rows)
    ker = kernel(6, rows)
    assert r + len(ker) == 6
    for k in ker:
        for row in rows:
            assert sum((c * k.get(i, 0) for i, c in row.items()), Fraction(0)) == 0


@given(st.lists(vectors, max_size=6))
def test_echelon_reduce_idempotent(rows):
    ech = Echelon()
    for row in rows:
        ech.add(row)
    for row in rows:
        assert not ech.reduce(row)
    probe = {0: Fraction(1), 3: Fraction(2)}
    once = ech.reduce(probe)
    assert ech.reduce(once) == once


# -- blocks and canonical forms ------------------------------------------------------


def test_assemble_block_weight_zero(heis):
    block = assemble_block(heis, 0, (0, 0), 0)
    assert all(not row for row in block.generator_rows)


def test_assemble_block_leading_weights(heis, a):
    w2 = assemble_block(heis, 0, (0, 0), 2)
    target = State({(2,): 1, (1,): 1})
    assert any(g.state == target for g in w2.generators)
    assert sorted(w2.leading_basis) == [(1, 1), (2,)]
    w1 = assemble_block(heis, 0, (0, 0), 1)
    assert all(g.leading_weight == 1 for g in w1.generators)


def test_assemble_block_rejects_high_weight(heis):
    with pytest.raises(TruncationExceeded):
        assemble_block(heis, 0, (0, 0), heis.W + 1)


def test_generators_reduce_to_zero(heis, vir):
    for V in (heis, vir):
        for slot in product(range(2), repeat=2):
            for g in enumerate_generators(V, slot, 5):
                assert canonical_reduce(V, g.realized(1)).is_zero()


def test_right_unit_and_sl2_products_vanish(heis):
    for N in (1, 2):
        for k, n, l in product(range(N + 1), repeat=3):
            for vp in heis.basis_upto(2):
                v = State.basis(vp)
                A = E(v, k, l, N)
                assert in_o_span(heis, diamond(heis, A, unit_matrix(N)) - A)
                u = State.basis((1,))
                P = diamond(heis, E(sl2_shift(heis, u, n - k), k, n, N), E(v, n, l, N))
                assert in_o_span(heis, P)


def test_vacuum_is_not_in_o(heis, vir):
    for V in (heis, vir):
        assert not in_o_span(V, E(State.vacuum(), 0, 0, 0))


@settings(max_examples=30, deadline=None)
@given(st.lists(st.tuples(st.integers(0, 4), st.fractions(max_denominator=4)), max_size=4), st.integers(0, 100))
def test_canonical_reduce_linear_and_idempotent(terms, seed):
    V = VertexAlgebra.heisenberg(6)
    basis = V.basis_upto(4)
    rng = random.Random(seed)
    st_a = State({basis[rng.randrange(len(basis))]: c for _, c in terms})
    st_b = State.basis(basis[rng.randrange(len(basis))], 3)
    A, B = E(st_a, 0, 1, 1), E(st_b, 0, 1, 1)
    rA, rB = canonical_reduce(V, A), canonical_reduce(V, B)
    assert canonical_reduce(V, rA) == rA
    assert canonical_reduce(V, A + B * 2) == rA + rB * 2
    assert in_o_span(V, A - rA)


def test_canonical_reduce_window(heis):
    with pytest.raises(TruncationExceeded):
        canonical_reduce(heis, E(State.basis((9,)), 0, 0, 0))


# -- dimensions -------------------------------------------------------------------


def test_heisenberg_dimension_table(heis):
    table = quotient_dimension_table(heis, 1, 6)
    assert [table[((0, 0), w)] for w in range(7)] == [1] * 7
    assert [table[((0, 1), w)] for w in range(7)] == [0, 1, 1, 1, 1, 1, 1]
    assert [table[((1, 1), w)] for w in range(7)] == [1, 1, 1, 1, 2, 2, 2]
    assert all(d >= 0 for d in table.values())


def test_virasoro_dimension_table(vir):
    table = quotient_dimension_table(vir, 0, 8)
    # weight 1 has no basis vectors; the vacuum class survives at weight 0
    assert table[((0, 0), 1)] == 0
    assert [table[((0, 0), w)] for w in range(9)] == [1, 0, 1, 0, 1, 0, 1, 0, 1]


def brute_c2(V, n, w):
    """Independent span computation of u_(-n)v with the naive rank of a dense matrix."""
    cols = list(V.basis(w))
    rows = []
    for up in V.basis_upto(w):
        for vp in V.basis_upto(w):
            if up and sum(up) + sum(vp) + n - 1 == w:
                img = V._mode(State.basis(up), -n, State.basis(vp))
                rows.append([img.coeff(p) for p in cols])
    # Gaussian elimination on a dense list of lists
    r = 0
    for c in range(len(cols)):
        piv = next((i for i in range(r, len(rows)) if rows[i][c]), None)
        if piv is None:
            continue
        rows[r], rows[piv] = rows[piv], rows[r]
        for i in range(len(rows)):
            if i != r and rows[i][c]:
                f = rows[i][c] / rows[r][c]
                rows[i] = [x - f * y for x, y in zip(rows[i], rows[r])]
        r += 1
    return len(cols) - r


def test_c2_dimensions(heis, vir):
    assert [cn_quotient_dimension(heis, 2, 4)[w] for w in range(5)] == [1, 1, 1, 1, 1]
    assert cn_quotient_dimension(vir, 2, 2)[2] == 1
    for V in (heis, vir):
        dims = cn_quotient_dimension(V, 2, 6)
        assert dims[0] == 1
        assert all(dims[w] == brute_c2(V, 2, w) for w in range(7))
    with pytest.raises(ValueError):
        cn_quotient_dimension(heis, 1, 3)


def test_structure_constants(heis):
    basis = class_basis(heis, 1, 2)
    table = quotient_structure_constants(heis, 1, 2)
    one = canonical_reduce(heis, unit_matrix(1))
    for i, A in enumerate(basis):
        assert canonical_reduce(heis, diamond(heis, one, A)) == canonical_reduce(heis, A)
        for j, B in enumerate(basis):
            if A.slots()[0][1] != B.slots()[0][0]:
                assert table[(i, j)].is_zero()


def test_ideal_experiment_is_informational(heis):
    rep = ideal_experiment(heis, 1, gen_cutoff=3, factor_cutoff=2, samples=10, seed=1)
    assert rep.details["informational"]
    assert rep.checks + rep.skipped == 20
    assert rep.passed


# -- cache --------------------------------------------------------------------------


def test_cache_roundtrip(tmp_path):
    V = VertexAlgebra.heisenberg(6)
    cold = reduced_basis(V, (0, 1), 6, tmp_path)
    path = cache_path(tmp_path, V, (0, 1), 6)
    assert path.exists()
    warm = reduced_basis(VertexAlgebra.heisenberg(6), (0, 1), 6, tmp_path)
    assert warm.to_json() == cold.to_json()
    assert warm.echelon.rows == cold.echelon.rows
    assert ReducedBasis.from_json(V, cold.to_json()).to_json() == cold.to_json()


def test_stale_cache_is_recomputed(tmp_path):
    V = VertexAlgebra.heisenberg(6)
    good = reduced_basis(V, (0, 0), 6, tmp_path).to_json()
    path = cache_path(tmp_path, V, (0, 0), 6)
    doc = json.loads(path.read_text())
    doc["config"] = "0" * 16
    doc["basis"]["rows"] = []
    path.write_text(json.dumps(doc))
    again = reduced_basis(VertexAlgebra.heisenberg(6), (0, 0), 6, tmp_path)
    assert again.to_json() == good
    assert json.loads(path.read_text())["config"] != "0" * 16


def test_corrupt_cache_warns_and_recomputes(tmp_path):
    V = VertexAlgebra.heisenberg(6)
    good = reduced_basis(V, (1, 0), 6, tmp_path).to_json()
    path = cache_path(tmp_path, V, (1, 0), 6)
    doc = json.loads(path.read_text())
    doc["basis"]["rows"] = doc["basis"]["rows"][1:]
    path.write_text(json.dumps(doc))
    with pytest.warns(CacheWarning):
        again = reduced_basis(VertexAlgebra.heisenberg(6), (1, 0), 6, tmp_path)
    assert again.to_json() == good
    path.write_text("{not json")
    with pytest.warns(CacheWarning):
        again = reduced_basis(VertexAlgebra.heisenberg(6), (1, 0), 6, tmp_path)
    assert again.to_json() == good


def _build_in_worker(cache_dir):
    V = VertexAlgebra.heisenberg(6)
    return json.dumps(reduced_basis(V, (1, 1), 6, cache_dir).to_json(), sort_keys=True)


def test_concurrent_writers_converge(tmp_path):
    with ProcessPoolExecutor(max_workers=4) as pool:
        results = list(pool.map(_build_in_worker, [str(tmp_path)] * 4))
    assert len(set(results)) == 1
    files = list(tmp_path.iterdir())
    assert [f.name for f in files] == [cache_path(tmp_path, VertexAlgebra.heisenberg(6), (1, 1), 6).name]
    warm = reduced_basis(VertexAlgebra.heisenberg(6), (1, 1), 6, tmp_path)
    assert json.dumps(warm.to_json(), sort_keys=True) == results[0]


def test_publish_is_atomic(tmp_path):
    target = tmp_path / "entry.json"
    texts = [json.dumps({"writer": i, "pad": "x" * 20000}) for i in range(8)]
    threads = [threading.Thread(target=publish, args=(target, t)) for t in texts]
    for t in threads:
        t.start()
    for t in threads:
        t.join()
    assert target.read_text() in texts
    assert [p.name for p in tmp_path.iterdir()] == ["entry.json"]
