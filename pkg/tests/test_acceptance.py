"""Acceptance criteria 1-11, one test each.

Every test prints a single ``ACCEPTANCE <n> PASS|FAIL ...`` line (visible
with ``pytest -s``) and then asserts.  Runtime budgets are part of each
criterion and are measured from a cold algebra, so memo tables built by
one criterion never speed up another.
"""

import subprocess
import sys
import time
from fractions import Fraction


from higherzhu.modules import LowerBoundedModule, build_gr, stabilized_filtration
from higherzhu.reduction import cn_quotient_dimension
from higherzhu.suites import (
    associator_suite,
    binomial_collapse_suite,
    graded_axiom_suite,
    homomorphism_suite,
    lder_suite,
    o_annihilation_suite,
    unit_suite,
    voa_axiom_suite,
)
from higherzhu.voa import VertexAlgebra
from higherzhu.zhu import center_check, corner_agreement, polynomial_algebra_probe

HALF, SIXTEENTH = Fraction(1, 2), Fraction(1, 16)


def verdict(n, ok, elapsed, budget, note):
    within = elapsed < budget
    status = "PASS" if ok and within else "FAIL"
    print(f"\nACCEPTANCE {n} {status} ({elapsed:.1f}s of {budget}s): {note}")
    return ok and within


def all_pass(reports, exhaustive=False):
    """Every report passes; exhaustive criteria also forbid skipped cases."""
    return all(r.passed and r.checks > 0 and (r.skipped == 0 or not exhaustive) for r in reports)


def family(N, depth, weight_cutoff=8):
    """Gr^N of Fock(mu=1) and Verma(c=1/2, h=1/16) with module depth ``depth + N + 1``."""
    H = VertexAlgebra.heisenberg(weight_cutoff)
    V = VertexAlgebra.virasoro(HALF, weight_cutoff)
    return [
        build_gr(LowerBoundedModule.fock(H, 1, depth + N + 1), N, 2),
        build_gr(LowerBoundedModule.verma(V, SIXTEENTH, depth + N + 1), N, 2),
    ]


def test_criterion_01_binomial_collapse():
    t = time.perf_counter()
    rep = binomial_collapse_suite(6)
    ok = rep.passed and rep.checks == sum(n + 1 for n in range(7)) * 49
    assert verdict(1, ok, time.perf_counter() - t, 1, rep.summary())


def test_criterion_02_voa_axioms():
    t = time.perf_counter()
    algebras = [VertexAlgebra.heisenberg(6)] + [VertexAlgebra.virasoro(c, 8) for c in (HALF, 1, Fraction(-22, 5))]
    reps = [voa_axiom_suite(V) for V in algebras]
    note = "; ".join(f"{V.desc.tag()} {r.checks} checks/{r.failure_count} failures" for V, r in zip(algebras, reps))
    assert verdict(2, all_pass(reps, exhaustive=True), time.perf_counter() - t, 30, note)


def test_criterion_03_unit_laws():
    t = time.perf_counter()
    reps = [unit_suite(V, N_max=2, weight=4) for V in (VertexAlgebra.heisenberg(8), VertexAlgebra.virasoro(HALF, 8))]
    note = "; ".join(r.summary() for r in reps)
    assert verdict(3, all_pass(reps, exhaustive=True), time.perf_counter() - t, 60, note)


def test_criterion_04_sl2_products():
    t = time.perf_counter()
    # weight 11 is the smallest window in which no case is skipped
    reps = [lder_suite(V, weight=3, index_max=2) for V in (VertexAlgebra.heisenberg(11), VertexAlgebra.virasoro(HALF, 11))]
    note = "; ".join(r.summary() for r in reps)
    assert verdict(4, all_pass(reps, exhaustive=True), time.perf_counter() - t, 60, note)


def test_criterion_05_theta_homomorphism():
    t = time.perf_counter()
    reps = []
    for N in range(3):
        for G in family(N, 4):
            reps.append(homomorphism_suite(G, 4, 4))
    note = f"{sum(r.checks for r in reps)} checks, {sum(r.failure_count for r in reps)} failures, {sum(r.skipped for r in reps)} skipped over N=0..2"
    assert verdict(5, all_pass(reps), time.perf_counter() - t, 300, note)


def test_criterion_06_o_annihilation():
    t = time.perf_counter()
    reps = [o_annihilation_suite(G, 4, 4) for G in family(2, 4)]
    note = "; ".join(f"{r.params['module']} {r.checks} checks/{r.failure_count} failures {r.details['generators']}" for r in reps)
    assert verdict(6, all_pass(reps), time.perf_counter() - t, 120, note)


def test_criterion_07_graded_axioms():
    t = time.perf_counter()
    reps = []
    for N in range(3):
        for G in family(N, 4):
            reps.append(graded_axiom_suite(G, 4, 4))
    note = f"{sum(r.checks for r in reps)} checks, {sum(r.failure_count for r in reps)} failures over N=0..2"
    assert verdict(7, all_pass(reps), time.perf_counter() - t, 60, note)


def test_criterion_08_omega_equals_truncation():
    t = time.perf_counter()
    M = LowerBoundedModule.fock(VertexAlgebra.heisenberg(8), 1, 5)
    filt = stabilized_filtration(M, 3, 2, max_depth=5)
    mismatches = []
    for (n, lam), basis in sorted(filt.subspaces.items()):
        t_keys = filt.truncation_space(n, lam)
        inside = all(filt.contains(n, {k: Fraction(1)}) for k in t_keys)
        if len(basis) != len(t_keys) or not inside:
            mismatches.append((n, lam))
    ok = filt.stable and not mismatches and len(filt.history) >= 3
    note = f"stable at v-cutoff {filt.v_cutoff} after {len(filt.history)} cutoffs, {len(filt.subspaces)} (n, weight) cells, mismatches {mismatches}"
    assert verdict(8, ok, time.perf_counter() - t, 120, note)


def test_criterion_09_classical_corner():
    t = time.perf_counter()
    # products of two weight-4 states at N = 3 reach weight 14; no reduction is needed there
    reps = [corner_agreement(VertexAlgebra.heisenberg(14), 3, 4), corner_agreement(VertexAlgebra.virasoro(HALF, 14), 3, 4)]
    H = VertexAlgebra.heisenberg(10)
    V = VertexAlgebra.virasoro(HALF, 10)
    reps += [center_check(H, 0, 4), center_check(H, 1, 4), center_check(V, 0, 6), center_check(V, 1, 4)]
    probe = polynomial_algebra_probe(H, 5)
    ranks_ok = probe.details["free_per_weight"] == {w: 1 for w in range(6)}
    ok = all_pass(reps, exhaustive=True) and probe.passed and ranks_ok
    note = "; ".join(r.summary() for r in reps + [probe])
    assert verdict(9, ok, time.perf_counter() - t, 120, note)


def test_criterion_10_c2_and_associators():
    t = time.perf_counter()
    H = VertexAlgebra.heisenberg(12)
    dims = cn_quotient_dimension(H, 2, 4)
    dims_ok = [dims[w] for w in range(5)] == [1, 1, 1, 1, 1]
    reps = [associator_suite(H, N, samples=50, weight_budget=4, seed=N) for N in (1, 2)]
    ok = dims_ok and all(r.passed and r.checks == 50 for r in reps)
    note = f"C2 dims {[dims[w] for w in range(5)]}; " + "; ".join(r.summary() for r in reps)
    assert verdict(10, ok, time.perf_counter() - t, 120, note)


def test_criterion_11_determinism(tmp_path):
    t = time.perf_counter()
    argv = ["verify-all", "--algebra", "heisenberg", "--mu", "1", "--N", "1", "--weight-cutoff", "4", "--depth-cutoff", "4"]
    artifacts = []
    codes = []
    for run in range(2):
        out = tmp_path / f"run{run}"
        cache = tmp_path / f"cache{run}"
        proc = subprocess.run(
            [sys.executable, "-m", "higherzhu.cli", *argv, "--out", str(out), "--cache-dir", str(cache)],
            capture_output=True,
        )
        codes.append(proc.returncode)
        artifacts.append({p.name: p.read_bytes() for p in sorted(out.iterdir())} if out.exists() else {})
    ok = codes == [0, 0] and artifacts[0] == artifacts[1] and set(artifacts[0]) == {"manifest.json", "report.json"}
    note = f"exit codes {codes}, artifacts {sorted(artifacts[0])} identical={artifacts[0] == artifacts[1]}"
    assert verdict(11, ok, time.perf_counter() - t, 600, note)
