"""End-to-end checks of the twelve acceptance criteria.

Each test records a PASS/FAIL line in the session summary.  Where a claim
about a bundled example does not hold for the printed matrices, the test
pins the observed values and a strict xfail keeps the original claim visible.
"""

import itertools
import time

import numpy as np
import pytest
import sympy

from corpus import corpus
from convmds.cli import _ones_code, read_code
from convmds.criteria import certify, check_gl06, check_main, check_prior_work
from convmds.distance import (
    BudgetExceeded,
    column_bound,
    column_distance,
    distance_profile,
    free_distance_bruteforce,
    free_distance_sampled,
    free_distance_trellis,
)
from convmds.gf import GF, primitive_polys
from convmds.minorlab import check_fullsize_minors, is_trivially_zero
from convmds.planner import plan
from convmds.polymat import PolyMatrix, reverse_code
from convmds.search import construct_general, field_for, minimal_field_scan, required_field_degree

CORPUS = corpus()


def record(log, n, ok, detail):
    log[n] = (bool(ok), detail)


def test_c01_all_ones(acceptance_log):
    t0 = time.perf_counter()
    rows = []
    for n in (2, 3, 4):
        G = _ones_code(n)
        rows.append((n, check_main(G, planned=True).verdict, free_distance_trellis(G), 2 * n, G.params.S))
    elapsed = time.perf_counter() - t0
    ok = all(v == "certified-MDS" and d == e == s for _, v, d, e, s in rows) and elapsed < 1
    record(acceptance_log, 1, ok, f"d_free=2n=S for n=2,3,4, {elapsed:.2f}s")
    assert ok


def test_c02_ex2(acceptance_log):
    t0 = time.perf_counter()
    G = read_code("ex2_f4.json")
    verdict = check_main(G, planned=True).verdict
    d = free_distance_trellis(G)
    scan = minimal_field_scan(3, 1, 2, [2, 3], budget=10**5)
    labels = {q: r.label for q, r in scan.items()}
    exhaustive = all(r.config.mode == "exhaustive" for r in scan.values())
    elapsed = time.perf_counter() - t0
    ok = verdict == "certified-MDS" and d == 9 == G.params.S and exhaustive
    ok = ok and set(labels.values()) == {"certificate"} and elapsed < 60
    record(acceptance_log, 2, ok, f"d_free={d}, scan {labels}, {elapsed:.1f}s")
    assert ok


def test_c03_ex3(acceptance_log):
    t0 = time.perf_counter()
    G = read_code("ex3_f7.json")
    rep = check_main(G, planned=True)
    d = free_distance_trellis(G)
    cols = [column_distance(G, j) for j in range(3)]
    rev = [column_distance(reverse_code(G), j) for j in range(2)]
    G16 = read_code("ex3_f16.json")
    per_mod = {}
    for mod in primitive_polys(2, 4):
        H = PolyMatrix(GF(2, 4, mod), G16.coeffs, G16.delta)
        per_mod["".join(map(str, mod))] = certify(H).verdict
    elapsed = time.perf_counter() - t0
    ok = (
        rep.verdict == "certified-MDS"
        and len(rep.conditions.items) == 4
        and d == 12
        and cols == [2 * (j + 1) + 1 for j in range(3)]
        and rev == [column_bound(3, 1, j) for j in range(2)]
        and len(per_mod) == 2
        and elapsed < 60
    )
    record(acceptance_log, 3, ok, f"d_free={d}, d^c={cols}, reverse={rev}, GF(16) by modulus {per_mod}")
    assert ok
    assert "certified-MDS" in per_mod.values()


def ex4_observed():
    G = read_code("ex4_f31.json")
    rep = check_main(G)
    cols = [column_distance(G, j) for j in range(2)]
    sampled, used = free_distance_sampled(G, 2, samples=10**6, seed=0, stop_at=13)
    return {
        "verdict": rep.verdict,
        "witness": rep.minors.items[0].check.witness,
        "columns": cols,
        "upper_deg1": free_distance_bruteforce(G, 1),
        "sampled_upper": sampled,
        "samples": used,
    }


@pytest.fixture(scope="module")
def ex4():
    return ex4_observed()


def test_c04_ex4_observed(ex4, acceptance_log):
    ok = ex4["verdict"] == "certified-MDS" and ex4["columns"] == [4, 7] and ex4["sampled_upper"] == 14
    record(
        acceptance_log,
        4,
        ok,
        f"minors fail at columns {ex4['witness']}; d^c={ex4['columns']}; "
        f"codeword of weight {ex4['upper_deg1']} < 14 (sampled bound {ex4['sampled_upper']})",
    )
    assert ex4["verdict"] == "minors-fail" and ex4["witness"] == [3, 13]
    assert ex4["columns"] == [4, 7]
    assert ex4["upper_deg1"] == 13 and ex4["sampled_upper"] <= 13


@pytest.mark.xfail(strict=True, reason="the printed (5,2,4) matrices have a weight-13 codeword")
def test_c04_ex4_claim(ex4):
    assert ex4["verdict"] == "certified-MDS" and ex4["sampled_upper"] == 14


@pytest.fixture(scope="module")
def ex5():
    G = read_code("ex5_f3.json")
    rep = certify(G, planned=True)
    inter = plan(3, 2, 3).intermediates
    return {
        "names": [i["item"] for i in rep.minors.to_dict()["items"]],
        "minors": rep.minors_pass,
        "free": free_distance_trellis(G),
        "S": G.params.S,
        "DEF": (inter["D"], inter["E"], inter["F"]),
    }


def test_c05_ex5_observed(ex5, acceptance_log):
    ok = ex5["minors"] and ex5["free"] == 6 == ex5["S"] and ex5["DEF"] == (1, 1, 0)
    record(acceptance_log, 5, ok, f"minors of {sorted(ex5['names'])} pass, D/E/F={ex5['DEF']}, d_free={ex5['free']} vs S={ex5['S']}")
    assert sorted(ex5["names"]) == sorted(["G_1^c", "G1", "~G2"]) and ex5["minors"]
    assert ex5["DEF"] == (1, 1, 0)
    assert ex5["free"] == 5 and ex5["S"] == 6


@pytest.mark.xfail(strict=True, reason="the printed (3,2,3) matrices have free distance 5")
def test_c05_ex5_claim(ex5):
    assert ex5["free"] == ex5["S"]


@pytest.fixture(scope="module")
def ex6():
    G = read_code("ex6_f7.json")
    rep = certify(G, planned=True)
    return {
        "names": rep.conditions.to_list(G.mu),
        "verdict": rep.verdict,
        "free": free_distance_trellis(G),
        "S": G.params.S,
        "prior": check_prior_work(G, nu=2).verdict,
    }


def test_c06_ex6_observed(ex6, acceptance_log):
    ok = ex6["verdict"] == "certified-MDS" and ex6["free"] == 12 == ex6["S"] and ex6["prior"] != "certified-MDS"
    record(acceptance_log, 6, ok, f"set passes, prior work {ex6['prior']}, d_free={ex6['free']} vs S={ex6['S']}")
    assert sorted(i["item"] for i in ex6["names"]) == sorted(["G0", "(G1;G0)", "G1", "~G2"])
    assert ex6["verdict"] == "certified-MDS" and ex6["prior"] == "minors-fail"
    assert ex6["free"] == 10 and ex6["S"] == 12


@pytest.mark.xfail(strict=True, reason="the printed (6,2,3) GF(7) matrices have free distance 10")
def test_c06_ex6_claim(ex6):
    assert ex6["free"] == ex6["S"]


def test_c07_planner_golden(acceptance_log):
    rep = plan(11, 2, 6)
    got = {k: rep.intermediates[k] for k in "WEFR"}
    names = rep.names()
    want = ["G_1^c", "(G2;G1;G0)", "(G2;G3)", "(G2;G1)", "[G0 G1 G2 G3]"]
    ok = got == {"W": 5, "E": 2, "F": 1, "R": 4} and names == want
    record(acceptance_log, 7, ok, f"{got} {names}")
    assert ok


def test_c08_gl06_equivalence(acceptance_log):
    pairs = bad = 0
    for G in CORPUS:
        for j in range(G.params.L + 1):
            pairs += 1
            optimal = column_distance(G, j) == column_bound(G.n, G.k, j)
            bad += check_gl06(G, j) != optimal
    ok = len(CORPUS) >= 200 and bad == 0
    record(acceptance_log, 8, ok, f"{len(CORPUS)} codes, {pairs} (code, j) pairs, {bad} discrepancies")
    assert ok


def symbolic_zero(pattern) -> bool:
    r = len(pattern)
    xs = sympy.symbols(f"x0:{r * r}")
    M = sympy.Matrix(r, r, lambda i, j: xs[i * r + j] if pattern[i][j] else 0)
    return sympy.expand(M.det(method="berkowitz")) == 0


def test_c09_trivially_zero_oracle(acceptance_log):
    bad = total = 0
    for bits in itertools.product((0, 1), repeat=9):
        P = np.array(bits).reshape(3, 3)
        total += 1
        bad += is_trivially_zero(P) != symbolic_zero(P.tolist())
    rng = np.random.default_rng(9)
    for _ in range(1000):
        r = int(rng.integers(4, 6))
        P = rng.random((r, r)) < rng.uniform(0.2, 0.8)
        total += 1
        bad += is_trivially_zero(P) != symbolic_zero(P.tolist())
    ok = total >= 1512 and bad == 0
    record(acceptance_log, 9, ok, f"{total} patterns, {bad} discrepancies")
    assert ok


def le2_matrices(rng):
    """Corpus row blocks plus random matrices whose full-size minors are all nonzero."""
    for G in CORPUS:
        if G.field.q > 7:
            continue
        M = np.hstack(list(G.coeffs[: G.mu]) + [G.coeffs[G.mu]]) if G.mu else G.coeffs[0]
        yield G.field, M
    for _ in range(300):
        q = int(rng.choice([2, 3, 4, 5, 7]))
        r = int(rng.integers(1, 4))
        s = int(rng.integers(r, 7))
        yield field_for(q), rng.integers(0, q, size=(r, s))


def test_c10_maxim_and_le2(acceptance_log):
    maxim_bad = 0
    for G in CORPUS:
        prof = distance_profile(G, free=False)
        maxim_bad += not prof.maxim_consistent()
    rng = np.random.default_rng(10)
    checked = le2_bad = 0
    for F, M in le2_matrices(rng):
        r, s = M.shape
        if r > s or not check_fullsize_minors(M, F, np.ones_like(M, dtype=bool)).passed:
            continue
        checked += 1
        for u in itertools.product(range(F.q), repeat=r):
            if not any(u):
                continue
            v = np.zeros(s, dtype=np.int64)
            for coef, rowv in zip(u, M):
                v = F.add_arr(v, F.mul_arr(np.full(s, coef), rowv))
            le2_bad += int(np.count_nonzero(v)) < s - r + 1
    ok = maxim_bad == 0 and le2_bad == 0 and checked > 0
    record(acceptance_log, 10, ok, f"monotone optimality on {len(CORPUS)} codes ({maxim_bad} bad); weight bound on {checked} matrices ({le2_bad} bad)")
    assert ok


def test_c11_trellis_vs_bruteforce(acceptance_log):
    agree = skipped = bad = 0
    for G in CORPUS:
        try:
            brute = free_distance_bruteforce(G, G.delta + 3, budget=2 * 10**5)
        except BudgetExceeded:
            skipped += 1
            continue
        if free_distance_trellis(G) == brute:
            agree += 1
        else:
            bad += 1
    ok = bad == 0 and agree > 0
    record(acceptance_log, 11, ok, f"{agree} agree, {skipped} over the brute-force budget, {bad} discrepancies")
    assert ok


def test_c12_construction(acceptance_log):
    t0 = time.perf_counter()
    con = construct_general(2, 1, 1)
    G = con.code
    F = G.field
    expected = [[F.pow(F.primitive, 2 ** (i * 2 + c)) for c in range(2)] for i in range(2)]
    rep = check_main(G)
    elapsed = time.perf_counter() - t0
    bounds = {p: required_field_degree(*p) for p in [(2, 1, 1), (3, 1, 2), (11, 2, 6)]}
    ok = (
        con.N == 17 == F.m
        and F.p == 2
        and G.coeffs[:, 0, :].tolist() == expected
        and rep.verdict == "certified-MDS"
        and elapsed < 60
    )
    record(acceptance_log, 12, ok, f"GF(2^{con.N}) certified in {elapsed:.2f}s; N for (3,1,2)={bounds[(3, 1, 2)]}")
    assert ok
    assert bounds == {(2, 1, 1): 17, (3, 1, 2): 1025, (11, 2, 6): 3 * 2**45 + 1}
