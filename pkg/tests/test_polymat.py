import itertools
import json

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from sympy import Matrix, Poly, symbols

from convmds.gf import GF
from convmds.minorlab import check_fullsize_minors
from convmds.polymat import (
    TILDE,
    BlockMatrixSpec,
    ConditionItem,
    ConditionSet,
    ParamError,
    PolyMatrix,
    dedupe,
    derive_params,
    display_name,
    dump_code,
    encode,
    implies,
    instantiate,
    load_code,
    poly_det,
    reverse_code,
    reverse_sliding,
    row,
    column,
    single,
    sliding,
    spec_from_json,
    spec_to_json,
    structural_checks,
    tilde_stack,
    trim_codeword,
    weight,
    window,
)


@pytest.mark.parametrize(
    "n,k,delta,mu,t,L,S",
    [
        (2, 1, 1, 1, 1, 2, 4),
        (3, 1, 2, 2, 1, 3, 9),
        (3, 1, 3, 3, 1, 4, 12),
        (5, 2, 4, 2, 2, 3, 14),
        (3, 2, 3, 2, 1, 4, 6),
        (6, 2, 3, 2, 1, 1, 12),
        (11, 2, 6, 3, 2, 3, 43),
    ],
)
def test_derived_parameters(n, k, delta, mu, t, L, S):
    p = derive_params(n, k, delta)
    assert (p.mu, p.t, p.L, p.S) == (mu, t, L, S)


def test_parameter_errors():
    with pytest.raises(ParamError):
        derive_params(2, 2, 1)
    with pytest.raises(ParamError):
        derive_params(3, 1, -1)


def poly_product_codeword(G, U):
    """Codeword via explicit polynomial arithmetic, entry by entry."""
    F = G.field
    L = len(U) - 1
    V = np.zeros((G.mu + L + 1, G.n), dtype=np.int64)
    for j in range(G.n):
        for i in range(G.k):
            g = G.entry_poly(i, j)
            for a in range(L + 1):
                for b, c in enumerate(g):
                    V[a + b, j] = F.add(int(V[a + b, j]), F.mul(int(U[a][i]), c))
    return V


@given(st.integers(0, 10**6))
@settings(max_examples=60, deadline=None)
def test_encode_matches_polynomial_product(seed):
    rng = np.random.default_rng(seed)
    F = GF(int(rng.choice([3, 5, 7])))
    mu, k, n = int(rng.integers(0, 3)), int(rng.integers(1, 3)), int(rng.integers(3, 5))
    G = PolyMatrix(F, rng.integers(0, F.q, size=(mu + 1, k, n)))
    U = rng.integers(0, F.q, size=(int(rng.integers(1, 4)), k))
    assert (encode(G, U) == poly_product_codeword(G, U)).all()


def test_reverse_is_an_involution_and_reverses_rows():
    F = GF(7)
    G = PolyMatrix(F, [[[1, 2, 3], [4, 0, 1]], [[5, 6, 1], [0, 0, 0]]])
    R = reverse_code(G)
    assert reverse_code(R) == G
    assert R.coeffs[0, 0].tolist() == [5, 6, 1]
    assert R.coeffs[0, 1].tolist() == [4, 0, 1]


def test_structural_checks():
    F = GF(3)
    G = PolyMatrix(F, [[[1, 1, 1], [0, 1, 2]], [[1, 2, 0], [0, 0, 0]]])
    rep = structural_checks(G)
    assert rep.row_degrees == (1, 0)
    assert rep.is_row_reduced and rep.has_generic_row_degrees and rep.g0_full_rank
    assert rep.degree == 1
    # not row reduced: both leading rows are equal
    H = PolyMatrix(F, [[[1, 0, 0], [0, 1, 0]], [[1, 1, 1], [1, 1, 1]]])
    assert not structural_checks(H).is_row_reduced


def test_poly_det_matches_sympy():
    F = GF(5)
    z = symbols("z")
    rng = np.random.default_rng(3)
    for _ in range(20):
        M = [[rng.integers(0, 5, size=3).tolist() for _ in range(3)] for _ in range(3)]
        ours = poly_det(F, M)
        sm = Matrix(3, 3, lambda i, j: sum(c * z**d for d, c in enumerate(M[i][j])))
        ref = Poly(sm.det(), z, modulus=5)
        ref_coeffs = [int(c) % 5 for c in reversed(ref.all_coeffs())] if not ref.is_zero else []
        while ours and ours[-1] == 0:
            ours = ours[:-1]
        assert ours == ref_coeffs


def test_weight_and_trim():
    V = np.array([[1, 0], [0, 0], [2, 2], [0, 0]])
    assert weight(V) == 3
    assert trim_codeword(V).shape == (3, 2)


def test_layout_names():
    assert sliding(1).name == "G_1^c"
    assert reverse_sliding(1, 3).name == "Gbar_1^c"
    assert row(0, 1, 2).name == "[G0 G1 G2]"
    assert column(2, 1, 0).name == "(G2;G1;G0)"
    assert single(TILDE).name == "~Gmu"
    assert display_name(tilde_stack(2, 0), 2) == "(~G2;G1;G0)"
    assert window(1, 1, 2).grid == ((1, 2), (0, 1))


def test_layout_validation():
    with pytest.raises(ParamError):
        BlockMatrixSpec(((0, 1), (2,)))
    with pytest.raises(ParamError):
        BlockMatrixSpec(((TILDE, 1),))
    with pytest.raises(ParamError):
        BlockMatrixSpec(((None, None),))


def test_instantiate_sliding_is_block_toeplitz():
    F = GF(7)
    G = PolyMatrix(F, np.arange(3 * 1 * 2).reshape(3, 1, 2) % 7)
    M, supp = instantiate(sliding(2), G)
    assert M.shape == (3, 6)
    assert M[1, :2].tolist() == [0, 0] and M[1, 2:4].tolist() == G.coeffs[0, 0].tolist()
    assert supp[0].all() and not supp[2, :4].any()
    with pytest.raises(ParamError):
        instantiate(sliding(3), G)
    M, _ = instantiate(sliding(3), G, pad=True)
    assert not M[0, 6:].any()


def test_spec_json_round_trip():
    for s in (sliding(2), tilde_stack(3, 1), window(1, 2, 3)):
        assert spec_from_json(json.loads(json.dumps(spec_to_json(s)))) == s


def test_implication_rules():
    k, t, n = 2, 2, 5
    assert implies(row(0, 1, 2), row(0, 2), k, t, n)
    assert not implies(row(0, 2), row(0, 1, 2), k, t, n)
    # the diagonal blocks of G_1^c are G0
    assert implies(sliding(1), single(0), k, t, n)
    assert not implies(single(0), sliding(1), k, t, n)
    items = [sliding(1), single(0), row(0, 1), row(1)]
    assert dedupe(items, k, t, n) == [sliding(1), row(0, 1)]


POOL = [single(0), single(1), row(0, 1), row(1, 2), row(0, 1, 2), sliding(1), sliding(2), column(1, 0), column(2, 1)]


@given(st.integers(0, 10**6))
@settings(max_examples=40, deadline=None)
def test_implication_is_sound_on_random_codes(seed):
    """If implies(a, b) then every code passing a also passes b."""
    rng = np.random.default_rng(seed)
    F = GF(int(rng.choice([5, 7, 11])))
    k, n = 1, int(rng.integers(2, 4))
    G = PolyMatrix(F, rng.integers(0, F.q, size=(3, k, n)))
    passes = {}
    for s in POOL:
        M, supp = instantiate(s, G)
        r, c = M.shape
        passes[s] = r <= c and check_fullsize_minors(M, F, supp).passed
    for a, b in itertools.permutations(POOL, 2):
        if implies(a, b, k, k, n) and passes[a] and b.dims(k, k, n)[0] <= b.dims(k, k, n)[1]:
            assert passes[b], (a.name, b.name)


def test_condition_set_rejects_duplicates():
    with pytest.raises(ParamError):
        ConditionSet((ConditionItem(single(0)), ConditionItem(single(0))))
    C = ConditionSet((ConditionItem(single(TILDE), "x"),))
    assert C.names(3) == ["~G3"]


def test_code_file_round_trip(tmp_path):
    F = GF(2, 4, (1, 0, 0, 1, 1))
    G = PolyMatrix(F, [[[1, 2, 3]], [[4, 5, 6]]], 1)
    path = tmp_path / "g.json"
    dump_code(G, path)
    H = load_code(path)
    assert H == G and H.field.modulus == (1, 0, 0, 1, 1)


def test_malformed_code_file(tmp_path):
    path = tmp_path / "bad.json"
    path.write_text(json.dumps({"field": {"p": 3, "m": 1, "modulus": None}, "params": {"n": 3, "k": 1, "delta": 1},
                                "coefficients": [[[0, 1, 5]]]}))
    with pytest.raises(ValueError):
        load_code(path)
