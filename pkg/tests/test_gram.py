import time

import numpy as np
import pytest
import sympy
from hypothesis import given, settings, strategies as st

from rank2hecke import fastgram
from rank2hecke.catalog import expected_determinant, spec
from rank2hecke.gram import (DeterminantTooLarge, ZMatrix, base_blocks, bareiss, det_mod, determinant_exact,
                             determinant_modular, exact_allowed, first_asymmetry, gram_blocks, naive_block,
                             recurse_blocks, required_trials, specialization_commutes,
                             specialized_block_check, y_columns, z_matrix, z_matrix_reconstructs)
from rank2hecke.laurent import DEFAULT_PRIME, LaurentPoly, VarSpec


@pytest.fixture(scope="module")
def g6_gram(g6):
    return gram_blocks(g6)


# -- recursion against the direct computation ------------------------------------
@pytest.mark.parametrize("gid", ["G4", "G6"])
def test_recursion_matches_naive(store, gid):
    model = store.get(gid)
    gb = gram_blocks(model)
    cols = y_columns(model)
    assert len(gb.blocks) == 2 * model.m - 1
    for k in range(len(gb.blocks)):
        assert gb.blocks[k] == naive_block(model, k, cols), f"block {k}"


def test_z_matrix_reconstructs(g6, g4):
    for model in (g4, g6):
        assert z_matrix_reconstructs(model, z_matrix(model))


def test_base_block_entries_are_traces(g6):
    from rank2hecke.verify import trace_of_product
    A0 = base_blocks(g6)[0]
    for q1, q2 in [(0, 0), (1, 1), (2, 5), (7, 3)]:
        assert A0[q1][q2] == trace_of_product(g6, g6.y_word(q1), g6.y_word(q2))


def test_base_block_first_row(g6, g4):
    for model in (g4, g6):
        A0 = base_blocks(model)[0]
        assert A0[0][0] == 1
        assert all(A0[0][i] == 0 for i in range(1, model.l))


def test_degenerate_z_copies_block():
    ring = VarSpec.of(("c0",), ("c0",))
    c = ring.var("c0")
    l, m = 2, 3
    Z = ZMatrix(ring, l, m, [{0 * l + i: ring.one()} for i in range(l)])
    known = [[[c**k + i + 2 * j for j in range(l)] for i in range(l)] for k in range(m)]
    assert recurse_blocks(Z, known) == known[0]
    with pytest.raises(ValueError):
        recurse_blocks(Z, known[:2])


def test_gram_symmetric(g6_gram, g4):
    assert all(first_asymmetry(b) is None for b in g6_gram.blocks)
    assert all(first_asymmetry(b) is None for b in gram_blocks(g4).blocks)


def test_fault_injection_breaks_symmetry(g6_gram):
    blocks = [list(map(list, b)) for b in g6_gram.blocks]
    blocks[3][2][5] = blocks[3][2][5] + 1
    assert first_asymmetry(blocks[3]) == (2, 5)


@pytest.mark.skipif(not fastgram.available(), reason="python-flint missing")
@pytest.mark.parametrize("gid", ["G4", "G6"])
def test_flint_matches_pure(store, gid):
    model = store.get(gid)
    fg = fastgram.flint_gram_blocks(model)
    gb = gram_blocks(model)
    assert len(fg.blocks) == len(gb.blocks)
    for k in range(len(gb.blocks)):
        assert fg.to_laurent(k) == gb.blocks[k]
    assert fg.asymmetric_blocks() == []


def test_assembled_matrix_shape(g6_gram):
    A = g6_gram.assemble()
    assert len(A) == 48 and all(len(r) == 48 for r in A)
    assert all(A[a][b] == A[b][a] for a in range(48) for b in range(a))


# -- exact determinants ------------------------------------------------------------
@pytest.mark.parametrize("gid", ["G4", "G12"])
def test_exact_determinant(store, gid):
    gb = gram_blocks(store.get(gid))
    det = determinant_exact(gb.assemble())
    assert det == expected_determinant(gid)
    assert det.is_unit()


def test_exact_gate():
    assert exact_allowed(spec("G4")) and exact_allowed(spec("G12"))
    assert not exact_allowed(spec("G11")) and not exact_allowed(spec("G7"))


def test_bareiss_trivial():
    R = VarSpec.of(("a0",), ("a0",))
    assert bareiss([[R.one()]]) == 1
    assert bareiss([[R.var("a0")]]) == R.var("a0")
    with pytest.raises(ValueError):
        bareiss([])


def test_bareiss_term_cap():
    R = VarSpec.of(("a0", "a1"), ("a0",))
    a0, a1 = R.gens()
    A = [[(a0 + a1 + i + j) ** 3 for j in range(4)] for i in range(4)]
    with pytest.raises(DeterminantTooLarge):
        bareiss(A, max_terms=3)


R3 = VarSpec.of(("a0", "a1", "c0"), invertible=("a0", "c0"))
SYMS = sympy.symbols("a0 a1 c0")


def _sym(p: LaurentPoly):
    return sum((c * sympy.Mul(*[s**e for s, e in zip(SYMS, ex)]) for ex, c in p.items()), sympy.Integer(0))


entries = st.lists(st.tuples(st.tuples(st.integers(-2, 2), st.integers(0, 2), st.integers(-2, 2)),
                             st.integers(-3, 3)), max_size=3).map(lambda t: LaurentPoly.from_exponents(R3, t))


@settings(max_examples=40, deadline=None)
@given(st.integers(1, 4).flatmap(lambda n: st.lists(st.lists(entries, min_size=n, max_size=n),
                                                    min_size=n, max_size=n)))
def test_bareiss_matches_sympy(A):
    got = bareiss(A)
    want = sympy.Matrix([[_sym(c) for c in row] for row in A]).det(method="berkowitz")
    assert sympy.simplify(_sym(got) - want) == 0


@settings(max_examples=40, deadline=None)
@given(st.integers(1, 6).flatmap(lambda n: st.lists(st.lists(st.integers(-50, 50), min_size=n, max_size=n),
                                                    min_size=n, max_size=n)))
def test_det_mod_matches_sympy(A):
    p = DEFAULT_PRIME
    assert det_mod(np.array(A, dtype=np.int64) % p, p) == int(sympy.Matrix(A).det()) % p


# -- modular determinants ---------------------------------------------------------
def test_required_trials():
    assert required_trials(228, DEFAULT_PRIME) == 5
    assert required_trials(4936, DEFAULT_PRIME) == 6
    with pytest.raises(ValueError):
        required_trials(10**12, DEFAULT_PRIME)


def test_modular_determinant_g6(g6):
    res = determinant_modular(base_blocks(g6), z_matrix(g6), expected_determinant("G6"), seed=3)
    assert res.ok and res.trials >= 5
    assert res.error_bound_log2 < -100
    assert len(res.points) == res.trials


def test_modular_rejects_wrong_exponent(g6):
    ring = g6.ring
    wrong = expected_determinant("G6") * ring.var("c0")
    res = determinant_modular(base_blocks(g6), z_matrix(g6), wrong, trials=5, seed=0)
    assert not res.ok and "trial 1" in res.failure


def test_modular_rejects_corrupted_block(g6):
    base = [list(map(list, b)) for b in base_blocks(g6)]
    base[1][0][0] = base[1][0][0] + g6.ring.var("a1")
    res = determinant_modular(base, z_matrix(g6), expected_determinant("G6"), trials=5)
    assert not res.ok


def test_modular_determinant_g9(store):
    model = store.get("G9")
    t0 = time.perf_counter()
    res = determinant_modular(base_blocks(model), z_matrix(model), expected_determinant("G9"))
    assert res.ok, res.failure
    assert res.error_bound_log2 < -100
    assert time.perf_counter() - t0 < 600


# -- specialization ---------------------------------------------------------------
@pytest.mark.parametrize("gid", ["G4", "G5", "G6"])
def test_specialized_block_form(store, g7, gid):
    own = store.get(gid)
    rep = specialized_block_check(gid, g7, own)
    assert rep.ok, rep.detail
    assert rep.ell == spec(gid).index
    assert sorted(set(rep.classes)) == list(range(rep.ell))
    assert specialization_commutes(gid, g7, own)


def test_specialization_fault(store, g7):
    from rank2hecke.catalog import theta_images
    _, dst, images = theta_images("G6")
    bad = dict(images)
    bad["a1"] = dst.one()
    rep = specialized_block_check("G6", g7, store.get("G6"), images=bad)
    assert not rep.ok


def test_maximal_group_trivially_specialized(g7):
    rep = specialized_block_check("G7", g7, g7)
    assert rep.ok and rep.ell == 1
