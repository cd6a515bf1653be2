import copy

import pytest
from hypothesis import HealthCheck, given, settings, strategies as st

from rank2hecke.catalog import spec
from rank2hecke.hecke import (ActionMatrix, ParabolicAlgebra, StallError, build_matrices, build_model,
                              cache_path, check_basis_identity, check_relations, load_model, model_digest,
                              parabolic_matrix, saturate, save_model, seed_table)
from rank2hecke.words import inverse_word, parse_word

slow = settings(deadline=None, suppress_health_check=[HealthCheck.function_scoped_fixture], max_examples=30)


@pytest.fixture(scope="module")
def g6_table():
    t = seed_table("G6")
    saturate(t)
    return t


def _h(t, *coeffs):
    ring = t.ring
    vals = [ring.parse(c) if isinstance(c, str) else ring.const(c) for c in coeffs]
    return tuple(vals + [ring.zero()] * (t.H.e - len(vals)))


# -- parabolic algebra ---------------------------------------------------------
def test_parabolic_inverse():
    s = spec("G6")
    ring = s.ring()
    H = ParabolicAlgebra(ring, s.order_relation("u", ring))
    g, gi = H.gen_power(1), H.gen_power(-1)
    assert H.mul(g, gi) == H.one()
    assert H.mul(H.gen_power(3), H.gen_power(-3)) == H.one()
    # g^3 = c2 g^2 + c1 g + c0
    assert H.gen_power(3) == tuple(ring.parse(v) for v in ("c0", "c1", "c2"))
    assert H.unit_inverse(H.add(H.one(), g)) is None


# -- seeded and saturated entries --------------------------------------------------
def test_g6_seed_entries():
    t = seed_table("G6")
    assert t.get(0, "s") == {1: t.H.one()}
    assert t.get(1, "u") == {2: t.H.one()}
    assert t.get(0, "u") == {0: t.H.gen_power(1)}


def test_g6_inverse_entry(g6_table):
    t = g6_table
    assert t.get(0, "S") == {0: _h(t, "-a0^-1*a1"), 1: _h(t, "a0^-1")}


def test_g6_worked_entry(g6_table):
    t = g6_table
    H = t.H
    uinv = H.gen_power(-1)
    expected = {5: H.scale(t.ring.parse("a0^-1"), uinv), 4: H.scale(t.ring.parse("-a0^-1*a1"), uinv)}
    assert t.get(3, "u") == expected
    assert uinv == _h(t, "-c0^-1*c1", "-c0^-1*c2", "c0^-1")


def test_g6_without_hints_stalls_at_b3_u():
    t = seed_table("G6")
    with pytest.raises(StallError) as err:
        saturate(t, use_hints=False)
    assert err.value.missing[0] == "b_3.u"
    assert "b_3.u" in str(err.value)


def test_saturation_records_provenance(g6_table):
    rules = {why.split(":")[0] for why in g6_table.provenance.values()}
    assert {"tree", "shift", "absorb", "R1", "R2"} <= rules


# -- matrices ----------------------------------------------------------------------
def test_g6_matrix_examples(g6):
    one = g6.ring.one()
    assert g6.matrix("s").rows[0] == {1: one}
    assert g6.express("u") == {g6.index(0, 1, 0): one}
    Z, z = g6.matrix("Z"), g6.matrix("z")
    assert Z @ z == ActionMatrix.identity(g6.ring, g6.dim)


def test_express_examples(g6):
    ring = g6.ring
    assert g6.express(()) == g6.unit_vector(0)
    a0, a1 = ring.var("a0"), ring.var("a1")
    assert g6.express("ss") == {0: a0, 1: a1}
    for idx in (0, 5, 17, 47):
        assert g6.express(g6.basis_word(idx)) == {idx: ring.one()}


def test_basis_identity(g6, g4):
    assert check_basis_identity(g6) and check_basis_identity(g4)


def test_check_relations_passes(g6, g4):
    for model in (g4, g6):
        rep = check_relations(model)
        assert rep.ok, rep.failure
    assert "order relation of s" in check_relations(g6).checked


def test_g7_braid_relations(g7):
    rep = check_relations(g7)
    assert rep.ok
    assert {"z = stu", "z = tus", "z = ust"} <= set(rep.checked)


def _corrupt(model, letter, row, col, value):
    bad = copy.copy(model)
    bad.mats = dict(model.mats)
    M = model.mats[letter].copy()
    if value is None:
        M.rows[row].pop(col, None)
    else:
        M.rows[row][col] = value
    bad.mats[letter] = M
    return bad


def test_zeroed_entry_breaks_relations(g6):
    (col, _), = list(g6.matrix("s").rows[0].items())
    assert not check_relations(_corrupt(g6, "s", 0, col, None)).ok


@slow
@given(st.data())
def test_random_corruption_detected(g6, data):
    letter = data.draw(st.sampled_from(["s", "S", "u", "U"]))
    M = g6.matrix(letter)
    row = data.draw(st.integers(0, g6.dim - 1))
    col = data.draw(st.sampled_from(sorted(M.rows[row]) or [0]))
    old = M.rows[row].get(col, g6.ring.zero())
    bad = _corrupt(g6, letter, row, col, old + g6.ring.var("a1"))
    assert not check_relations(bad).ok


def test_parabolic_matrix_commutes(g6):
    lam = parabolic_matrix(g6)
    for L in ("s", "u", "z"):
        assert lam @ g6.matrix(L) == g6.matrix(L) @ lam


words = st.lists(st.sampled_from(["s", "u", "S", "U"]), max_size=12).map(tuple)


@slow
@given(words, st.sampled_from(["s", "u"]))
def test_inverse_coherence(g6, w, g):
    vec = g6.express(w)
    assert g6.matrix(g.upper()).vecmat(g6.matrix(g).vecmat(vec)) == vec


@slow
@given(words)
def test_words_and_inverses_cancel(g6, w):
    assert g6.express(w + inverse_word(w)) == g6.unit_vector(0)


def test_central_power_is_not_identity(g6):
    pi = g6.express(("z",) * g6.m)
    assert pi != g6.unit_vector(0)
    assert pi == g6.express(parse_word("sususu") * g6.m)


# -- cache ------------------------------------------------------------------------
def test_cache_roundtrip(tmp_path, g4):
    s = spec("G4")
    p = save_model(g4, cache_path(tmp_path, s))
    loaded = load_model(p, s)
    assert loaded is not None
    assert all(loaded.mats[L] == g4.mats[L] for L in g4.mats)
    assert model_digest(loaded) == model_digest(g4)
    assert load_model(p, spec("G6")) is None
    assert load_model(tmp_path / "missing.json", s) is None


def test_build_model_uses_cache(tmp_path):
    m1, info1 = build_model("G4", tmp_path)
    m2, info2 = build_model("G4", tmp_path)
    assert info1["cache"] == "miss" and info2["cache"] == "hit"
    assert info1["digest"] == info2["digest"]
    assert check_relations(m2).ok


def test_incomplete_table_rejected():
    from rank2hecke.hecke import IncompleteTable
    with pytest.raises(IncompleteTable):
        build_matrices(seed_table("G4"))


@pytest.mark.parametrize("gid", ["G4", "G5", "G6", "G7", "G8", "G9", "G10", "G11", "G12", "G13", "G14", "G15"])
def test_inverse_coherence_all_groups(store, gid):
    import numpy as np
    from rank2hecke.verify import random_word
    model = store.get(gid)
    gens = list(model.spec.generators)
    letters = gens + [g.upper() for g in gens]
    rng = np.random.default_rng(1)
    for _ in range(200):
        vec = model.express(random_word(rng, letters, 12))
        g = gens[int(rng.integers(len(gens)))]
        assert model.matrix(g.upper()).vecmat(model.matrix(g).vecmat(vec)) == vec
