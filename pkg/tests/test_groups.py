import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from sympy.combinatorics.fp_groups import FpGroup
from sympy.combinatorics.free_groups import free_group

from rank2hecke.catalog import ambient_presentation
from rank2hecke.groups import (EnumerationError, Presentation, SpanningTree, center, cyclic_subgroup,
                               enumerate_group, todd_coxeter, verify_factorization, verify_tree)
from rank2hecke.structure import ambient_group, realize
from rank2hecke.words import format_word, free_reduce, inverse_word, parse_word


# -- words --------------------------------------------------------------------
def test_parse_and_format():
    assert parse_word("z^3 s") == ("z", "z", "z", "s")
    assert parse_word("t^-1") == ("T",)
    assert parse_word("1") == ()
    assert format_word(parse_word("su^2S")) == "s u^2 s^-1"
    with pytest.raises(ValueError):
        parse_word("s+u")


@given(st.lists(st.sampled_from("stuSTU"), max_size=12).map(tuple))
def test_inverse_word_involution(w):
    assert inverse_word(inverse_word(w)) == w
    assert free_reduce(w + inverse_word(w)) == ()


# -- enumeration against an independent implementation -----------------------
def _sympy_order(u_order: int) -> int:
    F, s, t, u = free_group("s t u")
    rels = [s**2, t**3, u**u_order, s * t * u * (t * u * s) ** -1, t * u * s * (u * s * t) ** -1]
    return FpGroup(F, rels).order()


@pytest.mark.parametrize("u_order,order", [(3, 144), (4, 576)])
def test_maximal_group_orders(u_order, order):
    G = ambient_group(u_order)
    assert G.order == order
    assert _sympy_order(u_order) == order


def test_g4_own_presentation_matches_sympy():
    pres = Presentation(("s", "t"), (parse_word("s^3"), parse_word("t^3"), parse_word("stsTST")))
    G = enumerate_group(pres, expected_order=24)
    F, a, b = free_group("a b")
    assert G.order == FpGroup(F, [a**3, b**3, a * b * a * (b * a * b) ** -1]).order() == 24


def test_relators_hold():
    for u_order in (3, 4):
        pres = ambient_presentation(u_order)
        G = ambient_group(u_order)
        assert all(G.relator_holds(r) for r in pres.relators)
        assert G.is_closed()


def test_enumeration_cap():
    pres = Presentation(("a", "b"), (parse_word("a^2"),))  # infinite group
    with pytest.raises(EnumerationError):
        todd_coxeter(pres, max_cosets=200)


@settings(max_examples=25, deadline=None)
@given(st.integers(2, 12))
def test_dihedral_orders(n):
    pres = Presentation(("r", "f"), (parse_word(f"r^{n}"), parse_word("f^2"), parse_word("frfr")))
    G = enumerate_group(pres, expected_order=2 * n)
    assert G.order == 2 * n
    # rows of the multiplication table are permutations
    assert all(len(set(row)) == G.order for row in G.mult.tolist())


def test_trivial_group_center():
    G = enumerate_group(Presentation(("a",), (parse_word("a"),)))
    assert G.order == 1 and center(G) == [0]


# -- centers ----------------------------------------------------------------------
def test_g7_center_is_generated_by_stu():
    G = ambient_group(3)
    z = G.eval_word(parse_word("stu"))
    assert sorted(center(G)) == sorted(cyclic_subgroup(G, z))
    assert len(center(G)) == 12


def test_g6_center():
    r = realize("G6")
    sub, emb = r.ambient.subgroup({g: r.letters[g] for g in r.spec.generators})
    cen = {int(emb[c]) for c in center(sub)}
    z3 = r.ambient.power(r.z_amb, 3)
    assert cen == set(cyclic_subgroup(r.ambient, z3)) and len(cen) == 4


# -- factorization and trees ------------------------------------------------------
def _zpx(gid):
    r = realize(gid)
    G = r.ambient
    Z = cyclic_subgroup(G, r.letters["z"])
    P = cyclic_subgroup(G, r.letters[r.spec.parabolic])
    return r, Z, P


def test_g6_factorization():
    r, Z, P = _zpx("G6")
    assert (len(Z), len(P), len(r.x)) == (4, 3, 4)
    assert verify_factorization(r.ambient, Z, P, r.x, order=48)


def test_g9_factorization():
    r, Z, P = _zpx("G9")
    assert len(Z) * len(P) * len(r.x) == 192
    assert verify_factorization(r.ambient, Z, P, r.x, order=192)


def test_factorization_rejects_repeats():
    r, Z, P = _zpx("G6")
    assert not verify_factorization(r.ambient, Z, P, [0] * len(r.x), order=48)


def test_factorization_size_mismatch():
    r, Z, P = _zpx("G6")
    with pytest.raises(ValueError):
        verify_factorization(r.ambient, Z, P, r.x[:-1], order=48)


@settings(max_examples=30, deadline=None)
@given(st.permutations(range(6)))
def test_factorization_is_a_set_property(perm):
    r, Z, P = _zpx("G9")
    X = [r.x[i] for i in perm]
    assert verify_factorization(r.ambient, Z, P, X, order=192)


def test_g9_tree():
    r = realize("G9")
    assert [lab for _, _, lab in r.spec.tree] == ["s", "u", "s", "u", "s"]
    assert verify_tree(r.ambient, r.spec.spanning_tree(), r.x, r.letters)


def test_g12_tree_uses_y():
    r = realize("G12")
    assert any(lab == "y" for _, _, lab in r.spec.tree)
    assert verify_tree(r.ambient, r.spec.spanning_tree(), r.x, r.letters)


def test_corrupted_tree_label():
    r = realize("G9")
    edges = list(r.spec.tree)
    p, c, _ = edges[2]
    edges[2] = (p, c, "u")
    assert not verify_tree(r.ambient, SpanningTree(len(r.x), tuple(edges)), r.x, r.letters)


def test_tree_shape_checks():
    assert not SpanningTree(3, ((0, 1, "s"), (1, 0, "s"))).is_tree()
    assert SpanningTree(3, ((0, 1, "s"), (1, 2, "u"))).is_tree()


def test_regular_representation_is_associative():
    G = ambient_group(3)
    rng = np.random.default_rng(0)
    a, b, c = rng.integers(0, G.order, size=(3, 200))
    assert np.array_equal(G.mult[G.mult[a, b], c], G.mult[a, G.mult[b, c]])
