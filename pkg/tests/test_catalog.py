import json

import pytest

from rank2hecke.catalog import (ORDERED_IDS, UnknownGroup, all_specs, dump_catalog, expected_determinant,
                                spec, theta, theta_images)
from rank2hecke.groups import verify_tree
from rank2hecke.structure import alt_listing_report, realize
from rank2hecke.words import parse_word

ORDERS = dict(zip(ORDERED_IDS, (24, 72, 48, 144, 96, 192, 288, 576, 48, 96, 144, 288)))

# printed determinant tables
PRINTED_DETS = {
    "G7": "a0^936*b0^528*c0^672", "G6": "a0^264*c0^192", "G5": "-b0^264*c0^336", "G4": "-c0^96",
    "G11": "a0^7296*b0^4416*c0^4032", "G9": "a0^2240*c0^1248", "G10": "b0^2208*c0^2016",
    "G15": "a0^3648*b0^2208*c0^2016", "G8": "c0^624", "G13": "a0^1120*c0^592",
    "G14": "-a0^1692*b0^1200", "G12": "-a0^576",
}


def test_twelve_records_in_order():
    assert [s.id for s in all_specs()] == list(ORDERED_IDS)
    assert [s.order for s in all_specs()] == list(ORDERS.values())


def test_unknown_id():
    with pytest.raises(UnknownGroup):
        spec("G99")
    assert spec("g6").id == "G6"


def test_g8_record():
    s = spec("G8")
    assert s.x_words == ("1", "v", "v^2", "w", "wu", "wu^2")
    assert s.generators["v"] == "sus" and "w" in s.redundant


def test_g14_record():
    s = spec("G14")
    assert s.x_words == ("1", "s", "st", "sts", "stst", "ststs", "stst^2", "stst^2s")
    assert s.parabolic == "t"


def test_g7_and_g6_share_x():
    assert spec("G7").x_words == spec("G6").x_words == ("1", "s", "su", "sus")


@pytest.mark.parametrize("gid", ORDERED_IDS)
def test_record_invariants(gid):
    s = spec(gid)
    assert s.num_x * s.parabolic_order * s.center_order == s.order
    det = expected_determinant(gid)
    assert det.is_unit()
    assert str(det) == PRINTED_DETS[gid]
    assert det.total_degree() % 2 == 0
    maximal_order = 144 if s.family == "tetrahedral" else 576
    assert s.index * s.order == maximal_order
    assert (s.theta is not None) == (gid in ("G4", "G5", "G6"))
    assert s.m == s.center_order and s.l == s.order // s.m


def test_expected_determinant_examples():
    assert str(expected_determinant("G11")) == "a0^7296*b0^4416*c0^4032"
    assert str(expected_determinant("G12")) == "-a0^576"
    assert str(expected_determinant("G5")) == "-b0^264*c0^336"


def test_invertible_variables_are_constant_terms():
    for s in all_specs():
        ring = s.ring()
        inv = {v for v, flag in zip(ring.names, ring.invertible) if flag}
        assert inv == {v for v in ring.names if v.endswith("0")}


def test_theta_rows():
    assert theta("G4") == {"a0": "1", "a1": "0", "b0": "1", "b1": "0", "b2": "0",
                           "c0": "c0", "c1": "c1", "c2": "c2"}
    assert [theta("G6")[k] for k in ("a0", "a1", "b0", "b1", "b2")] == ["a0", "a1", "1", "0", "0"]
    assert [theta("G5")[k] for k in ("a0", "a1", "b0", "b1", "b2")] == ["1", "0", "b0", "b1", "b2"]
    with pytest.raises(ValueError):
        theta("G7")
    with pytest.raises(LookupError):
        theta("G9")
    src, dst, images = theta_images("G4")
    assert images["c1"] == dst.var("c1") and images["a0"] == 1


@pytest.mark.parametrize("gid", ORDERED_IDS)
def test_records_realize(gid):
    r = realize(gid)
    assert r.ok, r.failures()
    assert verify_tree(r.ambient, r.spec.spanning_tree(), r.x, r.letters)
    assert all(ok for _, ok in alt_listing_report(r))


def test_g8_w_is_z3_s():
    r = realize("G8")
    G = r.ambient
    z3s = G.mult[G.power(r.z_amb, 3), G.generators["s"]]
    assert r.letters["w"] == z3s


def test_g13_q_is_u_inverse_z3():
    r = realize("G13")
    G = r.ambient
    assert r.letters["q"] == G.mult[G.inv[G.generators["u"]], G.power(r.z_amb, 3)]
    assert r.letters["x"] == G.eval_word(parse_word("usU"))


def test_dump_catalog(tmp_path):
    path = dump_catalog(tmp_path / "catalog.json")
    data = json.loads(path.read_text())
    assert data["schema_version"] == 1
    assert len(data["groups"]) == 12
    rec = {g["id"]: g for g in data["groups"]}
    assert rec["G8"]["generators"]["v"] == "sus" and rec["G8"]["redundant"]["w"] == "uvu"
    assert rec["G13"]["generators"]["x"] == "Tst" and rec["G13"]["redundant"]["q"] == "sxrs"


def test_content_hash_changes_with_record():
    import dataclasses
    s = spec("G6")
    assert dataclasses.replace(s, hints=(("ss", "z"),)).content_hash() != s.content_hash()
