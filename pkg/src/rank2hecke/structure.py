"""Group-level realization of a catalog record inside its maximal group.

Builds the maximal group by coset enumeration, locates the subgroup, and
audits the record: order, center, generator orders, braid and center words,
the factorization ``G = Z P X`` and the spanning tree.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache

from .catalog import GroupSpec, ambient_presentation, spec as get_spec
from .groups import (FiniteGroup, center, cyclic_subgroup, enumerate_group,
                     verify_factorization, verify_tree)
from .words import Word, parse_word


@lru_cache(maxsize=None)
def ambient_group(u_order: int) -> FiniteGroup:
    order = {3: 144, 4: 576}[u_order]
    return enumerate_group(ambient_presentation(u_order), expected_order=order)


@dataclass
class Realization:
    spec: GroupSpec
    ambient: FiniteGroup
    letters: dict[str, int]  # own generator, redundant letters and z (= z_j)
    elements: list[int]  # subgroup elements (as ambient elements)
    x: list[int]  # coset representatives from the tree words
    z_amb: int  # central element stu of the maximal group
    audit: list[tuple[str, bool, str]] = field(default_factory=list)

    def eval(self, word: Word) -> int:
        return self.ambient.eval_word(word, self.letters)

    def eval_alt(self, word: Word) -> int:
        """Evaluate with s,t,u,z read in the maximal group and other letters as own letters."""
        extra = dict(self.letters)
        for g in ("s", "t", "u"):
            extra[g] = self.ambient.generators[g]
        extra["z"] = self.z_amb
        return self.ambient.eval_word(word, extra)

    @property
    def ok(self) -> bool:
        return all(flag for _, flag, _ in self.audit)

    def failures(self) -> list[str]:
        return [f"{name}: {msg}" for name, flag, msg in self.audit if not flag]


def realize(group: GroupSpec | str) -> Realization:
    s = group if isinstance(group, GroupSpec) else get_spec(group)
    amb = ambient_group(4 if s.family == "octahedral" else 3)
    letters: dict[str, int] = {}
    for g, w in s.generators.items():
        letters[g] = amb.eval_word(parse_word(w))
    for r, w in s.redundant.items():
        letters[r] = amb.eval_word(parse_word(w), letters)
    z_amb = amb.eval_word(parse_word("stu"))
    letters["z"] = amb.eval_word(parse_word(s.center_words[0]), letters)
    elements = amb.closure([letters[g] for g in s.generators])
    x = [amb.eval_word(w, letters) for w in s.tree_words()]
    real = Realization(s, amb, letters, elements, x, z_amb)
    real.audit = _audit(real)
    return real


def _audit(r: Realization) -> list[tuple[str, bool, str]]:
    s, G, L = r.spec, r.ambient, r.letters
    out: list[tuple[str, bool, str]] = []

    def rec(name: str, ok: bool, msg: str = "") -> None:
        out.append((name, bool(ok), msg))

    rec("order", len(r.elements) == s.order, f"|<gens>| = {len(r.elements)}, expected {s.order}")
    for g, e in s.gen_orders.items():
        got = G.element_order(L[g])
        rec(f"order of {g}", got == e, f"{got} vs {e}")
    for rel in s.braid_relations:
        vals = {G.eval_word(parse_word(w), L) for w in rel}
        rec(f"braid {'='.join(rel)}", len(vals) == 1, "")
    for w in s.center_words:
        rec(f"center word {w}", G.eval_word(parse_word(w), L) == L["z"], "")
    rec("z_j = z^index", L["z"] == G.power(r.z_amb, s.index), "")
    for name, w in s.redundant.items():
        rec(f"definition {name}", G.eval_word(parse_word(w), L) == L[name], "")

    sub, emb = G.subgroup({g: L[g] for g in s.generators})
    cen = {int(emb[c]) for c in center(sub)}
    Z = cyclic_subgroup(G, L["z"])
    rec("center", cen == set(Z), f"|Z(G)| = {len(cen)}, |<z_j>| = {len(Z)}")
    rec("center order", len(Z) == s.center_order, f"{len(Z)} vs {s.center_order}")

    P = cyclic_subgroup(G, L[s.parabolic])
    members = set(r.elements)
    rec("x in group", all(v in members for v in r.x), "")
    rec("index", G.order == s.order * s.index, f"{G.order} / {s.order} vs {s.index}")
    try:
        fact = verify_factorization(G, Z, P, r.x, order=len(r.elements))
        rec("factorization G = Z P X", fact, "")
    except ValueError as exc:
        rec("factorization G = Z P X", False, str(exc))
    listed = [G.eval_word(parse_word(w), L) for w in s.x_words]
    rec("tree matches X listing", listed == r.x,
        _mismatch(s.x_words, listed, r.x))
    tree_ok = verify_tree(G, s.spanning_tree(), r.x, L)
    rec("spanning tree", tree_ok, "")
    return out


def alt_listing_report(r: Realization) -> list[tuple[int, bool]]:
    """Compare the alternate X listing with the tree representatives, index by index."""
    out = []
    for i, w in enumerate(r.spec.x_words_alt):
        out.append((i, r.eval_alt(parse_word(w)) == r.x[i]))
    return out


def _mismatch(words, got, want) -> str:
    bad = [f"x{i + 1}={w}" for i, (w, a, b) in enumerate(zip(words, got, want)) if a != b]
    return "differs at " + ", ".join(bad) if bad else ""


def group_image(r: Realization, word: Word) -> int:
    return r.eval(word)


def coset_table(r: Realization) -> dict[int, tuple[int, int, int]]:
    """Index of each subgroup element in the ``Z P X`` factorization as (k, e, i)."""
    G = r.ambient
    Z = cyclic_subgroup(G, r.letters["z"])
    P = cyclic_subgroup(G, r.letters[r.spec.parabolic])
    out = {}
    for k, zk in enumerate(Z):
        for e, pe in enumerate(P):
            zp = int(G.mult[zk, pe])
            for i, xi in enumerate(r.x):
                out[int(G.mult[zp, xi])] = (k, e, i)
    return out
