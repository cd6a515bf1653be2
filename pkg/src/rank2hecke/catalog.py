"""Per-group data for the tetrahedral (G4-G7) and octahedral (G8-G15) families.

Every group is realized inside the maximal group of its family
(G7 or G11, both ``<s,t,u | s^2 = t^3 = u^e = 1, stu = tus = ust>``).  Each
record carries two layers of data:

* group level: generator words in the maximal group, coset words ``X`` and the
  spanning tree whose edge labels define the braid word of each ``x``;
* Hecke level: the group's own braid relations, the order and parameter
  family of each generator, positive words for the central element ``z_j``
  and definitions of redundant generators.

Letters are single characters (see :mod:`rank2hecke.words`).  ``z`` is
reserved for the central element of the group itself.  Composite tree labels
such as ``tu`` or ``st`` get a one-letter name and a display name.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import asdict, dataclass, field
from pathlib import Path

from .groups import Presentation, SpanningTree
from .laurent import LaurentPoly, VarSpec
from .words import parse_word

FAMILY_MAX = {"tetrahedral": "G7", "octahedral": "G11"}
PARAM_LETTERS = ("a", "b", "c")


class UnknownGroup(KeyError):
    pass


@dataclass(frozen=True)
class GroupSpec:
    id: str
    family: str
    order: int
    index: int  # index l_j in the maximal group; z_j = z^index
    generators: dict[str, str]  # own generator -> word in the maximal group
    gen_orders: dict[str, int]
    params: dict[str, str]  # own generator -> parameter family letter
    braid_relations: tuple[tuple[str, ...], ...]  # each tuple lists equal positive words
    center_words: tuple[str, ...]  # positive words for z_j; the first is used for T_z
    center_order: int
    parabolic: str
    redundant: dict[str, str]  # letter -> defining word in own generators
    display: dict[str, str]  # letter -> conventional printed name
    x_words: tuple[str, ...]  # coset words as listed, in own generators/redundant letters
    tree: tuple[tuple[int, int, str], ...]
    expected_det: tuple[int, dict[str, int]]  # (sign, exponents)
    theta: dict[str, str] | None = None  # coefficient of the maximal group -> image
    embedding: dict[str, str] | None = None  # own generator -> word in maximal Hecke generators
    hints: tuple[tuple[str, str], ...] = ()  # extra algebra identities used when rules stall
    # second listing of X; letters s,t,u,z are read in the maximal group (audit only)
    x_words_alt: tuple[str, ...] = ()

    # -- derived data ---------------------------------------------------------
    @property
    def maximal(self) -> str:
        return FAMILY_MAX[self.family]

    @property
    def is_maximal(self) -> bool:
        return self.id == self.maximal

    @property
    def parabolic_order(self) -> int:
        return self.gen_orders[self.parabolic]

    @property
    def m(self) -> int:
        return self.center_order

    @property
    def l(self) -> int:
        return self.order // self.center_order

    @property
    def num_x(self) -> int:
        return len(self.x_words)

    def spanning_tree(self) -> SpanningTree:
        return SpanningTree(len(self.x_words), tuple(self.tree))

    def tree_words(self) -> list[tuple[str, ...]]:
        words = self.spanning_tree().path_words()
        return [words[i] for i in range(len(self.x_words))]

    def hecke_letters(self) -> tuple[str, ...]:
        return tuple(self.generators) + ("z",) + tuple(self.redundant)

    def param_names(self, gen: str) -> list[str]:
        """Coefficient names ``p0..p{e-1}`` of the order relation of ``gen``."""
        p = self.params[gen]
        return [f"{p}{k}" for k in range(self.gen_orders[gen])]

    def ring(self) -> VarSpec:
        names: list[str] = []
        for g in self.generators:
            for v in self.param_names(g):
                if v not in names:
                    names.append(v)
        names.sort(key=lambda v: (v[0], int(v[1:])))
        return VarSpec.of(names, [v for v in names if v.endswith("0") and len(v) == 2])

    def order_relation(self, gen: str, ring: VarSpec | None = None) -> list[LaurentPoly]:
        """``[p0, ..., p{e-1}]`` with ``T^e = sum p_k T^k``."""
        ring = ring or self.ring()
        return [ring.var(v) for v in self.param_names(gen)]

    def expected_determinant(self, ring: VarSpec | None = None) -> LaurentPoly:
        ring = ring or self.ring()
        sign, exps = self.expected_det
        return ring.monomial(exps, sign)

    def presentation_ambient(self) -> Presentation:
        e = 3 if self.family == "tetrahedral" else 4
        return ambient_presentation(e)

    def content_hash(self) -> str:
        blob = json.dumps(to_record(self), sort_keys=True).encode()
        return hashlib.sha256(blob).hexdigest()[:16]


def ambient_presentation(u_order: int) -> Presentation:
    w = parse_word
    return Presentation(
        ("s", "t", "u"),
        (w("s^2"), w("t^3"), w(f"u^{u_order}"), w("stuSUT"), w("tusTSU")),
    )


def _x(*words: str) -> tuple[str, ...]:
    return tuple(words)


_TET_THETA = {
    "G4": {"a0": "1", "a1": "0", "b0": "1", "b1": "0", "b2": "0", "c0": "c0", "c1": "c1", "c2": "c2"},
    "G5": {"a0": "1", "a1": "0", "b0": "b0", "b1": "b1", "b2": "b2", "c0": "c0", "c1": "c1", "c2": "c2"},
    "G6": {"a0": "a0", "a1": "a1", "b0": "1", "b1": "0", "b2": "0", "c0": "c0", "c1": "c1", "c2": "c2"},
}

_X_MAX = _x("1", "s", "su", "sus")
_TREE_MAX = ((0, 1, "s"), (1, 2, "u"), (2, 3, "s"))
_X_OCT = _x("1", "s", "su", "sus", "su^2", "su^2s")
_TREE_OCT = ((0, 1, "s"), (1, 2, "u"), (2, 3, "s"), (2, 4, "u"), (4, 5, "s"))

SPECS: dict[str, GroupSpec] = {}


def _add(spec: GroupSpec) -> None:
    SPECS[spec.id] = spec


# ---------------------------------------------------------------- tetrahedral
_add(GroupSpec(
    id="G7", family="tetrahedral", order=144, index=1,
    generators={"s": "s", "t": "t", "u": "u"},
    gen_orders={"s": 2, "t": 3, "u": 3},
    params={"s": "a", "t": "b", "u": "c"},
    braid_relations=(("stu", "tus", "ust"),),
    center_words=("stu", "tus", "ust"),
    center_order=12, parabolic="u", redundant={}, display={},
    x_words=_X_MAX, tree=_TREE_MAX,
    expected_det=(1, {"a0": 936, "b0": 528, "c0": 672}),
))
_add(GroupSpec(
    id="G6", family="tetrahedral", order=48, index=3,
    generators={"s": "s", "u": "u"},
    gen_orders={"s": 2, "u": 3},
    params={"s": "a", "u": "c"},
    braid_relations=(("sususu", "ususus"),),
    center_words=("sususu", "ususus"),
    center_order=4, parabolic="u", redundant={}, display={},
    x_words=_X_MAX, tree=_TREE_MAX,
    expected_det=(1, {"a0": 264, "c0": 192}),
    theta=_TET_THETA["G6"], embedding={"s": "s", "u": "u"},
))
_add(GroupSpec(
    id="G5", family="tetrahedral", order=72, index=2,
    generators={"t": "t", "u": "u"},
    gen_orders={"t": 3, "u": 3},
    params={"t": "b", "u": "c"},
    braid_relations=(("tutu", "utut"),),
    center_words=("tutu", "utut"),
    center_order=6, parabolic="u",
    redundant={"p": "tu"}, display={"p": "tu"},
    x_words=_x("1", "tut^-1", "tu", "tu^2"),
    tree=((0, 2, "p"), (2, 1, "T"), (1, 3, "p")),
    expected_det=(-1, {"b0": 264, "c0": 336}),
    theta=_TET_THETA["G5"], embedding={"t": "t", "u": "u"},
    hints=(("pp", "z"),),
    x_words_alt=_x("1", "sus", "zs", "zsu"),
))
_add(GroupSpec(
    id="G4", family="tetrahedral", order=24, index=6,
    generators={"u": "u", "v": "sus"},
    gen_orders={"u": 3, "v": 3},
    params={"u": "c", "v": "c"},
    braid_relations=(("uvu", "vuv"),),
    center_words=("uvuuvu", "uvuvuv", "vuvvuv", "vuvuvu"),
    center_order=2, parabolic="u",
    redundant={"w": "uvu"}, display={"w": "w"},
    x_words=_x("1", "v", "w", "wu"),
    tree=((0, 1, "v"), (0, 2, "w"), (2, 3, "u")),
    expected_det=(-1, {"c0": 96}),
    theta=_TET_THETA["G4"], embedding={"u": "u", "v": "suS"},
    x_words_alt=_x("1", "sus", "sususu s", "sususu su"),
))

# ----------------------------------------------------------------- octahedral
_add(GroupSpec(
    id="G11", family="octahedral", order=576, index=1,
    generators={"s": "s", "t": "t", "u": "u"},
    gen_orders={"s": 2, "t": 3, "u": 4},
    params={"s": "a", "t": "b", "u": "c"},
    braid_relations=(("stu", "tus", "ust"),),
    center_words=("stu", "tus", "ust"),
    center_order=24, parabolic="u", redundant={}, display={},
    x_words=_X_OCT, tree=_TREE_OCT,
    expected_det=(1, {"a0": 7296, "b0": 4416, "c0": 4032}),
))
_add(GroupSpec(
    id="G9", family="octahedral", order=192, index=3,
    generators={"s": "s", "u": "u"},
    gen_orders={"s": 2, "u": 4},
    params={"s": "a", "u": "c"},
    braid_relations=(("sususu", "ususus"),),
    center_words=("sususu", "ususus"),
    center_order=8, parabolic="u", redundant={}, display={},
    x_words=_X_OCT, tree=_TREE_OCT,
    expected_det=(1, {"a0": 2240, "c0": 1248}),
))
_add(GroupSpec(
    id="G10", family="octahedral", order=288, index=2,
    generators={"t": "t", "u": "u"},
    gen_orders={"t": 3, "u": 4},
    params={"t": "b", "u": "c"},
    braid_relations=(("tutu", "utut"),),
    center_words=("tutu", "utut"),
    center_order=12, parabolic="u",
    redundant={"p": "tu"}, display={"p": "tu"},
    x_words=_x("1", "tut^-1", "tu^2t^-1", "tu", "tu^2", "tu^3"),
    tree=((0, 3, "p"), (3, 1, "T"), (1, 4, "p"), (4, 2, "T"), (2, 5, "p")),
    expected_det=(1, {"b0": 2208, "c0": 2016}),
    hints=(("pp", "z"),),
    x_words_alt=_x("1", "sus", "su^2s", "zs", "zsu", "zsu^2"),
))
_add(GroupSpec(
    id="G8", family="octahedral", order=96, index=6,
    generators={"u": "u", "v": "sus"},
    gen_orders={"u": 4, "v": 4},
    params={"u": "c", "v": "c"},
    braid_relations=(("uvu", "vuv"),),
    center_words=("uvuuvu", "uvuvuv", "vuvuvu", "vuvvuv"),
    center_order=4, parabolic="u",
    redundant={"w": "uvu"}, display={"w": "w"},
    x_words=_x("1", "v", "v^2", "w", "wu", "wu^2"),
    tree=((0, 1, "v"), (1, 2, "v"), (0, 3, "w"), (3, 4, "u"), (4, 5, "u")),
    expected_det=(1, {"c0": 624}),
    x_words_alt=_x("1", "sus", "su^2s", "sususu s", "sususu su", "sususu su^2"),
))
_add(GroupSpec(
    id="G15", family="octahedral", order=288, index=2,
    generators={"s": "s", "t": "t", "r": "u^2"},
    gen_orders={"s": 2, "t": 3, "r": 2},
    params={"s": "a", "t": "b", "r": "c"},
    braid_relations=(("rst", "str"), ("trsts", "rstst")),
    center_words=("rstst", "trsts", "tstrs", "strst", "ststr"),
    center_order=12, parabolic="r",
    redundant={"p": "st"}, display={"p": "st", "r": "u^2"},
    x_words=_x("1", "s", "stst^-1s^-1", "stst^-1", "sr", "srs",
               "st", "sts", "srst", "srsts", "stsr", "stsrs"),
    tree=((0, 1, "s"), (0, 6, "p"), (1, 4, "r"), (6, 7, "s"), (4, 5, "s"), (4, 8, "p"),
          (7, 3, "T"), (7, 10, "r"), (8, 9, "s"), (3, 2, "S"), (10, 11, "s")),
    expected_det=(1, {"a0": 3648, "b0": 2208, "c0": 2016}),
    x_words_alt=_x("1", "s", "U su", "U sus", "su^2", "su^2s",
                   "U z", "U zs", "zsu", "zsus", "U zsu^2", "U zsu^2s"),
))
_add(GroupSpec(
    id="G13", family="octahedral", order=96, index=6,
    generators={"s": "s", "x": "Tst", "r": "u^2"},
    gen_orders={"s": 2, "x": 2, "r": 2},
    params={"s": "a", "x": "a", "r": "c"},
    braid_relations=(("sxrs", "xrsx"), ("rsxrs", "xrsxr")),
    center_words=("rsxrssxrs", "sxrsxrsxr", "xrsxrsxrs"),
    center_order=4, parabolic="r",
    redundant={"q": "sxrs"}, display={"q": "q", "r": "u^2"},
    x_words=_x("1", "s", "qx^-1s^-1", "qx^-1", "sr", "srs",
               "q", "qs", "srq", "srqs", "qsr", "qsrs"),
    tree=((0, 1, "s"), (0, 6, "q"), (1, 4, "r"), (6, 7, "s"), (4, 5, "s"), (4, 8, "q"),
          (6, 3, "X"), (7, 10, "r"), (8, 9, "s"), (3, 2, "S"), (10, 11, "s")),
    expected_det=(1, {"a0": 1120, "c0": 592}),
    hints=(("qx", "sq"), ("rq", "qr"), ("rqq", "z")),
    x_words_alt=_x("1", "s", "usu", "usus", "su^2", "su^2s",
                   "U z^3", "U z^3 s", "z^3 su", "z^3 sus", "U z^3 su^2", "U z^3 su^2s"),
))
_add(GroupSpec(
    id="G14", family="octahedral", order=144, index=4,
    generators={"s": "s", "t": "t"},
    gen_orders={"s": 2, "t": 3},
    params={"s": "a", "t": "b"},
    braid_relations=(("stststst", "tstststs"),),
    center_words=("stststst", "tstststs"),
    center_order=6, parabolic="t", redundant={}, display={},
    x_words=_x("1", "s", "st", "sts", "stst", "ststs", "stst^2", "stst^2s"),
    tree=((0, 1, "s"), (1, 2, "t"), (2, 3, "s"), (3, 4, "t"), (4, 5, "s"), (4, 6, "t"), (6, 7, "s")),
    expected_det=(-1, {"a0": 1692, "b0": 1200}),
))
_add(GroupSpec(
    id="G12", family="octahedral", order=48, index=12,
    generators={"s": "s", "g": "tsT", "h": "Tst"},
    gen_orders={"s": 2, "g": 2, "h": 2},
    params={"s": "a", "g": "a", "h": "a"},
    braid_relations=(("sghs", "ghsg", "hsgh"),),
    center_words=("sghssghssghs", "ghsgghsgghsg", "hsghhsghhsgh", "sghsghsghsgh"),
    center_order=2, parabolic="s",
    redundant={"y": "sghs"}, display={"y": "y"},
    x_words=_x("1", "g", "gh", "ghg", "y", "gy", "ghy", "ghgy", "y^2", "gy^2", "ghy^2", "ghgy^2"),
    tree=((0, 1, "g"), (1, 2, "h"), (2, 3, "g"), (3, 7, "y"), (7, 11, "y"), (0, 4, "y"),
          (4, 8, "y"), (1, 5, "y"), (5, 9, "y"), (2, 6, "y"), (6, 10, "y")),
    expected_det=(-1, {"a0": 576}),
    hints=(("sy", "yg"), ("gy", "yh"), ("hy", "ys")),
    x_words_alt=_x("1", "g", "gh", "ghg", "ghsg", "ghsgh", "ghsghs", "ghsghsh",
                   "ghsghsgh", "ghsghsghs", "ghsghsghsg", "ghsghsghsgs"),
))

ORDERED_IDS = tuple(f"G{j}" for j in range(4, 16))


def spec(group_id: str) -> GroupSpec:
    key = normalize_id(group_id)
    if key not in SPECS:
        raise UnknownGroup(group_id)
    return SPECS[key]


def normalize_id(group_id: str) -> str:
    g = str(group_id).strip().upper()
    if not g.startswith("G"):
        g = "G" + g
    return g


def all_specs() -> list[GroupSpec]:
    return [SPECS[g] for g in ORDERED_IDS]


def expected_determinant(group_id: str) -> LaurentPoly:
    return spec(group_id).expected_determinant()


def theta(group_id: str) -> dict[str, str]:
    s = spec(group_id)
    if s.theta is None:
        if s.is_maximal:
            raise ValueError(f"{s.id} is maximal in its family; no specialization")
        raise LookupError(f"no specialization row recorded for {s.id}")
    return dict(s.theta)


def theta_images(group_id: str) -> tuple[VarSpec, VarSpec, dict[str, LaurentPoly]]:
    """(source ring of the maximal group, target ring, images) for the specialization."""
    s = spec(group_id)
    row = theta(group_id)
    src = spec(s.maximal).ring()
    dst = s.ring()
    return src, dst, {k: dst.parse(v) for k, v in row.items()}


def to_record(s: GroupSpec) -> dict:
    rec = asdict(s)
    rec["tree"] = [list(e) for e in s.tree]
    rec["braid_relations"] = [list(r) for r in s.braid_relations]
    rec["hints"] = [list(h) for h in s.hints]
    rec["expected_det_text"] = str(s.expected_determinant())
    rec["variables"] = list(s.ring().names)
    rec["invertible"] = [v for v, inv in zip(s.ring().names, s.ring().invertible) if inv]
    rec["maximal"] = s.maximal
    rec["parabolic_order"] = s.parabolic_order
    rec["tree_words"] = ["".join(w) or "1" for w in s.tree_words()]
    return rec


CATALOG_SCHEMA_VERSION = 1


def dump_catalog(path: str | Path) -> Path:
    path = Path(path)
    data = {
        "schema_version": CATALOG_SCHEMA_VERSION,
        "letters": "lowercase = generator, uppercase = inverse, z = central element of the group",
        "groups": [to_record(s) for s in all_specs()],
    }
    path.write_text(json.dumps(data, indent=2, sort_keys=False) + "\n")
    return path
