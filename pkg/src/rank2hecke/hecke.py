"""Hecke coset tables and action matrices on the z-basis.

The z-basis of ``H(G_j)`` is ``{z^k g0^e x_i}`` where ``z`` is the central
braid element, ``g0`` the parabolic generator and ``x_i`` the coset words.
A *row* ``b = z^k x_i`` spans a free ``H'``-module ``H' b`` with
``H' = R[g0]/(Hecke relation)``.  The coset table stores, for each row ``b``
and letter ``L``, the product ``b.L`` as an ``H'``-combination of rows.
Left multiplication by ``H'`` commutes with right multiplication, so a
partially filled table acts on combinations letter by letter.

Filling proceeds by saturation: seed entries come from the spanning tree,
the shift by ``z`` and absorption of ``g0`` into the identity rows; each
missing entry is then derived from a list of *recipes*, i.e. identities
``L = sum c * word`` valid in the algebra (Hecke relations, rearrangements of
the defining relations, hints), tried in a fixed order.

Basis index convention: ``(k, e, i)`` is stored at ``(k * E + e) * nx + i``
where ``E`` is the order of ``g0`` and ``nx = |X|``.  Matrices act on row
vectors from the right: ``vec(b) @ M(L) = vec(b L)``.
"""

from __future__ import annotations

import hashlib
import json
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Sequence

from .catalog import GroupSpec, spec as get_spec
from .laurent import LaurentPoly, VarSpec
from .words import Word, invert_letter, parse_word


class StallError(RuntimeError):
    """Saturation reached a fixed point with generator columns still incomplete."""

    def __init__(self, missing: list[str]):
        self.missing = missing
        head = ", ".join(missing[:12]) + (" ..." if len(missing) > 12 else "")
        super().__init__(f"coset table saturation stalled; {len(missing)} missing entries: {head}")


class IncompleteTable(RuntimeError):
    pass


# ---------------------------------------------------------------- H' arithmetic
class ParabolicAlgebra:
    """``R[g]/(g^e - sum a_k g^k)``; elements are tuples of ``e`` coefficients."""

    def __init__(self, ring: VarSpec, coeffs: Sequence[LaurentPoly]):
        self.ring = ring
        self.a = list(coeffs)
        self.e = len(self.a)
        e = self.e
        zero = ring.zero()
        # reduction of g^d for e <= d <= 2e-2
        self._red: dict[int, tuple[LaurentPoly, ...]] = {e: tuple(self.a)}
        for d in range(e + 1, 2 * e - 1):
            prev = self._red[d - 1]
            shifted = [zero] + list(prev[:-1])
            top = prev[-1]
            self._red[d] = tuple(shifted[k] + top * self.a[k] for k in range(e))
        a0inv = self.a[0].inverse()
        inv = [zero] * e
        inv[e - 1] = a0inv
        for k in range(1, e):
            # g^{-1} = a0^{-1} (g^{e-1} - a_{e-1} g^{e-2} - ... - a_1)
            inv[k - 1] = inv[k - 1] - a0inv * self.a[k]
        self.g_inv = tuple(inv)
        self._pow_cache: dict[int, tuple[LaurentPoly, ...]] = {}

    def zero(self) -> tuple[LaurentPoly, ...]:
        z = self.ring.zero()
        return (z,) * self.e

    def scalar(self, c: LaurentPoly | int) -> tuple[LaurentPoly, ...]:
        c = c if isinstance(c, LaurentPoly) else self.ring.const(c)
        return (c,) + (self.ring.zero(),) * (self.e - 1)

    def one(self) -> tuple[LaurentPoly, ...]:
        return self.scalar(1)

    def gen_power(self, j: int) -> tuple[LaurentPoly, ...]:
        """``g^j`` for any integer ``j``."""
        if j in self._pow_cache:
            return self._pow_cache[j]
        if 0 <= j < self.e:
            out = list(self.zero())
            out[j] = self.ring.one()
            res = tuple(out)
        elif j >= self.e:
            res = self.mul(self.gen_power(j - 1), self.gen_power(1))
        else:
            res = self.mul(self.gen_power(j + 1), self.g_inv)
        self._pow_cache[j] = res
        return res

    def add(self, x, y):
        return tuple(p + q for p, q in zip(x, y))

    def scale(self, c: LaurentPoly, x):
        return tuple(c * p for p in x)

    def is_zero(self, x) -> bool:
        return all(not p.terms for p in x)

    def mul(self, x, y):
        e = self.e
        if all(not p.terms for p in x[1:]):
            c = x[0]
            return tuple(c * q for q in y)
        if all(not q.terms for q in y[1:]):
            c = y[0]
            return tuple(c * p for p in x)
        prod = [self.ring.zero()] * (2 * e - 1)
        for i, p in enumerate(x):
            if not p.terms:
                continue
            for j, q in enumerate(y):
                if q.terms:
                    prod[i + j] = prod[i + j] + p * q
        out = prod[:e]
        for d in range(e, 2 * e - 1):
            top = prod[d]
            if top.terms:
                red = self._red[d]
                for k in range(e):
                    if red[k].terms:
                        out[k] = out[k] + top * red[k]
        return tuple(out)

    def unit_inverse(self, x):
        """Inverse of ``x`` when ``x = c * g^j`` with ``c`` a unit of R, else None."""
        for j in range(-(self.e - 1), self.e):
            y = self.mul(x, self.gen_power(j))
            c = y[0]
            if c.is_unit() and all(not p.terms for p in y[1:]):
                return self.scale(c.inverse(), self.gen_power(j))
        return None


# ---------------------------------------------------------------- coset table
Vector = dict  # row index -> H' element


@dataclass
class Recipe:
    letter: str
    terms: list[tuple[LaurentPoly, Word]]
    rule: str  # R1 hecke, R2 central/definition, R4 hint
    source: str


@dataclass
class HeckeCosetTable:
    spec: GroupSpec
    ring: VarSpec
    H: ParabolicAlgebra
    m: int
    nx: int
    letters: tuple[str, ...]
    cells: dict[tuple[int, str], Vector] = field(default_factory=dict)
    provenance: dict[tuple[int, str], str] = field(default_factory=dict)
    support: dict[tuple[int, str], frozenset] = field(default_factory=dict)

    @property
    def rows(self) -> int:
        return self.m * self.nx

    def row_index(self, k: int, i: int) -> int:
        return k * self.nx + i

    def row_label(self, r: int) -> str:
        return f"b_{r + 1}"

    def cell_label(self, r: int, letter: str) -> str:
        name = letter if letter.islower() else f"{letter.lower()}^-1"
        return f"{self.row_label(r)}.{name}"

    def unit(self, r: int) -> Vector:
        return {r: self.H.one()}

    def get(self, r: int, letter: str) -> Vector | None:
        return self.cells.get((r, letter))

    def set(self, r: int, letter: str, vec: Vector, why: str) -> None:
        self.cells[(r, letter)] = vec
        self.support[(r, letter)] = frozenset(vec)
        self.provenance[(r, letter)] = why

    def reach(self, rows: Iterable[int], word: Word) -> frozenset | None:
        """Rows possibly involved after acting by ``word`` (no arithmetic); None if a cell is missing."""
        cur = frozenset(rows)
        sup = self.support
        for letter in word:
            nxt: set[int] = set()
            for r in cur:
                cell = sup.get((r, letter))
                if cell is None:
                    return None
                nxt |= cell
            cur = frozenset(nxt)
        return cur

    def act(self, vec: Vector, letter: str) -> Vector | None:
        H = self.H
        out: Vector = {}
        for r, h in vec.items():
            cell = self.cells.get((r, letter))
            if cell is None:
                return None
            for r2, h2 in cell.items():
                term = H.mul(h, h2)
                out[r2] = H.add(out[r2], term) if r2 in out else term
        return {r: h for r, h in out.items() if not H.is_zero(h)}

    def act_word(self, vec: Vector, word: Word) -> Vector | None:
        for letter in word:
            vec = self.act(vec, letter)
            if vec is None:
                return None
        return vec

    def missing(self, letters: Iterable[str]) -> list[tuple[int, str]]:
        return [(r, L) for L in letters for r in range(self.rows) if (r, L) not in self.cells]

    def format_vector(self, vec: Vector) -> str:
        parts = []
        for r in sorted(vec):
            h = vec[r]
            for j, c in enumerate(h):
                if not c.terms:
                    continue
                g = "" if j == 0 else (f"{self.spec.parabolic}" + (f"^{j}" if j > 1 else "") + "*")
                parts.append(f"({c})*{g}{self.row_label(r)}")
        return " + ".join(parts) if parts else "0"


def generator_letters(spec: GroupSpec) -> tuple[str, ...]:
    gens = tuple(spec.generators)
    return gens + tuple(g.upper() for g in gens)


def table_letters(spec: GroupSpec) -> tuple[str, ...]:
    extra = ("z", "Z") + tuple(x for r in spec.redundant for x in (r, r.upper()))
    return generator_letters(spec) + extra


def seed_table(spec: GroupSpec | str) -> HeckeCosetTable:
    """Tree edges, shifts by z and absorption of g0 into the rows ``z^k``."""
    s = spec if isinstance(spec, GroupSpec) else get_spec(spec)
    ring = s.ring()
    H = ParabolicAlgebra(ring, s.order_relation(s.parabolic, ring))
    t = HeckeCosetTable(s, ring, H, s.center_order, s.num_x, table_letters(s))
    m, nx = t.m, t.nx
    g0 = s.parabolic
    for k in range(m):
        for p, c, lab in s.tree:
            rp, rc = t.row_index(k, p), t.row_index(k, c)
            t.set(rp, lab, t.unit(rc), "tree")
            t.set(rc, invert_letter(lab), t.unit(rp), "tree")
        for i in range(nx):
            r = t.row_index(k, i)
            if k + 1 < m:
                t.set(r, "z", t.unit(t.row_index(k + 1, i)), "shift")
            if k > 0:
                t.set(r, "Z", t.unit(t.row_index(k - 1, i)), "shift")
        r0 = t.row_index(k, 0)
        t.set(r0, g0, {r0: H.gen_power(1)}, "absorb")
        t.set(r0, g0.upper(), {r0: H.gen_power(-1)}, "absorb")
    return t


# ---------------------------------------------------------------- recipes
def _inv(word: Word) -> Word:
    return tuple(invert_letter(x) for x in reversed(word))


def hecke_recipes(s: GroupSpec, ring: VarSpec) -> list[Recipe]:
    out = []
    for g in s.generators:
        a = s.order_relation(g, ring)
        e = len(a)
        G = g.upper()
        # g = a_{e-1} + a_{e-2} G + ... + a_0 G^{e-1}
        terms = [(a[e - 1 - j], (G,) * j) for j in range(e)]
        out.append(Recipe(g, [(c, w) for c, w in terms if c.terms], "R1", f"order relation of {g}"))
        # G = a0^{-1} (g^{e-1} - a_{e-1} g^{e-2} - ... - a_1)
        a0inv = a[0].inverse()
        terms = [(a0inv, (g,) * (e - 1))] + [(-(a0inv * a[k]), (g,) * (k - 1)) for k in range(e - 1, 0, -1)]
        out.append(Recipe(G, [(c, w) for c, w in terms if c.terms], "R1", f"inverse order relation of {g}"))
    return out


def _solve(lhs: Word, rhs: Word, source: str, rule: str, one: LaurentPoly) -> list[Recipe]:
    """Recipes isolating each letter of ``lhs`` in ``lhs = rhs``; z is moved to either end."""
    out = []
    for j, L in enumerate(lhs):
        if L in ("z", "Z"):
            continue
        alpha, beta = lhs[:j], lhs[j + 1:]
        fwd = _inv(alpha) + rhs + _inv(beta)
        bwd = beta + _inv(rhs) + alpha
        for letter, w in ((L, fwd), (invert_letter(L), bwd)):
            for variant in _central_variants(w):
                out.append(Recipe(letter, [(one, variant)], rule, source))
    return out


def _central_variants(word: Word) -> list[Word]:
    """Every placement of the net central power of ``word`` (z commutes with everything)."""
    zs = [x for x in word if x in ("z", "Z")]
    if not zs:
        return [word]
    rest = tuple(x for x in word if x not in ("z", "Z"))
    net = zs.count("z") - zs.count("Z")
    zpart = ("z",) * net if net >= 0 else ("Z",) * (-net)
    # ends first: they are the cheapest placements and cover most entries
    order = [0, len(rest)] + list(range(1, len(rest)))
    variants = [rest[:j] + zpart + rest[j:] for j in order]
    return list(dict.fromkeys(variants))


def _first_letter(word: Word, source: str, rule: str, one: LaurentPoly) -> list[Recipe]:
    """Central rewriting of ``z = g w``: ``g = w^-1 z`` and ``g^-1 = z^-1 w``."""
    g, rest = word[0], word[1:]
    out = []
    for letter, w in ((g, _inv(rest) + ("z",)), (invert_letter(g), ("Z",) + rest)):
        for variant in _central_variants(w):
            out.append(Recipe(letter, [(one, variant)], rule, source))
    return out


def relation_recipes(s: GroupSpec, ring: VarSpec) -> list[Recipe]:
    """R2: the primary center word and the redundant-generator definitions."""
    one = ring.one()
    out: list[Recipe] = []
    z0 = parse_word(s.center_words[0])
    src = f"z = {s.center_words[0]}"
    out.append(Recipe("z", [(one, z0)], "R2", src))
    out.append(Recipe("Z", [(one, _inv(z0))], "R2", src))
    out += _first_letter(z0, src, "R2", one)
    for r, w in s.redundant.items():
        d = parse_word(w)
        out.append(Recipe(r, [(one, d)], "R2", f"{r} = {w}"))
        out.append(Recipe(r.upper(), [(one, _inv(d))], "R2", f"{r} = {w}"))
        out += _solve(d, (r,), f"{r} = {w}", "R2", one)
    return out


def hint_relations(s: GroupSpec) -> list[tuple[str, str]]:
    """Identities rearranged in full by R4: center words, braid relations, catalog hints."""
    rels = [(w, "z") for w in s.center_words]
    for rel in s.braid_relations:
        rels += [(rel[0], w) for w in rel[1:]]
    rels += list(s.hints)
    return rels


def hint_recipes(s: GroupSpec, ring: VarSpec) -> list[Recipe]:
    """R4: alternate center words first, then every rearrangement of the hint identities."""
    one = ring.one()
    out: list[Recipe] = []
    for w in s.center_words[1:]:
        out += _first_letter(parse_word(w), f"z = {w}", "R4", one)
    for lhs, rhs in hint_relations(s):
        p, q = parse_word(lhs), parse_word(rhs)
        src = f"{lhs} = {rhs}"
        out += _solve(p, q, src, "R4", one)
        out += _solve(q, p, src, "R4", one)
    return out


# ---------------------------------------------------------------- saturation
@dataclass
class SaturationStats:
    passes: int = 0
    filled: dict[str, int] = field(default_factory=dict)
    seconds: float = 0.0


def saturate(table: HeckeCosetTable, use_hints: bool = True, max_passes: int = 10_000) -> SaturationStats:
    """Fill all generator and inverse columns, raising StallError at a fixed point.

    Rules are tried per missing entry in fixed order (column-major over the
    table letters, rows ascending): R1 Hecke relations, R2 central rewriting
    with the primary center word and redundant definitions, R3 linearity
    (entries act on combinations of rows).  Only when a full pass with these
    makes no progress does the R4 tier run: alternate center words, full
    rearrangements of all relations and hints, then linear solving for a
    single unknown entry.  Every newly filled unit entry ``b_i.L = c g0^j b_k``
    also fills ``b_k.L^-1`` (unit inversion).
    """
    t0 = time.perf_counter()
    s, ring = table.spec, table.ring
    base = hecke_recipes(s, ring) + relation_recipes(s, ring)
    hints = hint_recipes(s, ring) if use_hints else []
    by_letter: dict[str, list[Recipe]] = {}
    for rec in base:
        by_letter.setdefault(rec.letter, []).append(rec)
    hint_by_letter: dict[str, list[Recipe]] = {}
    for rec in hints:
        hint_by_letter.setdefault(rec.letter, []).append(rec)

    targets = generator_letters(s)
    scan_letters = table.letters
    stats = SaturationStats()
    H = table.H

    def try_fill(r: int, L: str, recipes: list[Recipe]) -> bool:
        for rec in recipes:
            if any(table.reach((r,), w) is None for _, w in rec.terms):
                continue
            acc: Vector = {}
            ok = True
            for c, w in rec.terms:
                v = table.act_word(table.unit(r), w)
                if v is None:
                    ok = False
                    break
                for r2, h in v.items():
                    term = H.scale(c, h)
                    acc[r2] = H.add(acc[r2], term) if r2 in acc else term
            if ok:
                acc = {k: h for k, h in acc.items() if not H.is_zero(h)}
                table.set(r, L, acc, f"{rec.rule}: {rec.source}")
                stats.filled[rec.rule] = stats.filled.get(rec.rule, 0) + 1
                _unit_inversion(table, r, L, acc)
                return True
        return False

    def sweep(recipes: dict[str, list[Recipe]]) -> int:
        n = 0
        for L in scan_letters:
            recs = recipes.get(L, [])
            if not recs:
                continue
            for r in range(table.rows):
                if (r, L) not in table.cells and try_fill(r, L, recs):
                    n += 1
        return n

    while stats.passes < max_passes:
        stats.passes += 1
        if not table.missing(targets):
            break
        if sweep(by_letter):
            continue
        if use_hints:
            if sweep(hint_by_letter):
                continue
            solved = _linear_solve(table) or _recipe_solve(table, base + hints)
            if solved:
                stats.filled["R4"] = stats.filled.get("R4", 0) + solved
                continue
        stats.seconds = time.perf_counter() - t0
        raise StallError([table.cell_label(r, L) for r, L in table.missing(targets)])
    complete_columns(table)
    stats.seconds = time.perf_counter() - t0
    return stats


def _linear_solve(table: HeckeCosetTable) -> int:
    """Use ``b_i = sum h_j (b_j.L^-1)`` from a known ``b_i.L = sum h_j b_j``.

    When every ``b_j.L^-1`` but one is known and that coefficient is a unit
    of ``H'``, the remaining entry is determined.
    """
    H = table.H
    n = 0
    for (r, L), vec in sorted(table.cells.items(), key=lambda kv: (table.letters.index(kv[0][1]), kv[0][0])):
        Li = invert_letter(L)
        unknown = [j for j in vec if (j, Li) not in table.cells]
        if len(unknown) != 1:
            continue
        j = unknown[0]
        hinv = H.unit_inverse(vec[j])
        if hinv is None:
            continue
        rest: Vector = {r: H.one()}
        for j2, h in vec.items():
            if j2 == j:
                continue
            part = table.act({j2: h}, Li)
            for r2, h2 in part.items():
                neg = H.scale(table.ring.const(-1), h2)
                rest[r2] = H.add(rest[r2], neg) if r2 in rest else neg
        sol = {k: H.mul(hinv, h) for k, h in rest.items()}
        sol = {k: h for k, h in sol.items() if not H.is_zero(h)}
        table.set(j, Li, sol, f"R3: solved from {table.cell_label(r, L)}")
        n += 1
    return n


def _recipe_solve(table: HeckeCosetTable, recipes: list[Recipe]) -> int:
    """Solve for a final-letter entry inside a recipe whose target entry is known.

    For a known ``b.L`` and recipe ``L = sum c_w w``, pick one term
    ``w = w' M``; if every other term and ``b.w'`` evaluate, then
    ``c (b.w').M = b.L - (other terms)`` is linear in the cells of ``M`` on the
    support of ``b.w'``, and a single unknown cell with unit coefficient is
    determined.  Returns after the first success so cheaper rules run again.
    """
    H, ring = table.H, table.ring
    minus = ring.const(-1)
    by_letter: dict[str, list[Recipe]] = {}
    for rec in recipes:
        by_letter.setdefault(rec.letter, []).append(rec)
    for L in table.letters:
        for r in range(table.rows):
            target = table.cells.get((r, L))
            if target is None:
                continue
            for rec in by_letter.get(L, []):
                for t_idx, (c, w) in enumerate(rec.terms):
                    if not w or not c.is_unit():
                        continue
                    M = w[-1]
                    pre = table.reach((r,), w[:-1])
                    if pre is None or all((j, M) in table.cells for j in pre):
                        continue
                    if any(table.reach((r,), w2) is None for o, (_, w2) in enumerate(rec.terms) if o != t_idx):
                        continue
                    v = table.act_word(table.unit(r), w[:-1])
                    if v is None:
                        continue
                    unknown = [j for j in v if (j, M) not in table.cells]
                    if len(unknown) != 1:
                        continue
                    j = unknown[0]
                    piv = H.unit_inverse(H.scale(c, v[j]))
                    if piv is None:
                        continue
                    rhs: Vector = dict(target)
                    ok = True
                    for o_idx, (c2, w2) in enumerate(rec.terms):
                        if o_idx == t_idx:
                            part = table.act({k: H.scale(c, h) for k, h in v.items() if k != j}, M)
                        else:
                            part = table.act_word(table.unit(r), w2)
                            if part is not None:
                                part = {k: H.scale(c2, h) for k, h in part.items()}
                        if part is None:
                            ok = False
                            break
                        for k, h in part.items():
                            neg = H.scale(minus, h)
                            rhs[k] = H.add(rhs[k], neg) if k in rhs else neg
                    if not ok:
                        continue
                    sol = {k: H.mul(piv, h) for k, h in rhs.items()}
                    sol = {k: h for k, h in sol.items() if not H.is_zero(h)}
                    table.set(j, M, sol, f"R3: solved inside {rec.source} at {table.cell_label(r, L)}")
                    _unit_inversion(table, j, M, sol)
                    return 1
    return 0


def _unit_inversion(table: HeckeCosetTable, r: int, L: str, vec: Vector) -> None:
    if len(vec) != 1:
        return
    ((r2, h),) = vec.items()
    Li = invert_letter(L)
    if (r2, Li) in table.cells:
        return
    hinv = table.H.unit_inverse(h)
    if hinv is not None:
        table.set(r2, Li, {r: hinv}, "unit inversion")


def complete_columns(table: HeckeCosetTable) -> None:
    """Fill z, z^-1 and redundant columns by evaluating their defining words."""
    s = table.spec
    defs = {"z": parse_word(s.center_words[0])}
    defs["Z"] = _inv(defs["z"])
    for r, w in s.redundant.items():
        defs[r] = parse_word(w)
        defs[r.upper()] = _inv(defs[r])
    for L, w in defs.items():
        for row in range(table.rows):
            if (row, L) in table.cells:
                continue
            v = table.act_word(table.unit(row), w)
            if v is None:
                raise IncompleteTable(f"cannot evaluate {L} on {table.row_label(row)}")
            table.set(row, L, v, "definition")


# ---------------------------------------------------------------- matrices
class ActionMatrix:
    """Sparse square matrix over a Laurent ring; ``rows[i]`` maps column -> entry."""

    __slots__ = ("dim", "rows", "ring")

    def __init__(self, ring: VarSpec, rows: list[dict[int, LaurentPoly]]):
        self.ring = ring
        self.rows = rows
        self.dim = len(rows)

    @classmethod
    def identity(cls, ring: VarSpec, n: int) -> "ActionMatrix":
        return cls(ring, [{i: ring.one()} for i in range(n)])

    def nnz(self) -> int:
        return sum(len(r) for r in self.rows)

    def copy(self) -> "ActionMatrix":
        return ActionMatrix(self.ring, [dict(r) for r in self.rows])

    def __eq__(self, other) -> bool:
        return isinstance(other, ActionMatrix) and self.rows == other.rows

    def vecmat(self, vec: dict[int, LaurentPoly]) -> dict[int, LaurentPoly]:
        """Row vector times matrix."""
        out: dict[int, LaurentPoly] = {}
        for i, c in vec.items():
            for j, a in self.rows[i].items():
                term = c * a
                out[j] = out[j] + term if j in out else term
        return {j: v for j, v in out.items() if v.terms}

    def matvec(self, vec: dict[int, LaurentPoly]) -> dict[int, LaurentPoly]:
        """Matrix times column vector."""
        out: dict[int, LaurentPoly] = {}
        for i, row in enumerate(self.rows):
            acc = None
            for j, a in row.items():
                c = vec.get(j)
                if c is not None:
                    acc = a * c if acc is None else acc + a * c
            if acc is not None and acc.terms:
                out[i] = acc
        return out

    def __matmul__(self, other: "ActionMatrix") -> "ActionMatrix":
        return ActionMatrix(self.ring, [other.vecmat(r) for r in self.rows])

    def __add__(self, other: "ActionMatrix") -> "ActionMatrix":
        rows = []
        for a, b in zip(self.rows, other.rows):
            r = dict(a)
            for j, v in b.items():
                r[j] = r[j] + v if j in r else v
            rows.append({j: v for j, v in r.items() if v.terms})
        return ActionMatrix(self.ring, rows)

    def scale(self, c: LaurentPoly) -> "ActionMatrix":
        rows = [{j: c * v for j, v in r.items()} for r in self.rows]
        return ActionMatrix(self.ring, [{j: v for j, v in r.items() if v.terms} for r in rows])

    def is_zero(self) -> bool:
        return all(not r for r in self.rows)


@dataclass
class HeckeModel:
    """Action matrices of one group together with its basis bookkeeping."""

    spec: GroupSpec
    ring: VarSpec
    mats: dict[str, ActionMatrix]
    m: int
    E: int
    nx: int

    @property
    def dim(self) -> int:
        return self.m * self.E * self.nx

    @property
    def l(self) -> int:
        return self.E * self.nx

    def index(self, k: int, e: int, i: int) -> int:
        return (k * self.E + e) * self.nx + i

    def label(self, idx: int) -> tuple[int, int, int]:
        i = idx % self.nx
        ke = idx // self.nx
        return ke // self.E, ke % self.E, i

    def basis_word(self, idx: int) -> Word:
        k, e, i = self.label(idx)
        return ("z",) * k + (self.spec.parabolic,) * e + tuple(self.spec.tree_words()[i])

    def y_word(self, y: int) -> Word:
        """Word of ``y = g0^e x_i`` with ``y = e * nx + i``."""
        return self.basis_word(y)

    def matrix(self, letter: str) -> ActionMatrix:
        return self.mats[letter]

    def word_matrix(self, word: Word) -> ActionMatrix:
        M = ActionMatrix.identity(self.ring, self.dim)
        for x in word:
            M = M @ self.mats[x]
        return M

    def unit_vector(self, idx: int = 0) -> dict[int, LaurentPoly]:
        return {idx: self.ring.one()}

    def express(self, word: Word | str, start: dict[int, LaurentPoly] | None = None) -> dict[int, LaurentPoly]:
        """Basis expansion of ``T_word`` (or of ``start * T_word``)."""
        if isinstance(word, str):
            word = parse_word(word)
        vec = start if start is not None else self.unit_vector(0)
        for x in word:
            vec = self.mats[x].vecmat(vec)
        return vec

    def column(self, word: Word | str) -> dict[int, LaurentPoly]:
        """``M(word) e_1^T``: entry ``b`` is the coefficient of 1 in ``b T_word``."""
        if isinstance(word, str):
            word = parse_word(word)
        vec = self.unit_vector(0)
        for x in reversed(word):
            vec = self.mats[x].matvec(vec)
        return vec


def build_matrices(table: HeckeCosetTable) -> HeckeModel:
    s = table.spec
    H, E, nx, m = table.H, table.H.e, table.nx, table.m
    missing = table.missing(table.letters)
    if missing:
        r, L = missing[0]
        raise IncompleteTable(f"column entry {table.cell_label(r, L)} missing")
    mats: dict[str, ActionMatrix] = {}
    dim = m * E * nx

    def idx(r: int, e: int) -> int:
        k, i = divmod(r, nx)
        return (k * E + e) * nx + i

    for L in table.letters:
        rows: list[dict[int, LaurentPoly]] = [dict() for _ in range(dim)]
        for r in range(table.rows):
            cell = table.cells[(r, L)]
            for e in range(E):
                ge = H.gen_power(e)
                out = rows[idx(r, e)]
                for r2, h in cell.items():
                    prod = H.mul(ge, h)
                    for f, c in enumerate(prod):
                        if c.terms:
                            out[idx(r2, f)] = c
        mats[L] = ActionMatrix(table.ring, rows)
    return HeckeModel(s, table.ring, mats, m, E, nx)


# ---------------------------------------------------------------- relations
@dataclass
class RelationReport:
    ok: bool
    checked: list[str]
    failure: str | None = None


def parabolic_matrix(model: HeckeModel) -> ActionMatrix:
    """Left multiplication by ``g0`` on basis coordinates (``g0^E`` reduced)."""
    s, ring = model.spec, model.ring
    a = s.order_relation(s.parabolic, ring)
    rows: list[dict[int, LaurentPoly]] = []
    for idx in range(model.dim):
        k, e, i = model.label(idx)
        if e + 1 < model.E:
            rows.append({model.index(k, e + 1, i): ring.one()})
        else:
            rows.append({model.index(k, f, i): c for f, c in enumerate(a) if c.terms})
    return ActionMatrix(ring, rows)


def check_relations(model: HeckeModel) -> RelationReport:
    """Exact matrix identities: braid, order (Hecke), z words, centrality, inverses.

    Every matrix is first checked to commute with left multiplication by
    ``g0``.  Given that, two products agree iff they agree on the rows
    ``z^k x_i`` (parabolic exponent 0), since the other rows are ``g0^e``
    times those; the remaining identities are checked on those rows only.
    """
    s, ring = model.spec, model.ring
    checked: list[str] = []
    lead = [model.index(k, 0, i) for k in range(model.m) for i in range(model.nx)]
    one = ring.one()

    def fail(name: str) -> RelationReport:
        return RelationReport(False, checked, name)

    def image(idx: int, word: Word) -> dict[int, LaurentPoly]:
        return model.express(word, {idx: one})

    def same(lhs: Word, rhs_terms: list[tuple[LaurentPoly, Word]]) -> bool:
        for idx in lead:
            left = image(idx, lhs)
            right: dict[int, LaurentPoly] = {}
            for c, w in rhs_terms:
                for j, v in image(idx, w).items():
                    term = c * v
                    right[j] = right[j] + term if j in right else term
            right = {j: v for j, v in right.items() if v.terms}
            if left != right:
                return False
        return True

    Lam = parabolic_matrix(model)
    for L in sorted(model.mats):
        M = model.mats[L]
        name = f"{L} commutes with left multiplication by {s.parabolic}"
        if Lam @ M != M @ Lam:
            return fail(name)
        checked.append(name)
    for g in s.generators:
        for a_, b_ in ((g, g.upper()), (g.upper(), g)):
            name = f"{a_}{b_} = 1"
            if not same((a_, b_), [(one, ())]):
                return fail(name)
            checked.append(name)
        a = s.order_relation(g, ring)
        name = f"order relation of {g}"
        if not same((g,) * len(a), [(a[k], (g,) * k) for k in range(len(a)) if a[k].terms]):
            return fail(name)
        checked.append(name)
    for rel in s.braid_relations:
        for w in rel[1:]:
            name = f"{rel[0]} = {w}"
            if not same(parse_word(rel[0]), [(one, parse_word(w))]):
                return fail(name)
            checked.append(name)
    for w in s.center_words:
        name = f"z = {w}"
        if not same(("z",), [(one, parse_word(w))]):
            return fail(name)
        checked.append(name)
    for r, w in s.redundant.items():
        name = f"{r} = {w}"
        if not same((r,), [(one, parse_word(w))]):
            return fail(name)
        checked.append(name)
        for a_, b_ in ((r, r.upper()), (r.upper(), r)):
            name = f"{a_}{b_} = 1"
            if not same((a_, b_), [(one, ())]):
                return fail(name)
            checked.append(name)
    for a_, b_ in (("z", "Z"), ("Z", "z")):
        name = f"{a_}{b_} = 1"
        if not same((a_, b_), [(one, ())]):
            return fail(name)
        checked.append(name)
    for g in s.generators:
        name = f"z{g} = {g}z"
        if not same(("z", g), [(one, (g, "z"))]):
            return fail(name)
        checked.append(name)
    return RelationReport(True, checked)


def check_basis_identity(model: HeckeModel) -> bool:
    """``express(b)`` is the standard basis vector of ``b`` for every basis word."""
    one = model.ring.one()
    for idx in range(model.dim):
        if model.express(model.basis_word(idx)) != {idx: one}:
            return False
    return True


# ---------------------------------------------------------------- cache
CACHE_FORMAT = "rank2hecke-action-matrices"
CACHE_VERSION = 1


def cache_path(cache_dir: str | Path, s: GroupSpec) -> Path:
    return Path(cache_dir) / f"{s.id}-{s.content_hash()}.json"


def serialize_model(model: HeckeModel) -> str:
    """Canonical JSON text of the action matrices (the cache file body)."""
    entries = []
    for L in sorted(model.mats):
        for i, row in enumerate(model.mats[L].rows):
            for j in sorted(row):
                entries.append([L, i, j, str(row[j])])
    data = {
        "format": CACHE_FORMAT,
        "version": CACHE_VERSION,
        "group": model.spec.id,
        "spec_hash": model.spec.content_hash(),
        "variables": list(model.ring.names),
        "dim": model.dim,
        "m": model.m,
        "E": model.E,
        "nx": model.nx,
        "entries": entries,
    }
    return json.dumps(data, separators=(",", ":"))


def model_digest(model: HeckeModel) -> str:
    return hashlib.sha256(serialize_model(model).encode()).hexdigest()[:16]


def save_model(model: HeckeModel, path: str | Path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    tmp = path.with_suffix(".tmp")
    tmp.write_text(serialize_model(model))
    tmp.replace(path)
    return path


def load_model(path: str | Path, s: GroupSpec) -> HeckeModel | None:
    """Load cached matrices; None if missing or built from a different record."""
    path = Path(path)
    if not path.exists():
        return None
    try:
        data = json.loads(path.read_text())
    except (OSError, json.JSONDecodeError):
        return None
    if data.get("format") != CACHE_FORMAT or data.get("version") != CACHE_VERSION:
        return None
    if data.get("spec_hash") != s.content_hash():
        return None
    ring = s.ring()
    dim = data["dim"]
    mats: dict[str, list[dict[int, LaurentPoly]]] = {}
    for L, i, j, text in data["entries"]:
        rows = mats.setdefault(L, [dict() for _ in range(dim)])
        rows[i][j] = ring.parse(text)
    return HeckeModel(s, ring, {L: ActionMatrix(ring, r) for L, r in mats.items()},
                      data["m"], data["E"], data["nx"])


def file_digest(path: str | Path) -> str:
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()[:16]


def build_model(spec: GroupSpec | str, cache_dir: str | Path | None = None,
                use_hints: bool = True) -> tuple[HeckeModel, dict]:
    """Seed, saturate and build matrices, reusing a fresh cache file if present."""
    s = spec if isinstance(spec, GroupSpec) else get_spec(spec)
    info: dict = {"cache": "off"}
    if cache_dir is not None:
        p = cache_path(cache_dir, s)
        model = load_model(p, s)
        if model is not None:
            info = {"cache": "hit", "path": str(p), "digest": file_digest(p)}
            return model, info
    table = seed_table(s)
    stats = saturate(table, use_hints=use_hints)
    model = build_matrices(table)
    info.update(passes=stats.passes, filled=stats.filled, seconds=round(stats.seconds, 3))
    if cache_dir is not None:
        p = save_model(model, cache_path(cache_dir, s))
        info.update(cache="miss", path=str(p), digest=file_digest(p))
    return model, info
