"""Gram matrix of the basis trace through the block recursion.

The basis is ordered ``z^k y_q`` with ``y_q = g0^e x_i`` and ``q = e*nx + i``,
so the Gram matrix is an ``m x m`` block Hankel matrix whose ``(k1, k2)``
block is ``A^{k1+k2}``, an ``l x l`` matrix with entries
``tau(z^k y_{q1} y_{q2})``.  The first ``m`` blocks are read off the action
matrices; the rest follow from expanding ``z^m y_i`` in the basis (the
Z-matrix).

Determinants are exact (fraction-free elimination) for small groups and
modular (random evaluation, Schwartz-Zippel bound) otherwise.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .catalog import GroupSpec, spec as get_spec, theta_images
from .hecke import HeckeModel
from .laurent import DEFAULT_PRIME, FieldPoint, LaurentPoly, VarSpec, evaluate_mod
from .words import parse_word

Block = list[list[LaurentPoly]]


class DeterminantTooLarge(RuntimeError):
    """Exact elimination exceeded its resource cap; use the modular path."""


# ---------------------------------------------------------------- blocks
@dataclass
class ZMatrix:
    """``z^m y_i = sum_{p,q} zeta^p_{iq} z^p y_q``; ``rows[i]`` maps ``p*l + q`` to ``zeta^p_{iq}``."""

    ring: VarSpec
    l: int
    m: int
    rows: list[dict[int, LaurentPoly]]

    def entry(self, p: int, i: int, q: int) -> LaurentPoly:
        return self.rows[i].get(p * self.l + q, self.ring.zero())


def _zero_block(ring: VarSpec, l: int) -> Block:
    z = ring.zero()
    return [[z] * l for _ in range(l)]


def y_columns(model: HeckeModel) -> list[dict[int, LaurentPoly]]:
    """``M(y_q) e_1`` for every q: entry b is ``tau(b y_q)``."""
    return [model.column(model.y_word(q)) for q in range(model.l)]


def base_blocks(model: HeckeModel, columns: list[dict[int, LaurentPoly]] | None = None) -> list[Block]:
    l, m = model.l, model.m
    cols = y_columns(model) if columns is None else columns
    blocks = [_zero_block(model.ring, l) for _ in range(m)]
    for q2, col in enumerate(cols):
        for idx, c in col.items():
            k, q1 = divmod(idx, l)
            blocks[k][q1][q2] = c
    return blocks


def z_matrix(model: HeckeModel) -> ZMatrix:
    l, m = model.l, model.m
    Mz = model.matrix("z")
    rows = [dict(Mz.rows[(m - 1) * l + i]) for i in range(l)]
    return ZMatrix(model.ring, l, m, rows)


def z_matrix_reconstructs(model: HeckeModel, Z: ZMatrix) -> bool:
    """Check ``express(z^m y_i)`` against row i of Z for every i."""
    for i in range(model.l):
        vec = model.express(("z",) * model.m + model.y_word(i))
        if {k: v for k, v in vec.items() if v} != {k: v for k, v in Z.rows[i].items() if v}:
            return False
    return True


def recurse_blocks(Z: ZMatrix, known: Sequence[Block]) -> Block:
    """``A^{alpha+m}`` from ``A^alpha .. A^{alpha+m-1}``."""
    l, m = Z.l, Z.m
    if len(known) != m or any(len(b) != l for b in known):
        raise ValueError(f"need {m} blocks of size {l}")
    zero = Z.ring.zero()
    out = _zero_block(Z.ring, l)
    for i1 in range(l):
        acc: list[LaurentPoly] = [zero] * l
        for pq, zeta in Z.rows[i1].items():
            p, q = divmod(pq, l)
            row = known[p][q]
            for i2 in range(l):
                if row[i2]:
                    acc[i2] = acc[i2] + zeta * row[i2]
        out[i1] = acc
    return out


@dataclass
class GramBlocks:
    ring: VarSpec
    l: int
    m: int
    blocks: list[Block]
    seconds: dict[str, float] = field(default_factory=dict)

    @property
    def size(self) -> int:
        return self.l * self.m

    def entry(self, a: int, b: int) -> LaurentPoly:
        k1, q1 = divmod(a, self.l)
        k2, q2 = divmod(b, self.l)
        return self.blocks[k1 + k2][q1][q2]

    def assemble(self) -> Block:
        n = self.size
        return [[self.entry(a, b) for b in range(n)] for a in range(n)]


def gram_blocks(model: HeckeModel) -> GramBlocks:
    """All ``2m-1`` blocks: base blocks, then the recursion for alpha = 0 .. m-2."""
    t0 = time.perf_counter()
    blocks = base_blocks(model)
    t1 = time.perf_counter()
    Z = z_matrix(model)
    for alpha in range(model.m - 1):
        blocks.append(recurse_blocks(Z, blocks[alpha:alpha + model.m]))
    t2 = time.perf_counter()
    return GramBlocks(model.ring, model.l, model.m, blocks,
                      {"base": t1 - t0, "recursion": t2 - t1})


def naive_block(model: HeckeModel, k: int, columns: list[dict[int, LaurentPoly]] | None = None) -> Block:
    """``tau(z^k y_{q1} y_{q2})`` straight from the action matrices (no Z-matrix)."""
    l, m = model.l, model.m
    cols = y_columns(model) if columns is None else columns
    out = _zero_block(model.ring, l)
    Mz = model.matrix("z")
    zero = model.ring.zero()
    for q1 in range(l):
        vec = {min(k, m - 1) * l + q1: model.ring.one()}
        for _ in range(max(0, k - m + 1)):
            vec = Mz.vecmat(vec)
        for q2, col in enumerate(cols):
            acc = zero
            for idx, c in vec.items():
                d = col.get(idx)
                if d is not None:
                    acc = acc + c * d
            out[q1][q2] = acc
    return out


def first_asymmetry(block: Block) -> tuple[int, int] | None:
    n = len(block)
    for i in range(n):
        for j in range(i + 1, n):
            if block[i][j] != block[j][i]:
                return i, j
    return None


def assemble_and_check_symmetry(blocks: Sequence[Block]) -> bool:
    """Exact symmetry of every block, equivalent to symmetry of the Hankel-assembled matrix."""
    return all(first_asymmetry(b) is None for b in blocks)


# ---------------------------------------------------------------- exact determinant
def _clear_rows(A: Block) -> tuple[Block, LaurentPoly]:
    """Scale each row by a monomial so all entries are polynomials; return the total scale."""
    ring = A[0][0].ring
    nv = len(ring)
    total = [0] * nv
    out = []
    for row in A:
        need = [0] * nv
        for c in row:
            if c:
                for i, e in enumerate(c.degree_bounds()[1]):
                    need[i] = max(need[i], e)
        if any(need):
            mono = ring.monomial(dict(zip(ring.names, need)))
            row = [c * mono if c else c for c in row]
            total = [a + b for a, b in zip(total, need)]
        out.append(list(row))
    return out, ring.monomial(dict(zip(ring.names, total)))


def bareiss(A: Block, max_terms: int = 50_000, deadline: float | None = None) -> LaurentPoly:
    """Fraction-free determinant; pivots on the sparsest available entry."""
    n = len(A)
    if n == 0:
        raise ValueError("empty matrix")
    ring = A[0][0].ring
    M = [list(r) for r in A]
    sign = 1
    prev = ring.one()
    for k in range(n - 1):
        piv = None
        for i in range(k, n):
            c = M[i][k]
            if c and (piv is None or len(c) < len(M[piv][k])):
                piv = i
        if piv is None:
            return ring.zero()
        if piv != k:
            M[k], M[piv] = M[piv], M[k]
            sign = -sign
        pk = M[k][k]
        rowk = M[k]
        trivial = prev == 1
        for i in range(k + 1, n):
            ri = M[i]
            f = ri[k]
            for j in range(k + 1, n):
                v = ri[j] * pk if ri[j] else ri[j]
                if f and rowk[j]:
                    v = v - f * rowk[j]
                if v and not trivial:
                    v = v.exact_div(prev)
                if len(v) > max_terms:
                    raise DeterminantTooLarge(f"entry with {len(v)} terms at step {k}")
                ri[j] = v
            ri[k] = ring.zero()
            if deadline is not None and time.perf_counter() > deadline:
                raise DeterminantTooLarge(f"time budget exhausted at step {k} of {n}")
        prev = pk
    det = M[n - 1][n - 1]
    return det if sign > 0 else -det


def exact_allowed(s: GroupSpec, max_order: int = 96, max_vars: int = 4) -> bool:
    return s.order <= max_order and len(s.ring()) <= max_vars


def determinant_exact(A: Block, max_terms: int = 50_000, seconds: float | None = None) -> LaurentPoly:
    deadline = None if seconds is None else time.perf_counter() + seconds
    cleared, scale = _clear_rows(A)
    return bareiss(cleared, max_terms=max_terms, deadline=deadline).exact_div(scale)


# ---------------------------------------------------------------- modular determinant
def det_mod(M: np.ndarray, p: int) -> int:
    """Determinant of an int64 matrix over F_p (entries in [0, p), p < 2^31)."""
    A = np.array(M, dtype=np.int64) % p
    n = A.shape[0]
    det = 1
    for k in range(n):
        nz = np.nonzero(A[k:, k])[0]
        if len(nz) == 0:
            return 0
        piv = k + int(nz[0])
        if piv != k:
            A[[k, piv]] = A[[piv, k]]
            det = -det
        pk = int(A[k, k])
        det = det * pk % p
        inv = pow(pk, -1, p)
        if k + 1 < n:
            f = A[k + 1:, k] * inv % p
            A[k + 1:, k:] = (A[k + 1:, k:] - np.outer(f, A[k, k:]) % p) % p
    return det % p


def _eval_block(block: Block, vals: list[int], p: int) -> np.ndarray:
    l = len(block)
    out = np.zeros((l, l), dtype=object)
    for i, row in enumerate(block):
        for j, c in enumerate(row):
            if c:
                out[i, j] = evaluate_mod(c, vals, p)
    return out


def modular_gram(base: Sequence[Block], Z: ZMatrix, vals: list[int], p: int) -> np.ndarray:
    """Gram matrix at one point: evaluate base blocks and Z, then recurse in F_p."""
    l, m = Z.l, Z.m
    blocks = [_eval_block(b, vals, p) for b in base]
    zeta = np.zeros((l, m * l), dtype=object)
    for i, row in enumerate(Z.rows):
        for pq, c in row.items():
            zeta[i, pq] = evaluate_mod(c, vals, p)
    for alpha in range(m - 1):
        stack = np.vstack(blocks[alpha:alpha + m])
        blocks.append(zeta.dot(stack) % p)
    n = l * m
    G = np.zeros((n, n), dtype=np.int64)
    for k1 in range(m):
        for k2 in range(m):
            G[k1 * l:(k1 + 1) * l, k2 * l:(k2 + 1) * l] = blocks[k1 + k2].astype(np.int64)
    return G


@dataclass(frozen=True)
class DegreeBound:
    """Positive total degree and per-variable pole order of a Laurent polynomial."""

    pos: int
    neg: tuple[int, ...]

    @classmethod
    def of(cls, c: LaurentPoly) -> "DegreeBound | None":
        if not c:
            return None
        pos, neg = c.degree_bounds()
        return cls(pos, tuple(neg))

    def __mul__(self, other: "DegreeBound") -> "DegreeBound":
        return DegreeBound(self.pos + other.pos, tuple(a + b for a, b in zip(self.neg, other.neg)))

    def join(self, other: "DegreeBound | None") -> "DegreeBound":
        if other is None:
            return self
        return DegreeBound(max(self.pos, other.pos), tuple(max(a, b) for a, b in zip(self.neg, other.neg)))


def gram_degree_bound(base: Sequence[Block], Z: ZMatrix, expected: LaurentPoly) -> int:
    """Total degree bound D of ``(det A - expected)`` times the row-clearing monomial.

    Entry bounds are propagated through the recursion, rows are cleared of
    poles, and the determinant degree is at most the sum of row degrees.
    """
    l, m = Z.l, Z.m
    bnd: list[list[list[DegreeBound | None]]] = [
        [[DegreeBound.of(c) for c in row] for row in b] for b in base]
    zb = [{pq: DegreeBound.of(c) for pq, c in row.items() if c} for row in Z.rows]
    for alpha in range(m - 1):
        new = [[None] * l for _ in range(l)]
        for i1 in range(l):
            for pq, zd in zb[i1].items():
                p, q = divmod(pq, l)
                src = bnd[alpha + p][q]
                for i2 in range(l):
                    if src[i2] is not None:
                        t = zd * src[i2]
                        new[i1][i2] = t.join(new[i1][i2])
        bnd.append(new)
    nv = len(Z.ring)
    row_sum = 0
    shift = 0
    for k1 in range(m):
        for q1 in range(l):
            pos, neg = 0, [0] * nv
            for k2 in range(m):
                for d in bnd[k1 + k2][q1]:
                    if d is not None:
                        pos = max(pos, d.pos)
                        neg = [max(a, b) for a, b in zip(neg, d.neg)]
            row_sum += pos + sum(neg)
            shift += sum(neg)
    exp_pos = expected.degree_bounds()[0] if expected else 0
    return max(row_sum, exp_pos + shift, 1)


def required_trials(degree: int, prime: int, bits: int = 100, minimum: int = 5) -> int:
    ratio = (prime - 1) / degree
    if ratio <= 1:
        raise ValueError(f"degree bound {degree} exceeds the field size; use a larger prime")
    return max(minimum, math.ceil(bits / math.log2(ratio)))


@dataclass
class ModularResult:
    ok: bool
    trials: int
    prime: int
    seed: int
    degree_bound: int
    error_bound_log2: float
    points: list[dict[str, int]]
    failure: str | None = None


def determinant_modular(base: Sequence[Block], Z: ZMatrix, expected: LaurentPoly,
                        trials: int | None = None, seed: int = 0,
                        prime: int = DEFAULT_PRIME) -> ModularResult:
    """Compare ``det A`` with ``expected`` at random points of ``F_p^n``.

    With ``trials=None`` the count is chosen so the false-accept probability
    ``(D/(p-1))^trials`` stays below ``2^-100``.
    """
    D = gram_degree_bound(base, Z, expected)
    n_trials = required_trials(D, prime) if trials is None else trials
    if n_trials < 1:
        raise ValueError("trials must be positive")
    ring = Z.ring
    rng = np.random.default_rng(seed)
    points = []
    err = n_trials * math.log2(D / (prime - 1))
    for t in range(n_trials):
        pt = FieldPoint.random(ring, rng, prime)
        vals = pt.values_for(ring)
        points.append(dict(pt.assignment))
        got = det_mod(modular_gram(base, Z, vals, prime), prime)
        want = evaluate_mod(expected, vals, prime)
        if got != want:
            why = "singular evaluation" if got == 0 else f"det = {got}, expected {want}"
            return ModularResult(False, t + 1, prime, seed, D, err, points, f"trial {t + 1}: {why}")
    return ModularResult(True, n_trials, prime, seed, D, err, points)


# ---------------------------------------------------------------- specialization
@dataclass
class BlockFormReport:
    ok: bool
    ell: int
    classes: list[int]
    mixed_nonzero: int
    leading_matches: bool
    detail: str = ""


def specialize_model(model: HeckeModel, target: VarSpec, images: dict[str, LaurentPoly]) -> HeckeModel:
    from .hecke import ActionMatrix
    cache: dict[LaurentPoly, LaurentPoly] = {}

    def sub(c: LaurentPoly) -> LaurentPoly:
        if c not in cache:
            cache[c] = c.substitute(target, images)
        return cache[c]

    mats = {}
    for L, M in model.mats.items():
        rows = []
        for row in M.rows:
            out = {}
            for j, c in row.items():
                v = sub(c)
                if v:
                    out[j] = v
            rows.append(out)
        mats[L] = ActionMatrix(target, rows)
    return HeckeModel(model.spec, target, mats, model.m, model.E, model.nx)


def specialized_block_check(group: GroupSpec | str, maximal: HeckeModel, own: HeckeModel,
                            images: dict[str, LaurentPoly] | None = None) -> BlockFormReport:
    """Block form of the maximal Gram matrix after specializing its parameters.

    Rows and columns of the maximal basis are split into classes ``alpha``
    (``b`` lies in ``z^alpha G_j``).  After specialization the trace must
    vanish on pairs whose classes do not sum to a multiple of ``ell``, and
    the class-0 block, matched with the basis of ``G_j`` by group image,
    must equal the Gram matrix of ``G_j``.
    """
    from .structure import realize

    s = group if isinstance(group, GroupSpec) else get_spec(group)
    if s.is_maximal:
        return BlockFormReport(True, 1, [0] * maximal.dim, 0, True, "maximal group: single class")
    src, dst, default_images = theta_images(s.id)
    images = default_images if images is None else images
    spec_max = specialize_model(maximal, dst, images)

    rmax, rown = realize(maximal.spec), realize(s)
    ell = s.index
    G = rmax.ambient
    own_set = set(rown.elements)
    z = rmax.z_amb
    zinv_pows = [G.power(z, -a) for a in range(ell)]
    classes, images_max = [], []
    for b in range(maximal.dim):
        g = rmax.eval(maximal.basis_word(b))
        images_max.append(g)
        cls = [a for a in range(ell) if int(G.mult[zinv_pows[a], g]) in own_set]
        if len(cls) != 1:
            return BlockFormReport(False, ell, [], 0, False, f"basis element {b} lies in {len(cls)} classes")
        classes.append(cls[0])

    gmax = gram_blocks(spec_max)
    mixed = 0
    for a in range(maximal.dim):
        for b in range(maximal.dim):
            if (classes[a] + classes[b]) % ell and gmax.entry(a, b):
                mixed += 1

    gown = gram_blocks(own)
    pos_own = {rown.eval(own.basis_word(b)): b for b in range(own.dim)}
    lead = [a for a in range(maximal.dim) if classes[a] == 0]
    match = len(lead) == own.dim and all(images_max[a] in pos_own for a in lead)
    detail = ""
    if match:
        for a in lead:
            for b in lead:
                if gmax.entry(a, b) != gown.entry(pos_own[images_max[a]], pos_own[images_max[b]]):
                    match = False
                    detail = f"leading block differs at maximal basis pair ({a}, {b})"
                    break
            if not match:
                break
    else:
        detail = "class-0 elements do not match the basis of the subgroup"
    if mixed:
        detail = (detail + "; " if detail else "") + f"{mixed} nonzero mixed-class entries"
    return BlockFormReport(mixed == 0 and match, ell, classes, mixed, match, detail)


def specialization_commutes(group: GroupSpec | str, maximal: HeckeModel, own: HeckeModel) -> bool:
    """``T_z^ell`` of the specialized maximal algebra equals the embedded central word of the subgroup."""
    s = group if isinstance(group, GroupSpec) else get_spec(group)
    _, dst, images = theta_images(s.id)
    spec_max = specialize_model(maximal, dst, images)
    emb = s.embedding or {}
    word = []
    for x in parse_word(s.center_words[0]):
        w = parse_word(emb[x.lower()])
        word += list(w) if x.islower() else [y.swapcase() for y in reversed(w)]
    return spec_max.express(tuple(word)) == spec_max.express(("z",) * s.index)
