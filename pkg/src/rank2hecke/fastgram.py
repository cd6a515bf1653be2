"""Block recursion on FLINT multivariate polynomials.

The pure-Python recursion in ``gram`` is the reference; this backend runs
the same recursion on ``fmpz_mpoly`` values so the large groups finish at
desk scale.  FLINT polynomials have no negative exponents, so every block
carries one monomial shift: an entry ``f`` of a block with shift ``S``
stands for ``f / x^S``.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from typing import Sequence

from .gram import Block, ZMatrix, base_blocks, z_matrix
from .hecke import HeckeModel
from .laurent import LaurentPoly, VarSpec

try:
    import flint
except ImportError:  # pragma: no cover - exercised only without python-flint
    flint = None


def available() -> bool:
    return flint is not None


def _context(ring: VarSpec):
    return flint.fmpz_mpoly_ctx.get(tuple(ring.names), "lex")


def _shift_of(polys) -> tuple[int, ...]:
    nv = None
    out: list[int] = []
    for c in polys:
        if not c:
            continue
        neg = c.degree_bounds()[1]
        if nv is None:
            nv = len(neg)
            out = [0] * nv
        out = [max(a, b) for a, b in zip(out, neg)]
    return tuple(out)


@dataclass
class FlintBlock:
    entries: list[list[object]]
    shift: tuple[int, ...]

    def aligned(self, ctx, target: tuple[int, ...]) -> list[list[object]]:
        d = tuple(t - s for t, s in zip(target, self.shift))
        if not any(d):
            return self.entries
        mono = ctx.term(exp_vec=d)
        return [[e * mono for e in row] for row in self.entries]


class FlintConverter:
    def __init__(self, ring: VarSpec):
        self.ring = ring
        self.ctx = _context(ring)
        self.zero = self.ctx.from_dict({})

    def to_flint(self, c: LaurentPoly, shift: Sequence[int]):
        if not c:
            return self.zero
        return self.ctx.from_dict({tuple(e + s for e, s in zip(exps, shift)): k for exps, k in c.items()})

    def to_laurent(self, f, shift: Sequence[int]) -> LaurentPoly:
        ring = self.ring
        terms = {}
        for exps, k in f.to_dict().items():
            terms[ring.pack([e - s for e, s in zip(exps, shift)])] = int(k)
        return LaurentPoly(ring, terms)

    def block(self, b: Block) -> FlintBlock:
        shift = _shift_of(c for row in b for c in row) or (0,) * len(self.ring)
        return FlintBlock([[self.to_flint(c, shift) for c in row] for row in b], shift)


@dataclass
class FlintGram:
    conv: FlintConverter
    l: int
    m: int
    blocks: list[FlintBlock]
    seconds: dict[str, float] = field(default_factory=dict)

    def asymmetric_blocks(self) -> list[int]:
        bad = []
        for k, b in enumerate(self.blocks):
            e = b.entries
            if any(e[i][j] != e[j][i] for i in range(self.l) for j in range(i + 1, self.l)):
                bad.append(k)
        return bad

    def to_laurent(self, k: int) -> Block:
        b = self.blocks[k]
        return [[self.conv.to_laurent(f, b.shift) for f in row] for row in b.entries]

    def max_terms(self) -> int:
        return max(len(f) for b in self.blocks for row in b.entries for f in row)


def flint_recurse(conv: FlintConverter, Z: ZMatrix, known: Sequence[FlintBlock]) -> FlintBlock:
    l, m = Z.l, Z.m
    ctx = conv.ctx
    zshift = _shift_of(Z.rows[i][pq] for i in range(l) for pq in Z.rows[i]) or (0,) * len(conv.ring)
    top = tuple(max(b.shift[v] for b in known) for v in range(len(zshift)))
    aligned = [b.aligned(ctx, top) for b in known]
    out = []
    for i1 in range(l):
        acc = [conv.zero] * l
        for pq, zeta in Z.rows[i1].items():
            if not zeta:
                continue
            p, q = divmod(pq, l)
            zf = conv.to_flint(zeta, zshift)
            row = aligned[p][q]
            for i2 in range(l):
                if not row[i2].is_zero():
                    acc[i2] = acc[i2] + zf * row[i2]
        out.append(acc)
    return FlintBlock(out, tuple(a + b for a, b in zip(zshift, top)))


def flint_gram_blocks(model: HeckeModel) -> FlintGram:
    t0 = time.perf_counter()
    conv = FlintConverter(model.ring)
    base = base_blocks(model)
    blocks = [conv.block(b) for b in base]
    t1 = time.perf_counter()
    Z = z_matrix(model)
    for alpha in range(model.m - 1):
        blocks.append(flint_recurse(conv, Z, blocks[alpha:alpha + model.m]))
    t2 = time.perf_counter()
    return FlintGram(conv, model.l, model.m, blocks, {"base": t1 - t0, "recursion": t2 - t1})
