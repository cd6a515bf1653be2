"""Finite groups from presentations.

Coset enumeration (HLT with coincidence handling) over the trivial subgroup
gives the right regular permutation representation; everything else (center,
subgroups, factorization and spanning-tree checks) works with the resulting
multiplication table.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from typing import Mapping, Sequence

import numpy as np

from .words import Word, invert_letter


class EnumerationError(RuntimeError):
    """Coset enumeration exceeded its coset bound."""


@dataclass(frozen=True)
class Presentation:
    generators: tuple[str, ...]
    relators: tuple[Word, ...]


def todd_coxeter(pres: Presentation, max_cosets: int = 100_000) -> np.ndarray:
    """Complete coset table of the trivial subgroup.

    Returns an ``(n, 2*r)`` int array; column ``2i`` is generator ``i`` and
    column ``2i+1`` its inverse.  Coset 0 is the identity.
    """
    gens = pres.generators
    col = {}
    for i, g in enumerate(gens):
        col[g] = 2 * i
        col[invert_letter(g)] = 2 * i + 1
    ncols = 2 * len(gens)
    inv = [c ^ 1 for c in range(ncols)]
    rels = [[col[x] for x in r] for r in pres.relators]

    table: list[list[int]] = [[-1] * ncols]
    parent = [0]
    live = [True]

    def rep(k: int) -> int:
        root = k
        while parent[root] != root:
            root = parent[root]
        while parent[k] != root:
            parent[k], k = root, parent[k]
        return root

    def merge(a: int, b: int, queue: list[int]) -> None:
        ra, rb = rep(a), rep(b)
        if ra != rb:
            lo, hi = min(ra, rb), max(ra, rb)
            parent[hi] = lo
            live[hi] = False
            queue.append(hi)

    def coincidence(a: int, b: int) -> None:
        queue: list[int] = []
        merge(a, b, queue)
        i = 0
        while i < len(queue):
            g = queue[i]
            i += 1
            row = table[g]
            for x in range(ncols):
                d = row[x]
                if d < 0:
                    continue
                if table[d][inv[x]] == g:
                    table[d][inv[x]] = -1
                mu, nu = rep(g), rep(d)
                if table[mu][x] >= 0:
                    merge(nu, table[mu][x], queue)
                elif table[nu][inv[x]] >= 0:
                    merge(mu, table[nu][inv[x]], queue)
                else:
                    table[mu][x] = nu
                    table[nu][inv[x]] = mu

    def define(a: int, x: int) -> None:
        if len(table) >= max_cosets:
            raise EnumerationError(
                f"coset enumeration exceeded {max_cosets} cosets; check the presentation"
            )
        b = len(table)
        table.append([-1] * ncols)
        parent.append(b)
        live.append(True)
        table[a][x] = b
        table[b][inv[x]] = a

    def scan_and_fill(a: int, w: list[int]) -> None:
        f, b = a, a
        i, j = 0, len(w) - 1
        while True:
            while i <= j and table[f][w[i]] >= 0:
                f = table[f][w[i]]
                i += 1
            if i > j:
                if f != b:
                    coincidence(f, b)
                return
            while j >= i and table[b][inv[w[j]]] >= 0:
                b = table[b][inv[w[j]]]
                j -= 1
            if j < i:
                coincidence(f, b)
                return
            if i == j:
                table[f][w[i]] = b
                table[b][inv[w[i]]] = f
                return
            define(f, w[i])

    a = 0
    while a < len(table):
        if live[a]:
            for r in rels:
                scan_and_fill(a, r)
                if not live[a]:
                    break
            if live[a]:
                for x in range(ncols):
                    if table[a][x] < 0:
                        define(a, x)
        a += 1

    alive = [c for c in range(len(table)) if live[c]]
    index = {c: i for i, c in enumerate(alive)}
    out = np.empty((len(alive), ncols), dtype=np.int64)
    for i, c in enumerate(alive):
        out[i] = [index[rep(d)] for d in table[c]]
    return out


@dataclass
class FiniteGroup:
    """A finite group given by its multiplication table.

    Elements are ``0..order-1`` with 0 the identity.  ``mult[a, b]`` is the
    product ``a*b``.  ``generators`` maps generator names to elements.
    """

    mult: np.ndarray
    generators: dict[str, int]
    words: list[Word] = field(default_factory=list)

    def __post_init__(self):
        n = self.mult.shape[0]
        self.inv = np.empty(n, dtype=np.int64)
        ident_rows = np.nonzero(self.mult == 0)
        self.inv[ident_rows[0]] = ident_rows[1]

    @property
    def order(self) -> int:
        return int(self.mult.shape[0])

    def perm(self, g: int) -> np.ndarray:
        """Right regular action of ``g``: ``a -> a*g``."""
        return self.mult[:, g]

    def letter(self, x: str, extra: Mapping[str, int] | None = None) -> int:
        name = x.lower()
        if extra and name in extra:
            e = extra[name]
        else:
            e = self.generators[name]
        return int(self.inv[e]) if x.isupper() else e

    def eval_word(self, word: Word, extra: Mapping[str, int] | None = None) -> int:
        e = 0
        for x in word:
            e = int(self.mult[e, self.letter(x, extra)])
        return e

    def power(self, g: int, k: int) -> int:
        if k < 0:
            g, k = int(self.inv[g]), -k
        e = 0
        for _ in range(k):
            e = int(self.mult[e, g])
        return e

    def element_order(self, g: int) -> int:
        k, e = 1, g
        while e != 0:
            e = int(self.mult[e, g])
            k += 1
        return k

    def closure(self, gens: Sequence[int]) -> list[int]:
        seen = {0}
        order = [0]
        queue = deque([0])
        while queue:
            a = queue.popleft()
            for g in gens:
                b = int(self.mult[a, g])
                if b not in seen:
                    seen.add(b)
                    order.append(b)
                    queue.append(b)
        return order

    def subgroup(self, gens: Mapping[str, int]) -> tuple["FiniteGroup", np.ndarray]:
        """Subgroup generated by ``gens`` with its own regular representation.

        Returns the subgroup and the embedding (subgroup element -> element of self).
        """
        elems = np.array(self.closure(list(gens.values())), dtype=np.int64)
        index = np.full(self.order, -1, dtype=np.int64)
        index[elems] = np.arange(len(elems))
        sub_mult = index[self.mult[np.ix_(elems, elems)]]
        sub = FiniteGroup(sub_mult, {k: int(index[v]) for k, v in gens.items()})
        return sub, elems

    def relator_holds(self, word: Word) -> bool:
        return self.eval_word(word) == 0

    def is_closed(self) -> bool:
        return bool(np.all((self.mult >= 0) & (self.mult < self.order)))


def enumerate_group(pres: Presentation, coset_factor: int = 10, expected_order: int | None = None,
                    max_cosets: int | None = None) -> FiniteGroup:
    """Realize a finite presentation as a FiniteGroup via coset enumeration."""
    if max_cosets is None:
        max_cosets = coset_factor * expected_order if expected_order else 200_000
    table = todd_coxeter(pres, max_cosets=max_cosets)
    n = table.shape[0]
    gen_cols = {g: 2 * i for i, g in enumerate(pres.generators)}
    # BFS spanning tree over cosets gives every element a word and a permutation
    perms: list[np.ndarray | None] = [None] * n
    words: list[Word] = [()] * n
    perms[0] = np.arange(n, dtype=np.int64)
    letters = []
    for g in pres.generators:
        letters.append((g, table[:, gen_cols[g]]))
        letters.append((invert_letter(g), table[:, gen_cols[g] + 1]))
    queue = deque([0])
    while queue:
        a = queue.popleft()
        for name, colperm in letters:
            b = int(colperm[a])
            if perms[b] is None:
                perms[b] = colperm[perms[a]]
                words[b] = words[a] + (name,)
                queue.append(b)
    mult = np.stack(perms, axis=1)
    gens = {g: int(table[0, gen_cols[g]]) for g in pres.generators}
    return FiniteGroup(mult, gens, words)


def center(group: FiniteGroup) -> list[int]:
    """Elements commuting with every generator, in increasing order."""
    mult = group.mult
    ok = np.ones(group.order, dtype=bool)
    for g in group.generators.values():
        ok &= mult[:, g] == mult[g, :]
    return [int(x) for x in np.nonzero(ok)[0]]


def cyclic_subgroup(group: FiniteGroup, g: int) -> list[int]:
    out = [0]
    e = g
    while e != 0:
        out.append(e)
        e = int(group.mult[e, g])
    return out


def verify_factorization(group: FiniteGroup, Z: Sequence[int], P: Sequence[int], X: Sequence[int],
                         order: int | None = None) -> bool:
    """True iff the products ``y*v*x`` (y in Z, v in P, x in X) are pairwise distinct.

    ``order`` is the size of the (sub)group being factored; defaults to the
    whole group.
    """
    order = group.order if order is None else order
    if len(Z) * len(P) * len(X) != order:
        raise ValueError(
            f"|Z|*|P|*|X| = {len(Z)}*{len(P)}*{len(X)} does not equal the group order {order}"
        )
    mult = group.mult
    zp = mult[np.ix_(np.asarray(Z), np.asarray(P))].ravel()
    prods = mult[np.ix_(zp, np.asarray(X))].ravel()
    return len(np.unique(prods)) == order


@dataclass(frozen=True)
class SpanningTree:
    """Edges ``(parent, child, label)`` over vertices ``0..n-1`` rooted at 0."""

    n: int
    edges: tuple[tuple[int, int, str], ...]

    def parent_map(self) -> dict[int, tuple[int, str]]:
        return {c: (p, lab) for p, c, lab in self.edges}

    def is_tree(self) -> bool:
        if len(self.edges) != self.n - 1:
            return False
        children = [c for _, c, _ in self.edges]
        if len(set(children)) != len(children) or 0 in children:
            return False
        if any(not (0 <= v < self.n) for p, c, _ in self.edges for v in (p, c)):
            return False
        return len(self.path_words()) == self.n

    def path_words(self) -> dict[int, Word]:
        """Word of each vertex reachable from the root (edge labels along the path)."""
        kids: dict[int, list[tuple[int, str]]] = {}
        for p, c, lab in self.edges:
            kids.setdefault(p, []).append((c, lab))
        words = {0: ()}
        queue = deque([0])
        while queue:
            a = queue.popleft()
            for c, lab in kids.get(a, []):
                if c in words:
                    return {}
                words[c] = words[a] + (lab,)
                queue.append(c)
        return words


def verify_tree(group: FiniteGroup, tree: SpanningTree, X: Sequence[int],
                extra: Mapping[str, int] | None = None) -> bool:
    """True iff ``tree`` is a rooted spanning tree on X whose edges hold in ``group``.

    ``extra`` supplies elements for redundant generator letters.
    """
    if tree.n != len(X) or len(set(X)) != len(X) or X[0] != 0:
        return False
    if not tree.is_tree():
        return False
    for p, c, lab in tree.edges:
        try:
            g = group.letter(lab, extra)
        except KeyError:
            return False
        if int(group.mult[X[p], g]) != X[c]:
            return False
    return True
