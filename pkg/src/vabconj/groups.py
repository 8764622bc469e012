"""Finite group arithmetic on dense Cayley tables.

Elements are indices 0..order-1 with the identity normalized to 0.  The
group law is validated on construction, so downstream code can trust the
table blindly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence

from . import intlinalg as la
from .errors import BudgetExceeded, GroupLawError, NonUnimodular

Mat = la.Mat


@dataclass(frozen=True)
class FiniteGroup:
    cayley: tuple  # cayley[g][h] = g*h
    inverse: tuple

    @property
    def order(self) -> int:
        return len(self.cayley)

    @property
    def identity(self) -> int:
        return 0

    def mul(self, g: int, h: int) -> int:
        return self.cayley[g][h]

    def inv(self, g: int) -> int:
        return self.inverse[g]

    def conj(self, g: int, h: int) -> int:
        """g*h*g^-1."""
        return self.mul(self.mul(g, h), self.inverse[g])

    def power(self, g: int, k: int) -> int:
        if k < 0:
            g, k = self.inverse[g], -k
        out = 0
        for _ in range(k):
            out = self.mul(out, g)
        return out

    def element_order(self, g: int) -> int:
        x, n = g, 1
        while x != 0:
            x = self.mul(x, g)
            n += 1
        return n

    def exponent(self) -> int:
        return math.lcm(*(self.element_order(g) for g in range(self.order)))

    def centralizer(self, g: int) -> tuple:
        return tuple(
            h for h in range(self.order) if self.mul(h, g) == self.mul(g, h)
        )

    def center(self) -> tuple:
        return tuple(
            g
            for g in range(self.order)
            if all(self.mul(g, h) == self.mul(h, g) for h in range(self.order))
        )

    def conjugacy_classes(self) -> tuple:
        seen = set()
        classes = []
        for g in range(self.order):
            if g in seen:
                continue
            cls = sorted({self.conj(h, g) for h in range(self.order)})
            seen.update(cls)
            classes.append(tuple(cls))
        return tuple(classes)

    def conjugators(self, src: int, dst: int) -> tuple:
        """All g0 with g0*src*g0^-1 == dst."""
        return tuple(
            g0 for g0 in range(self.order) if self.conj(g0, src) == dst
        )

    def is_abelian(self) -> bool:
        return len(self.center()) == self.order


def from_cayley(table: Iterable[Sequence[int]]) -> FiniteGroup:
    """Validated group from a Cayley table; identity relabeled to index 0."""
    t = [list(row) for row in table]
    n = len(t)
    if any(len(row) != n for row in t):
        raise GroupLawError("cayley table must be square")
    for row in t:
        for x in row:
            if not (0 <= x < n):
                raise GroupLawError("cayley entries must be element indices")
    ident = next(
        (
            e
            for e in range(n)
            if all(t[e][x] == x and t[x][e] == x for x in range(n))
        ),
        None,
    )
    if ident is None:
        raise GroupLawError("no identity element")
    if ident != 0:
        perm = list(range(n))
        perm[0], perm[ident] = perm[ident], perm[0]
        inv_perm = {old: new for new, old in enumerate(perm)}
        t = [
            [inv_perm[t[perm[i]][perm[j]]] for j in range(n)]
            for i in range(n)
        ]
    inverse = [None] * n
    for g in range(n):
        for h in range(n):
            if t[g][h] == 0 and t[h][g] == 0:
                inverse[g] = h
                break
        if inverse[g] is None:
            raise GroupLawError(f"element {g} has no two-sided inverse")
    for a in range(n):
        for b in range(n):
            tab = t[a][b]
            for c in range(n):
                if t[tab][c] != t[a][t[b][c]]:
                    raise GroupLawError(
                        f"associativity fails at ({a},{b},{c})"
                    )
    return FiniteGroup(
        tuple(tuple(row) for row in t), tuple(inverse)
    )


def from_matrix_generators(
    gens: Iterable[Mat], cap: int = 4096
) -> tuple[FiniteGroup, tuple]:
    """Close a set of unimodular integer matrices into a finite matrix group.

    Returns the abstract group together with the matrix recorded for each
    element index.
    """
    gens = [la.as_mat(g) for g in gens]
    if not gens:
        raise GroupLawError("need at least one generator")
    dim = len(gens[0])
    for g in gens:
        if len(g) != dim or any(len(row) != dim for row in g):
            raise GroupLawError("generators must be square of equal size")
        if la.det_abs(g) != 1:
            raise NonUnimodular("generator determinant is not +-1")
    ident = la.identity(dim)
    elems = [ident]
    lookup = {ident: 0}
    frontier = [ident]
    while frontier:
        nxt = []
        for m in frontier:
            for g in gens:
                prod = la.mat_mul(m, g)
                if prod not in lookup:
                    if len(elems) >= cap:
                        raise BudgetExceeded(
                            "matrix group closure cap exceeded (infinite order?)"
                        )
                    lookup[prod] = len(elems)
                    elems.append(prod)
                    nxt.append(prod)
        frontier = nxt
    n = len(elems)
    table = [
        [lookup[la.mat_mul(elems[i], elems[j])] for j in range(n)]
        for i in range(n)
    ]
    group = from_cayley(table)
    # from_cayley keeps indexing except possibly swapping in the identity,
    # which is already at 0 here.
    return group, tuple(elems)
