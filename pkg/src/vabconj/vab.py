"""Subgroups H of M x| G presented by cocycle representatives.

H is the union over g of (v_g + |G|Z^h, g); the closure condition
v_g + rho(g) v_h - v_{gh} in |G|Z^h makes this a subgroup extending |G|M
by G.  Elements are raw (vector, group index) pairs; membership is
enforced at the API boundary, not by construction, because the
separability search needs arbitrary vectors.
"""

from __future__ import annotations

import heapq
import itertools
from dataclasses import dataclass
from typing import Iterable, Optional, Sequence

import sympy

from . import intlinalg as la
from . import modp
from . import reps as reps_mod
from .errors import (
    BudgetExceeded,
    DimensionMismatch,
    NonMember,
    NotACocycle,
)
from .groups import FiniteGroup
from .lattices import Lattice
from .reps import IntRep, SquareHull


@dataclass(frozen=True)
class Element:
    v: tuple
    g: int

    def __iter__(self):
        return iter((self.v, self.g))


class VirtAbGroup:
    """Immutable after construction; all queries are pure."""

    def __init__(
        self,
        rep: IntRep,
        cocycle: Optional[Sequence[Sequence[int]]] = None,
        gens: Optional[Sequence[Element]] = None,
        seed: int = 0,
    ):
        reps_mod.validate(rep)
        self.rep = rep
        self.group: FiniteGroup = rep.group
        self.dim = rep.dim
        self.q = self.group.order
        if cocycle is None:
            cocycle = tuple((0,) * self.dim for _ in range(self.q))
        cocycle = tuple(la.as_vec(v) for v in cocycle)
        if len(cocycle) != self.q:
            raise NotACocycle("one cocycle vector per group element required")
        if any(cocycle[0]):
            raise NotACocycle("v_e must be zero")
        for g in range(self.q):
            for h in range(self.q):
                diff = la.vec_sub(
                    la.vec_add(cocycle[g], la.mat_vec(rep.mats[g], cocycle[h])),
                    cocycle[self.group.mul(g, h)],
                )
                if any(x % self.q for x in diff):
                    raise NotACocycle(
                        f"closure fails at ({g},{h}): {diff} not in |G|Z^h"
                    )
        self.cocycle = cocycle
        if gens is None:
            gens = self.default_generators()
        self.gens = tuple(gens)
        self._seed = seed
        self._hull: Optional[SquareHull] = None
        self._wv_cache: dict = {}
        self._mod_cache: dict = {}

    # -- construction ------------------------------------------------------

    @staticmethod
    def new_split(rep: IntRep, seed: int = 0) -> "VirtAbGroup":
        return VirtAbGroup(rep, cocycle=None, seed=seed)

    @staticmethod
    def new(rep: IntRep, cocycle, gens=None, seed: int = 0) -> "VirtAbGroup":
        return VirtAbGroup(rep, cocycle=cocycle, gens=gens, seed=seed)

    def default_generators(self) -> tuple:
        out = [Element(self.cocycle[g], g) for g in range(1, self.q)]
        for j in range(self.dim):
            e = tuple(self.q if k == j else 0 for k in range(self.dim))
            out.append(Element(e, 0))
            out.append(Element(la.vec_scale(-1, e), 0))
        return tuple(out)

    @property
    def hull(self) -> SquareHull:
        if self._hull is None:
            self._hull = reps_mod.square_hull(self.rep, seed=self._seed)
        return self._hull

    # -- elements ----------------------------------------------------------

    def identity(self) -> Element:
        return Element((0,) * self.dim, 0)

    def member(self, x: Element) -> bool:
        if len(x.v) != self.dim or not (0 <= x.g < self.q):
            return False
        return all(
            (a - b) % self.q == 0 for a, b in zip(x.v, self.cocycle[x.g])
        )

    def require_member(self, x: Element) -> None:
        if not self.member(x):
            raise NonMember(f"{x} is not an element of H")

    def mul(self, x: Element, y: Element) -> Element:
        self.require_member(x)
        self.require_member(y)
        return self._mul_raw(x, y)

    def _mul_raw(self, x: Element, y: Element) -> Element:
        return Element(
            la.vec_add(x.v, la.mat_vec(self.rep.mats[x.g], y.v)),
            self.group.mul(x.g, y.g),
        )

    def inv(self, x: Element) -> Element:
        self.require_member(x)
        return self._inv_raw(x)

    def _inv_raw(self, x: Element) -> Element:
        ginv = self.group.inv(x.g)
        return Element(
            la.vec_scale(-1, la.mat_vec(self.rep.mats[ginv], x.v)), ginv
        )

    def conj(self, a: Element, x: Element) -> Element:
        """a * x * a^-1."""
        self.require_member(a)
        self.require_member(x)
        return self._conj_raw(a, x)

    def _conj_raw(self, a: Element, x: Element) -> Element:
        g_new = self.group.conj(a.g, x.g)
        v = la.vec_sub(
            la.vec_add(a.v, la.mat_vec(self.rep.mats[a.g], x.v)),
            la.mat_vec(self.rep.mats[g_new], a.v),
        )
        return Element(v, g_new)

    # -- balls -------------------------------------------------------------

    def ball(self, radius: int, cap: int = 2_000_000) -> dict:
        """Elements of word norm <= radius, mapped to their exact norms."""
        if radius < 0:
            raise ValueError("radius must be nonnegative")
        sym = list(self.gens) + [self._inv_raw(s) for s in self.gens]
        norms = {self.identity(): 0}
        frontier = [self.identity()]
        for n in range(1, radius + 1):
            nxt = []
            for x in frontier:
                for s in sym:
                    y = self._mul_raw(x, s)
                    if y not in norms:
                        if len(norms) >= cap:
                            raise BudgetExceeded("ball size cap exceeded")
                        norms[y] = n
                        nxt.append(y)
            frontier = nxt
        return norms

    # -- conjugacy ---------------------------------------------------------

    def shift(self, g: int, h: int) -> la.Vec:
        """v_h - rho(g) v_h, the cocycle correction at the conjugator h."""
        vh = self.cocycle[h]
        return la.vec_sub(vh, la.mat_vec(self.rep.mats[g], vh))

    def w_lattice(self, g: int) -> Lattice:
        key = ("w", g)
        if key not in self._wv_cache:
            self._wv_cache[key] = reps_mod.w_lattice(self.rep, g)
        return self._wv_cache[key]

    def v_lattice(self, g: int) -> Lattice:
        key = ("v", g)
        if key not in self._wv_cache:
            self._wv_cache[key] = reps_mod.v_lattice(self.rep, g)
        return self._wv_cache[key]

    def qw_lattice(self, g: int) -> Lattice:
        key = ("qw", g)
        if key not in self._wv_cache:
            self._wv_cache[key] = self.w_lattice(g).scale(self.q)
        return self._wv_cache[key]

    def is_conjugate(
        self, x: Element, y: Element
    ) -> tuple[bool, Optional[Element]]:
        """Decide conjugacy in H; returns a verified witness conjugator."""
        self.require_member(x)
        self.require_member(y)
        if x.g == y.g:
            return self._same_g_conjugate(x, y)
        for g0 in self.group.conjugators(y.g, x.g):
            a = Element(self.cocycle[g0], g0)
            ok, w = self._same_g_conjugate(x, self._conj_raw(a, y))
            if ok:
                witness = self._mul_raw(w, a)
                assert self._conj_raw(witness, y) == x
                return True, witness
        return False, None

    def _same_g_conjugate(
        self, x: Element, y: Element
    ) -> tuple[bool, Optional[Element]]:
        g = x.g
        qw = self.qw_lattice(g)
        idm = la.mat_sub(la.identity(self.dim), self.rep.mats[g])
        for h in self.group.centralizer(g):
            delta = la.vec_sub(
                la.vec_sub(x.v, la.mat_vec(self.rep.mats[h], y.v)),
                self.shift(g, h),
            )
            if not qw.member(delta):
                continue
            w = tuple(c // self.q for c in delta)
            m = la.solve_right(idm, w)
            assert m is not None
            u = la.vec_add(self.cocycle[h], la.vec_scale(self.q, m))
            witness = Element(u, h)
            assert self._conj_raw(witness, y) == x
            return True, witness
        return False, None

    def check_quotient_lattice(self, n_lat: Lattice) -> None:
        if n_lat.ambient != self.dim:
            raise DimensionMismatch("quotient lattice ambient mismatch")
        if not Lattice.standard(self.dim, self.q).contains_lattice(n_lat):
            raise ValueError("N must lie inside |G|Z^h")
        if not n_lat.is_invariant_under(self.rep.mats):
            raise ValueError("N must be rho-invariant")

    def is_conjugate_mod(self, x: Element, y: Element, n_lat: Lattice) -> bool:
        """Conjugacy of the images in H/N for an invariant N inside |G|Z^h."""
        self.require_member(x)
        self.require_member(y)
        self.check_quotient_lattice(n_lat)
        if x.g == y.g:
            return self._same_g_conjugate_mod(x, y, n_lat)
        return any(
            self._same_g_conjugate_mod(
                x, self._conj_raw(Element(self.cocycle[g0], g0), y), n_lat
            )
            for g0 in self.group.conjugators(y.g, x.g)
        )

    def _same_g_conjugate_mod(self, x, y, n_lat: Lattice) -> bool:
        g = x.g
        key = (n_lat, g)
        if key not in self._mod_cache:
            self._mod_cache[key] = n_lat.sum(self.qw_lattice(g))
        target = self._mod_cache[key]
        return any(
            target.member(
                la.vec_sub(
                    la.vec_sub(x.v, la.mat_vec(self.rep.mats[h], y.v)),
                    self.shift(g, h),
                )
            )
            for h in self.group.centralizer(g)
        )

    # -- canonical conjugacy keys (complete invariant) ----------------------

    def conjugacy_key(self, x: Element) -> tuple:
        """Canonical form of the conjugacy class of x; equal iff conjugate."""
        self.require_member(x)
        # class representative: minimal index in the G-conjugacy class
        gstar = min(self.group.conj(s, x.g) for s in range(self.q))
        qw = self.qw_lattice(gstar)
        best = None
        for g0 in self.group.conjugators(x.g, gstar):
            y = self._conj_raw(Element(self.cocycle[g0], g0), x)
            for h in self.group.centralizer(gstar):
                w = la.vec_add(
                    la.mat_vec(self.rep.mats[h], y.v), self.shift(gstar, h)
                )
                red = qw.reduce_mod(w)
                if best is None or red < best:
                    best = red
        return (gstar, best)

    # -- minimal separating quotients ---------------------------------------

    def min_separating_index(
        self, x: Element, y: Element, budget: int
    ) -> Optional[tuple[int, Lattice]]:
        """Minimal [H:N] over invariant N <= |G|Z^h separating x from y."""
        conj, _ = self.is_conjugate(x, y)
        if conj:
            raise ValueError("inputs are conjugate in H")
        if budget < self.q:
            raise ValueError("budget below |G|")
        for idx, lat in self.iter_invariant_lattices(budget // self.q):
            n_lat = lat.scale(self.q)
            if not self.is_conjugate_mod(x, y, n_lat):
                return self.q * idx, n_lat
        return None

    def iter_invariant_lattices(self, max_index: int, cap: int = 500_000):
        """Invariant sublattices of Z^h, ascending index, each exactly once.

        The heap is keyed by a lower bound on the index, so maximal
        submodules at a prime p are only ever computed when the search
        genuinely reaches indices >= idx * p; per-(lattice, prime) results
        are cached on the group object across calls.
        """
        root = Lattice.standard(self.dim)
        counter = itertools.count()
        primes = list(sympy.primerange(2, max_index + 1)) if max_index > 1 else []
        # heap items: (bound, tiebreak, kind, payload)
        heap = [(1, next(counter), "yield", (1, root))]
        seen = {root}
        while heap:
            _, _, kind, payload = heapq.heappop(heap)
            if kind == "yield":
                idx, lat = payload
                yield idx, lat
                if primes and idx * primes[0] <= max_index:
                    heapq.heappush(
                        heap,
                        (idx * primes[0], next(counter), "expand", (idx, lat, 0)),
                    )
                continue
            idx, lat, pk = payload
            p = primes[pk]
            for s, child in self._maximal_children(lat, p):
                cidx = idx * p**s
                if cidx > max_index or child in seen:
                    continue
                if len(seen) >= cap:
                    raise BudgetExceeded("invariant lattice cap exceeded")
                seen.add(child)
                heapq.heappush(heap, (cidx, next(counter), "yield", (cidx, child)))
            if pk + 1 < len(primes) and idx * primes[pk + 1] <= max_index:
                heapq.heappush(
                    heap,
                    (idx * primes[pk + 1], next(counter), "expand", (idx, lat, pk + 1)),
                )

    def _lattice_action(self, lat: Lattice):
        key = ("latact", lat)
        if key not in self._wv_cache:
            action = []
            for g in range(self.q):
                rows = []
                for b in lat.basis:
                    sol = la.solve_left(
                        lat.basis, la.mat_vec(self.rep.mats[g], b)
                    )
                    assert sol is not None
                    rows.append(sol)
                action.append(la.transpose(la.as_mat(rows)))
            self._wv_cache[key] = tuple(action)
        return self._wv_cache[key]

    def _maximal_children(self, lat: Lattice, p: int):
        """Maximal invariant sublattices of lat with p-power index."""
        key = ("maxchild", lat, p)
        if key in self._wv_cache:
            return self._wv_cache[key]
        d = self.dim
        action = self._lattice_action(lat)
        out = []
        for ker in modp.maximal_submodules(action, p, seed=self._seed):
            s = d - ker.shape[0]
            gens = [la.vec_scale(p, b) for b in lat.basis]
            for row in ker:
                comb = [0] * d
                for c, b in zip(row.tolist(), lat.basis):
                    if c:
                        comb = [x + c * y for x, y in zip(comb, b)]
                gens.append(tuple(comb))
            child = Lattice.from_generators(gens, d)
            out.append((s, child))
        self._wv_cache[key] = tuple(out)
        return self._wv_cache[key]


def embed_extension(rep_prime: IntRep, factor_set) -> VirtAbGroup:
    """Embed an extension of M' by G, given by a factor set, into the
    split model with H meeting M in |G|M.

    The section change c with delta(c) = |G| * factor_set is solved
    exactly over the integers; its existence is guaranteed because |G|
    annihilates the relevant cohomology, so failure signals bad input.
    """
    reps_mod.validate(rep_prime)
    G = rep_prime.group
    n = G.order
    h = rep_prime.dim
    f = {}
    for g in range(n):
        for k in range(n):
            f[(g, k)] = la.as_vec(factor_set[g][k])
            if len(f[(g, k)]) != h:
                raise NotACocycle("factor set vector of wrong length")
    for g in range(n):
        if any(f[(0, g)]) or any(f[(g, 0)]):
            raise NotACocycle("factor set must be normalized")
    for g in range(n):
        for k in range(n):
            for m in range(n):
                lhs = la.vec_add(
                    la.mat_vec(rep_prime.mats[g], f[(k, m)]),
                    f[(g, G.mul(k, m))],
                )
                rhs = la.vec_add(f[(G.mul(g, k), m)], f[(g, k)])
                if lhs != rhs:
                    raise NotACocycle(f"cocycle identity fails at ({g},{k},{m})")
    # solve c_g + rho(g) c_h - c_{gh} = |G| f(g,h) with c_e = 0
    unknowns = n - 1  # c_1 .. c_{n-1}, each an h-vector
    rows = []
    rhs_all = []
    ident = la.identity(h)
    zero = la.zero_mat(h, h)
    for g in range(n):
        for k in range(n):
            gk = G.mul(g, k)
            blocks = [zero] * unknowns
            if g != 0:
                blocks[g - 1] = la.mat_add(blocks[g - 1], ident)
            if k != 0:
                blocks[k - 1] = la.mat_add(blocks[k - 1], rep_prime.mats[g])
            if gk != 0:
                blocks[gk - 1] = la.mat_sub(blocks[gk - 1], ident)
            for r in range(h):
                rows.append(
                    tuple(x for blk in blocks for x in blk[r])
                )
            rhs_all.extend(G.order * x for x in f[(g, k)])
    sol = la.solve_right(la.as_mat(rows), la.as_vec(rhs_all))
    if sol is None:
        raise NotACocycle(
            "no integer section change found; the factor set is inconsistent"
        )
    cocycle = [(0,) * h]
    for g in range(1, n):
        cocycle.append(tuple(sol[(g - 1) * h : g * h]))
    group = VirtAbGroup(rep_prime, cocycle=tuple(cocycle))
    # the original extension embeds via (m, g) -> (|G| m + c_g, g)
    for g in range(n):
        for k in range(n):
            left = group._mul_raw(
                Element(cocycle[g], g), Element(cocycle[k], k)
            )
            target = Element(
                la.vec_add(
                    la.vec_scale(G.order, f[(g, k)]), cocycle[G.mul(g, k)]
                ),
                G.mul(g, k),
            )
            assert left == target
    return group
