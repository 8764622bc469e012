"""Finite-rank subgroups of Z^n in canonical Hermite normal form.

Every :class:`Lattice` stores the unique row-HNF basis of the subgroup it
represents, so equal lattices compare bit-equal and are safe dictionary
keys.  All values are immutable and all operations pure.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from math import gcd
from typing import Callable, Iterable, Iterator, Optional, Sequence

from . import intlinalg as la
from .errors import BudgetExceeded, DimensionMismatch, NotASublattice, RankDeficient

Vec = la.Vec
Mat = la.Mat


@dataclass(frozen=True)
class InvariantFactors:
    """Positive integers d1 | d2 | ... | dr presenting a finite quotient."""

    factors: tuple

    def __post_init__(self):
        for a, b in zip(self.factors, self.factors[1:]):
            if b % a:
                raise ValueError(f"divisibility chain violated: {self.factors}")

    def order(self) -> int:
        return math.prod(self.factors)


@dataclass(frozen=True)
class Lattice:
    """A subgroup of Z^ambient with canonical row-HNF basis (rank rows)."""

    ambient: int
    basis: Mat

    @property
    def rank(self) -> int:
        return len(self.basis)

    @staticmethod
    def from_generators(gens: Iterable[Sequence[int]], ambient: int) -> "Lattice":
        rows = la.as_mat(gens)
        for row in rows:
            if len(row) != ambient:
                raise DimensionMismatch(
                    f"generator length {len(row)} != ambient {ambient}"
                )
        return Lattice(ambient, la.hnf(rows))

    @staticmethod
    def zero(ambient: int) -> "Lattice":
        return Lattice(ambient, ())

    @staticmethod
    def standard(ambient: int, scale: int = 1) -> "Lattice":
        return Lattice(
            ambient,
            tuple(
                tuple(scale if i == j else 0 for j in range(ambient))
                for i in range(ambient)
            ),
        )

    def _check_ambient(self, v: Sequence[int]):
        if len(v) != self.ambient:
            raise DimensionMismatch(f"vector length {len(v)} != ambient {self.ambient}")

    def member(self, v: Sequence[int]) -> bool:
        self._check_ambient(v)
        return la.is_zero_vec(self.reduce_mod(v))

    def __contains__(self, v) -> bool:
        return self.member(v)

    def reduce_mod(self, v: Sequence[int]) -> Vec:
        """Canonical representative of v modulo this lattice.

        Pivot coordinates are reduced into [0, pivot); non-pivot
        coordinates are untouched, so the zero vector is returned exactly
        for members.
        """
        self._check_ambient(v)
        rem = list(int(x) for x in v)
        for row in self.basis:
            c = next(j for j, x in enumerate(row) if x)
            q = rem[c] // row[c]
            if q:
                for j, x in enumerate(row):
                    rem[j] -= q * x
        return tuple(rem)

    def contains_lattice(self, other: "Lattice") -> bool:
        if other.ambient != self.ambient:
            raise DimensionMismatch("ambient mismatch")
        return all(self.member(row) for row in other.basis)

    def sum(self, other: "Lattice") -> "Lattice":
        if other.ambient != self.ambient:
            raise DimensionMismatch("ambient mismatch")
        return Lattice(self.ambient, la.hnf(self.basis + other.basis))

    def intersect(self, other: "Lattice") -> "Lattice":
        """Intersection, via the kernel of the stacked bases."""
        if other.ambient != self.ambient:
            raise DimensionMismatch("ambient mismatch")
        if not self.basis or not other.basis:
            return Lattice.zero(self.ambient)
        stacked = self.basis + other.basis
        ker = la.row_kernel(la.as_mat(stacked))
        rows = [la.vec_mat(k[: self.rank], self.basis) for k in ker]
        return Lattice.from_generators(rows, self.ambient)

    def transform(self, a: Mat) -> "Lattice":
        """Image lattice {a*x : x in self} for a map on column vectors."""
        if a and len(a[0]) != self.ambient:
            raise DimensionMismatch("map domain mismatch")
        out_dim = len(a)
        rows = [la.mat_vec(a, row) for row in self.basis]
        return Lattice.from_generators(rows, out_dim)

    def preimage(self, a: Mat) -> "Lattice":
        """{x : a*x in self}, for an integer map a into this ambient."""
        if len(a) != self.ambient:
            raise DimensionMismatch("map codomain mismatch")
        dom = len(a[0]) if a else 0
        # a*x = y*basis has solutions (x, y); project the solution lattice to x.
        cols = la.transpose(a)  # rows indexed by domain coordinate
        stacked = cols + tuple(tuple(-x for x in row) for row in self.basis)
        ker = la.row_kernel(stacked)
        rows = [k[:dom] for k in ker]
        return Lattice.from_generators(rows, dom)

    def radical(self) -> "Lattice":
        """Saturation (L tensor Q) intersected with Z^n; the isolator."""
        if not self.basis:
            return self
        # x lies in the rational row span iff x annihilates the right kernel.
        k = la.right_kernel(self.basis)  # rows of length ambient
        if not k:
            return Lattice.standard(self.ambient)
        sat = la.row_kernel(la.transpose(k))
        return Lattice(self.ambient, sat)

    def scale(self, k: int) -> "Lattice":
        if k == 0:
            return Lattice.zero(self.ambient)
        return Lattice.from_generators(
            [la.vec_scale(k, row) for row in self.basis], self.ambient
        )

    def index_in(self, sup: "Lattice") -> float:
        """[sup : self]; math.inf when ranks differ. Raises if not nested."""
        if not sup.contains_lattice(self):
            raise NotASublattice("index_in: not a sublattice")
        if self.rank < sup.rank:
            return math.inf
        coords = la.as_mat(
            [la.solve_left(sup.basis, row) for row in self.basis]
        )
        return la.det_abs(coords)

    def quotient_invariants(self, sub: "Lattice") -> InvariantFactors:
        """Invariant factors of self/sub (sub must be a sublattice)."""
        if not self.contains_lattice(sub):
            raise NotASublattice("quotient_invariants: not a sublattice")
        if not sub.basis:
            return InvariantFactors(())
        coords = la.as_mat([la.solve_left(self.basis, row) for row in sub.basis])
        padded = coords + la.zero_mat(max(0, self.rank - len(coords)), self.rank)
        facs = la.snf_invariant_factors(padded)
        return InvariantFactors(facs)

    def is_invariant_under(self, mats: Iterable[Mat]) -> bool:
        return all(
            self.member(la.mat_vec(m, row)) for m in mats for row in self.basis
        )

    def saturated_contains_rationally(self, other: "Lattice") -> bool:
        """True iff other lies in the rational span of self."""
        if not other.basis:
            return True
        if not self.basis:
            return False
        sat = self.radical()
        return all(sat.member(row) for row in other.basis)


def hnf_basis(generators: Iterable[Sequence[int]], ambient: int) -> Lattice:
    """Canonical HNF lattice spanned by the generators."""
    return Lattice.from_generators(generators, ambient)


def snf(m: Mat) -> InvariantFactors:
    """Invariant factors of the cokernel presentation of m."""
    return InvariantFactors(la.snf_invariant_factors(la.as_mat(m)))


def member(lat: Lattice, v: Sequence[int]) -> bool:
    return lat.member(v)


def lattice_sum(a: Lattice, b: Lattice) -> Lattice:
    return a.sum(b)


def intersect(a: Lattice, b: Lattice) -> Lattice:
    return a.intersect(b)


def preimage(a: Mat, lat: Lattice) -> Lattice:
    return lat.preimage(la.as_mat(a))


def radical(lat: Lattice) -> Lattice:
    return lat.radical()


def index(sub: Lattice, sup: Lattice) -> float:
    return sub.index_in(sup)


def solve_integer(a: Mat, b: Sequence[int]) -> Optional[Vec]:
    """Some integer x with a*x = b, or None."""
    a = la.as_mat(a)
    if a and len(b) != len(a):
        raise DimensionMismatch("rhs length mismatch")
    return la.solve_right(a, la.as_vec(b))


def coset_residues(
    lat: Lattice, offset: Sequence[int], modulus: Lattice, cap: int = 1_000_000
) -> frozenset:
    """Image of (offset + lat) in Z^n / modulus as canonical representatives."""
    if modulus.rank != modulus.ambient:
        raise RankDeficient("modulus must have full rank")
    if lat.ambient != modulus.ambient or len(offset) != lat.ambient:
        raise DimensionMismatch("ambient mismatch")
    start = modulus.reduce_mod(offset)
    seen = {start}
    frontier = [start]
    steps = [row for row in lat.basis]
    steps += [la.vec_scale(-1, row) for row in lat.basis]
    while frontier:
        nxt = []
        for r in frontier:
            for s in steps:
                cand = modulus.reduce_mod(la.vec_add(r, s))
                if cand not in seen:
                    if len(seen) >= cap:
                        raise BudgetExceeded("coset_residues cap exceeded")
                    seen.add(cand)
                    nxt.append(cand)
        frontier = nxt
    return frozenset(seen)


def _hnf_shapes(rank: int, index: int) -> Iterator[Mat]:
    """All canonical upper-triangular HNF shapes with given determinant."""

    def diagonals(r: int, n: int):
        if r == 1:
            yield (n,)
            return
        for d in sorted(_divisors(n)):
            for rest in diagonals(r - 1, n // d):
                yield (d,) + rest

    for diag in diagonals(rank, index):
        offdiag_ranges = []
        for j in range(rank):
            for i in range(j):
                offdiag_ranges.append(range(diag[j]))
        for combo in itertools.product(*offdiag_ranges):
            m = [[0] * rank for _ in range(rank)]
            pos = 0
            for j in range(rank):
                m[j][j] = diag[j]
                for i in range(j):
                    m[i][j] = combo[pos]
                    pos += 1
            yield la.as_mat(m)


def _divisors(n: int) -> list:
    out = []
    d = 1
    while d * d <= n:
        if n % d == 0:
            out.append(d)
            if d != n // d:
                out.append(n // d)
        d += 1
    return sorted(out)


def enumerate_sublattices(
    lat: Lattice,
    max_index: int,
    filt: Optional[Callable[[Lattice], bool]] = None,
    cap: int = 200_000,
) -> list:
    """All sublattices of ``lat`` of index <= max_index, deterministic order.

    Enumerated by Hermite shapes over divisor splittings of the index,
    ascending in index.  ``cap`` bounds the number of shapes visited.
    """
    if lat.rank != lat.ambient:
        raise RankDeficient("enumerate_sublattices requires a full-rank lattice")
    if max_index < 1:
        raise ValueError("max_index must be >= 1")
    out = []
    visited = 0
    for k in range(1, max_index + 1):
        for shape in _hnf_shapes(lat.rank, k):
            visited += 1
            if visited > cap:
                raise BudgetExceeded("sublattice enumeration cap exceeded")
            rows = [la.vec_mat(row, lat.basis) for row in shape]
            sub = Lattice.from_generators(rows, lat.ambient)
            if filt is None or filt(sub):
                out.append(sub)
    return out


@dataclass(frozen=True)
class RatLattice:
    """num scaled by 1/den, with den minimal."""

    num: Lattice
    den: int

    @staticmethod
    def make(num: Lattice, den: int) -> "RatLattice":
        if den <= 0:
            raise ValueError("denominator must be positive")
        g = gcd(den, la.lattice_content(num.basis))
        if g > 1:
            num = Lattice(
                num.ambient, tuple(tuple(x // g for x in row) for row in num.basis)
            )
            den //= g
        return RatLattice(num, den)

    @property
    def ambient(self) -> int:
        return self.num.ambient

    @property
    def rank(self) -> int:
        return self.num.rank

    def member_int(self, v: Sequence[int]) -> bool:
        """Membership of an integer vector."""
        return self.num.member(la.vec_scale(self.den, v))

    def member_rat(self, numerator: Sequence[int], denominator: int) -> bool:
        """Membership of numerator/denominator."""
        scaled = [self.den * x for x in numerator]
        if any(s % denominator for s in scaled):
            return False
        return self.num.member([s // denominator for s in scaled])

    def contains_int_lattice(self, other: Lattice) -> bool:
        return all(self.member_int(row) for row in other.basis)


@dataclass(frozen=True)
class AffineLattice:
    """point + lattice; the point is reduced for canonical comparison."""

    point: Vec
    lattice: Lattice

    @staticmethod
    def make(point: Sequence[int], lattice: Lattice) -> "AffineLattice":
        return AffineLattice(lattice.reduce_mod(point), lattice)

    @property
    def ambient(self) -> int:
        return self.lattice.ambient

    def contains(self, v: Sequence[int]) -> bool:
        return self.lattice.member(la.vec_sub(v, self.point))

    def intersect(self, other: "AffineLattice") -> Optional["AffineLattice"]:
        """Intersection as an affine lattice, or None when empty."""
        if other.ambient != self.ambient:
            raise DimensionMismatch("ambient mismatch")
        b1, b2 = self.lattice.basis, other.lattice.basis
        delta = la.vec_sub(other.point, self.point)
        if not b1 and not b2:
            return self if la.is_zero_vec(delta) else None
        stacked = b1 + tuple(tuple(-x for x in row) for row in b2)
        z = la.solve_left(stacked, delta)
        if z is None:
            return None
        pt = la.vec_add(self.point, la.vec_mat(z[: len(b1)], b1) if b1 else ())
        if not b1:
            pt = self.point
        return AffineLattice.make(pt, self.lattice.intersect(other.lattice))

    def shift(self, v: Sequence[int]) -> "AffineLattice":
        return AffineLattice.make(la.vec_add(self.point, v), self.lattice)
