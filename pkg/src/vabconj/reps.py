"""Integral representations of finite groups and their square hulls.

The square hull is the direct sum of the projections of Z^h onto the
rationally-isotypic summands of the representation.  It is computed by
splitting the reduction mod a suitable prime (p = 1 mod exponent, large
enough for exact symmetric character lifts), grouping the mod-p
constituent characters into Galois orbits under power maps, and realizing
the orbit-sum projectors as exact rational matrices.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import gcd
from typing import Optional, Sequence

from . import intlinalg as la
from . import modp
from .errors import NonUnimodular, NotAHomomorphism, SplitFailure
from .groups import FiniteGroup
from .lattices import Lattice, RatLattice

Mat = la.Mat


@dataclass(frozen=True)
class IntRep:
    group: FiniteGroup
    dim: int
    mats: tuple  # per element, dim x dim integer matrices


@dataclass(frozen=True)
class CharacterMap:
    """An integer-valued class function with its realized averaging map.

    ``matrix`` is sum_g values(g^-1) * rho(g); ``scalar`` is the constant
    by which the map acts on its own isotypic part (None when the map is
    not scalar on its image)."""

    values: tuple
    matrix: Mat
    scalar: Optional[int]


@dataclass(frozen=True)
class IsotypicComponent:
    index: int
    lattice: RatLattice
    projector_num: Mat
    projector_den: int
    comp_rep: IntRep
    d: int
    orbit_char: CharacterMap
    orbit_size: int
    mult: int
    coord_map: Mat  # integer matrix: coords of den*pi(v) in the num basis

    @property
    def rank(self) -> int:
        return self.lattice.rank

    def project_coords(self, v: Sequence[int]) -> la.Vec:
        """Coordinates of pi(v) in the component basis (exact integers)."""
        return la.mat_vec(self.coord_map, v)


@dataclass(frozen=True)
class SquareHull:
    rep: IntRep
    prime: int
    components: tuple

    def __len__(self) -> int:
        return len(self.components)

    def dims(self) -> tuple:
        return tuple(c.d for c in self.components)


def validate(rep: IntRep) -> None:
    """Check the homomorphism property and unimodularity; raises on failure."""
    G = rep.group
    n = G.order
    if len(rep.mats) != n:
        raise NotAHomomorphism("one matrix per group element required")
    for m in rep.mats:
        if len(m) != rep.dim or any(len(row) != rep.dim for row in m):
            raise NotAHomomorphism("matrix dimensions do not match dim")
        if la.det_abs(m) != 1:
            raise NonUnimodular("representation matrix is not unimodular")
    if rep.mats[0] != la.identity(rep.dim):
        raise NotAHomomorphism("identity element must act as the identity")
    for g in range(n):
        for h in range(n):
            if la.mat_mul(rep.mats[g], rep.mats[h]) != rep.mats[G.mul(g, h)]:
                raise NotAHomomorphism(f"mat({g})mat({h}) != mat({g}*{h})")


def character(rep: IntRep) -> tuple:
    """Trace of the action, per element."""
    return tuple(sum(m[i][i] for i in range(rep.dim)) for m in rep.mats)


def varpi(rep: IntRep, values: Sequence[int]) -> CharacterMap:
    """The averaging map sum_g values(g^-1) rho(g) of a class function."""
    G = rep.group
    values = tuple(int(x) for x in values)
    for cls in G.conjugacy_classes():
        if len({values[g] for g in cls}) != 1:
            raise ValueError("values must be constant on conjugacy classes")
    mat = la.zero_mat(rep.dim, rep.dim)
    for g in range(G.order):
        c = values[G.inv(g)]
        if c:
            mat = la.mat_add(mat, la.mat_scale(c, rep.mats[g]))
    return CharacterMap(values, mat, _scalar_on_image(mat))


def _scalar_on_image(mat: Mat) -> Optional[int]:
    img = Lattice.from_generators(la.transpose(mat), len(mat))
    if not img.basis:
        return 0
    c = None
    for row in img.basis:
        w = la.mat_vec(mat, row)
        j = next((k for k, x in enumerate(row) if x), None)
        if row[j] == 0 or w[j] % row[j]:
            return None
        cr = w[j] // row[j]
        if w != la.vec_scale(cr, row):
            return None
        if c is None:
            c = cr
        elif c != cr:
            return None
    return c


def w_lattice(rep: IntRep, g: int) -> Lattice:
    """Image lattice of (id - rho(g))."""
    m = la.mat_sub(la.identity(rep.dim), rep.mats[g])
    return Lattice.from_generators(la.transpose(m), rep.dim)


def v_lattice(rep: IntRep, g: int) -> Lattice:
    """Radical (isolator) of the image of (id - rho(g))."""
    return w_lattice(rep, g).radical()


def fixed_lattice(rep: IntRep, g: int) -> Lattice:
    """Kernel lattice of (id - rho(g))."""
    m = la.mat_sub(la.identity(rep.dim), rep.mats[g])
    return Lattice(rep.dim, la.right_kernel(m))


def component_w_v(hull: SquareHull, i: int, g: int) -> tuple[Lattice, Lattice]:
    """(W_g, V_g) of component i, in its own coordinates."""
    comp = hull.components[i]
    m = la.mat_sub(la.identity(comp.rank), comp.comp_rep.mats[g])
    w = Lattice.from_generators(la.transpose(m), comp.rank)
    return w, w.radical()


def square_hull(
    rep: IntRep, seed: int = 0, prime: Optional[int] = None, retries: int = 8
) -> SquareHull:
    """Isotypic decomposition M_1 + ... + M_l of Z^h with exact projectors.

    Retries with the next admissible prime if the mod-p split is
    inconsistent, and raises SplitFailure after ``retries`` attempts."""
    G = rep.group
    q = G.order
    h = rep.dim
    exp = G.exponent()
    p = prime if prime is not None else modp.find_prime(
        1 if exp == 1 else 1, max(exp, 1), avoid=q, min_size=2 * h * q + 1
    )
    last_error: Optional[Exception] = None
    for _ in range(retries):
        try:
            return _square_hull_at(rep, p, seed)
        except (SplitFailure, ValueError) as err:
            last_error = err
            p = modp.find_prime(1, max(exp, 1), avoid=q, min_size=p + 1)
    raise SplitFailure(f"square hull failed for all tried primes: {last_error}")


def _square_hull_at(rep: IntRep, p: int, seed: int) -> SquareHull:
    G = rep.group
    q = G.order
    h = rep.dim
    mrep = modp.reduce_rep(rep, p)
    constituents = modp.split(mrep, G, seed)
    orbits = modp.galois_orbit_sums(constituents, G, p, max_abs=h)
    components = []
    total_rank = 0
    for idx, (values, dims) in enumerate(orbits):
        d = dims[0]
        wm = varpi(rep, values)
        proj_num = la.mat_scale(d, wm.matrix)
        g0 = gcd(q, la.lattice_content(proj_num))
        lattice = RatLattice.make(
            Lattice.from_generators(la.transpose(proj_num), h), q
        )
        rank = lattice.rank
        total_rank += rank
        den = lattice.den
        basis = lattice.num.basis
        # integer matrix of den * pi_i
        qmat = []
        for row in proj_num:
            new = []
            for x in row:
                if (den * x) % q:
                    raise SplitFailure("projector denominator mismatch")
                new.append((den * x) // q)
            qmat.append(tuple(new))
        qmat = tuple(qmat)
        coord_cols = []
        for j in range(h):
            col = tuple(qmat[r][j] for r in range(h))
            sol = la.solve_left(basis, col)
            if sol is None:
                raise SplitFailure("projector image escaped its own lattice")
            coord_cols.append(sol)
        coord_map = la.transpose(la.as_mat(coord_cols))
        comp_mats = []
        for g in range(G.order):
            rows = []
            for b in basis:
                target = la.mat_vec(rep.mats[g], b)
                sol = la.solve_left(basis, target)
                if sol is None:
                    raise SplitFailure("component lattice is not invariant")
                rows.append(sol)
            comp_mats.append(la.transpose(la.as_mat(rows)))
        comp_rep = IntRep(G, rank, tuple(comp_mats))
        validate(comp_rep)
        # the orbit-sum map acts on its component as the scalar q/d
        if q % d:
            raise SplitFailure("constituent dimension does not divide |G|")
        scalar = q // d
        for b in basis:
            if la.mat_vec(wm.matrix, b) != la.vec_scale(scalar, b):
                raise SplitFailure("orbit map is not scalar on its component")
        orbit_char = CharacterMap(values, wm.matrix, scalar)
        components.append(
            IsotypicComponent(
                index=idx,
                lattice=lattice,
                projector_num=tuple(
                    tuple(x // g0 for x in row) for row in proj_num
                ),
                projector_den=q // g0,
                comp_rep=comp_rep,
                d=d,
                orbit_char=orbit_char,
                orbit_size=len(dims),
                mult=next(
                    c.multiplicity
                    for c in constituents
                    if _char_in_orbit(c, values, G, p)
                ),
                coord_map=coord_map,
            )
        )
    if total_rank != h:
        raise SplitFailure("component ranks do not sum to the dimension")
    hull = SquareHull(rep, p, tuple(components))
    _verify_hull(hull)
    return hull


def _char_in_orbit(c: modp.Constituent, orbit_values: tuple, G: FiniteGroup, p: int) -> bool:
    """Is this constituent one of the summands of the lifted orbit sum?

    Detected by checking the orbit sum re-reduced mod p dominates: we only
    need a constituent from the right orbit to read off the multiplicity,
    and all orbit members share it, so matching the orbit of c suffices."""
    n = G.exponent()
    total = [0] * G.order
    seen = set()
    for k in range(1, n + 1):
        if gcd(k, n) != 1:
            continue
        twisted = tuple(c.char[G.power(g, k)] for g in range(G.order))
        if twisted in seen:
            continue
        seen.add(twisted)
        for g in range(G.order):
            total[g] = (total[g] + twisted[g]) % p
    return tuple(total) == tuple(v % p for v in orbit_values)


def _verify_hull(hull: SquareHull) -> None:
    rep = hull.rep
    q = rep.group.order
    h = rep.dim
    comps = hull.components
    # projectors: orthogonal idempotents summing to the identity
    acc = la.zero_mat(h, h)
    for c in comps:
        acc = la.mat_add(
            acc, la.mat_scale(q // c.projector_den, c.projector_num)
        )
    if acc != la.mat_scale(q, la.identity(h)):
        raise SplitFailure("projectors do not sum to the identity")
    for i, ci in enumerate(comps):
        for j, cj in enumerate(comps):
            prod = la.mat_mul(ci.projector_num, cj.projector_num)
            if i == j:
                if prod != la.mat_scale(
                    ci.projector_den, ci.projector_num
                ):
                    raise SplitFailure("projector is not idempotent")
            elif prod != la.zero_mat(h, h):
                raise SplitFailure("projectors are not orthogonal")
    # sandwich |G|(M_1 + ... + M_l) <= Z^h <= M_1 + ... + M_l
    for c in comps:
        for b in c.lattice.num.basis:
            scaled = la.vec_scale(q, b)
            if any(x % c.lattice.den for x in scaled):
                raise SplitFailure("q * hull summand escapes Z^h")
    den_lcm = 1
    for c in comps:
        den_lcm = den_lcm * c.lattice.den // gcd(den_lcm, c.lattice.den)
    gens = []
    for c in comps:
        f = den_lcm // c.lattice.den
        gens.extend(la.vec_scale(f, b) for b in c.lattice.num.basis)
    hull_sum = Lattice.from_generators(gens, h)
    for j in range(h):
        e = tuple(den_lcm if k == j else 0 for k in range(h))
        if not hull_sum.member(e):
            raise SplitFailure("Z^h is not inside the square hull")


def is_irreducible(rep: IntRep, seed: int = 0) -> bool:
    """Irreducibility over Q: a single component with multiplicity one."""
    hull = square_hull(rep, seed=seed)
    return len(hull.components) == 1 and hull.components[0].mult == 1
