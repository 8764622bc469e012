"""Representations over a prime field: reduction, constituents, characters.

The splitting engine is a small MeatAxe: random elements of the image
algebra are probed for irreducible characteristic polynomials (a proof of
simplicity) or for factor kernels that spin up proper submodules.  It is
deterministic for a fixed seed.

Internally vectors are rows acting on the right by the transposed
representation matrices; the public :class:`ModPRep` keeps the usual
column convention.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from math import gcd
from typing import Iterable, Optional, Sequence

import numpy as np
import sympy

from . import intlinalg as la
from .errors import BudgetExceeded, DimensionMismatch, SplitFailure
from .groups import FiniteGroup

Mat = la.Mat


def find_prime(
    residue: int, modulus: int, avoid: int, min_size: int, cap: int = 2_000_000
) -> int:
    """Least prime p = residue (mod modulus) with p >= min_size and p not
    dividing ``avoid``."""
    if gcd(residue, modulus) != 1:
        raise ValueError("residue and modulus must be coprime")
    if avoid == 0:
        raise ValueError("avoid must be nonzero")
    p = residue % modulus
    if p == 0:
        p = modulus
    while p < max(min_size, 2):
        p += modulus
    for _ in range(cap):
        if sympy.isprime(p) and avoid % p != 0:
            return p
        p += modulus
    raise BudgetExceeded("prime search bound exceeded")


@dataclass(frozen=True)
class ModPRep:
    p: int
    dim: int
    mats: tuple  # per element, column convention, entries in [0, p)


@dataclass(frozen=True)
class Constituent:
    dim: int
    multiplicity: int
    char: tuple  # per element, values in [0, p)


def reduce_rep(rep, p: int) -> ModPRep:
    """Entrywise reduction of an integral representation mod p."""
    if rep.group.order % p == 0:
        raise ValueError(f"p={p} divides the group order")
    mats = tuple(
        tuple(tuple(x % p for x in row) for row in m) for m in rep.mats
    )
    return ModPRep(p, rep.dim, mats)


# ---------------------------------------------------------------------------
# F_p linear algebra on numpy int64 arrays


def _rref(a: np.ndarray, p: int) -> tuple[np.ndarray, list]:
    m = a.copy() % p
    rows, cols = m.shape
    pivots = []
    r = 0
    for c in range(cols):
        piv = next((i for i in range(r, rows) if m[i, c] % p), None)
        if piv is None:
            continue
        m[[r, piv]] = m[[piv, r]]
        m[r] = (m[r] * pow(int(m[r, c]), -1, p)) % p
        for i in range(rows):
            if i != r and m[i, c]:
                m[i] = (m[i] - m[i, c] * m[r]) % p
        pivots.append(c)
        r += 1
        if r == rows:
            break
    return m[: len(pivots)], pivots


def _nullspace_rows(a: np.ndarray, p: int) -> np.ndarray:
    """Basis rows of {v : v @ a == 0 (mod p)}."""
    red, pivots = _rref(a.T % p, p)
    n = a.shape[0]
    free = [j for j in range(n) if j not in pivots]
    basis = np.zeros((len(free), n), dtype=np.int64)
    for k, j in enumerate(free):
        basis[k, j] = 1
        for r, c in enumerate(pivots):
            basis[k, c] = (-red[r, j]) % p
    return basis


def _solve_rows(basis: np.ndarray, targets: np.ndarray, p: int) -> np.ndarray:
    """X with X @ basis == targets (mod p); basis rows independent."""
    k, n = basis.shape
    aug = np.concatenate([basis, np.eye(k, dtype=np.int64)], axis=1) % p
    red, pivots = _rref(aug, p)
    out = np.zeros((targets.shape[0], k), dtype=np.int64)
    for idx in range(targets.shape[0]):
        rem = targets[idx].copy() % p
        coeff = np.zeros(k, dtype=np.int64)
        for r, c in enumerate(pivots):
            if c >= n:
                break
            if rem[c]:
                q = rem[c]
                rem = (rem - q * red[r, :n]) % p
                coeff = (coeff + q * red[r, n:]) % p
        if rem.any():
            raise ValueError("solve_rows: target not in row space")
        out[idx] = coeff
    return out


def _spin_rows(seed_rows: np.ndarray, tmats: Sequence[np.ndarray], p: int) -> np.ndarray:
    """Smallest invariant subspace containing the seed rows (rref basis)."""
    basis, _ = _rref(np.atleast_2d(seed_rows) % p, p)
    while True:
        images = [basis] + [(basis @ t) % p for t in tmats]
        new, _ = _rref(np.concatenate(images, axis=0), p)
        if new.shape[0] == basis.shape[0]:
            return new
        basis = new


def _charpoly_modp(a: np.ndarray, p: int) -> list:
    """Monic characteristic polynomial mod p (coeffs highest degree first),
    by exact integer Faddeev-LeVerrier on Python ints."""
    d = a.shape[0]
    rows = [[int(x) for x in row] for row in a]
    coeffs = [1]
    m = [[0] * d for _ in range(d)]
    c = 1
    for k in range(1, d + 1):
        # m <- a(m + c*I)
        work = [row[:] for row in m]
        for i in range(d):
            work[i][i] += c
        m = [
            [
                sum(rows[i][t] * work[t][j] for t in range(d))
                for j in range(d)
            ]
            for i in range(d)
        ]
        tr = sum(m[i][i] for i in range(d))
        assert tr % k == 0
        c = -tr // k
        coeffs.append(c)
    return [x % p for x in coeffs]


# dense F_p[x] arithmetic; coefficient lists are highest degree first


def _poly_trim(f: list) -> list:
    i = 0
    while i < len(f) - 1 and f[i] == 0:
        i += 1
    return f[i:]


def _poly_monic(f: list, p: int) -> list:
    f = _poly_trim([c % p for c in f])
    lead = f[0]
    if lead == 1:
        return f
    inv = pow(lead, -1, p)
    return [(c * inv) % p for c in f]


def _poly_divmod(f: list, g: list, p: int) -> tuple[list, list]:
    f = _poly_trim([c % p for c in f])
    g = _poly_trim([c % p for c in g])
    if g == [0]:
        raise ZeroDivisionError
    q = [0] * max(1, len(f) - len(g) + 1)
    rem = f[:]
    inv = pow(g[0], -1, p)
    for i in range(len(f) - len(g) + 1):
        coef = (rem[i] * inv) % p
        q[i] = coef
        if coef:
            for j, gc in enumerate(g):
                rem[i + j] = (rem[i + j] - coef * gc) % p
    return _poly_trim(q), _poly_trim(rem)


def _poly_mul(f: list, g: list, p: int) -> list:
    out = [0] * (len(f) + len(g) - 1)
    for i, a in enumerate(f):
        if a:
            for j, b in enumerate(g):
                out[i + j] = (out[i + j] + a * b) % p
    return _poly_trim(out)


def _poly_gcd(f: list, g: list, p: int) -> list:
    f = _poly_trim([c % p for c in f])
    g = _poly_trim([c % p for c in g])
    while g != [0]:
        _, r = _poly_divmod(f, g, p)
        f, g = g, r
    return _poly_monic(f, p) if f != [0] else [0]


def _poly_powmod(base: list, e: int, mod: list, p: int) -> list:
    result = [1]
    base = _poly_divmod(base, mod, p)[1]
    while e:
        if e & 1:
            result = _poly_divmod(_poly_mul(result, base, p), mod, p)[1]
        base = _poly_divmod(_poly_mul(base, base, p), mod, p)[1]
        e >>= 1
    return result


def _poly_deriv(f: list, p: int) -> list:
    d = len(f) - 1
    out = [(c * (d - i)) % p for i, c in enumerate(f[:-1])]
    return _poly_trim(out) if out else [0]


def _poly_sub(f: list, g: list, p: int) -> list:
    n = max(len(f), len(g))
    fp = [0] * (n - len(f)) + list(f)
    gp = [0] * (n - len(g)) + list(g)
    return _poly_trim([(a - b) % p for a, b in zip(fp, gp)])


def _poly_irreducible(f: list, p: int) -> bool:
    """Rabin test: x^(p^d) = x mod f and gcd(x^(p^(d/q)) - x, f) = 1."""
    f = _poly_monic(f, p)
    d = len(f) - 1
    if d <= 0:
        return False
    if d == 1:
        return True
    x = [1, 0]
    for r in sorted({d // qq for qq in sympy.primefactors(d)}):
        h = _poly_sub(_poly_powmod(x, p**r, f, p), x, p)
        if _poly_gcd(h, f, p) != [1]:
            return False
    return _poly_powmod(x, p**d, f, p) == x


def _poly_proper_divisor(
    f: list, p: int, rng: random.Random
) -> Optional[list]:
    """Some monic divisor of f with 0 < deg < deg f, or None if f is
    irreducible.  Uses squarefree/distinct-degree splits and a
    Cantor-Zassenhaus round for equal-degree blocks."""
    f = _poly_monic(f, p)
    d = len(f) - 1
    if d <= 1:
        return None
    fp = _poly_deriv(f, p)
    if fp == [0]:
        # f = g(x^p); x^p - x has every element as root, so f is a p-th
        # power; its p-th "root" divides it properly
        g = [f[i] for i in range(0, len(f), p)]
        return _poly_monic(g, p)
    sq = _poly_gcd(f, fp, p)
    if sq != [1]:
        return _poly_divmod(f, sq, p)[0]
    # squarefree: distinct-degree
    x = [1, 0]
    h = x
    for deg in range(1, d // 2 + 1):
        h = _poly_powmod(h, p, f, p)
        g = _poly_gcd(_poly_sub(h, x, p), f, p)
        if g != [1]:
            if len(g) - 1 < d:
                return g
            # all factors have this same degree; equal-degree split
            return _equal_degree_split(f, deg, p, rng)
    return None


def _equal_degree_split(f: list, deg: int, p: int, rng: random.Random) -> list:
    d = len(f) - 1
    assert d % deg == 0 and d > deg
    for _ in range(64):
        r = [rng.randrange(p) for _ in range(d)]
        r[0] = max(r[0], 1)
        if p == 2:
            acc = r
            t = r
            for _ in range(deg - 1):
                t = _poly_powmod(t, 2, f, p)
                acc = _poly_sub(acc, [p - c for c in t], p)
            g = _poly_gcd(acc, f, p)
        else:
            e = (p**deg - 1) // 2
            t = _poly_powmod(r, e, f, p)
            g = _poly_gcd(_poly_sub(t, [1], p), f, p)
        if g != [1] and len(g) - 1 < d:
            return g
    raise SplitFailure("equal-degree splitting failed")


def _factor_kernels_poly(f: list, p: int, rng: random.Random) -> list:
    """A few proper divisors of f worth probing for invariant kernels."""
    out = []
    q = _poly_proper_divisor(f, p, rng)
    if q is not None:
        out.append(q)
        rest = _poly_divmod(f, q, p)[0]
        if len(rest) > 1:
            out.append(rest)
    return out


def _poly_at_matrix(coeffs: list, a: np.ndarray, p: int) -> np.ndarray:
    d = a.shape[0]
    out = np.zeros((d, d), dtype=np.int64)
    for c in coeffs:
        out = (out @ a + c * np.eye(d, dtype=np.int64)) % p
    return out


# ---------------------------------------------------------------------------
# module decomposition


def _restrict(tmats: list, basis: np.ndarray, p: int) -> list:
    return [_solve_rows(basis, (basis @ t) % p, p) for t in tmats]


def _find_proper_submodule(
    tmats: list, p: int, rng: random.Random, tries: int = 120
) -> Optional[np.ndarray]:
    """A proper nonzero invariant row subspace, or None once simplicity is
    certified (irreducible characteristic polynomial of an algebra element,
    or exhaustion in dimension <= 2)."""
    d = tmats[0].shape[0]
    if d == 1:
        return None
    if all(np.array_equal(t, t[0, 0] * np.eye(d, dtype=np.int64) % p) for t in tmats):
        line = np.zeros((1, d), dtype=np.int64)
        line[0, 0] = 1
        return line
    for _ in range(tries):
        coeffs = [rng.randrange(p) for _ in tmats]
        a = np.zeros((d, d), dtype=np.int64)
        for c, t in zip(coeffs, tmats):
            if c:
                a = (a + c * t) % p
        cp = _charpoly_modp(a, p)
        if _poly_irreducible(cp, p):
            return None  # charpoly irreducible: the module is simple
        for fc in _factor_kernels_poly(cp, p, rng):
            ker = _nullspace_rows(_poly_at_matrix(fc, a, p), p)
            if not 0 < ker.shape[0] < d:
                continue
            candidates = [ker[i] for i in range(min(3, ker.shape[0]))]
            if ker.shape[0] > 1:
                mix = np.zeros(d, dtype=np.int64)
                for row in ker:
                    mix = (mix + rng.randrange(p) * row) % p
                candidates.append(mix)
            for v in candidates:
                if not v.any():
                    continue
                sub = _spin_rows(v, tmats, p)
                if 0 < sub.shape[0] < d:
                    return sub
    if d == 2:
        return _exhaustive_line(tmats, p)
    raise SplitFailure(f"could not split or certify a dimension-{d} module mod {p}")


def _quadratic_roots(cp: list, p: int) -> list:
    """Roots in F_p of a monic quadratic (coeffs highest first)."""
    _, b, c = [x % p for x in cp]
    disc = (b * b - 4 * c) % p
    if p == 2:
        return [r for r in (0, 1) if (r * r + b * r + c) % p == 0]
    roots = sympy.ntheory.sqrt_mod(disc, p, all_roots=True)
    if not roots:
        return []
    inv2 = pow(2, -1, p)
    return sorted({((-b + s) * inv2) % p for s in roots})


def _exhaustive_line(tmats: list, p: int) -> Optional[np.ndarray]:
    """Complete search for a 1-dimensional invariant subspace (dim 2)."""
    d = tmats[0].shape[0]
    for t in tmats:
        if np.array_equal(t % p, (t[0, 0] * np.eye(d, dtype=np.int64)) % p):
            continue
        for lam in _quadratic_roots(_charpoly_modp(t, p), p):
            eig = _nullspace_rows((t - lam * np.eye(d, dtype=np.int64)) % p, p)
            for v in eig:
                line = _spin_rows(v, tmats, p)
                if line.shape[0] == 1:
                    return line
        return None  # a non-scalar element with no stable eigenline: simple
    return None


def _maschke_complement(tmats: list, basis: np.ndarray, inv_table, p: int) -> np.ndarray:
    d = tmats[0].shape[0]
    k = basis.shape[0]
    _, pivots = _rref(basis, p)
    q0 = np.zeros((d, d), dtype=np.int64)
    for r, c in enumerate(pivots):
        q0[c] = basis[r]
    order_inv = pow(len(tmats), -1, p)
    q = np.zeros((d, d), dtype=np.int64)
    for g in range(len(tmats)):
        q = (q + tmats[inv_table[g]] @ q0 @ tmats[g]) % p
    q = (q * order_inv) % p
    return _nullspace_rows(q, p)


def _decompose_semisimple(
    tmats: list, inv_table, p: int, rng: random.Random
) -> list:
    d = tmats[0].shape[0]
    if d == 0:
        return []
    sub = _find_proper_submodule(tmats, p, rng)
    if sub is None:
        return [np.eye(d, dtype=np.int64)]
    comp = _maschke_complement(tmats, sub, inv_table, p)
    out = []
    for block in (sub, comp):
        restricted = _restrict(tmats, block, p)
        for piece in _decompose_semisimple(restricted, inv_table, p, rng):
            out.append((piece @ block) % p)
    return out


def split(mrep: ModPRep, group: FiniteGroup, seed: int = 0) -> tuple:
    """Irreducible constituents of a semisimple mod-p module.

    Requires a splitting prime (p = 1 mod exponent, p not dividing |G|); a
    constituent with endomorphisms beyond F_p signals a violated
    precondition and raises SplitFailure.
    """
    p = mrep.p
    if group.order % p == 0:
        raise ValueError("p divides the group order")
    rng = random.Random(seed)
    tmats = [np.array(m, dtype=np.int64).T % p for m in mrep.mats]
    pieces = _decompose_semisimple(tmats, group.inverse, p, rng)
    assert sum(b.shape[0] for b in pieces) == mrep.dim
    by_char: dict = {}
    for basis in pieces:
        restricted = _restrict(tmats, basis, p)
        char = tuple(int(np.trace(t) % p) for t in restricted)
        by_char.setdefault(char, []).append(basis)
    constituents = []
    for char, bases in sorted(by_char.items(), key=lambda kv: (bases_dim(kv[1]), kv[0])):
        dim = bases[0].shape[0]
        if any(b.shape[0] != dim for b in bases):
            raise SplitFailure("equal characters with unequal dimensions")
        rep0 = _restrict(tmats, bases[0], p)
        if _hom_dim(rep0, rep0, p) != 1:
            raise SplitFailure(
                f"constituent has endomorphism field larger than F_{p} "
                "(non-splitting prime)"
            )
        constituents.append(Constituent(dim, len(bases), char))
    return tuple(constituents)


def bases_dim(bases: list) -> int:
    return bases[0].shape[0]


def _hom_dim(tmats1: list, tmats2: list, p: int) -> int:
    """dim Hom_G(S1, S2) for row modules: X with T1 X = X T2."""
    d1 = tmats1[0].shape[0]
    d2 = tmats2[0].shape[0]
    rows = []
    for t1, t2 in zip(tmats1, tmats2):
        # (T1 X - X T2) == 0, X flattened row-major
        block = (
            np.kron(t1, np.eye(d2, dtype=np.int64))
            - np.kron(np.eye(d1, dtype=np.int64), t2.T)
        ) % p
        rows.append(block)
    system = np.concatenate(rows, axis=0) % p
    ns = _nullspace_rows(system.T, p)
    return ns.shape[0]


def _hom_space(tmats1: list, tmats2: list, p: int) -> list:
    d1 = tmats1[0].shape[0]
    d2 = tmats2[0].shape[0]
    rows = []
    for t1, t2 in zip(tmats1, tmats2):
        block = (
            np.kron(t1, np.eye(d2, dtype=np.int64))
            - np.kron(np.eye(d1, dtype=np.int64), t2.T)
        ) % p
        rows.append(block)
    system = np.concatenate(rows, axis=0) % p
    ns = _nullspace_rows(system.T, p)
    return [x.reshape(d1, d2) for x in ns]


def composition_factors(
    tmats: list, p: int, rng: random.Random
) -> list:
    """Simple composition factors (as row-action matrices) of any module."""
    d = tmats[0].shape[0]
    if d == 0:
        return []
    sub = _find_proper_submodule(tmats, p, rng)
    if sub is None:
        return [tmats]
    restricted = _restrict(tmats, sub, p)
    _, pivots = _rref(sub, p)
    free = [j for j in range(d) if j not in pivots]
    full = np.concatenate(
        [sub, np.eye(d, dtype=np.int64)[free]], axis=0
    ) % p
    k = sub.shape[0]
    quo_mats = []
    for t in tmats:
        coords = _solve_rows(full, (full @ t) % p, p)
        quo_mats.append(coords[k:, k:] % p)
    return composition_factors(restricted, p, rng) + composition_factors(
        quo_mats, p, rng
    )


def maximal_submodules(
    mats: Sequence[Mat], p: int, seed: int = 0, cap: int = 100_000
) -> list:
    """All maximal invariant subspaces of F_p^d, as rref row bases.

    Obtained as kernels of surjections onto the simple composition
    factors; complete for any p.
    """
    rng = random.Random(seed)
    tmats = [np.array(m, dtype=np.int64).T % p for m in mats]
    d = tmats[0].shape[0]
    factors = composition_factors(tmats, p, rng)
    reps: list = []
    for fac in factors:
        if not any(_hom_dim(fac, r, p) > 0 for r in reps):
            reps.append(fac)
    kernels = {}
    for s_mats in reps:
        homs = _hom_space(tmats, s_mats, p)
        t = len(homs)
        if t == 0:
            continue
        count = (p**t - 1) // (p - 1)
        if count > cap:
            raise BudgetExceeded("maximal submodule enumeration cap exceeded")
        for coeff in _projective_points(p, t):
            phi = np.zeros_like(homs[0])
            for c, h in zip(coeff, homs):
                if c:
                    phi = (phi + c * h) % p
            if not phi.any():
                continue
            ker = _nullspace_rows(phi, p)
            if ker.shape[0] == d:
                continue
            kernels[(ker.shape, ker.tobytes())] = ker
    return list(kernels.values())


def _projective_points(p: int, t: int):
    """Representatives of P^(t-1)(F_p): first nonzero coordinate is 1."""
    for lead in range(t):
        tail = t - lead - 1
        idx = [0] * tail
        while True:
            yield tuple([0] * lead + [1] + idx)
            i = tail - 1
            while i >= 0:
                idx[i] += 1
                if idx[i] < p:
                    break
                idx[i] = 0
                i -= 1
            if i < 0:
                break
            if tail == 0:
                break


def galois_orbit_sums(
    constituents: Sequence[Constituent],
    group: FiniteGroup,
    p: int,
    max_abs: Optional[int] = None,
) -> list:
    """Galois orbits of constituent characters with symmetrically lifted
    orbit-sum values.

    Orbits are taken under the power maps g -> g^k for k coprime to the
    exponent; ``max_abs`` bounds the legal lifted values (exactness needs
    p > 2*max_abs)."""
    n = group.exponent()
    ks = [k for k in range(1, n + 1) if gcd(k, n) == 1]
    by_char = {c.char: c for c in constituents}
    seen = set()
    orbits = []
    for c in constituents:
        if c.char in seen:
            continue
        orbit = set()
        for k in ks:
            twisted = tuple(c.char[group.power(g, k)] for g in range(group.order))
            if twisted not in by_char:
                raise SplitFailure("Galois twist left the constituent set")
            orbit.add(twisted)
        members = [by_char[ch] for ch in sorted(orbit)]
        if len({m.dim for m in members}) != 1:
            raise SplitFailure("Galois orbit mixes dimensions")
        if len({m.multiplicity for m in members}) != 1:
            raise SplitFailure("Galois orbit mixes multiplicities")
        seen.update(orbit)
        summed = []
        for g in range(group.order):
            s = sum(m.char[g] for m in members) % p
            lifted = s if s <= (p - 1) // 2 else s - p
            if max_abs is not None and abs(lifted) > max_abs:
                raise ValueError("lifted character value out of range")
            summed.append(lifted)
        orbits.append((tuple(summed), tuple(m.dim for m in members)))
    orbits.sort(key=lambda ov: ov[0])
    return orbits
