"""Exact linear algebra over the integers, arbitrary precision throughout.

Matrices are tuples of row tuples of Python ints.  Maps act on column
vectors (``mat_vec(a, v)`` computes ``a @ v``); lattice bases elsewhere in
the package are stored as rows, so the normal-form routines here are row
oriented.
"""

from __future__ import annotations

from typing import Iterable, Optional, Sequence

Vec = tuple  # tuple[int, ...]
Mat = tuple  # tuple[tuple[int, ...], ...]


def as_vec(v: Iterable[int]) -> Vec:
    return tuple(int(x) for x in v)


def as_mat(rows: Iterable[Iterable[int]]) -> Mat:
    return tuple(tuple(int(x) for x in row) for row in rows)


def identity(n: int) -> Mat:
    return tuple(tuple(int(i == j) for j in range(n)) for i in range(n))


def zero_mat(rows: int, cols: int) -> Mat:
    return tuple((0,) * cols for _ in range(rows))


def transpose(a: Mat) -> Mat:
    if not a:
        return ()
    return tuple(zip(*a))


def mat_mul(a: Mat, b: Mat) -> Mat:
    bt = transpose(b)
    return tuple(tuple(sum(x * y for x, y in zip(row, col)) for col in bt) for row in a)


def mat_vec(a: Mat, v: Sequence[int]) -> Vec:
    return tuple(sum(x * y for x, y in zip(row, v)) for row in a)


def vec_mat(v: Sequence[int], a: Mat) -> Vec:
    """Row vector times matrix."""
    n = len(a[0]) if a else 0
    out = [0] * n
    for c, row in zip(v, a):
        if c:
            for j, x in enumerate(row):
                out[j] += c * x
    return tuple(out)


def mat_add(a: Mat, b: Mat) -> Mat:
    return tuple(tuple(x + y for x, y in zip(ra, rb)) for ra, rb in zip(a, b))


def mat_sub(a: Mat, b: Mat) -> Mat:
    return tuple(tuple(x - y for x, y in zip(ra, rb)) for ra, rb in zip(a, b))


def mat_scale(k: int, a: Mat) -> Mat:
    return tuple(tuple(k * x for x in row) for row in a)


def vec_add(u: Sequence[int], v: Sequence[int]) -> Vec:
    return tuple(x + y for x, y in zip(u, v))


def vec_sub(u: Sequence[int], v: Sequence[int]) -> Vec:
    return tuple(x - y for x, y in zip(u, v))


def vec_scale(k: int, v: Sequence[int]) -> Vec:
    return tuple(k * x for x in v)


def is_zero_vec(v: Sequence[int]) -> bool:
    return all(x == 0 for x in v)


def xgcd(a: int, b: int) -> tuple[int, int, int]:
    """Return (g, x, y) with g = gcd(a, b) >= 0 and a*x + b*y = g."""
    old_r, r = a, b
    old_s, s = 1, 0
    old_t, t = 0, 1
    while r:
        q = old_r // r
        old_r, r = r, old_r - q * r
        old_s, s = s, old_s - q * s
        old_t, t = t, old_t - q * t
    if old_r < 0:
        old_r, old_s, old_t = -old_r, -old_s, -old_t
    return old_r, old_s, old_t


def hnf_with_transform(a: Mat) -> tuple[Mat, Mat]:
    """Row Hermite normal form H of ``a`` with unimodular U, U*a = H.

    H is in echelon form: pivots positive, strictly increasing pivot
    columns, entries above each pivot reduced into [0, pivot), zero rows at
    the bottom.  This is the canonical form used for all lattice equality.
    """
    m = [list(row) for row in a]
    nr = len(m)
    nc = len(m[0]) if nr else 0
    u = [[int(i == j) for j in range(nr)] for i in range(nr)]
    r = 0
    for c in range(nc):
        piv = next((i for i in range(r, nr) if m[i][c]), None)
        if piv is None:
            continue
        if piv != r:
            m[r], m[piv] = m[piv], m[r]
            u[r], u[piv] = u[piv], u[r]
        for i in range(r + 1, nr):
            if not m[i][c]:
                continue
            g, x, y = xgcd(m[r][c], m[i][c])
            ar, ai = m[r][c] // g, m[i][c] // g
            m[r], m[i] = (
                [x * p + y * q for p, q in zip(m[r], m[i])],
                [-ai * p + ar * q for p, q in zip(m[r], m[i])],
            )
            u[r], u[i] = (
                [x * p + y * q for p, q in zip(u[r], u[i])],
                [-ai * p + ar * q for p, q in zip(u[r], u[i])],
            )
        if m[r][c] < 0:
            m[r] = [-x for x in m[r]]
            u[r] = [-x for x in u[r]]
        for i in range(r):
            q = m[i][c] // m[r][c]
            if q:
                m[i] = [p - q * s for p, s in zip(m[i], m[r])]
                u[i] = [p - q * s for p, s in zip(u[i], u[r])]
        r += 1
        if r == nr:
            break
    return as_mat(m), as_mat(u)


def hnf(a: Mat) -> Mat:
    """Canonical row HNF with zero rows dropped."""
    h, _ = hnf_with_transform(a)
    return tuple(row for row in h if any(row))


def row_kernel(a: Mat) -> Mat:
    """Canonical basis of {x : x*a = 0}."""
    h, u = hnf_with_transform(a)
    ker = tuple(u[i] for i in range(len(h)) if not any(h[i]))
    return hnf(ker)


def right_kernel(a: Mat) -> Mat:
    """Canonical basis (as rows) of {x : a*x = 0}."""
    return row_kernel(transpose(a))


def solve_left(a: Mat, b: Sequence[int]) -> Optional[Vec]:
    """Some integer row x with x*a = b, or None."""
    if not a:
        return None if any(b) else ()
    h, u = hnf_with_transform(a)
    nc = len(h[0])
    rem = list(b)
    y = [0] * len(h)
    for i, row in enumerate(h):
        c = next((j for j in range(nc) if row[j]), None)
        if c is None:
            break
        if rem[c] % row[c]:
            return None
        q = rem[c] // row[c]
        if q:
            rem = [p - q * s for p, s in zip(rem, row)]
        y[i] = q
    if any(rem):
        return None
    return vec_mat(y, u)


def solve_right(a: Mat, b: Sequence[int]) -> Optional[Vec]:
    """Some integer column x with a*x = b, or None."""
    if not a or not a[0]:
        return None if any(b) else (0,) * (len(a[0]) if a else 0)
    return solve_left(transpose(a), b)


def det_abs(a: Mat) -> int:
    """|det a| for square a, via fraction-free elimination."""
    n = len(a)
    if n == 0:
        return 1
    m = [list(row) for row in a]
    # Bareiss algorithm
    sign = 1
    prev = 1
    for k in range(n - 1):
        if m[k][k] == 0:
            piv = next((i for i in range(k + 1, n) if m[i][k]), None)
            if piv is None:
                return 0
            m[k], m[piv] = m[piv], m[k]
            sign = -sign
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                m[i][j] = (m[i][j] * m[k][k] - m[i][k] * m[k][j]) // prev
            m[i][k] = 0
        prev = m[k][k]
    return abs(m[n - 1][n - 1])


def snf_invariant_factors(a: Mat) -> tuple[int, ...]:
    """Nonzero invariant factors d1 | d2 | ... of the integer matrix a."""
    m = [list(row) for row in a]
    nr = len(m)
    nc = len(m[0]) if nr else 0
    t = 0
    factors = []
    while True:
        piv = None
        best = None
        for i in range(t, nr):
            for j in range(t, nc):
                if m[i][j] and (best is None or abs(m[i][j]) < best):
                    best = abs(m[i][j])
                    piv = (i, j)
        if piv is None:
            break
        i0, j0 = piv
        m[t], m[i0] = m[i0], m[t]
        for row in m:
            row[t], row[j0] = row[j0], row[t]
        while True:
            # clear column t
            for i in range(t + 1, nr):
                if m[i][t]:
                    g, x, y = xgcd(m[t][t], m[i][t])
                    at, ai = m[t][t] // g, m[i][t] // g
                    m[t], m[i] = (
                        [x * p + y * q for p, q in zip(m[t], m[i])],
                        [-ai * p + at * q for p, q in zip(m[t], m[i])],
                    )
            # clear row t
            changed = False
            for j in range(t + 1, nc):
                if m[t][j]:
                    g, x, y = xgcd(m[t][t], m[t][j])
                    at, aj = m[t][t] // g, m[t][j] // g
                    for row in m:
                        row[t], row[j] = (
                            x * row[t] + y * row[j],
                            -aj * row[t] + at * row[j],
                        )
                    changed = True
            if not changed and all(m[i][t] == 0 for i in range(t + 1, nr)):
                break
        # enforce divisibility: m[t][t] must divide everything below-right
        d = abs(m[t][t])
        bad = None
        for i in range(t + 1, nr):
            for j in range(t + 1, nc):
                if m[i][j] % d:
                    bad = i
                    break
            if bad is not None:
                break
        if bad is not None:
            m[t] = [p + q for p, q in zip(m[t], m[bad])]
            continue
        factors.append(d)
        t += 1
        if t >= min(nr, nc):
            break
    return tuple(factors)


def lattice_content(a: Mat) -> int:
    """gcd of all entries (0 for an empty/zero matrix)."""
    from math import gcd

    g = 0
    for row in a:
        for x in row:
            g = gcd(g, x)
    return g
