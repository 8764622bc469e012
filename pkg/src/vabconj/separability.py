"""Unsolvability predicates and the conjugacy-separability exponent.

The exponent is a max over group elements g of a max over tuples
(v1, v2, k1, k2) of the minimal weighted size of a component set K that
"admits" the tuple.  The tuple space is infinite, but the admits check
only reads finitely many bits, which this module enumerates exactly:

* the k-side of a tuple enters only through the set U(k) of potential
  conjugators h where (k1, k2) both vanishes in every component and fails
  the strong test.  Candidate sets U are realized (or refuted) by exact
  affine-lattice arithmetic: the "vanish everywhere" and "strong residue"
  constraints cut an affine lattice P(U) out of the membership coset, and
  the complement constraints are decided by a covering argument over the
  finitely many residue classes that full-rank constraints induce
  (lower-rank constraints can never cover and are ignored for the
  decision).

* the v-side enters only through which components are weakly unsolvable
  at which h.  Per component the realizable vanish sets are computed as
  solution sets with pullback kernels and rank tests; a family is
  jointly realizable iff each member is realizable in its component,
  because the hull sandwich lets per-component realizers be scaled into
  M without changing any vanish pattern.

The value of a candidate U against a family is a weighted set-cover
minimum, scanned over subsets of components in ascending dimension.
"""

from __future__ import annotations

import enum
import itertools
import random
from dataclasses import dataclass, field
from typing import Optional, Sequence

from . import intlinalg as la
from .errors import BudgetExceeded, NonMember
from .lattices import AffineLattice, Lattice
from .vab import Element, VirtAbGroup


class Classification(enum.Enum):
    VANISHES = "vanishes"
    LOCALLY_UNSOLVABLE = "locally-unsolvable"
    GLOBALLY_UNSOLVABLE = "globally-unsolvable"


@dataclass(frozen=True)
class ProbeTuple:
    """A quadruple (v1, v2, k1, k2) at a fixed g; the k's must lie in H."""

    g: int
    v1: tuple
    v2: tuple
    k1: tuple
    k2: tuple


@dataclass(frozen=True)
class ExponentCertificate:
    k: int
    mode: str  # "exact" | "witness-lower" | "naive-upper"
    naive: int
    witness: Optional[ProbeTuple] = None
    per_g: tuple = ()
    diagnostics: tuple = ()


def _check_centralizer(H: VirtAbGroup, g: int, h: int) -> None:
    if h not in H.group.centralizer(g):
        raise ValueError(f"h={h} is not in the centralizer of g={g}")


def _check_tuple_membership(H: VirtAbGroup, g: int, k1, k2) -> None:
    for k in (k1, k2):
        if not H.member(Element(la.as_vec(k), g)):
            raise NonMember(f"({k}, {g}) is not an element of H")


def vanishes(H: VirtAbGroup, g: int, i: int, h: int, v1, v2) -> bool:
    """pi_i(v1 - rho(h) v2) lies in V_g(M_i)."""
    _check_centralizer(H, g, h)
    comp = H.hull.components[i]
    w = la.vec_sub(la.as_vec(v1), la.mat_vec(H.rep.mats[h], la.as_vec(v2)))
    coords = comp.project_coords(w)
    _, v_comp = _component_wv(H, i, g)
    return v_comp.member(coords)


def classify(
    H: VirtAbGroup, g: int, i: int, h: int, v1, v2, m: int
) -> Classification:
    """Three-way classification at modulus m via two lattice memberships."""
    _check_centralizer(H, g, h)
    if m < 1:
        raise ValueError("m must be >= 1")
    comp = H.hull.components[i]
    w = la.vec_sub(la.as_vec(v1), la.mat_vec(H.rep.mats[h], la.as_vec(v2)))
    coords = comp.project_coords(w)
    _, v_comp = _component_wv(H, i, g)
    if v_comp.member(coords):
        return Classification.VANISHES
    scaled = Lattice.standard(comp.rank, H.q**m)
    if scaled.sum(v_comp).member(coords):
        return Classification.GLOBALLY_UNSOLVABLE
    return Classification.LOCALLY_UNSOLVABLE


def strongly_unsolvable(H: VirtAbGroup, g: int, h: int, k1, k2) -> bool:
    """The difference escapes W_g(M) + |G|^3 M even after the v_h shift."""
    _check_centralizer(H, g, h)
    delta = la.vec_sub(
        la.vec_sub(la.as_vec(k1), la.mat_vec(H.rep.mats[h], la.as_vec(k2))),
        H.shift(g, h),
    )
    return not _strong_lattice(H, g).member(delta)


def admits_m(H: VirtAbGroup, K, g: int, v1, v2, m: int) -> bool:
    """K admits (v1, v2) at modulus m: every h is strongly unsolvable, or
    locally unsolvable somewhere, or globally unsolvable inside K."""
    K = frozenset(K)
    comps = range(len(H.hull.components))
    for h in H.group.centralizer(g):
        if strongly_unsolvable(H, g, h, v1, v2):
            continue
        cls = {i: classify(H, g, i, h, v1, v2, m) for i in comps}
        if any(cls[i] is Classification.LOCALLY_UNSOLVABLE for i in comps):
            continue
        if any(cls[i] is Classification.GLOBALLY_UNSOLVABLE for i in K):
            continue
        return False
    return True


def admits(H: VirtAbGroup, K, g: int, v1, v2, k1, k2) -> bool:
    """K admits (v1, v2, k1, k2): per h, the k-pair is strongly unsolvable
    or weakly unsolvable somewhere, or the v-pair is weakly unsolvable in K."""
    _check_tuple_membership(H, g, k1, k2)
    K = frozenset(K)
    comps = range(len(H.hull.components))
    for h in H.group.centralizer(g):
        if strongly_unsolvable(H, g, h, k1, k2):
            continue
        if any(not vanishes(H, g, i, h, k1, k2) for i in comps):
            continue
        if any(not vanishes(H, g, i, h, v1, v2) for i in K):
            continue
        return False
    return True


def min_admitting_dim(H: VirtAbGroup, g: int, v1, v2, k1, k2) -> int:
    """min{dim K : K admits}; 0 when not even the full set admits."""
    _check_tuple_membership(H, g, k1, k2)
    l = len(H.hull.components)
    dims = H.hull.dims()
    full = frozenset(range(l))
    if not admits(H, full, g, v1, v2, k1, k2):
        return 0
    best = sum(dims)
    subsets = sorted(
        (sum(dims[i] for i in K), K)
        for K in map(frozenset, _powerset(range(l)))
    )
    for dim_k, K in subsets:
        if dim_k >= best:
            break
        if admits(H, K, g, v1, v2, k1, k2):
            return dim_k
    return best


def _powerset(items):
    items = list(items)
    for r in range(len(items) + 1):
        yield from itertools.combinations(items, r)


def naive_upper_bound(H: VirtAbGroup) -> int:
    """Sum of the constituent dimensions over all components."""
    return sum(H.hull.dims())


# ---------------------------------------------------------------------------
# cached per-(H, g) geometry


def _component_wv(H: VirtAbGroup, i: int, g: int):
    key = ("cwv", i, g)
    cache = H._wv_cache
    if key not in cache:
        from .reps import component_w_v

        cache[key] = component_w_v(H.hull, i, g)
    return cache[key]


def _strong_lattice(H: VirtAbGroup, g: int) -> Lattice:
    key = ("strong", g)
    cache = H._wv_cache
    if key not in cache:
        cache[key] = H.w_lattice(g).sum(
            Lattice.standard(H.dim, H.q**3)
        )
    return cache[key]


def _pair_map(H: VirtAbGroup, h: int) -> la.Mat:
    """The 2h -> h map (a, b) -> a - rho(h) b."""
    n = H.dim
    rows = []
    for r in range(n):
        left = tuple(int(r == c) for c in range(n))
        right = tuple(-H.rep.mats[h][r][c] for c in range(n))
        rows.append(left + right)
    return la.as_mat(rows)


def _vanish_pullback(H: VirtAbGroup, g: int, i: int, h: int) -> Lattice:
    """{(a,b) in Z^2h : pi_i(a - rho(h) b) in V_g(M_i)} (saturated)."""
    key = ("pullback", g, i, h)
    cache = H._wv_cache
    if key not in cache:
        comp = H.hull.components[i]
        _, v_comp = _component_wv(H, i, g)
        tmap = la.mat_mul(comp.coord_map, _pair_map(H, h))
        cache[key] = v_comp.preimage(tmap)
    return cache[key]


def _vanish_all_pullback(H: VirtAbGroup, g: int, h: int) -> Lattice:
    """{(a,b) : a - rho(h) b in V_g(M)}; vanishing in every component."""
    key = ("pullback-all", g, h)
    cache = H._wv_cache
    if key not in cache:
        cache[key] = H.v_lattice(g).preimage(_pair_map(H, h))
    return cache[key]


def _strong_fail_affine(H: VirtAbGroup, g: int, h: int) -> AffineLattice:
    """{(k1,k2) : k1 - rho(h) k2 - shift in W_g + q^3 M} (strong test fails)."""
    key = ("strongfail", g, h)
    cache = H._wv_cache
    if key not in cache:
        lat = _strong_lattice(H, g).preimage(_pair_map(H, h))
        point = H.shift(g, h) + (0,) * H.dim
        cache[key] = AffineLattice.make(point, lat)
    return cache[key]


def solution_sets(H: VirtAbGroup, g: int, i: int) -> list:
    """Realizable vanish sets for component i with their pullback kernels.

    Returns all (Hset, kernel) where Hset is a subset of C(g) for which
    some pair (v1, v2) in M^2 vanishes exactly at Hset in component i;
    kernel is the joint pullback lattice in Z^2h.  Realizability is the
    rank test: the kernel must not lie inside any excluded pullback.
    """
    cent = H.group.centralizer(g)
    full = Lattice.standard(2 * H.dim)
    out = []

    def rec(idx: int, chosen: tuple, kernel: Lattice):
        if idx == len(cent):
            for h in cent:
                if h in chosen:
                    continue
                pb = _vanish_pullback(H, g, i, h)
                if pb.contains_lattice(kernel):
                    return
            out.append((frozenset(chosen), kernel))
            return
        h = cent[idx]
        rec(idx + 1, chosen, kernel)
        nk = kernel.intersect(_vanish_pullback(H, g, i, h))
        rec(idx + 1, chosen + (h,), nk)

    rec(0, (), full)
    out.sort(key=lambda hk: sorted(hk[0]))
    return out


# ---------------------------------------------------------------------------
# exact k3 search


@dataclass
class _Budget:
    limit: int
    spent: int = 0

    def charge(self, n: int, what: str):
        self.spent += n
        if self.spent > self.limit:
            raise BudgetExceeded(f"exponent search budget exceeded at {what}")


@dataclass
class _GOutcome:
    value: int
    witness: Optional[ProbeTuple]
    diagnostics: list = field(default_factory=list)


def k3_exponent(
    H: VirtAbGroup,
    mode: str = "exact",
    budget: int = 5_000_000,
    height_cap: int = 4,
    tuples: Optional[Sequence[ProbeTuple]] = None,
    seed: int = 0,
) -> ExponentCertificate:
    """Growth exponent certificate in one of three modes.

    exact: the true max-min value, by complete pattern enumeration;
    witness-lower: max of min_admitting_dim over the supplied tuples;
    naive-upper: the sum of all constituent dimensions.
    """
    naive = naive_upper_bound(H)
    if mode == "naive-upper":
        return ExponentCertificate(k=naive, mode=mode, naive=naive)
    if mode == "witness-lower":
        if not tuples:
            raise ValueError("witness-lower mode needs tuples")
        best = 0
        best_tuple = None
        for t in tuples:
            val = min_admitting_dim(H, t.g, t.v1, t.v2, t.k1, t.k2)
            if val > best:
                best, best_tuple = val, t
        return ExponentCertificate(
            k=best, mode=mode, naive=naive, witness=best_tuple
        )
    if mode != "exact":
        raise ValueError(f"unknown mode {mode!r}")

    tracker = _Budget(budget)
    best = 0
    best_witness = None
    per_g = []
    diagnostics: list = []
    try:
        for g in range(H.group.order):
            if best >= naive:
                per_g.append((g, None))  # cannot improve on the ceiling
                continue
            outcome = _k3_for_g(H, g, tracker, height_cap, seed)
            per_g.append((g, outcome.value))
            diagnostics.extend(outcome.diagnostics)
            if outcome.value > best:
                best = outcome.value
                best_witness = outcome.witness
    except BudgetExceeded as err:
        partial = ExponentCertificate(
            k=best,
            mode="witness-lower",
            naive=naive,
            witness=best_witness,
            per_g=tuple(per_g),
            diagnostics=tuple(diagnostics + [str(err)]),
        )
        err.partial = partial
        raise
    if not 0 <= best <= H.dim:
        raise AssertionError("exponent escaped the 0..h window")
    cert = ExponentCertificate(
        k=best,
        mode="exact",
        naive=naive,
        witness=best_witness,
        per_g=tuple(per_g),
        diagnostics=tuple(diagnostics),
    )
    if best > naive:
        raise AssertionError("exact exponent above the naive bound")
    return cert


def k3_for_g(
    H: VirtAbGroup,
    g: int,
    budget: int = 5_000_000,
    height_cap: int = 4,
    seed: int = 0,
) -> tuple:
    """Exact per-element value (value, witness, diagnostics); used by the
    parallel driver, which combines by deterministic max."""
    out = _k3_for_g(H, g, _Budget(budget), height_cap, seed)
    return out.value, out.witness, out.diagnostics


def _k3_for_g(
    H: VirtAbGroup, g: int, tracker: _Budget, height_cap: int, seed: int
) -> _GOutcome:
    cent = H.group.centralizer(g)
    l = len(H.hull.components)
    dims = H.hull.dims()
    rng = random.Random((seed, g))

    # v-side: realizable solution sets per component
    per_comp = [solution_sets(H, g, i) for i in range(l)]
    tracker.charge(sum(len(s) for s in per_comp), "solution sets")
    if all(
        len(s) == 1 and s[0][0] == frozenset(cent) for s in per_comp
    ):
        return _GOutcome(0, None)  # nothing can ever be weakly unsolvable

    # k-side: candidate U sets with nonempty constraint region
    candidates = _enumerate_candidate_regions(H, g, cent, tracker)

    # order by best possible value, then decide achievability exactly
    scored = []
    for uset, region in candidates:
        val, choice = _best_family_value(uset, per_comp, dims, cent, tracker)
        scored.append((val, sorted(uset), uset, region, choice))
    scored.sort(key=lambda t: (-t[0], t[1]))

    for val, _, uset, region, choice in scored:
        if val <= 0:
            break
        decided, kpoint, diag = _decide_exact_pattern(
            H, g, uset, region, cent, tracker, height_cap, rng
        )
        if not decided:
            continue
        witness, wdiag = _assemble_witness(
            H, g, uset, choice, kpoint, per_comp, height_cap, rng
        )
        return _GOutcome(val, witness, diag + wdiag)
    return _GOutcome(0, None)


def _enumerate_candidate_regions(H, g, cent, tracker):
    """All U subsets of C(g) whose defining constraints are consistent.

    For h in U both constraints must hold (vanish everywhere and strong
    failure); the region is their affine intersection inside the
    membership coset.  Empty regions prune all supersets.
    """
    n2 = 2 * H.dim
    vg = H.cocycle[g]
    base = AffineLattice.make(
        vg + vg, Lattice.standard(n2, H.q)
    )
    out = []

    def rec(idx, chosen, region):
        if idx == len(cent):
            out.append((frozenset(chosen), region))
            return
        tracker.charge(1, "candidate regions")
        rec(idx + 1, chosen, region)
        h = cent[idx]
        vanish = AffineLattice.make(
            (0,) * n2, _vanish_all_pullback(H, g, h)
        )
        nxt = region.intersect(vanish)
        if nxt is None:
            return
        nxt = nxt.intersect(_strong_fail_affine(H, g, h))
        if nxt is None:
            return
        rec(idx + 1, chosen + (h,), nxt)

    rec(0, (), base)
    return out


def _best_family_value(uset, per_comp, dims, cent, tracker):
    """Max over jointly realizable families of the min admitting dimension.

    Only the coverage masks restricted to U matter; families are free
    products of the per-component realizable sets.
    """
    if not uset:
        return 0, tuple(s[0][0] for s in per_comp)
    l = len(per_comp)
    udim = len(uset)
    uorder = sorted(uset)
    upos = {h: k for k, h in enumerate(uorder)}
    options = []
    for i in range(l):
        seen = {}
        for hset, _kernel in per_comp[i]:
            mask = 0
            for h in uorder:
                if h not in hset:
                    mask |= 1 << upos[h]
            if mask not in seen:
                seen[mask] = hset
        options.append(sorted(seen.items()))
    fullmask = (1 << udim) - 1
    subsets = sorted(
        (sum(dims[i] for i in K), K) for K in _powerset(range(l))
    )

    best_val = -1
    best_choice = None
    total = 1
    for opts in options:
        total *= len(opts)
    tracker.charge(total, "family products")
    for combo in itertools.product(*options):
        masks = [m for m, _ in combo]
        value = 0
        for dim_k, K in subsets:
            acc = 0
            for i in K:
                acc |= masks[i]
            if acc & fullmask == fullmask:
                value = dim_k
                break
        else:
            value = 0
        if value > best_val:
            best_val = value
            best_choice = tuple(hset for _, hset in combo)
    return best_val, best_choice


def _decide_exact_pattern(H, g, uset, region, cent, tracker, height_cap, rng):
    """Is there a k-pair in ``region`` whose U set is exactly ``uset``?

    The avoid constraints (h outside U must not satisfy vanish+non-strong
    simultaneously) are affine sublattices of the region: full-rank ones
    are decided by residue-class covering, lower-rank ones can never
    cover and only matter for exhibiting an explicit point.
    """
    avoid = []
    for h in cent:
        if h in uset:
            continue
        a = region.intersect(
            AffineLattice.make((0,) * 2 * H.dim, _vanish_all_pullback(H, g, h))
        )
        if a is None:
            continue
        a = a.intersect(_strong_fail_affine(H, g, h))
        if a is None:
            continue
        if a.lattice == region.lattice and region.contains(a.point):
            return False, None, []  # the bad set covers everything
        avoid.append(a)

    rank = region.lattice.rank
    if rank == 0:
        # a single point; any surviving avoid set is that point itself
        return (not avoid), (region.point if not avoid else None), []
    full = [a for a in avoid if a.lattice.rank == rank]
    low = [a for a in avoid if a.lattice.rank < rank]
    diagnostics: list = []
    if not full:
        point = _search_point(region, low, height_cap, rng)
        if point is None:
            diagnostics.append(
                f"g={g} U={sorted(uset)}: achievable but no explicit point "
                f"within height cap {height_cap}"
            )
        return True, point, diagnostics

    lstar = full[0].lattice
    for a in full[1:]:
        lstar = lstar.intersect(a.lattice)
    coords = la.as_mat(
        [la.solve_left(region.lattice.basis, row) for row in lstar.basis]
    )
    tmat = la.hnf(coords)
    index = 1
    for r, row in enumerate(tmat):
        index *= row[r]
    tracker.charge(index, "residue classes")
    ranges = [range(tmat[r][r]) for r in range(rank)]
    for combo in itertools.product(*ranges):
        offset = la.vec_mat(combo, region.lattice.basis)
        point = la.vec_add(region.point, offset)
        if any(a.contains(point) for a in full):
            continue
        cls = AffineLattice.make(point, lstar)
        found = _search_point(cls, low, height_cap, rng)
        if found is None:
            diagnostics.append(
                f"g={g} U={sorted(uset)}: uncovered residue class found but "
                f"no explicit point within height cap {height_cap}"
            )
        return True, found, diagnostics
    return False, None, diagnostics


def _search_point(region, low_avoid, height_cap, rng):
    """A point of the affine region off the given lower-rank subsets."""
    basis = region.lattice.basis
    rank = len(basis)

    def bad(pt):
        return any(a.contains(pt) for a in low_avoid)

    if not bad(region.point):
        return region.point
    if rank == 0:
        return None
    for radius in range(1, height_cap + 1):
        for _ in range(200 * rank):
            combo = [rng.randint(-radius, radius) for _ in range(rank)]
            pt = la.vec_add(region.point, la.vec_mat(combo, basis))
            if not bad(pt):
                return pt
    if rank <= 6:
        ranges = [range(-height_cap, height_cap + 1)] * rank
        for combo in itertools.product(*ranges):
            pt = la.vec_add(region.point, la.vec_mat(combo, basis))
            if not bad(pt):
                return pt
    return None


def _assemble_witness(H, g, uset, choice, kpoint, per_comp, height_cap, rng):
    """Explicit tuple realizing the winning pattern, when points exist."""
    diagnostics: list = []
    if kpoint is None or choice is None:
        return None, diagnostics
    n = H.dim
    k1, k2 = kpoint[:n], kpoint[n:]
    kernels = []
    excluded = []
    cent = H.group.centralizer(g)
    for i, hset in enumerate(choice):
        kernels.append(
            next(k for hs, k in per_comp[i] if hs == hset)
        )
        excluded.extend((i, h) for h in cent if h not in hset)
    joint = kernels[0]
    for k in kernels[1:]:
        joint = joint.intersect(k)
    low = [
        AffineLattice.make((0,) * 2 * n, _vanish_pullback(H, g, i, h))
        for i, h in excluded
    ]
    vpoint = _search_point(
        AffineLattice.make((0,) * 2 * n, joint), low, height_cap, rng
    )
    if vpoint is None:
        diagnostics.append(
            f"g={g}: family realizable but no explicit v-pair within "
            f"height cap {height_cap}"
        )
        return None, diagnostics
    v1, v2 = vpoint[:n], vpoint[n:]
    witness = ProbeTuple(g=g, v1=v1, v2=v2, k1=k1, k2=k2)
    value = min_admitting_dim(H, g, v1, v2, k1, k2)
    dims = H.hull.dims()
    expected = _cover_value(uset, choice, dims, cent)
    if value != expected:
        raise AssertionError(
            f"witness self-check failed: min dim {value} != expected {expected}"
        )
    return witness, diagnostics


def _cover_value(uset, choice, dims, cent):
    l = len(choice)
    for dim_k, K in sorted(
        (sum(dims[i] for i in K), K) for K in _powerset(range(l))
    ):
        if all(any(h not in choice[i] for i in K) for h in uset):
            return dim_k
    return 0
