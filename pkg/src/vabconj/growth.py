"""Empirical conjugacy-separability growth over invariant-lattice quotients.

The harness minimizes over quotients by rho-invariant sublattices of
|G|Z^h only.  The true growth function minimizes over all finite
quotients; the reported values are upper bounds that sit within a factor
|G| of optimal, since any separating kernel meets M in an invariant
sublattice of index at most |G| smaller.  No curve fitting is done; raw
indices are reported next to a C*j^k reference column.
"""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass
from typing import Optional, Sequence

from . import intlinalg as la
from .errors import BudgetExceeded
from .separability import ProbeTuple
from .vab import Element, VirtAbGroup


@dataclass(frozen=True)
class GrowthRow:
    n: int
    pairs_checked: int
    max_min_index: int
    witness_pair: Optional[tuple]  # (Element, Element) or None
    budget_hit: bool


@dataclass(frozen=True)
class ProbeRow:
    j: int
    lcm: int
    conjugate_skipped: bool
    index: Optional[int]
    reference: Optional[int]  # C * j^k with C fixed by the first row
    budget_hit: bool


def lcm_points(j_max: int) -> list:
    """[lcm(1..1), ..., lcm(1..j_max)]."""
    if j_max < 1:
        raise ValueError("j_max must be >= 1")
    out = []
    acc = 1
    for j in range(1, j_max + 1):
        acc = math.lcm(acc, j)
        out.append(acc)
    return out


def witness_sequence(H: VirtAbGroup, tup: ProbeTuple, n: int) -> tuple:
    """The probe pair ((k1 + |G|^4 lcm(1..n) v1, g), (k2 + ... v2, g))."""
    scale = H.q**4 * lcm_points(n)[-1]
    x = Element(
        la.vec_add(tup.k1, la.vec_scale(scale, tup.v1)), tup.g
    )
    y = Element(
        la.vec_add(tup.k2, la.vec_scale(scale, tup.v2)), tup.g
    )
    H.require_member(x)
    H.require_member(y)
    return x, y


def empirical_conj(H: VirtAbGroup, n_max: int, budget: int) -> list:
    """One row per radius: the max over non-conjugate pairs in the ball of
    the minimal separating invariant-quotient index."""
    if n_max < 1:
        raise ValueError("n_max must be >= 1")
    norms = H.ball(n_max)
    elements = list(norms)
    # bucket by conjugacy class via the canonical key
    key_of = {}
    class_rep = {}
    for x in elements:
        k = H.conjugacy_key(x)
        key_of[x] = k
        if k not in class_rep or norms[x] < norms[class_rep[k]]:
            class_rep[k] = x
    # min separating index per unordered class pair, shared ascending sweep
    keys = sorted(class_rep, key=lambda k: (k[0], k[1]))
    pair_index: dict = {}
    rows = []
    for n in range(1, n_max + 1):
        live_keys = sorted(
            {key_of[x] for x in elements if norms[x] <= n},
            key=lambda k: (k[0], k[1]),
        )
        pairs = [
            (a, b)
            for i, a in enumerate(live_keys)
            for b in live_keys[i + 1 :]
        ]
        budget_hit = False
        best = 1
        witness = None
        pairs_checked = 0
        for a, b in pairs:
            pairs_checked += 1
            if (a, b) not in pair_index:
                x, y = class_rep[a], class_rep[b]
                try:
                    found = H.min_separating_index(x, y, budget)
                except BudgetExceeded:
                    found = None
                pair_index[(a, b)] = (
                    (found[0] if found else None),
                    (x, y),
                )
            idx, xy = pair_index[(a, b)]
            if idx is None:
                budget_hit = True
                continue
            if idx > best:
                best = idx
                witness = xy
        rows.append(
            GrowthRow(
                n=n,
                pairs_checked=pairs_checked,
                max_min_index=best,
                witness_pair=witness,
                budget_hit=budget_hit,
            )
        )
    return rows


def probe_lower_bound(
    H: VirtAbGroup,
    tup: ProbeTuple,
    j_max: int,
    budget: int,
    k_hint: Optional[int] = None,
) -> list:
    """Separating indices of the witness pair along the lcm sequence.

    Conjugate instances (finitely many) are skipped.  The reference
    column is C*j^k with C chosen so the first measured row matches."""
    rows = []
    ref_c = None
    k = k_hint if k_hint is not None else 0
    for j, l in enumerate(lcm_points(j_max), start=1):
        x, y = witness_sequence(H, tup, j)
        conj, _ = H.is_conjugate(x, y)
        if conj:
            rows.append(ProbeRow(j, l, True, None, None, False))
            continue
        budget_hit = False
        try:
            found = H.min_separating_index(x, y, budget)
        except BudgetExceeded:
            found = None
        idx = found[0] if found else None
        if idx is None:
            budget_hit = True
        elif ref_c is None:
            ref_c = idx
        ref = ref_c * j**k if ref_c is not None else None
        rows.append(ProbeRow(j, l, False, idx, ref, budget_hit))
    return rows


def export(rows: Sequence[GrowthRow], fmt: str) -> str:
    """Serialize growth rows; csv column order is fixed."""
    if fmt == "csv":
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(
            ["n", "pairs_checked", "max_min_index", "witness", "budget_hit"]
        )
        for r in rows:
            writer.writerow(
                [
                    r.n,
                    r.pairs_checked,
                    r.max_min_index,
                    json.dumps(_pair_doc(r.witness_pair), sort_keys=True),
                    int(r.budget_hit),
                ]
            )
        return buf.getvalue()
    if fmt == "json-report":
        doc = {
            "schema": "vabconj-growth-v1",
            "rows": [
                {
                    "n": r.n,
                    "pairs_checked": r.pairs_checked,
                    "max_min_index": r.max_min_index,
                    "witness": _pair_doc(r.witness_pair),
                    "budget_hit": r.budget_hit,
                }
                for r in rows
            ],
        }
        return json.dumps(doc, indent=2, sort_keys=True)
    raise ValueError(f"unknown format {fmt!r}")


def parse_report(text: str) -> list:
    """Round-trip counterpart of export(..., 'json-report')."""
    doc = json.loads(text)
    if doc.get("schema") != "vabconj-growth-v1":
        raise ValueError("not a vabconj growth report")
    rows = []
    for r in doc["rows"]:
        rows.append(
            GrowthRow(
                n=r["n"],
                pairs_checked=r["pairs_checked"],
                max_min_index=r["max_min_index"],
                witness_pair=_pair_from_doc(r["witness"]),
                budget_hit=r["budget_hit"],
            )
        )
    return rows


def _pair_doc(pair) -> Optional[list]:
    if pair is None:
        return None
    return [[list(e.v), e.g] for e in pair]


def _pair_from_doc(doc):
    if doc is None:
        return None
    return tuple(Element(tuple(v), g) for v, g in doc)
