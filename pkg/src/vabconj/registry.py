"""Built-in example groups and the JSON input-document loader.

An input document describes a group either by a Cayley table plus one
integer matrix per element, or by unimodular matrix generators (the group
is then the matrix group itself).  Optional fields select a cocycle, a
factor set (triggering the extension embedding), or a generating set.
"""

from __future__ import annotations

import itertools
from typing import Optional

from . import intlinalg as la
from .errors import GroupLawError
from .groups import FiniteGroup, from_cayley, from_matrix_generators
from .reps import IntRep, validate
from .vab import Element, VirtAbGroup, embed_extension


def _abelian_cayley(orders):
    """Cayley table of a direct sum of cyclic groups, identity first."""
    elems = list(itertools.product(*[range(o) for o in orders]))
    elems.sort()
    index = {e: i for i, e in enumerate(elems)}
    table = [
        [
            index[tuple((a + b) % o for a, b, o in zip(x, y, orders))]
            for y in elems
        ]
        for x in elems
    ]
    return table, elems


def _diag(entries):
    n = len(entries)
    return [[entries[i] if i == j else 0 for j in range(n)] for i in range(n)]


def _swap_doc():
    table, elems = _abelian_cayley([2])
    rho = [la.identity(2), ((0, 1), (1, 0))]
    return {
        "group": {"cayley": table},
        "dim": 2,
        "rho": [[list(r) for r in m] for m in rho],
    }


def _rot4_doc():
    table, elems = _abelian_cayley([4])
    r = ((0, -1), (1, 0))
    mats = [la.identity(2)]
    for _ in range(3):
        mats.append(la.mat_mul(mats[-1], r))
    return {
        "group": {"cayley": table},
        "dim": 2,
        "rho": [[list(row) for row in m] for m in mats],
    }


def _dihedral_line_doc():
    table, _ = _abelian_cayley([2])
    return {
        "group": {"cayley": table},
        "dim": 1,
        "rho": [[[1]], [[-1]]],
    }


def _diag3_doc():
    table, elems = _abelian_cayley([2, 2])
    mats = []
    for g1, g2 in elems:
        mats.append(
            _diag([(-1) ** g1, (-1) ** g2, (-1) ** (g1 + g2)])
        )
    return {
        "group": {"cayley": table},
        "dim": 3,
        "rho": mats,
    }


def _h0h0_doc():
    table, elems = _abelian_cayley([2, 2])
    mats = []
    for a, b in elems:
        mats.append(_diag([(-1) ** a, (-1) ** b]))
    return {
        "group": {"cayley": table},
        "dim": 2,
        "rho": mats,
    }


def _six_dim_doc():
    # Z/3 + Z/2 + Z/2 acting on Z^(3x2), flattened row-major:
    # g1 cycles the three rows downward, g2 swaps the two columns,
    # g3 negates everything.
    table, elems = _abelian_cayley([3, 2, 2])
    cycle = [[0] * 6 for _ in range(6)]
    for row in range(3):
        for col in range(2):
            src = ((row + 2) % 3) * 2 + col  # row i reads old row i-1
            cycle[row * 2 + col][src] = 1
    swap = [[0] * 6 for _ in range(6)]
    for row in range(3):
        swap[row * 2][row * 2 + 1] = 1
        swap[row * 2 + 1][row * 2] = 1
    mats = []
    for a, b, c in elems:
        m = la.identity(6)
        for _ in range(a):
            m = la.mat_mul(la.as_mat(cycle), m)
        for _ in range(b):
            m = la.mat_mul(la.as_mat(swap), m)
        if c:
            m = la.mat_scale(-1, m)
        mats.append(m)
    return {
        "group": {"cayley": table},
        "dim": 6,
        "rho": [[list(row) for row in m] for m in mats],
    }


BUILTIN_DOCS = {
    "swap": _swap_doc,
    "rot4": _rot4_doc,
    "dihedral-line": _dihedral_line_doc,
    "six-dim": _six_dim_doc,
    "diag3": _diag3_doc,
    "h0h0": _h0h0_doc,
}


def builtin_names() -> list:
    return sorted(BUILTIN_DOCS)


def builtin_doc(name: str) -> dict:
    if name not in BUILTIN_DOCS:
        raise KeyError(
            f"unknown example {name!r}; known: {', '.join(builtin_names())}"
        )
    return BUILTIN_DOCS[name]()


def build_group(doc: dict, seed: int = 0) -> VirtAbGroup:
    """Construct the virtually abelian group described by an input document."""
    if "group" not in doc:
        raise GroupLawError("input document missing 'group'")
    spec = doc["group"]
    if ("cayley" in spec) == ("matrix_generators" in spec):
        raise GroupLawError(
            "group must have exactly one of 'cayley' or 'matrix_generators'"
        )
    if "cayley" in spec:
        group = from_cayley(spec["cayley"])
        if "rho" not in doc:
            raise GroupLawError("'rho' is required with a cayley table")
        mats = tuple(la.as_mat(m) for m in doc["rho"])
        dim = int(doc.get("dim", len(mats[0]) if mats else 0))
        rep = IntRep(group, dim, mats)
    else:
        group, mats = from_matrix_generators(
            [la.as_mat(m) for m in spec["matrix_generators"]]
        )
        dim = int(doc.get("dim", len(mats[0])))
        rep = IntRep(group, dim, mats)
    validate(rep)
    if "factor_set" in doc:
        if "cocycle" in doc:
            raise GroupLawError("factor_set and cocycle are mutually exclusive")
        fs = doc["factor_set"]
        H = embed_extension(rep, fs)
    else:
        cocycle = doc.get("cocycle")
        H = VirtAbGroup(
            rep,
            cocycle=tuple(la.as_vec(v) for v in cocycle) if cocycle else None,
            seed=seed,
        )
    if "generators" in doc:
        gens = tuple(
            Element(la.as_vec(v), int(g)) for v, g in doc["generators"]
        )
        for e in gens:
            H.require_member(e)
        H = VirtAbGroup(H.rep, cocycle=H.cocycle, gens=gens, seed=seed)
    return H
