"""Batch command line: ingest group documents, run analyses, emit reports.

Exit codes: 0 success, 1 validation error, 2 budget exceeded (partial
output was written), 3 internal invariant failure.
"""

from __future__ import annotations

import argparse
import json
import sys
from concurrent.futures import ProcessPoolExecutor
from typing import Optional

from . import growth as growth_mod
from . import registry, separability
from . import reps as reps_mod
from .errors import BudgetExceeded
from .separability import ExponentCertificate, ProbeTuple
from .vab import Element, VirtAbGroup

EXIT_OK = 0
EXIT_VALIDATION = 1
EXIT_BUDGET = 2
EXIT_INTERNAL = 3


def _load_doc(source: str) -> dict:
    if source.startswith("example:"):
        return registry.builtin_doc(source[len("example:") :])
    with open(source, "r", encoding="utf-8") as fh:
        return json.load(fh)


def _mat_doc(m) -> list:
    return [list(row) for row in m]


def _hull_doc(H: VirtAbGroup) -> dict:
    hull = H.hull
    comps = []
    for c in hull.components:
        comps.append(
            {
                "index": c.index,
                "rank": c.rank,
                "d": c.d,
                "orbit_size": c.orbit_size,
                "multiplicity": c.mult,
                "character": list(c.orbit_char.values),
                "scalar": c.orbit_char.scalar,
                "basis_num": _mat_doc(c.lattice.num.basis),
                "den": c.lattice.den,
                "projector_num": _mat_doc(c.projector_num),
                "projector_den": c.projector_den,
            }
        )
    return {
        "prime": hull.prime,
        "components": comps,
        "naive_bound": separability.naive_upper_bound(H),
    }


def _wv_doc(H: VirtAbGroup) -> dict:
    out = {}
    full = None
    for g in range(H.group.order):
        w = H.w_lattice(g)
        v = H.v_lattice(g)
        entry = {
            "w_basis": _mat_doc(w.basis),
            "v_basis": _mat_doc(v.basis),
        }
        if w.rank == H.dim:
            from .lattices import Lattice

            entry["w_index"] = int(
                w.index_in(Lattice.standard(H.dim))
            )
        out[str(g)] = entry
    return out


def _tuple_doc(t: Optional[ProbeTuple]):
    if t is None:
        return None
    return {
        "g": t.g,
        "v1": list(t.v1),
        "v2": list(t.v2),
        "k1": list(t.k1),
        "k2": list(t.k2),
    }


def _tuple_from_doc(doc) -> ProbeTuple:
    return ProbeTuple(
        g=int(doc["g"]),
        v1=tuple(doc["v1"]),
        v2=tuple(doc["v2"]),
        k1=tuple(doc["k1"]),
        k2=tuple(doc["k2"]),
    )


def _cert_doc(cert: ExponentCertificate) -> dict:
    return {
        "k": cert.k,
        "mode": cert.mode,
        "naive_bound": cert.naive,
        "witness": _tuple_doc(cert.witness),
        "per_g": [[g, v] for g, v in cert.per_g],
        "diagnostics": list(cert.diagnostics),
    }


def _emit(doc: dict, out: Optional[str]) -> None:
    text = json.dumps(doc, indent=2, sort_keys=True)
    if out:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(text + "\n")
    else:
        print(text)


def _parse_element(text: str) -> Element:
    v, g = json.loads(text)
    return Element(tuple(int(x) for x in v), int(g))


def cmd_analyze(args) -> int:
    doc = _load_doc(args.input)
    H = registry.build_group(doc, seed=args.seed)
    report = {
        "schema": "vabconj-report-v1",
        "validation": {
            "group_order": H.group.order,
            "dim": H.dim,
            "ok": True,
        },
        "square_hull": _hull_doc(H),
        "wv_tables": _wv_doc(H),
    }
    _emit(report, args.out)
    return EXIT_OK


def cmd_conj(args) -> int:
    doc = _load_doc(args.input)
    H = registry.build_group(doc, seed=args.seed)
    x = _parse_element(args.x)
    y = _parse_element(args.y)
    conjugate, witness = H.is_conjugate(x, y)
    report = {
        "schema": "vabconj-conj-v1",
        "x": [list(x.v), x.g],
        "y": [list(y.v), y.g],
        "conjugate": conjugate,
        "witness": [list(witness.v), witness.g] if witness else None,
    }
    _emit(report, args.out)
    return EXIT_OK


def _exponent_worker(payload):
    doc, seed, g, budget, height_cap = payload
    H = registry.build_group(doc, seed=seed)
    value, witness, diags = separability.k3_for_g(
        H, g, budget=budget, height_cap=height_cap, seed=seed
    )
    return g, value, _tuple_doc(witness), diags


def cmd_exponent(args) -> int:
    doc = _load_doc(args.input)
    H = registry.build_group(doc, seed=args.seed)
    if args.upper:
        cert = separability.k3_exponent(H, mode="naive-upper")
    elif args.witness:
        with open(args.witness, "r", encoding="utf-8") as fh:
            tuples = [_tuple_from_doc(d) for d in json.load(fh)]
        cert = separability.k3_exponent(
            H, mode="witness-lower", tuples=tuples
        )
    elif args.jobs > 1:
        payloads = [
            (doc, args.seed, g, args.budget, args.height_cap)
            for g in range(H.group.order)
        ]
        per_g = []
        diagnostics = []
        best, best_witness = 0, None
        with ProcessPoolExecutor(max_workers=args.jobs) as pool:
            for g, value, witness_doc, diags in pool.map(
                _exponent_worker, payloads
            ):
                per_g.append((g, value))
                diagnostics.extend(diags)
                if value > best:
                    best = value
                    best_witness = (
                        _tuple_from_doc(witness_doc) if witness_doc else None
                    )
        cert = ExponentCertificate(
            k=best,
            mode="exact",
            naive=separability.naive_upper_bound(H),
            witness=best_witness,
            per_g=tuple(per_g),
            diagnostics=tuple(diagnostics),
        )
    else:
        try:
            cert = separability.k3_exponent(
                H,
                mode="exact",
                budget=args.budget,
                height_cap=args.height_cap,
                seed=args.seed,
            )
        except BudgetExceeded as err:
            _emit({"schema": "vabconj-exponent-v1", **_cert_doc(err.partial)}, args.out)
            return EXIT_BUDGET
    _emit({"schema": "vabconj-exponent-v1", **_cert_doc(cert)}, args.out)
    return EXIT_OK


def cmd_growth(args) -> int:
    doc = _load_doc(args.input)
    H = registry.build_group(doc, seed=args.seed)
    code = EXIT_OK
    if args.probe:
        tup = _tuple_from_doc(json.loads(args.probe))
        rows = growth_mod.probe_lower_bound(
            H, tup, args.n_max, args.budget, k_hint=args.probe_exponent
        )
        doc_out = {
            "schema": "vabconj-probe-v1",
            "rows": [
                {
                    "j": r.j,
                    "lcm": r.lcm,
                    "conjugate_skipped": r.conjugate_skipped,
                    "index": r.index,
                    "reference": r.reference,
                    "budget_hit": r.budget_hit,
                }
                for r in rows
            ],
        }
        if any(r.budget_hit for r in rows):
            code = EXIT_BUDGET
        _emit(doc_out, args.out)
        return code
    rows = growth_mod.empirical_conj(H, args.n_max, args.budget)
    if any(r.budget_hit for r in rows):
        code = EXIT_BUDGET
    text = growth_mod.export(
        rows, "csv" if args.format == "csv" else "json-report"
    )
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text if text.endswith("\n") else text + "\n")
    else:
        print(text, end="" if text.endswith("\n") else "\n")
    return code


def cmd_examples(args) -> int:
    if args.list:
        for name in registry.builtin_names():
            print(name)
        return EXIT_OK
    name = args.name
    doc = registry.builtin_doc(name)
    H = registry.build_group(doc, seed=args.seed)
    report = {
        "schema": "vabconj-example-v1",
        "name": name,
        "square_hull": _hull_doc(H),
    }
    cert = separability.k3_exponent(
        H,
        mode="exact",
        budget=args.budget,
        height_cap=args.height_cap,
        seed=args.seed,
    )
    report["exponent"] = _cert_doc(cert)
    print(
        f"{name}: components={len(H.hull.components)} "
        f"dims={list(H.hull.dims())} naive={cert.naive} k={cert.k}"
    )
    _emit(report, args.out)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="vabconj",
        description=(
            "Conjugacy decisions and conjugacy-separability growth for "
            "finitely generated virtually abelian groups"
        ),
    )
    parser.add_argument("--seed", type=int, default=0, help="rng seed")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("analyze", help="validate and decompose a group")
    p.add_argument("input", help="input document path or example:NAME")
    p.add_argument("--out", help="write the JSON report here")
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("conj", help="decide conjugacy of two elements")
    p.add_argument("input")
    p.add_argument("--x", required=True, help='element as "[[v...], g]"')
    p.add_argument("--y", required=True)
    p.add_argument("--out")
    p.set_defaults(func=cmd_conj)

    p = sub.add_parser("exponent", help="growth exponent certificate")
    p.add_argument("input")
    p.add_argument("--exact", action="store_true", default=True)
    p.add_argument("--witness", help="JSON file with probe tuples")
    p.add_argument("--upper", action="store_true")
    p.add_argument("--budget", type=int, default=5_000_000)
    p.add_argument("--height-cap", type=int, default=4)
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--out")
    p.set_defaults(func=cmd_exponent)

    p = sub.add_parser("growth", help="empirical growth tables")
    p.add_argument("input")
    p.add_argument("--n-max", type=int, required=True)
    p.add_argument("--budget", type=int, required=True)
    p.add_argument("--probe", help="probe tuple as JSON (runs the witness sequence)")
    p.add_argument("--probe-exponent", type=int, default=None)
    p.add_argument("--format", choices=["csv", "json"], default="csv")
    p.add_argument("--out")
    p.set_defaults(func=cmd_growth)

    p = sub.add_parser("examples", help="run a built-in instance end to end")
    p.add_argument("name", nargs="?", default=None)
    p.add_argument("--list", action="store_true")
    p.add_argument("--budget", type=int, default=5_000_000)
    p.add_argument("--height-cap", type=int, default=4)
    p.add_argument("--out")
    p.set_defaults(func=cmd_examples)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.command == "examples" and not args.list and args.name is None:
        parser.error("examples requires a NAME or --list")
    try:
        return args.func(args)
    except BudgetExceeded as err:
        print(f"budget exceeded: {err}", file=sys.stderr)
        return EXIT_BUDGET
    except AssertionError as err:
        print(f"internal invariant failure: {err}", file=sys.stderr)
        return EXIT_INTERNAL
    except (ValueError, KeyError, OSError, json.JSONDecodeError) as err:
        print(f"error: {err}", file=sys.stderr)
        return EXIT_VALIDATION


if __name__ == "__main__":
    sys.exit(main())
