"""Command-line front end.

Exit codes: 0 satisfiable with an artifact (or check passed), 1 no model at
the bound (or check failed), 2 search budget exhausted, 3 input error.
"""
from __future__ import annotations

import argparse
import json
import random
import sys

import numpy as np

from . import certificate as cert_mod
from . import surgery
from .formula import FormulaError, Signature, classify_fragment, parse, signature_of, to_nnf, to_text
from .model_finder import KERNEL, BudgetExhausted, SearchConfig, TableTooLarge, find_finite_model
from .modelfile import ModelFileError, format_certificate, format_structure, parse_model_text
from .normal_form import canonical_expansion, scottify
from .structure import Structure, StructureError, check_model
from .typetable import DIRECTIONS, enumerate_1types, enumerate_2types, layout

EXIT_OK, EXIT_NO_MODEL, EXIT_BUDGET, EXIT_INPUT = 0, 1, 2, 3


class InputError(Exception):
    pass


def _read(path: str) -> str:
    try:
        if path == "-":
            return sys.stdin.read()
        with open(path, encoding="utf-8") as fh:
            return fh.read()
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror}") from exc


def _formula(path: str):
    return parse(_read(path))


def _write(text: str, path: str | None):
    if path:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _model(path: str, nf=None, frontier=()):
    parsed = parse_model_text(_read(path))
    A = parsed.structure
    if nf is not None and A.sig != nf.signature:
        A = canonical_expansion(A, nf, frontier=frontier)
    return A, parsed


def _ints(text: str | None) -> list[int]:
    if not text:
        return []
    return [int(t) for t in text.replace(",", " ").split()]


# Subcommands -----------------------------------------------------------------------


def cmd_parse(args) -> int:
    f = _formula(args.formula)
    g = to_nnf(f) if args.nnf else f
    print(to_text(g))
    print(f"# signature: {signature_of(f)}")
    return EXIT_OK


def cmd_nf(args) -> int:
    nf = scottify(_formula(args.formula))
    print(nf.to_text())
    return EXIT_OK


def cmd_classify(args) -> int:
    print(classify_fragment(_formula(args.formula)))
    return EXIT_OK


def cmd_types(args) -> int:
    if args.formula:
        sig = signature_of(_formula(args.formula))
    else:
        sig = Signature(tuple(args.unary), ("T",) + tuple(b for b in args.binary if b != "T"))
    lay = layout(sig)
    ones = enumerate_1types(sig)
    table = enumerate_2types(sig)
    print(f"signature: {sig}")
    print(f"1-types: {len(ones)}")
    print(f"2-types: {len(table.two_types)}")
    for d in DIRECTIONS:
        print(f"  {str(d):>3}: {len(table.direction_class(d))}")
    if args.list:
        for a in ones:
            print(f"{a}: {lay.format_one(a)}")
        if args.list_two:
            for b in table.two_types:
                print(f"{b}: {lay.format_two(int(b))}")
    return EXIT_OK


def _search_config(args, max_size):
    return SearchConfig(
        max_size=max_size,
        node_limit=args.nodes,
        symmetry_breaking=not args.no_symmetry,
        parallel_width=args.parallel,
        kernel=args.kernel,
    )


def cmd_solve(args) -> int:
    nf = scottify(_formula(args.formula))
    res = find_finite_model(nf, _search_config(args, args.max_size))
    if isinstance(res, Structure):
        if args.base:
            res = res.reduct(nf.base_signature)
        _write(format_structure(res), args.output)
        print(f"# model of size {res.n} (kernel {args.kernel or KERNEL})", file=sys.stderr)
        return EXIT_OK
    print(res)
    return EXIT_BUDGET if isinstance(res, BudgetExhausted) else EXIT_NO_MODEL


def cmd_check(args) -> int:
    nf = scottify(_formula(args.formula))
    A, _ = _model(args.model, nf, _ints(args.frontier))
    v = check_model(A, nf, _ints(args.frontier))
    print(v)
    for f in v.failures[1:]:
        print(f"  {f}")
    return EXIT_OK if v.ok else EXIT_NO_MODEL


def cmd_surgery(args) -> int:
    nf = scottify(_formula(args.formula))
    A, _ = _model(args.model, nf)
    op = args.op
    if op == "duplicate":
        out, rep = surgery.duplicate_clique(A, nf, _ints(args.clique), _ints(args.partner))
    elif op == "remove":
        out = surgery.remove_segment(A, nf, _ints(args.segment))
        rep = f"removed segment {_ints(args.segment)}"
    elif op == "redundant":
        ok = surgery.is_redundant_segment(A, nf, _ints(args.segment))
        print("redundant" if ok else "not redundant")
        return EXIT_OK if ok else EXIT_NO_MODEL
    elif op == "shrink":
        out, rep = surgery.shrink_clique(A, nf, _ints(args.clique), args.bound)
        if out is None:
            print(rep)
            return EXIT_NO_MODEL
    elif op == "saturate":
        out, reps = surgery.saturation_rounds(A, nf, args.rounds)
        rep = f"{len(reps)} duplications in {args.rounds} rounds"
    else:  # argparse restricts the choices
        raise InputError(f"unknown operation {op}")
    print(rep, file=sys.stderr)
    _write(format_structure(out), args.output)
    return EXIT_OK


def _read_certificate(path: str, nf) -> cert_mod.Certificate:
    parsed = parse_model_text(_read(path))
    if not parsed.segments:
        raise InputError("certificate file has no segment lines")
    segs = [parsed.segments.get(j, ()) for j in range(4)]
    extra = set(parsed.segments) - {0, 1, 2, 3}
    if extra:
        raise InputError(f"segment numbers must be 0..3, got {sorted(extra)}")
    A = parsed.structure
    if nf is not None and A.sig != nf.signature:
        A = canonical_expansion(A, nf, frontier=segs[3])
    return cert_mod.Certificate(A, tuple(segs), parsed.maps)


def cmd_cert_check(args) -> int:
    nf = scottify(_formula(args.formula))
    c = _read_certificate(args.certificate, nf)
    bounds = cert_mod.compute_M(nf, args.s, args.h) if args.s and args.h else None
    v = cert_mod.check_certificate(c, nf, bounds, research_maps=args.research_maps)
    print(v)
    return EXIT_OK if v.ok else EXIT_NO_MODEL


def cmd_cert_find(args) -> int:
    nf = scottify(_formula(args.formula))
    max_size = args.max_size if args.max_size is not None else min(4 * args.max_segment, cert_mod.DEFAULT_FINITE_BOUND)
    res = cert_mod.find_certificate(nf, args.max_segment, _search_config(args, max_size))
    if isinstance(res, cert_mod.Certificate):
        _write(format_certificate(res.structure, res.segments, res.seg_maps), args.output)
        kind = "finite" if res.finite else "infinite"
        print(f"# {kind} certificate with {res.size} elements", file=sys.stderr)
        return EXIT_OK
    print(res)
    return EXIT_BUDGET if isinstance(res, BudgetExhausted) else EXIT_NO_MODEL


def cmd_cert_unfold(args) -> int:
    nf = scottify(_formula(args.formula)) if args.formula else None
    c = _read_certificate(args.certificate, nf)
    notes = []
    U = cert_mod.unfold(c, args.k, notes)
    segs = cert_mod.unfold_segments(c, args.k)
    _write(format_certificate(U, segs), args.output)
    for n in notes:
        print(f"# {n}", file=sys.stderr)
    if nf is not None:
        v = cert_mod.verify_unfolding(U, nf, segs[-1])
        print(f"# verify_unfolding: {v}", file=sys.stderr)
        return EXIT_OK if v.ok else EXIT_NO_MODEL
    return EXIT_OK


def cmd_corpus_run(args) -> int:
    from .corpus import run_corpus

    reports = run_corpus(args.names or None, workers=args.workers, equisat_bound=args.equisat_bound, node_limit=args.nodes)
    if args.json:
        print(json.dumps([r.to_dict() for r in reports], indent=2, ensure_ascii=False))
    else:
        for r in reports:
            print(r.to_text())
        bad = sum(not r.ok for r in reports)
        print(f"{len(reports) - bad}/{len(reports)} entries ok")
    return EXIT_OK if all(r.ok for r in reports) else EXIT_NO_MODEL


def cmd_corpus_list(args) -> int:
    from .corpus import load_manifest

    for e in load_manifest():
        print(f"{e.name:<26} {e.fragment:<20} {e.file}")
    return EXIT_OK


# Parser ----------------------------------------------------------------------------


def _search_flags(p):
    p.add_argument("--nodes", type=int, default=None, help="node budget")
    p.add_argument("--parallel", type=int, default=1, help="worker processes")
    p.add_argument("--kernel", choices=["compiled", "python"], default=None)
    p.add_argument("--no-symmetry", action="store_true", help="disable symmetry breaking")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="fo2t", description="FO2 with one transitive relation: satisfiability workbench")
    ap.add_argument("--seed", type=int, default=0, help="seed for any randomized step")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("parse", help="parse and pretty-print a formula file")
    p.add_argument("formula")
    p.add_argument("--nnf", action="store_true", help="print the negation normal form")
    p.set_defaults(func=cmd_parse)

    p = sub.add_parser("nf", help="print the directional normal form")
    p.add_argument("formula")
    p.set_defaults(func=cmd_nf)

    p = sub.add_parser("classify", help="print the fragment class")
    p.add_argument("formula")
    p.set_defaults(func=cmd_classify)

    p = sub.add_parser("types", help="count (and list) atomic types")
    p.add_argument("formula", nargs="?")
    p.add_argument("--unary", nargs="*", default=[], help="unary symbols when no formula is given")
    p.add_argument("--binary", nargs="*", default=[], help="extra binary symbols")
    p.add_argument("--list", action="store_true", help="list the 1-types")
    p.add_argument("--list-two", action="store_true", help="with --list, also list the 2-types")
    p.set_defaults(func=cmd_types)

    p = sub.add_parser("solve", help="bounded finite-model search")
    p.add_argument("formula")
    p.add_argument("--max-size", type=int, default=6)
    p.add_argument("--base", action="store_true", help="print the reduct to the input signature")
    p.add_argument("-o", "--output")
    _search_flags(p)
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("check", help="check a model file against a formula")
    p.add_argument("model")
    p.add_argument("--formula", required=True)
    p.add_argument("--frontier", help="elements exempt from witness conditions")
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("surgery", help="model surgery operations")
    p.add_argument("model")
    p.add_argument("--formula", required=True)
    p.add_argument("--op", required=True, choices=["duplicate", "remove", "redundant", "shrink", "saturate"])
    p.add_argument("--clique", help="elements of the clique B")
    p.add_argument("--partner", help="elements of the clique B1 with the same splice")
    p.add_argument("--segment", help="elements of the segment")
    p.add_argument("--bound", type=int, default=None, help="clique-size bound for shrink")
    p.add_argument("--rounds", type=int, default=1)
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_surgery)

    cp = sub.add_parser("cert", help="four-segment certificates")
    csub = cp.add_subparsers(dest="cert_command", required=True)
    p = csub.add_parser("check")
    p.add_argument("certificate")
    p.add_argument("--formula", required=True)
    p.add_argument("--research-maps", action="store_true", help="ignore stored maps and search for them")
    p.add_argument("--s", type=int, default=None, help="splice-count bound for condition 1")
    p.add_argument("--h", type=int, default=None, help="clique-size bound for condition 1")
    p.set_defaults(func=cmd_cert_check)
    p = csub.add_parser("find")
    p.add_argument("formula")
    p.add_argument("--max-segment", type=int, default=1)
    p.add_argument("--max-size", type=int, default=None, help="bound for finite certificates")
    p.add_argument("-o", "--output")
    _search_flags(p)
    p.set_defaults(func=cmd_cert_find)
    p = csub.add_parser("unfold")
    p.add_argument("certificate")
    p.add_argument("-k", type=int, required=True, help="number of copies of S1")
    p.add_argument("--formula", help="verify the prefix against this formula")
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_cert_unfold)

    kp = sub.add_parser("corpus", help="bundled corpus")
    ksub = kp.add_subparsers(dest="corpus_command", required=True)
    p = ksub.add_parser("run")
    p.add_argument("names", nargs="*")
    p.add_argument("--json", action="store_true")
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--equisat-bound", type=int, default=3)
    p.add_argument("--nodes", type=int, default=None)
    p.set_defaults(func=cmd_corpus_run)
    p = ksub.add_parser("list")
    p.set_defaults(func=cmd_corpus_list)
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    random.seed(args.seed)
    np.random.seed(args.seed)
    try:
        return args.func(args)
    except (InputError, FormulaError, ModelFileError, StructureError, TableTooLarge, ValueError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
