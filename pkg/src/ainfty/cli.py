"""``ainfty`` command-line interface.

Exit codes: 0 success, 1 mathematical or validation failure, 2 I/O or parse failure.
"""

from __future__ import annotations

import argparse
import json
import re
import sys
from fractions import Fraction
from typing import List, Optional

from . import corpus
from .constructions import InvalidComplex, JacobiFailure
from .dga import DGA, ParseError, ValidationError, cohomology_ring, load_json, validate_dga
from .hodge import HodgeData, InvariantViolation, build_hodge
from .linalg import Element, SubspaceCoordinates, format_element, format_terms
from .transfer import (
    NotDefined,
    lambda_eval,
    massey_triple,
    stasheff_suite,
    transfer_structure,
)

EXIT_OK, EXIT_FAIL, EXIT_INPUT = 0, 1, 2

_TERM = re.compile(r"\s*([+-]?)\s*(?:(\d+(?:/\d+)?)\s*\*\s*)?([^\s+*-]+)\s*")


class InputError(Exception):
    pass


def _emit_json(obj) -> None:
    sys.stdout.write(json.dumps(obj, indent=2) + "\n")


def _load(path: str) -> DGA:
    try:
        return corpus.load(path)
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror or exc}") from None
    except (ParseError, InvalidComplex) as exc:
        raise InputError(f"parse error: {exc}") from None


def parse_element(text: str, dga: DGA, hodge: HodgeData) -> Element:
    """Linear combination like ``x``, ``2*xz - 1/2*H1_0``.

    Names resolve to harmonic basis vectors first, then ambient basis labels.
    """
    harm = dict(zip(hodge.basis.labels, hodge.basis.vectors))
    out = dga.space.zero()
    pos, text = 0, text.strip()
    if text == "0":
        return out
    while pos < len(text):
        m = _TERM.match(text, pos)
        if not m or m.end() == pos:
            raise InputError(f"cannot parse element {text!r}")
        sign, coeff, name = m.groups()
        c = Fraction(coeff) if coeff else Fraction(1)
        if sign == "-":
            c = -c
        if name in harm:
            vec = harm[name]
        elif name in dga.space.index:
            vec = dga.basis_element(name)
        else:
            raise InputError(f"unknown basis label {name!r}")
        out = out + c * vec
        pos = m.end()
    return out


# ---------------------------------------------------------------------------
# commands


def cmd_check(args) -> int:
    try:
        with open(args.file, encoding="utf-8") as fh:
            text = fh.read()
    except OSError:
        if args.file in corpus.CORPUS:
            text = corpus.emit(args.file)
        else:
            print(f"cannot read {args.file}", file=sys.stderr)
            return EXIT_INPUT
    try:
        dga = corpus.dga_from_object(load_json(text), validate=False)
    except ParseError as exc:
        print(f"parse error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except InvalidComplex as exc:
        print(f"parse error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except JacobiFailure as exc:
        print(f"jacobi                 FAIL  witness: {exc}")
        return EXIT_FAIL
    report = validate_dga(dga)
    dims = ",".join(str(dga.space.dim(n)) for n in dga.space.degrees())
    print(f"dims ({dims})")
    for line in report.lines():
        print(line)
    return EXIT_OK if report.ok else EXIT_FAIL


def _class_name(n: int, i: int) -> str:
    return f"c{n}_{i}"


def cmd_cohomology(args) -> int:
    dga = _load(args.file)
    ring = cohomology_ring(dga)
    hodge = build_hodge(dga)
    betti = list(ring.betti)
    harmonic = list(hodge.harmonic_dims)
    agree = betti == harmonic
    sp = dga.space
    products = []
    for (p, i, q, j), coeffs in sorted(ring.products.items()):
        products.append({"left": _class_name(p, i), "right": _class_name(q, j),
                         "result": [{"basis": _class_name(p + q, k), "coeff": str(c)}
                                    for k, c in enumerate(coeffs) if c]})
    reps = {_class_name(n, i): format_element(r)
            for n in sp.degrees() for i, r in enumerate(ring.representatives[n])}
    if args.format == "json":
        _emit_json({"betti": betti, "harmonic_dims": harmonic, "agree": agree,
                    "representatives": reps, "products": products})
    else:
        print(f"{'degree':>6}  {'betti':>5}  {'harmonic':>8}")
        for n in sp.degrees():
            print(f"{n:>6}  {betti[n]:>5}  {harmonic[n]:>8}")
        print(f"Betti ({','.join(map(str, betti))})")
        for name, rep in reps.items():
            print(f"{name} = [{rep}]")
        for p in products:
            res = format_terms((t["basis"], Fraction(t["coeff"])) for t in p["result"])
            print(f"{p['left']} * {p['right']} = {res}")
    if not agree:
        print("Betti numbers from quotient and harmonic computations disagree", file=sys.stderr)
        return EXIT_FAIL
    return EXIT_OK


def cmd_transfer(args) -> int:
    dga = _load(args.file)
    hodge = build_hodge(dga)
    s = transfer_structure(dga, hodge, args.max_arity, workers=args.jobs)
    if args.format == "json":
        out = s.to_json()
        out["hodge"] = hodge.summary()
        _emit_json(out)
    else:
        summ = hodge.summary()
        print(f"dims {tuple(summ['dims'])}  harmonic {tuple(summ['harmonic_dims'])}")
        for n, labs in sorted(hodge.basis.by_degree().items()):
            print(f"H^{n}: {', '.join(labs)}")
        for lab, vec in zip(hodge.basis.labels, hodge.basis.vectors):
            if len(vec.coeffs) > 1:
                print(f"  {lab} = {format_element(vec)}")
        for line in s.lines():
            print(line)
    return EXIT_OK


def cmd_stasheff(args) -> int:
    dga = _load(args.file)
    hodge = build_hodge(dga)
    s, reports = stasheff_suite(dga, hodge, args.max_arity, workers=args.jobs)
    ok = all(r.passed for r in reports)
    if args.format == "json":
        _emit_json({"variant": s.variant, "status": "pass" if ok else "fail",
                    "reports": [r.to_json() for r in reports]})
    else:
        print(f"variant {s.variant}")
        for r in reports:
            print(f"n={r.check.split('-')[1]:<3} {r.status:<5} tuples={r.details['tuples']}")
            for w in r.witnesses:
                print(f"    witness {','.join(w['inputs'])}: residue {w['residue']}")
    return EXIT_OK if ok else EXIT_FAIL


def cmd_massey(args) -> int:
    dga = _load(args.file)
    hodge = build_hodge(dga)
    a, b, c = (parse_element(x, dga, hodge) for x in (args.a, args.b, args.c))
    for name, e in zip("abc", (a, b, c)):
        if not hodge.is_harmonic(e):
            print(f"{name} = {format_element(e)} is not harmonic", file=sys.stderr)
            return EXIT_FAIL
    try:
        mp = massey_triple(dga, hodge, a, b, c)
        check = massey_triple(dga, hodge, a, b, c, primitive="echelon")
    except NotDefined as exc:
        print(f"undefined: {exc}")
        return EXIT_FAIL
    if a and b and c:
        m3 = hodge.projector(lambda_eval(dga, hodge, a, b, c))
    else:
        m3 = dga.space.zero()
    basis = hodge.basis
    indet = [basis.coordinates(v) for v in mp.indeterminacy]
    verdict = None
    for sign in (1, -1):
        diff = m3 - sign * check.representative
        if not diff or _in_span(basis.coordinates(diff), indet, len(basis)):
            verdict = sign
            break
    print(f"defined; indeterminacy dim {len(mp.indeterminacy)}")
    print(f"massey = {format_element(mp.representative)}")
    print(f"m3 = {format_element(m3)}")
    if verdict is None:
        print("m3 does not match +-Massey")
        return EXIT_FAIL
    print(f"m3 matches {'+' if verdict > 0 else '-'}Massey")
    return EXIT_OK


def _in_span(v, vectors, n) -> bool:
    if not vectors:
        return not v
    mat = [[x.get(i, 0) for i in range(n)] for x in vectors]
    return SubspaceCoordinates(mat, n).contains([v.get(i, 0) for i in range(n)])


def cmd_corpus(args) -> int:
    if args.action == "list":
        for name, entry in corpus.CORPUS.items():
            print(f"{name:<11} {entry.kind:<9} {entry.description}")
        return EXIT_OK
    if not args.name or not args.path:
        print("usage: ainfty corpus emit <name> <path>", file=sys.stderr)
        return EXIT_INPUT
    if args.name not in corpus.CORPUS:
        print(f"unknown corpus entry {args.name!r}", file=sys.stderr)
        return EXIT_FAIL
    try:
        with open(args.path, "w", encoding="utf-8") as fh:
            fh.write(corpus.emit(args.name))
    except OSError as exc:
        print(f"cannot write {args.path}: {exc}", file=sys.stderr)
        return EXIT_INPUT
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="ainfty", description="Hodge data and transferred A-infinity structures")
    sub = p.add_subparsers(dest="command", required=True)

    c = sub.add_parser("check", help="parse and validate a DGA file")
    c.add_argument("file")
    c.set_defaults(func=cmd_check)

    c = sub.add_parser("cohomology", help="Betti numbers and cohomology ring")
    c.add_argument("file")
    c.add_argument("--format", choices=("table", "json"), default="table")
    c.set_defaults(func=cmd_cohomology)

    c = sub.add_parser("transfer", help="transferred m_k tables on harmonic forms")
    c.add_argument("file")
    c.add_argument("--max-arity", type=int, default=4)
    c.add_argument("--format", choices=("table", "json"), default="table")
    c.add_argument("--jobs", type=int, default=1, help="worker processes")
    c.set_defaults(func=cmd_transfer)

    c = sub.add_parser("stasheff", help="verify the Stasheff identities")
    c.add_argument("file")
    c.add_argument("--max-arity", type=int, default=4)
    c.add_argument("--format", choices=("table", "json"), default="table")
    c.add_argument("--jobs", type=int, default=1)
    c.set_defaults(func=cmd_stasheff)

    c = sub.add_parser("massey", help="Massey triple product against m_3")
    c.add_argument("file")
    c.add_argument("a")
    c.add_argument("b")
    c.add_argument("c")
    c.set_defaults(func=cmd_massey)

    c = sub.add_parser("corpus", help="list or emit example files")
    c.add_argument("action", choices=("list", "emit"))
    c.add_argument("name", nargs="?")
    c.add_argument("path", nargs="?")
    c.set_defaults(func=cmd_corpus)
    return p


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if getattr(args, "max_arity", 2) < 2:
        print("--max-arity must be at least 2", file=sys.stderr)
        return EXIT_INPUT
    try:
        return args.func(args)
    except InputError as exc:
        print(str(exc), file=sys.stderr)
        return EXIT_INPUT
    except (ValidationError, JacobiFailure) as exc:
        print(f"validation failed: {exc}", file=sys.stderr)
        return EXIT_FAIL
    except InvariantViolation as exc:
        print(f"internal invariant violation: {exc}", file=sys.stderr)
        return EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
