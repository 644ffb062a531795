"""Command line front end.

Every subcommand prints one JSON document on stdout.  Exit status: 0 on
success, 2 for usage or parse errors, 3 for domain errors (pole, zero
polynomial, degenerate locus), 1 if a numerical consistency check fails.
"""
from __future__ import annotations

import argparse
import json
import os
import sys
from typing import Optional, Sequence

from .errors import DomainError, InconsistencyError, ParseError
from .quat import Quaternion, parse_quaternion
from .rational import RationalExpr, expr_from_dict, reciprocal_eval, transform_Tf
from .regpoly import RegPoly, regular_conjugate, star_mul, symmetrization
from .verify import (
    GridSpec,
    check_regular,
    counterexample_probe,
    max_modulus_probe,
    min_modulus_probe,
    open_mapping_probe,
)
from .zeros import find_zeros, zeros_to_dict

EXIT_OK = 0
EXIT_INTERNAL = 1
EXIT_USAGE = 2
EXIT_DOMAIN = 3


def _read_source(text: str) -> str:
    if text.startswith("@"):
        path = text[1:]
    elif text.lstrip().startswith(("{", "[")):
        return text
    else:
        path = text
    try:
        with open(path, encoding="utf-8") as fh:
            return fh.read()
    except OSError as exc:
        raise ParseError(f"cannot read {path!r}: {exc.strerror}") from exc


def load_json(text: str):
    raw = _read_source(text)
    try:
        return json.loads(raw)
    except json.JSONDecodeError as exc:
        raise ParseError(f"invalid JSON: {exc}") from exc


def load_poly(text: str) -> RegPoly:
    return RegPoly.from_dict(load_json(text))


def load_function(text: str):
    """A polynomial, or a rational expression when the JSON has an ``op`` key."""
    data = load_json(text)
    if isinstance(data, dict) and "op" in data:
        return expr_from_dict(data)
    return RegPoly.from_dict(data)


def _quat_out(q: Quaternion) -> list:
    return [float(v) for v in q.to_list()]


def _need(args, name):
    value = getattr(args, name)
    if value is None:
        raise ParseError(f"--{name} is required for '{args.verb}'")
    return value


def _at(args, default: Optional[str] = None) -> Quaternion:
    text = args.at if args.at is not None else default
    if text is None:
        raise ParseError(f"--at is required for '{args.verb}'")
    return parse_quaternion(text)


def _grid(args, points: int) -> GridSpec:
    return GridSpec(
        center=_at(args, "0"),
        radius=args.radius if args.radius is not None else 1.0,
        points=args.grid if args.grid is not None else points,
    )


def _evaluate(args):
    fun = load_function(_need(args, "poly"))
    return _quat_out(Quaternion.coerce(fun(_at(args))))


def _mul(args):
    return star_mul(load_poly(_need(args, "left")), load_poly(_need(args, "right"))).to_dict()


def _conj(args):
    return regular_conjugate(load_poly(_need(args, "poly"))).to_dict()


def _symm(args):
    return symmetrization(load_poly(_need(args, "poly"))).to_dict()


def _recip(args):
    return _quat_out(reciprocal_eval(load_poly(_need(args, "poly")), _at(args)))


def _tf(args):
    return _quat_out(transform_Tf(load_poly(_need(args, "poly")), _at(args)))


def _zeros(args):
    f = load_poly(_need(args, "poly"))
    kwargs = {} if args.tol is None else {"tol": args.tol}
    return zeros_to_dict(find_zeros(f, **kwargs))


def _check_regular(args):
    fun = load_function(_need(args, "poly"))
    kwargs = {"seed": args.seed}
    if args.tol is not None:
        kwargs["tol"] = args.tol
    return check_regular(fun, _grid(args, 7), **kwargs).to_dict()


def _probe(args):
    fun = load_function(_need(args, "poly"))
    if args.kind == "open":
        kwargs = {"seed": args.seed}
        if args.radius is not None:
            kwargs["r"] = args.radius
        if args.grid is not None:
            kwargs["points"] = args.grid
        if args.tol is not None:
            kwargs["tol"] = args.tol
        return open_mapping_probe(fun, _at(args), **kwargs).to_dict()
    region = _grid(args, 15)
    if args.kind == "max":
        return max_modulus_probe(fun, region).to_dict()
    if not isinstance(fun, RegPoly):
        raise ParseError("the min probe needs a polynomial (its zeros are computed exactly)")
    kwargs = {} if args.tol is None else {"zero_tol": args.tol}
    return min_modulus_probe(fun, region, **kwargs).to_dict()


def _counterexample(args):
    return counterexample_probe(seed=args.seed).to_dict()


VERBS = {
    "eval": (_evaluate, "evaluate a polynomial or rational expression at --at"),
    "mul": (_mul, "regular product of --left and --right"),
    "conj": (_conj, "regular conjugate of --poly"),
    "symm": (_symm, "symmetrization of --poly"),
    "recip-eval": (_recip, "regular reciprocal of --poly evaluated at --at"),
    "tf": (_tf, "the transform T_f of --poly applied to --at"),
    "zeros": (_zeros, "zero set of --poly"),
    "check-regular": (_check_regular, "finite-difference regularity check of --poly near --at"),
    "probe": (_probe, "modulus (max|min) or open-mapping probe of --poly"),
    "counterexample": (_counterexample, "non-openness evidence for q^-2 + 1"),
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="slicereg",
        description="Slice-regular quaternionic polynomials: algebra, zeros and verification probes.",
        epilog="Polynomials are JSON {\"coeffs\": [[w,x,y,z], ...]} (ascending degree), given inline, "
        "as @file or as a file path. Quaternion literals look like 1-2i+0.5k.",
    )
    sub = parser.add_subparsers(dest="verb", metavar="VERB", required=True)
    for verb, (_, help_text) in VERBS.items():
        p = sub.add_parser(verb, help=help_text, description=help_text)
        p.add_argument("--poly", help="polynomial or expression JSON, @file or path")
        p.add_argument("--left", help="left factor (mul)")
        p.add_argument("--right", help="right factor (mul)")
        p.add_argument("--at", help="quaternion literal: evaluation point, grid centre or q0")
        p.add_argument("--tol", type=float, help="tolerance override")
        p.add_argument("--grid", type=int, help="points per grid axis (default 15; 7 for check-regular; 11 for open)")
        p.add_argument("--radius", type=float, help="grid half-width or ball radius (default 1; 0.3 for open)")
        p.add_argument("--seed", type=int, default=0, help="random seed (default 0)")
        p.add_argument("--out", help="also write the JSON result to this file")
        if verb == "probe":
            p.add_argument("--kind", choices=("max", "min", "open"), required=True, help="which principle to probe")
    return parser


def _glue_literals(argv: Sequence[str]) -> list:
    # argparse reads "--at -i" as a missing value followed by an option
    out, it = [], iter(argv)
    for tok in it:
        if tok == "--at":
            nxt = next(it, None)
            out.append(tok if nxt is None else f"--at={nxt}")
        else:
            out.append(tok)
    return out


def run(argv: Optional[Sequence[str]] = None, stdout=None, stderr=None) -> int:
    stdout = sys.stdout if stdout is None else stdout
    stderr = sys.stderr if stderr is None else stderr
    argv = sys.argv[1:] if argv is None else argv
    parser = build_parser()
    try:
        args = parser.parse_args(_glue_literals(argv))
    except SystemExit as exc:
        return EXIT_OK if exc.code in (0, None) else EXIT_USAGE
    handler = VERBS[args.verb][0]
    try:
        result = handler(args)
    except (ParseError, ValueError) as exc:
        if isinstance(exc, DomainError):
            print(f"slicereg: domain error: {exc}", file=stderr)
            return EXIT_DOMAIN
        print(f"slicereg: {exc}", file=stderr)
        return EXIT_USAGE
    except InconsistencyError as exc:
        print(f"slicereg: numerical inconsistency: {exc}", file=stderr)
        return EXIT_INTERNAL
    text = json.dumps(result)
    print(text, file=stdout)
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text + os.linesep)
    return EXIT_OK


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
