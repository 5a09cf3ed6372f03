"""Command-line entry point: ``approxgroups gen | run | verify``.

Exit codes: 0 success, 1 verification failure, 2 precondition violation,
3 growth cap exceeded, 4 unparseable input.
"""

from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction

from . import families
from .commands import COMMANDS, Options, dumps, run_command
from .errors import CapExceeded, ParseError, PreconditionError
from .matrix import decode_matrix
from .sets import DEFAULT_CAP, GroupSet, decode_groupset, encode_groupset
from .verify import Failed, verify_text

EXIT_OK, EXIT_VERIFY, EXIT_PRECONDITION, EXIT_CAP, EXIT_PARSE = 0, 1, 2, 3, 4


def _rational(text: str) -> Fraction:
    try:
        q = Fraction(text)
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"not a rational: {text!r}") from None
    if q <= 0:
        raise argparse.ArgumentTypeError("must be positive")
    return q


def _positive(text: str) -> int:
    v = int(text)
    if v <= 0:
        raise argparse.ArgumentTypeError("must be positive")
    return v


def _common(p: argparse.ArgumentParser):
    p.add_argument("--cap", type=_positive, default=DEFAULT_CAP, help="element budget for any computed set")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--format", choices=["json"], default="json")
    p.add_argument("-o", "--output", help="write to this file instead of stdout")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="approxgroups", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="action", required=True)

    g = sub.add_parser("gen", help="write a test-family GroupSet as JSON")
    g.add_argument("family", choices=sorted(families.FAMILIES))
    g.add_argument("--radius", type=int, default=1)
    g.add_argument("--n", type=int, default=None)
    g.add_argument("--base", default="2")
    g.add_argument("-L", "--length", type=int, default=1)
    g.add_argument("--order", type=int, default=4)
    g.add_argument("--size", type=int, default=10)
    g.add_argument("--pool", default=",".join(families.DEFAULT_POOL), help="comma-separated scalars, e.g. 0,1,-1,1/2,i")
    g.add_argument("--unipotent", action="store_true", help="random family: ones on the diagonal")
    g.add_argument("--spec", help="ordered-progression spec file")
    _common(g)

    r = sub.add_parser("run", help="run one operation and print a JSON report")
    r.add_argument("command", choices=COMMANDS)
    r.add_argument("inputs", nargs="*", help="GroupSet JSON files ('-' for stdin)")
    r.add_argument("--gamma", type=_rational, default=Fraction(4))
    r.add_argument("--nil-cutoff", type=_positive, default=None)
    r.add_argument("--verify-corner", action="store_true", help="also probe B^N n H and the sum-product statistic")
    r.add_argument("--corner-n", type=_positive, default=None, help="override N for the corner probe")
    r.add_argument("--max-power", type=_positive, default=None)
    r.add_argument("--hom", default="pi", choices=["pi", "pi_prime"])
    r.add_argument("--subgroup", default="corner")
    r.add_argument("--cutoff", type=_positive, default=None)
    r.add_argument("--radius", type=int, default=1)
    r.add_argument("--label", default="diagonal", help="subgroup whose cosets label the classes (reduce)")
    r.add_argument("--U", dest="U", help="sumproduct: comma-separated scalars")
    r.add_argument("--V", dest="V")
    r.add_argument("--W", dest="W")
    _common(r)

    v = sub.add_parser("verify", help="re-check a report")
    v.add_argument("report", help="report JSON file ('-' for stdin)")
    return parser


def _read(path: str) -> str:
    if path == "-":
        return sys.stdin.read()
    try:
        with open(path, encoding="utf-8") as fh:
            return fh.read()
    except OSError as exc:
        raise ParseError(f"cannot read {path}: {exc}") from exc


def _load_set(path: str) -> GroupSet:
    try:
        obj = json.loads(_read(path))
    except ValueError as exc:
        raise ParseError(f"{path}: not JSON ({exc})") from exc
    if isinstance(obj, dict) and "rows" in obj and "elements" not in obj:
        m = decode_matrix(obj)
        return GroupSet([m])
    return decode_groupset(obj)


def _emit(text: str, path: str | None):
    if path:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _gen(args) -> str:
    name = args.family
    if name == "heisenberg-ball":
        A = families.heisenberg_ball(args.radius, args.cap)
    elif name == "unitriangular-ball":
        A = families.unitriangular_ball(args.n or 3, args.radius, args.cap)
    elif name == "diag-progression":
        A = families.diag_progression(families.parse_scalar(args.base), args.length, args.n or 2)
    elif name == "corner-progression":
        A = families.corner_progression(args.length, args.n or 3)
    elif name == "dihedral":
        A = families.dihedral(args.length)
    elif name == "torsion-diag":
        A = families.torsion_diag(args.order, args.n or 2)
    elif name == "ordered-progression":
        if not args.spec:
            raise PreconditionError("ordered-progression needs --spec")
        try:
            spec = json.loads(_read(args.spec))
        except ValueError as exc:
            raise ParseError(f"{args.spec}: not JSON ({exc})") from exc
        A = families.progression_from_spec(spec, args.cap)
    else:
        A = families.random_upper_triangular(args.n or 3, args.size, families.parse_pool(args.pool), args.seed, args.unipotent)
    return dumps(encode_groupset(A))


def _run(args) -> str:
    sets = [_load_set(p) for p in args.inputs]
    scalars = {}
    for key in ("U", "V", "W"):
        val = getattr(args, key)
        if val:
            scalars[key] = families.parse_pool(val)
    opts = Options(
        cap=args.cap,
        gamma=args.gamma,
        nil_cutoff=args.nil_cutoff,
        seed=args.seed,
        verify_corner=args.verify_corner,
        corner_n=args.corner_n,
        max_power=args.max_power,
        hom=args.hom,
        subgroup=args.subgroup,
        cutoff=args.cutoff,
        radius=args.radius,
        label=args.label,
        scalars=scalars,
    )
    return dumps(run_command(args.command, sets, opts))


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.action == "gen":
            _emit(_gen(args), args.output)
        elif args.action == "run":
            _emit(_run(args), args.output)
        else:
            try:
                passed = verify_text(_read(args.report))
            except Failed as exc:
                sys.stdout.write(dumps({"status": "fail", "check": exc.check, "detail": exc.detail}))
                print(f"verification failed at {exc.check}: {exc.detail}", file=sys.stderr)
                return EXIT_VERIFY
            sys.stdout.write(dumps({"status": "pass", "checks": len(passed)}))
        return EXIT_OK
    except CapExceeded as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CAP
    except ParseError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except PreconditionError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PRECONDITION


if __name__ == "__main__":
    sys.exit(main())
