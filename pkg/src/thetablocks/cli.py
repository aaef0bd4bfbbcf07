"""Command-line entry point: lattice data, verification campaigns, expansions and Hecke images.

Exit codes: 0 all checks pass, 1 a check failed, 2 usage error, 3 precision exhausted.
"""

from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction

from .blocks import LATTICE_BLOCKS, build_block, lattice_block, parse_block
from .campaigns import CAMPAIGNS, run_campaign
from .hecke import apply_T_minus
from .lattice import load_lattice
from .qseries import FourierSeries, PrecisionError

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_PRECISION = 0, 1, 2, 3


def _fraction(text: str) -> Fraction:
    try:
        value = Fraction(text)
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"expected N or N/D, got {text!r}") from None
    if value <= 0:
        raise argparse.ArgumentTypeError("precision must be positive")
    return value


def _dump(doc, path: str | None):
    text = json.dumps(doc, indent=2, sort_keys=True) + "\n"
    if path in (None, "-"):
        sys.stdout.write(text)
    else:
        with open(path, "w") as fh:
            fh.write(text)


def cmd_lattice_info(args) -> int:
    lat = load_lattice(args.lattice)
    disc = lat.discriminant_group
    doc = {
        "lattice": lat.to_json(),
        "rank": lat.rank,
        "determinant": lat.determinant,
        "level": lat.level,
        "invariant_factors": list(disc.invariant_factors),
        "census": [{"norm_mod2": str(n), "order": o, "classes": c} for (n, o), c in lat.census_table().items()],
    }
    if args.json:
        _dump(doc, args.json)
    else:
        print(f"lattice            {doc['lattice']}")
        print(f"rank               {lat.rank}")
        print(f"determinant        {lat.determinant}")
        print(f"level              {lat.level}")
        print(f"invariant factors  {' '.join(map(str, disc.invariant_factors)) or '-'}")
        print("census (norm mod 2, order): classes")
        for row in doc["census"]:
            print(f"  {row['norm_mod2']:>5}  {row['order']:>3}: {row['classes']}")
    return EXIT_OK


def cmd_verify(args) -> int:
    report = run_campaign(args.campaign, args.qprec, args.fj_order, args.grid_bound)
    for c in report.checks:
        line = f"[{c.status:>7}] {c.description}"
        print(line + (f"  ({c.detail})" if c.detail else ""))
    print(f"{report.campaign}: {report.status} ({len(report.checks)} checks, {report.wall_time:.1f}s)")
    if args.json:
        _dump(report.to_json(), args.json)
    return report.exit_code


def _expand_spec(text: str, qprec) -> FourierSeries:
    name = text.strip()
    if name in LATTICE_BLOCKS:
        return lattice_block(name, qprec)
    return build_block(parse_block(text), qprec)


def cmd_expand(args) -> int:
    series = _expand_spec(args.spec, args.qprec)
    _dump(series.to_json(), args.out or args.json)
    return EXIT_OK


def cmd_hecke(args) -> int:
    with open(args.series) as fh:
        series = FourierSeries.from_json(json.load(fh))
    weight = args.weight if args.weight is not None else series.weight
    if weight is None:
        raise ValueError("series carries no weight; pass --weight")
    _dump(apply_T_minus(series, args.m, weight).to_json(), args.out or args.json)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="thetablocks", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("lattice-info", help="determinant, level, discriminant group and census")
    s.add_argument("lattice", nargs="?", help="name (L4, L6, A1, ...), JSON Gram matrix or file")
    s.add_argument("--lattice", dest="lattice_opt", help="same as the positional argument")
    s.add_argument("--json", help="write the report as JSON to this path ('-' for stdout)")
    s.set_defaults(func=cmd_lattice_info)

    s = sub.add_parser("verify", help="run a verification campaign")
    s.add_argument("campaign", choices=sorted(CAMPAIGNS))
    s.add_argument("--qprec", type=_fraction, help="q-precision N or N/D")
    s.add_argument("--fj-order", type=int, help="Fourier-Jacobi order beyond the leading one")
    s.add_argument("--grid-bound", type=int, help="parameter box bound for family campaigns")
    s.add_argument("--json", help="write the report as JSON to this path")
    s.set_defaults(func=cmd_verify)

    s = sub.add_parser("expand", help="expand a theta block to JSON")
    s.add_argument("spec", help="e.g. 'eta^-6 th(1)^3 th(2)^2 th(3)^2 th(4) th(5) th(8)' or 'thetaL4'")
    s.add_argument("--qprec", type=_fraction, default=Fraction(8))
    s.add_argument("--out", "-o", help="output file (default stdout)")
    s.add_argument("--json", help="alias for --out")
    s.set_defaults(func=cmd_expand)

    s = sub.add_parser("hecke", help="apply T_-(m) to a serialized series")
    s.add_argument("series", help="JSON series file")
    s.add_argument("--m", type=int, required=True)
    s.add_argument("--weight", type=_fraction)
    s.add_argument("--out", "-o")
    s.add_argument("--json", help="alias for --out")
    s.set_defaults(func=cmd_hecke)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.command == "lattice-info":
        args.lattice = args.lattice or args.lattice_opt
        if not args.lattice:
            parser.error("lattice-info needs a lattice")
    try:
        return args.func(args)
    except PrecisionError as exc:
        print(f"precision exhausted: {exc}", file=sys.stderr)
        return EXIT_PRECISION
    except (ValueError, KeyError, OSError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
