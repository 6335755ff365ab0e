"""Command-line entry point: ``python -m riexact <subcommand> ...``."""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from fractions import Fraction
from typing import List, Optional

from . import harness
from .enclosure import default_tol, parse_fraction
from .exactfun import from_json


def _fractions(text: str) -> List[Fraction]:
    return [parse_fraction(x) for x in text.split(",") if x.strip()]


def _ints(text: str) -> List[int]:
    return [int(x) for x in text.split(",") if x.strip()]


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="riexact", description="Exact rearrangement-invariant norm experiments.")
    sub = ap.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--tol", type=parse_fraction, default=None,
                       help="enclosure tolerance (default from RIEXACT_TOL or 1e-9)")
        p.add_argument("--out", default=None, help="write the report here instead of stdout")
        p.add_argument("--format", choices=("json", "csv"), default="json")

    def spaces(p, defaults):
        for flag, d in zip(("--Q", "--q", "--R", "--r"), defaults):
            p.add_argument(flag, default=d)

    g = sub.add_parser("gn-check", help="dilation invariance of the GN ratio")
    spaces(g, ("2", "2", "6", "2"))
    g.add_argument("--witness", default="lan:1", help="lan:<alpha> or mount_filip:<n>")
    g.add_argument("--dilations", type=_fractions, default=[Fraction(1, 8), Fraction(1), Fraction(8)])
    g.add_argument("--Pprime", default=None)
    g.add_argument("--pprime", default=None)
    common(g)

    c = sub.add_parser("counterexample", help="Mount-Filip table at t = 2")
    c.add_argument("--n-list", type=_ints, default=[4, 10, 100])
    common(c)

    o = sub.add_parser("optimality", help="ratio sequence for refined witnesses")
    spaces(o, ("2", "2", "2", "2"))
    o.add_argument("--Pprime", default=None)
    o.add_argument("--pprime", default="1")
    o.add_argument("--n-list", type=_ints, default=[4, 8, 16, 32, 64])
    o.add_argument("--profile", default=None, help='JSON file {"g": step, "h": step}')
    common(o)

    p = sub.add_parser("properties", help="randomized operator invariants")
    p.add_argument("--seed", type=int, default=1)
    p.add_argument("--count", type=int, default=100)
    common(p)

    k = sub.add_parser("kalamajska", help="pointwise derivative bound constants")
    k.add_argument("--alphas", type=_fractions, default=[Fraction(1), Fraction(2), Fraction(4)])
    k.add_argument("--samples", type=int, default=64)
    common(k)
    return ap


def run(args) -> dict:
    tol = args.tol if args.tol is not None else default_tol()
    if args.command == "gn-check":
        return harness.cmd_gn_check(args.Q, args.q, args.R, args.r, witness=args.witness,
                                    dilations=args.dilations, Pprime=args.Pprime,
                                    pprime=args.pprime, tol=tol)
    if args.command == "counterexample":
        return harness.cmd_counterexample(args.n_list)
    if args.command == "optimality":
        g = h = None
        if args.profile:
            with open(args.profile) as fh:
                data = json.load(fh)
            g, h = from_json(data["g"]), from_json(data["h"])
        return harness.cmd_optimality(args.Q, args.q, args.R, args.r, Pprime=args.Pprime,
                                      pprime=args.pprime, n_list=args.n_list, g=g, h=h, tol=tol)
    if args.command == "properties":
        return harness.cmd_property_suite(args.seed, args.count)
    return harness.cmd_kalamajska(args.alphas, args.samples)


def _flatten(prefix: str, obj, out: dict) -> None:
    if isinstance(obj, dict):
        for k in sorted(obj):
            _flatten(f"{prefix}.{k}" if prefix else str(k), obj[k], out)
    elif isinstance(obj, list):
        out[prefix] = json.dumps(obj, sort_keys=True)
    else:
        out[prefix] = obj


def to_csv(report: dict) -> str:
    """One line per row (or per invariant for the property suite)."""
    if "rows" in report:
        rows = report["rows"]
    else:
        rows = [dict(name=k, **v) for k, v in sorted(report.get("invariants", {}).items())]
    flat = []
    for r in rows:
        d: dict = {}
        _flatten("", r, d)
        flat.append(d)
    cols = sorted({c for d in flat for c in d})
    buf = io.StringIO()
    w = csv.DictWriter(buf, fieldnames=cols, lineterminator="\n")
    w.writeheader()
    w.writerows(flat)
    return buf.getvalue()


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        report = run(args)
    except (ValueError, KeyError, OSError) as exc:
        print(f"riexact: error: {exc}", file=sys.stderr)
        return 2
    text = json.dumps(report, sort_keys=True, indent=2) + "\n" if args.format == "json" else to_csv(report)
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return 0 if report.get("ok") else 1


if __name__ == "__main__":
    sys.exit(main())
