"""Command-line entry point: ``specmi {solve,compare,gibbs,analytic} CONFIG``.

Exit codes: 0 success, 1 numeric failure, 2 configuration error,
3 non-convergence when ``--strict`` is given.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .config import load_config
from .errors import InvalidInputError, NumericFailure
from .harness import run_analytic, run_compare, run_gibbs, run_single

EXIT_OK, EXIT_NUMERIC, EXIT_CONFIG, EXIT_NOCONV = 0, 1, 2, 3


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="specmi", description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="command", required=True)
    for name, text in (("solve", "run one solver configuration"),
                       ("compare", "run every algorithm listed in [compare]"),
                       ("gibbs", "truncated-series error study (1D)"),
                       ("analytic", "dump closed-form reference curves (1D)")):
        p = sub.add_parser(name, help=text)
        p.add_argument("config", help="INI configuration file")
        p.add_argument("--out", default="out", help="output directory (default: out)")
        if name in ("solve", "compare"):
            p.add_argument("--strict", action="store_true",
                           help="exit with status 3 when a solve does not converge")
            p.add_argument("--timing", action="store_true",
                           help="add wall-clock columns (outputs are then not byte-stable)")
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    out = Path(args.out)
    try:
        cfg = load_config(args.config)
        if args.command == "solve":
            res = run_single(cfg, out, args.timing)
            print(f"iterations={res.iterations} converged={res.converged} "
                  f"residual={float(res.history[-1])!r}")
            if args.strict and not res.converged:
                return EXIT_NOCONV
        elif args.command == "compare":
            rows = run_compare(cfg, out, args.timing)
            for row in rows:
                print(f"{row[0]}: iterations={row[1]} status={row[2]}")
            if args.strict and any(r[2] != "converged" for r in rows):
                return EXIT_NOCONV if all(r[2] != "numeric-failure" for r in rows) else EXIT_NUMERIC
        elif args.command == "gibbs":
            for s in run_gibbs(cfg, out):
                print(f"m={s.m} overshoot={s.overshoot!r} max_error={s.max_error!r}")
        else:
            run_analytic(cfg, out)
    except NumericFailure as exc:
        print(f"numeric failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except InvalidInputError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
