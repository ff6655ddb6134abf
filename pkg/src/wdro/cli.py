"""Command-line entry point: ``wdro run | verify | fetch-data``.

Exit codes: 0 on success, 1 when a verification property fails, 2 on a
configuration or I/O error.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
import time

from .exceptions import WdroError
from .experiment import ExperimentConfig, default_config, run_experiment
from .fetch import SOURCES, fetch_dataset
from .verify import SUITES, run_suite

EXIT_OK, EXIT_PROPERTY, EXIT_CONFIG = 0, 1, 2

log = logging.getLogger("wdro")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="wdro", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="run a poisoning sweep and write curve files")
    run.add_argument("--config", help="JSON experiment config; the built-in default sweep if omitted")
    run.add_argument("--wine", help="Wine Quality CSV for the default sweep (synthetic stand-in otherwise)")
    run.add_argument("--seed", type=int, help="master seed (overrides the config)")
    run.add_argument("--trials", type=int, help="trials per cell (overrides the config)")
    run.add_argument("--out", required=True, help="output directory")
    run.add_argument("--paper-literal-absolute", action="store_true",
                     help="use ||theta||_*^2 as the absolute-loss regularizer")
    run.add_argument("--jobs", type=int, default=1, help="parallel workers (results are identical)")

    ver = sub.add_parser("verify", help="run a seeded property suite")
    ver.add_argument("suite", choices=SUITES + ("all",))
    ver.add_argument("--seed", type=int, default=0)
    ver.add_argument("--trials", type=int, help="instances per property (suite default if omitted)")

    fetch = sub.add_parser("fetch-data", help="download a benchmark dataset and check its row count")
    fetch.add_argument("dataset", choices=sorted(SOURCES))
    fetch.add_argument("--out", default="data", help="destination directory")
    return parser


def _cmd_run(args) -> int:
    if args.config:
        with open(args.config, encoding="utf-8") as fh:
            raw = json.load(fh)
        if args.seed is not None:
            raw["seed"] = args.seed
        if args.trials is not None:
            raw["trials"] = args.trials
        if args.paper_literal_absolute:
            raw["paper_literal_absolute"] = True
        cfg = ExperimentConfig.from_dict(raw)
    else:
        cfg = default_config(args.wine, trials=args.trials or 5, seed=args.seed or 0)
        cfg.paper_literal_absolute = args.paper_literal_absolute
    start = time.perf_counter()
    points = run_experiment(cfg, args.out, jobs=args.jobs)
    log.info("%d curve points in %.1f s", len(points), time.perf_counter() - start)
    for p in points:
        print(f"beta={p.beta:<5g} {p.label:<32} mean test loss {p.mean_test_loss:.6g}")
    print(f"wrote {args.out}/curves.jsonl, curves.csv, manifest.json")
    return EXIT_OK


def _cmd_verify(args) -> int:
    names = SUITES if args.suite == "all" else (args.suite,)
    ok = True
    for name in names:
        start = time.perf_counter()
        results = run_suite(name, args.seed, args.trials)
        print(f"[{name}] {time.perf_counter() - start:.1f} s")
        for r in results:
            print("  " + r.line())
            ok &= r.passed
    return EXIT_OK if ok else EXIT_PROPERTY


def _cmd_fetch(args) -> int:
    path = fetch_dataset(args.dataset, args.out)
    print(f"wrote {path}")
    return EXIT_OK


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    handler = {"run": _cmd_run, "verify": _cmd_verify, "fetch-data": _cmd_fetch}[args.command]
    try:
        return handler(args)
    except (WdroError, OSError, ValueError, KeyError, TypeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
