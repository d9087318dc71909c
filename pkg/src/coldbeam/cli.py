"""Command-line front end for scans, fits, and reports."""

from __future__ import annotations

import argparse
import csv
import json
import sys
from pathlib import Path

from coldbeam.config import default_config_text, load_config
from coldbeam.em_fields import scenario_names
from coldbeam.harness import fit_scaling, run_scan, summarize_run


def _cmd_run(args) -> int:
    cfg = load_config(args.config)
    if args.seed is not None:
        cfg.seed = args.seed
    if args.threads is not None:
        cfg.threads = args.threads
    out = args.out if args.out is not None else cfg.out
    manifest = run_scan(cfg, out_dir=out)
    sys.stdout.write(summarize_run(manifest))
    return 0 if manifest["all_passed"] else 1


def _cmd_fit(args) -> int:
    with open(args.table, newline="") as fh:
        rows = list(csv.DictReader(fh))
    fit = fit_scaling(rows, args.quantity, args.abscissa)
    sys.stdout.write(json.dumps(fit.as_dict(), indent=2, sort_keys=True) + "\n")
    return 0


def _cmd_report(args) -> int:
    manifest_path = Path(args.run_dir) / "manifest.json"
    if not manifest_path.exists():
        sys.stderr.write(f"no manifest in {args.run_dir}\n")
        return 2
    manifest = json.loads(manifest_path.read_text())
    sys.stdout.write(summarize_run(manifest))
    return 0 if manifest["all_passed"] else 1


def _cmd_list_scenarios(args) -> int:
    for name in scenario_names():
        sys.stdout.write(name + "\n")
    return 0


def _cmd_init(args) -> int:
    text = default_config_text(smoke=args.smoke)
    if args.path == "-":
        sys.stdout.write(text)
    else:
        Path(args.path).write_text(text)
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="coldbeam",
        description="Scaling laboratory for fiber-averaged beam dynamics",
    )
    sub = p.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="execute a configured scan")
    run.add_argument("config")
    run.add_argument("--out", default=None, help="output directory override")
    run.add_argument("--seed", type=int, default=None)
    run.add_argument("--threads", type=int, default=None)
    run.set_defaults(fn=_cmd_run)

    fit = sub.add_parser("fit", help="log-log fit of a table column")
    fit.add_argument("table")
    fit.add_argument("quantity")
    fit.add_argument("abscissa")
    fit.set_defaults(fn=_cmd_fit)

    rep = sub.add_parser("report", help="re-print the summary of a run")
    rep.add_argument("run_dir")
    rep.set_defaults(fn=_cmd_report)

    ls = sub.add_parser("list-scenarios", help="available field scenarios")
    ls.set_defaults(fn=_cmd_list_scenarios)

    init = sub.add_parser("init-config", help="write a reference config file")
    init.add_argument("path", nargs="?", default="-")
    init.add_argument("--smoke", action="store_true")
    init.set_defaults(fn=_cmd_init)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.fn(args)


if __name__ == "__main__":
    sys.exit(main())
