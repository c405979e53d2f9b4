"""Command line interface: run, metrics, compare, serve."""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .eventlog import read_log
from .metrics import compute_metrics
from .reasoning import backend_from_env
from .report import compare_figures, metrics_figures, render_table, write_csv
from .runner import compare, run_scenario


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(
        prog="sosim",
        description="Holonic system-of-systems mobility simulator")
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="run a scenario to its horizon")
    p_run.add_argument("--scenario", required=True, help="scenario JSON file")
    p_run.add_argument("--seed", type=int, default=None, help="override the scenario seed")
    p_run.add_argument("--out", default=None, help="write the event log here (ndjson)")
    p_run.add_argument("--coordinator", default="holonic",
                       choices=["holonic", "centralized"])
    p_run.add_argument("--format", default="table", choices=["json", "table"])

    p_metrics = sub.add_parser("metrics", help="compute metrics from an event log")
    p_metrics.add_argument("log", help="event log file (ndjson)")
    p_metrics.add_argument("--format", default="table", choices=["json", "table"])
    p_metrics.add_argument("--plots", default=None,
                           help="also render figures into this directory")

    p_cmp = sub.add_parser("compare", help="run scenarios under multiple coordinators")
    p_cmp.add_argument("--scenario", required=True, nargs="+",
                       help="one or more scenario JSON files")
    p_cmp.add_argument("--coordinators", default="holonic,centralized",
                       help="comma-separated coordinator list")
    p_cmp.add_argument("--out-dir", default=None,
                       help="write comparison.csv and figures here")

    p_serve = sub.add_parser("serve", help="serve a live simulation over HTTP/WS")
    p_serve.add_argument("--scenario", required=True)
    p_serve.add_argument("--port", type=int, default=8000)
    p_serve.add_argument("--host", default="127.0.0.1")
    p_serve.add_argument("--tick-rate", type=float, default=None,
                         help="ticks per wall-clock second (default 10)")
    p_serve.add_argument("--coordinator", default="holonic",
                         choices=["holonic", "centralized"])

    args = parser.parse_args(argv)
    if args.command == "run":
        return _cmd_run(args)
    if args.command == "metrics":
        return _cmd_metrics(args)
    if args.command == "compare":
        return _cmd_compare(args)
    if args.command == "serve":
        return _cmd_serve(args)
    return 2


def _print_metrics(doc: dict, fmt: str) -> None:
    if fmt == "json":
        print(json.dumps(doc, indent=2, sort_keys=True))
    else:
        row = {k: v for k, v in doc.items() if not isinstance(v, dict)}
        print(render_table([row]))


def _cmd_run(args: argparse.Namespace) -> int:
    result = run_scenario(args.scenario, coordinator=args.coordinator,
                          backend=backend_from_env(), seed=args.seed)
    if args.out:
        result.write(args.out)
        print(f"wrote {len(result.records)} records to {args.out}", file=sys.stderr)
    _print_metrics(result.metrics.to_dict(), args.format)
    return 0


def _cmd_metrics(args: argparse.Namespace) -> int:
    records = read_log(args.log)
    doc = compute_metrics(records).to_dict()
    _print_metrics(doc, args.format)
    if args.plots:
        for path in metrics_figures(doc, args.plots, prefix=Path(args.log).stem):
            print(f"wrote {path}", file=sys.stderr)
    return 0


def _cmd_compare(args: argparse.Namespace) -> int:
    coordinators = [c.strip() for c in args.coordinators.split(",") if c.strip()]
    rows = compare(list(args.scenario), coordinators=coordinators,
                   backend=backend_from_env())
    print(render_table(rows))
    if args.out_dir:
        csv_path = write_csv(rows, Path(args.out_dir) / "comparison.csv")
        print(f"wrote {csv_path}", file=sys.stderr)
        for path in compare_figures(rows, args.out_dir):
            print(f"wrote {path}", file=sys.stderr)
    return 0


def _cmd_serve(args: argparse.Namespace) -> int:
    from .gateway import serve

    serve(args.scenario, port=args.port, host=args.host,
          coordinator=args.coordinator, tick_rate=args.tick_rate)
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
