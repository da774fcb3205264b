"""Command-line interface.

Three subcommands:

  gen     write a synthetic interval series as t,lower,upper CSV
  orders  print acf/pacf values and the selected lag orders for a CSV
  run     execute the full experiment from a JSON config

Exit codes: 0 success, 1 runtime failure, 2 usage/config error.
Every output file embeds the seed, config hash, and tool version, and
reruns with the same config and seed are byte-identical.
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import json
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .config import ConfigError, config_hash, config_to_dict, load_config
from .dgp import DGP_KINDS, DgpSpec, generate_dgp
from .errors import IntervalcastError
from .fen import save_model
from .lags import acf, pacf, select_order
from .pipeline import report_rows, report_to_dict, run_experiment
from .series import from_center_range, load_csv, to_center_range, write_csv


def _hash_args(*parts) -> str:
    return hashlib.sha256(repr(parts).encode()).hexdigest()


def cmd_gen(args) -> int:
    spec = DgpSpec(
        kind=args.dgp, length=args.length, seed=args.seed, noise_std=args.noise_std
    )
    series = from_center_range(generate_dgp(spec))
    header = {
        "seed": spec.seed,
        "config_hash": _hash_args("gen", spec.kind, spec.length, spec.seed, spec.noise_std),
        "version": __version__,
    }
    write_csv(args.out, series, header_comments=header)
    print(f"wrote {spec.length} rows to {args.out}")
    return 0


def cmd_orders(args) -> int:
    series = to_center_range(load_csv(args.input, schema=args.schema))
    pins = (None, None)
    if args.pin:
        try:
            pins = tuple(int(v) for v in args.pin.split(","))
            if len(pins) != 2:
                raise ValueError
        except ValueError:
            print(f"error: --pin expects 'center,range', got {args.pin!r}", file=sys.stderr)
            return 2

    result = {}
    for name, x, pin in (("center", series.center, pins[0]), ("range", series.range, pins[1])):
        result[name] = {
            "acf": acf(x, args.max_lag).tolist(),
            "pacf": pacf(x, args.max_lag).tolist(),
            "order": select_order(x, args.max_lag, pin=pin),
            "pinned": pin is not None,
        }

    if args.json:
        print(json.dumps({"meta": {"version": __version__}, "series": result}, indent=2))
    else:
        band = 1.96 / np.sqrt(len(series))
        print(f"significance band: +-{band:.4f}")
        print(f"{'lag':>4} {'acf(c)':>9} {'pacf(c)':>9} {'acf(r)':>9} {'pacf(r)':>9}")
        for k in range(args.max_lag + 1):
            print(
                f"{k:>4} {result['center']['acf'][k]:>9.4f} {result['center']['pacf'][k]:>9.4f}"
                f" {result['range']['acf'][k]:>9.4f} {result['range']['pacf'][k]:>9.4f}"
            )
        for name in ("center", "range"):
            tag = "pinned" if result[name]["pinned"] else "selected"
            print(f"{name} order ({tag}): {result[name]['order']}")

    if args.emit_plot_data:
        with open(args.emit_plot_data, "w", newline="") as fh:
            fh.write(f"# version={__version__}\n")
            writer = csv.writer(fh)
            writer.writerow(["series", "lag", "acf", "pacf"])
            for name in ("center", "range"):
                for k in range(args.max_lag + 1):
                    writer.writerow([
                        name, k,
                        f"{result[name]['acf'][k]:.17g}",
                        f"{result[name]['pacf'][k]:.17g}",
                    ])
        print(f"wrote plot data to {args.emit_plot_data}")
    return 0


def _grid_summary(cfg) -> str:
    lines = [
        f"data: {config_to_dict(cfg)['data']}",
        f"orders: center={cfg.orders.center or 'auto'} range={cfg.orders.range or 'auto'}"
        f" (max_lag={cfg.orders.max_lag})",
        f"fen sweep: depths {list(cfg.depths)} x segment lengths {list(cfg.segment_lengths)}"
        f" = {len(cfg.depths) * len(cfg.segment_lengths)} candidates",
        f"representations: raw + {[m.name.lower() for m in cfg.imaging_methods]}",
        f"regressors: {[r.kind for r in cfg.regressors]}",
        f"prediction split: {cfg.prediction_split} (leak_free={cfg.leak_free})",
        f"seed: {cfg.seed}  config_hash: {config_hash(cfg)}",
    ]
    return "\n".join(lines)


def cmd_run(args) -> int:
    try:
        cfg = load_config(args.config)
    except ConfigError as e:
        print(f"error: config: {e}", file=sys.stderr)
        return 2
    if args.jobs is not None:
        from dataclasses import replace
        cfg = replace(cfg, jobs=args.jobs)

    print(_grid_summary(cfg))
    if args.dry_run:
        return 0

    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)

    stage = "experiment"
    try:
        report, model = run_experiment(cfg)
        stage = "report emission"
        with open(out_dir / "report.json", "w") as fh:
            json.dump(report_to_dict(report), fh, indent=2)
            fh.write("\n")
        with open(out_dir / "report.csv", "w", newline="") as fh:
            fh.write(f"# seed={cfg.seed}\n")
            fh.write(f"# config_hash={config_hash(cfg)}\n")
            fh.write(f"# version={__version__}\n")
            csv.writer(fh).writerows(report_rows(report))
        save_model(
            model,
            out_dir / "fen_model.json",
            meta={"seed": cfg.seed, "config_hash": config_hash(cfg), "version": __version__},
        )
    except IntervalcastError as e:
        print(f"error: {stage} failed: {type(e).__name__}: {e}", file=sys.stderr)
        return 1

    sel = report.fen_selection
    print(
        f"\nselected fen: depth={sel.chosen_depth} delta={sel.chosen_delta}"
        f" best_epoch={sel.chosen_best_epoch}"
        f" accuracy={sel.chosen().report.best_accuracy:.3f}"
    )
    print(f"orders: center={report.orders['center']} range={report.orders['range']}\n")
    rows = report_rows(report)
    widths = [max(len(str(r[i])) for r in rows) for i in (0, 1)]
    print(f"{'regressor':<{widths[0]}} {'method':<{widths[1]}} "
          f"{'mse_c':>10} {'mse_r':>10} {'mae_c':>10} {'mae_r':>10} {'mde':>10}")
    for row in rows[1:]:
        def short(v):
            return f"{float(v):.4f}" if v else "-"
        print(f"{row[0]:<{widths[0]}} {row[1]:<{widths[1]}} "
              f"{short(row[2]):>10} {short(row[3]):>10} {short(row[4]):>10}"
              f" {short(row[5]):>10} {short(row[10]):>10}")
    print(f"\nwrote report.json, report.csv, fen_model.json to {out_dir}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="intervalcast",
        description="Interval-valued time-series prediction via imaging and feature extraction.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p_gen = sub.add_parser("gen", help="generate a synthetic interval series CSV")
    p_gen.add_argument("--dgp", required=True, choices=DGP_KINDS, help="generator kind")
    p_gen.add_argument("--length", type=int, default=1500)
    p_gen.add_argument("--seed", type=int, default=0)
    p_gen.add_argument("--noise-std", type=float, default=1.0)
    p_gen.add_argument("--out", required=True, help="output CSV path")
    p_gen.set_defaults(func=cmd_gen)

    p_orders = sub.add_parser("orders", help="acf/pacf analysis and order selection")
    p_orders.add_argument("--input", required=True, help="input CSV path")
    p_orders.add_argument("--schema", choices=("bounds", "ohlc"), default="bounds")
    p_orders.add_argument("--max-lag", type=int, default=20)
    p_orders.add_argument("--pin", help="override as 'center,range' (e.g. 35,35)")
    p_orders.add_argument("--emit-plot-data", help="write lag/acf/pacf CSV for plotting")
    p_orders.add_argument("--json", action="store_true", help="machine-readable output")
    p_orders.set_defaults(func=cmd_orders)

    p_run = sub.add_parser("run", help="run the full experiment from a JSON config")
    p_run.add_argument("--config", required=True, help="JSON config path")
    p_run.add_argument("--out", default=".", help="output directory")
    p_run.add_argument("--dry-run", action="store_true", help="validate config and print the grid")
    p_run.add_argument("--jobs", type=int, default=None, help="max concurrent sweep cells")
    p_run.set_defaults(func=cmd_run)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except IntervalcastError as e:
        print(f"error: {type(e).__name__}: {e}", file=sys.stderr)
        return 1
    except OSError as e:
        print(f"error: {e}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
