"""Command-line front end for Monte-Carlo campaigns and figure-data export.

Exit codes: 0 success, 1 configuration error, 2 runtime error.
"""

from __future__ import annotations

import argparse
import os
import sys
from pathlib import Path

from .campaign import (CampaignConfig, ConfigError, FIGURE_LAYOUTS, MissingAxisError,
                       RESULT_COLUMNS, TRAFFIC_COLUMNS, emit_figure_data, run_campaign,
                       run_traffic_profile, write_manifest, write_rows_csv,
                       write_rows_json)

DESK_SCALE = (50, 10)     # drops x fading used when nothing else is requested
FULL_SCALE = (500, 50)


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="compbss",
        description="Downlink BSS-with-CoMP simulator: sweep campaigns and "
                    "figure-data export.",
    )
    p.add_argument("--config", metavar="PATH", help="campaign config file (YAML/JSON)")
    p.add_argument("--figure", metavar="TAG", choices=sorted(FIGURE_LAYOUTS),
                   help="also emit the data behind one figure tag")
    p.add_argument("--seed", type=int, metavar="N", help="master seed override")
    p.add_argument("--drops", type=int, metavar="N", help="user-location realizations")
    p.add_argument("--fading", type=int, metavar="N",
                   help="fading realizations per drop")
    p.add_argument("--out", metavar="PATH", help="output path for the tidy results")
    p.add_argument("--format", choices=("csv", "json"), help="result format")
    p.add_argument("--patterns", metavar="PATH", help="BSS pattern list file")
    p.add_argument("--comp", metavar="NAME|PATH",
                   help="CoMP configuration: C1, C2, C3, none, or a file path")
    p.add_argument("--full-scale", action="store_true",
                   help=f"use the full campaign scale "
                        f"({FULL_SCALE[0]} drops x {FULL_SCALE[1]} fading)")
    p.add_argument("--jobs", type=int, default=1, metavar="N",
                   help="parallel worker processes (default 1)")
    return p


def _resolve_config(args) -> CampaignConfig:
    if args.config:
        cfg = CampaignConfig.from_file(args.config)
    else:
        cfg = CampaignConfig(n_drops=DESK_SCALE[0], n_fading=DESK_SCALE[1])
    if args.full_scale:
        cfg.n_drops, cfg.n_fading = FULL_SCALE
    if args.drops is not None:
        cfg.n_drops = args.drops
    if args.fading is not None:
        cfg.n_fading = args.fading
    if args.seed is not None:
        cfg.master_seed = args.seed
    if args.out is not None:
        cfg.output = args.out
    if args.format is not None:
        cfg.format = args.format
    if args.patterns is not None:
        cfg.pattern_file = args.patterns
    if args.comp is not None:
        cfg.comp_configs = [args.comp]
    if cfg.n_drops < 1 or cfg.n_fading < 1:
        raise ConfigError("n_drops and n_fading must be >= 1")
    return cfg


def _check_writable(path: Path) -> None:
    parent = path.parent if path.parent != Path("") else Path(".")
    try:
        parent.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise ConfigError(f"output location {path} is not writable: {exc}") from exc
    if not os.access(parent, os.W_OK):
        raise ConfigError(f"output location {path} is not writable")


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = _resolve_config(args)
        out = Path(cfg.output)
        _check_writable(out)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 1

    try:
        traffic_mode = args.figure == "fig11" or (cfg.traffic_profile and not args.figure)
        if traffic_mode:
            result = run_traffic_profile(cfg)
            columns = TRAFFIC_COLUMNS
        else:
            result = run_campaign(cfg, jobs=args.jobs)
            columns = RESULT_COLUMNS
        if cfg.format == "json":
            write_rows_json(result.rows, out)
        else:
            write_rows_csv(result.rows, columns, out)
        write_manifest(result.manifest, out.with_name(out.stem + "_manifest.json"))
        print(f"wrote {len(result.rows)} rows to {out}")
        if args.figure:
            fig_cols, fig_rows = emit_figure_data(result.rows, args.figure)
            fig_path = out.with_name(f"{out.stem}_{args.figure}.csv")
            write_rows_csv(fig_rows, fig_cols, fig_path)
            print(f"wrote {len(fig_rows)} rows to {fig_path}")
        return 0
    except (ConfigError, MissingAxisError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 1
    except Exception as exc:  # noqa: BLE001 - CLI boundary
        print(f"runtime error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
