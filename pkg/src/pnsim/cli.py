"""Command-line experiment runner.

Subcommands: run (single simulation), sweep (P x K x seed grid), compare
(proximity policy vs fixed-random baseline on identical environments).
Flag values beat config-file values beat built-in defaults.
"""

from __future__ import annotations

import argparse
import sys
from dataclasses import replace
from typing import Optional, Sequence

from .config import PRESETS, RunConfig, load_config_file, preset_config
from .experiment import compare, run_to_dir, sweep
from .netmodel import UniformOverride
from .pns import ConfigurationError, FixedRandomPolicy, ProposedPolicy


def _parse_uniform_network(text: str) -> UniformOverride:
    parts = text.split(",")
    if len(parts) != 2:
        raise ConfigurationError(
            f"--uniform-network expects LATENCY_MS,BANDWIDTH_BPS (got {text!r})")
    latency = int(parts[0])
    bandwidth = None if parts[1] in ("inf", "") else int(parts[1])
    return UniformOverride(latency, bandwidth)


def _parse_int_list(text: str) -> list[int]:
    return [int(v) for v in text.split(",") if v != ""]


def _parse_float_list(text: str) -> list[float]:
    return [float(v) for v in text.split(",") if v != ""]


def _add_common_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", metavar="FILE",
                        help="INI config file; flags given here still win")
    parser.add_argument("--preset", choices=sorted(PRESETS),
                        help="network profile binding nodes/interval/block size")
    parser.add_argument("--policy", choices=("proposed", "fixed-random"),
                        default="proposed", help="neighbor selection policy")
    parser.add_argument("--p", type=float, default=0.3,
                        help="score EWMA weight on the newest sample (proposed)")
    parser.add_argument("--k", type=int, default=1,
                        help="random outbound slots per reselection (proposed)")
    parser.add_argument("--reselect-every", type=int, default=10, metavar="BLOCKS",
                        help="blocks received between reselections (proposed)")
    parser.add_argument("--outbound", type=int, default=8, metavar="SLOTS",
                        help="outbound connections per node")
    parser.add_argument("--inbound-cap", type=int, default=None, metavar="N",
                        help="inbound connection cap (default 30 proposed / 125 fixed)")
    parser.add_argument("--blocks", type=int, default=1000,
                        help="stop after this many generated blocks")
    parser.add_argument("--seed", type=int, default=42)
    parser.add_argument("--nodes", type=int, default=None,
                        help="node count (overrides the preset's)")
    parser.add_argument("--interval-ms", type=int, default=None,
                        help="mean block interval in ms (custom runs)")
    parser.add_argument("--block-size", type=int, default=None, metavar="BYTES",
                        help="block size in bytes (custom runs)")
    parser.add_argument("--region-dataset", metavar="FILE",
                        help="region JSON (weights, latency matrix, bandwidths)")
    parser.add_argument("--uniform-network", metavar="LAT_MS,BW_BPS",
                        help="replace all pairwise delays with constants "
                             "(bandwidth 'inf' for zero transfer time)")
    parser.add_argument("--uniform-mining", action="store_true",
                        help="give every node equal mining power")
    parser.add_argument("--out", metavar="DIR", default=None,
                        help="output directory (default out/<subcommand>)")
    parser.add_argument("--trace", action="store_true",
                        help="write a per-message trace.csv (large)")


def build_parser() -> tuple[argparse.ArgumentParser, list[argparse.ArgumentParser]]:
    parser = argparse.ArgumentParser(
        prog="pnsim",
        description="Discrete-event simulator of block propagation under "
                    "proximity-based neighbor selection")
    sub = parser.add_subparsers(dest="command", required=True)
    run_p = sub.add_parser("run", help="single simulation run")
    sweep_p = sub.add_parser("sweep", help="grid of runs over P, K and seeds")
    compare_p = sub.add_parser("compare", help="proposed vs fixed-random, paired seeds")
    for p in (run_p, sweep_p, compare_p):
        _add_common_flags(p)
    sweep_p.add_argument("--p-list", metavar="P1,P2,...", default=None,
                         help="P values for the grid (default: --p alone)")
    sweep_p.add_argument("--k-list", metavar="K1,K2,...", default=None,
                         help="K values for the grid (default: --k alone)")
    sweep_p.add_argument("--seeds", metavar="S1,S2,...", default=None,
                         help="explicit seed list (default: seed, seed+1, seed+2)")
    sweep_p.add_argument("--keep-cell-outputs", action="store_true",
                         help="write full per-run outputs for every grid cell")
    return parser, [run_p, sweep_p, compare_p]


def _apply_config_file(subparsers: list[argparse.ArgumentParser],
                       argv: list[str]) -> None:
    """Turn config-file values into parser defaults so flags still win.

    Defaults go on the subcommand parsers: a subparser parses into a fresh
    namespace, so its own defaults would shadow any set on the root parser.
    """
    probe = argparse.ArgumentParser(add_help=False)
    probe.add_argument("--config")
    known, _ = probe.parse_known_args(argv[1:] if argv else [])
    if not known.config:
        return
    values = load_config_file(known.config)
    defaults = {}
    flag_types = {"blocks": int, "seed": int, "nodes": int, "interval-ms": int,
                  "block-size": int, "p": float, "k": int, "reselect-every": int,
                  "outbound": int, "inbound-cap": int}
    for key, raw in values.items():
        dest = key.replace("-", "_")
        if key == "uniform-mining":
            defaults[dest] = raw.strip().lower() in ("1", "true", "yes", "on")
        elif key in flag_types:
            defaults[dest] = flag_types[key](raw)
        else:
            defaults[dest] = raw
    for sub in subparsers:
        sub.set_defaults(**defaults)


def _build_run_config(args: argparse.Namespace) -> RunConfig:
    if args.policy == "proposed":
        policy = ProposedPolicy(
            score_weight=args.p, random_slots=args.k,
            reselect_every=args.reselect_every, outbound_slots=args.outbound,
            inbound_cap=args.inbound_cap if args.inbound_cap is not None else 30)
    else:
        policy = FixedRandomPolicy(
            outbound_slots=args.outbound,
            inbound_cap=args.inbound_cap if args.inbound_cap is not None else 125)
    override = (_parse_uniform_network(args.uniform_network)
                if args.uniform_network else None)
    common = dict(blocks=args.blocks, seed=args.seed, policy=policy,
                  region_dataset=args.region_dataset, uniform_network=override,
                  uniform_mining=args.uniform_mining)
    if args.preset:
        cfg = preset_config(args.preset, nodes=args.nodes, **common)
        if args.interval_ms is not None:
            cfg = replace(cfg, interval_ms=args.interval_ms)
        if args.block_size is not None:
            cfg = replace(cfg, block_size=args.block_size)
        return cfg
    missing = [flag for flag, value in (("--nodes", args.nodes),
                                        ("--interval-ms", args.interval_ms),
                                        ("--block-size", args.block_size))
               if value is None]
    if missing:
        raise ConfigurationError(
            "without --preset, " + ", ".join(missing) + " must be given")
    return RunConfig(nodes=args.nodes, interval_ms=args.interval_ms,
                     block_size=args.block_size, **common)


def main(argv: Optional[Sequence[str]] = None) -> int:
    argv = list(sys.argv if argv is None else ["pnsim", *argv])
    parser, subparsers = build_parser()
    try:
        _apply_config_file(subparsers, argv)
        args = parser.parse_args(argv[1:])
        cfg = _build_run_config(args)
        out = args.out or f"out/{args.command}"
        if args.command == "run":
            summary = run_to_dir(cfg, out, trace=args.trace)
            print(f"run complete: {summary.block_count} blocks, "
                  f"mean median {_ms(summary.mean_median_ms)}, "
                  f"{summary.fork_count} forks -> {out}")
        elif args.command == "sweep":
            p_values = (_parse_float_list(args.p_list)
                        if args.p_list else [args.p])
            k_values = (_parse_int_list(args.k_list)
                        if args.k_list else [args.k])
            seeds = (_parse_int_list(args.seeds)
                     if args.seeds else [args.seed, args.seed + 1, args.seed + 2])
            rows = sweep(cfg, p_values, k_values, seeds, out,
                         keep_cell_outputs=args.keep_cell_outputs)
            print(f"sweep complete: {len(rows)} cells -> {out}/grid.csv")
        else:
            summaries = compare(cfg, out, trace=args.trace)
            proposed = summaries["proposed"].mean_median_ms
            fixed = summaries["fixed"].mean_median_ms
            line = (f"compare complete: proposed {_ms(proposed)} "
                    f"vs fixed {_ms(fixed)}")
            if proposed is not None and fixed and fixed > 0:
                line += f" ({(1 - proposed / fixed) * 100:+.1f}% change)"
            print(line + f" -> {out}")
    except (ConfigurationError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    return 0


def _ms(value: Optional[float]) -> str:
    return "undefined" if value is None else f"{value:.0f} ms"


if __name__ == "__main__":
    sys.exit(main())
