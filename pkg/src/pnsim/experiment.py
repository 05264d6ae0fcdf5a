"""Experiment orchestration: single runs, parameter sweeps, paired compares.

A run is a pure function of (config, seed): all randomness flows through
labeled streams derived from the seed, so reruns produce byte-identical
artifacts. Compare mode exploits the stream separation: both arms see the
same region assignment and the same mining schedule, so any difference in
propagation comes from the neighbor-selection policy alone.
"""

from __future__ import annotations

import csv
import time
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Sequence

from .chain import (BlockRegistry, WeightedSampler, make_genesis, pareto_powers,
                    uniform_powers, write_block_log)
from .config import RunConfig
from .engine import EventLoop, RandomStreams
from .metrics import (ArrivalTable, RunSummary, _fmt, summarize,
                      write_histogram_csv, write_per_block_csv,
                      write_rolling_csv, write_summary_json, write_sweep_csv)
from .netmodel import DelayModel, assign_region, load_dataset, preset_path
from .p2p import Network, Node
from .pns import FixedRandomPolicy, ProposedPolicy, initial_topology

DEFAULT_DATASET = "regions_default"


@dataclass
class RunResult:
    config: RunConfig
    arrivals: ArrivalTable
    registry: BlockRegistry
    nodes: list
    elapsed_wall_s: float

    def summary(self, rolling_window: int = 100, bin_width_ms: float = 100.0) -> RunSummary:
        return summarize(self.arrivals, self.registry, self.config.seed,
                         self.config.describe(), rolling_window=rolling_window,
                         bin_width_ms=bin_width_ms, elapsed_wall_s=self.elapsed_wall_s)


def _dataset_for(cfg: RunConfig):
    path = cfg.region_dataset or preset_path(DEFAULT_DATASET)
    return load_dataset(path)


def run_once(cfg: RunConfig, trace=None) -> RunResult:
    """Build the network and run it to the block target."""
    started = time.monotonic()
    streams = RandomStreams(cfg.seed)
    dataset = _dataset_for(cfg)
    delays = DelayModel(dataset, cfg.uniform_network)
    regions = [assign_region(streams.region, dataset) for _ in range(cfg.nodes)]
    if cfg.uniform_mining:
        powers = uniform_powers(cfg.nodes)
    else:
        powers = pareto_powers(cfg.nodes, streams.mining)
    sampler = WeightedSampler(powers)
    genesis = make_genesis(cfg.block_size)
    registry = BlockRegistry(genesis)
    nodes = [Node(i, regions[i], cfg.policy.inbound_cap, genesis)
             for i in range(cfg.nodes)]
    if cfg.nodes > 1:
        # raises for 1 < nodes <= outbound_slots: no valid topology exists
        initial_topology(nodes, streams.topology, cfg.policy)
    arrivals = ArrivalTable(cfg.nodes)
    loop = EventLoop()
    network = Network(loop, nodes, registry, delays, cfg.policy, arrivals,
                      streams.mining, streams.reselection, sampler,
                      cfg.interval_ms, cfg.block_size, cfg.blocks, trace=trace)
    network.run()
    return RunResult(cfg, arrivals, registry, nodes, time.monotonic() - started)


class _TraceWriter:
    """Streams per-message rows to CSV as events dispatch."""

    def __init__(self, path: Path):
        self._fh = open(path, "w", newline="", encoding="utf-8")
        self._writer = csv.writer(self._fh)
        self._writer.writerow(["time_ms", "kind", "src", "dst", "block_id"])

    def __call__(self, now, kind, src, dst, block_id):
        self._writer.writerow([now, kind, src, dst, block_id])

    def close(self):
        self._fh.close()


def write_run_outputs(out_dir: str | Path, result: RunResult,
                      rolling_window: int = 100, bin_width_ms: float = 100.0) -> RunSummary:
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    summary = result.summary(rolling_window, bin_width_ms)
    write_per_block_csv(out / "per_block.csv", result.arrivals, result.registry)
    write_rolling_csv(out / "rolling.csv", summary.rolling)
    write_histogram_csv(out / "histogram.csv", summary.histogram)
    write_block_log(out / "blocks.csv", result.registry)
    write_summary_json(out / "summary.json", summary)
    return summary


def run_to_dir(cfg: RunConfig, out_dir: str | Path, trace: bool = False,
               rolling_window: int = 100, bin_width_ms: float = 100.0) -> RunSummary:
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    writer = _TraceWriter(out / "trace.csv") if trace else None
    try:
        result = run_once(cfg, trace=writer)
    finally:
        if writer is not None:
            writer.close()
    return write_run_outputs(out, result, rolling_window, bin_width_ms)


def sweep(cfg: RunConfig, p_values: Sequence[float], k_values: Sequence[int],
          seeds: Sequence[int], out_dir: str | Path,
          keep_cell_outputs: bool = False) -> list[dict]:
    """One full run per (P, K, seed) cell; grid CSV of mean-of-medians.

    Cells share seeds, so every cell with the same seed sees the same
    mining schedule and region layout. Any cell failure aborts the sweep
    naming the cell.
    """
    if not p_values or not k_values or not seeds:
        raise ValueError("sweep needs at least one P, one K and one seed")
    base = cfg.policy if isinstance(cfg.policy, ProposedPolicy) else ProposedPolicy()
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    rows = []
    for p in p_values:
        for k in k_values:
            for seed in seeds:
                policy = replace(base, score_weight=p, random_slots=k)
                cell = replace(cfg, policy=policy, seed=seed)
                try:
                    result = run_once(cell)
                    if keep_cell_outputs:
                        write_run_outputs(out / f"p{p}_k{k}_seed{seed}", result)
                    summary = result.summary()
                except Exception as exc:
                    raise RuntimeError(
                        f"sweep cell P={p} K={k} seed={seed} failed: {exc}") from exc
                rows.append({"P": p, "K": k, "seed": seed,
                             "mean_median_ms": summary.mean_median_ms})
    write_sweep_csv(out / "grid.csv", rows)
    _write_sweep_aggregate(out / "grid_summary.csv", rows)
    return rows


def _write_sweep_aggregate(path: Path, rows: Sequence[dict]) -> None:
    """Per-(P, K) mean and spread (max - min) across seeds."""
    cells: dict[tuple, list[float]] = {}
    for row in rows:
        if row["mean_median_ms"] is not None:
            cells.setdefault((row["P"], row["K"]), []).append(row["mean_median_ms"])
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["P", "K", "seeds", "mean_median_ms_mean", "mean_median_ms_spread"])
        for (p, k), values in sorted(cells.items()):
            mean = sum(values) / len(values)
            spread = max(values) - min(values)
            writer.writerow([_fmt(p), k, len(values), _fmt(mean), _fmt(spread)])


def compare(cfg: RunConfig, out_dir: str | Path, trace: bool = False,
            rolling_window: int = 100, bin_width_ms: float = 100.0) -> dict[str, RunSummary]:
    """Run the proximity policy and the fixed-random baseline side by side.

    Both arms use the same seed; environment draws (regions, mining) come
    from identical streams, so the mining schedule matches block for block.
    """
    out = Path(out_dir)
    proposed_policy = cfg.policy if isinstance(cfg.policy, ProposedPolicy) else ProposedPolicy()
    fixed_policy = FixedRandomPolicy(outbound_slots=proposed_policy.outbound_slots)
    summaries = {}
    for arm, policy in (("proposed", proposed_policy), ("fixed", fixed_policy)):
        arm_cfg = replace(cfg, policy=policy)
        summaries[arm] = run_to_dir(arm_cfg, out / arm, trace=trace,
                                    rolling_window=rolling_window,
                                    bin_width_ms=bin_width_ms)
    return summaries
