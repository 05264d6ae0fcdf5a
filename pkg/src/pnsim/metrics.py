"""Propagation-time measurement and aggregation.

The event loop records first-arrival times into an ArrivalTable; everything
else here runs post-hoc and read-only. A per-block statistic can be
undefined (too few nodes ever saw the block); undefined values are excluded
from aggregates and counted, never silently dropped.
"""

from __future__ import annotations

import csv
import json
import math
from array import array
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Optional, Sequence

from .chain import BlockRegistry, fork_stats, main_chain_ids

MISSING = -1  # arrival-slot value for "never arrived"


class ArrivalTable:
    """First-arrival time per (block, node), in absolute ms.

    One flat int array per block keeps 2,000 blocks x 1,000 nodes affordable.
    """

    __slots__ = ("node_count", "created", "_rows")

    def __init__(self, node_count: int) -> None:
        self.node_count = node_count
        self.created: dict[int, int] = {}
        self._rows: dict[int, array] = {}

    def open_block(self, block_id: int, created_at: int) -> None:
        self.created[block_id] = created_at
        self._rows[block_id] = array("q", [MISSING]) * self.node_count

    def record(self, block_id: int, node_id: int, arrived_at: int) -> None:
        row = self._rows[block_id]
        assert row[node_id] == MISSING, "second arrival for the same (block, node)"
        assert arrived_at >= self.created[block_id], "arrival precedes creation"
        row[node_id] = arrived_at

    def block_ids(self) -> list[int]:
        return list(self._rows)

    def arrivals(self, block_id: int) -> array:
        return self._rows[block_id]

    def __len__(self) -> int:
        return len(self._rows)


class BlockPropagationRecord:
    """Read-only view of one block's arrivals, as creation-time offsets."""

    __slots__ = ("block_id", "created_at", "_arrivals")

    def __init__(self, block_id: int, created_at: int, arrivals: Sequence[int]) -> None:
        self.block_id = block_id
        self.created_at = created_at
        self._arrivals = arrivals

    @property
    def node_count(self) -> int:
        return len(self._arrivals)

    @property
    def coverage(self) -> float:
        reached = sum(1 for a in self._arrivals if a != MISSING)
        return reached / len(self._arrivals)

    def offsets(self) -> list[float]:
        """Offsets for all nodes, ascending; nodes never reached sort last
        as +inf."""
        out = [math.inf if a == MISSING else float(a - self.created_at)
               for a in self._arrivals]
        out.sort()
        return out


def records(table: ArrivalTable) -> list[BlockPropagationRecord]:
    return [BlockPropagationRecord(bid, table.created[bid], table.arrivals(bid))
            for bid in table.block_ids()]


def _quantile(ascending: Sequence[float], q: float) -> float:
    """q-quantile over the whole sequence.

    With n values and m = q*n: integer m averages the m-th and (m+1)-th
    smallest; fractional m takes the ceil(m)-th. Medians of even counts are
    therefore midpoints.
    """
    n = len(ascending)
    if n == 0:
        raise ValueError("quantile of an empty sequence")
    m = q * n
    nearest = round(m)
    if nearest >= 1 and abs(m - nearest) < 1e-9:
        if nearest >= n:
            return ascending[-1]
        return (ascending[nearest - 1] + ascending[nearest]) / 2
    return ascending[min(math.ceil(m), n) - 1]


def propagation_percentile(record: BlockPropagationRecord, q: float) -> Optional[float]:
    """q-quantile of first-arrival offsets over ALL nodes (creator at 0).

    None when the statistic needs arrivals that never happened (coverage
    too low for this q).
    """
    if not 0.0 < q <= 1.0:
        raise ValueError("q must be in (0, 1]")
    value = _quantile(record.offsets(), q)
    return None if math.isinf(value) else value


def median_series(table: ArrivalTable) -> list[Optional[float]]:
    """Per-block median propagation offset, in block-id order."""
    return [propagation_percentile(r, 0.5) for r in records(table)]


def mean_of_medians(series: Iterable[Optional[float]], skip: int = 0) -> tuple[Optional[float], int]:
    """(mean over defined entries, count of undefined entries).

    `skip` drops the first blocks from the series before averaging, for
    warm-up-insensitive readings.
    """
    defined = []
    undefined = 0
    for value in list(series)[skip:]:
        if value is None:
            undefined += 1
        else:
            defined.append(value)
    if not defined:
        return None, undefined
    return sum(defined) / len(defined), undefined


def rolling_average(series: Sequence[Optional[float]], window: int) -> list[tuple[int, Optional[float], int]]:
    """Non-overlapping window means over a per-block series.

    Returns (window_start_index, mean, defined_count) per window in block
    order; the trailing partial window is included with its own count.
    Undefined entries are excluded from the mean; an all-undefined window
    has mean None.
    """
    if window < 1:
        raise ValueError("window must be >= 1")
    out = []
    for start in range(0, len(series), window):
        chunk = [v for v in series[start:start + window] if v is not None]
        mean = sum(chunk) / len(chunk) if chunk else None
        out.append((start, mean, len(chunk)))
    return out


def histogram(series: Iterable[Optional[float]], bin_width_ms: float) -> list[tuple[float, int]]:
    """Counts per half-open bin [k*w, (k+1)*w), ascending, zero bins omitted.

    Undefined entries are skipped, so counts sum to the defined-series
    length.
    """
    if bin_width_ms <= 0:
        raise ValueError("bin width must be > 0")
    counts: dict[int, int] = {}
    for value in series:
        if value is None:
            continue
        k = math.floor(value / bin_width_ms)
        counts[k] = counts.get(k, 0) + 1
    return [(k * bin_width_ms, counts[k]) for k in sorted(counts)]


@dataclass(frozen=True)
class RunSummary:
    """Everything a single run reports, JSON-serializable."""

    seed: int
    config: dict
    block_count: int
    medians: list  # per generated block, None where undefined
    mean_median_ms: Optional[float]
    undefined_medians: int
    rolling: list  # (window_start_index, mean, defined_count)
    histogram: list  # (bin_start_ms, count)
    fork_count: int
    orphan_count: int
    coverage_min: Optional[float] = None
    elapsed_wall_s: Optional[float] = None
    extras: dict = field(default_factory=dict)


def summarize(table: ArrivalTable, registry: BlockRegistry, seed: int, config: dict,
              rolling_window: int = 100, bin_width_ms: float = 100.0,
              elapsed_wall_s: Optional[float] = None) -> RunSummary:
    recs = records(table)
    medians = [propagation_percentile(r, 0.5) for r in recs]
    mean, undefined = mean_of_medians(medians)
    forks, orphans = fork_stats(list(registry.blocks.values()))
    coverage_min = min((r.coverage for r in recs), default=None)
    return RunSummary(
        seed=seed,
        config=config,
        block_count=len(recs),
        medians=medians,
        mean_median_ms=mean,
        undefined_medians=undefined,
        rolling=rolling_average(medians, rolling_window),
        histogram=histogram(medians, bin_width_ms),
        fork_count=forks,
        orphan_count=orphans,
        coverage_min=coverage_min,
        elapsed_wall_s=elapsed_wall_s,
    )


# -- file output ----------------------------------------------------------


def _fmt(value) -> str:
    """CSV cell: undefined -> empty, integral floats -> bare ints."""
    if value is None:
        return ""
    if isinstance(value, float):
        if math.isinf(value) or math.isnan(value):
            return ""
        if value.is_integer():
            return str(int(value))
        return repr(value)
    return str(value)


def write_per_block_csv(path: str | Path, table: ArrivalTable,
                        registry: BlockRegistry) -> None:
    main = main_chain_ids(registry.blocks.values())
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["block_id", "height", "created_at", "median_ms",
                         "coverage", "on_main_chain"])
        for rec in records(table):
            block = registry[rec.block_id]
            writer.writerow([rec.block_id, block.height, rec.created_at,
                             _fmt(propagation_percentile(rec, 0.5)),
                             _fmt(rec.coverage), int(rec.block_id in main)])


def write_rolling_csv(path: str | Path, rolling: Sequence[tuple[int, Optional[float], int]]) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["window_start_block", "mean_median_ms"])
        for start, mean, _count in rolling:
            writer.writerow([start, _fmt(mean)])


def write_histogram_csv(path: str | Path, bins: Sequence[tuple[float, int]]) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["bin_start_ms", "count"])
        for bin_start, count in bins:
            writer.writerow([_fmt(bin_start), count])


def write_sweep_csv(path: str | Path, rows: Sequence[dict]) -> None:
    """Grid rows: one dict per (P, K, seed) cell with mean_median_ms."""
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["P", "K", "seed", "mean_median_ms"])
        for row in rows:
            writer.writerow([_fmt(row["P"]), row["K"], row["seed"],
                             _fmt(row["mean_median_ms"])])


def write_summary_json(path: str | Path, summary: RunSummary) -> None:
    payload = {
        "seed": summary.seed,
        "config": summary.config,
        "block_count": summary.block_count,
        "mean_median_ms": summary.mean_median_ms,
        "undefined_medians": summary.undefined_medians,
        "fork_count": summary.fork_count,
        "orphan_count": summary.orphan_count,
        "coverage_min": summary.coverage_min,
        "rolling": [{"window_start_block": s, "mean_median_ms": m, "blocks": c}
                    for s, m, c in summary.rolling],
        "histogram": [{"bin_start_ms": b, "count": c} for b, c in summary.histogram],
    }
    payload.update(summary.extras)
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")
