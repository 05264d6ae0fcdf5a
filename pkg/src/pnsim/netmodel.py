"""Geographic region assignment and message delay computation.

Control messages (INV/GETDATA) are latency-only; full-block transfers add a
bandwidth term limited by min(sender upload, receiver download). Delays are
deterministic: no jitter, no loss.
"""

from __future__ import annotations

import bisect
import json
import random
from dataclasses import dataclass
from pathlib import Path
from typing import Optional


@dataclass(frozen=True)
class RegionDataset:
    """Region names, node-placement weights, pairwise one-way latency (ms)
    and per-region up/down bandwidth (bits per second)."""

    regions: tuple[str, ...]
    weights: tuple[float, ...]
    latency: tuple[tuple[int, ...], ...]
    upload: tuple[int, ...]
    download: tuple[int, ...]

    def __post_init__(self) -> None:
        n = len(self.regions)
        if n == 0:
            raise ValueError("dataset has no regions")
        for name, seq in (("weights", self.weights), ("upload", self.upload),
                          ("download", self.download), ("latency", self.latency)):
            if len(seq) != n:
                raise ValueError(f"{name} length {len(seq)} != region count {n}")
        for row in self.latency:
            if len(row) != n:
                raise ValueError("latency matrix is not square")
            if any(v <= 0 for v in row):
                raise ValueError("latencies must be > 0")
        if any(b <= 0 for b in self.upload) or any(b <= 0 for b in self.download):
            raise ValueError("bandwidths must be > 0")
        if any(w < 0 for w in self.weights):
            raise ValueError("weights must be non-negative")
        if abs(sum(self.weights) - 1.0) > 1e-9:
            raise ValueError(f"weights sum to {sum(self.weights)}, expected 1")


@dataclass(frozen=True)
class UniformOverride:
    """Replaces every pairwise delay with constants; used for the
    homogeneous-network control runs. bandwidth_bps=None means infinite
    (zero transfer time)."""

    latency_ms: int
    bandwidth_bps: Optional[int] = None

    def __post_init__(self) -> None:
        if self.latency_ms < 0:
            raise ValueError("override latency must be >= 0")
        if self.bandwidth_bps is not None and self.bandwidth_bps <= 0:
            raise ValueError("override bandwidth must be > 0 (or None for infinite)")


def load_dataset(path: str | Path) -> RegionDataset:
    with open(path, "r", encoding="utf-8") as fh:
        raw = json.load(fh)
    return RegionDataset(
        regions=tuple(raw["regions"]),
        weights=tuple(float(w) for w in raw["weights"]),
        latency=tuple(tuple(int(v) for v in row) for row in raw["latency_ms"]),
        upload=tuple(int(v) for v in raw["upload_bps"]),
        download=tuple(int(v) for v in raw["download_bps"]),
    )


def preset_path(name: str) -> Path:
    return Path(__file__).parent / "presets" / f"{name}.json"


def assign_region(stream: random.Random, dataset: RegionDataset) -> int:
    """Sample a region index with probability equal to its weight."""
    cumulative = []
    total = 0.0
    for w in dataset.weights:
        total += w
        cumulative.append(total)
    # bisect_right: half-open intervals, zero-weight regions unreachable
    return bisect.bisect_right(cumulative, stream.random() * total)


class DelayModel:
    """Delay lookups for a dataset, optionally shadowed by a uniform override."""

    def __init__(self, dataset: RegionDataset, override: Optional[UniformOverride] = None):
        self.dataset = dataset
        self.override = override

    def control_delay(self, src: int, dst: int) -> int:
        if self.override is not None:
            return self.override.latency_ms
        return self.dataset.latency[src][dst]

    def block_transfer_delay(self, src: int, dst: int, size_bytes: int) -> int:
        """Latency plus bandwidth-limited transfer time, in whole ms.

        Effective bandwidth is the bottleneck of sender upload and receiver
        download. The transfer term rounds up so it never vanishes for a
        positive size at finite bandwidth.
        """
        if size_bytes <= 0:
            raise ValueError("block size must be > 0")
        if self.override is not None:
            latency = self.override.latency_ms
            bw = self.override.bandwidth_bps
            if bw is None:
                return latency
        else:
            latency = self.dataset.latency[src][dst]
            bw = min(self.dataset.upload[src], self.dataset.download[dst])
        # ceil(size*8 / bw * 1000) with exact integer arithmetic
        return latency + (size_bytes * 8000 + bw - 1) // bw
