"""Block identity, per-node chain views, block generation, fork accounting.

Mining is one global Poisson process: the gap to the next block is
exponential with the configured mean, and the winner is drawn with
probability proportional to its relative power. The winner extends its own
current tip, so forks arise only from propagation delay.
"""

from __future__ import annotations

import bisect
import csv
import itertools
import random
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Optional, Sequence

GENESIS_ID = 0


@dataclass(frozen=True)
class Block:
    id: int
    parent: Optional[int]  # None only for genesis
    height: int
    miner: int             # -1 for genesis
    created_at: int        # ms
    size: int              # bytes


def make_genesis(size: int) -> Block:
    return Block(id=GENESIS_ID, parent=None, height=0, miner=-1, created_at=0, size=size)


class BlockRegistry:
    """All blocks ever generated in a run, by id."""

    def __init__(self, genesis: Block) -> None:
        self.blocks: dict[int, Block] = {genesis.id: genesis}
        self._ids = itertools.count(1)

    def new_block(self, parent: Block, miner: int, created_at: int, size: int) -> Block:
        if created_at <= parent.created_at:
            raise ValueError("block must be created strictly after its parent")
        block = Block(next(self._ids), parent.id, parent.height + 1, miner, created_at, size)
        self.blocks[block.id] = block
        return block

    def __getitem__(self, block_id: int) -> Block:
        return self.blocks[block_id]

    def generated(self) -> list[Block]:
        """All non-genesis blocks in creation order."""
        return [b for b in self.blocks.values() if b.id != GENESIS_ID]


class ChainView:
    """One node's view: known blocks with arrival times, longest-chain tip.

    Ties on height keep the first-arrived block.
    """

    __slots__ = ("known", "tip_id", "tip_height")

    def __init__(self, genesis: Block) -> None:
        self.known: dict[int, int] = {genesis.id: 0}
        self.tip_id = genesis.id
        self.tip_height = genesis.height

    def accept(self, block: Block, arrived_at: int) -> bool:
        """Record a block; returns True iff the tip switched."""
        if block.id in self.known:
            return False
        self.known[block.id] = arrived_at
        if block.height > self.tip_height:
            self.tip_id = block.id
            self.tip_height = block.height
            return True
        return False


class WeightedSampler:
    """Index sampler with probability proportional to fixed positive weights."""

    def __init__(self, weights: Sequence[float]) -> None:
        if not weights:
            raise ValueError("no weights")
        if any(w <= 0 for w in weights):
            raise ValueError("weights must be > 0")
        self._cumulative = list(itertools.accumulate(weights))
        self._total = self._cumulative[-1]

    def sample(self, stream: random.Random) -> int:
        return bisect.bisect_right(self._cumulative, stream.random() * self._total)


def uniform_powers(n: int) -> list[float]:
    return [1.0] * n


def pareto_powers(n: int, stream: random.Random, alpha: float = 1.16) -> list[float]:
    # Heavy-tailed alternative profile; alpha 1.16 gives a rough 80/20 split.
    return [stream.paretovariate(alpha) for _ in range(n)]


def next_generation(stream: random.Random, mean_interval_ms: int,
                    sampler: WeightedSampler) -> tuple[int, int]:
    """Draw (gap to next block in ms, winning miner index).

    The gap is clamped to >= 1 ms so a child is always strictly younger
    than its parent.
    """
    if mean_interval_ms <= 0:
        raise ValueError("mean interval must be > 0")
    delta = round(stream.expovariate(1.0 / mean_interval_ms))
    return (max(1, delta), sampler.sample(stream))


def main_chain_ids(blocks: Iterable[Block]) -> set[int]:
    """Ids of blocks on the final longest chain (genesis included).

    The final tip is the maximal-height block, ties broken by earliest
    creation then lowest id, matching per-node first-seen tie-breaks.
    """
    by_id: dict[int, Block] = {b.id: b for b in blocks}
    if not by_id:
        return set()
    tip = min(by_id.values(), key=lambda b: (-b.height, b.created_at, b.id))
    chain = set()
    cursor: Optional[Block] = tip
    while cursor is not None:
        chain.add(cursor.id)
        cursor = by_id.get(cursor.parent) if cursor.parent is not None else None
    return chain


def fork_stats(blocks: Sequence[Block]) -> tuple[int, int]:
    """(fork_count, orphan_count) over a complete generated-block log.

    fork_count: heights holding two or more blocks. orphan_count: generated
    (non-genesis) blocks off the final longest chain.
    """
    heights: dict[int, int] = {}
    for b in blocks:
        heights[b.height] = heights.get(b.height, 0) + 1
    fork_count = sum(1 for c in heights.values() if c >= 2)
    main = main_chain_ids(blocks)
    orphan_count = sum(1 for b in blocks if b.id != GENESIS_ID and b.id not in main)
    return fork_count, orphan_count


def write_block_log(path: str | Path, registry: BlockRegistry) -> None:
    blocks = sorted(registry.blocks.values(), key=lambda b: b.id)
    main = main_chain_ids(blocks)
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["id", "parent", "height", "miner", "created_at", "on_main_chain"])
        for b in blocks:
            parent = "" if b.parent is None else b.parent
            writer.writerow([b.id, parent, b.height, b.miner, b.created_at, int(b.id in main)])
