"""Node state and the INV/GETDATA/BLOCK relay protocol.

Connections are directional slots (outbound on the opener, inbound on the
acceptor) but blocks flow both ways across every connection. Announcements
are latency-only INV messages; a node requests the full block from whichever
peer's INV arrives first, and relays its own INV to every peer except the
one that supplied the block. Messages already in flight are not affected by
later disconnections.
"""

from __future__ import annotations

import random
from typing import Callable, Optional, Sequence

from .chain import Block, BlockRegistry, ChainView, WeightedSampler, next_generation
from .engine import (DELIVER_BLOCK, DELIVER_GETDATA, DELIVER_INV,
                     GENERATE_BLOCK, KIND_NAMES, MAYBE_RESELECT, EventLoop)
from .metrics import ArrivalTable
from .netmodel import DelayModel
from .pns import (Policy, ProposedPolicy, ScoreTable, apply_reselection,
                  should_reselect)


class Node:
    """Per-node protocol state. Mutated only by event handlers."""

    __slots__ = ("id", "region", "inbound_cap", "outbound", "inbound", "chain",
                 "scores", "requested", "blocks_since_reselect")

    def __init__(self, node_id: int, region: int, inbound_cap: int, genesis: Block) -> None:
        self.id = node_id
        self.region = region
        self.inbound_cap = inbound_cap
        self.outbound: list[int] = []
        # dict, not set: deterministic iteration order under equal histories
        self.inbound: dict[int, None] = {}
        self.chain = ChainView(genesis)
        self.scores = ScoreTable()
        self.requested: set[int] = set()
        self.blocks_since_reselect = 0

    def can_accept_inbound(self) -> bool:
        return len(self.inbound) < self.inbound_cap

    def connect_to(self, other: "Node") -> bool:
        """Open an outbound connection; False when the peer's inbound is full."""
        if other.id == self.id:
            raise ValueError("a node cannot connect to itself")
        if not other.can_accept_inbound():
            return False
        self.outbound.append(other.id)
        other.inbound[self.id] = None
        return True

    def disconnect_from(self, other: "Node") -> None:
        self.outbound.remove(other.id)
        other.inbound.pop(self.id, None)

    def reset_connections(self) -> None:
        self.outbound.clear()
        self.inbound.clear()

    def peers(self) -> list[int]:
        """Peer ids across both connection directions, deduplicated."""
        seen = set(self.outbound)
        return self.outbound + [p for p in self.inbound if p not in seen]


class Network:
    """Owns the node set and drives the protocol through an event loop."""

    def __init__(self, loop: EventLoop, nodes: Sequence[Node], registry: BlockRegistry,
                 delays: DelayModel, policy: Policy, arrivals: ArrivalTable,
                 mining_stream: random.Random, reselection_stream: random.Random,
                 power_sampler: WeightedSampler, mean_interval_ms: int,
                 block_size: int, block_target: int,
                 trace: Optional[Callable[..., None]] = None) -> None:
        self.loop = loop
        self.nodes = nodes
        self.registry = registry
        self.delays = delays
        self.policy = policy
        self.arrivals = arrivals
        self.mining_stream = mining_stream
        self.reselection_stream = reselection_stream
        self.power_sampler = power_sampler
        self.mean_interval_ms = mean_interval_ms
        self.block_size = block_size
        self.block_target = block_target
        self.generated = 0
        self._pending = 0  # scheduled-but-not-fired generation events (0 or 1)
        self.trace = trace
        loop.set_handler(GENERATE_BLOCK, self._on_generate)
        loop.set_handler(DELIVER_INV, self._on_inv)
        loop.set_handler(DELIVER_GETDATA, self._on_getdata)
        loop.set_handler(DELIVER_BLOCK, self._on_block)
        loop.set_handler(MAYBE_RESELECT, self._on_maybe_reselect)

    # -- generation scheduling ------------------------------------------------

    def start(self) -> None:
        """Queue the first block generation (none when the target is 0)."""
        self._schedule_next_generation()

    def _schedule_next_generation(self) -> None:
        if self.generated + self._pending >= self.block_target:
            return
        delta, miner = next_generation(self.mining_stream, self.mean_interval_ms,
                                       self.power_sampler)
        self.loop.schedule(self.loop.now + delta, GENERATE_BLOCK, miner)
        self._pending = 1

    def run(self) -> None:
        self.start()
        self.loop.run()

    # -- event handlers -------------------------------------------------------

    def _on_generate(self, miner: int, a, b, now: int) -> None:
        self._pending = 0
        node = self.nodes[miner]
        parent = self.registry[node.chain.tip_id]
        block = self.registry.new_block(parent, miner, now, self.block_size)
        node.chain.accept(block, now)
        self.arrivals.open_block(block.id, now)
        self.arrivals.record(block.id, miner, now)
        self.generated += 1
        if self.trace is not None:
            self.trace(now, KIND_NAMES[GENERATE_BLOCK], miner, miner, block.id)
        self._announce(node, block.id, exclude=None, now=now)
        self._schedule_next_generation()

    def _announce(self, node: Node, block_id: int, exclude: Optional[int], now: int) -> None:
        delays = self.delays
        loop = self.loop
        for peer_id in node.peers():
            if peer_id == exclude:
                continue
            peer_region = self.nodes[peer_id].region
            loop.schedule(now + delays.control_delay(node.region, peer_region),
                          DELIVER_INV, peer_id, node.id, block_id)

    def _on_inv(self, target: int, sender: int, block_id: int, now: int) -> None:
        node = self.nodes[target]
        block = self.registry[block_id]  # KeyError here means a corrupt schedule
        if self.trace is not None:
            self.trace(now, KIND_NAMES[DELIVER_INV], sender, target, block_id)
        if isinstance(self.policy, ProposedPolicy):
            node.scores.update(sender, now, block.created_at, self.policy.score_weight)
        if block_id in node.chain.known or block_id in node.requested:
            return
        node.requested.add(block_id)
        sender_region = self.nodes[sender].region
        self.loop.schedule(now + self.delays.control_delay(node.region, sender_region),
                           DELIVER_GETDATA, sender, target, block_id)

    def _on_getdata(self, target: int, requester: int, block_id: int, now: int) -> None:
        node = self.nodes[target]
        assert block_id in node.chain.known, "GETDATA for a block the provider lacks"
        if self.trace is not None:
            self.trace(now, KIND_NAMES[DELIVER_GETDATA], requester, target, block_id)
        block = self.registry[block_id]
        requester_region = self.nodes[requester].region
        delay = self.delays.block_transfer_delay(node.region, requester_region, block.size)
        self.loop.schedule(now + delay, DELIVER_BLOCK, requester, target, block_id)

    def _on_block(self, target: int, provider: int, block_id: int, now: int) -> None:
        node = self.nodes[target]
        node.requested.discard(block_id)
        if self.trace is not None:
            self.trace(now, KIND_NAMES[DELIVER_BLOCK], provider, target, block_id)
        if block_id in node.chain.known:
            return
        block = self.registry[block_id]
        self.arrivals.record(block_id, target, now)
        node.chain.accept(block, now)
        node.blocks_since_reselect += 1
        self._announce(node, block_id, exclude=provider, now=now)
        if should_reselect(node.blocks_since_reselect, self.policy):
            self.loop.schedule(now, MAYBE_RESELECT, target)

    def _on_maybe_reselect(self, target: int, a, b, now: int) -> None:
        node = self.nodes[target]
        # Re-check: a same-millisecond duplicate may already have fired.
        if not should_reselect(node.blocks_since_reselect, self.policy):
            return
        if self.trace is not None:
            self.trace(now, KIND_NAMES[MAYBE_RESELECT], target, target, -1)
        apply_reselection(node, self.nodes, self.reselection_stream, self.policy)
        node.blocks_since_reselect = 0


def check_capacity_invariants(nodes: Sequence[Node], outbound_slots: int) -> None:
    """Raises when any connection-slot invariant is violated (test hook)."""
    for node in nodes:
        if len(node.outbound) > outbound_slots:
            raise AssertionError(f"node {node.id}: outbound over {outbound_slots} slots")
        if len(set(node.outbound)) != len(node.outbound):
            raise AssertionError(f"node {node.id}: duplicate outbound entries")
        if node.id in node.outbound or node.id in node.inbound:
            raise AssertionError(f"node {node.id}: connected to itself")
        if len(node.inbound) > node.inbound_cap:
            raise AssertionError(f"node {node.id}: inbound over cap")
        for peer in node.outbound:
            if node.id not in nodes[peer].inbound:
                raise AssertionError(f"dangling outbound {node.id}->{peer}")
        for peer in node.inbound:
            if node.id not in nodes[peer].outbound:
                raise AssertionError(f"dangling inbound {peer}->{node.id}")


__all__ = ["Node", "Network", "check_capacity_invariants"]
