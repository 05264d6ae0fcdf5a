"""Peer scoring and neighbor selection policies.

Every INV announcement a node receives scores its sender: the sample is the
announcement's arrival time minus the block's creation time, folded into an
exponentially weighted moving average per sender. The proximity policy
periodically replaces all outbound connections with the lowest-scored
(earliest-announcing) senders, reserving a few slots for uniform-random
picks so unknown nodes keep getting discovered. The baseline policy keeps
its initial random neighbors forever.
"""

from __future__ import annotations

import random
from collections import deque
from dataclasses import dataclass
from typing import TYPE_CHECKING, Sequence

if TYPE_CHECKING:
    from .p2p import Node


class ConfigurationError(ValueError):
    pass


class ScoreTable:
    """Per-sender announcement-delay EWMA, in ms. Unbounded: one entry per
    sender ever heard from; history survives disconnection."""

    __slots__ = ("_entries",)

    def __init__(self) -> None:
        # sender id -> [score, sample_count]; list cells mutated in place
        self._entries: dict[int, list] = {}

    def update(self, sender: int, t_inv: int, t_block: int, weight: float) -> float:
        if t_inv < t_block:
            raise ValueError(f"announcement at t={t_inv} precedes block creation t={t_block}")
        sample = t_inv - t_block
        entry = self._entries.get(sender)
        if entry is None:
            self._entries[sender] = [float(sample), 1]
            return float(sample)
        entry[0] = (1.0 - weight) * entry[0] + weight * sample
        entry[1] += 1
        return entry[0]

    def score(self, sender: int) -> float | None:
        entry = self._entries.get(sender)
        return None if entry is None else entry[0]

    def samples(self, sender: int) -> int:
        entry = self._entries.get(sender)
        return 0 if entry is None else entry[1]

    def __len__(self) -> int:
        return len(self._entries)

    def ranked(self, exclude: int) -> list[int]:
        """Sender ids by ascending score, ties by ascending id."""
        return sorted((s for s in self._entries if s != exclude),
                      key=lambda s: (self._entries[s][0], s))


@dataclass(frozen=True)
class ProposedPolicy:
    """Proximity selection: keep the best-scored senders, plus a few random
    slots for discovery."""

    score_weight: float = 0.3   # EWMA weight on the newest sample
    random_slots: int = 1       # outbound slots filled uniformly at random
    reselect_every: int = 10    # blocks received between reselections
    outbound_slots: int = 8
    inbound_cap: int = 30

    def __post_init__(self) -> None:
        if not 0.0 <= self.score_weight <= 1.0:
            raise ConfigurationError("score weight must be within [0, 1]")
        if not 0 <= self.random_slots <= self.outbound_slots:
            raise ConfigurationError("random slot count must be within [0, outbound slots]")
        if self.reselect_every < 1:
            raise ConfigurationError("reselect interval must be >= 1")
        if self.outbound_slots < 1 or self.inbound_cap < 1:
            raise ConfigurationError("connection capacities must be >= 1")


@dataclass(frozen=True)
class FixedRandomPolicy:
    """Baseline: random initial neighbors, never reselected."""

    outbound_slots: int = 8
    inbound_cap: int = 125

    def __post_init__(self) -> None:
        if self.outbound_slots < 1 or self.inbound_cap < 1:
            raise ConfigurationError("connection capacities must be >= 1")


Policy = ProposedPolicy | FixedRandomPolicy


def should_reselect(counter: int, policy: Policy) -> bool:
    return isinstance(policy, ProposedPolicy) and counter >= policy.reselect_every


def reselect(self_id: int, table: ScoreTable, all_ids: Sequence[int],
             stream: random.Random, policy: ProposedPolicy) -> list[int]:
    """New outbound peer list, ignoring inbound capacity.

    The first (outbound_slots - random_slots) entries are the best-scored
    senders in ascending score order; the rest are uniform-random picks from
    the whole node list. Senders that never announced anything are only ever
    reached through the random slots.
    """
    if len(all_ids) <= policy.outbound_slots:
        raise ConfigurationError("need more nodes than outbound slots to reselect")
    picks = table.ranked(exclude=self_id)[: policy.outbound_slots - policy.random_slots]
    chosen = set(picks)
    chosen.add(self_id)
    while len(picks) < policy.outbound_slots:
        candidate = all_ids[stream.randrange(len(all_ids))]
        if candidate not in chosen:
            picks.append(candidate)
            chosen.add(candidate)
    return picks


def _fill_random(node: "Node", nodes: Sequence["Node"], stream: random.Random,
                 wanted: int, chosen: set[int], rejected: set[int],
                 accept) -> list[int]:
    """Uniform-random slot filling with capacity fall-through.

    Rejection-samples first; if the sampling budget runs out (tiny networks,
    tight caps) it falls back to a deterministic scan so that filling only
    fails when no acceptable candidate exists at all.
    """
    n = len(nodes)
    added: list[int] = []
    budget = 20 * n
    while len(added) < wanted and budget > 0:
        budget -= 1
        candidate = stream.randrange(n)
        if candidate == node.id or candidate in chosen or candidate in rejected:
            continue
        if accept(candidate):
            added.append(candidate)
            chosen.add(candidate)
        else:
            rejected.add(candidate)
    if len(added) < wanted:
        for candidate in range(n):
            if len(added) >= wanted:
                break
            if candidate == node.id or candidate in chosen or candidate in rejected:
                continue
            if accept(candidate):
                added.append(candidate)
                chosen.add(candidate)
    return added


def apply_reselection(node: "Node", nodes: Sequence["Node"], stream: random.Random,
                      policy: ProposedPolicy) -> None:
    """Replace the node's outbound set per the proximity policy.

    Candidates whose inbound side is full fall through to the next-best
    scored candidate (or a fresh random draw). Peers picked again keep their
    existing connection untouched, so only the set difference churns.
    """
    current = set(node.outbound)
    keep: list[int] = []
    chosen: set[int] = set()
    rejected: set[int] = set()

    def accept(candidate: int) -> bool:
        return candidate in current or nodes[candidate].can_accept_inbound()

    scored_wanted = policy.outbound_slots - policy.random_slots
    for candidate in node.scores.ranked(exclude=node.id):
        if len(keep) >= scored_wanted:
            break
        if accept(candidate):
            keep.append(candidate)
            chosen.add(candidate)
        else:
            rejected.add(candidate)
    keep += _fill_random(node, nodes, stream, policy.outbound_slots - len(keep),
                         chosen, rejected, accept)

    for peer_id in current - chosen:
        node.disconnect_from(nodes[peer_id])
    for peer_id in keep:
        if peer_id not in current:
            connected = node.connect_to(nodes[peer_id])
            assert connected, "capacity was checked during selection"


def is_connected(nodes: Sequence["Node"]) -> bool:
    """Whether the undirected union of all connections is one component."""
    if not nodes:
        return True
    adjacency: dict[int, set[int]] = {n.id: set() for n in nodes}
    for n in nodes:
        for peer in n.outbound:
            adjacency[n.id].add(peer)
            adjacency[peer].add(n.id)
    seen = {nodes[0].id}
    frontier = deque(seen)
    while frontier:
        current = frontier.popleft()
        for neighbor in adjacency[current]:
            if neighbor not in seen:
                seen.add(neighbor)
                frontier.append(neighbor)
    return len(seen) == len(nodes)


def initial_topology(nodes: Sequence["Node"], stream: random.Random, policy: Policy,
                     max_attempts: int = 50) -> None:
    """Give every node `outbound_slots` uniform-random distinct peers.

    Retries from scratch (with fresh draws) until the undirected graph comes
    out connected; inbound-full targets fall through to other candidates.
    """
    if len(nodes) <= policy.outbound_slots:
        raise ConfigurationError(
            f"{len(nodes)} nodes cannot each hold {policy.outbound_slots} outbound peers")
    for _ in range(max_attempts):
        for node in nodes:
            node.reset_connections()
        complete = True
        for node in nodes:
            chosen: set[int] = set()
            rejected: set[int] = set()
            added = _fill_random(node, nodes, stream, policy.outbound_slots,
                                 chosen, rejected,
                                 lambda c: nodes[c].can_accept_inbound())
            for peer_id in added:
                node.connect_to(nodes[peer_id])
            if len(node.outbound) < policy.outbound_slots:
                complete = False
                break
        if complete and is_connected(nodes):
            return
    raise ConfigurationError("failed to build a connected topology; inbound caps too tight")
