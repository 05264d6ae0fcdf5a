"""Deterministic discrete-event core: clock, priority queue, seeded streams.

All simulation times are integer milliseconds from simulation start. Events
with equal fire times dispatch in insertion order, so a run is a pure
function of (config, seed).
"""

from __future__ import annotations

import heapq
import random
from typing import Callable, Optional

# Event kinds. Kept as small ints because the dispatch loop is the hottest
# code in the simulator.
GENERATE_BLOCK = 0
DELIVER_INV = 1
DELIVER_GETDATA = 2
DELIVER_BLOCK = 3
MAYBE_RESELECT = 4

KIND_NAMES = ("GenerateBlock", "DeliverInv", "DeliverGetData", "DeliverBlock", "MaybeReselect")

# Queue entries are plain tuples: (fire_at, seq, kind, target, a, b).
# target is a node id; a/b are kind-specific (sender/block id etc.).
Event = tuple


class SchedulingInPastError(ValueError):
    """An event was scheduled before the current clock value."""


class EventLoop:
    """Priority event queue with a monotone integer-millisecond clock."""

    __slots__ = ("now", "_queue", "_seq", "_handlers", "trace")

    def __init__(self) -> None:
        self.now = 0
        self._queue: list[tuple] = []
        self._seq = 0
        self._handlers: list[Optional[Callable]] = [None] * len(KIND_NAMES)
        # When set to a list, every dispatch appends (time, seq, kind, target).
        self.trace: Optional[list] = None

    def set_handler(self, kind: int, fn: Callable) -> None:
        self._handlers[kind] = fn

    def schedule(self, fire_at: int, kind: int, target: int, a=None, b=None) -> None:
        if fire_at < self.now:
            raise SchedulingInPastError(
                f"event {KIND_NAMES[kind]} scheduled at t={fire_at} but clock is {self.now}"
            )
        heapq.heappush(self._queue, (fire_at, self._seq, kind, target, a, b))
        self._seq += 1

    def pending(self) -> int:
        return len(self._queue)

    def run(self, stop: Optional[Callable[[], bool]] = None,
            after_each: Optional[Callable] = None) -> None:
        """Dispatch events in (fire_at, seq) order until the queue empties.

        `stop` is checked before each dispatch; `after_each` (tests only)
        runs after each dispatch with the dispatched event tuple.
        """
        queue = self._queue
        handlers = self._handlers
        trace = self.trace
        pop = heapq.heappop
        while queue:
            if stop is not None and stop():
                break
            event = pop(queue)
            fire_at, seq, kind, target, a, b = event
            self.now = fire_at
            if trace is not None:
                trace.append((fire_at, seq, kind, target))
            handlers[kind](target, a, b, fire_at)
            if after_each is not None:
                after_each(event)


class RandomStreams:
    """Independent seeded random streams, one per draw purpose.

    Streams are keyed by label so that e.g. reselection draws never perturb
    the mining schedule; two runs with the same seed see identical sequences
    per label, across platforms.
    """

    LABELS = ("mining", "topology", "region", "reselection")

    def __init__(self, seed: int) -> None:
        self.seed = seed
        for label in self.LABELS:
            # str seeding hashes with SHA-512 internally: platform-stable.
            setattr(self, label, random.Random(f"{seed}/{label}"))

    mining: random.Random
    topology: random.Random
    region: random.Random
    reselection: random.Random
