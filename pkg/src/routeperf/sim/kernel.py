"""Discrete-event core: a (time, seq)-ordered queue and seeded PRNG streams."""

from __future__ import annotations

import hashlib
import heapq
import random
from dataclasses import dataclass, field
from typing import Any, Callable

__all__ = ["Event", "SchedulingError", "Simulator", "rng_stream"]


class SchedulingError(RuntimeError):
    pass


@dataclass(eq=False, slots=True)
class Event:
    fire_time: float
    seq: int
    kind: str
    callback: Callable[..., Any]
    payload: tuple = ()
    cancelled: bool = field(default=False)

    def cancel(self) -> None:
        self.cancelled = True


class Simulator:
    """Single-threaded event loop; ties on ``fire_time`` run in insertion order."""

    def __init__(self):
        self.now = 0.0
        self._queue: list = []
        self._seq = 0
        self.dispatched = 0

    def schedule_at(self, fire_time: float, kind: str, callback, *payload) -> Event:
        if fire_time < self.now:
            raise SchedulingError(f"cannot schedule {kind} at {fire_time} < now={self.now}")
        ev = Event(fire_time, self._seq, kind, callback, payload)
        self._seq += 1
        heapq.heappush(self._queue, (fire_time, ev.seq, ev))
        return ev

    def schedule(self, delay: float, kind: str, callback, *payload) -> Event:
        return self.schedule_at(self.now + delay, kind, callback, *payload)

    def pending(self) -> int:
        return sum(1 for _, _, ev in self._queue if not ev.cancelled)

    def run(self, until: float | None = None) -> None:
        queue = self._queue
        pop = heapq.heappop
        while queue:
            fire_time, _, ev = queue[0]
            if until is not None and fire_time > until:
                break
            pop(queue)
            if ev.cancelled:
                continue
            self.now = fire_time
            self.dispatched += 1
            ev.callback(*ev.payload)
        if until is not None and until > self.now:
            self.now = until


def rng_stream(run_seed: int, stream_label: str) -> random.Random:
    """Independent Mersenne-Twister stream keyed by (seed, label).

    The seed material is a SHA-256 digest, so streams are stable across
    processes and platforms (unlike ``hash()``).
    """
    digest = hashlib.sha256(f"{int(run_seed)}:{stream_label}".encode()).digest()
    return random.Random(int.from_bytes(digest, "big"))
