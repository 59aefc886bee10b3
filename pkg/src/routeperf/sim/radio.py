"""Unit-disk radio with receiver-side collisions and a retrying unicast MAC.

Each node sends its frames one at a time from a FIFO queue; a frame
occupies the air for ``per_hop_latency``.  With carrier sense on, a node
that hears a frame still on the air defers until it ends plus a random
slot.  Two frames whose start times at a common receiver are closer than
``collision_window`` are both lost there, so hidden terminals still
collide.  Unicast frames are retried up to ``retry_limit`` times, after
which the sender's routing agent gets a link-failure callback.
"""

from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass

from .packet import Packet

__all__ = ["RadioModel", "in_range", "Channel", "UnknownNextHop"]


class UnknownNextHop(LookupError):
    pass


@dataclass(frozen=True)
class RadioModel:
    range: float = 250.0
    collision_window: float = 0.002
    per_hop_latency: float = 0.002
    retry_limit: int = 4
    retry_backoff: float = 0.01
    loss_prob: float = 0.0
    broadcast_jitter: float = 0.01
    carrier_sense: bool = True
    contention_window: float = 0.001

    def __post_init__(self):
        if not self.range > 0:
            raise ValueError("range must be > 0")
        if self.retry_limit < 1:
            raise ValueError("retry_limit must be >= 1")
        if self.collision_window < 0 or self.per_hop_latency <= 0 or self.retry_backoff < 0:
            raise ValueError("timing parameters must be non-negative (latency > 0)")
        if not 0 <= self.loss_prob < 1:
            raise ValueError("loss_prob must be in [0, 1)")
        if self.broadcast_jitter < 0 or self.contention_window < 0:
            raise ValueError("broadcast_jitter and contention_window must be >= 0")


def in_range(a, b, radio: RadioModel) -> bool:
    return math.hypot(a[0] - b[0], a[1] - b[1]) <= radio.range


class _Frame:
    __slots__ = ("sender", "pkt", "next_hop", "start", "receivers", "lost", "attempt",
                 "first_start", "ready")

    def __init__(self, sender, pkt, next_hop, attempt, first_start):
        self.sender = sender
        self.pkt = pkt
        self.next_hop = next_hop
        self.attempt = attempt
        self.first_start = first_start
        self.start = 0.0
        self.ready = 0.0
        self.receivers = ()
        self.lost = None


class Channel:
    """Shared medium for one run.

    ``agents[i]`` must provide ``receive(pkt, frm)``,
    ``link_failure(pkt, next_hop, first_attempt_time)`` and, when
    promiscuous, ``overhear(pkt, frm, to)``.
    """

    def __init__(self, sim, mobility, radio: RadioModel, metrics, rng, wrap_x: float | None = None):
        self.sim = sim
        self.mobility = mobility
        self.radio = radio
        self.metrics = metrics
        self.rng = rng
        self.wrap_x = wrap_x
        self.count = mobility.count
        self.agents = [None] * self.count
        self.promiscuous = [False] * self.count
        self.busy_until = [0.0] * self.count
        # End of the latest frame each node can hear (carrier sense).
        self.sensed_until = [0.0] * self.count
        self._queue = [deque() for _ in range(self.count)]
        self._serving = [False] * self.count
        # Start time and frame of the latest reception heard by each node.
        self._last_rx_start = [-math.inf] * self.count
        self._last_rx_frame = [None] * self.count
        self._pos_time = None
        self._pos = None
        self._r2 = radio.range * radio.range

    # ------------------------------------------------------------ geometry
    def positions(self, t: float):
        if t != self._pos_time:
            pos = self.mobility.position
            self._pos = [pos(i, t) for i in range(self.count)]
            self._pos_time = t
        return self._pos

    def neighbors(self, node: int, t: float | None = None) -> list[int]:
        pos = self.positions(self.sim.now if t is None else t)
        x0, y0 = pos[node]
        r2 = self._r2
        wrap = self.wrap_x
        out = []
        for j, (x, y) in enumerate(pos):
            if j == node:
                continue
            dx = abs(x - x0)
            if wrap is not None and dx > wrap * 0.5:
                dx = wrap - dx
            dy = y - y0
            if dx * dx + dy * dy <= r2:
                out.append(j)
        return out

    # ------------------------------------------------------------ sending
    def broadcast(self, sender: int, pkt: Packet, jitter: bool = True) -> None:
        delay = self.rng.uniform(0.0, self.radio.broadcast_jitter) if jitter else 0.0
        self._start(_Frame(sender, pkt, None, 1, None), delay)

    def unicast(self, sender: int, pkt: Packet, next_hop: int) -> None:
        if not 0 <= next_hop < self.count or next_hop == sender:
            raise UnknownNextHop(f"node {sender} has no next hop {next_hop}")
        self._start(_Frame(sender, pkt, next_hop, 1, None), 0.0)

    def _start(self, frame: _Frame, delay: float) -> None:
        frame.ready = self.sim.now + delay
        node = frame.sender
        self._queue[node].append(frame)
        if not self._serving[node]:
            self._serving[node] = True
            self._service(node)

    def _service(self, node: int) -> None:
        q = self._queue[node]
        if not q:
            self._serving[node] = False
            return
        sim = self.sim
        now = sim.now
        frame = q[0]
        at = max(frame.ready, self.busy_until[node])
        if self.radio.carrier_sense and self.sensed_until[node] > max(at, now):
            at = self.sensed_until[node] + self.rng.uniform(0.0, self.radio.contention_window)
        if at > now:
            sim.schedule_at(at, "tx-start", self._service, node)
            return
        q.popleft()
        self.busy_until[node] = now + self.radio.per_hop_latency
        self._on_air(frame)
        sim.schedule_at(self.busy_until[node], "tx-start", self._service, node)

    def _on_air(self, frame: _Frame) -> None:
        sim = self.sim
        now = sim.now
        frame.start = now
        if frame.first_start is None:
            frame.first_start = now
            if frame.pkt.kind != "data":
                self.metrics.count_control()
        receivers = self.neighbors(frame.sender, now)
        frame.receivers = receivers
        window = self.radio.collision_window
        loss = self.radio.loss_prob
        lost = None
        last_start, last_frame = self._last_rx_start, self._last_rx_frame
        end = now + self.radio.per_hop_latency
        sensed = self.sensed_until
        for r in receivers:
            if sensed[r] < end:
                sensed[r] = end
            if window > 0 and now - last_start[r] < window:
                other = last_frame[r]
                if other is not None:
                    if other.lost is None:
                        other.lost = set()
                    other.lost.add(r)
                if lost is None:
                    lost = set()
                lost.add(r)
            elif loss > 0 and self.rng.random() < loss:
                if lost is None:
                    lost = set()
                lost.add(r)
            last_start[r] = now
            last_frame[r] = frame
        if frame.lost is None:
            frame.lost = lost
        elif lost:
            frame.lost |= lost
        sim.schedule_at(now + self.radio.per_hop_latency, "packet-arrival", self._on_arrival, frame)

    def _on_arrival(self, frame: _Frame) -> None:
        lost = frame.lost or ()
        pkt = frame.pkt
        agents = self.agents
        if frame.next_hop is None:
            for r in frame.receivers:
                if r not in lost:
                    copy = pkt.copy(pkt.uid)
                    copy.hop_count += 1
                    agents[r].receive(copy, frame.sender)
            return
        target = frame.next_hop
        got_it = target in frame.receivers and target not in lost
        promisc = self.promiscuous
        for r in frame.receivers:
            if r != target and promisc[r] and r not in lost:
                agents[r].overhear(pkt, frame.sender, target)
        if got_it:
            pkt.hop_count += 1
            agents[target].receive(pkt, frame.sender)
            return
        if frame.attempt < self.radio.retry_limit:
            retry = _Frame(frame.sender, pkt, target, frame.attempt + 1, frame.first_start)
            # Random slack keeps two colliding senders from retrying in lockstep.
            backoff = self.radio.retry_backoff * (1.0 + self.rng.random())
            self._start(retry, backoff)
        else:
            agents[frame.sender].link_failure(pkt, target, frame.first_start)
