"""Shared pieces of the routing agents: profiles, send buffers, node glue."""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass

from ..sim.packet import Packet

__all__ = ["ProtocolProfile", "profile_for", "SendBuffer", "RoutingAgent", "PROTOCOLS", "VARIANTS"]

PROTOCOLS = ("dsdv", "dsr", "dymo")
VARIANTS = ("default", "modified")


@dataclass(frozen=True)
class ProtocolProfile:
    protocol: str
    variant: str = "default"
    send_buf_size: int = 64
    tap_cache_size: int = 1024
    ttl_net_diameter: int = 10
    rreq_wait_time: float = 1.0
    hello_interval: float = 1.0
    periodic_update: float = 15.0
    trig_notify: float = 0.8
    buffer_lifetime: float = 30.0
    settling_time: float = 2.0
    route_timeout: float = 5.0
    primary_cache_size: int = 64
    ers_increment: int = 2
    ers_final_retries: int = 2

    def __post_init__(self):
        if self.protocol not in PROTOCOLS:
            raise ValueError(f"unknown protocol {self.protocol!r}")
        if self.variant not in VARIANTS:
            raise ValueError(f"unknown variant {self.variant!r}")
        for name in ("send_buf_size", "tap_cache_size", "ttl_net_diameter", "primary_cache_size",
                     "ers_increment"):
            if getattr(self, name) < 1:
                raise ValueError(f"{name} must be positive")
        for name in ("rreq_wait_time", "hello_interval", "periodic_update", "trig_notify",
                     "buffer_lifetime", "settling_time", "route_timeout"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be positive")

    @property
    def label(self) -> str:
        return f"{self.protocol}-{'def' if self.variant == 'default' else 'mod'}"

    def ring_schedule(self) -> list[int]:
        """TTLs of successive expanding-ring attempts."""
        rings = []
        ttl = 1
        while ttl < self.ttl_net_diameter:
            rings.append(ttl)
            ttl += self.ers_increment
        rings.extend([self.ttl_net_diameter] * (1 + self.ers_final_retries))
        return rings


def profile_for(protocol: str, variant: str = "default", **overrides) -> ProtocolProfile:
    """Default or modified parameter set for ``protocol``.

    The modified DSR doubles the send buffer and quarters the tap cache;
    the modified DYMO widens the search diameter to 30 hops and shortens
    the RREQ wait to 600 ms.  DSDV has a single profile.
    """
    base = dict(protocol=protocol, variant=variant)
    if variant == "modified":
        if protocol == "dsr":
            base.update(send_buf_size=128, tap_cache_size=256)
        elif protocol == "dymo":
            base.update(ttl_net_diameter=30, rreq_wait_time=0.6)
    base.update(overrides)
    return ProtocolProfile(**base)


class SendBuffer:
    """Packets waiting for a route; drop-oldest when full, bounded lifetime."""

    def __init__(self, capacity: int, lifetime: float, on_drop):
        self.capacity = capacity
        self.lifetime = lifetime
        self.on_drop = on_drop
        self._q: deque = deque()

    def __len__(self):
        return len(self._q)

    def expire(self, now: float) -> None:
        q = self._q
        while q and now - q[0][0] > self.lifetime:
            _, pkt = q.popleft()
            self.on_drop(pkt, "buffer_timeout")

    def push(self, pkt: Packet, now: float) -> None:
        self.expire(now)
        if len(self._q) >= self.capacity:
            _, old = self._q.popleft()
            self.on_drop(old, "buffer_full")
        self._q.append((now, pkt))

    def has(self, dst: int, now: float) -> bool:
        self.expire(now)
        return any(p.dst == dst for _, p in self._q)

    def destinations(self, now: float) -> list[int]:
        self.expire(now)
        seen = {}
        for _, p in self._q:
            seen.setdefault(p.dst, None)
        return list(seen)

    def take(self, dst: int, now: float) -> list[Packet]:
        self.expire(now)
        keep, out = deque(), []
        for item in self._q:
            if item[1].dst == dst:
                out.append(item[1])
            else:
                keep.append(item)
        self._q = keep
        return out

    def drop_all(self, dst: int, now: float, reason: str) -> int:
        pkts = self.take(dst, now)
        for p in pkts:
            self.on_drop(p, reason)
        return len(pkts)


class RoutingAgent:
    """One node's routing layer.  Subclasses implement the protocol."""

    promiscuous = False

    def __init__(self, node: int, net, profile: ProtocolProfile):
        self.node = node
        self.net = net
        self.profile = profile
        self.sim = net.sim
        self.channel = net.channel
        self.metrics = net.metrics

    # hooks ---------------------------------------------------------------
    def start(self) -> None:
        pass

    def originate(self, pkt: Packet) -> None:
        raise NotImplementedError

    def receive(self, pkt: Packet, frm: int) -> None:
        raise NotImplementedError

    def overhear(self, pkt: Packet, frm: int, to: int) -> None:
        pass

    def link_failure(self, pkt: Packet, next_hop: int, first_attempt: float) -> None:
        raise NotImplementedError

    # helpers -------------------------------------------------------------
    def deliver_local(self, pkt: Packet) -> None:
        self.metrics.deliver(pkt)

    def drop(self, pkt: Packet, reason: str) -> None:
        if pkt.kind == "data":
            self.metrics.drop(pkt, reason)

    def control(self, kind: str, dst: int, ttl: int = 1, **fields) -> Packet:
        return Packet(self.net.uid(), kind, self.node, dst, self.sim.now, ttl=ttl, **fields)

    def forward_data(self, pkt: Packet, next_hop: int) -> None:
        if pkt.ttl <= 0:
            self.drop(pkt, "ttl")
            return
        pkt.ttl -= 1
        self.channel.unicast(self.node, pkt, next_hop)
