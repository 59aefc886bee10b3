"""Wiring for one simulation run: kernel, channel, agents and CBR traffic."""

from __future__ import annotations

from ..protocols.base import ProtocolProfile
from ..protocols.dsdv import DsdvAgent
from ..protocols.dsr import DsrAgent
from ..protocols.dymo import DymoAgent
from .kernel import Simulator, rng_stream
from .metrics import MetricsCollector
from .packet import DATA, Packet, UidSource
from .radio import Channel, RadioModel

__all__ = ["Network", "AGENTS", "pick_flows"]

AGENTS = {"dsdv": DsdvAgent, "dsr": DsrAgent, "dymo": DymoAgent}


def pick_flows(node_count: int, sources: int, rng) -> list[tuple[int, int]]:
    """Source/destination pairs drawn without replacement.

    Destinations are distinct from each other and from their own source
    while nodes remain; beyond that they may repeat.
    """
    if node_count < 2 or sources <= 0:
        return []
    srcs = rng.sample(range(node_count), min(sources, node_count))
    used: set[int] = set()
    flows = []
    for s in srcs:
        cands = [n for n in range(node_count) if n != s and n not in used]
        if not cands:
            cands = [n for n in range(node_count) if n != s]
        d = cands[rng.randrange(len(cands))]
        used.add(d)
        flows.append((s, d))
    return flows


class Network:
    def __init__(self, mobility, radio: RadioModel, profile: ProtocolProfile, seed: int,
                 warmup: float = 50.0, wrap_x: float | None = None, keep_delays: bool = False):
        self.sim = Simulator()
        self.seed = seed
        self.metrics = MetricsCollector(self.sim, warmup, keep_delays=keep_delays)
        self.rng = rng_stream(seed, "protocol")
        self.channel = Channel(self.sim, mobility, radio, self.metrics,
                               rng_stream(seed, "channel"), wrap_x=wrap_x)
        self.uid = UidSource()
        self.malformed = 0
        self.node_count = mobility.count
        cls = AGENTS[profile.protocol]
        self.agents = [cls(i, self, profile) for i in range(self.node_count)]
        for i, agent in enumerate(self.agents):
            self.channel.agents[i] = agent
            self.channel.promiscuous[i] = agent.promiscuous
        self.flows: list[tuple[int, int]] = []

    def start(self) -> None:
        for agent in self.agents:
            agent.start()

    def add_cbr(self, flows, rate: float, start: float, stop: float, size: int, rng) -> None:
        self.flows.extend(flows)
        interval = 1.0 / rate
        for src, dst in flows:
            t0 = start + rng.uniform(0.0, interval)
            if t0 < stop:
                self.sim.schedule_at(t0, "traffic-generation", self._cbr_tick, src, dst,
                                     interval, stop, size)

    def _cbr_tick(self, src, dst, interval, stop, size) -> None:
        pkt = Packet(self.uid(), DATA, src, dst, self.sim.now,
                     ttl=max(1, self.node_count - 1), size=size)
        self.metrics.originate(pkt)
        self.agents[src].originate(pkt)
        nxt = self.sim.now + interval
        if nxt < stop:
            self.sim.schedule_at(nxt, "traffic-generation", self._cbr_tick, src, dst,
                                 interval, stop, size)

    def run(self, until: float):
        self.sim.run(until)
        return self.metrics.report()
