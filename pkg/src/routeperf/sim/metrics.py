from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field

__all__ = ["MetricsCollector", "MetricsReport"]


@dataclass(frozen=True)
class MetricsReport:
    data_sent: int
    data_delivered: int
    data_dropped: int
    data_in_flight: int
    control_tx: int
    delay_sum: float
    max_hops: int = 0
    drops: tuple = ()
    delays: tuple | None = None

    @property
    def pdr(self) -> float:
        return self.data_delivered / self.data_sent if self.data_sent else 0.0

    @property
    def ae2ed(self) -> float | None:
        return self.delay_sum / self.data_delivered if self.data_delivered else None

    @property
    def nro(self) -> float | None:
        return self.control_tx / self.data_delivered if self.data_delivered else None

    @property
    def conserved(self) -> bool:
        return self.data_sent == self.data_delivered + self.data_dropped + self.data_in_flight


class MetricsCollector:
    """Per-run counters.  Only packets originated after ``warmup`` count."""

    def __init__(self, sim, warmup: float, keep_delays: bool = False):
        self.sim = sim
        self.warmup = warmup
        self.data_sent = 0
        self.data_delivered = 0
        self.data_dropped = 0
        self.control_tx = 0
        self.delay_sum = 0.0
        self.max_hops = 0
        self.drop_reasons: Counter = Counter()
        self.outstanding: set[int] = set()
        self.delays: list[float] | None = [] if keep_delays else None

    def count_control(self) -> None:
        """One control packet left one node's radio (one hop)."""
        if self.sim.now >= self.warmup:
            self.control_tx += 1

    def originate(self, pkt) -> None:
        if self.sim.now >= self.warmup:
            pkt.counted = True
            self.data_sent += 1
            self.outstanding.add(pkt.uid)

    def deliver(self, pkt) -> None:
        if not pkt.counted or pkt.uid not in self.outstanding:
            return
        self.outstanding.discard(pkt.uid)
        self.data_delivered += 1
        delay = self.sim.now - pkt.origin_time
        self.delay_sum += delay
        if pkt.hop_count > self.max_hops:
            self.max_hops = pkt.hop_count
        if self.delays is not None:
            self.delays.append(delay)

    def drop(self, pkt, reason: str) -> None:
        if not pkt.counted or pkt.uid not in self.outstanding:
            return
        self.outstanding.discard(pkt.uid)
        self.data_dropped += 1
        self.drop_reasons[reason] += 1

    def report(self) -> MetricsReport:
        return MetricsReport(
            data_sent=self.data_sent,
            data_delivered=self.data_delivered,
            data_dropped=self.data_dropped,
            data_in_flight=len(self.outstanding),
            control_tx=self.control_tx,
            delay_sum=self.delay_sum,
            max_hops=self.max_hops,
            drops=tuple(sorted(self.drop_reasons.items())),
            delays=tuple(self.delays) if self.delays is not None else None,
        )
