"""Destination-Sequenced Distance Vector routing."""

from __future__ import annotations

import math
from dataclasses import dataclass

from ..sim.packet import DSDV_UPDATE, Packet
from .base import RoutingAgent

__all__ = ["RoutingTableEntry", "DsdvAgent", "INFINITY"]

INFINITY = math.inf


@dataclass(slots=True)
class RoutingTableEntry:
    dest: int
    next_hop: int
    metric: float
    seq_no: int
    install_time: float
    settling: bool = False

    def better_than(self, seq_no: int, metric: float) -> bool:
        """True if this entry is preferred over an advertisement (seq_no, metric)."""
        return self.seq_no > seq_no or (self.seq_no == seq_no and self.metric <= metric)


class DsdvAgent(RoutingAgent):
    """Table-driven agent: periodic full dumps plus triggered updates.

    A destination advertises itself with even sequence numbers; a node
    that loses its next hop stamps the route with the next odd number and
    infinite metric and floods that at once.  Other route changes wait for
    the settling time before they are advertised.
    """

    def __init__(self, node, net, profile):
        super().__init__(node, net, profile)
        self.seq_no = 0
        self.table: dict[int, RoutingTableEntry] = {
            node: RoutingTableEntry(node, node, 0, 0, 0.0)
        }
        self._dirty: set[int] = set()
        self._broken: set[int] = set()
        self._settle_timer = None
        self._break_timer = None
        self._pending_breaks: set[int] = set()

    def start(self) -> None:
        first = self.net.rng.uniform(0.0, self.profile.periodic_update)
        self.sim.schedule(first, "timer", self.periodic_dump)

    # ------------------------------------------------------------ updates
    def _advertise(self, dests) -> None:
        entries = tuple((d, e.metric, e.seq_no) for d in dests if (e := self.table.get(d)))
        if not entries:
            return
        pkt = self.control(DSDV_UPDATE, -1, ttl=1, body=entries)
        self.channel.broadcast(self.node, pkt)

    def periodic_dump(self) -> None:
        self.seq_no += 2
        own = self.table[self.node]
        own.seq_no = self.seq_no
        own.install_time = self.sim.now
        self._dirty.clear()
        self._advertise(sorted(self.table))
        self.sim.schedule(self.profile.periodic_update, "timer", self.periodic_dump)

    def _flush_settled(self) -> None:
        self._settle_timer = None
        dirty = sorted(self._dirty)
        self._dirty.clear()
        self._advertise(dirty)

    def _flush_broken(self) -> None:
        self._break_timer = None
        broken = sorted(self._broken)
        self._broken.clear()
        self._advertise(broken)

    def _note_change(self, dest: int, broken: bool) -> None:
        if broken:
            self._broken.add(dest)
            if self._break_timer is None:
                self._break_timer = self.sim.schedule(0.0, "timer", self._flush_broken)
        else:
            self._dirty.add(dest)
            if self._settle_timer is None:
                self._settle_timer = self.sim.schedule(
                    self.profile.settling_time, "timer", self._flush_settled
                )

    def _merge(self, frm: int, entries) -> None:
        now = self.sim.now
        table = self.table
        for dest, metric, seq in entries:
            if dest == self.node:
                continue
            new_metric = metric + 1
            cur = table.get(dest)
            if cur is None:
                if new_metric == INFINITY:
                    continue
                table[dest] = RoutingTableEntry(dest, frm, new_metric, seq, now, True)
                self._note_change(dest, False)
                continue
            if cur.better_than(seq, new_metric):
                continue
            changed = cur.metric != new_metric or cur.next_hop != frm
            cur.next_hop = frm
            cur.metric = new_metric
            cur.seq_no = seq
            cur.install_time = now
            if changed:
                cur.settling = new_metric != INFINITY
                self._note_change(dest, new_metric == INFINITY)

    # ------------------------------------------------------------ link breaks
    def link_failure(self, pkt: Packet, next_hop: int, first_attempt: float) -> None:
        self.drop(pkt, "link_break")
        if next_hop in self._pending_breaks:
            return
        self._pending_breaks.add(next_hop)
        at = max(self.sim.now, first_attempt + self.profile.trig_notify)
        self.sim.schedule_at(at, "timer", self.handle_link_break, next_hop)

    def handle_link_break(self, dead: int) -> None:
        self._pending_breaks.discard(dead)
        for dest, e in self.table.items():
            if e.next_hop == dead and e.metric != INFINITY and dest != self.node:
                e.metric = INFINITY
                if e.seq_no % 2 == 0:
                    e.seq_no += 1
                e.install_time = self.sim.now
                self._note_change(dest, True)

    # ------------------------------------------------------------ data path
    def next_hop(self, dst: int) -> int | None:
        e = self.table.get(dst)
        if e is None or e.metric == INFINITY:
            return None
        return e.next_hop

    def originate(self, pkt: Packet) -> None:
        self._route(pkt)

    def _route(self, pkt: Packet) -> None:
        nh = self.next_hop(pkt.dst)
        if nh is None:
            self.drop(pkt, "no_route")
            return
        self.forward_data(pkt, nh)

    def receive(self, pkt: Packet, frm: int) -> None:
        if pkt.kind == DSDV_UPDATE:
            self._merge(frm, pkt.body)
            return
        if pkt.kind != "data":
            return
        if pkt.dst == self.node:
            self.deliver_local(pkt)
            return
        self._route(pkt)
