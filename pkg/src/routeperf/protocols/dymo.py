"""DYMO: on-demand hop-by-hop routing with expanding ring search and hellos."""

from __future__ import annotations

from dataclasses import dataclass

from ..sim.packet import DATA, HELLO, RERR, RREP, RREQ, Packet
from .base import RoutingAgent, SendBuffer

__all__ = ["DymoRouteEntry", "DymoAgent"]

DEFAULT_BUFFER = 64
MISSED_HELLOS = 2


@dataclass(slots=True)
class DymoRouteEntry:
    dest: int
    next_hop: int
    seq_no: int
    hop_count: int
    lifetime: float
    valid: bool = True

    def usable(self, now: float) -> bool:
        return self.valid and self.lifetime >= now


class _Search:
    __slots__ = ("ring", "timer")

    def __init__(self):
        self.ring = 0
        self.timer = None


class DymoAgent(RoutingAgent):
    def __init__(self, node, net, profile):
        super().__init__(node, net, profile)
        self.seq_no = 0
        self.routes: dict[int, DymoRouteEntry] = {}
        self.neighbors: dict[int, float] = {}
        self._watch: set[int] = set()
        self.seen: set = set()
        self.buffer = SendBuffer(DEFAULT_BUFFER, profile.buffer_lifetime, self.drop)
        self.searches: dict[int, _Search] = {}
        self.rings = profile.ring_schedule()
        # (seq_no, -hop_count) of every replacement, per destination.
        self.history = None

    def start(self) -> None:
        first = self.net.rng.uniform(0.0, self.profile.hello_interval)
        self.sim.schedule(first, "timer", self._hello_tick)

    # ------------------------------------------------------------ routes
    def update_route(self, dest: int, next_hop: int, seq_no: int, hop_count: int) -> bool:
        if dest == self.node:
            return False
        now = self.sim.now
        cur = self.routes.get(dest)
        if cur is not None:
            if seq_no < cur.seq_no or (seq_no == cur.seq_no and hop_count >= cur.hop_count):
                if not (cur.valid and seq_no == cur.seq_no and next_hop == cur.next_hop):
                    return False
                cur.lifetime = now + self.profile.route_timeout
                return False
        self.routes[dest] = DymoRouteEntry(
            dest, next_hop, seq_no, hop_count, now + self.profile.route_timeout
        )
        if self.history is not None:
            self.history.setdefault(dest, []).append((seq_no, -hop_count))
        return True

    def route_to(self, dest: int):
        r = self.routes.get(dest)
        if r is None or not r.usable(self.sim.now):
            return None
        return r

    # ------------------------------------------------------------ discovery
    def dymo_discover(self, dest: int) -> None:
        if dest in self.searches:
            return
        search = _Search()
        self.searches[dest] = search
        self._emit_rreq(dest, search)

    def _emit_rreq(self, dest: int, search: _Search) -> None:
        self.seq_no += 1
        ttl = self.rings[search.ring]
        pkt = self.control(RREQ, dest, ttl=ttl, seq_no=self.seq_no)
        self.seen.add((self.node, self.seq_no))
        self.channel.broadcast(self.node, pkt)
        search.timer = self.sim.schedule(
            self.profile.rreq_wait_time, "timer", self._rreq_timeout, dest
        )

    def _rreq_timeout(self, dest: int) -> None:
        search = self.searches.get(dest)
        if search is None:
            return
        if self.route_to(dest) is not None:
            self._search_done(dest)
            return
        search.ring += 1
        if search.ring >= len(self.rings):
            del self.searches[dest]
            self.buffer.drop_all(dest, self.sim.now, "discovery_failed")
            return
        self._emit_rreq(dest, search)

    def _search_done(self, dest: int) -> None:
        search = self.searches.pop(dest, None)
        if search is not None and search.timer is not None:
            search.timer.cancel()
        r = self.route_to(dest)
        if r is None:
            return
        for pkt in self.buffer.take(dest, self.sim.now):
            self.forward_data(pkt, r.next_hop)

    def _handle_rreq(self, pkt: Packet, frm: int) -> None:
        origin, me = pkt.src, self.node
        if origin == me:
            return
        key = (origin, pkt.seq_no)
        if key in self.seen:
            return
        self.seen.add(key)
        self.update_route(origin, frm, pkt.seq_no, pkt.hop_count)
        if pkt.dst == me:
            self.seq_no += 1
            rrep = self.control(RREP, origin, ttl=255, seq_no=self.seq_no)
            back = self.route_to(origin)
            if back is not None:
                self.channel.unicast(me, rrep, back.next_hop)
            return
        if pkt.ttl > 1:
            fwd = pkt.copy(self.net.uid())
            fwd.ttl = pkt.ttl - 1
            self.channel.broadcast(me, fwd)

    def _handle_rrep(self, pkt: Packet, frm: int) -> None:
        target, me = pkt.src, self.node
        self.update_route(target, frm, pkt.seq_no, pkt.hop_count)
        if pkt.dst == me:
            if target in self.searches:
                self._search_done(target)
            return
        back = self.route_to(pkt.dst)
        if back is None:
            return
        self.channel.unicast(me, pkt, back.next_hop)

    # ------------------------------------------------------------ link sensing
    def _hello_tick(self) -> None:
        self.channel.broadcast(self.node, self.control(HELLO, -1, ttl=1))
        self.sim.schedule(self.profile.hello_interval, "timer", self._hello_tick)

    def _heard(self, n: int) -> None:
        self.neighbors[n] = self.sim.now
        if n not in self._watch:
            self._watch.add(n)
            self.sim.schedule(MISSED_HELLOS * self.profile.hello_interval, "timer",
                              self._check_neighbor, n)

    def _check_neighbor(self, n: int) -> None:
        # One pending check per neighbor, pushed back while it stays audible.
        last = self.neighbors.get(n)
        if last is None:
            self._watch.discard(n)
            return
        deadline = last + MISSED_HELLOS * self.profile.hello_interval
        if self.sim.now >= deadline:
            self._watch.discard(n)
            self._neighbor_lost(n)
        else:
            self.sim.schedule_at(deadline, "timer", self._check_neighbor, n)

    def _neighbor_lost(self, dead: int) -> None:
        self.neighbors.pop(dead, None)
        lost = []
        for dest, r in self.routes.items():
            if r.valid and r.next_hop == dead:
                r.valid = False
                lost.append((dest, r.seq_no))
        if lost:
            self.channel.broadcast(self.node, self.control(RERR, -1, ttl=1, body=tuple(lost)))

    def _handle_rerr(self, pkt: Packet, frm: int) -> None:
        again = []
        for dest, seq in pkt.body:
            r = self.routes.get(dest)
            if r is not None and r.valid and r.next_hop == frm:
                r.valid = False
                again.append((dest, max(seq, r.seq_no)))
        if again:
            self.channel.broadcast(self.node, self.control(RERR, -1, ttl=1, body=tuple(again)))

    def link_failure(self, pkt: Packet, next_hop: int, first_attempt: float) -> None:
        self._neighbor_lost(next_hop)
        if pkt.kind != DATA:
            return
        if pkt.src == self.node:
            self.buffer.push(pkt, self.sim.now)
            self.dymo_discover(pkt.dst)
        else:
            self.drop(pkt, "link_break")

    # ------------------------------------------------------------ data path
    def originate(self, pkt: Packet) -> None:
        r = self.route_to(pkt.dst)
        if r is not None:
            r.lifetime = self.sim.now + self.profile.route_timeout
            self.forward_data(pkt, r.next_hop)
            return
        self.buffer.push(pkt, self.sim.now)
        self.dymo_discover(pkt.dst)

    def receive(self, pkt: Packet, frm: int) -> None:
        self._heard(frm)
        kind = pkt.kind
        if kind == DATA:
            self._receive_data(pkt, frm)
        elif kind == HELLO:
            pass
        elif kind == RREQ:
            self._handle_rreq(pkt, frm)
        elif kind == RREP:
            self._handle_rrep(pkt, frm)
        elif kind == RERR:
            self._handle_rerr(pkt, frm)

    def _receive_data(self, pkt: Packet, frm: int) -> None:
        if pkt.dst == self.node:
            self.deliver_local(pkt)
            return
        r = self.route_to(pkt.dst)
        if r is None:
            self.drop(pkt, "no_route")
            known = self.routes.get(pkt.dst)
            seq = known.seq_no if known is not None else 0
            self.channel.broadcast(self.node, self.control(RERR, -1, ttl=1, body=((pkt.dst, seq),)))
            return
        r.lifetime = self.sim.now + self.profile.route_timeout
        self.forward_data(pkt, r.next_hop)
