"""Dynamic Source Routing with a promiscuous route cache and salvaging."""

from __future__ import annotations

from collections import OrderedDict

from ..sim.packet import DATA, RERR, RREP, RREQ, Packet
from .base import RoutingAgent, SendBuffer

__all__ = ["RouteCache", "DsrAgent", "is_loop_free"]

NONPROP_TIMEOUT = 0.03
FIRST_BACKOFF = 0.5
MAX_BACKOFF = 10.0
SALVAGE_BUDGET = 1
NETWORK_TTL = 255


def is_loop_free(path) -> bool:
    return len(set(path)) == len(path)


class RouteCache:
    """Source routes known to one node, every path starting at ``owner``.

    Two bounded pools share a destination index: routes learned by
    discovery and forwarding, and routes learned by tapping other
    nodes' transmissions.  Each pool evicts its oldest entry when full;
    hearing a route again counts as fresh.
    """

    def __init__(self, owner: int, primary_capacity: int = 64, tap_capacity: int = 1024):
        self.owner = owner
        self.primary: OrderedDict = OrderedDict()
        self.tap: OrderedDict = OrderedDict()
        self.capacity = {id(self.primary): primary_capacity, id(self.tap): tap_capacity}
        self._index: dict[int, dict] = {}

    def __len__(self):
        return len(self.primary) + len(self.tap)

    def paths(self):
        return list(self.primary) + list(self.tap)

    def _link(self, path):
        idx = self._index
        for n in path[1:]:
            d = idx.get(n)
            if d is None:
                idx[n] = {path: None}
            else:
                d[path] = None

    def _unlink(self, path):
        idx = self._index
        for n in path[1:]:
            d = idx.get(n)
            if d is not None:
                d.pop(path, None)
                if not d:
                    del idx[n]

    def add(self, path, tap: bool = False) -> bool:
        """Insert ``path`` (a tuple beginning with the owner)."""
        if len(path) < 2 or path[0] != self.owner:
            return False
        if path in self.primary:
            self.primary.move_to_end(path)
            return False
        if path in self.tap:
            if tap:
                self.tap.move_to_end(path)
                return False
            # Promote a tapped route that discovery confirmed.
            del self.tap[path]
            self.primary[path] = None
            return False
        if not is_loop_free(path):
            return False
        pool = self.tap if tap else self.primary
        pool[path] = None
        self._link(path)
        if len(pool) > self.capacity[id(pool)]:
            old, _ = pool.popitem(last=False)
            self._unlink(old)
        return True

    def find(self, dst: int, avoid=()) -> tuple | None:
        """Shortest cached route to ``dst`` whose hops avoid ``avoid``."""
        if dst == self.owner:
            return (self.owner,)
        cands = self._index.get(dst)
        if not cands:
            return None
        best = None
        for path in cands:
            k = path.index(dst)
            if best is not None and k + 1 >= len(best):
                continue
            sub = path[: k + 1]
            if avoid and any(n in avoid for n in sub[1:]):
                continue
            best = sub
        return best

    def remove_link(self, a: int, b: int) -> int:
        """Truncate every path using link a-b (either direction) before it."""
        hit = 0
        for pool in (self.primary, self.tap):
            for path in list(pool):
                cut = None
                for i in range(len(path) - 1):
                    u, v = path[i], path[i + 1]
                    if (u == a and v == b) or (u == b and v == a):
                        cut = i + 1
                        break
                if cut is None:
                    continue
                hit += 1
                del pool[path]
                self._unlink(path)
                short = path[:cut]
                if len(short) >= 2 and short not in self.primary and short not in self.tap:
                    pool[short] = None
                    self._link(short)
        return hit


class _Discovery:
    __slots__ = ("attempt", "timer", "started")

    def __init__(self, started):
        self.attempt = 0
        self.timer = None
        self.started = started


class DsrAgent(RoutingAgent):
    promiscuous = True

    def __init__(self, node, net, profile):
        super().__init__(node, net, profile)
        self.cache = RouteCache(node, profile.primary_cache_size, profile.tap_cache_size)
        self.buffer = SendBuffer(profile.send_buf_size, profile.buffer_lifetime, self.drop)
        self.request_id = 0
        self.seen: set = set()
        self.discoveries: dict[int, _Discovery] = {}

    # ------------------------------------------------------------ sending data
    def originate(self, pkt: Packet) -> None:
        self.dsr_send(pkt)

    def dsr_send(self, pkt: Packet) -> None:
        route = self.cache.find(pkt.dst)
        if route is not None:
            self._send_with_route(pkt, route)
            return
        self.buffer.push(pkt, self.sim.now)
        self.start_discovery(pkt.dst)

    def _send_with_route(self, pkt: Packet, route) -> None:
        pkt.source_route = route
        pkt.route_index = 0
        self.forward_data(pkt, route[1])

    def _flush(self, dst: int) -> None:
        route = self.cache.find(dst)
        if route is None:
            return
        for pkt in self.buffer.take(dst, self.sim.now):
            self._send_with_route(pkt, route)

    # ------------------------------------------------------------ discovery
    def start_discovery(self, dst: int) -> None:
        if dst in self.discoveries:
            return
        disc = _Discovery(self.sim.now)
        self.discoveries[dst] = disc
        self._send_request(dst, disc)

    def _send_request(self, dst: int, disc: _Discovery) -> None:
        self.request_id += 1
        self.seen.add((self.node, self.request_id))
        if disc.attempt == 0:
            ttl, wait = 1, NONPROP_TIMEOUT
        else:
            ttl = NETWORK_TTL
            wait = min(FIRST_BACKOFF * 2 ** (disc.attempt - 1), MAX_BACKOFF)
        pkt = self.control(RREQ, dst, ttl=ttl, body=(self.request_id, (self.node,)))
        self.channel.broadcast(self.node, pkt)
        disc.timer = self.sim.schedule(wait, "timer", self._request_timeout, dst)

    def _request_timeout(self, dst: int) -> None:
        disc = self.discoveries.get(dst)
        if disc is None:
            return
        now = self.sim.now
        if self.cache.find(dst) is not None:
            del self.discoveries[dst]
            self._flush(dst)
            return
        if not self.buffer.has(dst, now):
            del self.discoveries[dst]
            return
        disc.attempt += 1
        self._send_request(dst, disc)

    def _route_found(self, dst: int) -> None:
        disc = self.discoveries.pop(dst, None)
        if disc is not None and disc.timer is not None:
            disc.timer.cancel()
        self._flush(dst)
        # Other buffered destinations may be reachable through the new path.
        for other in self.buffer.destinations(self.sim.now):
            if other != dst and self.cache.find(other) is not None:
                d = self.discoveries.pop(other, None)
                if d is not None and d.timer is not None:
                    d.timer.cancel()
                self._flush(other)

    def handle_rreq(self, pkt: Packet, frm: int) -> None:
        req_id, record = pkt.body
        origin, target, me = pkt.src, pkt.dst, self.node
        if origin == me or me in record:
            return
        key = (origin, req_id)
        if key in self.seen:
            return
        self.seen.add(key)
        if not is_loop_free(record):
            self.net.malformed += 1
            return
        self.cache.add((me,) + tuple(reversed(record)))
        if target == me:
            self._reply(origin, record + (me,))
            return
        cached = self.cache.find(target, avoid=set(record))
        if cached is not None:
            # Gratuitous reply spliced from the local cache.
            self._reply(origin, record + cached)
            return
        if pkt.ttl > 1:
            fwd = self.control(RREQ, target, ttl=pkt.ttl - 1, body=(req_id, record + (me,)))
            fwd.src = origin
            fwd.hop_count = pkt.hop_count
            self.channel.broadcast(me, fwd)

    def _reply(self, origin: int, path: tuple) -> None:
        me = self.node
        k = path.index(me)
        back = tuple(reversed(path[: k + 1]))
        rrep = self.control(RREP, origin, ttl=NETWORK_TTL, body=path, source_route=back)
        self.channel.unicast(me, rrep, back[1])

    def handle_rrep(self, pkt: Packet, frm: int) -> None:
        path = pkt.body
        me = self.node
        if me in path:
            self.cache.add(path[path.index(me):])
        if pkt.dst == me:
            self._route_found(path[-1])
            return
        self._forward_source_routed(pkt)

    def _forward_source_routed(self, pkt: Packet) -> None:
        route = pkt.source_route
        try:
            i = route.index(self.node, pkt.route_index)
        except ValueError:
            return
        if i + 1 >= len(route):
            return
        pkt.route_index = i
        self.channel.unicast(self.node, pkt, route[i + 1])

    # ------------------------------------------------------------ maintenance
    def handle_rerr(self, pkt: Packet, frm: int) -> None:
        a, b = pkt.body
        self.cache.remove_link(a, b)
        if pkt.dst != self.node:
            self._forward_source_routed(pkt)

    def _send_rerr(self, origin: int, traversed: tuple, a: int, b: int) -> None:
        back = tuple(reversed(traversed))
        if len(back) < 2:
            return
        rerr = self.control(RERR, origin, ttl=NETWORK_TTL, body=(a, b), source_route=back)
        self.channel.unicast(self.node, rerr, back[1])

    def link_failure(self, pkt: Packet, next_hop: int, first_attempt: float) -> None:
        me = self.node
        self.cache.remove_link(me, next_hop)
        if pkt.kind != DATA:
            return
        route = pkt.source_route
        i = pkt.route_index
        if pkt.src == me and i == 0:
            # The origin simply re-sends from its cache or rediscovers.
            self.dsr_send(pkt)
            return
        self._send_rerr(pkt.src, route[: i + 1], me, next_hop)
        self.dsr_salvage(pkt, next_hop)

    def dsr_salvage(self, pkt: Packet, dead: int) -> bool:
        me = self.node
        route = pkt.source_route
        i = pkt.route_index
        if pkt.salvaged >= SALVAGE_BUDGET:
            self.drop(pkt, "salvage_budget")
            return False
        prefix = route[:i]
        alt = self.cache.find(pkt.dst, avoid=set(prefix))
        if alt is None:
            self.drop(pkt, "no_salvage_route")
            return False
        pkt.source_route = prefix + alt
        pkt.salvaged += 1
        self.forward_data(pkt, alt[1])
        return True

    # ------------------------------------------------------------ receive path
    def dsr_promiscuous_learn(self, pkt: Packet, frm: int) -> None:
        route = pkt.source_route
        if not route:
            return
        me = self.node
        if me in route:
            return
        try:
            i = route.index(frm)
        except ValueError:
            return
        add = self.cache.add
        add((me,) + route[i:], tap=True)
        if i > 0:
            add((me,) + tuple(reversed(route[: i + 1])), tap=True)

    def overhear(self, pkt: Packet, frm: int, to: int) -> None:
        if pkt.kind == RERR:
            self.cache.remove_link(*pkt.body)
        if pkt.source_route:
            self.dsr_promiscuous_learn(pkt, frm)

    def receive(self, pkt: Packet, frm: int) -> None:
        kind = pkt.kind
        if kind == DATA:
            self._receive_data(pkt)
        elif kind == RREQ:
            self.handle_rreq(pkt, frm)
        elif kind == RREP:
            self.handle_rrep(pkt, frm)
        elif kind == RERR:
            self.handle_rerr(pkt, frm)

    def _receive_data(self, pkt: Packet) -> None:
        me = self.node
        route = pkt.source_route
        i = pkt.route_index + 1
        pkt.route_index = i
        if pkt.dst == me:
            self.deliver_local(pkt)
            return
        if i >= len(route) - 1 or route[i] != me:
            self.drop(pkt, "bad_route")
            return
        self.cache.add(route[i:])
        self.forward_data(pkt, route[i + 1])
