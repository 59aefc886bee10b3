import pytest
from hypothesis import given, settings, strategies as st

from routeperf.mobility import TraceMobility
from routeperf.protocols.base import SendBuffer
from routeperf.protocols.dsr import RouteCache, is_loop_free
from routeperf.sim.packet import DATA, RERR, RREP, RREQ, Packet

from simtools import data_packet, make_network, send, tap_broadcasts, tap_deliveries


# ---------------------------------------------------------------- cache

def test_cache_rejects_cycles_and_foreign_paths():
    c = RouteCache(0)
    assert not c.add((0, 1, 2, 1, 3))
    assert not c.add((5, 1))
    assert not c.add((0,))
    assert c.add((0, 1, 2))
    assert c.find(2) == (0, 1, 2) and c.find(1) == (0, 1)


def test_cache_prefers_shortest_and_avoids():
    c = RouteCache(0)
    c.add((0, 1, 2, 3))
    c.add((0, 4, 3))
    assert c.find(3) == (0, 4, 3)
    assert c.find(3, avoid={4}) == (0, 1, 2, 3)
    assert c.find(3, avoid={4, 2}) is None


def test_tap_pool_evicts_oldest_when_full():
    c = RouteCache(0, primary_capacity=64, tap_capacity=256)
    for k in range(256):
        c.add((0, 1000 + k), tap=True)
    assert len(c.tap) == 256
    c.add((0, 5000), tap=True)
    assert len(c.tap) == 256
    assert c.find(1000) is None and c.find(5000) == (0, 5000)


def test_primary_pool_bounded_at_64():
    c = RouteCache(0)
    for k in range(70):
        c.add((0, 10 + k))
    assert len(c.primary) == 64 and c.find(10) is None


def test_remove_link_truncates_both_directions():
    c = RouteCache(0)
    c.add((0, 1, 2, 3))
    c.remove_link(2, 1)
    assert c.find(3) is None
    assert c.find(1) == (0, 1)


@given(st.lists(st.lists(st.integers(1, 12), min_size=1, max_size=8), max_size=40),
       st.lists(st.tuples(st.integers(0, 12), st.integers(0, 12)), max_size=10))
@settings(max_examples=80, deadline=None)
def test_cache_paths_always_loop_free(paths, cuts):
    c = RouteCache(0, primary_capacity=8, tap_capacity=8)
    for i, p in enumerate(paths):
        c.add((0, *p), tap=bool(i % 2))
    for a, b in cuts:
        c.remove_link(a, b)
    for p in c.paths():
        assert is_loop_free(p) and p[0] == 0
    assert len(c.primary) <= 8 and len(c.tap) <= 8


# ---------------------------------------------------------------- send buffer

def test_send_buffer_drop_oldest_and_lifetime():
    dropped = []
    buf = SendBuffer(64, 30.0, lambda p, r: dropped.append((p, r)))
    pkts = [Packet(i, DATA, 0, 1, 0.0) for i in range(65)]
    for p in pkts:
        buf.push(p, 0.0)
    assert dropped == [(pkts[0], "buffer_full")]
    assert len(buf) == 64
    buf.expire(30.5)
    assert len(buf) == 0 and dropped[-1][1] == "buffer_timeout"


# ---------------------------------------------------------------- discovery

def test_cache_hit_means_no_rreq():
    net = make_network("dsr", [(0, 0), (100, 0)])
    net.agents[0].cache.add((0, 1))
    log = tap_broadcasts(net)
    send(net, 0, 1, 1.0)
    net.sim.run(2.0)
    assert [x for x in log if x[2] == RREQ] == []
    assert net.metrics.data_delivered == 1


def test_chain_discovery_source_route():
    net = make_network("dsr", [(0, 0), (200, 0), (400, 0)])
    deliveries = tap_deliveries(net)
    send(net, 0, 2, 1.0)
    net.sim.run(5.0)
    assert len(deliveries) == 1
    assert deliveries[0][2].source_route == (0, 1, 2)


def test_two_static_nodes_one_rreq_one_rrep():
    net = make_network("dsr", [(0, 0), (100, 0)])
    log = tap_broadcasts(net)
    send(net, 0, 1, 1.0)
    net.sim.run(3.0)
    assert net.metrics.control_tx == 2
    assert [x[2] for x in log] == [RREQ]


def test_duplicate_rreq_rebroadcast_once():
    net = make_network("dsr", [(0, 0), (200, 0), (400, 0), (600, 0)])
    log = tap_broadcasts(net)
    b = net.agents[1]
    req = Packet(net.uid(), RREQ, 0, 3, 0.0, ttl=255, body=(7, (0,)))
    b.receive(req, 0)
    b.receive(req.copy(net.uid()), 0)
    assert len([x for x in log if x[1] == 1 and x[2] == RREQ]) == 1


def test_rreq_back_at_origin_is_dropped():
    net = make_network("dsr", [(0, 0), (200, 0)])
    log = tap_broadcasts(net)
    a = net.agents[0]
    a.receive(Packet(net.uid(), RREQ, 0, 5, 0.0, ttl=255, body=(1, (0, 1))), 1)
    assert log == []


def test_record_with_cycle_is_counted_malformed():
    net = make_network("dsr", [(0, 0), (200, 0)])
    net.agents[1].receive(Packet(net.uid(), RREQ, 0, 5, 0.0, ttl=255, body=(1, (0, 4, 0))), 0)
    assert net.malformed == 1


def test_intermediate_cached_reply():
    net = make_network("dsr", [(0, 0), (200, 0), (400, 0), (600, 0)])
    b = net.agents[1]
    b.cache.add((1, 2, 3))
    log = tap_broadcasts(net)
    replies = []
    orig = net.channel.unicast

    def uni(sender, pkt, nh):
        if pkt.kind == RREP:
            replies.append((sender, pkt.body, nh))
        orig(sender, pkt, nh)

    net.channel.unicast = uni
    b.receive(Packet(net.uid(), RREQ, 0, 3, 0.0, ttl=255, body=(1, (0,))), 0)
    assert replies == [(1, (0, 1, 2, 3), 0)]
    assert [x for x in log if x[1] == 1] == []


def test_learned_tap_route_serves_without_discovery():
    net = make_network("dsr", [(0, 0), (100, 50), (200, 0), (400, 0)])
    c = net.agents[1]
    # node 1 overhears 0 -> 2 carrying route (0, 2, 3); only the link to 0 is known
    p = Packet(net.uid(), DATA, 0, 3, 0.0, source_route=(0, 2, 3))
    c.overhear(p, 0, 2)
    assert c.cache.find(3) == (1, 0, 2, 3)
    assert c.cache.find(0) == (1, 0)
    log = tap_broadcasts(net)
    send(net, 1, 3, 1.0)
    net.sim.run(2.0)
    assert [x for x in log if x[2] == RREQ] == [] and net.metrics.data_delivered == 1


def test_overheard_without_route_is_noop():
    net = make_network("dsr", [(0, 0), (100, 0)])
    before = len(net.agents[1].cache)
    net.agents[1].overhear(Packet(net.uid(), DATA, 0, 5, 0.0), 0, 5)
    assert len(net.agents[1].cache) == before


# ---------------------------------------------------------------- maintenance

def _diamond(leave_at):
    # A(0) - B(1) - X(2) - D(3), with B - C(4) - D as a detour; X leaves
    tracks = {
        0: [(0.0, 0.0, 0.0)],
        1: [(0.0, 200.0, 0.0)],
        2: [(0.0, 400.0, 100.0), (leave_at, 400.0, 100.0), (leave_at + 0.001, 400.0, 9000.0)],
        3: [(0.0, 600.0, 0.0)],
        4: [(0.0, 400.0, -100.0)],
    }
    return TraceMobility(tracks)


def test_salvage_over_diamond():
    net = make_network("dsr", mobility=_diamond(1.0))
    a, b = net.agents[0], net.agents[1]
    a.cache.add((0, 1, 2, 3))
    b.cache.add((1, 4, 3))
    deliveries = tap_deliveries(net)
    send(net, 0, 3, 2.0)
    net.sim.run(4.0)
    assert len(deliveries) == 1
    pkt = deliveries[0][2]
    assert pkt.source_route == (0, 1, 4, 3) and pkt.salvaged == 1
    # the origin learned about the broken link
    assert a.cache.find(3) != (0, 1, 2, 3)


def test_no_alternative_drops_once_and_origin_purges():
    net = make_network("dsr", mobility=_diamond(1.0))
    a = net.agents[0]
    a.cache.add((0, 1, 2, 3))
    net.agents[1].cache.add((1, 2, 3))
    send(net, 0, 3, 2.0)
    net.sim.run(2.5)
    assert net.metrics.data_dropped == 1
    assert net.metrics.drop_reasons["no_salvage_route"] == 1
    assert a.cache.find(3) is None and a.cache.find(1) == (0, 1)


def test_salvage_budget_of_one():
    net = make_network("dsr", [(0, 0), (200, 0), (400, 0)])
    b = net.agents[1]
    b.cache.add((1, 2))
    pkt = data_packet(net, 0, 2)
    pkt.source_route, pkt.route_index, pkt.salvaged = (0, 1, 9, 2), 1, 1
    assert b.dsr_salvage(pkt, 9) is False
    assert net.metrics.drop_reasons["salvage_budget"] == 1


def test_overheard_rerr_prunes_cache():
    net = make_network("dsr", [(0, 0), (100, 0), (200, 0)])
    c = net.agents[2]
    c.cache.add((2, 1, 5, 6))
    err = Packet(net.uid(), RERR, 1, 0, 0.0, body=(5, 6), source_route=(1, 0))
    c.overhear(err, 1, 0)
    assert c.cache.find(6) is None and c.cache.find(5) == (2, 1, 5)
