import warnings

import networkx as nx
import pytest

from conftest import BS, MS, NRS, TRS, make_topology
from relayroute.model.topology import (
    ImpossibleConfig,
    NoRouteExists,
    RouteCapWarning,
    ZeroRadius,
    candidate_routes,
    enumerate_routes,
    generate_topology,
    hop_class,
    is_direction_legal,
    validate_route,
)
from relayroute.params import TopologyConfig
from relayroute.state import Route, StationKind

SMALL = TopologyConfig(n_rs=4, n_ms=5, deployment_radius_m=1000.0, max_hops=3)


def test_generation_is_deterministic():
    assert generate_topology(SMALL, 7) == generate_topology(SMALL, 7)
    assert generate_topology(SMALL, 7) != generate_topology(SMALL, 8)


def test_station_layout():
    cfg = TopologyConfig(n_rs=10, n_ms=30)
    t = generate_topology(cfg, 3)
    assert t.stations[0].kind is StationKind.BS
    assert (t.stations[0].x, t.stations[0].y) == (0.0, 0.0)
    assert all(s.kind.is_relay for s in t.stations[1:11])
    assert all(s.kind is StationKind.MS for s in t.stations[11:])
    assert sum(1 for s in t.relays if s.kind is StationKind.TRANSPARENT_RS) == 3
    for s in t.stations:
        assert s.x**2 + s.y**2 <= cfg.deployment_radius_m**2
        low, high = (1.0, 10.0) if s.kind is StationKind.MS else (5.0, 20.0)
        assert low <= s.antenna_gain_db <= high


def test_links_are_legal_and_in_range():
    cfg = TopologyConfig(n_rs=6, n_ms=12)
    t = generate_topology(cfg, 11)
    assert t.links
    for link in t.links:
        a, b = t.stations[link.src], t.stations[link.dst]
        assert is_direction_legal(a.kind, b.kind)
        assert cfg.d_min_m <= link.distance_m <= cfg.d_max_m
        assert cfg.bandwidth_min_hz <= link.bandwidth_hz <= cfg.bandwidth_max_hz


def test_at_least_one_relay_stays_non_transparent():
    cfg = TopologyConfig(n_rs=2, n_ms=1, transparent_fraction=1.0)
    t = generate_topology(cfg, 0)
    assert [s.kind for s in t.relays].count(StationKind.NON_TRANSPARENT_RS) == 1


def test_zero_radius():
    with pytest.raises(ZeroRadius):
        generate_topology(TopologyConfig(deployment_radius_m=0.0), 0)


def test_impossible_distance_range():
    with pytest.raises(ImpossibleConfig):
        generate_topology(
            TopologyConfig(deployment_radius_m=100.0, d_min_m=300.0, d_max_m=400.0), 0
        )


def test_hop_classes():
    t = make_topology([(BS, 0.0, 0.0), (NRS, 300.0, 0.0), (NRS, 600.0, 0.0), (MS, 900.0, 0.0)])
    assert hop_class(t, 3, 2) == "MR"
    assert hop_class(t, 3, 0) == "MR"
    assert hop_class(t, 2, 1) == "RR"
    assert hop_class(t, 1, 0) == "RB"


def test_line_routes(line_topology):
    routes = enumerate_routes(line_topology, 2, 3)
    assert routes == [Route((2, 0)), Route((2, 1, 0))]


def test_no_route():
    t = make_topology([(BS, 0.0, 0.0), (MS, 50.0, 0.0)])
    assert t.unreachable == frozenset({1})
    with pytest.raises(NoRouteExists):
        enumerate_routes(t, 1, 3)


def test_transparent_relay_routes():
    # 0 BS, 1 tRS, 2 nRS, 3 MS
    t = make_topology(
        [(BS, 0.0, 0.0), (TRS, 400.0, 0.0), (NRS, 0.0, 400.0), (MS, 500.0, 500.0)]
    )
    routes = enumerate_routes(t, 3, 3)
    assert Route((3, 1, 0)) in routes
    assert Route((3, 2, 1, 0)) not in routes
    assert Route((3, 1, 2, 0)) not in routes
    assert Route((3, 2, 0)) in routes


def test_cap_keeps_shortest_and_warns():
    t = make_topology(
        [(BS, 0.0, 0.0), (NRS, 300.0, 0.0), (NRS, 0.0, 300.0), (MS, 600.0, 0.0)]
    )
    everything = enumerate_routes(t, 3, 3)
    assert len(everything) > 2
    with pytest.warns(RouteCapWarning):
        capped = enumerate_routes(t, 3, 3, cap=2)
    lengths = sorted(_length(t, r) for r in everything)
    assert sorted(_length(t, r) for r in capped) == lengths[:2]


def test_no_warning_when_cap_not_reached(line_topology):
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        assert len(enumerate_routes(line_topology, 2, 3, cap=2)) == 2


def _length(t, route):
    return sum(t.link(s, d).distance_m for s, d in route.pairs())


def _brute_force_routes(t, ms, max_hops):
    g = nx.DiGraph()
    g.add_nodes_from(range(len(t.stations)))
    g.add_edges_from(t.link_index)
    out = []
    for path in nx.all_simple_paths(g, ms, 0, cutoff=max_hops):
        route = Route(tuple(path))
        if not validate_route(t, route, max_hops):
            out.append(route)
    return sorted(out)


@pytest.mark.parametrize("seed", range(8))
@pytest.mark.parametrize("max_hops", [3, 4])
def test_enumeration_matches_brute_force(seed, max_hops):
    cfg = TopologyConfig(
        n_rs=4, n_ms=3, deployment_radius_m=800.0, d_max_m=900.0, max_hops=max_hops
    )
    t = generate_topology(cfg, seed)
    for ms in t.mobile_stations:
        expected = _brute_force_routes(t, ms.id, max_hops)
        if not expected:
            assert ms.id in t.unreachable
            continue
        found = enumerate_routes(t, ms.id, max_hops)
        assert found == expected
        assert all(validate_route(t, r, max_hops) == [] for r in found)


def test_candidate_set():
    t = generate_topology(SMALL, 5)
    cs = candidate_routes(t, 3, None)
    assert set(cs.routes) | cs.unreachable == {s.id for s in t.mobile_stations}
    assert cs.unreachable == t.unreachable
    assert not cs.capped
    for ms, routes in cs.routes.items():
        assert list(routes) == sorted(routes)


@pytest.mark.parametrize("radius", [150.0, 200.0])
def test_radius_must_exceed_d_min(radius):
    with pytest.raises(ImpossibleConfig):
        generate_topology(TopologyConfig(deployment_radius_m=radius, d_min_m=200.0), 0)


def test_radius_just_above_d_min_generates():
    t = generate_topology(TopologyConfig(n_rs=2, n_ms=3, deployment_radius_m=201.0), 0)
    assert len(t.stations) == 6


@pytest.mark.parametrize("seed", range(3))
@pytest.mark.parametrize("k", [2, 3, 4])
def test_more_hops_only_add_candidates(seed, k):
    cfg = TopologyConfig(n_rs=4, n_ms=4, deployment_radius_m=800.0, d_max_m=900.0, max_hops=5)
    t = generate_topology(cfg, seed)
    fewer = candidate_routes(t, k, None).routes
    more = candidate_routes(t, k + 1, None).routes
    assert set(fewer) <= set(more)
    for ms, routes in fewer.items():
        assert set(routes) <= set(more[ms])
        assert all(r.hop_count <= k for r in routes)


def test_sampled_quantities_stay_in_range():
    cfg = TopologyConfig()
    links = []
    seed = 0
    while len(links) < 10_000:
        t = generate_topology(cfg, seed)
        for s in t.stations:
            assert s.x**2 + s.y**2 <= cfg.deployment_radius_m**2
            if s.kind is StationKind.MS:
                assert cfg.ms_gain_min_db <= s.antenna_gain_db <= cfg.ms_gain_max_db
            else:
                assert cfg.bs_rs_gain_min_db <= s.antenna_gain_db <= cfg.bs_rs_gain_max_db
        links.extend(t.links)
        seed += 1
    for link in links:
        assert cfg.d_min_m <= link.distance_m <= cfg.d_max_m
        assert cfg.bandwidth_min_hz <= link.bandwidth_hz <= cfg.bandwidth_max_hz
