from __future__ import annotations

from dataclasses import replace

import pytest

from relayroute.model.topology import find_unreachable, is_direction_legal
from relayroute.params import ChannelConfig, SimConfig, TopologyConfig
from relayroute.state import Link, Station, StationKind, Topology

HEIGHTS = {
    StationKind.BS: 30.0,
    StationKind.TRANSPARENT_RS: 10.0,
    StationKind.NON_TRANSPARENT_RS: 10.0,
    StationKind.MS: 2.0,
}

BS = StationKind.BS
TRS = StationKind.TRANSPARENT_RS
NRS = StationKind.NON_TRANSPARENT_RS
MS = StationKind.MS


def make_topology(
    layout: list[tuple[StationKind, float, float]],
    *,
    max_hops: int = 3,
    d_min: float = 100.0,
    d_max: float = 1e9,
    bandwidth_hz: float = 5e6,
    gain_db: float = 10.0,
    only: set[tuple[int, int]] | None = None,
) -> Topology:
    """Hand-built topology; station i is layout[i]. `only` restricts the links."""
    stations = tuple(
        Station(i, kind, x, y, HEIGHTS[kind], gain_db) for i, (kind, x, y) in enumerate(layout)
    )
    links = []
    for a in stations:
        for b in stations:
            if a.id == b.id or not is_direction_legal(a.kind, b.kind):
                continue
            if only is not None and (a.id, b.id) not in only:
                continue
            d = a.distance_to(b)
            if d_min <= d <= d_max:
                links.append(Link(a.id, b.id, d, bandwidth_hz))
    t = Topology(stations, tuple(links), max_hops, 5000.0)
    return replace(t, unreachable=find_unreachable(t, max_hops))


def small_config(
    n_ms: int = 4, n_rs: int = 3, n_frames: int = 20, seed: int = 0, **sim
) -> SimConfig:
    """Small, fast configuration in a 1 km disc."""
    topology = TopologyConfig(
        n_rs=n_rs,
        n_ms=n_ms,
        deployment_radius_m=1000.0,
        d_min_m=100.0,
        d_max_m=2000.0,
        max_routes_per_ms=64,
    )
    return SimConfig(
        n_frames=n_frames,
        seed=seed,
        topology=topology,
        channel=ChannelConfig(),
        **sim,
    )


@pytest.fixture
def line_topology() -> Topology:
    """BS, one relay 300 m out, one MS 600 m out on the same line."""
    return make_topology([(BS, 0.0, 0.0), (NRS, 300.0, 0.0), (MS, 600.0, 0.0)])
