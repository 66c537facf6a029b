"""Seeded relay-network topologies and candidate uplink routes.

Placement: BS at the origin, RSs and MSs uniform in the deployment disc.
A directed link exists iff the endpoint kinds are direction-legal
(MS->RS, MS->BS, RS->RS, RS->BS) and the distance lies in [d_min, d_max].
"""

from __future__ import annotations

import heapq
import warnings
from dataclasses import dataclass, replace

import numpy as np

from relayroute.model.constraints import RouteViolation, apply_rules
from relayroute.params import TopologyConfig
from relayroute.rng import stream
from relayroute.state import HopClass, Link, Route, Station, StationKind, Topology


class ZeroRadius(ValueError):
    pass


class ImpossibleConfig(ValueError):
    pass


class NoRouteExists(ValueError):
    pass


class RouteCapWarning(UserWarning):
    pass


def is_direction_legal(src: StationKind, dst: StationKind) -> bool:
    if src is StationKind.MS:
        return dst is StationKind.BS or dst.is_relay
    if src.is_relay:
        return dst is StationKind.BS or dst.is_relay
    return False


def hop_class(topology: Topology, src: int, dst: int) -> HopClass:
    """MR for MS->RS and MS->BS (the BS counts as a relay), RR for RS->RS, RB for RS->BS."""
    if topology.kind_of(src) is StationKind.MS:
        return "MR"
    if topology.kind_of(dst) is StationKind.BS:
        return "RB"
    return "RR"


def _point_in_disc(rng: np.random.Generator, radius: float) -> tuple[float, float]:
    # Rejection sampling in the bounding square keeps placement trig-free.
    while True:
        x, y = rng.uniform(-radius, radius, size=2)
        if x * x + y * y <= radius * radius:
            return float(x), float(y)


def generate_topology(cfg: TopologyConfig, seed: int) -> Topology:
    """Build a random topology; identical (cfg, seed) yields an identical Topology."""
    if cfg.deployment_radius_m <= 0:
        raise ZeroRadius("deployment_radius_m must be positive")
    if cfg.deployment_radius_m <= cfg.d_min_m:
        raise ImpossibleConfig(
            f"deployment_radius_m ({cfg.deployment_radius_m} m) must exceed d_min "
            f"({cfg.d_min_m} m) so stations can reach the BS"
        )

    rng = stream(seed, "topology")
    transparent = set(
        int(i) for i in rng.permutation(cfg.n_rs)[: cfg.n_transparent]
    )

    stations: list[Station] = [
        Station(
            id=0,
            kind=StationKind.BS,
            x=0.0,
            y=0.0,
            antenna_height=cfg.bs_height_m,
            antenna_gain_db=float(
                rng.uniform(cfg.bs_rs_gain_min_db, cfg.bs_rs_gain_max_db)
            ),
            tx_power_max_mw=cfg.tx_power_max_mw,
        )
    ]
    for i in range(cfg.n_rs):
        x, y = _point_in_disc(rng, cfg.deployment_radius_m)
        stations.append(
            Station(
                id=len(stations),
                kind=(
                    StationKind.TRANSPARENT_RS
                    if i in transparent
                    else StationKind.NON_TRANSPARENT_RS
                ),
                x=x,
                y=y,
                antenna_height=cfg.rs_height_m,
                antenna_gain_db=float(
                    rng.uniform(cfg.bs_rs_gain_min_db, cfg.bs_rs_gain_max_db)
                ),
                tx_power_max_mw=cfg.tx_power_max_mw,
            )
        )
    for _ in range(cfg.n_ms):
        x, y = _point_in_disc(rng, cfg.deployment_radius_m)
        stations.append(
            Station(
                id=len(stations),
                kind=StationKind.MS,
                x=x,
                y=y,
                antenna_height=cfg.ms_height_m,
                antenna_gain_db=float(rng.uniform(cfg.ms_gain_min_db, cfg.ms_gain_max_db)),
                tx_power_max_mw=cfg.tx_power_max_mw,
            )
        )

    links: list[Link] = []
    for src in stations:
        for dst in stations:
            if src.id == dst.id or not is_direction_legal(src.kind, dst.kind):
                continue
            distance = src.distance_to(dst)
            if cfg.d_min_m <= distance <= cfg.d_max_m:
                links.append(
                    Link(
                        src=src.id,
                        dst=dst.id,
                        distance_m=distance,
                        bandwidth_hz=float(
                            rng.uniform(cfg.bandwidth_min_hz, cfg.bandwidth_max_hz)
                        ),
                    )
                )

    topology = Topology(
        stations=tuple(stations),
        links=tuple(links),
        max_hops=cfg.max_hops,
        deployment_radius_m=cfg.deployment_radius_m,
    )
    return replace(topology, unreachable=find_unreachable(topology, cfg.max_hops))


def find_unreachable(topology: Topology, max_hops: int) -> frozenset[int]:
    return frozenset(
        ms.id
        for ms in topology.mobile_stations
        if not _best_first_routes(topology, ms.id, max_hops, cap=1)[0]
    )


# ---------- Route enumeration ----------


def _best_first_routes(
    topology: Topology, ms: int, max_hops: int, cap: int | None
) -> tuple[list[Route], bool]:
    """Valid routes of `ms` in increasing total distance, at most `cap` of them.

    The frontier is ordered by distance so far plus the straight-line distance
    to the BS, which never overestimates the remaining link lengths, so
    complete routes leave the heap shortest first. Returns (routes, cap_hit).
    """
    bs = topology.base_station
    stations = topology.stations

    def bound(dist: float, node: int) -> float:
        return dist + stations[node].distance_to(bs)

    frontier: list[tuple[float, int, tuple[int, ...], float, bool]] = [
        (bound(0.0, ms), 1, (ms,), 0.0, False)
    ]
    found: list[Route] = []
    while frontier:
        _, _, hops, dist, complete = heapq.heappop(frontier)
        if complete:
            if cap is not None and len(found) >= cap:
                return found, True
            found.append(Route(hops))
            continue

        node = hops[-1]
        used = len(hops) - 1
        node_kind = stations[node].kind
        for nxt in topology.adjacency.get(node, ()):
            if nxt in hops or used + 1 > max_hops:
                continue
            nxt_kind = stations[nxt].kind
            step = dist + topology.link(node, nxt).distance_m
            path = hops + (nxt,)
            if nxt_kind is StationKind.BS:
                if node_kind is StationKind.TRANSPARENT_RS and used != 1:
                    continue
                heapq.heappush(frontier, (step, len(path), path, step, True))
            elif nxt_kind is StationKind.TRANSPARENT_RS:
                # only as the single intermediate of MS -> tRS -> BS
                if node_kind is StationKind.MS and max_hops >= 2:
                    heapq.heappush(frontier, (bound(step, nxt), len(path), path, step, False))
            elif nxt_kind is StationKind.NON_TRANSPARENT_RS:
                if node_kind is not StationKind.TRANSPARENT_RS and used + 2 <= max_hops:
                    heapq.heappush(frontier, (bound(step, nxt), len(path), path, step, False))
    return found, False


def enumerate_routes(
    topology: Topology, ms: int, max_hops: int, cap: int | None = None
) -> list[Route]:
    """All valid MS->BS routes within `max_hops`, lexicographic by hop ids.

    With `cap`, only the `cap` shortest-distance routes are kept (and a
    RouteCapWarning is emitted when more exist).
    """
    if not topology.has_station(ms) or topology.kind_of(ms) is not StationKind.MS:
        raise ValueError(f"Station {ms} is not a mobile station")
    routes, cap_hit = _best_first_routes(topology, ms, max_hops, cap)
    if not routes:
        raise NoRouteExists(f"MS {ms} has no route to the BS within {max_hops} hops")
    if cap_hit:
        warnings.warn(
            f"MS {ms}: candidate routes capped at {cap}",
            RouteCapWarning,
            stacklevel=2,
        )
    return sorted(routes)


@dataclass(frozen=True, slots=True)
class CandidateSet:
    """Candidate routes per reachable MS.

    Attributes:
        routes: Mapping MS id -> lexicographically sorted candidate routes
        unreachable: MS ids without any candidate
        capped: MS ids whose enumeration hit the cap
    """

    routes: dict[int, tuple[Route, ...]]
    unreachable: frozenset[int]
    capped: frozenset[int]

    @property
    def reachable(self) -> tuple[int, ...]:
        return tuple(sorted(self.routes))


def candidate_routes(topology: Topology, max_hops: int, cap: int | None) -> CandidateSet:
    routes: dict[int, tuple[Route, ...]] = {}
    unreachable: set[int] = set()
    capped: set[int] = set()
    for ms in topology.mobile_stations:
        found, cap_hit = _best_first_routes(topology, ms.id, max_hops, cap)
        if not found:
            unreachable.add(ms.id)
            continue
        routes[ms.id] = tuple(sorted(found))
        if cap_hit:
            capped.add(ms.id)
    if capped:
        warnings.warn(
            f"{len(capped)} MS(s) hit the candidate cap of {cap} routes",
            RouteCapWarning,
            stacklevel=2,
        )
    return CandidateSet(routes, frozenset(unreachable), frozenset(capped))


def validate_route(
    topology: Topology, route: Route, max_hops: int | None = None
) -> list[RouteViolation]:
    """Every violated route invariant; the route is valid iff the list is empty."""
    return apply_rules(
        topology, route, topology.max_hops if max_hops is None else max_hops
    )
