"""Shortest-path baseline and the exhaustive joint-assignment oracle.

`dijkstra_routes` searches the hop-layered expansion (station, hops used) of
the link graph, so it sees exactly the route space of the bee colony: the
same hop bound, the same direction rules and the MS -> tRS -> BS rule for
transparent relays. Labels are ordered by (total weight, hop count, hop ids).
"""

from __future__ import annotations

import heapq
import itertools
import math
from typing import Literal

import networkx as nx

from relayroute.model.build import RoutingContext, isolated_link
from relayroute.model.energy import link_energy_mj
from relayroute.model.objective import solution_cost
from relayroute.model.topology import is_direction_legal
from relayroute.state import Route, Solution, StationKind, Topology

Weight = Literal["distance", "energy"]


class TooLarge(ValueError):
    pass


def build_weighted_graph(
    t: Topology, weight: Weight = "distance", ctx: RoutingContext | None = None
) -> nx.DiGraph:
    """Directed graph of the topology's links with a positive `weight` per edge.

    'distance' weighs a link by its length in meters; 'energy' by the energy
    of the expected demand over the link priced alone in the frame.
    """
    if weight not in ("distance", "energy"):
        raise ValueError("weight must be 'distance' or 'energy'")
    if weight == "energy" and ctx is None:
        raise ValueError("Energy weights need a routing context")

    g = nx.DiGraph()
    for station in t.stations:
        g.add_node(station.id, kind=station.kind)
    for link in t.links:
        if not is_direction_legal(t.kind_of(link.src), t.kind_of(link.dst)):
            continue
        if weight == "distance":
            w = link.distance_m
        else:
            state = isolated_link(ctx, link.src, link.dst)
            w = link_energy_mj(
                ctx.cfg.expected_demand_bits, state.level, ctx.cfg.frame, state.p_tx_mw
            )
        g.add_edge(link.src, link.dst, weight=w, distance=link.distance_m)
    return g


def _shortest_constrained(
    g: nx.DiGraph, ms: int, max_hops: int
) -> tuple[float, tuple[int, ...]] | None:
    kinds = nx.get_node_attributes(g, "kind")
    frontier: list[tuple[float, int, tuple[int, ...]]] = [(0.0, 0, (ms,))]
    settled: set[tuple[int, int]] = set()
    while frontier:
        dist, used, path = heapq.heappop(frontier)
        node = path[-1]
        if kinds[node] is StationKind.BS:
            return dist, path
        if (node, used) in settled:
            continue
        settled.add((node, used))

        node_kind = kinds[node]
        for nxt in sorted(g.successors(node)):
            if nxt in path or used + 1 > max_hops:
                continue
            nxt_kind = kinds[nxt]
            if nxt_kind is StationKind.TRANSPARENT_RS:
                if node_kind is not StationKind.MS or max_hops < 2:
                    continue
            elif nxt_kind is StationKind.NON_TRANSPARENT_RS:
                if node_kind is StationKind.TRANSPARENT_RS or used + 2 > max_hops:
                    continue
            elif nxt_kind is StationKind.BS:
                if node_kind is StationKind.TRANSPARENT_RS and used != 1:
                    continue
            else:
                continue
            heapq.heappush(
                frontier, (dist + g[node][nxt]["weight"], used + 1, path + (nxt,))
            )
    return None


def dijkstra_routes(
    t: Topology,
    max_hops: int | None = None,
    weight: Weight = "distance",
    ctx: RoutingContext | None = None,
) -> Solution:
    """Minimum-weight constrained route of every MS; MSs without one are recorded as unreachable."""
    max_hops = t.max_hops if max_hops is None else max_hops
    g = build_weighted_graph(t, weight, ctx)
    routes: list[Route] = []
    unreachable: set[int] = set()
    for ms in t.mobile_stations:
        found = _shortest_constrained(g, ms.id, max_hops)
        if found is None:
            unreachable.add(ms.id)
        else:
            routes.append(Route(found[1]))
    return Solution(tuple(routes), frozenset(unreachable))


def route_weight(g: nx.DiGraph, route: Route) -> float:
    return math.fsum(g[s][d]["weight"] for s, d in route.pairs())


def exhaustive_best(ctx: RoutingContext, limit: int = 10**6) -> Solution:
    """Global minimum of `solution_cost` over every joint assignment of candidates.

    Candidates are sorted, so the product runs in lexicographic order and the
    first minimum found is the lexicographically smallest one.
    """
    candidates = ctx.candidates.routes
    ms_ids = sorted(candidates)
    size = math.prod(len(candidates[ms]) for ms in ms_ids)
    if size > limit:
        raise TooLarge(f"{size} joint assignments exceed the limit of {limit}")

    best: Solution | None = None
    best_cost = math.inf
    for combo in itertools.product(*(candidates[ms] for ms in ms_ids)):
        s = Solution(tuple(combo), ctx.candidates.unreachable)
        cost = solution_cost(s, ctx)
        if cost < best_cost:
            best, best_cost = s, cost
    if best is None:
        return Solution((), ctx.candidates.unreachable)
    return best
