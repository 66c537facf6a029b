"""Frame-by-frame simulation pipeline.

This module exposes three entry points:
  - run(cfg, algorithm): build the topology, route, then simulate n_frames
  - compare(cfg): both algorithms on the same topology and demand stream
  - frame_step(state, demands, rng): one frame of slot accounting and energy

Routes are computed once with the expected demand (or every
`re_route_interval` frames with the demands of the triggering frame). Link
states are resolved once per routing decision with every route active, so
the interference set of a frame is all routes of the current solution.
"""

from __future__ import annotations

import hashlib
import math
import sys
import time
from collections import deque
from dataclasses import dataclass, field, replace
from typing import Mapping, Sequence

import numpy as np

from relayroute.model.build import (
    LinkState,
    RadioMap,
    RoutingContext,
    build_context,
    build_radio_map,
    resolve_links,
)
from relayroute.model.energy import route_energy_mj, slots_needed
from relayroute.model.topology import CandidateSet, candidate_routes, generate_topology
from relayroute.params import SimConfig
from relayroute.rng import derived_seed, stream
from relayroute.routing.baseline import dijkstra_routes
from relayroute.routing.bco import run_ebcd
from relayroute.state import (
    Algorithm,
    ComparisonReport,
    EnergyBreakdown,
    FrameResult,
    RunReport,
    Solution,
    Topology,
    TrafficDemand,
    savings_percent,
)
from relayroute.units import mw_to_dbm


@dataclass(frozen=True, slots=True)
class Scene:
    """Everything two algorithms must share for a fair comparison."""

    topology: Topology
    radio: RadioMap
    candidates: CandidateSet


@dataclass(slots=True)
class FrameState:
    """Routing state and per-MS FIFO queues carried between frames.

    Attributes:
        ctx: Routing context of the current decision
        solution: Current routes
        links: Resolved link states per MS under `solution`
        queues: Pending bit chunks per MS, oldest first
        frame_index: Index of the next frame
    """

    ctx: RoutingContext
    solution: Solution
    links: dict[int, tuple[LinkState, ...]]
    queues: dict[int, deque[int]] = field(default_factory=dict)
    frame_index: int = 0

    def queued_bits(self, ms: int | None = None) -> int:
        if ms is not None:
            return sum(self.queues.get(ms, ()))
        return sum(sum(q) for q in self.queues.values())


def prepare_scene(
    cfg: SimConfig, topology: Topology | None = None, verbose: bool = False
) -> Scene:
    if topology is None:
        topology = generate_topology(cfg.topology_config, cfg.seed)
    candidates = candidate_routes(topology, cfg.max_hops, cfg.topology.max_routes_per_ms)
    if verbose:
        print(
            f"[Topology] {len(topology.relays)} RS, {len(topology.mobile_stations)} MS, "
            f"{len(topology.links)} links, {len(candidates.unreachable)} unreachable",
            file=sys.stderr,
        )
    return Scene(topology, build_radio_map(topology, cfg, cfg.seed), candidates)


def _route(
    scene: Scene,
    cfg: SimConfig,
    algorithm: Algorithm,
    demands: Mapping[int, int] | None,
    decision: int,
    verbose: bool,
) -> tuple[RoutingContext, Solution]:
    ctx = build_context(
        scene.topology, cfg, demands, radio=scene.radio, candidates=scene.candidates
    )
    if not scene.candidates.routes:
        return ctx, Solution((), scene.candidates.unreachable)
    if algorithm is Algorithm.EBCD:
        params = replace(cfg.bco, seed=derived_seed(cfg.seed, "bco", cfg.bco.seed, decision))
        return ctx, run_ebcd(ctx, params, verbose=verbose).best
    return ctx, dijkstra_routes(scene.topology, cfg.max_hops, cfg.baseline_weight, ctx)


def _slots_for(bits: int, links: tuple[LinkState, ...]) -> int:
    return sum(slots_needed(bits, link.level) for link in links)


def _max_servable(pending: int, links: tuple[LinkState, ...], budget: int) -> int:
    """Largest b <= pending whose slots over every hop fit in `budget`."""
    lo, hi = 0, pending
    while lo < hi:
        mid = (lo + hi + 1) // 2
        if _slots_for(mid, links) <= budget:
            lo = mid
        else:
            hi = mid - 1
    return lo


def _dequeue(queue: deque[int], bits: int) -> None:
    while bits > 0:
        head = queue[0]
        if head <= bits:
            queue.popleft()
            bits -= head
        else:
            queue[0] = head - bits
            bits = 0


def frame_step(
    state: FrameState,
    demands: Mapping[int, int],
    rng: np.random.Generator | None = None,
) -> FrameResult:
    """Queue `demands`, serve bits within the frame's slot budget and price them.

    MSs are served one after the other, starting at an offset drawn from `rng`
    (or the frame index without one), each taking as many of its queued bits,
    oldest first, as still fit in the remaining slots over all of its hops.
    Unserved bits stay queued for the next frame.
    """
    fc = state.ctx.cfg.frame
    for demand in (TrafficDemand(ms, int(bits)) for ms, bits in demands.items()):
        if demand.bits_this_frame:
            state.queues.setdefault(demand.ms, deque()).append(demand.bits_this_frame)

    order = [r.ms for r in state.solution.routes]
    slots_demanded = sum(
        _slots_for(state.queued_bits(ms), state.links[ms]) for ms in order
    )
    start = 0
    if order:
        start = int(rng.integers(len(order))) if rng is not None else state.frame_index % len(order)

    remaining = fc.slots_per_frame
    parts: list[EnergyBreakdown] = []
    capped = 0
    served_total = 0
    assignment = state.solution.assignment
    for offset in range(len(order)):
        ms = order[(start + offset) % len(order)]
        pending = state.queued_bits(ms)
        if not pending or not remaining:
            continue
        links = state.links[ms]
        served = _max_servable(pending, links, remaining)
        if not served:
            continue
        remaining -= _slots_for(served, links)
        _dequeue(state.queues[ms], served)
        served_total += served
        parts.append(route_energy_mj(assignment[ms], served, links, fc))
        capped += sum(1 for link in links if link.capped)

    state.frame_index += 1
    per_class = EnergyBreakdown.summed(parts)
    return FrameResult(
        frame_index=state.frame_index - 1,
        total_energy_mj=math.fsum(p.total_mj for p in parts),
        per_class_energy=per_class,
        slots_used=fc.slots_per_frame - remaining,
        slots_demanded=slots_demanded,
        carried_over_bits=state.queued_bits(),
        power_capped_links=capped,
        bits_sampled=sum(int(b) for b in demands.values()),
        bits_served=served_total,
    )


def sample_demands(
    cfg: SimConfig, rng: np.random.Generator, ms_ids: Sequence[int]
) -> tuple[TrafficDemand, ...]:
    """One frame of demands, uniform on [demand_min_bits, demand_max_bits] per MS."""
    draws = rng.integers(
        cfg.demand_min_bits, cfg.demand_max_bits, size=len(ms_ids), endpoint=True
    )
    return tuple(TrafficDemand(ms, int(bits)) for ms, bits in zip(ms_ids, draws))


def _report_routes(algorithm: Algorithm, links: Mapping[int, tuple[LinkState, ...]]) -> None:
    hops = [link for states in links.values() for link in states]
    if not hops:
        return
    mean_tx = math.fsum(link.p_tx_mw for link in hops) / len(hops)
    print(
        f"[Simulator] {algorithm.value}: {len(links)} route(s), {len(hops)} hop(s), "
        f"mean tx power {mw_to_dbm(mean_tx):.2f} dBm, "
        f"{sum(link.capped for link in hops)} capped",
        file=sys.stderr,
    )


def _simulate(
    scene: Scene, cfg: SimConfig, algorithm: Algorithm, verbose: bool
) -> RunReport:
    reachable = scene.candidates.reachable
    all_ms = [s.id for s in scene.topology.mobile_stations]
    demand_rng = stream(cfg.seed, "demands")
    digest = hashlib.sha256()

    t0 = time.perf_counter()
    ctx, solution = _route(scene, cfg, algorithm, None, 0, verbose)
    wallclock = time.perf_counter() - t0
    state = FrameState(ctx, solution, resolve_links(ctx, solution.routes))
    decisions = 1
    if verbose:
        _report_routes(algorithm, state.links)

    frames: list[FrameResult] = []
    for f in range(cfg.n_frames):
        sampled = {d.ms: d.bits_this_frame for d in sample_demands(cfg, demand_rng, all_ms)}
        digest.update(np.array([sampled[ms] for ms in all_ms], dtype="<i8").tobytes())
        demands = {ms: sampled[ms] for ms in reachable}

        if cfg.re_route_interval and f and f % cfg.re_route_interval == 0:
            t0 = time.perf_counter()
            ctx, solution = _route(scene, cfg, algorithm, demands, decisions, verbose)
            wallclock += time.perf_counter() - t0
            state.ctx, state.solution = ctx, solution
            state.links = resolve_links(ctx, solution.routes)
            decisions += 1

        frames.append(frame_step(state, demands, demand_rng))

    if verbose:
        print(
            f"[Simulator] {algorithm.value}: {cfg.n_frames} frames, "
            f"{decisions} routing decision(s), routing took {wallclock:.3f}s",
            file=sys.stderr,
        )

    return RunReport(
        algorithm=algorithm,
        mean_energy_per_frame_mj=math.fsum(fr.total_energy_mj for fr in frames) / len(frames),
        frames=tuple(frames),
        unreachable_count=len(scene.candidates.unreachable),
        routing_wallclock_s=wallclock,
        bits_sampled=sum(fr.bits_sampled for fr in frames),
        bits_served=sum(fr.bits_served for fr in frames),
        bits_queued=state.queued_bits(),
        demand_digest=digest.hexdigest(),
        capped_candidate_ms=len(scene.candidates.capped),
    )


def run(
    cfg: SimConfig,
    algorithm: Algorithm | str = Algorithm.EBCD,
    topology: Topology | None = None,
    verbose: bool = False,
) -> RunReport:
    """Simulate `cfg` with one routing algorithm; deterministic per (cfg, algorithm)."""
    algorithm = Algorithm(algorithm)
    return _simulate(prepare_scene(cfg, topology, verbose), cfg, algorithm, verbose)


def compare(
    cfg: SimConfig, topology: Topology | None = None, verbose: bool = False
) -> ComparisonReport:
    """EBCD against the shortest-path baseline on one topology and one demand stream."""
    scene = prepare_scene(cfg, topology, verbose)
    ebcd = _simulate(scene, cfg, Algorithm.EBCD, verbose)
    baseline = _simulate(scene, cfg, Algorithm.DIJKSTRA, verbose)
    result = ComparisonReport(ebcd, baseline, savings_percent(baseline, ebcd))
    if verbose:
        print(
            f"[Simulator] EBCD {ebcd.mean_energy_per_frame_mj:.6g} mJ/frame, "
            f"Dijkstra {baseline.mean_energy_per_frame_mj:.6g} mJ/frame, "
            f"savings {result.savings_percent:.3f}%",
            file=sys.stderr,
        )
    return result
