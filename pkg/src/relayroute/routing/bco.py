"""Bee colony route optimizer (EBCD).

Each bee holds a Solution (one route per reachable MS). One iteration:
  a) every bee runs `inner_steps` elitist local improvements, cycling over
     the MSs from a random start;
  b) every bee's solution is priced with `solution_cost`;
  c) the `elite_count` best bees are kept unconditionally;
  d) every other bee abandons its solution with probability
     (cost_b - cost_best) / (cost_worst - cost_best) and, if it does, is
     recruited onto a solution drawn with P_i = f_i / sum(f_k), f = 1 / cost.
The run stops after `max_iterations` or `stagnation_limit` iterations without
improvement of the best-ever cost. Ties are broken by the hop-id sequence.
"""

from __future__ import annotations

import math
import sys
from dataclasses import dataclass
from typing import Mapping, Sequence

import numpy as np

from relayroute.model.build import RoutingContext
from relayroute.model.objective import cost_model, solution_cost
from relayroute.params import BcoParams
from relayroute.state import Route, Solution

# Candidates estimated within this relative distance of the best move are priced exactly.
_RETEST_RTOL = 1e-9


class EmptyCandidates(ValueError):
    pass


class NonPositiveCost(ValueError):
    pass


@dataclass(frozen=True, slots=True)
class EbcdResult:
    best: Solution
    best_cost: float
    cost_trace: tuple[float, ...]
    iterations_run: int


def _check_candidates(candidates: Mapping[int, Sequence[Route]]) -> None:
    if not candidates:
        raise EmptyCandidates("No reachable MS to route")
    empty = [ms for ms, routes in candidates.items() if not routes]
    if empty:
        raise EmptyCandidates(f"MS(s) {sorted(empty)} have no candidate route")


def init_population(
    candidates: Mapping[int, Sequence[Route]],
    p: BcoParams,
    rng: np.random.Generator | None = None,
    unreachable: frozenset[int] = frozenset(),
) -> list[Solution]:
    """`p.n_bees` solutions, each MS on a uniformly random candidate."""
    _check_candidates(candidates)
    rng = rng if rng is not None else np.random.default_rng(p.seed)
    ms_ids = sorted(candidates)
    return [
        Solution(
            tuple(
                candidates[ms][int(rng.integers(len(candidates[ms])))] for ms in ms_ids
            ),
            unreachable,
        )
        for _ in range(p.n_bees)
    ]


def local_improve(
    s: Solution,
    ctx: RoutingContext,
    rng: np.random.Generator | None = None,
    ms: int | None = None,
) -> Solution:
    """Move one MS to its minimum-cost candidate with the rest of `s` fixed.

    The MS is `ms` if given, otherwise drawn from `rng`. All candidates are
    estimated in one batch; the near-best ones are then priced with
    `solution_cost`, so the returned solution never costs more than `s`.
    """
    routes = ctx.candidates.routes
    if ms is None:
        ms_ids = sorted(routes)
        rng = rng if rng is not None else np.random.default_rng()
        ms = ms_ids[int(rng.integers(len(ms_ids)))]

    current = s.assignment[ms]
    best, best_route = s, current
    best_cost = solution_cost(s, ctx)
    estimates = cost_model(ctx).move_costs(s, ms)
    cutoff = estimates.min() * (1.0 + _RETEST_RTOL)
    for candidate, estimate in zip(routes[ms], estimates):
        if candidate == current or estimate > cutoff:
            continue
        trial = s.replace_route(candidate)
        cost = solution_cost(trial, ctx)
        if cost < best_cost or (cost == best_cost and candidate < best_route):
            best, best_route, best_cost = trial, candidate, cost
    return best


def recruitment_probabilities(costs: Sequence[float]) -> list[float]:
    """P_i = f_i / sum(f_k) with quality f_i = 1 / cost_i."""
    if not costs:
        return []
    if any(not (c > 0) or math.isinf(c) for c in costs):
        raise NonPositiveCost("Recruitment needs strictly positive, finite costs")
    qualities = [1.0 / c for c in costs]
    total = math.fsum(qualities)
    return [q / total for q in qualities]


def _abandon_probability(cost: float, best: float, worst: float) -> float:
    if worst == best:
        return 0.0
    return (cost - best) / (worst - best)


def run_ebcd(
    ctx: RoutingContext, params: BcoParams, verbose: bool = False
) -> EbcdResult:
    """Optimise the routes of every reachable MS of `ctx` (priced with `ctx.demands`)."""
    candidates = ctx.candidates.routes
    _check_candidates(candidates)
    rng = np.random.default_rng(params.seed)
    ms_ids = sorted(candidates)
    inner_steps = params.inner_steps_for(len(ms_ids))

    population = init_population(candidates, params, rng, ctx.candidates.unreachable)
    costs = [solution_cost(s, ctx) for s in population]
    first = min(range(len(population)), key=lambda b: (costs[b], population[b].key()))
    best, best_cost = population[first], costs[first]

    trace: list[float] = []
    stagnant = 0
    iterations = 0
    for iteration in range(params.max_iterations):
        iterations += 1
        for b in range(params.n_bees):
            start = int(rng.integers(len(ms_ids)))
            s = population[b]
            for step in range(inner_steps):
                s = local_improve(s, ctx, ms=ms_ids[(start + step) % len(ms_ids)])
            population[b] = s

        costs = [solution_cost(s, ctx) for s in population]
        order = sorted(range(params.n_bees), key=lambda b: (costs[b], population[b].key()))
        lead = order[0]
        if costs[lead] < best_cost:
            best, best_cost = population[lead], costs[lead]
            stagnant = 0
        else:
            stagnant += 1
        trace.append(best_cost)

        if verbose:
            print(
                f"[EBCD] Iteration {iteration}, best cost: {best_cost:.6g}, "
                f"stagnant: {stagnant}",
                file=sys.stderr,
            )
        if stagnant >= params.stagnation_limit:
            break

        elite = set(order[: params.elite_count])
        c_best, c_worst = costs[order[0]], costs[order[-1]]
        probabilities = recruitment_probabilities(costs)
        recruited = list(population)
        for b in range(params.n_bees):
            if b in elite:
                continue
            if rng.random() < _abandon_probability(costs[b], c_best, c_worst):
                recruited[b] = population[int(rng.choice(params.n_bees, p=probabilities))]
        population = recruited

    return EbcdResult(
        best=best,
        best_cost=best_cost,
        cost_trace=tuple(trace),
        iterations_run=iterations,
    )
