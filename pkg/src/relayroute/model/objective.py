"""Objectives for route assignments."""

from __future__ import annotations

from relayroute.model.build import RoutingContext, resolve_links
from relayroute.model.energy import FitnessBounds, route_fitness
from relayroute.model.evaluator import CostModel
from relayroute.state import FitnessComponents, Solution


def cost_model(ctx: RoutingContext) -> CostModel:
    if ctx.cost_model is None:
        ctx.cost_model = CostModel(ctx)
    return ctx.cost_model


def solution_fitness(s: Solution, ctx: RoutingContext) -> dict[int, FitnessComponents]:
    """Fitness components of every route of `s`, with interference from the co-assigned routes."""
    links = resolve_links(ctx, s.routes)
    return {
        r.ms: route_fitness(
            r, ctx.demand_of(r.ms), links[r.ms], ctx.cfg.frame, ctx.cfg.dist_rule
        )
        for r in s.routes
    }


def solution_cost(s: Solution, ctx: RoutingContext) -> float:
    """Sum over MSs of the route fitness F (to be minimised).

    Memoised per context; the memo is emptied when it reaches
    `ctx.cost_cache_limit` entries.
    """
    key = s.key()
    cached = ctx.cost_cache.get(key)
    if cached is not None:
        return cached

    cost = cost_model(ctx).cost(s)
    if len(ctx.cost_cache) >= ctx.cost_cache_limit:
        ctx.cost_cache.clear()
    ctx.cost_cache[key] = cost
    return cost


def candidate_bounds(ctx: RoutingContext, ms: int) -> FitnessBounds:
    """Term bounds over the candidates of `ms`, each priced as the only route in the frame."""
    return cost_model(ctx).bounds(ms)
