import math
import time
import warnings
from dataclasses import replace

import numpy as np
import pytest

from conftest import BS, MS, NRS, make_topology, small_config
from relayroute.model.build import build_context
from relayroute.model.objective import solution_cost
from relayroute.model.topology import RouteCapWarning, generate_topology
from relayroute.params import BcoParams, ChannelConfig, SimConfig
from relayroute.routing.baseline import exhaustive_best
from relayroute.routing.bco import (
    EmptyCandidates,
    NonPositiveCost,
    init_population,
    local_improve,
    recruitment_probabilities,
    run_ebcd,
)
from relayroute.state import Route

QUIET = ChannelConfig(noise_density_dbm_per_hz=-174.0)
FAST = BcoParams(n_bees=8, max_iterations=30, stagnation_limit=8, elite_count=2)


def _desk_context(seed, n_ms=4, n_rs=3):
    cfg = replace(small_config(n_ms=n_ms, n_rs=n_rs, seed=seed), channel=QUIET)
    t = generate_topology(cfg.topology_config, seed)
    return build_context(t, cfg)


def _desk_seeds(count):
    """Seeds whose topology has a reachable MS and a small joint search space."""
    found = []
    seed = 0
    while len(found) < count:
        ctx = _desk_context(seed)
        size = math.prod(len(r) for r in ctx.candidates.routes.values())
        if ctx.candidates.routes and size <= 20_000:
            found.append(seed)
        seed += 1
    return found


# ---------- Recruitment ----------


def test_recruitment_worked_example():
    p = recruitment_probabilities([2.0, 3.0, 5.0])
    assert p == pytest.approx([0.48387, 0.32258, 0.19355], abs=1e-5)
    assert math.fsum(p) == pytest.approx(1.0, abs=1e-12)


@pytest.mark.parametrize("n", [1, 2, 7, 30])
def test_equal_costs_recruit_uniformly(n):
    assert recruitment_probabilities([4.2] * n) == pytest.approx([1.0 / n] * n, abs=1e-15)


def test_recruitment_is_scale_invariant():
    costs = [3.0, 1.5, 12.0, 7.25]
    base = recruitment_probabilities(costs)
    assert recruitment_probabilities([c * 8.0 for c in costs]) == base
    assert recruitment_probabilities([c * 0.25 for c in costs]) == base


def test_recruitment_is_permutation_equivariant():
    costs = [3.0, 1.5, 12.0, 7.25]
    order = [2, 0, 3, 1]
    base = recruitment_probabilities(costs)
    permuted = recruitment_probabilities([costs[i] for i in order])
    assert permuted == pytest.approx([base[i] for i in order], abs=1e-15)


@pytest.mark.parametrize("bad", [[1.0, 0.0], [-1.0], [1.0, math.inf]])
def test_recruitment_rejects_non_positive_costs(bad):
    with pytest.raises(NonPositiveCost):
        recruitment_probabilities(bad)


def test_recruitment_probability_vector():
    rng = np.random.default_rng(1)
    for _ in range(50):
        costs = list(rng.uniform(0.1, 100.0, size=int(rng.integers(1, 40))))
        p = recruitment_probabilities(costs)
        assert all(x >= 0 for x in p)
        assert math.fsum(p) == pytest.approx(1.0, abs=1e-12)


# ---------- Population and local search ----------


def test_population_is_seeded():
    ctx = _desk_context(3)
    a = init_population(ctx.candidates.routes, FAST, np.random.default_rng(5))
    b = init_population(ctx.candidates.routes, FAST, np.random.default_rng(5))
    assert a == b
    assert len(a) == FAST.n_bees
    for s in a:
        assert set(s.assignment) == set(ctx.candidates.routes)
        for ms, route in s.assignment.items():
            assert route in ctx.candidates.routes[ms]


def test_population_of_one():
    ctx = _desk_context(3)
    assert len(init_population(ctx.candidates.routes, replace(FAST, n_bees=1, elite_count=1))) == 1


def test_single_candidates_give_identical_bees():
    candidates = {3: (Route((3, 0)),), 4: (Route((4, 1, 0)),)}
    bees = init_population(candidates, FAST)
    assert all(b == bees[0] for b in bees)


def test_empty_candidates():
    with pytest.raises(EmptyCandidates):
        init_population({}, FAST)
    with pytest.raises(EmptyCandidates):
        init_population({3: ()}, FAST)


@pytest.mark.parametrize("seed", range(5))
def test_local_improve_never_increases_cost(seed):
    ctx = _desk_context(seed)
    if not ctx.candidates.routes:
        pytest.skip("no reachable MS")
    rng = np.random.default_rng(seed)
    (s,) = init_population(ctx.candidates.routes, replace(FAST, n_bees=1, elite_count=1), rng)
    for _ in range(20):
        improved = local_improve(s, ctx, rng)
        assert solution_cost(improved, ctx) <= solution_cost(s, ctx)
        s = improved


def test_local_improve_adopts_the_cheaper_candidate():
    # MS 3 reaches the BS directly or through the relay
    t = make_topology([(BS, 0.0, 0.0), (NRS, 300.0, 0.0), (MS, 1500.0, 0.0), (MS, 600.0, 0.0)])
    cfg = replace(small_config(), channel=QUIET)
    ctx = build_context(t, cfg)
    routes = ctx.candidates.routes[3]
    start = init_population(ctx.candidates.routes, replace(FAST, n_bees=1, elite_count=1))[0]
    best = local_improve(start, ctx, ms=3)
    costs = {r: solution_cost(start.replace_route(r), ctx) for r in routes}
    assert best.assignment[3] == min(routes, key=lambda r: (costs[r], r))
    assert local_improve(best, ctx, ms=3) == best


def test_local_improve_matches_coordinate_descent():
    ctx = _desk_context(_desk_seeds(1)[0])
    routes = ctx.candidates.routes
    (s,) = init_population(routes, replace(FAST, n_bees=1, elite_count=1), np.random.default_rng(0))

    oracle = dict(s.assignment)
    ours = s
    for _ in range(6):
        for ms in sorted(routes):
            def cost_with(r, ms=ms):
                trial = dict(oracle)
                trial[ms] = r
                return solution_cost(type(s).from_assignment(trial), ctx)

            oracle[ms] = min(routes[ms], key=lambda r: (cost_with(r), r))
            ours = local_improve(ours, ctx, ms=ms)
    assert ours.assignment == oracle


# ---------- Full optimiser ----------


def test_single_candidate_per_ms_stagnates():
    t = make_topology([(BS, 0.0, 0.0), (MS, 500.0, 0.0), (MS, 0.0, 700.0)])
    ctx = build_context(t, replace(small_config(), channel=QUIET))
    params = replace(FAST, stagnation_limit=5, max_iterations=50)
    result = run_ebcd(ctx, params)
    assert result.best.assignment == {1: Route((1, 0)), 2: Route((2, 0))}
    assert result.iterations_run == 5
    assert len(set(result.cost_trace)) == 1


def test_ebcd_is_deterministic():
    ctx = _desk_context(4)
    a = run_ebcd(ctx, FAST)
    b = run_ebcd(build_context(ctx.topology, ctx.cfg), FAST)
    assert a == b


@pytest.mark.parametrize("seed", range(200))
def test_cost_trace_never_increases(seed):
    n_ms, n_rs = 2 + seed % 5, 1 + seed % 4
    cfg = replace(small_config(n_ms=n_ms, n_rs=n_rs, seed=seed), channel=QUIET)
    cfg = replace(cfg, topology=replace(cfg.topology, max_routes_per_ms=16))
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", RouteCapWarning)
        ctx = build_context(generate_topology(cfg.topology_config, seed), cfg)
    if not ctx.candidates.routes:
        pytest.skip("no reachable MS")
    params = BcoParams(n_bees=6, max_iterations=8, stagnation_limit=4, elite_count=2, seed=seed)
    result = run_ebcd(ctx, params)
    trace = result.cost_trace
    assert all(b <= a for a, b in zip(trace, trace[1:]))
    assert result.best_cost == trace[-1]
    assert solution_cost(result.best, ctx) == result.best_cost


# (n_ms, n_rs) of the exhaustive comparisons
DESK_SHAPES = [(n_ms, n_rs) for n_ms in range(2, 7) for n_rs in range(1, 5)]


def _exhaustive_instances(count):
    """Contexts small enough to enumerate: at most 4 candidates per MS.

    Instances cycle through DESK_SHAPES; the second block of 20 runs on the
    default channel, the rest on the thermal noise floor.
    """
    instances = []
    for i in range(count):
        n_ms, n_rs = DESK_SHAPES[i % len(DESK_SHAPES)]
        channel = ChannelConfig() if 20 <= i < 40 else QUIET
        seed = 1000 * i
        while True:
            cfg = replace(small_config(n_ms=n_ms, n_rs=n_rs, seed=seed), channel=channel)
            cfg = replace(cfg, topology=replace(cfg.topology, max_routes_per_ms=4))
            with warnings.catch_warnings():
                warnings.simplefilter("ignore", RouteCapWarning)
                ctx = build_context(generate_topology(cfg.topology_config, seed), cfg)
            if ctx.candidates.routes:
                instances.append(ctx)
                break
            seed += 1
    return instances


def test_ebcd_close_to_exhaustive_optimum():
    instances = _exhaustive_instances(50)
    params = BcoParams(n_bees=10, max_iterations=30, stagnation_limit=8, elite_count=2)
    within = 0
    for i, ctx in enumerate(instances):
        assert math.prod(len(r) for r in ctx.candidates.routes.values()) <= 4**6
        optimum = solution_cost(exhaustive_best(ctx), ctx)
        found = run_ebcd(ctx, replace(params, seed=i)).best_cost
        assert found >= optimum
        if found <= optimum * 1.05:
            within += 1
    assert within >= math.ceil(0.9 * len(instances))


def test_default_scale_iteration_is_fast():
    cfg = SimConfig()
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", RouteCapWarning)
        ctx = build_context(generate_topology(cfg.topology_config, 0), cfg)
    assert len(ctx.candidates.routes) >= 20
    started = time.perf_counter()
    result = run_ebcd(ctx, replace(BcoParams(), max_iterations=1))
    assert time.perf_counter() - started < 30.0
    assert result.iterations_run == 1
    assert len(ctx.cost_cache) <= ctx.cost_cache_limit
