import math
from dataclasses import dataclass

import numpy as np
import pytest

from relayroute.model.energy import (
    DegenerateDist,
    FitnessBounds,
    InfeasibleHop,
    combine_fitness,
    link_energy_mj,
    normalized_f,
    route_energy_mj,
    route_fitness,
    slots_needed,
    traffic_cost,
)
from relayroute.params import FrameConfig
from relayroute.state import FitnessComponents, McsLevel, McsTable, Route

FC = FrameConfig()
L1 = McsLevel(1, 48, 6.0)
L4 = McsLevel(4, 144, 15.0)


@dataclass(frozen=True)
class Hop:
    hop_class: str
    bandwidth_hz: float
    level: McsLevel
    p_tx_mw: float
    received_mw: float


def test_slot_duration():
    assert FC.slot_duration_s == pytest.approx(5e-3 / 48)


def test_zero_demand_costs_nothing():
    assert link_energy_mj(0, L1, FC, 500.0) == 0.0


def test_ceiling_boundary_doubles_energy():
    one = link_energy_mj(48, L1, FC, 250.0)
    assert one == FC.slot_duration_s * 250.0
    assert link_energy_mj(49, L1, FC, 250.0) == 2 * one
    assert link_energy_mj(96, L1, FC, 250.0) == 2 * one


def test_slots_needed():
    assert slots_needed(0, L4) == 0
    assert slots_needed(144, L4) == 1
    assert slots_needed(145, L4) == 2
    assert slots_needed(1450, L1) == 31


def test_link_energy_rejects_bad_inputs():
    with pytest.raises(ValueError):
        link_energy_mj(-1, L1, FC, 1.0)
    with pytest.raises(ValueError):
        link_energy_mj(10, L1, FC, 0.0)


def test_route_energy_splits_by_hop_class():
    route = Route((5, 2, 1, 0))
    hops = [
        Hop("MR", 5e6, L1, 100.0, 1e-6),
        Hop("RR", 6e6, L4, 40.0, 2e-6),
        Hop("RB", 4e6, L4, 10.0, 3e-6),
    ]
    e = route_energy_mj(route, 1450, hops, FC)
    tau = FC.slot_duration_s
    assert e.e_mr_mj == pytest.approx(31 * tau * 100.0)
    assert e.e_rr_mj == pytest.approx(11 * tau * 40.0)
    assert e.e_rb_mj == pytest.approx(11 * tau * 10.0)
    assert e.total_mj == pytest.approx(e.e_mr_mj + e.e_rr_mj + e.e_rb_mj)


def test_route_energy_needs_one_state_per_hop():
    with pytest.raises(InfeasibleHop):
        route_energy_mj(Route((3, 1, 0)), 100, [Hop("MR", 5e6, L1, 1.0, 1.0)], FC)


def test_traffic_cost():
    assert traffic_cost(1450, 5e6) == 1450 / 5e6
    with pytest.raises(ValueError):
        traffic_cost(1, 0.0)


def test_fitness_uses_bottleneck_bandwidth_and_weakest_link():
    route = Route((5, 1, 0))
    hops = [Hop("MR", 8e6, L1, 100.0, 4e-6), Hop("RB", 4e6, L1, 50.0, 2e-6)]
    f = route_fitness(route, 960, hops, FC)
    energy = 20 * FC.slot_duration_s * 100.0 + 20 * FC.slot_duration_s * 50.0
    assert f.energy_term == pytest.approx(energy)
    assert f.traffic_term == 960 / 4e6
    assert f.dist_term == 2e-6
    assert f.f_value == pytest.approx(energy + 960 / 4e6 + 1 / 2e-6)

    first = route_fitness(route, 960, hops, FC, dist_rule="first_hop")
    assert first.dist_term == 4e-6


def test_degenerate_dist():
    with pytest.raises(DegenerateDist):
        combine_fitness(1.0, 1.0, 0.0)


def test_normalized_fitness_is_offset_and_clipped():
    comps = [
        FitnessComponents(1.0, 0.1, 1e-3, 0.0),
        FitnessComponents(3.0, 0.3, 1e-4, 0.0),
    ]
    bounds = FitnessBounds.over(comps)
    assert normalized_f(comps[0], bounds) == pytest.approx(1.0)
    assert normalized_f(comps[1], bounds) == pytest.approx(4.0)
    outside = FitnessComponents(10.0, 0.0, 1.0, 0.0)
    assert normalized_f(outside, bounds) == pytest.approx(2.0)


def test_flat_bounds_scale_to_zero():
    c = FitnessComponents(2.0, 0.2, 1e-3, 0.0)
    assert normalized_f(c, FitnessBounds.over([c])) == 1.0
    with pytest.raises(ValueError):
        FitnessBounds.over([])


def test_fitness_components_sum():
    f = combine_fitness(0.5, 0.25, 0.125)
    assert f.f_value == 0.5 + 0.25 + 8.0
    assert math.isclose(1 / f.dist_term, 8.0)


def test_cheapest_route_survives_demand_scaling():
    # 1728 is a multiple of every default bits_per_slot, so slots scale exactly
    levels = McsTable.default().levels
    rng = np.random.default_rng(3)
    checked = 0
    for _ in range(300):
        candidates = []
        for c in range(int(rng.integers(2, 7))):
            n_hops = int(rng.integers(1, 4))
            route = Route((100 + c,) + tuple(range(1, n_hops)) + (0,))
            hops = [
                Hop(
                    "MR" if h == 0 else ("RB" if h == n_hops - 1 else "RR"),
                    5e6,
                    levels[int(rng.integers(len(levels)))],
                    float(rng.uniform(1.0, 1000.0)),
                    1e-6,
                )
                for h in range(n_hops)
            ]
            candidates.append((route, hops))
        demand = 1728 * int(rng.integers(1, 4))
        energies = [route_energy_mj(r, demand, h, FC).total_mj for r, h in candidates]
        ranked = sorted(energies)
        if ranked[1] - ranked[0] <= 1e-9 * ranked[1]:
            continue
        best = energies.index(ranked[0])
        for scale in (2, 3, 5):
            scaled = [route_energy_mj(r, demand * scale, h, FC).total_mj for r, h in candidates]
            assert scaled.index(min(scaled)) == best
            assert scaled[best] == pytest.approx(scale * energies[best], rel=1e-12)
        checked += 1
    assert checked > 250
