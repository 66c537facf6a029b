"""Per-link and per-route energy, traffic cost and the route fitness F = E + T + 1/Dist.

Units: powers in mW, times in s, energies in mJ (mW * s).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Literal, Protocol, Sequence

from relayroute.params import FrameConfig
from relayroute.state import EnergyBreakdown, FitnessComponents, McsLevel, Route


class InfeasibleHop(ValueError):
    pass


class DegenerateDist(ValueError):
    pass


class HopState(Protocol):
    hop_class: Literal["MR", "RR", "RB"]
    bandwidth_hz: float
    level: McsLevel
    p_tx_mw: float

    @property
    def received_mw(self) -> float: ...


def slots_needed(demand_bits: int, level: McsLevel) -> int:
    """Slots are indivisible: ceil(d / D(k))."""
    return -(-int(demand_bits) // level.bits_per_slot)


def link_energy_mj(
    demand_bits: int, level: McsLevel, fc: FrameConfig, p_required_mw: float
) -> float:
    """ceil(d / D(k)) * tau * P."""
    if demand_bits < 0:
        raise ValueError("demand_bits must be non-negative")
    if p_required_mw <= 0:
        raise ValueError("Transmit power must be positive")
    return slots_needed(demand_bits, level) * fc.slot_duration_s * p_required_mw


def route_energy_mj(
    route: Route, demand_bits: int, links: Sequence[HopState], fc: FrameConfig
) -> EnergyBreakdown:
    """E = E_MR + E_RR + E_RB; the same d_i bits cross every hop."""
    if len(links) != route.hop_count:
        raise InfeasibleHop(
            f"Route {route} has {route.hop_count} hops but {len(links)} resolved links"
        )
    per_class: dict[str, list[float]] = {"MR": [], "RR": [], "RB": []}
    for link in links:
        per_class[link.hop_class].append(
            link_energy_mj(demand_bits, link.level, fc, link.p_tx_mw)
        )
    return EnergyBreakdown(
        e_mr_mj=math.fsum(per_class["MR"]),
        e_rr_mj=math.fsum(per_class["RR"]),
        e_rb_mj=math.fsum(per_class["RB"]),
    )


def traffic_cost(demand_bits: int, bandwidth_hz: float) -> float:
    """T = d_i / BW."""
    if bandwidth_hz <= 0:
        raise ValueError("bandwidth_hz must be positive")
    return demand_bits / bandwidth_hz


def combine_fitness(energy_mj: float, traffic: float, dist_mw: float) -> FitnessComponents:
    if dist_mw <= 0:
        raise DegenerateDist(f"Received power {dist_mw} mW is not positive")
    return FitnessComponents(
        energy_term=energy_mj,
        traffic_term=traffic,
        dist_term=dist_mw,
        f_value=energy_mj + traffic + 1.0 / dist_mw,
    )


def route_fitness(
    route: Route,
    demand_bits: int,
    links: Sequence[HopState],
    fc: FrameConfig,
    dist_rule: Literal["bottleneck", "first_hop"] = "bottleneck",
) -> FitnessComponents:
    """F of one route.

    T uses the bottleneck (narrowest) link bandwidth; Dist is the minimum
    received power over the route's links, or the first hop's with
    dist_rule='first_hop'.
    """
    energy = route_energy_mj(route, demand_bits, links, fc)
    traffic = traffic_cost(demand_bits, min(link.bandwidth_hz for link in links))
    if dist_rule == "first_hop":
        dist = links[0].received_mw
    else:
        dist = min(link.received_mw for link in links)
    return combine_fitness(energy.total_mj, traffic, dist)


# ---------- Normalisation ----------


@dataclass(frozen=True, slots=True)
class FitnessBounds:
    """Min/max of each fitness term over a candidate set."""

    energy: tuple[float, float]
    traffic: tuple[float, float]
    inv_dist: tuple[float, float]

    @classmethod
    def over(cls, components: Iterable[FitnessComponents]) -> FitnessBounds:
        comps = list(components)
        if not comps:
            raise ValueError("Cannot bound an empty candidate set")
        e = [c.energy_term for c in comps]
        t = [c.traffic_term for c in comps]
        d = [1.0 / c.dist_term for c in comps]
        return cls((min(e), max(e)), (min(t), max(t)), (min(d), max(d)))


def _scaled(value: float, bounds: tuple[float, float]) -> float:
    lo, hi = bounds
    if hi == lo:
        return 0.0
    return min(1.0, max(0.0, (value - lo) / (hi - lo)))


def normalized_f(components: FitnessComponents, bounds: FitnessBounds) -> float:
    """1 + the three min-max scaled terms, each clipped to [0, 1].

    The offset keeps normalised costs strictly positive for recruitment.
    """
    return 1.0 + (
        _scaled(components.energy_term, bounds.energy)
        + _scaled(components.traffic_term, bounds.traffic)
        + _scaled(1.0 / components.dist_term, bounds.inv_dist)
    )
