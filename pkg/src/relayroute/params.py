"""Configuration dataclasses. Defaults describe the reference simulated network."""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from enum import Enum
from typing import Literal

from relayroute.state import McsTable
from relayroute.units import dbm_to_mw

__all__ = [
    "InvalidField",
    "Terrain",
    "Scenario",
    "TopologyConfig",
    "ChannelConfig",
    "FrameConfig",
    "BcoParams",
    "SimConfig",
    "SweepSpec",
]

DistRule = Literal["bottleneck", "first_hop"]
BaselineWeight = Literal["distance", "energy"]


class InvalidField(ValueError):
    """A rule broken by one or more fields, most likely culprit first.

    A name with a dot (`channel.reference_dist_m`) lives in another section.
    """

    def __init__(self, fields: str | tuple[str, ...], message: str):
        self.fields = (fields,) if isinstance(fields, str) else tuple(fields)
        super().__init__(message)


class Terrain(Enum):
    A = "A"
    B = "B"
    C = "C"


class Scenario(Enum):
    THREE_HOP = 3
    FOUR_HOP = 4
    FIVE_HOP = 5

    @property
    def max_hops(self) -> int:
        return self.value

    @property
    def label(self) -> str:
        return f"{self.value}hop"

    @classmethod
    def from_label(cls, label: str | int) -> Scenario:
        text = str(label).strip().lower().removesuffix("hop")
        try:
            return cls(int(text))
        except ValueError as e:
            raise ValueError(
                f"Unknown scenario '{label}'. Known: 3hop, 4hop, 5hop"
            ) from e


@dataclass(frozen=True, slots=True)
class TopologyConfig:
    n_rs: int = 10
    n_ms: int = 30
    deployment_radius_m: float = 2000.0
    d_min_m: float = 200.0
    d_max_m: float = 2000.0
    bandwidth_min_hz: float = 3.5e6
    bandwidth_max_hz: float = 10e6
    bs_rs_gain_min_db: float = 5.0
    bs_rs_gain_max_db: float = 20.0
    ms_gain_min_db: float = 1.0
    ms_gain_max_db: float = 10.0
    bs_height_m: float = 30.0
    rs_height_m: float = 10.0
    ms_height_m: float = 2.0
    tx_power_max_mw: float = 1000.0
    transparent_fraction: float = 0.3
    max_hops: int = 3
    max_routes_per_ms: int = 256

    def __post_init__(self):
        for name in ("n_rs", "n_ms"):
            if getattr(self, name) < 0:
                raise InvalidField(name, "Station counts must be non-negative")
        if not 0.0 <= self.transparent_fraction <= 1.0:
            raise InvalidField("transparent_fraction", "transparent_fraction must be within [0, 1]")
        if self.d_min_m <= 0:
            raise InvalidField("d_min_m", "d_min_m must be positive")
        if self.d_max_m < self.d_min_m:
            raise InvalidField(("d_max_m", "d_min_m"), "Link distance range must satisfy d_min <= d_max")
        if self.bandwidth_min_hz <= 0:
            raise InvalidField("bandwidth_min_hz", "bandwidth_min_hz must be positive")
        if self.bandwidth_max_hz < self.bandwidth_min_hz:
            raise InvalidField(
                ("bandwidth_max_hz", "bandwidth_min_hz"), "Bandwidth range must satisfy min <= max"
            )
        if self.bs_rs_gain_max_db < self.bs_rs_gain_min_db:
            raise InvalidField(("bs_rs_gain_max_db", "bs_rs_gain_min_db"), "BS/RS gain range is empty")
        if self.ms_gain_max_db < self.ms_gain_min_db:
            raise InvalidField(("ms_gain_max_db", "ms_gain_min_db"), "MS gain range is empty")
        for name in ("bs_height_m", "rs_height_m", "ms_height_m"):
            if getattr(self, name) <= 0:
                raise InvalidField(name, "Antenna heights must be positive")
        if self.tx_power_max_mw <= 0:
            raise InvalidField("tx_power_max_mw", "tx_power_max_mw must be positive")
        if self.max_hops < 1:
            raise InvalidField("max_hops", "max_hops must be at least 1")
        if self.max_routes_per_ms < 1:
            raise InvalidField("max_routes_per_ms", "max_routes_per_ms must be at least 1")

    @property
    def n_transparent(self) -> int:
        """Number of transparent relays; at least one relay stays non-transparent."""
        if self.n_rs == 0:
            return 0
        return min(int(self.transparent_fraction * self.n_rs), self.n_rs - 1)


@dataclass(frozen=True, slots=True)
class ChannelConfig:
    carrier_freq_mhz: float = 3500.0
    reference_dist_m: float = 100.0
    terrain: Terrain = Terrain.B
    noise_density_dbm_per_hz: float = -100.0
    shadowing_enabled: bool = False
    shadowing_sigma_db: float = 8.0

    def __post_init__(self):
        if self.carrier_freq_mhz <= 0:
            raise InvalidField("carrier_freq_mhz", "carrier_freq_mhz must be positive")
        if self.reference_dist_m <= 0:
            raise InvalidField("reference_dist_m", "reference_dist_m must be positive")
        if self.shadowing_sigma_db < 0:
            raise InvalidField("shadowing_sigma_db", "shadowing_sigma_db must be non-negative")

    @property
    def noise_density_mw_per_hz(self) -> float:
        return dbm_to_mw(self.noise_density_dbm_per_hz)


@dataclass(frozen=True, slots=True)
class FrameConfig:
    frame_duration_s: float = 5e-3
    slots_per_frame: int = 48

    def __post_init__(self):
        if self.frame_duration_s <= 0:
            raise InvalidField("frame_duration_s", "frame_duration_s must be positive")
        if self.slots_per_frame < 1:
            raise InvalidField("slots_per_frame", "slots_per_frame must be at least 1")

    @property
    def slot_duration_s(self) -> float:
        return self.frame_duration_s / self.slots_per_frame


@dataclass(frozen=True, slots=True)
class BcoParams:
    """Bee colony hyperparameters.

    max_inner_steps = 0 means 2 * (number of MSs), resolved at run time.
    """

    n_bees: int = 30
    max_inner_steps: int = 0
    max_iterations: int = 100
    stagnation_limit: int = 20
    elite_count: int = 2
    seed: int = 0

    def __post_init__(self):
        if self.n_bees < 1:
            raise InvalidField("n_bees", "n_bees must be at least 1")
        if not 1 <= self.elite_count <= self.n_bees:
            raise InvalidField(("elite_count", "n_bees"), "elite_count must be within [1, n_bees]")
        if self.max_inner_steps < 0:
            raise InvalidField("max_inner_steps", "max_inner_steps must be >= 0 (0 selects 2 * n_ms)")
        for name in ("max_iterations", "stagnation_limit"):
            if getattr(self, name) < 1:
                raise InvalidField(name, "Iteration limits must be at least 1")

    def inner_steps_for(self, n_ms: int) -> int:
        return self.max_inner_steps or max(1, 2 * n_ms)


@dataclass(frozen=True, slots=True)
class SimConfig:
    scenario: Scenario = Scenario.THREE_HOP
    n_frames: int = 2000
    seed: int = 0
    re_route_interval: int = 0
    demand_min_bits: int = 900
    demand_max_bits: int = 2000
    expected_demand_bits: int = 1450
    dist_rule: DistRule = "bottleneck"
    normalize_fitness: bool = False
    baseline_weight: BaselineWeight = "distance"
    power_cap_fallback: bool = True
    interference_enabled: bool = True
    topology: TopologyConfig = field(default_factory=TopologyConfig)
    channel: ChannelConfig = field(default_factory=ChannelConfig)
    frame: FrameConfig = field(default_factory=FrameConfig)
    mcs: McsTable = field(default_factory=McsTable.default)
    bco: BcoParams = field(default_factory=BcoParams)

    def __post_init__(self):
        if self.n_frames < 1:
            raise InvalidField("n_frames", "n_frames must be at least 1")
        if self.re_route_interval < 0:
            raise InvalidField("re_route_interval", "re_route_interval must be >= 0")
        if self.demand_min_bits < 0:
            raise InvalidField("demand_min_bits", "demand_min_bits must be non-negative")
        if self.demand_max_bits < self.demand_min_bits:
            raise InvalidField(
                ("demand_min_bits", "demand_max_bits"), "Demand range must satisfy min <= max"
            )
        if self.expected_demand_bits < 0:
            raise InvalidField("expected_demand_bits", "expected_demand_bits must be non-negative")
        if self.dist_rule not in ("bottleneck", "first_hop"):
            raise InvalidField("dist_rule", "dist_rule must be 'bottleneck' or 'first_hop'")
        if self.baseline_weight not in ("distance", "energy"):
            raise InvalidField("baseline_weight", "baseline_weight must be 'distance' or 'energy'")
        if self.channel.reference_dist_m > self.topology.d_min_m:
            raise InvalidField(
                ("channel.reference_dist_m", "topology.d_min_m"),
                "channel.reference_dist_m must not exceed topology.d_min_m",
            )

    @property
    def max_hops(self) -> int:
        return self.scenario.max_hops

    @property
    def n_rs(self) -> int:
        return self.topology.n_rs

    @property
    def n_ms(self) -> int:
        return self.topology.n_ms

    @property
    def topology_config(self) -> TopologyConfig:
        """Topology section with the scenario's hop bound applied."""
        return replace(self.topology, max_hops=self.max_hops)


@dataclass(frozen=True, slots=True)
class SweepSpec:
    """Axis sweep over station counts.

    Attributes:
        axis: 'ms_count' or 'rs_count'
        values: Strictly increasing axis values
        fixed: The other station count
        scenario: Hop bound of every point
        seeds_per_point: Number of seeds per axis value
    """

    axis: Literal["ms_count", "rs_count"]
    values: tuple[int, ...]
    fixed: int
    scenario: Scenario = Scenario.THREE_HOP
    seeds_per_point: int = 1

    def __post_init__(self):
        if self.axis not in ("ms_count", "rs_count"):
            raise ValueError("axis must be 'ms_count' or 'rs_count'")
        if not self.values:
            raise ValueError("values must be non-empty")
        if any(b <= a for a, b in zip(self.values[:-1], self.values[1:])):
            raise ValueError("values must be strictly increasing")
        if any(v < 0 for v in self.values) or self.fixed < 0:
            raise ValueError("Station counts must be non-negative")
        if self.seeds_per_point < 1:
            raise ValueError("seeds_per_point must be at least 1")
