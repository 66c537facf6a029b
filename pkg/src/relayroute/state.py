"""Module with dataclasses to hold the state for the main entities of the program"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Literal, Mapping

from relayroute.units import db_to_linear

__all__ = [
    "StationKind",
    "Station",
    "Link",
    "Topology",
    "Route",
    "McsLevel",
    "McsTable",
    "DEFAULT_MCS_LEVELS",
    "LinkBudget",
    "TrafficDemand",
    "EnergyBreakdown",
    "FitnessComponents",
    "Solution",
    "FrameResult",
    "RunReport",
    "ComparisonReport",
    "Algorithm",
    "HopClass",
]

StationId = int

HopClass = Literal["MR", "RR", "RB"]


class StationKind(Enum):
    """Enum to represent the role of a station in the relay tree"""

    BS = 0
    TRANSPARENT_RS = 1
    NON_TRANSPARENT_RS = 2
    MS = 3

    @property
    def is_relay(self) -> bool:
        return self in (StationKind.TRANSPARENT_RS, StationKind.NON_TRANSPARENT_RS)


class Algorithm(Enum):
    EBCD = "ebcd"
    DIJKSTRA = "dijkstra"


@dataclass(frozen=True, slots=True)
class Station:
    """Class to represent a station

    Attributes:
        id: Unique id within a topology (also its index in Topology.stations)
        kind: Role of the station
        x, y: Position in meters, BS at the origin
        antenna_height: Antenna height in meters
        antenna_gain_db: Antenna gain in dB
        tx_power_max_mw: Transmit power cap in milliwatts
    """

    id: StationId
    kind: StationKind
    x: float
    y: float
    antenna_height: float
    antenna_gain_db: float
    tx_power_max_mw: float = 1000.0

    def __post_init__(self):
        if self.antenna_height <= 0:
            raise ValueError("Antenna height must be positive")
        if self.tx_power_max_mw <= 0:
            raise ValueError("Maximum transmit power must be positive")

    @property
    def gain_linear(self) -> float:
        return db_to_linear(self.antenna_gain_db)

    def distance_to(self, other: Station) -> float:
        return math.hypot(self.x - other.x, self.y - other.y)


@dataclass(frozen=True, slots=True)
class Link:
    """Directed candidate link between two stations.

    Attributes:
        src: Transmitting station id
        dst: Receiving station id
        distance_m: Euclidean length in meters
        bandwidth_hz: Channel bandwidth of the link in hertz
    """

    src: StationId
    dst: StationId
    distance_m: float
    bandwidth_hz: float

    def __post_init__(self):
        if self.distance_m <= 0:
            raise ValueError("Link distance must be positive")
        if self.bandwidth_hz <= 0:
            raise ValueError("Link bandwidth must be positive")


@dataclass(frozen=True, slots=True, order=True)
class Route:
    """Ordered uplink chain MS -> ... -> BS. Orders lexicographically by hops."""

    hops: tuple[StationId, ...]

    @property
    def hop_count(self) -> int:
        return len(self.hops) - 1

    @property
    def ms(self) -> StationId:
        return self.hops[0]

    def pairs(self) -> tuple[tuple[StationId, StationId], ...]:
        return tuple(zip(self.hops[:-1], self.hops[1:]))

    def __str__(self) -> str:
        return "-".join(str(h) for h in self.hops)


@dataclass(frozen=True, slots=True)
class Topology:
    """Canonical in-memory representation of a relay network.

    Attributes:
        stations: Tuple of stations, stations[i].id == i, station 0 is the BS
        links: Tuple of direction-legal, distance-feasible links sorted by (src, dst)
        max_hops: Hop bound used when the topology was generated
        deployment_radius_m: Radius of the placement disc
        unreachable: Frozenset of MS ids without any valid route (flagged at generation)
        link_index: Mapping (src, dst) -> Link (derived)
        adjacency: Mapping src -> sorted tuple of dst ids (derived)
    """

    stations: tuple[Station, ...]
    links: tuple[Link, ...]
    max_hops: int
    deployment_radius_m: float
    unreachable: frozenset[StationId] = frozenset()

    link_index: Mapping[tuple[StationId, StationId], Link] = field(
        init=False, compare=False, repr=False
    )
    adjacency: Mapping[StationId, tuple[StationId, ...]] = field(
        init=False, compare=False, repr=False
    )

    def __post_init__(self):
        if sum(1 for s in self.stations if s.kind is StationKind.BS) != 1:
            raise ValueError("A topology must contain exactly one base station")
        for idx, station in enumerate(self.stations):
            if station.id != idx:
                raise ValueError("Station ids must match their position in stations")
        if self.max_hops < 1:
            raise ValueError("max_hops must be at least 1")

        index = {(link.src, link.dst): link for link in self.links}
        object.__setattr__(self, "link_index", index)

        adj: dict[StationId, list[StationId]] = {}
        for src, dst in sorted(index):
            adj.setdefault(src, []).append(dst)
        object.__setattr__(
            self, "adjacency", {src: tuple(dsts) for src, dsts in adj.items()}
        )

    @property
    def base_station(self) -> Station:
        return next(s for s in self.stations if s.kind is StationKind.BS)

    @property
    def mobile_stations(self) -> tuple[Station, ...]:
        return tuple(s for s in self.stations if s.kind is StationKind.MS)

    @property
    def relays(self) -> tuple[Station, ...]:
        return tuple(s for s in self.stations if s.kind.is_relay)

    def kind_of(self, sid: StationId) -> StationKind:
        return self.stations[sid].kind

    def link(self, src: StationId, dst: StationId) -> Link:
        return self.link_index[(src, dst)]

    def has_station(self, sid: StationId) -> bool:
        return 0 <= sid < len(self.stations)


# ---------- Radio ----------


@dataclass(frozen=True, slots=True)
class McsLevel:
    """One modulation and coding level.

    Attributes:
        index: Level index k
        bits_per_slot: Bits carried by one slot, D(k)
        snr_threshold_db: Minimum SNR in dB, delta(k)
    """

    index: int
    bits_per_slot: int
    snr_threshold_db: float

    def __post_init__(self):
        if self.bits_per_slot <= 0:
            raise ValueError("bits_per_slot must be positive")


DEFAULT_MCS_LEVELS: tuple[tuple[int, int, float], ...] = (
    (1, 48, 6.0),
    (2, 72, 8.5),
    (3, 96, 11.5),
    (4, 144, 15.0),
    (5, 192, 19.0),
    (6, 216, 21.0),
)


@dataclass(frozen=True, slots=True)
class McsTable:
    levels: tuple[McsLevel, ...]

    def __post_init__(self):
        if not self.levels:
            raise ValueError("An MCS table needs at least one level")
        for lo, hi in zip(self.levels[:-1], self.levels[1:]):
            if hi.index <= lo.index:
                raise ValueError("MCS levels must be sorted by strictly increasing index")
            if hi.bits_per_slot <= lo.bits_per_slot:
                raise ValueError("bits_per_slot must increase strictly with the index")
            if hi.snr_threshold_db <= lo.snr_threshold_db:
                raise ValueError("snr_threshold_db must increase strictly with the index")

    @classmethod
    def from_triples(cls, triples) -> McsTable:
        return cls(
            tuple(McsLevel(int(k), int(bits), float(snr)) for k, bits, snr in triples)
        )

    @classmethod
    def default(cls) -> McsTable:
        return cls.from_triples(DEFAULT_MCS_LEVELS)

    @property
    def lowest(self) -> McsLevel:
        return self.levels[0]

    def as_triples(self) -> list[list[float | int]]:
        return [[lv.index, lv.bits_per_slot, lv.snr_threshold_db] for lv in self.levels]


@dataclass(frozen=True, slots=True)
class LinkBudget:
    """Linear-domain quantities of one transmission.

    Attributes:
        path_loss_db: Path loss L(i,j) in dB
        path_loss_linear: 10^(path_loss_db/10)
        gain_product_linear: G_i * G_j
        noise_plus_interference_mw: B*N0 + I(i,j) in milliwatts
    """

    path_loss_db: float
    path_loss_linear: float
    gain_product_linear: float
    noise_plus_interference_mw: float

    def __post_init__(self):
        if self.path_loss_linear < 1.0:
            raise ValueError("Linear path loss must be >= 1")
        if self.noise_plus_interference_mw < 0:
            raise ValueError("Noise plus interference must be non-negative")


# ---------- Energy ----------


@dataclass(frozen=True, slots=True)
class TrafficDemand:
    ms: StationId
    bits_this_frame: int

    def __post_init__(self):
        if self.bits_this_frame < 0:
            raise ValueError("A demand cannot be negative")


@dataclass(frozen=True, slots=True)
class EnergyBreakdown:
    """Energy of one route (or a sum of routes) split by hop class, in mJ."""

    e_mr_mj: float = 0.0
    e_rr_mj: float = 0.0
    e_rb_mj: float = 0.0

    @property
    def total_mj(self) -> float:
        return math.fsum((self.e_mr_mj, self.e_rr_mj, self.e_rb_mj))

    def __add__(self, other: EnergyBreakdown) -> EnergyBreakdown:
        return EnergyBreakdown(
            self.e_mr_mj + other.e_mr_mj,
            self.e_rr_mj + other.e_rr_mj,
            self.e_rb_mj + other.e_rb_mj,
        )

    @classmethod
    def summed(cls, parts) -> EnergyBreakdown:
        parts = list(parts)
        return cls(
            math.fsum(p.e_mr_mj for p in parts),
            math.fsum(p.e_rr_mj for p in parts),
            math.fsum(p.e_rb_mj for p in parts),
        )


@dataclass(frozen=True, slots=True)
class FitnessComponents:
    """Terms of the route fitness F = E + T + 1/Dist.

    Attributes:
        energy_term: E in mJ
        traffic_term: T, bits per hertz of the bottleneck link
        dist_term: Dist, received power in mW
        f_value: F
    """

    energy_term: float
    traffic_term: float
    dist_term: float
    f_value: float


# ---------- Routing ----------


@dataclass(frozen=True, slots=True)
class Solution:
    """One route per reachable MS; the unit the bee colony optimizes.

    Attributes:
        routes: Tuple of routes ordered by MS id
        unreachable: MS ids that have no route
    """

    routes: tuple[Route, ...]
    unreachable: frozenset[StationId] = frozenset()

    def __post_init__(self):
        ms_ids = [r.ms for r in self.routes]
        if ms_ids != sorted(set(ms_ids)):
            raise ValueError("Solution routes must be unique per MS and ordered by MS id")

    @classmethod
    def from_assignment(
        cls,
        assignment: Mapping[StationId, Route],
        unreachable: frozenset[StationId] = frozenset(),
    ) -> Solution:
        return cls(tuple(assignment[ms] for ms in sorted(assignment)), unreachable)

    @property
    def assignment(self) -> dict[StationId, Route]:
        return {r.ms: r for r in self.routes}

    def key(self) -> tuple[tuple[StationId, ...], ...]:
        return tuple(r.hops for r in self.routes)

    def replace_route(self, route: Route) -> Solution:
        return Solution(
            tuple(route if r.ms == route.ms else r for r in self.routes),
            self.unreachable,
        )


# ---------- Reports ----------


@dataclass(frozen=True, slots=True)
class FrameResult:
    frame_index: int
    total_energy_mj: float
    per_class_energy: EnergyBreakdown
    slots_used: int
    slots_demanded: int
    carried_over_bits: int
    power_capped_links: int
    bits_sampled: int = 0
    bits_served: int = 0


@dataclass(frozen=True, slots=True)
class RunReport:
    algorithm: Algorithm
    mean_energy_per_frame_mj: float
    frames: tuple[FrameResult, ...]
    unreachable_count: int
    routing_wallclock_s: float
    bits_sampled: int = 0
    bits_served: int = 0
    bits_queued: int = 0
    demand_digest: str = ""
    capped_candidate_ms: int = 0

    @property
    def total_energy_mj(self) -> float:
        return math.fsum(f.total_energy_mj for f in self.frames)

    @property
    def power_capped_links(self) -> int:
        return sum(f.power_capped_links for f in self.frames)


def savings_percent(baseline: RunReport, candidate: RunReport) -> float:
    """100 * (E_base - E_cand) / E_base on mean per-frame energy; 0 when E_base is 0."""
    e_base = baseline.mean_energy_per_frame_mj
    e_cand = candidate.mean_energy_per_frame_mj
    if e_base == 0:
        return 0.0
    return 100.0 * (e_base - e_cand) / e_base


@dataclass(frozen=True, slots=True)
class ComparisonReport:
    ebcd: RunReport
    baseline: RunReport
    savings_percent: float
