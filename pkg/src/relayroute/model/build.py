"""Routing context assembly for relayroute.

Build the shared evaluation state of one routing decision by:
  1) computing the radio map of a topology (gains, all-pairs path loss,
     transmitter->receiver coupling G_i*G_j/L), and
  2) resolving the links of a set of routes: MCS level, required and
     actual transmit power, interference, power-cap flag.

Interference is resolved in two passes per evaluation. Pass 1 prices every
transmission with I = 0; pass 2 sets I(i,j) to the sum of pass-1 received
powers at j from every other transmitter of the same frame and prices again.
A station's own transmissions and transmissions from the receiver itself
are not counted as interference, so with S[u] the pass-1 power sent by
station u in the frame, I(i,j) = sum over u != i of S[u] * coupling[u, j].
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import TYPE_CHECKING, Mapping, Sequence

import numpy as np

from relayroute.model.channel import (
    interference_mw,
    pair_path_loss_db,
    price_transmissions,
    received_power_mw,
    thresholds_linear,
)
from relayroute.model.energy import InfeasibleHop
from relayroute.model.topology import CandidateSet, candidate_routes, hop_class
from relayroute.params import SimConfig
from relayroute.rng import stream
from relayroute.state import HopClass, McsLevel, Route, Topology
from relayroute.units import db_to_linear

if TYPE_CHECKING:
    from relayroute.model.evaluator import CostModel

COST_CACHE_LIMIT = 50_000


@dataclass(frozen=True, slots=True)
class RadioMap:
    """All-pairs radio quantities of a topology, indexed by station id.

    Attributes:
        gain: Linear antenna gains
        tx_power_max: Transmit power caps in mW
        path_loss_db: Path loss matrix in dB (diagonal is +inf)
        path_loss_linear: Linear path loss matrix (diagonal is +inf)
        coupling: G_i * G_j / L(i, j) (diagonal is 0)
    """

    gain: np.ndarray
    tx_power_max: np.ndarray
    path_loss_db: np.ndarray
    path_loss_linear: np.ndarray
    coupling: np.ndarray


def build_radio_map(topology: Topology, cfg: SimConfig, seed: int | None = None) -> RadioMap:
    """Radio map of `topology`; `seed` feeds the shadowing stream when enabled."""
    cc = cfg.channel
    stations = topology.stations
    n = len(stations)

    shadow = np.zeros((n, n))
    if cc.shadowing_enabled and cc.shadowing_sigma_db > 0:
        draws = stream(seed or 0, "shadowing").normal(0.0, cc.shadowing_sigma_db, size=(n, n))
        upper = np.triu(draws, k=1)
        shadow = upper + upper.T

    pl_db = np.full((n, n), np.inf)
    for a in stations:
        for b in stations:
            if a.id != b.id:
                pl_db[a.id, b.id] = pair_path_loss_db(
                    cc,
                    a.distance_to(b),
                    a.antenna_height,
                    b.antenna_height,
                    float(shadow[a.id, b.id]),
                )

    gain = np.array([s.gain_linear for s in stations])
    pl_lin = np.full((n, n), np.inf)
    finite = np.isfinite(pl_db)
    pl_lin[finite] = db_to_linear(pl_db[finite])
    coupling = np.outer(gain, gain) / pl_lin

    return RadioMap(
        gain=gain,
        tx_power_max=np.array([s.tx_power_max_mw for s in stations]),
        path_loss_db=pl_db,
        path_loss_linear=pl_lin,
        coupling=coupling,
    )


@dataclass(frozen=True, slots=True)
class LinkState:
    """One resolved transmission of a route.

    Attributes:
        src, dst: Station ids
        hop_class: MR, RR or RB
        bandwidth_hz: Link bandwidth
        level: Selected MCS level (lowest level when capped)
        p_required_mw: Power that meets the level's SNR threshold
        p_tx_mw: Power actually transmitted, min(p_required, P_max)
        gain_tx_linear, gain_rx_linear: Endpoint antenna gains
        path_loss_linear: L(i, j)
        interference_mw: I(i, j) of the second pass
        capped: True if even the lowest level needs more than P_max
    """

    src: int
    dst: int
    hop_class: HopClass
    bandwidth_hz: float
    level: McsLevel
    p_required_mw: float
    p_tx_mw: float
    gain_tx_linear: float
    gain_rx_linear: float
    path_loss_linear: float
    interference_mw: float
    capped: bool

    @property
    def received_mw(self) -> float:
        """Received power at the required transmit power."""
        return received_power_mw(
            self.p_required_mw,
            self.gain_tx_linear,
            self.gain_rx_linear,
            self.path_loss_linear,
        )


@dataclass(slots=True)
class RoutingContext:
    """Everything needed to price routes of one routing decision.

    Attributes:
        topology: The network
        cfg: Simulation config (channel, frame, MCS table and flags)
        radio: Radio map of the topology
        candidates: Candidate routes per reachable MS
        demands: Bits per MS used to price routes
        cost_cache: Memo of solution costs keyed by Solution.key(), emptied
            once it holds `cost_cache_limit` entries
        cost_model: Per-link pricing tables, built on first use
    """

    topology: Topology
    cfg: SimConfig
    radio: RadioMap
    candidates: CandidateSet
    demands: Mapping[int, int]
    cost_cache: dict = field(default_factory=dict)
    cost_cache_limit: int = COST_CACHE_LIMIT
    cost_model: CostModel | None = field(default=None, repr=False, compare=False)

    def demand_of(self, ms: int) -> int:
        return int(self.demands.get(ms, self.cfg.expected_demand_bits))

    def with_demands(self, demands: Mapping[int, int]) -> RoutingContext:
        return RoutingContext(
            topology=self.topology,
            cfg=self.cfg,
            radio=self.radio,
            candidates=self.candidates,
            demands=dict(demands),
            cost_cache_limit=self.cost_cache_limit,
        )


def build_context(
    topology: Topology,
    cfg: SimConfig,
    demands: Mapping[int, int] | None = None,
    *,
    radio: RadioMap | None = None,
    candidates: CandidateSet | None = None,
) -> RoutingContext:
    if candidates is None:
        candidates = candidate_routes(
            topology, cfg.max_hops, cfg.topology.max_routes_per_ms
        )
    if demands is None:
        demands = {ms: cfg.expected_demand_bits for ms in candidates.reachable}
    return RoutingContext(
        topology=topology,
        cfg=cfg,
        radio=radio if radio is not None else build_radio_map(topology, cfg, cfg.seed),
        candidates=candidates,
        demands=dict(demands),
    )


def transmitter_reach(radio: RadioMap, src: np.ndarray, dst: np.ndarray) -> np.ndarray:
    """reach[u, t]: coupling of station u into the receiver of transmission t.

    Zero for u = src[t] (a station does not interfere with itself) and, through
    the zero diagonal of the coupling matrix, for u = dst[t].
    """
    reach = radio.coupling[:, dst]
    reach[src, np.arange(len(src))] = 0.0
    return reach


def _price(
    ctx: RoutingContext,
    noise_plus_interference: np.ndarray,
    path_loss: np.ndarray,
    gain_product: np.ndarray,
    p_max: np.ndarray,
    pairs: Sequence[tuple[int, int, int]],
) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    index, p_required, p_tx, capped = price_transmissions(
        thresholds_linear(ctx.cfg.mcs), noise_plus_interference, path_loss, gain_product, p_max
    )
    if not ctx.cfg.power_cap_fallback and capped.any():
        _, src, dst = pairs[int(np.argmax(capped))]
        raise InfeasibleHop(f"Link {src}->{dst} cannot meet the lowest MCS level under P_max")
    return index, p_required, p_tx, capped


def resolve_links(
    ctx: RoutingContext, routes: Sequence[Route]
) -> dict[int, tuple[LinkState, ...]]:
    """Resolve every hop of `routes` as one frame's set of simultaneous transmitters."""
    pairs = [(r.ms, s, d) for r in routes for s, d in r.pairs()]
    out: dict[int, list[LinkState]] = {}
    for (ms, _, _), state in zip(pairs, resolve_pairs(ctx, pairs)):
        out.setdefault(ms, []).append(state)
    return {ms: tuple(states) for ms, states in out.items()}


def isolated_link(ctx: RoutingContext, src: int, dst: int) -> LinkState:
    """One link priced as the only transmission of the frame."""
    return resolve_pairs(ctx, [(src, src, dst)])[0]


def resolve_pairs(
    ctx: RoutingContext, pairs: Sequence[tuple[int, int, int]]
) -> list[LinkState]:
    """Resolve (owner, src, dst) transmissions together; output follows input order."""
    topology = ctx.topology
    radio = ctx.radio
    if not pairs:
        return []

    src = np.array([p[1] for p in pairs])
    dst = np.array([p[2] for p in pairs])
    bandwidth = np.array([topology.link(s, d).bandwidth_hz for _, s, d in pairs])
    noise = bandwidth * ctx.cfg.channel.noise_density_mw_per_hz
    path_loss = radio.path_loss_linear[src, dst]
    gain_product = radio.gain[src] * radio.gain[dst]
    p_max = radio.tx_power_max[src]

    _, _, p_tx_first, _ = _price(ctx, noise, path_loss, gain_product, p_max, pairs)

    interference = np.zeros(len(pairs))
    if ctx.cfg.interference_enabled and len(pairs) > 1:
        sent = np.bincount(src, weights=p_tx_first, minlength=len(topology.stations))
        interference = interference_mw(sent[:, None] * transmitter_reach(radio, src, dst))

    index, p_required, p_tx, capped = _price(
        ctx, noise + interference, path_loss, gain_product, p_max, pairs
    )

    levels = ctx.cfg.mcs.levels
    return [
        LinkState(
            src=s,
            dst=d,
            hop_class=hop_class(topology, s, d),
            bandwidth_hz=float(bandwidth[t]),
            level=levels[int(index[t])],
            p_required_mw=float(p_required[t]),
            p_tx_mw=float(p_tx[t]),
            gain_tx_linear=float(radio.gain[s]),
            gain_rx_linear=float(radio.gain[d]),
            path_loss_linear=float(path_loss[t]),
            interference_mw=float(interference[t]),
            capped=bool(capped[t]),
        )
        for t, (_, s, d) in enumerate(pairs)
    ]
