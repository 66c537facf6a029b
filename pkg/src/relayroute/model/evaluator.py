"""Array pricing of whole solutions and of one-MS moves.

A CostModel holds per-link tables of one routing context: bandwidth, noise,
path loss, gain product, power cap, the pass-1 (interference-free) transmit
power and the coupling of every station into the link's receiver. Pass-1
powers depend on the link alone, so a frame's interference is
I = S @ reach[:, links] with S[u] the pass-1 power station u sends.

`move_costs` prices every candidate of one MS against the rest of a
solution in one batch: the rest contributes a fixed S, each candidate adds
its own hops, and only the hops of the frame are priced again.
"""

from __future__ import annotations

import math
from typing import Sequence

import numpy as np

from relayroute.model.build import RoutingContext, transmitter_reach
from relayroute.model.channel import interference_mw, price_transmissions, thresholds_linear
from relayroute.model.energy import (
    DegenerateDist,
    FitnessBounds,
    InfeasibleHop,
    combine_fitness,
    normalized_f,
)
from relayroute.state import FitnessComponents, Route, Solution


class CostModel:
    def __init__(self, ctx: RoutingContext):
        cfg = ctx.cfg
        topology = ctx.topology
        radio = ctx.radio
        links = topology.links

        self._ctx = ctx
        self._n = len(topology.stations)
        self._index = {(link.src, link.dst): i for i, link in enumerate(links)}
        self.src = np.array([link.src for link in links], dtype=int)
        self.dst = np.array([link.dst for link in links], dtype=int)
        self.bandwidth = np.array([link.bandwidth_hz for link in links], dtype=float)
        self.noise = self.bandwidth * cfg.channel.noise_density_mw_per_hz
        self.path_loss = radio.path_loss_linear[self.src, self.dst]
        self.gain_product = radio.gain[self.src] * radio.gain[self.dst]
        self.p_max = radio.tx_power_max[self.src]

        self.thresholds = thresholds_linear(cfg.mcs)
        self.bits = np.array([lv.bits_per_slot for lv in cfg.mcs.levels], dtype=np.int64)
        self.tau = cfg.frame.slot_duration_s
        self.strict = not cfg.power_cap_fallback
        self.first_hop = cfg.dist_rule == "first_hop"
        self.normalize = cfg.normalize_fitness

        _, _, self.p_first, _ = price_transmissions(
            self.thresholds, self.noise, self.path_loss, self.gain_product, self.p_max
        )
        if cfg.interference_enabled and len(links):
            self.reach = transmitter_reach(radio, self.src, self.dst)
        else:
            self.reach = np.zeros((self._n, len(links)))

        self._routes: dict[tuple[int, ...], np.ndarray] = {}
        self._batches: dict[int, tuple[np.ndarray, np.ndarray]] = {}
        self._bounds: dict[int, FitnessBounds] = {}

    def route_links(self, route: Route) -> np.ndarray:
        ids = self._routes.get(route.hops)
        if ids is None:
            ids = np.array([self._index[pair] for pair in route.pairs()], dtype=int)
            self._routes[route.hops] = ids
        return ids

    def _batch(self, ms: int) -> tuple[np.ndarray, np.ndarray]:
        """Candidate link ids of `ms` padded to a (C, H) block, and the block's mask."""
        batch = self._batches.get(ms)
        if batch is None:
            rows = [self.route_links(r) for r in self._ctx.candidates.routes[ms]]
            width = max(len(r) for r in rows)
            hops = np.zeros((len(rows), width), dtype=int)
            mask = np.zeros((len(rows), width), dtype=bool)
            for c, row in enumerate(rows):
                hops[c, : len(row)] = row
                mask[c, : len(row)] = True
            batch = (hops, mask)
            self._batches[ms] = batch
        return batch

    def _sent(self, link_ids: np.ndarray) -> np.ndarray:
        return np.bincount(self.src[link_ids], weights=self.p_first[link_ids], minlength=self._n)

    def _price(self, link_ids: np.ndarray, interference: np.ndarray):
        index, p_required, p_tx, capped = price_transmissions(
            self.thresholds,
            self.noise[link_ids] + interference,
            self.path_loss[link_ids],
            self.gain_product[link_ids],
            self.p_max[link_ids],
        )
        received = self.gain_product[link_ids] * p_required / self.path_loss[link_ids]
        return index, p_tx, received, capped

    def _raise_capped(self, link_ids: np.ndarray, capped: np.ndarray) -> None:
        if self.strict and capped.any():
            link = int(link_ids[np.argmax(capped)])
            raise InfeasibleHop(
                f"Link {self.src[link]}->{self.dst[link]} cannot meet the lowest MCS "
                "level under P_max"
            )

    # ---------- Whole solutions ----------

    def terms(self, routes: Sequence[Route]) -> list[FitnessComponents]:
        """Fitness components of `routes` transmitting in the same frame."""
        if not routes:
            return []
        per_route = [self.route_links(r) for r in routes]
        link_ids = np.concatenate(per_route)
        starts = np.cumsum([0] + [len(r) for r in per_route[:-1]])
        demand = np.array([self._ctx.demand_of(r.ms) for r in routes], dtype=np.int64)
        hop_demand = np.repeat(demand, [len(r) for r in per_route])

        sent = self._sent(link_ids)
        interference = interference_mw(sent[:, None] * self.reach[:, link_ids])
        index, p_tx, received, capped = self._price(link_ids, interference)
        self._raise_capped(link_ids, capped)

        energy = np.add.reduceat(-(-hop_demand // self.bits[index]) * self.tau * p_tx, starts)
        traffic = demand / np.minimum.reduceat(self.bandwidth[link_ids], starts)
        dist = received[starts] if self.first_hop else np.minimum.reduceat(received, starts)
        return [
            combine_fitness(float(e), float(t), float(d))
            for e, t, d in zip(energy, traffic, dist)
        ]

    def cost(self, s: Solution) -> float:
        routes = sorted(s.routes, key=lambda r: r.ms)
        comps = self.terms(routes)
        if self.normalize:
            return math.fsum(normalized_f(c, self.bounds(r.ms)) for r, c in zip(routes, comps))
        return math.fsum(c.f_value for c in comps)

    # ---------- One-MS moves ----------

    def _candidate_terms(self, ms: int, sent_rest: np.ndarray, rest_ids: np.ndarray):
        """(energy, traffic, dist) per candidate of `ms`, plus the rest's hop prices per candidate."""
        hops, mask = self._batch(ms)
        n_cand = hops.shape[0]
        weight = np.where(mask, self.p_first[hops], 0.0)
        sent = np.repeat(sent_rest[None, :], n_cand, axis=0)
        np.add.at(sent, (np.arange(n_cand)[:, None], self.src[hops]), weight)

        interference = np.einsum("cn,nch->ch", sent, self.reach[:, hops])
        index, p_tx, received, capped = self._price(hops, interference)
        self._raise_capped(hops[mask], capped[mask])

        demand = self._ctx.demand_of(ms)
        energy = np.where(mask, -(-demand // self.bits[index]) * self.tau * p_tx, 0.0).sum(axis=1)
        traffic = demand / np.where(mask, self.bandwidth[hops], np.inf).min(axis=1)
        if self.first_hop:
            dist = received[:, 0]
        else:
            dist = np.where(mask, received, np.inf).min(axis=1)
        if (dist <= 0).any():
            raise DegenerateDist(f"MS {ms}: a candidate has no positive received power")

        rest = None
        if len(rest_ids):
            rest = self._price(rest_ids, sent @ self.reach[:, rest_ids])
        return energy, traffic, dist, rest

    def bounds(self, ms: int) -> FitnessBounds:
        """Term bounds over the candidates of `ms`, each alone in the frame."""
        bounds = self._bounds.get(ms)
        if bounds is None:
            energy, traffic, dist, _ = self._candidate_terms(
                ms, np.zeros(self._n), np.zeros(0, dtype=int)
            )
            inv_dist = 1.0 / dist
            bounds = FitnessBounds(
                (float(energy.min()), float(energy.max())),
                (float(traffic.min()), float(traffic.max())),
                (float(inv_dist.min()), float(inv_dist.max())),
            )
            self._bounds[ms] = bounds
        return bounds

    def _objective(self, ms_ids: Sequence[int], energy, traffic, dist) -> np.ndarray:
        """Per-route objective; arrays carry routes on the last axis."""
        if not self.normalize:
            return energy + traffic + 1.0 / dist
        out = np.ones_like(energy)
        for term, value in (
            ("energy", energy),
            ("traffic", traffic),
            ("inv_dist", 1.0 / dist),
        ):
            lo = np.array([getattr(self.bounds(ms), term)[0] for ms in ms_ids])
            hi = np.array([getattr(self.bounds(ms), term)[1] for ms in ms_ids])
            span = np.where(hi > lo, hi - lo, 1.0)
            out = out + np.where(hi > lo, np.clip((value - lo) / span, 0.0, 1.0), 0.0)
        return out

    def move_costs(self, s: Solution, ms: int) -> np.ndarray:
        """Cost of `s` with `ms` moved to each of its candidates, in candidate order.

        Summation order differs from `cost`, so values agree with it to
        rounding only.
        """
        rest = [r for r in s.routes if r.ms != ms]
        per_route = [self.route_links(r) for r in rest]
        rest_ids = np.concatenate(per_route) if rest else np.zeros(0, dtype=int)

        energy, traffic, dist, priced = self._candidate_terms(ms, self._sent(rest_ids), rest_ids)
        total = self._objective([ms], energy[:, None], traffic[:, None], dist[:, None])[:, 0]
        if priced is None:
            return total

        index, p_tx, received, capped = priced
        self._raise_capped(np.broadcast_to(rest_ids, capped.shape).ravel(), capped.ravel())
        starts = np.cumsum([0] + [len(r) for r in per_route[:-1]])
        demand = np.array([self._ctx.demand_of(r.ms) for r in rest], dtype=np.int64)
        hop_demand = np.repeat(demand, [len(r) for r in per_route])
        rest_energy = np.add.reduceat(
            -(-hop_demand // self.bits[index]) * self.tau * p_tx, starts, axis=1
        )
        rest_traffic = demand / np.minimum.reduceat(self.bandwidth[rest_ids], starts)
        if self.first_hop:
            rest_dist = received[:, starts]
        else:
            rest_dist = np.minimum.reduceat(received, starts, axis=1)
        if (rest_dist <= 0).any():
            raise DegenerateDist("A co-assigned route has no positive received power")
        rest_total = self._objective(
            [r.ms for r in rest], rest_energy, rest_traffic[None, :], rest_dist
        )
        return total + rest_total.sum(axis=1)
