from __future__ import annotations

from dataclasses import dataclass
from typing import ClassVar, Iterable, Iterator

from relayroute.state import Route, StationKind, Topology


@dataclass(frozen=True, slots=True)
class RouteViolation:
    rule_id: str
    message: str
    position: int | None = None

    def __str__(self) -> str:
        where = f" at hop position {self.position}" if self.position is not None else ""
        return f"{self.rule_id}: {self.message}{where}"


@dataclass(frozen=True, slots=True)
class RouteRule:
    """Base class for all route rules.

    Subclasses override `check(topology, route, max_hops)` and yield one
    `RouteViolation` per breach. Rules never raise on a bad route; violations
    are data.

    Design notes
    ------------
    - `ID` (class var): stable identifier used in violation records and lookups.
      **Required** for every rule class.
    - Rules run in registry order; a rule may assume nothing about the others
      (e.g. the link rule must cope with unknown station ids).
    """

    ID: ClassVar[str]

    def check(
        self, topology: Topology, route: Route, max_hops: int
    ) -> Iterator[RouteViolation]:
        raise NotImplementedError

    @property
    def rule_id(self) -> str:
        rid = getattr(self.__class__, "ID", None)
        if not isinstance(rid, str) or not rid:
            raise ValueError(
                f"Rule class {self.__class__.__name__} must define a non-empty ID"
            )
        return rid

    def violation(self, message: str, position: int | None = None) -> RouteViolation:
        return RouteViolation(self.rule_id, message, position)


def _kind(topology: Topology, sid: int) -> StationKind | None:
    return topology.kind_of(sid) if topology.has_station(sid) else None


# ---------- Shape ----------


class KnownStations(RouteRule):
    ID = "known_stations"

    def check(self, topology, route, max_hops):
        for pos, sid in enumerate(route.hops):
            if not topology.has_station(sid):
                yield self.violation(f"station {sid} is not in the topology", pos)


class MinimumLength(RouteRule):
    ID = "minimum_length"

    def check(self, topology, route, max_hops):
        if len(route.hops) < 2:
            yield self.violation("a route needs at least an MS and the BS")


class StartsAtMobileStation(RouteRule):
    ID = "starts_at_mobile_station"

    def check(self, topology, route, max_hops):
        if route.hops and _kind(topology, route.hops[0]) is not StationKind.MS:
            yield self.violation("first station is not a mobile station", 0)


class EndsAtBaseStation(RouteRule):
    ID = "ends_at_base_station"

    def check(self, topology, route, max_hops):
        if route.hops and _kind(topology, route.hops[-1]) is not StationKind.BS:
            yield self.violation(
                "last station is not the base station", len(route.hops) - 1
            )


class IntermediatesAreRelays(RouteRule):
    ID = "intermediates_are_relays"

    def check(self, topology, route, max_hops):
        for pos in range(1, len(route.hops) - 1):
            kind = _kind(topology, route.hops[pos])
            if kind is not None and not kind.is_relay:
                yield self.violation(
                    f"intermediate station {route.hops[pos]} is not a relay", pos
                )


class NoRepeatedStation(RouteRule):
    ID = "no_repeated_station"

    def check(self, topology, route, max_hops):
        seen: set[int] = set()
        for pos, sid in enumerate(route.hops):
            if sid in seen:
                yield self.violation(f"station {sid} appears twice", pos)
            seen.add(sid)


# ---------- Links and hop bounds ----------


class LinksExist(RouteRule):
    ID = "links_exist"

    def check(self, topology, route, max_hops):
        for pos, (src, dst) in enumerate(route.pairs()):
            if (src, dst) not in topology.link_index:
                yield self.violation(f"no link {src}->{dst}", pos)


class HopBound(RouteRule):
    ID = "hop_bound"

    def check(self, topology, route, max_hops):
        if route.hop_count > max_hops:
            yield self.violation(f"{route.hop_count} hops exceed the bound of {max_hops}")


class TransparentRelayTwoHopOnly(RouteRule):
    """A transparent relay may only be the single intermediate of a 2-hop route."""

    ID = "transparent_relay_two_hop_only"

    def check(self, topology, route, max_hops):
        for pos in range(1, len(route.hops) - 1):
            if _kind(topology, route.hops[pos]) is StationKind.TRANSPARENT_RS:
                if route.hop_count != 2:
                    yield self.violation(
                        f"transparent relay {route.hops[pos]} inside a "
                        f"{route.hop_count}-hop chain",
                        pos,
                    )


# ---------- Auto registry & helpers ----------


def _all_rule_classes() -> list[type[RouteRule]]:
    # Definition order, so violation lists are stable.
    out: list[type[RouteRule]] = []
    q = list(RouteRule.__subclasses__())
    while q:
        cls = q.pop(0)
        if cls not in out:
            out.append(cls)
            q.extend(cls.__subclasses__())
    return out


RULES_BY_ID: dict[str, type[RouteRule]] = {cls.ID: cls for cls in _all_rule_classes()}


def get_rule_class(rule_id: str) -> type[RouteRule]:
    try:
        return RULES_BY_ID[rule_id]
    except KeyError as e:
        known = ", ".join(sorted(RULES_BY_ID))
        raise KeyError(f"Unknown rule id '{rule_id}'. Known: {known}") from e


def default_rules() -> list[RouteRule]:
    return [cls() for cls in RULES_BY_ID.values()]


def apply_rules(
    topology: Topology,
    route: Route,
    max_hops: int,
    rules: Iterable[RouteRule] | None = None,
) -> list[RouteViolation]:
    """Run every rule against `route` and collect the violations."""
    violations: list[RouteViolation] = []
    for rule in rules if rules is not None else default_rules():
        violations.extend(rule.check(topology, route, max_hops))
    return violations
