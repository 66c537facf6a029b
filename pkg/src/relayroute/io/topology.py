"""YAML replay files for topologies.

Shape:
- `max_hops` and `deployment_radius_m` scalars
- `stations`: list of mappings with keys id, kind, x, y, antenna_height,
  antenna_gain_db, tx_power_max_mw (kind is a StationKind name)
- `links`: list of `[src, dst, distance_m, bandwidth_hz]`

The unreachable set is not stored; it is recomputed on load.
"""

from __future__ import annotations

from dataclasses import replace

import yaml

from relayroute.model.topology import find_unreachable
from relayroute.state import Link, Station, StationKind, Topology

_STATION_KEYS = ("id", "kind", "x", "y", "antenna_height", "antenna_gain_db", "tx_power_max_mw")


def topology_to_dict(t: Topology) -> dict:
    return {
        "max_hops": t.max_hops,
        "deployment_radius_m": t.deployment_radius_m,
        "stations": [
            {
                "id": s.id,
                "kind": s.kind.name,
                "x": s.x,
                "y": s.y,
                "antenna_height": s.antenna_height,
                "antenna_gain_db": s.antenna_gain_db,
                "tx_power_max_mw": s.tx_power_max_mw,
            }
            for s in t.stations
        ],
        "links": [[l.src, l.dst, l.distance_m, l.bandwidth_hz] for l in t.links],
    }


def topology_from_dict(data: dict) -> Topology:
    if not isinstance(data, dict):
        raise ValueError("Topology file must be a mapping.")
    for key in ("max_hops", "deployment_radius_m", "stations", "links"):
        if key not in data:
            raise ValueError(f"Topology file is missing the key '{key}'.")

    stations: list[Station] = []
    for idx, item in enumerate(data["stations"]):
        if not isinstance(item, dict) or any(k not in item for k in _STATION_KEYS):
            raise ValueError(
                f"stations[{idx}] must be a mapping with keys {', '.join(_STATION_KEYS)}."
            )
        try:
            kind = StationKind[str(item["kind"])]
        except KeyError:
            known = ", ".join(k.name for k in StationKind)
            raise ValueError(
                f"stations[{idx}].kind '{item['kind']}' is unknown. Known: {known}"
            ) from None
        stations.append(
            Station(
                id=int(item["id"]),
                kind=kind,
                x=float(item["x"]),
                y=float(item["y"]),
                antenna_height=float(item["antenna_height"]),
                antenna_gain_db=float(item["antenna_gain_db"]),
                tx_power_max_mw=float(item["tx_power_max_mw"]),
            )
        )

    links: list[Link] = []
    for idx, item in enumerate(data["links"]):
        if not isinstance(item, list) or len(item) != 4:
            raise ValueError(f"links[{idx}] must be [src, dst, distance_m, bandwidth_hz].")
        src, dst, distance, bandwidth = item
        links.append(Link(int(src), int(dst), float(distance), float(bandwidth)))

    topology = Topology(
        stations=tuple(stations),
        links=tuple(links),
        max_hops=int(data["max_hops"]),
        deployment_radius_m=float(data["deployment_radius_m"]),
    )
    return replace(topology, unreachable=find_unreachable(topology, topology.max_hops))


def dump_topology(t: Topology, path: str) -> None:
    with open(path, "w", encoding="utf-8") as stream:
        yaml.safe_dump(topology_to_dict(t), stream, sort_keys=False, default_flow_style=None)


def load_topology(path: str) -> Topology:
    with open(path, "r", encoding="utf-8") as stream:
        return topology_from_dict(yaml.safe_load(stream))
