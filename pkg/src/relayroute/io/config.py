"""YAML configuration loader and writer.

Shape:
- One mapping with the sections `topology`, `channel`, `mcs`, `frame`,
  `bco` and `sim`, each a mapping of keys to scalars. A top-level dotted key
  (`frame.slots_per_frame: 48`) is the same as the nested form.
- `mcs.levels` is a list of `[k, bits_per_slot, snr_threshold_db]` triples.
- Missing keys keep their defaults; an empty document is the default config.
- Unknown sections or keys are rejected, never ignored.

Every error names `section.key` and the 1-based line of the offending node
(`line` is None for command-line overrides).
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Any, Callable, Mapping, Sequence

import yaml

from relayroute.params import (
    BcoParams,
    ChannelConfig,
    FrameConfig,
    InvalidField,
    Scenario,
    SimConfig,
    Terrain,
    TopologyConfig,
)
from relayroute.state import McsTable


class ConfigError(ValueError):
    def __init__(self, message: str, key: str | None = None, line: int | None = None):
        self.key = key
        self.line = line
        where = key or "config"
        if line is not None:
            where = f"{where} (line {line})"
        super().__init__(f"{where}: {message}")


class ConfigSyntaxError(ConfigError):
    pass


class UnknownKey(ConfigError):
    pass


class OutOfRange(ConfigError):
    pass


# ---------- Declarative key table ----------


@dataclass(frozen=True, slots=True)
class Key:
    kind: type
    check: Callable[[Any], bool] | None = None
    requirement: str = ""
    choices: tuple[Any, ...] = ()


def _positive() -> Key:
    return Key(float, lambda v: v > 0, "must be > 0")


def _count(minimum: int) -> Key:
    return Key(int, lambda v: v >= minimum, f"must be an integer >= {minimum}")


KEYS: dict[str, dict[str, Key]] = {
    "topology": {
        "n_rs": _count(0),
        "n_ms": _count(0),
        "deployment_radius_m": _positive(),
        "d_min_m": _positive(),
        "d_max_m": _positive(),
        "bandwidth_min_hz": _positive(),
        "bandwidth_max_hz": _positive(),
        "bs_rs_gain_min_db": Key(float),
        "bs_rs_gain_max_db": Key(float),
        "ms_gain_min_db": Key(float),
        "ms_gain_max_db": Key(float),
        "bs_height_m": _positive(),
        "rs_height_m": _positive(),
        "ms_height_m": _positive(),
        "tx_power_max_mw": _positive(),
        "transparent_fraction": Key(float, lambda v: 0.0 <= v <= 1.0, "must be within [0, 1]"),
        "max_routes_per_ms": _count(1),
    },
    "channel": {
        "carrier_freq_mhz": _positive(),
        "reference_dist_m": _positive(),
        "terrain": Key(str, choices=tuple(t.value for t in Terrain)),
        "noise_density_dbm_per_hz": Key(float),
        "shadowing_enabled": Key(bool),
        "shadowing_sigma_db": Key(float, lambda v: v >= 0, "must be >= 0"),
    },
    "mcs": {
        "levels": Key(list),
    },
    "frame": {
        "frame_duration_s": _positive(),
        "slots_per_frame": _count(1),
    },
    "bco": {
        "n_bees": _count(1),
        "max_inner_steps": _count(0),
        "max_iterations": _count(1),
        "stagnation_limit": _count(1),
        "elite_count": _count(1),
        "seed": _count(0),
    },
    "sim": {
        "scenario": Key(str, choices=tuple(s.label for s in Scenario)),
        "n_frames": _count(1),
        "seed": _count(0),
        "re_route_interval": _count(0),
        "demand_min_bits": _count(0),
        "demand_max_bits": _count(0),
        "expected_demand_bits": _count(0),
        "dist_rule": Key(str, choices=("bottleneck", "first_hop")),
        "normalize_fitness": Key(bool),
        "baseline_weight": Key(str, choices=("distance", "energy")),
        "power_cap_fallback": Key(bool),
        "interference_enabled": Key(bool),
    },
}

KNOWN_KEYS: tuple[str, ...] = tuple(
    f"{section}.{key}" for section, keys in KEYS.items() for key in keys
)


def _coerce(value: Any, spec: Key, key: str, line: int | None) -> Any:
    if spec.kind is bool:
        if not isinstance(value, bool):
            raise OutOfRange("must be true or false", key, line)
        return value
    if spec.kind is int:
        if isinstance(value, bool) or not isinstance(value, int):
            if isinstance(value, float) and value.is_integer():
                value = int(value)
            else:
                raise OutOfRange("must be an integer", key, line)
    elif spec.kind is float:
        if isinstance(value, str):
            # YAML 1.1 reads 1e6 (no dot) as a string
            try:
                value = float(value)
            except ValueError:
                raise OutOfRange("must be a number", key, line) from None
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            raise OutOfRange("must be a number", key, line)
        value = float(value)
    elif spec.kind is str:
        if key == "sim.scenario" and isinstance(value, int) and not isinstance(value, bool):
            value = f"{value}hop"
        if not isinstance(value, str):
            raise OutOfRange("must be a string", key, line)
        value = value.strip()
        if key == "channel.terrain":
            value = value.upper()
        elif key == "sim.scenario":
            value = value.lower()
        if spec.choices and value not in spec.choices:
            raise OutOfRange(f"must be one of {', '.join(spec.choices)}", key, line)
    elif spec.kind is list and not isinstance(value, list):
        raise OutOfRange("must be a list", key, line)

    if spec.check is not None and not spec.check(value):
        raise OutOfRange(f"{spec.requirement}, got {value!r}", key, line)
    return value


def _mcs_table(value: list, key: str, line: int | None) -> McsTable:
    triples = []
    for i, item in enumerate(value):
        if not isinstance(item, (list, tuple)) or len(item) != 3:
            raise OutOfRange(f"entry {i} must be [k, bits_per_slot, snr_threshold_db]", key, line)
        k, bits, snr = item
        if any(isinstance(x, bool) or not isinstance(x, (int, float)) for x in item):
            raise OutOfRange(f"entry {i} must hold numbers", key, line)
        if float(k) != int(k) or float(bits) != int(bits):
            raise OutOfRange(f"entry {i}: k and bits_per_slot must be integers", key, line)
        triples.append((int(k), int(bits), float(snr)))
    try:
        return McsTable.from_triples(triples)
    except ValueError as e:
        raise OutOfRange(str(e), key, line) from e


# ---------- Raw document handling ----------


def _key_lines(node: yaml.Node | None) -> dict[str, int]:
    """1-based line of every section and `section.key` node."""
    lines: dict[str, int] = {}
    if not isinstance(node, yaml.MappingNode):
        return lines
    for key_node, value_node in node.value:
        name = str(key_node.value)
        lines[name] = key_node.start_mark.line + 1
        if isinstance(value_node, yaml.MappingNode):
            for sub_key, _ in value_node.value:
                lines[f"{name}.{sub_key.value}"] = sub_key.start_mark.line + 1
    return lines


def _read_document(text: str) -> tuple[dict[str, dict[str, Any]], dict[str, int]]:
    try:
        node = yaml.compose(text, Loader=yaml.SafeLoader)
        data = yaml.safe_load(text)
    except yaml.MarkedYAMLError as e:
        mark = e.problem_mark or e.context_mark
        raise ConfigSyntaxError(
            str(e.problem or e), line=mark.line + 1 if mark is not None else None
        ) from e
    except yaml.YAMLError as e:
        raise ConfigSyntaxError(str(e)) from e

    lines = _key_lines(node)
    if data is None:
        return {}, lines
    if not isinstance(data, dict):
        raise ConfigSyntaxError("top level must be a mapping of sections", line=1)

    raw: dict[str, dict[str, Any]] = {}
    for name, value in data.items():
        name = str(name)
        if "." in name:
            section, key = name.split(".", 1)
            _put(raw, section, key, value, lines.get(name))
            continue
        if name not in KEYS:
            raise UnknownKey(
                f"unknown section; known: {', '.join(KEYS)}", name, lines.get(name)
            )
        if value is None:
            continue
        if not isinstance(value, dict):
            raise ConfigSyntaxError("a section must be a mapping", name, lines.get(name))
        for key, item in value.items():
            _put(raw, name, str(key), item, lines.get(f"{name}.{key}"))
    return raw, lines


def _put(
    raw: dict[str, dict[str, Any]], section: str, key: str, value: Any, line: int | None
) -> None:
    if section not in KEYS or key not in KEYS[section]:
        raise UnknownKey("unknown key", f"{section}.{key}", line)
    raw.setdefault(section, {})[key] = value


def apply_overrides(
    raw: dict[str, dict[str, Any]],
    overrides: Sequence[str],
    lines: dict[str, int] | None = None,
) -> dict[str, dict[str, Any]]:
    """Apply `section.key=value` strings; values are read as YAML scalars or lists."""
    for item in overrides:
        name, sep, text = item.partition("=")
        name = name.strip()
        if not sep or "." not in name:
            raise ConfigSyntaxError(f"override '{item}' must look like section.key=value")
        try:
            value = yaml.safe_load(text) if text.strip() else None
        except yaml.YAMLError as e:
            raise ConfigSyntaxError(f"unreadable value '{text}'", name) from e
        section, key = name.split(".", 1)
        _put(raw, section, key, value, None)
        if lines is not None:
            lines.pop(name, None)
    return raw


def _build(raw: Mapping[str, Mapping[str, Any]], lines: Mapping[str, int]) -> SimConfig:
    values: dict[str, dict[str, Any]] = {section: {} for section in KEYS}
    for section, items in raw.items():
        for key, value in items.items():
            name = f"{section}.{key}"
            values[section][key] = _coerce(value, KEYS[section][key], name, lines.get(name))

    def blame(section: str, fields: Sequence[str]) -> str:
        # the first involved key the document actually sets, else the first one
        names = [f if "." in f else f"{section}.{f}" for f in fields]
        for name in names:
            head, key = name.split(".", 1)
            if key in raw.get(head, {}):
                return name
        return names[0]

    def make(section: str, factory: Callable[..., Any], **extra: Any) -> Any:
        try:
            return factory(**values[section], **extra)
        except InvalidField as e:
            name = blame(section, e.fields)
            raise OutOfRange(str(e), name, lines.get(name)) from e
        except ValueError as e:
            raise OutOfRange(str(e), section, lines.get(section)) from e

    channel_values = values["channel"]
    terrain = Terrain(channel_values.pop("terrain", Terrain.B.value))
    mcs = McsTable.default()
    if "levels" in values["mcs"]:
        mcs = _mcs_table(values["mcs"]["levels"], "mcs.levels", lines.get("mcs.levels"))

    sim_values = values.pop("sim")
    scenario = Scenario.from_label(sim_values.pop("scenario", Scenario.THREE_HOP.label))
    values["sim"] = sim_values

    return make(
        "sim",
        SimConfig,
        scenario=scenario,
        topology=make("topology", TopologyConfig),
        channel=make("channel", ChannelConfig, terrain=terrain),
        frame=make("frame", FrameConfig),
        mcs=mcs,
        bco=make("bco", BcoParams),
    )


def parse_config(text: str, overrides: Sequence[str] = ()) -> SimConfig:
    raw, lines = _read_document(text)
    apply_overrides(raw, overrides, lines)
    return _build(raw, lines)


def load_config(path: str | None, overrides: Sequence[str] = ()) -> SimConfig:
    """Config from a YAML file (defaults when `path` is None) plus overrides."""
    if path is None:
        return parse_config("", overrides)
    with open(path, "r", encoding="utf-8") as stream:
        return parse_config(stream.read(), overrides)


# ---------- Writing ----------


def _plain(value: Any) -> Any:
    if isinstance(value, Scenario):
        return value.label
    if isinstance(value, Enum):
        return value.value
    return value


def config_to_dict(cfg: SimConfig) -> dict[str, dict[str, Any]]:
    sections = {
        "topology": cfg.topology,
        "channel": cfg.channel,
        "frame": cfg.frame,
        "bco": cfg.bco,
        "sim": cfg,
    }
    out: dict[str, dict[str, Any]] = {}
    for section in KEYS:
        if section == "mcs":
            out["mcs"] = {"levels": cfg.mcs.as_triples()}
            continue
        source = sections[section]
        out[section] = {key: _plain(getattr(source, key)) for key in KEYS[section]}
    return out


def serialize_config(cfg: SimConfig) -> str:
    """The full config in the loader's format; parse_config(serialize_config(c)) == c."""
    return yaml.safe_dump(
        config_to_dict(cfg), sort_keys=False, default_flow_style=None
    )
