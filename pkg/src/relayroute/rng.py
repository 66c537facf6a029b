"""Seeded random streams for reproducible runs.

A single run seed is split into independent named sub-streams with
`numpy.random.SeedSequence`, so topology, demand, bee colony and shadowing
draws can be varied independently:

    stream(seed, "topology")          -> topology placement and sampling
    stream(seed, "demands")           -> per-frame demand draws
    stream(seed, "bco", reroute_idx)  -> one stream per routing decision
    stream(seed, "shadowing")         -> per-pair shadowing draws

The split is `SeedSequence(entropy=seed, spawn_key=(STREAMS[name], *extra))`.
PCG64 output is identical on every platform for a given seed sequence.
"""

from __future__ import annotations

import numpy as np

STREAMS: dict[str, int] = {
    "topology": 0,
    "demands": 1,
    "bco": 2,
    "shadowing": 3,
}


def seed_sequence(seed: int, name: str, *extra: int) -> np.random.SeedSequence:
    try:
        stream_id = STREAMS[name]
    except KeyError as e:
        known = ", ".join(sorted(STREAMS))
        raise KeyError(f"Unknown random stream '{name}'. Known: {known}") from e
    if seed < 0:
        raise ValueError("Seeds must be non-negative integers")
    return np.random.SeedSequence(entropy=seed, spawn_key=(stream_id, *extra))


def stream(seed: int, name: str, *extra: int) -> np.random.Generator:
    return np.random.default_rng(seed_sequence(seed, name, *extra))


def derived_seed(seed: int, name: str, *extra: int) -> int:
    """Integer seed for components that take a plain seed (e.g. BcoParams.seed)."""
    return int(seed_sequence(seed, name, *extra).generate_state(1, dtype=np.uint32)[0])
