"""Physical-layer math: SUI path loss, received power, interference, required
transmit power and MCS selection.

dB/dBm appear only at the boundaries; everything here returns linear mW,
ratios or hertz unless the name says `_db`.
"""

from __future__ import annotations

import math
from typing import Iterable

import numpy as np

from relayroute.params import ChannelConfig, Terrain
from relayroute.state import LinkBudget, McsLevel, McsTable
from relayroute.units import db_to_linear

SPEED_OF_LIGHT_M_S = 299_792_458.0

# (a, b, c) of the path-loss exponent gamma = a - b*h_b + c/h_b
SUI_TERRAIN: dict[Terrain, tuple[float, float, float]] = {
    Terrain.A: (4.6, 0.0075, 12.6),
    Terrain.B: (4.0, 0.0065, 17.1),
    Terrain.C: (3.6, 0.005, 20.0),
}


class BelowReferenceDistance(ValueError):
    pass


def sui_gamma(terrain: Terrain, base_height_m: float) -> float:
    a, b, c = SUI_TERRAIN[terrain]
    return a - b * base_height_m + c / base_height_m


def sui_path_loss_db(
    cc: ChannelConfig,
    distance_m: float,
    base_height_m: float,
    remote_height_m: float,
    shadowing_db: float = 0.0,
) -> float:
    """SUI path loss in dB.

    PL = A + 10*gamma*log10(d/d0) + X_f + X_h (+ s), with
    A = 20*log10(4*pi*d0/lambda), X_f = 6.0*log10(f/2000) and
    X_h = -10.8*log10(h_r/2) for terrain A/B, -20*log10(h_r/2) for terrain C.
    `shadowing_db` is added only when shadowing is enabled in `cc`.
    """
    d0 = cc.reference_dist_m
    if distance_m < d0:
        raise BelowReferenceDistance(
            f"Distance {distance_m} m is below the reference distance {d0} m"
        )
    if base_height_m <= 0 or remote_height_m <= 0:
        raise ValueError("Antenna heights must be positive")

    wavelength = SPEED_OF_LIGHT_M_S / (cc.carrier_freq_mhz * 1e6)
    intercept = 20.0 * math.log10(4.0 * math.pi * d0 / wavelength)
    gamma = sui_gamma(cc.terrain, base_height_m)
    x_f = 6.0 * math.log10(cc.carrier_freq_mhz / 2000.0)
    if cc.terrain is Terrain.C:
        x_h = -20.0 * math.log10(remote_height_m / 2.0)
    else:
        x_h = -10.8 * math.log10(remote_height_m / 2.0)

    loss = intercept + 10.0 * gamma * math.log10(distance_m / d0) + x_f + x_h
    if cc.shadowing_enabled:
        loss += shadowing_db
    return loss


def pair_path_loss_db(
    cc: ChannelConfig,
    distance_m: float,
    height_a_m: float,
    height_b_m: float,
    shadowing_db: float = 0.0,
) -> float:
    """Path loss between two stations in either role.

    The taller antenna plays the base, the shorter the remote terminal.
    Distances below d0 are clamped to d0 so co-located interferers stay defined.
    """
    return sui_path_loss_db(
        cc,
        max(distance_m, cc.reference_dist_m),
        max(height_a_m, height_b_m),
        min(height_a_m, height_b_m),
        shadowing_db,
    )


def received_power_mw(
    tx_power_mw: float,
    gain_tx_linear: float,
    gain_rx_linear: float,
    path_loss_linear: float,
) -> float:
    """P(i,j) = G_i * G_j * P_i / L(i,j)."""
    if min(tx_power_mw, gain_tx_linear, gain_rx_linear, path_loss_linear) <= 0:
        raise ValueError("Received power inputs must be positive")
    return gain_tx_linear * gain_rx_linear * tx_power_mw / path_loss_linear


def interference_mw(other_received_powers_mw: Iterable[float] | np.ndarray) -> float | np.ndarray:
    """I(i,j): plain sum of the co-frame received powers from the other transmitters.

    A 2-D array holds one column per receiver (rows are transmitters) and
    gives one I per receiver.
    """
    if isinstance(other_received_powers_mw, np.ndarray) and other_received_powers_mw.ndim == 2:
        powers = other_received_powers_mw
        if (powers < 0).any():
            raise ValueError("Received powers must be non-negative")
        return powers.sum(axis=0)
    values = list(other_received_powers_mw)
    if any(p < 0 for p in values):
        raise ValueError("Received powers must be non-negative")
    return math.fsum(values)


def required_tx_power_mw(
    level: McsLevel,
    bandwidth_hz: float,
    noise_density_mw_per_hz: float,
    interference: float,
    path_loss_linear: float,
    gain_product_linear: float,
) -> float:
    """10^(delta(k)/10) * (B*N0 + I) * L / (G_i*G_j).

    The power that, fed to `received_power_mw`, lands exactly on the SNR
    threshold of `level` at the receiver.
    """
    if min(bandwidth_hz, noise_density_mw_per_hz, path_loss_linear, gain_product_linear) <= 0:
        raise ValueError("Bandwidth, noise density, path loss and gains must be positive")
    if interference < 0:
        raise ValueError("Interference must be non-negative")
    noise_plus_interference = bandwidth_hz * noise_density_mw_per_hz + interference
    return _required_from_budget(
        level, noise_plus_interference, path_loss_linear, gain_product_linear
    )


def _required_from_budget(
    level: McsLevel,
    noise_plus_interference_mw: float,
    path_loss_linear: float,
    gain_product_linear: float,
) -> float:
    return (
        db_to_linear(level.snr_threshold_db)
        * noise_plus_interference_mw
        * path_loss_linear
        / gain_product_linear
    )


def link_budget(
    path_loss_db: float,
    gain_product_linear: float,
    bandwidth_hz: float,
    noise_density_mw_per_hz: float,
    interference: float = 0.0,
) -> LinkBudget:
    return LinkBudget(
        path_loss_db=path_loss_db,
        path_loss_linear=db_to_linear(path_loss_db),
        gain_product_linear=gain_product_linear,
        noise_plus_interference_mw=bandwidth_hz * noise_density_mw_per_hz + interference,
    )


def required_power_for(level: McsLevel, budget: LinkBudget) -> float:
    return _required_from_budget(
        level,
        budget.noise_plus_interference_mw,
        budget.path_loss_linear,
        budget.gain_product_linear,
    )


def thresholds_linear(table: McsTable) -> np.ndarray:
    return np.array([db_to_linear(lv.snr_threshold_db) for lv in table.levels])


def required_powers_mw(
    thresholds: np.ndarray,
    noise_plus_interference_mw: np.ndarray,
    path_loss_linear: np.ndarray,
    gain_product_linear: np.ndarray,
) -> np.ndarray:
    """Required power of every level (last axis) for every transmission (leading axes)."""
    return (
        thresholds
        * np.asarray(noise_plus_interference_mw)[..., None]
        * np.asarray(path_loss_linear)[..., None]
        / np.asarray(gain_product_linear)[..., None]
    )


def level_indices(required_mw: np.ndarray, tx_power_max_mw: np.ndarray) -> np.ndarray:
    """Index of the highest level whose required power is within the cap, -1 if none.

    Required power grows with the level, so the feasible levels are a prefix.
    """
    return np.count_nonzero(required_mw <= np.asarray(tx_power_max_mw)[..., None], axis=-1) - 1


def price_transmissions(
    thresholds: np.ndarray,
    noise_plus_interference_mw: np.ndarray,
    path_loss_linear: np.ndarray,
    gain_product_linear: np.ndarray,
    tx_power_max_mw: np.ndarray,
) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    """(level index, required power, transmitted power, capped) per transmission.

    A capped transmission falls back to the lowest level at full power.
    """
    required = required_powers_mw(
        thresholds, noise_plus_interference_mw, path_loss_linear, gain_product_linear
    )
    index = level_indices(required, tx_power_max_mw)
    capped = index < 0
    index = np.maximum(index, 0)
    p_required = np.take_along_axis(required, index[..., None], axis=-1)[..., 0]
    p_tx = np.where(capped, tx_power_max_mw, p_required)
    return index, p_required, p_tx, capped


def select_mcs(
    table: McsTable, budget: LinkBudget, tx_power_max_mw: float
) -> McsLevel | None:
    """Highest level whose required power fits under the cap; None if none does."""
    required = required_powers_mw(
        thresholds_linear(table),
        budget.noise_plus_interference_mw,
        budget.path_loss_linear,
        budget.gain_product_linear,
    )
    index = int(level_indices(required, tx_power_max_mw))
    return table.levels[index] if index >= 0 else None
