"""dB <-> linear conversions for floats and numpy arrays."""

from __future__ import annotations

import math

import numpy as np


def db_to_linear(value_db):
    return 10.0 ** (value_db / 10.0)


def linear_to_db(value):
    if isinstance(value, np.ndarray):
        return 10.0 * np.log10(value)
    if value <= 0:
        raise ValueError(f"{value} has no dB value")
    return 10.0 * math.log10(value)


def dbm_to_mw(value_dbm):
    return db_to_linear(value_dbm)


def mw_to_dbm(value_mw):
    return linear_to_db(value_mw)
