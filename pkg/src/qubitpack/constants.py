"""Physical constants (CODATA, via scipy) and a few power/ratio conversions.

All quantities inside the package are SI: Hz, K, W, F, H, Ohm, S, m, s.
"""
from dataclasses import dataclass

import numpy as np
from scipy import constants as _sc

h = _sc.h
hbar = _sc.hbar
k_B = _sc.k
c = _sc.c
epsilon_0 = _sc.epsilon_0


@dataclass(frozen=True)
class Constants:
    h: float = h
    kB: float = k_B
    c: float = c
    eps0: float = epsilon_0
    hbar: float = hbar


CONSTANTS = Constants()


def dbm_to_watt(p_dbm):
    return 1e-3 * 10.0 ** (np.asarray(p_dbm, dtype=float) / 10.0)


def watt_to_dbm(p_w):
    return 10.0 * np.log10(np.asarray(p_w, dtype=float) / 1e-3)


def db_to_power_ratio(db):
    return 10.0 ** (np.asarray(db, dtype=float) / 10.0)


def power_ratio_to_db(ratio):
    return 10.0 * np.log10(np.asarray(ratio, dtype=float))
