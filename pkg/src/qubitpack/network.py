"""Multi-port network data on a frequency grid and conversions between S, Y, Z and ABCD.

Sign convention is e^{+jwt}: an ideal capacitor has admittance +jwC.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

REPRESENTATIONS = ("S", "Y", "Z", "ABCD")

# Matrices whose condition number exceeds this are treated as singular.
_SINGULAR_COND = 1e13


class NetworkError(ValueError):
    """Invalid network data or an undefined conversion."""


def _frozen(a: np.ndarray) -> np.ndarray:
    a = np.array(a, copy=True)
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class FrequencyResponse:
    """Tabulated network parameters.

    ``data`` has shape ``(n_freqs, port_count, port_count)``; one-dimensional input
    is accepted for one-port data and reshaped.
    """

    freqs: np.ndarray
    data: np.ndarray
    representation: str = "S"
    z_ref: float = 50.0

    def __post_init__(self):
        freqs = np.asarray(self.freqs, dtype=float)
        data = np.asarray(self.data, dtype=complex)
        if freqs.ndim != 1 or freqs.size == 0:
            raise NetworkError("freqs must be a non-empty 1-D array")
        if data.ndim == 1:
            data = data.reshape(-1, 1, 1)
        if data.ndim != 3 or data.shape[0] != freqs.size or data.shape[1] != data.shape[2]:
            raise NetworkError(
                f"data shape {data.shape} does not match {freqs.size} frequencies of square matrices"
            )
        if self.representation not in REPRESENTATIONS:
            raise NetworkError(f"unknown representation {self.representation!r}")
        if self.representation == "ABCD" and data.shape[1] != 2:
            raise NetworkError("ABCD representation requires exactly 2 ports")
        if not np.all(freqs > 0):
            raise NetworkError("frequencies must be positive")
        if np.any(np.diff(freqs) <= 0):
            raise NetworkError("frequencies must be strictly increasing")
        if not np.all(np.isfinite(data)):
            raise NetworkError("network data contains non-finite entries")
        if not (np.isfinite(self.z_ref) and self.z_ref > 0):
            raise NetworkError("z_ref must be positive")
        object.__setattr__(self, "freqs", _frozen(freqs))
        object.__setattr__(self, "data", _frozen(data))
        object.__setattr__(self, "z_ref", float(self.z_ref))

    @property
    def port_count(self) -> int:
        return self.data.shape[1]

    @property
    def omega(self) -> np.ndarray:
        return 2 * np.pi * self.freqs

    def entry(self, i: int, j: int) -> np.ndarray:
        """Parameter (i, j) across frequency, zero-based indices."""
        return self.data[:, i, j]

    def __len__(self):
        return self.freqs.size

    def __eq__(self, other):
        if not isinstance(other, FrequencyResponse):
            return NotImplemented
        return (
            self.representation == other.representation
            and self.z_ref == other.z_ref
            and np.array_equal(self.freqs, other.freqs)
            and np.array_equal(self.data, other.data)
        )


def _check_invertible(m: np.ndarray, freqs: np.ndarray, what: str):
    cond = np.linalg.cond(m)
    bad = ~np.isfinite(cond) | (cond > _SINGULAR_COND)
    if np.any(bad):
        f = freqs[np.argmax(bad)]
        raise NetworkError(f"singular matrix in {what} at frequency {f:.9g} Hz")


def _s_to_abcd(s, z0, freqs):
    s11, s12, s21, s22 = s[:, 0, 0], s[:, 0, 1], s[:, 1, 0], s[:, 1, 1]
    bad = np.abs(s21) < 1e-15
    if np.any(bad):
        raise NetworkError(f"S21 = 0 makes ABCD undefined at frequency {freqs[np.argmax(bad)]:.9g} Hz")
    out = np.empty_like(s)
    den = 2 * s21
    out[:, 0, 0] = ((1 + s11) * (1 - s22) + s12 * s21) / den
    out[:, 0, 1] = z0 * ((1 + s11) * (1 + s22) - s12 * s21) / den
    out[:, 1, 0] = ((1 - s11) * (1 - s22) - s12 * s21) / (z0 * den)
    out[:, 1, 1] = ((1 - s11) * (1 + s22) + s12 * s21) / den
    return out


def _abcd_to_s(t, z0, freqs):
    a, b, c, d = t[:, 0, 0], t[:, 0, 1], t[:, 1, 0], t[:, 1, 1]
    den = a + b / z0 + c * z0 + d
    bad = np.abs(den) < 1e-300
    if np.any(bad):
        raise NetworkError(f"ABCD to S undefined at frequency {freqs[np.argmax(bad)]:.9g} Hz")
    out = np.empty_like(t)
    out[:, 0, 0] = (a + b / z0 - c * z0 - d) / den
    out[:, 0, 1] = 2 * (a * d - b * c) / den
    out[:, 1, 0] = 2 / den
    out[:, 1, 1] = (-a + b / z0 - c * z0 + d) / den
    return out


def _to_s(resp: FrequencyResponse) -> np.ndarray:
    x, z0, n, freqs = resp.data, resp.z_ref, resp.port_count, resp.freqs
    eye = np.eye(n)
    if resp.representation == "S":
        return np.array(x)
    if resp.representation == "ABCD":
        return _abcd_to_s(x, z0, freqs)
    if resp.representation == "Z":
        # S = (Z - z0 I)(Z + z0 I)^-1
        rhs = x + z0 * eye
        _check_invertible(rhs, freqs, "Z to S")
        return np.linalg.solve(rhs.transpose(0, 2, 1), (x - z0 * eye).transpose(0, 2, 1)).transpose(0, 2, 1)
    # Y: S = (I - z0 Y)(I + z0 Y)^-1
    rhs = eye + z0 * x
    _check_invertible(rhs, freqs, "Y to S")
    return np.linalg.solve(rhs.transpose(0, 2, 1), (eye - z0 * x).transpose(0, 2, 1)).transpose(0, 2, 1)


def _from_s(s: np.ndarray, target: str, z0: float, freqs: np.ndarray) -> np.ndarray:
    n = s.shape[1]
    eye = np.eye(n)
    if target == "S":
        return s
    if target == "ABCD":
        return _s_to_abcd(s, z0, freqs)
    if target == "Z":
        # Z = z0 (I + S)(I - S)^-1
        rhs = eye - s
        _check_invertible(rhs, freqs, "S to Z")
        return z0 * np.linalg.solve(rhs.transpose(0, 2, 1), (eye + s).transpose(0, 2, 1)).transpose(0, 2, 1)
    # Y = (1/z0) (I - S)(I + S)^-1
    rhs = eye + s
    _check_invertible(rhs, freqs, "S to Y")
    return np.linalg.solve(rhs.transpose(0, 2, 1), (eye - s).transpose(0, 2, 1)).transpose(0, 2, 1) / z0


def convert_network(resp: FrequencyResponse, target: str) -> FrequencyResponse:
    """Return ``resp`` re-expressed as ``target`` (one of S, Y, Z, ABCD).

    The reference impedance is carried over unchanged. Raises :class:`NetworkError`
    naming the offending frequency when a required matrix inverse does not exist.
    """
    if target not in REPRESENTATIONS:
        raise NetworkError(f"unknown representation {target!r}")
    if target == "ABCD" and resp.port_count != 2:
        raise NetworkError(f"ABCD conversion requires 2 ports, got {resp.port_count}")
    if target == resp.representation:
        return resp
    s = _to_s(resp)
    out = _from_s(s, target, resp.z_ref, resp.freqs)
    return FrequencyResponse(resp.freqs, out, target, resp.z_ref)
