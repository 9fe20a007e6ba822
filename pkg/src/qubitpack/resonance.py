"""Notch-type resonator traces: synthesis, circle fitting, photon-number calibration
and the two-level-system loss model.

The notch model is

    S21(f) = 1 - (Ql/Qc) e^{j phi} / (1 + 2j Ql (f - f0)/f0),  1/Ql = 1/Qi + 1/Qc,

with traces assumed already corrected for cable delay and background.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import least_squares

from .constants import hbar, k_B


class NoResonanceError(ValueError):
    """Trace shows no resonance above its noise floor."""


@dataclass(frozen=True)
class NotchFitResult:
    f0: float
    Qi: float
    Qc: float
    Ql: float
    phi: float
    residual: float
    delay_flag: bool = False


def loaded_q(Qi: float, Qc: float) -> float:
    inv = (0.0 if math.isinf(Qi) else 1 / Qi) + (0.0 if math.isinf(Qc) else 1 / Qc)
    return math.inf if inv == 0 else 1 / inv


def simulate_notch(f0: float, Qi: float, Qc: float, phi: float, freqs) -> np.ndarray:
    if not (Qi > 0 and Qc > 0):
        raise ValueError("Qi and Qc must be positive")
    freqs = np.asarray(freqs, dtype=float)
    if math.isinf(Qc):
        return np.ones(freqs.shape, dtype=complex)
    Ql = loaded_q(Qi, Qc)
    return 1 - (Ql / Qc) * np.exp(1j * phi) / (1 + 2j * Ql * (freqs - f0) / f0)


def fit_circle(z) -> tuple[complex, float]:
    """Algebraic least-squares circle through complex points; returns (centre, radius)."""
    z = np.asarray(z, dtype=complex)
    x, y = z.real, z.imag
    # x^2 + y^2 + D x + E y + F = 0
    a = np.column_stack([x, y, np.ones_like(x)])
    b = -(x * x + y * y)
    (d, e, f), *_ = np.linalg.lstsq(a, b, rcond=None)
    centre = complex(-d / 2, -e / 2)
    r2 = abs(centre) ** 2 - f
    return centre, math.sqrt(max(r2, 0.0))


def _noise_rms(z):
    if z.size < 4:
        return 0.0
    d2 = np.diff(z, 2)
    return float(np.sqrt(np.mean(np.abs(d2) ** 2) / 6))


def _phase_fit(freqs, theta, f0, Ql):
    def resid(p):
        th0, lq, df = p
        q = Ql * math.exp(lq)
        fr = f0 * (1 + df / Ql)
        return theta - (th0 - 2 * np.arctan(2 * q * (freqs / fr - 1)))

    th0 = float(np.median(theta + 2 * np.arctan(2 * Ql * (freqs / f0 - 1))))
    sol = least_squares(resid, [th0, 0.0, 0.0], method="lm")
    th0, lq, df = sol.x
    return th0, f0 * (1 + df / Ql), Ql * math.exp(lq)


def fit_notch(freqs, s21, phase_flag_rad: float = 0.05) -> NotchFitResult:
    """Fit the notch model to a delay-corrected S21 trace.

    Circle fit gives the diameter Ql/Qc and the rotation phi, a phase-versus-frequency
    fit about the circle centre gives f0 and Ql, and one nonlinear least-squares pass
    on the complex trace refines all four parameters.
    """
    freqs = np.asarray(freqs, dtype=float)
    z = np.asarray(s21, dtype=complex)
    if freqs.size < 20 or freqs.size != z.size:
        raise ValueError("need at least 20 matching frequency/S21 points")

    noise = _noise_rms(z)
    spread = float(np.max(np.abs(z - np.mean(z))))
    if spread <= max(5 * noise, 1e-9):
        raise NoResonanceError("no resonance: trace is flat to within its noise floor")
    centre, radius = fit_circle(z)
    if 2 * radius <= max(5 * noise, 1e-9):
        raise NoResonanceError(f"no resonance: circle radius {radius:.3g} below noise floor {noise:.3g}")

    # Initial guesses from circle geometry.
    depth = np.abs(z - 1)
    k0 = int(np.argmax(depth))
    f0 = freqs[k0]
    above = freqs[depth**2 >= depth[k0] ** 2 / 2]
    fwhm = max(above[-1] - above[0], freqs[1] - freqs[0]) if above.size else (freqs[-1] - freqs[0]) / 10
    Ql = f0 / fwhm
    theta = np.unwrap(np.angle(z - centre))
    _, f0, Ql = _phase_fit(freqs, theta, f0, Ql)
    if freqs[-1] - freqs[0] < 3 * f0 / Ql:
        raise ValueError("trace spans fewer than 3 linewidths")
    diameter = 2 * radius
    Qc = Ql / diameter
    phi = float(np.angle(1 - centre))

    def model(p):
        df, lq, lc, ph = p
        q = Ql * math.exp(lq)
        qc = Qc * math.exp(lc)
        fr = f0 * (1 + df / Ql)
        return 1 - (q / qc) * np.exp(1j * ph) / (1 + 2j * q * (freqs - fr) / fr)

    def resid(p):
        r = model(p) - z
        return np.concatenate([r.real, r.imag])

    sol = least_squares(resid, [0.0, 0.0, 0.0, phi], method="lm", xtol=1e-14, ftol=1e-14)
    df, lq, lc, phi = sol.x
    f0 = f0 * (1 + df / Ql)
    Ql, Qc = Ql * math.exp(lq), Qc * math.exp(lc)
    inv_qi = 1 / Ql - 1 / Qc
    Qi = math.inf if inv_qi <= 0 else 1 / inv_qi
    Ql = loaded_q(Qi, Qc)

    fitted = simulate_notch(f0, Qi, Qc, phi, freqs) if math.isfinite(Qi) else model(sol.x)
    residual = float(np.sqrt(np.mean(np.abs(fitted - z) ** 2)))
    # Leftover linear phase suggests an uncorrected cable delay.
    slope = np.polyfit(freqs - freqs.mean(), np.unwrap(np.angle(z / fitted)), 1)[0]
    delay_flag = bool(abs(slope) * (freqs[-1] - freqs[0]) > phase_flag_rad)
    phi = math.remainder(phi, 2 * math.pi)
    return NotchFitResult(float(f0), float(Qi), float(Qc), float(Ql), float(phi), residual, delay_flag)


def photon_number(power_in: float, f0: float, Ql: float, Qc: float) -> float:
    """Mean intra-resonator photon number for a notch resonator driven with ``power_in`` watts."""
    w0 = 2 * math.pi * f0
    return 2 * power_in * Ql**2 / (hbar * w0**2 * Qc)


def power_for_photons(n: float, f0: float, Ql: float, Qc: float) -> float:
    w0 = 2 * math.pi * f0
    return n * hbar * w0**2 * Qc / (2 * Ql**2)


@dataclass(frozen=True)
class TlsModelParams:
    delta0: float
    n_c: float = 1.0
    beta: float = 0.5
    delta_other: float = 0.0

    def __post_init__(self):
        if min(self.delta0, self.n_c, self.delta_other) < 0:
            raise ValueError("TLS parameters must be non-negative")
        if not 0 < self.beta <= 1:
            raise ValueError("beta must be in (0, 1]")


def tls_loss_tangent(params: TlsModelParams, n_photons, T, f):
    if np.any(np.asarray(T) <= 0):
        raise ValueError("temperature must be positive")
    x = hbar * 2 * np.pi * np.asarray(f, dtype=float) / (2 * k_B * np.asarray(T, dtype=float))
    sat = (1 + np.asarray(n_photons, dtype=float) / params.n_c) ** params.beta
    return params.delta0 * np.tanh(x) / sat + params.delta_other


def tls_quality_factor(params: TlsModelParams, n_photons, T, f):
    """Internal Q from the TLS loss tangent at photon number ``n_photons`` and temperature ``T``."""
    delta = tls_loss_tangent(params, n_photons, T, f)
    with np.errstate(divide="ignore"):
        q = 1 / np.asarray(delta, dtype=float)
    return float(q) if np.ndim(q) == 0 else q
