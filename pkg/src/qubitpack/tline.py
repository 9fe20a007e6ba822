"""Transmission-line models: CPW impedance, ABCD cascades, TSV transitions and
quarter-wave resonators with localized loss.

Quarter-wave resonators are shorted at x = 0 and open at x = length, so the
current anti-node sits at the short and the voltage anti-node at the open end.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence, Union

import numpy as np

from .constants import c
from .network import FrequencyResponse, convert_network

NEPER_PER_DB = math.log(10) / 20
REFLECTION_FLOOR_DB = -200.0


def _agm(a: float, b: float, tol: float = 1e-15) -> float:
    while abs(a - b) > tol * a:
        a, b = 0.5 * (a + b), math.sqrt(a * b)
    return 0.5 * (a + b)


def ellipk_agm(k: float) -> float:
    """Complete elliptic integral of the first kind K(k), modulus k (not parameter m = k^2)."""
    if not 0 <= k < 1:
        raise ValueError("modulus must be in [0, 1)")
    return math.pi / (2 * _agm(1.0, math.sqrt(1 - k * k)))


@dataclass(frozen=True)
class CpwGeometry:
    width: float  # centre conductor, m
    gap: float  # m
    eps_r: float = 11.45

    def __post_init__(self):
        if not (self.width > 0 and self.gap > 0):
            raise ValueError("CPW width and gap must be positive")
        if not self.eps_r >= 1:
            raise ValueError("eps_r must be >= 1")


def cpw_parameters(g: CpwGeometry) -> tuple[float, float]:
    """(Z0 in Ohm, effective permittivity) of a zero-thickness CPW on a thick substrate."""
    k = g.width / (g.width + 2 * g.gap)
    kp = math.sqrt(1 - k * k)
    eps_eff = (g.eps_r + 1) / 2
    z0 = 30 * math.pi / math.sqrt(eps_eff) * ellipk_agm(kp) / ellipk_agm(k)
    return z0, eps_eff


# Network elements. Impedances/admittances may be constants or callables of frequency (Hz).
Immittance = Union[complex, float, Callable[[np.ndarray], np.ndarray]]


@dataclass(frozen=True)
class Line:
    z0: float
    eps_eff: float
    length: float
    loss_db_per_m: float = 0.0

    def __post_init__(self):
        if not self.z0 > 0 or self.length < 0 or self.eps_eff < 1:
            raise ValueError("line needs z0 > 0, length >= 0, eps_eff >= 1")

    def abcd(self, freqs):
        beta = 2 * np.pi * freqs * math.sqrt(self.eps_eff) / c
        gl = (self.loss_db_per_m * NEPER_PER_DB + 1j * beta) * self.length
        ch, sh = np.cosh(gl), np.sinh(gl)
        return _stack(ch, self.z0 * sh, sh / self.z0, ch)


@dataclass(frozen=True)
class Series:
    impedance: Immittance

    def abcd(self, freqs):
        z = _evaluate(self.impedance, freqs)
        one = np.ones_like(z)
        return _stack(one, z, 0 * z, one)


@dataclass(frozen=True)
class Shunt:
    admittance: Immittance

    def abcd(self, freqs):
        y = _evaluate(self.admittance, freqs)
        one = np.ones_like(y)
        return _stack(one, 0 * y, y, one)


NetworkElement = Union[Line, Series, Shunt]


def series_inductor(L: float) -> Series:
    return Series(lambda f: 2j * np.pi * f * L)


def series_resistor(R: float) -> Series:
    return Series(complex(R))


def shunt_capacitor(C: float) -> Shunt:
    return Shunt(lambda f: 2j * np.pi * f * C)


def shunt_conductance(G: float) -> Shunt:
    return Shunt(complex(G))


def _evaluate(x, freqs):
    v = x(freqs) if callable(x) else x
    return np.broadcast_to(np.asarray(v, dtype=complex), freqs.shape).copy()


def _stack(a, b, cc, d):
    out = np.empty(a.shape + (2, 2), dtype=complex)
    out[..., 0, 0], out[..., 0, 1], out[..., 1, 0], out[..., 1, 1] = a, b, cc, d
    return out


def cascade_abcd(elements: Sequence[NetworkElement], freqs) -> np.ndarray:
    freqs = np.asarray(freqs, dtype=float)
    if not elements:
        raise ValueError("cascade needs at least one element")
    total = elements[0].abcd(freqs)
    for el in elements[1:]:
        total = total @ el.abcd(freqs)
    return total


def cascade(elements: Sequence[NetworkElement], freqs, z_ref: float = 50.0) -> FrequencyResponse:
    """S-parameters of the elements connected in order, port 1 at the first element."""
    freqs = np.atleast_1d(np.asarray(freqs, dtype=float))
    abcd = FrequencyResponse(freqs, cascade_abcd(elements, freqs), "ABCD", z_ref)
    return convert_network(abcd, "S")


def tsv_transition(series_L: float, shunt_C: float) -> list[NetworkElement]:
    """Symmetric L/2 - C - L/2 discontinuity model of a through-substrate via transition."""
    if series_L < 0 or shunt_C < 0:
        raise ValueError("series_L and shunt_C must be non-negative")
    return [series_inductor(series_L / 2), shunt_capacitor(shunt_C), series_inductor(series_L / 2)]


def tsv_transition_reflection(series_L: float, shunt_C: float, z_ref: float, freqs) -> np.ndarray:
    """|S11| in dB at each frequency, clipped below at -200 dB. Worst case is ``.max()``."""
    s = cascade(tsv_transition(series_L, shunt_C), freqs, z_ref)
    mag = np.abs(s.entry(0, 0))
    with np.errstate(divide="ignore"):
        db = 20 * np.log10(mag)
    return np.maximum(db, REFLECTION_FLOOR_DB)


def max_series_inductance(reflection_db: float, f: float, z_ref: float = 50.0) -> float:
    """Largest series inductance keeping |S11| at or below ``reflection_db`` at ``f``.

    Inverts |S11| = wL / sqrt(4 z^2 + (wL)^2).
    """
    g = 10 ** (reflection_db / 20)
    return 2 * z_ref * g / math.sqrt(1 - g * g) / (2 * math.pi * f)


# Resonator loss elements; ``position`` is measured from the shorted end in metres.
@dataclass(frozen=True)
class SeriesResistance:
    resistance: float
    position: float


@dataclass(frozen=True)
class ShuntConductance:
    conductance: float
    position: float


@dataclass(frozen=True)
class DielectricLoss:
    participation: float
    tan_delta: float
    position: float = 0.0


LossElement = Union[SeriesResistance, ShuntConductance, DielectricLoss]


@dataclass(frozen=True)
class ResonatorSpec:
    z0: float
    eps_eff: float
    length: float
    losses: tuple[LossElement, ...] = ()

    def __post_init__(self):
        if not (self.z0 > 0 and self.length > 0 and self.eps_eff >= 1):
            raise ValueError("resonator needs z0 > 0, length > 0, eps_eff >= 1")
        object.__setattr__(self, "losses", tuple(self.losses))
        for el in self.losses:
            if not 0 <= el.position <= self.length:
                raise ValueError(f"loss element position {el.position} outside [0, {self.length}]")

    @property
    def inductance_per_length(self) -> float:
        return self.z0 * math.sqrt(self.eps_eff) / c

    @property
    def capacitance_per_length(self) -> float:
        return math.sqrt(self.eps_eff) / (self.z0 * c)


def quarter_wave_frequency(spec: ResonatorSpec) -> float:
    return c / (4 * spec.length * math.sqrt(spec.eps_eff))


def q_contribution(spec: ResonatorSpec, element: LossElement) -> float:
    """Quality factor set by one loss element, from the unperturbed standing wave.

    Valid in the weak-loss limit; results below ~100 are outside that regime.
    """
    ell = spec.length
    w0 = 2 * math.pi * quarter_wave_frequency(spec)
    if isinstance(element, DielectricLoss):
        loss = element.participation * element.tan_delta
        return math.inf if loss == 0 else 1 / loss
    phase = math.pi * element.position / (2 * ell)
    if isinstance(element, SeriesResistance):
        weight = 0.0 if element.position == ell else math.cos(phase) ** 2
        if weight == 0 or element.resistance == 0:
            return math.inf
        return w0 * spec.inductance_per_length * ell / (2 * element.resistance * weight)
    if isinstance(element, ShuntConductance):
        weight = 0.0 if element.position == 0 else math.sin(phase) ** 2
        if weight == 0 or element.conductance == 0:
            return math.inf
        return w0 * spec.capacitance_per_length * ell / (2 * element.conductance * weight)
    raise TypeError(f"unknown loss element {element!r}")


def composite_q(contributions: Sequence[float]) -> float:
    """1/Q = sum 1/Q_i; infinite entries are lossless."""
    inv = 0.0
    for q in contributions:
        if not q > 0:
            raise ValueError("quality factors must be positive")
        if math.isfinite(q):
            inv += 1 / q
    return math.inf if inv == 0 else 1 / inv


def resonator_q(spec: ResonatorSpec, background_q: float = math.inf) -> float:
    """Composite Q of every loss element on ``spec`` plus an optional distributed background Q."""
    return composite_q([background_q] + [q_contribution(spec, el) for el in spec.losses])


def bound_component_loss(measured_q: float, baseline_q: float) -> float:
    """Smallest component Q consistent with ``measured_q`` given the resonator's ``baseline_q``.

    Returns ``inf`` when the measurement shows no loss beyond the baseline.
    """
    if not (measured_q > 0 and baseline_q > 0):
        raise ValueError("quality factors must be positive")
    if measured_q >= baseline_q:
        return math.inf
    return measured_q * baseline_q / (baseline_q - measured_q)
