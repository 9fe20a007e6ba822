"""Dilution-refrigerator wiring budgets: thermal photons, conductive heat loads,
attenuator-chain noise and receiver noise temperature.

Noise propagation is done in photon-number units so that it stays exact when
hf is comparable to or larger than kT at the cold stages.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Sequence

import numpy as np

from .constants import h, k_B


def thermal_quantum(f):
    """Temperature hf/kB equivalent to one photon at frequency ``f``."""
    f = np.asarray(f, dtype=float)
    if np.any(f <= 0):
        raise ValueError("frequency must be positive")
    t = h * f / k_B
    return float(t) if t.ndim == 0 else t


def occupancy(f, T):
    """Bose-Einstein mean photon number 1/(exp(hf/kT) - 1)."""
    f = np.asarray(f, dtype=float)
    T = np.asarray(T, dtype=float)
    if np.any(f <= 0) or np.any(T < 0):
        raise ValueError("frequency must be positive and temperature non-negative")
    with np.errstate(divide="ignore", over="ignore"):
        x = h * f / (k_B * T)
        n = 1.0 / np.expm1(x)
    n = np.where(T == 0, 0.0, n)
    return float(n) if n.ndim == 0 else n


@dataclass(frozen=True)
class Material:
    """Thermal conductivity k(T) = a T^b (W/m/K), valid on [t_min, t_max]."""

    name: str
    a: float
    b: float
    t_min: float
    t_max: float
    source: str = ""

    def __post_init__(self):
        if not self.a > 0:
            raise ValueError(f"{self.name}: a must be positive")
        if not 0 < self.t_min < self.t_max:
            raise ValueError(f"{self.name}: need 0 < t_min < t_max")

    def conductivity(self, T):
        return self.a * np.asarray(T, dtype=float) ** self.b

    def conductivity_integral(self, t_cold: float, t_hot: float) -> float:
        """Integral of k(T) dT from ``t_cold`` to ``t_hot`` (W/m)."""
        for t in (t_cold, t_hot):
            if not self.t_min <= t <= self.t_max:
                raise ValueError(
                    f"{self.name}: temperature {t} K outside validity range [{self.t_min}, {self.t_max}] K"
                )
        if self.b == -1:
            return self.a * math.log(t_hot / t_cold)
        e = self.b + 1
        return self.a * (t_hot**e - t_cold**e) / e


def load_materials(path=None) -> dict[str, Material]:
    """Material table from a JSON document ``{"materials": [{name, a, b, t_min, t_max}, ...]}``.

    Without ``path`` the table shipped with the package is used.
    """
    if path is None:
        text = resources.files("qubitpack").joinpath("data/materials.json").read_text(encoding="utf-8")
    else:
        text = Path(path).read_text(encoding="utf-8")
    doc = json.loads(text)
    out = {}
    for entry in doc["materials"]:
        m = Material(
            entry["name"], float(entry["a"]), float(entry["b"]), float(entry["t_min"]), float(entry["t_max"]),
            entry.get("source", ""),
        )
        out[m.name] = m
    return out


def cable_heat_load(material: Material, area: float, length: float, t_hot: float, t_cold: float) -> float:
    """Conducted heat (W) through a conductor of cross-section ``area`` and ``length``."""
    if t_hot < t_cold:
        raise ValueError("t_hot must be >= t_cold")
    if not (area > 0 and length > 0):
        raise ValueError("area and length must be positive")
    return area / length * material.conductivity_integral(t_cold, t_hot)


@dataclass(frozen=True)
class Stage:
    name: str
    temperature: float
    cooling_power: float | None = None  # None: unlimited (e.g. room temperature)


@dataclass(frozen=True)
class FridgeSpec:
    stages: tuple[Stage, ...]

    def __post_init__(self):
        stages = tuple(self.stages)
        object.__setattr__(self, "stages", stages)
        if not stages:
            raise ValueError("fridge needs at least one stage")
        temps = [s.temperature for s in stages]
        if any(t2 >= t1 for t1, t2 in zip(temps, temps[1:])):
            raise ValueError("stage temperatures must strictly decrease from first to last")
        if any(s.cooling_power is not None and s.cooling_power < 0 for s in stages):
            raise ValueError("cooling powers must be non-negative")
        names = [s.name for s in stages]
        if len(set(names)) != len(names):
            raise ValueError("stage names must be unique")

    def index(self, name: str) -> int:
        for i, s in enumerate(self.stages):
            if s.name == name:
                return i
        raise KeyError(f"unknown stage {name!r}")


@dataclass(frozen=True)
class CableSegment:
    """``count`` identical conductors running from ``from_stage`` to the next colder stage."""

    material: Material
    area: float
    length: float
    from_stage: str
    count: int = 1

    def __post_init__(self):
        if not (self.area > 0 and self.length > 0) or self.count < 0:
            raise ValueError("cable needs positive area and length and count >= 0")


@dataclass(frozen=True)
class Attenuator:
    attenuation_db: float
    stage: str

    def __post_init__(self):
        if self.attenuation_db < 0:
            raise ValueError("attenuation must be >= 0 dB")

    @property
    def ratio(self) -> float:
        return 10 ** (self.attenuation_db / 10)


@dataclass(frozen=True)
class Amplifier:
    gain_db: float
    noise_temperature: float
    name: str = ""


@dataclass(frozen=True)
class WiringChain:
    cables: tuple[CableSegment, ...] = ()
    attenuators: tuple[Attenuator, ...] = ()
    amplifiers: tuple[Amplifier, ...] = ()
    input_power: float | None = None  # W applied at the top of the attenuated line

    def __post_init__(self):
        for name in ("cables", "attenuators", "amplifiers"):
            object.__setattr__(self, name, tuple(getattr(self, name)))


def _ordered_attenuators(chain: WiringChain, fridge: FridgeSpec):
    indexed = []
    for k, att in enumerate(chain.attenuators):
        try:
            indexed.append((fridge.index(att.stage), k, att))
        except KeyError:
            raise ValueError(f"attenuator anchored to unknown stage {att.stage!r}") from None
    indexed.sort(key=lambda t: (t[0], t[1]))
    return [(i, att) for i, _, att in indexed]


def attenuate_photons(n_in: float, ratio: float, n_bath: float) -> float:
    """Beam-splitter model of a matched attenuator thermalized to a bath of ``n_bath`` photons."""
    return n_in / ratio + (1 - 1 / ratio) * n_bath


def attenuation_chain_noise(chain: WiringChain, fridge: FridgeSpec, f: float, input_T: float) -> float:
    """Thermal photon number reaching the chip after every attenuator, warmest first."""
    n = occupancy(f, input_T)
    for i, att in _ordered_attenuators(chain, fridge):
        n = attenuate_photons(n, att.ratio, occupancy(f, fridge.stages[i].temperature))
    return float(n)


def receiver_noise(amplifiers: Sequence[Amplifier]) -> float:
    """Friis cascade T1 + T2/G1 + T3/(G1 G2) + ... in kelvin."""
    if not amplifiers:
        raise ValueError("need at least one amplifier")
    total, gain = 0.0, 1.0
    for amp in amplifiers:
        total += amp.noise_temperature / gain
        gain *= 10 ** (amp.gain_db / 10)
    return total


@dataclass(frozen=True)
class StageBudget:
    name: str
    temperature: float
    conductive_load: float
    dissipated_power: float
    cooling_power: float | None
    passed: bool = field(default=True)

    @property
    def load(self) -> float:
        return self.conductive_load + self.dissipated_power


def stage_budget(chain: WiringChain, fridge: FridgeSpec) -> list[StageBudget]:
    """Heat arriving at each stage against its cooling power.

    Conductive load on a stage comes from cables starting at the warmer neighbour.
    Attenuator dissipation is included when ``chain.input_power`` is set.
    """
    n = len(fridge.stages)
    conductive = [0.0] * n
    dissipated = [0.0] * n
    for cable in chain.cables:
        i = fridge.index(cable.from_stage)
        if i + 1 >= n:
            raise ValueError(f"cable from {cable.from_stage!r} has no colder stage to land on")
        hot, cold = fridge.stages[i], fridge.stages[i + 1]
        q = cable_heat_load(cable.material, cable.area, cable.length, hot.temperature, cold.temperature)
        conductive[i + 1] += cable.count * q
    if chain.input_power is not None:
        p = chain.input_power
        for i, att in _ordered_attenuators(chain, fridge):
            dissipated[i] += p * (1 - 1 / att.ratio)
            p /= att.ratio
    out = []
    for i, st in enumerate(fridge.stages):
        load = conductive[i] + dissipated[i]
        ok = st.cooling_power is None or load <= st.cooling_power
        out.append(StageBudget(st.name, st.temperature, conductive[i], dissipated[i], st.cooling_power, ok))
    return out
