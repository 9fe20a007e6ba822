"""Closed-form spurious-mode estimates for qubit packages.

Two families are covered: resonances of a rectangular metal enclosure (box modes),
and the lumped LC resonance formed by the chip-to-package ground capacitance and
the inductance of whatever connects the two grounds.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Sequence, Union

import numpy as np

from .constants import c, epsilon_0

# Wirebond rule of thumb: inductance per millimetre of bond.
WIREBOND_NH_PER_MM = 1.0


@dataclass(frozen=True)
class CavitySpec:
    """Rectangular cavity with interior dimensions a x b x d; d is the thin axis."""

    a: float
    b: float
    d: float
    eps_r: float = 1.0

    def __post_init__(self):
        if not (self.a > 0 and self.b > 0 and self.d > 0):
            raise ValueError("cavity dimensions must be positive")
        if not self.eps_r >= 1:
            raise ValueError("eps_r must be >= 1")


@dataclass(frozen=True, order=True)
class CavityMode:
    family: str  # "TE" or "TM"
    m: int
    n: int
    p: int
    frequency: float

    @property
    def name(self) -> str:
        return f"{self.family}{self.m}{self.n}{self.p}"


def mode_frequency(cavity: CavitySpec, m: int, n: int, p: int) -> float:
    return c / (2 * math.sqrt(cavity.eps_r)) * math.sqrt(
        (m / cavity.a) ** 2 + (n / cavity.b) ** 2 + (p / cavity.d) ** 2
    )


def _valid(family, m, n, p):
    if family == "TM":
        return m >= 1 and n >= 1
    return p >= 1 and (m >= 1 or n >= 1)


def _sort_key(mode: CavityMode):
    # Round so that degenerate modes computed along different paths tie exactly.
    return (float(f"{mode.frequency:.12e}"), mode.family, mode.m, mode.n, mode.p)


def cavity_mode_frequencies(cavity: CavitySpec, max_index: int) -> list[CavityMode]:
    """All TE/TM modes with every index <= ``max_index``, ascending in frequency.

    Degenerate modes are ordered by (family, m, n, p).
    """
    if not 1 <= max_index <= 20:
        raise ValueError("max_index must be in [1, 20]")
    modes = []
    rng = range(max_index + 1)
    for family in ("TE", "TM"):
        for m in rng:
            for n in rng:
                for p in rng:
                    if _valid(family, m, n, p):
                        modes.append(CavityMode(family, m, n, p, mode_frequency(cavity, m, n, p)))
    modes.sort(key=_sort_key)
    return modes


def lowest_mode(cavity: CavitySpec) -> CavityMode:
    return cavity_mode_frequencies(cavity, 2)[0]


def modes_below(cavity: CavitySpec, f_max: float) -> list[CavityMode]:
    """Every mode at or below ``f_max``, choosing the index range needed to reach it (capped at 20)."""
    longest = max(cavity.a, cavity.b, cavity.d)
    needed = math.ceil(2 * longest * math.sqrt(cavity.eps_r) * f_max / c) + 1
    modes = cavity_mode_frequencies(cavity, min(max(needed, 1), 20))
    return [mode for mode in modes if mode.frequency <= f_max]


def parallel_plate_capacitance(area: float, gap: float, eps_r: float = 1.0) -> float:
    if not (area > 0 and gap > 0):
        raise ValueError("area and gap must be positive")
    return epsilon_0 * eps_r * area / gap


@dataclass(frozen=True)
class Wirebond:
    length: float  # m
    count: int = 1
    nh_per_mm: float = WIREBOND_NH_PER_MM

    def __post_init__(self):
        if not self.length > 0 or self.count < 1:
            raise ValueError("wirebond length must be positive and count >= 1")


@dataclass(frozen=True)
class Bump:
    inductance: float  # H, per bump
    count: int = 1

    def __post_init__(self):
        if not self.inductance > 0 or self.count < 1:
            raise ValueError("bump inductance must be positive and count >= 1")


@dataclass(frozen=True)
class Tsv:
    inductance: float  # H, per via
    count: int = 1

    def __post_init__(self):
        if not self.inductance > 0 or self.count < 1:
            raise ValueError("TSV inductance must be positive and count >= 1")


Strategy = Union[Wirebond, Bump, Tsv]


@dataclass(frozen=True)
class GroundingSpec:
    """Chip ground plane facing the package ground across a gap.

    ``capacitance`` overrides the parallel-plate estimate when it is known directly.
    """

    overlap_area: float
    gap: float
    strategy: Strategy
    gap_eps_r: float = 1.0
    capacitance: float | None = None

    def __post_init__(self):
        if self.capacitance is None and not (self.overlap_area > 0 and self.gap > 0):
            raise ValueError("overlap_area and gap must be positive")
        if self.capacitance is not None and not self.capacitance > 0:
            raise ValueError("capacitance must be positive")

    def ground_capacitance(self) -> float:
        if self.capacitance is not None:
            return self.capacitance
        return parallel_plate_capacitance(self.overlap_area, self.gap, self.gap_eps_r)


@dataclass(frozen=True)
class MetalRemoval:
    """Alternative that shrinks the overlap area (and thus the capacitance) by ``area_factor``.

    ``strategy`` replaces the connection type as well when given.
    """

    area_factor: float
    strategy: Strategy | None = None

    def __post_init__(self):
        if not 0 < self.area_factor <= 1:
            raise ValueError("area_factor must be in (0, 1]")


def ground_inductance(strategy: Strategy) -> float:
    if isinstance(strategy, Wirebond):
        return strategy.length * 1e3 * strategy.nh_per_mm * 1e-9 / strategy.count
    if isinstance(strategy, (Bump, Tsv)):
        return strategy.inductance / strategy.count
    raise TypeError(f"unknown grounding strategy {strategy!r}")


def lc_resonance(inductance, capacitance):
    """Resonant frequency 1/(2 pi sqrt(LC)) in Hz; accepts scalars or arrays."""
    L = np.asarray(inductance, dtype=float)
    C = np.asarray(capacitance, dtype=float)
    if np.any(~(L > 0)) or np.any(~(C > 0)):
        raise ValueError("inductance and capacitance must be positive")
    f = 1.0 / (2 * np.pi * np.sqrt(L * C))
    return float(f) if f.ndim == 0 else f


def ground_resonance(g: GroundingSpec) -> float:
    return lc_resonance(ground_inductance(g.strategy), g.ground_capacitance())


def compare_mitigations(
    g: GroundingSpec, alternatives: Sequence[Strategy | MetalRemoval]
) -> list[tuple[Strategy | MetalRemoval, float]]:
    """Ground resonance for each alternative, in input order.

    A bare strategy keeps the capacitance of ``g``; a :class:`MetalRemoval` scales it.
    """
    if not alternatives:
        raise ValueError("no alternatives given")
    out = []
    for alt in alternatives:
        if isinstance(alt, MetalRemoval):
            if g.capacitance is not None:
                spec = replace(g, capacitance=g.capacitance * alt.area_factor)
            else:
                spec = replace(g, overlap_area=g.overlap_area * alt.area_factor)
            if alt.strategy is not None:
                spec = replace(spec, strategy=alt.strategy)
        else:
            spec = replace(g, strategy=alt)
        out.append((alt, ground_resonance(spec)))
    return out
