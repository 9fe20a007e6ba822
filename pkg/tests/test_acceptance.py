"""Acceptance criteria, one test per criterion.

Each test prints a single ``ACCEPTANCE <n> PASS|FAIL`` line and then asserts the same
condition. The lines are also collected into an "acceptance criteria" section of the
pytest terminal summary.
"""
import math
import time
from fractions import Fraction
from pathlib import Path

import numpy as np
import pytest

from conftest import ACCEPTANCE_LINES, C_PAR, L_PAR, R_PAR, parallel_rlc_admittance
from qubitpack.constants import h, k_B, watt_to_dbm
from qubitpack.fridge import (
    Amplifier, Attenuator, FridgeSpec, Stage, WiringChain, attenuation_chain_noise, cable_heat_load,
    load_materials, occupancy, receiver_noise, thermal_quantum,
)
from qubitpack.network import FrequencyResponse
from qubitpack.report import hygiene_report, load_package_spec, render_report
from qubitpack.resonance import loaded_q, fit_notch, photon_number, power_for_photons, simulate_notch
from qubitpack.spurious import CavitySpec, lowest_mode
from qubitpack.synthesis import extract_modes, foster_synthesize, vector_fit
from qubitpack.tline import (
    ResonatorSpec, SeriesResistance, composite_q, q_contribution, quarter_wave_frequency,
    tsv_transition_reflection,
)

DEMO_SPECS = Path(__file__).resolve().parents[1] / "demos" / "specs"


def verdict(n, ok, detail):
    line = f"ACCEPTANCE {n:>2} {'PASS' if ok else 'FAIL'}  {detail}"
    print(line)
    ACCEPTANCE_LINES.append(line)
    assert ok, detail


def test_criterion_01_box_modes():
    t0 = time.perf_counter()
    air = lowest_mode(CavitySpec(10e-3, 10e-3, 0.5e-3))
    chip = lowest_mode(CavitySpec(10e-3, 10e-3, 0.5e-3, 11.5))
    dt = time.perf_counter() - t0
    ok = (
        air.name == "TM110" and chip.name == "TM110"
        and abs(air.frequency / 22e9 - 1) <= 0.04
        and abs(chip.frequency / 6e9 - 1) <= 0.05
        and dt < 1.0
    )
    verdict(1, ok, f"air {air.name} {air.frequency / 1e9:.3f} GHz, eps_r 11.5 {chip.name} "
                   f"{chip.frequency / 1e9:.3f} GHz, {dt * 1e3:.1f} ms")


def test_criterion_02_thermal_quantum():
    t = thermal_quantum(5e9)
    exact = h * 5e9 / k_B
    ok = abs(t - exact) <= 4 * np.finfo(float).eps * exact and round(t, 4) == 0.2400 and abs(t / 0.250 - 1) <= 0.05
    verdict(2, ok, f"hf/kB at 5 GHz = {t:.6f} K (vs 250 mK, {100 * (t / 0.25 - 1):+.1f}%)")


def test_criterion_03_tsv_transition():
    r6 = tsv_transition_reflection(84e-12, 0.0, 50.0, [6e9])[0]
    r3 = tsv_transition_reflection(84e-12, 0.0, 50.0, [3e9])[0]
    sweep = [tsv_transition_reflection(L, 0.0, 50.0, [6e9])[0] for L in np.linspace(1e-12, 250e-12, 100)]
    monotone = bool(np.all(np.diff(sweep) > 0))
    ok = abs(r6 + 30.0) <= 0.1 and abs(r3 + 36.0) <= 0.5 and monotone
    verdict(3, ok, f"|S11| {r6:.2f} dB at 6 GHz, {r3:.2f} dB at 3 GHz, monotone in L: {monotone}")


def test_criterion_04_bbq_round_trip():
    t0 = time.perf_counter()
    f = np.linspace(1e9, 10e9, 401)
    resp = FrequencyResponse(f, parallel_rlc_admittance(f), "Y")
    model = vector_fit(resp)
    modes = extract_modes(model, (1e9, 10e9))
    circ = foster_synthesize(model)
    dt = time.perf_counter() - t0
    f0 = 1 / (2 * math.pi * math.sqrt(L_PAR * C_PAR))
    q0 = R_PAR * math.sqrt(C_PAR / L_PAR)
    y_model = model.admittance(f)
    repro = float(np.max(np.abs(circ.admittance(f) - y_model) / np.abs(y_model)))
    ok = (
        len(modes) == 1
        and abs(modes[0].frequency / f0 - 1) <= 1e-3
        and abs(modes[0].frequency / 3.183e9 - 1) <= 1e-3
        and abs(modes[0].quality_factor / q0 - 1) <= 1e-2
        and repro <= 1e-8
        and dt < 5.0
    )
    m = modes[0] if modes else None
    verdict(4, ok, f"f0 {m.frequency / 1e9:.6f} GHz, Q {m.quality_factor:.3f}, Foster error {repro:.1e}, "
                   f"{dt:.2f} s")


def test_criterion_05_loss_placement():
    spec = ResonatorSpec(50.0, 6.25, 5e-3)
    q0 = q_contribution(spec, SeriesResistance(1e-3, 0.0))
    xs = np.linspace(0.0, spec.length, 50, endpoint=False)
    qs = [q_contribution(spec, SeriesResistance(1e-3, x)) for x in xs]
    increasing = bool(np.all(np.diff(qs) > 0))
    f0 = quarter_wave_frequency(spec)
    ok = abs(q0 / 39270 - 1) <= 0.01 and increasing and abs(f0 / 6e9 - 1) <= 2e-3
    verdict(5, ok, f"Q at short {q0:.0f} (f0 {f0 / 1e9:.4f} GHz), strictly increasing over 50 positions: {increasing}")


def test_criterion_06_q_window():
    # Composite Q is increasing in the transition Q, so the image of [150k, inf] is [composite(150k), 300k].
    lo_exact = 1 / (Fraction(1, 300_000) + Fraction(1, 150_000))
    hi_exact = Fraction(300_000)
    lo, hi = composite_q([3e5, 1.5e5]), composite_q([3e5, math.inf])
    samples = [composite_q([3e5, q]) for q in np.geomspace(1.5e5, 1e12, 200)]
    ok = (
        lo_exact >= 100_000 and hi_exact <= 300_000
        and abs(lo - float(lo_exact)) <= 1e-9 * float(lo_exact) and hi == 3e5
        and all(np.diff(samples) > 0)
        and all(100_000 * (1 - 1e-12) <= s <= 300_000 for s in samples)
    )
    verdict(6, ok, f"composite Q over transition Q in [150k, inf] spans [{float(lo_exact):.0f}, "
                   f"{float(hi_exact):.0f}]")


def _random_notch_draws(rng, n):
    for _ in range(n):
        yield (rng.uniform(4e9, 8e9), 10 ** rng.uniform(4, 6), 10 ** rng.uniform(4, 6), rng.uniform(-0.5, 0.5))


def test_criterion_07_notch_fit():
    t0 = time.perf_counter()
    rng = np.random.default_rng(2024)
    worst_clean = worst_noisy = 0.0
    for f0, qi, qc, phi in _random_notch_draws(rng, 200):
        f = f0 * (1 + np.linspace(-5, 5, 401) / loaded_q(qi, qc))
        s = simulate_notch(f0, qi, qc, phi, f)
        clean = fit_notch(f, s)
        worst_clean = max(worst_clean, abs(clean.Qi / qi - 1), abs(clean.Qc / qc - 1))
        noise = 1e-3 * (rng.standard_normal(f.size) + 1j * rng.standard_normal(f.size)) / math.sqrt(2)
        noisy = fit_notch(f, s + noise)
        worst_noisy = max(worst_noisy, abs(noisy.Qi / qi - 1), abs(noisy.Qc / qc - 1))
    dt = time.perf_counter() - t0
    ok = worst_clean <= 1e-3 and worst_noisy <= 0.05 and dt < 30
    verdict(7, ok, f"200 draws: worst Qi/Qc error {worst_clean:.1e} noiseless, {100 * worst_noisy:.2f}% at -60 dB, "
                   f"{dt:.1f} s")


def test_criterion_08_photon_calibration():
    ql = loaded_q(2e5, 1e5)
    p1 = watt_to_dbm(power_for_photons(1.0, 6e9, ql, 1e5))
    ps = np.geomspace(1e-20, 1e-10, 50)
    n = np.array([photon_number(p, 6e9, ql, 1e5) for p in ps])
    lin = float(np.max(np.abs(n / ps / (n[0] / ps[0]) - 1)))
    ok = abs(p1 + 147.7) <= 0.1 and lin <= 4 * np.finfo(float).eps
    verdict(8, ok, f"power for one photon {p1:.2f} dBm, linearity deviation {lin:.1e}")


def test_criterion_09_attenuation_chain():
    fridge = FridgeSpec((Stage("room", 300.0), Stage("4K", 4.0), Stage("still", 0.1), Stage("mxc", 0.01)))
    chain = WiringChain(attenuators=(Attenuator(20, "4K"), Attenuator(20, "still"), Attenuator(20, "mxc")))
    n = attenuation_chain_noise(chain, fridge, 6e9, 300.0)
    n_in = occupancy(6e9, 300.0)
    identity = attenuation_chain_noise(WiringChain(attenuators=(Attenuator(0, "4K"),)), fridge, 6e9, 300.0)
    thermal = attenuation_chain_noise(WiringChain(attenuators=(Attenuator(400, "4K"),)), fridge, 6e9, 300.0)
    ok = abs(n / 2.96e-3 - 1) <= 0.02 and identity == n_in and thermal == occupancy(6e9, 4.0)
    verdict(9, ok, f"n at chip {n:.4e}; 0 dB identity exact: {identity == n_in}; "
                   f"full thermalization exact: {thermal == occupancy(6e9, 4.0)}")


def test_criterion_10_heat_load_oracle():
    worst = 0.0
    materials = load_materials()
    for m in materials.values():
        t = np.linspace(m.t_min, m.t_max, 1001)
        k = m.conductivity(t)
        oracle = float(np.sum((k[1:] + k[:-1]) / 2 * np.diff(t)))
        worst = max(worst, abs(cable_heat_load(m, 1.0, 1.0, m.t_max, m.t_min) / oracle - 1))
    ok = worst <= 1e-3 and len(materials) >= 3
    verdict(10, ok, f"{len(materials)} materials, worst deviation from 1000-panel trapezoid {worst:.1e}")


def test_criterion_11_friis():
    t = receiver_noise([Amplifier(20, 0.3), Amplifier(40, 4.0), Amplifier(30, 300.0)])
    ok = abs(t - 0.3403) <= 1e-4
    verdict(11, ok, f"system noise temperature {t:.6f} K")


def test_criterion_12_end_to_end():
    wb = load_package_spec(DEMO_SPECS / "wirebond_package.yaml")
    tsv = load_package_spec(DEMO_SPECS / "tsv_package.yaml")
    wb_report, tsv_report = hygiene_report(wb), hygiene_report(tsv)
    fails = [f for f in wb_report.findings if f.severity == "fail" and f.category == "ground_resonance"]
    m1 = render_report(hygiene_report(load_package_spec(DEMO_SPECS / "wirebond_package.yaml")), "machine")
    m2 = render_report(hygiene_report(load_package_spec(DEMO_SPECS / "wirebond_package.yaml")), "machine")
    ok = (
        len(fails) == 1 and round(fails[0].value / 1e9, 2) == 3.39
        and tsv_report.status == "pass" and wb_report.status == "fail"
        and m1 == m2 and render_report(wb_report, "machine") == m1
    )
    verdict(12, ok, f"wirebond: fail at {fails[0].value / 1e9:.3f} GHz; tsv: {tsv_report.status}; "
                    f"machine report byte-stable: {m1 == m2}")
