import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from conftest import C_PAR, L_PAR, R_PAR, parallel_rlc_admittance
from qubitpack.network import FrequencyResponse, convert_network
from qubitpack.synthesis import (
    FitError, FosterBranch, FosterError, LumpedCircuit, PassivityError, RationalModel, circuit_to_model,
    extract_modes, foster_synthesize, required_conductance, t1_estimate, vector_fit,
)

F0_RLC = 1 / (2 * np.pi * math.sqrt(L_PAR * C_PAR))  # 3.1831 GHz
Q_RLC = R_PAR * math.sqrt(C_PAR / L_PAR)  # 50
NOISE_SEED = 80


def series_branch_admittance(freqs, R, L, C):
    s = 2j * np.pi * np.asarray(freqs)
    return 1 / (R + s * L + 1 / (s * C))


def two_mode_environment(freqs):
    """80 fF shunt plus two series-RLC branches at about 4.5 and 7.1 GHz."""
    s = 2j * np.pi * np.asarray(freqs)
    y = s * 80e-15
    y = y + series_branch_admittance(freqs, 2.0, 25e-9, 50e-15)
    y = y + series_branch_admittance(freqs, 5.0, 10e-9, 50e-15)
    return y


def rel_err(a, b):
    return np.max(np.abs(a - b) / np.abs(b))


def test_pure_capacitor_order_zero():
    f = np.linspace(1e9, 10e9, 101)
    resp = FrequencyResponse(f, 2j * np.pi * f * 1e-12, "Y")
    m = vector_fit(resp, order=0, tol=1e-9)
    assert m.order == 0
    assert m.capacitive_term == pytest.approx(1e-12, rel=1e-4)


def test_rlc_order_two_recovers_resonance(rlc_response):
    # The resonance of a parallel RLC admittance is a zero pair of Y; the inductor is a pole at DC.
    m = vector_fit(rlc_response, order=2, tol=1e-6)
    zeros = m.zeros()
    pair = zeros[np.argmin(np.abs(np.abs(zeros) / (2 * np.pi) - F0_RLC))]
    assert abs(pair) / (2 * np.pi) == pytest.approx(F0_RLC, rel=1e-3)
    modes = extract_modes(m, (1e9, 10e9))
    assert len(modes) == 1
    assert modes[0].frequency == pytest.approx(F0_RLC, rel=1e-3)


def test_rlc_with_seeded_perturbation(rlc_freqs):
    rng = np.random.default_rng(NOISE_SEED)
    y = parallel_rlc_admittance(rlc_freqs)
    eps = 1e-4 * (rng.standard_normal(y.size) + 1j * rng.standard_normal(y.size)) / math.sqrt(2)  # -80 dB
    m = vector_fit(FrequencyResponse(rlc_freqs, y * (1 + eps), "Y"), order="auto", tol=1e-3)
    modes = extract_modes(m, (1e9, 10e9))
    assert len(modes) == 1
    assert modes[0].frequency == pytest.approx(F0_RLC, rel=1e-3)
    assert modes[0].quality_factor == pytest.approx(Q_RLC, rel=1e-2)


def test_fit_accepts_s_parameters(rlc_freqs, rlc_response):
    s = convert_network(rlc_response, "S")
    m = vector_fit(s, tol=1e-6)
    assert rel_err(m.admittance(rlc_freqs), rlc_response.entry(0, 0)) < 1e-6


def test_insufficient_order_raises(rlc_response):
    with pytest.raises(FitError, match="insufficient"):
        vector_fit(rlc_response, order=0, tol=1e-6, inductive=False)


def test_too_few_points():
    f = np.linspace(1e9, 2e9, 10)
    with pytest.raises(ValueError):
        vector_fit(FrequencyResponse(f, 1j * f * 1e-12, "Y"), order=4)


def test_two_mode_environment_auto_order():
    f = np.linspace(2e9, 10e9, 801)
    y = two_mode_environment(f)
    m = vector_fit(FrequencyResponse(f, y, "Y"), order="auto", tol=1e-6)
    assert np.all(m.poles.real <= 0)
    circ = foster_synthesize(m)
    assert circ.physical
    branches = sorted(circ.branches, key=lambda b: b.resonance)
    assert [b.L for b in branches] == pytest.approx([25e-9, 10e-9], rel=1e-4)
    assert [b.C for b in branches] == pytest.approx([50e-15, 50e-15], rel=1e-4)
    assert [b.R for b in branches] == pytest.approx([2.0, 5.0], rel=1e-3)
    assert circ.shunt_capacitance == pytest.approx(80e-15, rel=1e-4)


def test_foster_recovers_series_rlc():
    f = np.linspace(1e9, 10e9, 401)
    R, L, C = 1.0, 10e-9, 0.25e-12
    m = vector_fit(FrequencyResponse(f, series_branch_admittance(f, R, L, C), "Y"), order=2, tol=1e-8)
    circ = foster_synthesize(m)
    assert circ.physical
    (b,) = circ.branches
    assert (b.R, b.L, b.C) == (pytest.approx(R, rel=1e-2), pytest.approx(L, rel=1e-2), pytest.approx(C, rel=1e-2))
    assert abs(b.G) < 1e-12


def test_foster_capacitor_only():
    circ = foster_synthesize(RationalModel([], [], 0.0, 1e-12))
    assert circ.branches == () and circ.shunt_inductance is None
    assert circ.shunt_capacitance == 1e-12 and circ.shunt_conductance == 0


def test_foster_inductive_term_is_shunt_inductor(rlc_response, rlc_freqs):
    m = vector_fit(rlc_response, tol=1e-9)
    circ = foster_synthesize(m)
    assert circ.shunt_inductance == pytest.approx(L_PAR, rel=1e-9)
    assert circ.shunt_capacitance == pytest.approx(C_PAR, rel=1e-9)
    assert circ.shunt_conductance == pytest.approx(1 / R_PAR, rel=1e-9)
    assert rel_err(circ.admittance(rlc_freqs), m.admittance(rlc_freqs)) < 1e-8


def test_foster_flags_negative_resistance():
    p = complex(-1e6, 2 * np.pi * 5e9)
    # Large positive b = -2 Re(r p*) makes G/C exceed the decay rate, forcing R < 0.
    r = complex(1e8, -1e6)
    m = RationalModel([p, p.conjugate()], [r, r.conjugate()], 0.0, 1e-13)
    circ = foster_synthesize(m)
    assert not circ.physical
    assert any("negative R" in msg for msg in circ.non_physical)
    f = np.linspace(1e9, 10e9, 301)
    assert rel_err(circ.admittance(f), m.admittance(f)) < 1e-8


def test_foster_rejects_real_poles():
    m = RationalModel([-1e9, -2e9], [1e3, 1e3])
    with pytest.raises(FosterError, match="-1e\\+09 rad/s, -2e\\+09 rad/s"):
        foster_synthesize(m)


def test_model_invariants():
    with pytest.raises(ValueError, match="unstable"):
        RationalModel([1e9], [1.0])
    with pytest.raises(ValueError, match="conjugate"):
        RationalModel([complex(-1, 5)], [1.0])


def test_extract_modes_parallel_rlc():
    m = RationalModel([], [], 1 / R_PAR, C_PAR, 1 / L_PAR)
    (mode,) = extract_modes(m, (1e9, 10e9))
    assert mode.frequency == pytest.approx(3.1831e9, rel=1e-4)
    assert mode.frequency == pytest.approx(F0_RLC, rel=1e-11)
    assert mode.quality_factor == pytest.approx(50, rel=1e-9)
    assert mode.effective_capacitance == pytest.approx(C_PAR, rel=1e-9)


def test_extract_modes_lossless_is_infinite_q():
    m = RationalModel([], [], 0.0, C_PAR, 1 / L_PAR)
    (mode,) = extract_modes(m, (1e9, 10e9))
    assert math.isinf(mode.quality_factor)


def test_extract_modes_pure_capacitor_empty():
    assert extract_modes(RationalModel([], [], 0.0, 1e-12), (1e9, 10e9)) == []


def test_extract_modes_circuit_agrees_with_model():
    f = np.linspace(2e9, 10e9, 801)
    m = vector_fit(FrequencyResponse(f, two_mode_environment(f), "Y"), tol=1e-6)
    circ = foster_synthesize(m)
    a = extract_modes(m, (2e9, 10e9))
    b = extract_modes(circ, (2e9, 10e9))
    assert len(a) == len(b) == 2
    for x, y in zip(a, b):
        assert x.frequency == pytest.approx(y.frequency, rel=1e-10)
        assert x.quality_factor == pytest.approx(y.quality_factor, rel=1e-6)
        assert x.effective_capacitance == pytest.approx(y.effective_capacitance, rel=1e-6)


def test_circuit_model_round_trip():
    circ = LumpedCircuit(1e-13, 1e-6, (FosterBranch(2.0, 20e-9, 40e-15, 1e-7),), 5e-9)
    f = np.linspace(1e9, 10e9, 301)
    m = circuit_to_model(circ)
    assert rel_err(m.admittance(f), circ.admittance(f)) < 1e-10
    back = foster_synthesize(m)
    (b,) = back.branches
    assert (b.R, b.L, b.C, b.G) == pytest.approx((2.0, 20e-9, 40e-15, 1e-7), rel=1e-9)


@settings(max_examples=25, deadline=None)
@given(
    c0=st.floats(10e-15, 200e-15),
    L=st.lists(st.floats(2e-9, 40e-9), min_size=1, max_size=3),
    C=st.floats(20e-15, 100e-15),
)
def test_lossless_foster_reactance_slope(c0, L, C):
    poles, residues = [], []
    for Lk in L:
        w = 1 / math.sqrt(Lk * C)
        poles += [1j * w, -1j * w]
        residues += [1 / (2 * Lk), 1 / (2 * Lk)]
    m = RationalModel(poles, residues, 0.0, c0)
    f = np.linspace(0.5e9, 20e9, 2000)
    slope = m.d_admittance_d_omega(f).imag
    assert np.all(slope > 0)


def test_fit_is_passive_and_stable(rlc_freqs):
    y = two_mode_environment(rlc_freqs) + parallel_rlc_admittance(rlc_freqs) * 0.1
    m = vector_fit(FrequencyResponse(rlc_freqs, y, "Y"), tol=1e-6)
    assert np.all(m.poles.real <= 0)
    assert np.all(m.admittance(rlc_freqs).real >= -1e-12)
    circ = foster_synthesize(m)
    assert rel_err(circ.admittance(rlc_freqs), m.admittance(rlc_freqs)) < 1e-8


def test_t1_values():
    m = RationalModel([], [], 1e-7, 0.0)
    assert t1_estimate(70e-15, m, 5e9) == pytest.approx(0.7e-6, rel=1e-12)
    assert required_conductance(70e-15, 20e-6) == pytest.approx(3.5e-9, rel=1e-12)
    assert math.isinf(t1_estimate(70e-15, RationalModel([], [], 0.0, 1e-12), 5e9))
    with pytest.raises(PassivityError):
        t1_estimate(70e-15, RationalModel([], [], -1e-6, 0.0), 5e9)


def test_t1_from_table(rlc_response):
    assert t1_estimate(70e-15, rlc_response, 5e9) == pytest.approx(70e-15 * R_PAR, rel=1e-9)
    with pytest.raises(ValueError, match="outside"):
        t1_estimate(70e-15, rlc_response, 20e9)


def test_foster_flag_tolerance_follows_fit_error():
    from dataclasses import replace

    # G is negative by 1e-7 of the branch admittance scale: real for an exact model, noise for a 1e-6 fit.
    w0 = 1 / math.sqrt(20e-9 * 40e-15)
    circ = LumpedCircuit(1e-13, 0.0, (FosterBranch(2.0, 20e-9, 40e-15, -1e-7 * w0 * 40e-15),))
    exact = circuit_to_model(circ)
    assert not foster_synthesize(exact).physical
    assert foster_synthesize(replace(exact, rms_error=1e-6)).physical
