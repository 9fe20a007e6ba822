"""Fitting a side-coupled resonator trace, then turning drive power into photons
and photons into a TLS-limited internal Q.
"""
import numpy as np

from qubitpack.constants import dbm_to_watt, watt_to_dbm
from qubitpack.resonance import (
    TlsModelParams, fit_notch, loaded_q, photon_number, power_for_photons, simulate_notch,
    tls_quality_factor,
)

f0, qi, qc, phi = 6.0e9, 2.0e5, 1.0e5, 0.15
ql = loaded_q(qi, qc)
freqs = f0 * (1 + np.linspace(-5, 5, 401) / ql)

rng = np.random.default_rng(1)
trace = simulate_notch(f0, qi, qc, phi, freqs)
noisy = trace + 1e-3 * (rng.standard_normal(freqs.size) + 1j * rng.standard_normal(freqs.size)) / np.sqrt(2)
print(f"on-resonance |S21| = {abs(simulate_notch(f0, qi, qc, 0.0, [f0])[0]):.4f}")

for label, s21 in (("clean", trace), ("-60 dB noise", noisy)):
    r = fit_notch(freqs, s21)
    print(f"{label:13s} f0 = {r.f0 / 1e9:.9f} GHz  Qi = {r.Qi:9.0f}  Qc = {r.Qc:9.0f}  "
          f"phi = {r.phi:+.4f}  rms residual {r.residual:.1e}")

# An uncorrected 50 ns cable delay leaves a phase slope the fitter reports.
delayed = trace * np.exp(-2j * np.pi * freqs * 50e-9)
print("delay flag on an uncorrected trace:", fit_notch(freqs, delayed).delay_flag)

p = dbm_to_watt(-110)
print(f"\n-110 dBm at the resonator drives {photon_number(p, f0, ql, qc):.3g} photons")
print(f"one photon needs {watt_to_dbm(power_for_photons(1, f0, ql, qc)):.1f} dBm")

tls = TlsModelParams(delta0=5e-6, n_c=10, beta=0.5, delta_other=1e-6)
print("\nTLS-limited Qi at 10 mK versus photon number:")
for n in (0, 1, 10, 100, 1e3, 1e5):
    print(f"  n = {n:8.0f}: Qi = {tls_quality_factor(tls, n, 10e-3, f0):.4g}")
print("and versus temperature at n = 1:")
for T in (0.01, 0.1, 0.2, 0.4):
    print(f"  T = {T * 1e3:4.0f} mK: Qi = {tls_quality_factor(tls, 1, T, f0):.4g}")
