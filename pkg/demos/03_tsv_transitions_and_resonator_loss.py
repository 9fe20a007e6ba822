"""Transmission-line side of the package: CPW impedance, the TSV transition and
where a lossy component hurts a quarter-wave resonator most.
"""
import numpy as np

from qubitpack.tline import (
    CpwGeometry, DielectricLoss, Line, ResonatorSpec, SeriesResistance, ShuntConductance, bound_component_loss,
    cascade, composite_q, cpw_parameters, max_series_inductance, q_contribution, quarter_wave_frequency,
    tsv_transition, tsv_transition_reflection,
)
from qubitpack.units import format_si

z0, eps_eff = cpw_parameters(CpwGeometry(10e-6, 6e-6, 11.45))
print(f"CPW 10/6 um on silicon: Z0 = {z0:.2f} Ohm, eps_eff = {eps_eff:.3f}")

# A -30 dB reflection target at 6 GHz caps the lumped series inductance of a via.
L_max = max_series_inductance(-30, 6e9)
print(f"series inductance allowed for -30 dB at 6 GHz: {format_si(L_max, 'H')}")

f = np.linspace(3e9, 8e9, 6)
for L, C in ((40e-12, 0), (84e-12, 0), (84e-12, 20e-15), (200e-12, 0)):
    r = tsv_transition_reflection(L, C, 50, f)
    print(f"  L = {format_si(L, 'H'):>7s}, C = {format_si(C, 'F'):>6s}: worst |S11| {r.max():6.2f} dB")

# Top-to-bottom feedline: line, via, line. The transition compensates a little
# when a shunt capacitance balances the series inductance.
feed = [Line(z0, eps_eff, 2e-3)] + tsv_transition(84e-12, 34e-15) + [Line(z0, eps_eff, 2e-3)]
s = cascade(feed, f, z_ref=50)
print("\nfeedline with a compensated via, |S11| in dB:", np.round(20 * np.log10(np.abs(s.entry(0, 0))), 1))

# Loss placement on a 6 GHz quarter-wave resonator (short at x = 0, open at x = 5 mm).
res = ResonatorSpec(50, 6.25, 5e-3)
print(f"\nquarter-wave resonator f0 = {format_si(quarter_wave_frequency(res), 'Hz')}")
print("   x (mm)   Q(1 mOhm series)   Q(1 uS shunt)")
for x in np.linspace(0, 5e-3, 6):
    qr = q_contribution(res, SeriesResistance(1e-3, x))
    qg = q_contribution(res, ShuntConductance(1e-6, x))
    print(f"   {x * 1e3:5.1f}   {qr:16.4g}   {qg:13.4g}")
print(f"dielectric p = 0.02, tan_delta = 1e-4 anywhere: Q = {q_contribution(res, DielectricLoss(0.02, 1e-4)):.4g}")

# Composing and inverting: a 300k planar baseline and a 450k transition give 180k,
# and a measured 100k against a 300k baseline bounds the added component at 150k.
print(f"\ncomposite of 300k and 450k: {composite_q([3e5, 4.5e5]):.0f}")
print(f"component bound from 100k measured, 300k baseline: {bound_component_loss(1e5, 3e5):.0f}")
