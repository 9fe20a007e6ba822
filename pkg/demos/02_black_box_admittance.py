"""From a simulated port admittance to modes, a lumped circuit and a T1 limit.

The admittance seen by the qubit junction is fitted with a rational model,
realised as a Foster network, and scanned for modes (zeros of Y with positive
slope). The real part of Y at the qubit frequency then bounds T1.
"""
from pathlib import Path

import numpy as np

from qubitpack.synthesis import extract_modes, foster_synthesize, t1_estimate, vector_fit
from qubitpack.touchstone import load_network
from qubitpack.units import format_si

# Synthetic "simulation output": an 80 fF pad, a weakly coupled package mode at
# 6.3 GHz (Q 2000), a readout resonator at 7.1 GHz (Q 20000) and a drive line coupled
# through 0.05 fF. See specs/data/ for the table itself.
path = Path(__file__).parent / "specs" / "data" / "qubit_port_admittance.csv"
resp = load_network(path, representation="Y")
print(f"{len(resp)} points, {format_si(resp.freqs[0], 'Hz')} to {format_si(resp.freqs[-1], 'Hz')}")

model = vector_fit(resp, order="auto", tol=1e-4)
print(f"fit order {model.order}, rms relative error {model.rms_error:.2e}")

circuit = foster_synthesize(model)
print(f"\nFoster realisation: C0 = {format_si(circuit.shunt_capacitance, 'F')}, "
      f"G0 = {circuit.shunt_conductance:.3e} S, physical: {circuit.physical}")
for b in sorted(circuit.branches, key=lambda b: b.resonance):
    print(f"  branch at {format_si(b.resonance, 'Hz')}: R = {b.R:.4g} Ohm, L = {format_si(b.L, 'H')}, "
          f"C = {format_si(b.C, 'F')}, G = {b.G:.3g} S")
for msg in circuit.non_physical:
    print("  flagged:", msg)

print("\nmodes of the environment:")
for m in extract_modes(model, (resp.freqs[0], resp.freqs[-1])):
    print(f"  {format_si(m.frequency, 'Hz')}  Q = {m.quality_factor:.4g}  "
          f"C_eff = {format_si(m.effective_capacitance, 'F')}")

# Re Y at the qubit port is tiny next to |Y| (the pad capacitance dominates), so
# take it from the table rather than from the fit.
c_q = 80e-15
for f_q in (4.5e9, 5.5e9, 6.0e9):
    t1 = t1_estimate(c_q, resp, f_q)
    print(f"T1 limit at {format_si(f_q, 'Hz')}: {format_si(t1, 's')}")

# How close the Foster network tracks the original data:
y = resp.entry(0, 0)
err = np.max(np.abs(circuit.admittance(resp.freqs) - y) / np.abs(y))
print(f"\nworst relative deviation of the circuit from the data: {err:.2e}")
