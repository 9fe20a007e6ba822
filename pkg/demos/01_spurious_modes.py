"""Where do the unwanted resonances of a qubit package sit?

Two closed-form estimates cover most of the trouble: the box modes of any metal
cavity around the chip, and the lumped LC mode formed by the chip-to-package
ground capacitance and whatever inductance ties the two grounds together.
"""
from qubitpack.spurious import (
    Bump, CavitySpec, GroundingSpec, MetalRemoval, Tsv, Wirebond, cavity_mode_frequencies,
    compare_mitigations, ground_inductance, lowest_mode, parallel_plate_capacitance,
)
from qubitpack.units import format_si

# A 10 mm x 10 mm pocket, 0.5 mm tall. In air the lowest mode is far above a
# 4-8 GHz qubit band, but filling it with silicon pulls everything down by sqrt(eps_r).
air = CavitySpec(10e-3, 10e-3, 0.5e-3)
silicon = CavitySpec(10e-3, 10e-3, 0.5e-3, eps_r=11.5)
for name, cav in (("air", air), ("silicon", silicon)):
    m = lowest_mode(cav)
    print(f"{name:8s} lowest mode {m.name} at {format_si(m.frequency, 'Hz')}")

print("\nfirst few modes of the silicon-filled pocket:")
for m in cavity_mode_frequencies(silicon, 2)[:6]:
    print(f"  {m.name:6s} {format_si(m.frequency, 'Hz')}")

# Shrinking the chip is the blunt fix; halving both lateral dimensions doubles TM110.
small = CavitySpec(5e-3, 5e-3, 0.5e-3, eps_r=11.5)
print(f"\n5 mm chip: {format_si(lowest_mode(small).frequency, 'Hz')}")

# Ground resonance. A chip sitting 10 um above a package floor over 25 mm^2 has a few pF
# of plate capacitance; a single 1 mm wirebond adds roughly 1 nH.
c_plate = parallel_plate_capacitance(25e-6, 100e-6)
print(f"\nchip-to-package capacitance over 25 mm^2 at 100 um: {format_si(c_plate, 'F')}")

chip = GroundingSpec(0, 0, Wirebond(1e-3), capacitance=2.21e-12)
options = [
    Wirebond(1e-3),
    Wirebond(1e-3, count=8),
    Bump(30e-12, count=40),
    Tsv(10e-12, count=4),
    MetalRemoval(0.25),
    MetalRemoval(0.25, Tsv(10e-12, count=4)),
]
print("\nmitigation comparison at C = 2.21 pF:")
for alt, f in compare_mitigations(chip, options):
    label = type(alt).__name__
    if isinstance(alt, MetalRemoval):
        label += f"(x{alt.area_factor}" + (f", {type(alt.strategy).__name__})" if alt.strategy else ")")
    else:
        label += f" L = {format_si(ground_inductance(alt), 'H')}"
    print(f"  {label:34s} -> {format_si(f, 'Hz')}")
