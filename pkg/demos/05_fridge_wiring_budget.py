"""Heat and noise bookkeeping for the lines going into a dilution refrigerator."""
from qubitpack.fridge import (
    Amplifier, Attenuator, CableSegment, FridgeSpec, Stage, WiringChain, attenuation_chain_noise,
    cable_heat_load, load_materials, occupancy, receiver_noise, stage_budget, thermal_quantum,
)
from qubitpack.units import format_si

for f in (5e9, 6e9):
    print(f"hf/kB at {format_si(f, 'Hz')}: {thermal_quantum(f):.4f} K")
print(f"thermal photons at 5 GHz, 10 mK: {occupancy(5e9, 0.01):.2e}; at 6 GHz, 4 K: {occupancy(6e9, 4):.1f}")

mats = load_materials()
for name, m in mats.items():
    print(f"  {name:16s} k(4 K) = {m.conductivity(4.0):.3g} W/m/K  ({m.source})")

fridge = FridgeSpec((
    Stage("room", 300.0),
    Stage("pt1", 50.0, 30.0),
    Stage("pt2", 4.0, 1.5),
    Stage("still", 0.8, 30e-3),
    Stage("cold_plate", 0.1, 300e-6),
    Stage("mxc", 0.01, 20e-6),
))

# One coax per qubit drive line: stainless down to 4 K, NbTi below.
steel, nbti = mats["stainless_steel"], mats["nbti"]
print(f"\none steel coax room -> pt1: {format_si(cable_heat_load(steel, 0.15e-6, 0.25, 300, 50), 'W')}")


def chain_for(lines, drive_dbm=-30.0):
    return WiringChain(
        cables=(
            CableSegment(steel, 0.15e-6, 0.25, "room", lines),
            CableSegment(steel, 0.15e-6, 0.25, "pt1", lines),
            CableSegment(nbti, 0.05e-6, 0.30, "pt2", lines),
            CableSegment(nbti, 0.05e-6, 0.20, "still", lines),
        ),
        attenuators=(Attenuator(20, "pt2"), Attenuator(10, "still"), Attenuator(10, "cold_plate"),
                     Attenuator(20, "mxc")),
        # Continuous drive power summed over all lines, dissipated in the attenuators.
        input_power=lines * 1e-3 * 10 ** (drive_dbm / 10),
    )


# Everything here is linear in the number of lines, so one line tells us how many
# each stage can carry.
print("\nper-line load with -30 dBm of continuous drive, and the line count each stage supports:")
supported = {}
for b in stage_budget(chain_for(1), fridge):
    if b.cooling_power is None or b.load == 0:
        continue
    supported[b.name] = int(b.cooling_power // b.load)
    print(f"  {b.name:11s} {format_si(b.load, 'W'):>10s} per line -> {supported[b.name]} lines")

binding = min(supported, key=supported.get)
n_max = supported[binding]
print(f"the {binding} stage binds first at {n_max} lines")
for lines in (n_max, n_max + 1):
    failed = [b.name for b in stage_budget(chain_for(lines), fridge) if not b.passed]
    print(f"  {lines} lines -> {'pass' if not failed else 'fail at ' + ', '.join(failed)}")

n = attenuation_chain_noise(chain_for(1), fridge, 6e9, 300.0)
print(f"\nthermal photons reaching the chip on a drive line: {n:.2e}")

amps = [Amplifier(20, 0.3, "twpa"), Amplifier(40, 4.0, "hemt"), Amplifier(30, 300.0, "room")]
print(f"readout system noise: {receiver_noise(amps):.4f} K")
print(f"without the parametric amplifier: {receiver_noise(amps[1:]):.4f} K")
