"""Whole-package hygiene report from a spec file, as the command-line tool runs it.

Equivalent shell commands:

    qubitpack report --spec demos/specs/wirebond_package.yaml
    qubitpack report --spec demos/specs/full_package.yaml --format machine --out report.json
"""
from pathlib import Path

from qubitpack.report import hygiene_report, load_package_spec, render_report

specs = Path(__file__).parent / "specs"

# Same chip twice: a single wirebond to ground puts the ground mode inside the band,
# four TSVs push it far above.
for name in ("wirebond_package.yaml", "tsv_package.yaml"):
    report = hygiene_report(load_package_spec(specs / name))
    print(f"== {name}")
    print(render_report(report, "text"))

# A fuller package with box modes, a via transition, a resonator loss budget, a
# simulated qubit-port admittance and the fridge wiring.
report = hygiene_report(load_package_spec(specs / "full_package.yaml"))
print("== full_package.yaml")
print(render_report(report, "text"))
print("machine summary:", report.summary)
