"""Command-line front end.

Exit codes: 0 no failing findings, 1 at least one failing finding, 2 usage or parse error.
"""
from __future__ import annotations

import argparse
import json
import math
import sys
from pathlib import Path

from . import __version__
from .network import NetworkError
from .report import AnalysisError, SpecError, hygiene_report, load_package_spec, render_report
from .resonance import NoResonanceError, fit_notch, photon_number
from .touchstone import load_network
from .units import UnitError, parse_quantity

SUBCOMMAND_CATEGORIES = {
    "modes": {"box_mode"},
    "ground": {"ground_resonance"},
    "bbq": {"bbq_mode", "t1_budget"},
    "tline": {"transition_reflection", "resonator_q"},
    "fridge": {"thermal_budget", "noise_budget"},
    "report": None,
}


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(2, f"{self.prog}: error: {message}\n")


def _global_flags(suppress: bool) -> argparse.ArgumentParser:
    # The subcommand copy must not overwrite values given before the subcommand name.
    default = (lambda v: argparse.SUPPRESS) if suppress else (lambda v: v)
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--spec", type=Path, default=default(None), help="package specification (YAML/JSON)")
    common.add_argument("--format", choices=("text", "machine"), default=default("text"))
    common.add_argument("--out", type=Path, default=default(None), help="write output here instead of stdout")
    return common


def _build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="qubitpack", description=__doc__.splitlines()[0], parents=[_global_flags(False)])
    common = _global_flags(True)
    parser.add_argument("--version", action="version", version=f"qubitpack {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    helps = {
        "modes": "box-mode check of every cavity",
        "ground": "chip-to-package ground resonances",
        "bbq": "admittance fits, environment modes and T1 limits",
        "tline": "TSV transition reflection and resonator loss budgets",
        "fridge": "stage heat loads and drive-line thermal photons",
        "report": "full hygiene report",
    }
    for name, text in helps.items():
        sub.add_parser(name, help=text, parents=[common])
    fit = sub.add_parser("fitres", help="fit a notch-resonator S21 trace", parents=[common])
    fit.add_argument("trace", type=Path, help="CSV (freq_hz,re,im) or Touchstone file")
    fit.add_argument("--port", default="21", help="S-parameter to fit from a Touchstone file (default 21)")
    fit.add_argument("--power", help="drive power for a photon-number estimate, e.g. '-110 dBm'")
    return parser


def _emit(text: str, out: Path | None):
    if out is None:
        sys.stdout.write(text)
    else:
        out.write_text(text, encoding="utf-8")


def _fitres(args) -> int:
    resp = load_network(args.trace)
    if resp.port_count == 1:
        trace = resp.entry(0, 0)
    else:
        i, j = int(args.port[0]) - 1, int(args.port[1]) - 1
        trace = resp.entry(i, j)
    res = fit_notch(resp.freqs, trace)
    doc = {
        "f0_hz": res.f0, "Qi": res.Qi, "Qc": res.Qc, "Ql": res.Ql, "phi_rad": res.phi,
        "residual": res.residual, "delay_flag": res.delay_flag,
    }
    if args.power:
        p = parse_quantity(args.power, "W", "--power")
        doc["photon_number"] = photon_number(p, res.f0, res.Ql, res.Qc)
    if args.format == "machine":
        text = json.dumps({k: (str(v) if isinstance(v, float) and not math.isfinite(v) else v)
                           for k, v in doc.items()}, sort_keys=True, indent=2) + "\n"
    else:
        text = "".join(f"{k:<14} {v:.9g}\n" if isinstance(v, float) else f"{k:<14} {v}\n" for k, v in doc.items())
    _emit(text, args.out)
    return 0


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "fitres":
            return _fitres(args)
        if args.spec is None:
            parser.error(f"{args.command} requires --spec")
        spec = load_package_spec(args.spec)
        report = hygiene_report(spec, SUBCOMMAND_CATEGORIES[args.command])
        _emit(render_report(report, args.format), args.out)
        return 1 if report.status == "fail" else 0
    except (SpecError, UnitError, NetworkError, NoResonanceError, OSError) as exc:
        print(f"qubitpack: error: {exc}", file=sys.stderr)
        return 2
    except (AnalysisError, ValueError) as exc:
        print(f"qubitpack: analysis error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
