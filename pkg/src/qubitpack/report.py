"""Package specification documents and the hygiene report built from them.

A package spec is a YAML (or JSON) mapping; every dimensional field is a string
with a unit suffix (``"10 mm"``, ``"2.21 pF"``, ``"6 GHz"``) or a bare SI number.
See the README for the full schema.
"""
from __future__ import annotations

import hashlib
import json
import math
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Any

import numpy as np
import yaml

from . import __version__
from .fridge import (
    Amplifier, Attenuator, CableSegment, FridgeSpec, Material, Stage, WiringChain,
    attenuation_chain_noise, load_materials, receiver_noise, stage_budget,
)
from .spurious import (
    Bump, CavitySpec, GroundingSpec, Tsv, Wirebond, ground_inductance, ground_resonance, lowest_mode,
    modes_below,
)
from .synthesis import extract_modes, t1_estimate, vector_fit
from .tline import (
    DielectricLoss, ResonatorSpec, SeriesResistance, ShuntConductance, q_contribution,
    quarter_wave_frequency, resonator_q, tsv_transition_reflection,
)
from .touchstone import load_network
from .units import UnitError, format_si, parse_db, parse_quantity

SEVERITIES = ("info", "warn", "fail")
CATEGORIES = (
    "box_mode", "ground_resonance", "transition_reflection", "bbq_mode", "t1_budget",
    "thermal_budget", "noise_budget", "resonator_q",
)


class SpecError(ValueError):
    """Malformed package specification."""


class AnalysisError(RuntimeError):
    """A module failed while analysing a labelled spec element."""


@dataclass(frozen=True)
class Thresholds:
    reflection_db: float = -30.0
    t1: float = 20e-6
    noise_photons: float = 1e-3
    fit_tol: float = 1e-3


@dataclass(frozen=True)
class Transition:
    series_L: float
    shunt_C: float
    z_ref: float = 50.0


@dataclass(frozen=True)
class AdmittanceSource:
    path: Path
    qubit_capacitance: float
    qubit_frequency: float | None = None
    representation: str = "Y"


@dataclass(frozen=True)
class ResonatorEntry:
    spec: ResonatorSpec
    background_q: float = math.inf


@dataclass(frozen=True)
class WiringSettings:
    chain: WiringChain
    frequency: float
    input_temperature: float = 300.0


@dataclass(frozen=True)
class PackageSpec:
    qubit_band: tuple[float, float]
    guard_margin: float = 500e6
    thresholds: Thresholds = Thresholds()
    cavities: tuple[tuple[str, CavitySpec], ...] = ()
    grounding: tuple[tuple[str, GroundingSpec], ...] = ()
    resonators: tuple[tuple[str, ResonatorEntry], ...] = ()
    transitions: tuple[tuple[str, Transition], ...] = ()
    admittance_files: tuple[tuple[str, AdmittanceSource], ...] = ()
    fridge: FridgeSpec | None = None
    wiring: WiringSettings | None = None
    digest: str = field(default="", compare=False)

    @property
    def guarded_band(self) -> tuple[float, float]:
        lo, hi = self.qubit_band
        return max(lo - self.guard_margin, 0.0), hi + self.guard_margin


# ---------------------------------------------------------------- spec parsing

class _Node:
    """A mapping plus its dotted location, for error messages."""

    def __init__(self, data, path):
        if not isinstance(data, dict):
            raise SpecError(f"{path or 'document'}: expected a mapping")
        self.data = data
        self.path = path

    def _where(self, key):
        return f"{self.path}.{key}" if self.path else key

    def has(self, key):
        return key in self.data and self.data[key] is not None

    def raw(self, key, default=...):
        if not self.has(key):
            if default is ...:
                raise SpecError(f"missing required field {key!r} at {self._where(key)}")
            return default
        return self.data[key]

    def qty(self, key, unit, default=...):
        if not self.has(key) and default is not ...:
            return default
        v = self.raw(key)
        try:
            return parse_quantity(v, unit, self._where(key))
        except UnitError as exc:
            raise SpecError(str(exc)) from None

    def db(self, key, default=...):
        if not self.has(key) and default is not ...:
            return default
        v = self.raw(key)
        try:
            return parse_db(v, self._where(key))
        except UnitError as exc:
            raise SpecError(str(exc)) from None

    def num(self, key, default=...):
        if not self.has(key) and default is not ...:
            return default
        v = self.raw(key)
        if isinstance(v, str):
            try:
                return float(v)
            except ValueError:
                raise SpecError(f"{self._where(key)}: expected a number, got {v!r}") from None
        if isinstance(v, bool) or not isinstance(v, (int, float)):
            raise SpecError(f"{self._where(key)}: expected a number, got {v!r}")
        return float(v)

    def items(self, key):
        v = self.raw(key, [])
        if not isinstance(v, list):
            raise SpecError(f"{self._where(key)}: expected a list")
        return [_Node(x, f"{self._where(key)}[{i}]") for i, x in enumerate(v)]

    def child(self, key):
        return _Node(self.raw(key), self._where(key))


def _labelled(nodes, section):
    seen = set()
    for node in nodes:
        label = str(node.raw("label"))
        if label in seen:
            raise SpecError(f"{section}: duplicate label {label!r}")
        seen.add(label)
        yield label, node


def _strategy(node: _Node):
    kind = str(node.raw("type")).lower()
    count = int(node.num("count", 1))
    if kind == "wirebond":
        return Wirebond(node.qty("length", "m"), count, node.num("nh_per_mm", 1.0))
    if kind == "bump":
        return Bump(node.qty("inductance", "H"), count)
    if kind == "tsv":
        return Tsv(node.qty("inductance", "H"), count)
    raise SpecError(f"{node.path}.type: unknown grounding strategy {kind!r}")


def _loss(node: _Node):
    kind = str(node.raw("kind"))
    if kind == "series_resistance":
        return SeriesResistance(node.qty("value", "Ohm"), node.qty("position", "m"))
    if kind == "shunt_conductance":
        return ShuntConductance(node.qty("value", "S"), node.qty("position", "m"))
    if kind == "dielectric":
        return DielectricLoss(node.num("participation"), node.num("tan_delta"), node.qty("position", "m", 0.0))
    raise SpecError(f"{node.path}.kind: unknown loss kind {kind!r}")


def _wrap(path, fn):
    try:
        return fn()
    except SpecError:
        raise
    except (ValueError, KeyError, TypeError) as exc:
        raise SpecError(f"{path}: {exc}") from None


def parse_package_spec(doc: Any, base_dir: Path | str = ".", digest: str = "") -> PackageSpec:
    """Build a :class:`PackageSpec` from an already-decoded document."""
    base_dir = Path(base_dir)
    root = _Node(doc, "")
    band = root.raw("qubit_band")
    if not isinstance(band, list) or len(band) != 2:
        raise SpecError("qubit_band: expected [f_lo, f_hi]")
    f_lo = _wrap("qubit_band[0]", lambda: parse_quantity(band[0], "Hz", "qubit_band[0]"))
    f_hi = _wrap("qubit_band[1]", lambda: parse_quantity(band[1], "Hz", "qubit_band[1]"))
    if not 0 < f_lo < f_hi:
        raise SpecError("qubit_band: need 0 < f_lo < f_hi")
    guard = root.qty("guard_margin", "Hz", 500e6)

    th = Thresholds()
    if root.has("thresholds"):
        t = root.child("thresholds")
        th = Thresholds(
            reflection_db=t.db("reflection", th.reflection_db),
            t1=t.qty("t1", "s", th.t1),
            noise_photons=t.num("noise_photons", th.noise_photons),
            fit_tol=t.num("fit_tol", th.fit_tol),
        )

    cavities = tuple(
        (label, _wrap(n.path, lambda n=n: CavitySpec(n.qty("a", "m"), n.qty("b", "m"), n.qty("d", "m"), n.num("eps_r", 1.0))))
        for label, n in _labelled(root.items("cavities"), "cavities")
    )

    grounding = []
    for label, n in _labelled(root.items("grounding"), "grounding"):
        strat = _wrap(f"{n.path}.strategy", lambda: _strategy(n.child("strategy")))
        if n.has("capacitance"):
            g = _wrap(n.path, lambda: GroundingSpec(0.0, 0.0, strat, n.num("eps_r", 1.0), n.qty("capacitance", "F")))
        else:
            g = _wrap(n.path, lambda: GroundingSpec(n.qty("overlap_area", "m2"), n.qty("gap", "m"), strat, n.num("eps_r", 1.0)))
        grounding.append((label, g))

    resonators = []
    for label, n in _labelled(root.items("resonators"), "resonators"):
        losses = tuple(_wrap(x.path, lambda x=x: _loss(x)) for x in n.items("losses"))
        spec = _wrap(n.path, lambda: ResonatorSpec(n.qty("z0", "Ohm", 50.0), n.num("eps_eff"), n.qty("length", "m"), losses))
        resonators.append((label, ResonatorEntry(spec, n.num("background_q", math.inf))))

    transitions = []
    for label, n in _labelled(root.items("transitions"), "transitions"):
        tr = Transition(n.qty("series_L", "H", 0.0), n.qty("shunt_C", "F", 0.0), n.qty("z_ref", "Ohm", 50.0))
        if tr.series_L < 0 or tr.shunt_C < 0 or tr.z_ref <= 0:
            raise SpecError(f"{n.path}: series_L and shunt_C must be >= 0 and z_ref > 0")
        transitions.append((label, tr))

    admittances = []
    for label, n in _labelled(root.items("admittance_files"), "admittance_files"):
        p = Path(str(n.raw("path")))
        if not p.is_absolute():
            p = base_dir / p
        if not p.is_file():
            raise SpecError(f"{n.path}.path: file not found: {p}")
        f_q = n.qty("qubit_frequency", "Hz", None)
        admittances.append(
            (label, AdmittanceSource(p, n.qty("qubit_capacitance", "F"), f_q, str(n.raw("representation", "Y"))))
        )

    fridge = None
    if root.has("fridge"):
        fnode = root.child("fridge")
        stages = tuple(
            Stage(str(s.raw("name")), s.qty("temperature", "K"), s.qty("cooling_power", "W", None))
            for s in fnode.items("stages")
        )
        fridge = _wrap(fnode.path, lambda: FridgeSpec(stages))

    wiring = None
    if root.has("wiring"):
        if fridge is None:
            raise SpecError("wiring: requires a fridge section")
        wiring = _parse_wiring(root.child("wiring"), fridge, base_dir)

    return PackageSpec(
        qubit_band=(f_lo, f_hi),
        guard_margin=guard,
        thresholds=th,
        cavities=cavities,
        grounding=tuple(grounding),
        resonators=tuple(resonators),
        transitions=tuple(transitions),
        admittance_files=tuple(admittances),
        fridge=fridge,
        wiring=wiring,
        digest=digest,
    )


def _parse_wiring(w: _Node, fridge: FridgeSpec, base_dir: Path) -> WiringSettings:
    materials = load_materials()
    if w.has("materials_file"):
        p = Path(str(w.raw("materials_file")))
        materials.update(load_materials(p if p.is_absolute() else base_dir / p))
    for m in w.items("materials"):
        mat = _wrap(m.path, lambda: Material(str(m.raw("name")), m.num("a"), m.num("b"), m.qty("t_min", "K"), m.qty("t_max", "K")))
        materials[mat.name] = mat

    cables = []
    for n in w.items("cables"):
        name = str(n.raw("material"))
        if name not in materials:
            raise SpecError(f"{n.path}.material: unknown material {name!r}")
        stage = str(n.raw("from"))
        _wrap(f"{n.path}.from", lambda: fridge.index(stage))
        cables.append(
            _wrap(n.path, lambda: CableSegment(materials[name], n.qty("area", "m2"), n.qty("length", "m"), stage, int(n.num("count", 1))))
        )
    attenuators = []
    for n in w.items("attenuators"):
        stage = str(n.raw("stage"))
        _wrap(f"{n.path}.stage", lambda: fridge.index(stage))
        attenuators.append(_wrap(n.path, lambda: Attenuator(n.db("attenuation"), stage)))
    amplifiers = tuple(
        Amplifier(n.db("gain"), n.qty("noise_temperature", "K"), str(n.raw("name", ""))) for n in w.items("amplifiers")
    )
    chain = WiringChain(tuple(cables), tuple(attenuators), amplifiers, w.qty("input_power", "W", None))
    return WiringSettings(chain, w.qty("frequency", "Hz", 6e9), w.qty("input_temperature", "K", 300.0))


def load_package_spec(path) -> PackageSpec:
    """Read and validate a package spec file; all quantities come back in SI units."""
    path = Path(path)
    try:
        raw = path.read_bytes()
    except OSError as exc:
        raise SpecError(f"cannot read spec {path}: {exc}") from None
    try:
        doc = yaml.safe_load(raw.decode("utf-8"))
    except yaml.YAMLError as exc:
        raise SpecError(f"{path}: not a valid YAML/JSON document: {exc}") from None
    if doc is None:
        doc = {}
    return parse_package_spec(doc, path.parent, hashlib.sha256(raw).hexdigest())


# ---------------------------------------------------------------- findings

@dataclass(frozen=True)
class Finding:
    """One report line.

    ``comparison`` says how ``value`` is judged against ``threshold``: ``outside``
    (value must lie outside the [lo, hi] band), ``max`` (value must not exceed),
    ``min`` (value must not fall below) or ``none``.
    """

    severity: str
    source: str
    category: str
    value: float
    unit: str
    threshold: Any
    comparison: str
    message: str

    def violates(self) -> bool:
        if self.comparison == "outside":
            lo, hi = self.threshold
            return lo <= self.value <= hi
        if self.comparison == "max":
            return self.value > self.threshold
        if self.comparison == "min":
            return self.value < self.threshold
        return False


def _judged(category, source, value, unit, threshold, comparison, ok_msg, bad_msg):
    f = Finding("info", source, category, float(value), unit, threshold, comparison, ok_msg)
    if f.violates():
        f = Finding("fail", source, category, float(value), unit, threshold, comparison, bad_msg)
    return f


@dataclass(frozen=True)
class Report:
    findings: tuple[Finding, ...]
    spec_digest: str = ""
    tool_version: str = __version__

    @property
    def status(self) -> str:
        return "fail" if any(f.severity == "fail" for f in self.findings) else "pass"

    @property
    def summary(self) -> dict:
        counts = {s: sum(f.severity == s for f in self.findings) for s in SEVERITIES}
        return {"status": self.status, "counts": counts}


def _band_text(band):
    return f"{format_si(band[0], 'Hz')} to {format_si(band[1], 'Hz')}"


def _box_findings(spec: PackageSpec):
    band = spec.guarded_band
    out = []
    for label, cav in spec.cavities:
        modes = modes_below(cav, band[1])
        hits = [m for m in modes if band[0] <= m.frequency <= band[1]]
        for m in hits:
            out.append(Finding(
                "fail", label, "box_mode", m.frequency, "Hz", list(band), "outside",
                f"box mode {m.name} at {format_si(m.frequency, 'Hz')} inside guarded qubit band {_band_text(band)}",
            ))
        if not hits:
            low = modes[0] if modes else lowest_mode(cav)
            out.append(Finding(
                "info", label, "box_mode", low.frequency, "Hz", list(band), "outside",
                f"lowest box mode {low.name} at {format_si(low.frequency, 'Hz')}; none inside {_band_text(band)}",
            ))
    return out


def _ground_findings(spec: PackageSpec):
    band = spec.guarded_band
    out = []
    for label, g in spec.grounding:
        f = ground_resonance(g)
        L, C = ground_inductance(g.strategy), g.ground_capacitance()
        detail = f"L = {format_si(L, 'H')}, C = {format_si(C, 'F')}"
        out.append(_judged(
            "ground_resonance", label, f, "Hz", list(band), "outside",
            f"ground resonance {format_si(f, 'Hz')} outside guarded band ({detail})",
            f"ground resonance {format_si(f, 'Hz')} inside guarded band {_band_text(band)} ({detail})",
        ))
    return out


def _transition_findings(spec: PackageSpec):
    lo, hi = spec.guarded_band
    freqs = np.linspace(max(lo, 1.0), hi, 201)
    out = []
    for label, tr in spec.transitions:
        worst = float(np.max(tsv_transition_reflection(tr.series_L, tr.shunt_C, tr.z_ref, freqs)))
        th = spec.thresholds.reflection_db
        out.append(_judged(
            "transition_reflection", label, worst, "dB", th, "max",
            f"worst in-band reflection {worst:.2f} dB meets {th:g} dB",
            f"worst in-band reflection {worst:.2f} dB exceeds {th:g} dB",
        ))
    return out


def _bbq_findings(spec: PackageSpec):
    band = spec.guarded_band
    out = []
    for label, src in spec.admittance_files:
        try:
            resp = load_network(src.path, representation=src.representation)
            model = vector_fit(resp, order="auto", tol=spec.thresholds.fit_tol)
            fit_band = (float(resp.freqs[0]), float(resp.freqs[-1]))
            modes = extract_modes(model, fit_band)
            f_q = src.qubit_frequency if src.qubit_frequency is not None else 0.5 * sum(spec.qubit_band)
            # Re Y at the qubit port is often far below the fit tolerance relative to |Y|,
            # so the loss is read from the tabulated data rather than from the model.
            t1 = t1_estimate(src.qubit_capacitance, resp, f_q)
        except (ValueError, RuntimeError) as exc:
            raise AnalysisError(f"admittance_files[{label}]: {exc}") from exc
        for m in modes:
            inside = band[0] <= m.frequency <= band[1]
            q = "inf" if math.isinf(m.quality_factor) else f"{m.quality_factor:.4g}"
            t1_mode = (
                math.inf if math.isinf(m.quality_factor)
                else m.quality_factor / (2 * math.pi * m.frequency)
            )
            out.append(Finding(
                "warn" if inside else "info", label, "bbq_mode", m.frequency, "Hz", None, "none",
                f"environment mode at {format_si(m.frequency, 'Hz')}, Q = {q}, "
                f"C_eff = {format_si(m.effective_capacitance, 'F')}, mode lifetime {format_si(t1_mode, 's')}"
                + (" (inside guarded qubit band)" if inside else ""),
            ))
        if not modes:
            out.append(Finding(
                "info", label, "bbq_mode", 0.0, "Hz", None, "none",
                f"analyzed, no environment modes in {_band_text(fit_band)} (fit order {model.order})",
            ))
        th = spec.thresholds.t1
        out.append(_judged(
            "t1_budget", label, t1, "s", th, "min",
            f"T1 limit {format_si(t1, 's')} at {format_si(f_q, 'Hz')} meets {format_si(th, 's')}",
            f"T1 limit {format_si(t1, 's')} at {format_si(f_q, 'Hz')} below {format_si(th, 's')}",
        ))
    return out


def _resonator_findings(spec: PackageSpec):
    out = []
    for label, entry in spec.resonators:
        f0 = quarter_wave_frequency(entry.spec)
        q = resonator_q(entry.spec, entry.background_q)
        parts = ", ".join(f"{type(el).__name__}@{format_si(el.position, 'm')}: Q={q_contribution(entry.spec, el):.4g}"
                          for el in entry.spec.losses)
        out.append(Finding(
            "info", label, "resonator_q", q, "", None, "none",
            f"f0 = {format_si(f0, 'Hz')}, composite Q = {q:.4g}" + (f" ({parts})" if parts else ""),
        ))
    return out


def _fridge_findings(spec: PackageSpec):
    if spec.fridge is None:
        return []
    out = []
    chain = spec.wiring.chain if spec.wiring else WiringChain()
    try:
        budgets = stage_budget(chain, spec.fridge)
    except ValueError as exc:
        raise AnalysisError(f"wiring: {exc}") from exc
    for b in budgets:
        if b.cooling_power is None:
            out.append(Finding(
                "info", b.name, "thermal_budget", b.load, "W", None, "none",
                f"load {format_si(b.load, 'W')} on stage without a cooling-power limit",
            ))
            continue
        out.append(_judged(
            "thermal_budget", b.name, b.load, "W", b.cooling_power, "max",
            f"load {format_si(b.load, 'W')} within cooling power {format_si(b.cooling_power, 'W')}",
            f"load {format_si(b.load, 'W')} exceeds cooling power {format_si(b.cooling_power, 'W')}",
        ))
    if spec.wiring is not None:
        w = spec.wiring
        n = attenuation_chain_noise(w.chain, spec.fridge, w.frequency, w.input_temperature)
        th = spec.thresholds.noise_photons
        out.append(_judged(
            "noise_budget", "drive_line", n, "photons", th, "max",
            f"thermal photons at chip {n:.3g} at {format_si(w.frequency, 'Hz')} within {th:g}",
            f"thermal photons at chip {n:.3g} at {format_si(w.frequency, 'Hz')} exceed {th:g}",
        ))
        if w.chain.amplifiers:
            t_sys = receiver_noise(w.chain.amplifiers)
            out.append(Finding(
                "info", "readout_chain", "noise_budget", t_sys, "K", None, "none",
                f"receiver system noise temperature {format_si(t_sys, 'K')}",
            ))
    return out


def hygiene_report(spec: PackageSpec, categories=None) -> Report:
    """Run every applicable check on ``spec``; ``categories`` restricts the output."""
    findings = []
    for fn in (_box_findings, _ground_findings, _transition_findings, _bbq_findings,
               _resonator_findings, _fridge_findings):
        findings.extend(fn(spec))
    if categories is not None:
        findings = [f for f in findings if f.category in categories]
    findings.sort(key=lambda f: (f.category, f.source))
    return Report(tuple(findings), spec.digest)


# ---------------------------------------------------------------- rendering

def _encode(x):
    if isinstance(x, float) and not math.isfinite(x):
        return "inf" if x > 0 else ("-inf" if x < 0 else "nan")
    if isinstance(x, (list, tuple)):
        return [_encode(v) for v in x]
    return x


def _decode(x):
    if isinstance(x, str) and x in ("inf", "-inf", "nan"):
        return float(x)
    if isinstance(x, list):
        return [_decode(v) for v in x]
    return x


def report_to_dict(report: Report) -> dict:
    return {
        "tool_version": report.tool_version,
        "spec_digest": report.spec_digest,
        "findings": [{k: _encode(v) for k, v in asdict(f).items()} for f in report.findings],
        "summary": report.summary,
    }


def report_from_dict(doc: dict) -> Report:
    findings = tuple(Finding(**{k: _decode(v) for k, v in f.items()}) for f in doc["findings"])
    return Report(findings, doc.get("spec_digest", ""), doc.get("tool_version", __version__))


def _value_text(f: Finding) -> str:
    if f.unit in ("Hz", "s", "W", "K", "F", "H"):
        return format_si(f.value, f.unit)
    if f.unit == "dB":
        return f"{f.value:.2f} dB"
    return f"{f.value:.4g} {f.unit}".strip()


def render_report(report: Report, fmt: str = "text") -> str:
    """``text``: one line per finding plus a summary line. ``machine``: sorted-key JSON."""
    if fmt == "machine":
        return json.dumps(report_to_dict(report), sort_keys=True, indent=2, ensure_ascii=False, allow_nan=False) + "\n"
    if fmt != "text":
        raise ValueError(f"unknown format {fmt!r}")
    lines = [
        f"{f.severity.upper():<4}  {f.category:<21}  {f.source:<16}  {_value_text(f):>14}  {f.message}"
        for f in report.findings
    ]
    c = report.summary["counts"]
    lines.append(f"SUMMARY  {report.status}  ({c['fail']} fail, {c['warn']} warn, {c['info']} info)")
    return "\n".join(lines) + "\n"


def parse_machine_report(text: str) -> Report:
    return report_from_dict(json.loads(text))
