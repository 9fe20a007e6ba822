"""Readers for Touchstone v1 files and the ``freq_hz,re,im`` CSV layout."""
from __future__ import annotations

import csv
import math
import re
from pathlib import Path

import numpy as np

from .network import FrequencyResponse, NetworkError

FREQ_UNITS = {"HZ": 1.0, "KHZ": 1e3, "MHZ": 1e6, "GHZ": 1e9}
PARAM_TYPES = {"S": "S", "Y": "Y", "Z": "Z"}
FORMATS = ("MA", "DB", "RI")

_EXT = re.compile(r"\.([syz])(\d+)p$", re.IGNORECASE)


class TouchstoneError(NetworkError):
    def __init__(self, message, path=None, line=None):
        where = ""
        if path is not None:
            where = f"{path}"
            if line is not None:
                where += f":{line}"
            where += ": "
        super().__init__(where + message)
        self.line = line


def _parse_option_line(tokens, path, lineno):
    unit, param, fmt, z_ref = "GHZ", "S", "MA", 50.0
    i = 0
    while i < len(tokens):
        tok = tokens[i].upper()
        if tok in FREQ_UNITS:
            unit = tok
        elif tok in FORMATS:
            fmt = tok
        elif tok == "R":
            if i + 1 >= len(tokens):
                raise TouchstoneError("option line: 'R' without reference impedance", path, lineno)
            try:
                z_ref = float(tokens[i + 1])
            except ValueError:
                raise TouchstoneError(f"option line: bad reference impedance {tokens[i + 1]!r}", path, lineno)
            if not z_ref > 0:
                raise TouchstoneError("option line: reference impedance must be positive", path, lineno)
            i += 1
        elif tok in PARAM_TYPES:
            param = PARAM_TYPES[tok]
        elif len(tok) == 1 and tok.isalpha():
            raise TouchstoneError(f"option line: unknown parameter type {tokens[i]!r}", path, lineno)
        else:
            raise TouchstoneError(f"option line: unrecognized token {tokens[i]!r}", path, lineno)
        i += 1
    return FREQ_UNITS[unit], param, fmt, z_ref


def _pairs_to_complex(values, fmt):
    a, b = values[0::2], values[1::2]
    if fmt == "RI":
        return a + 1j * b
    if fmt == "MA":
        return a * np.exp(1j * np.deg2rad(b))
    return 10.0 ** (a / 20.0) * np.exp(1j * np.deg2rad(b))


def load_touchstone(path, port_count: int | None = None) -> FrequencyResponse:
    """Read a Touchstone v1 file.

    The port count comes from the ``.sNp``/``.yNp``/``.zNp`` extension unless given.
    Y and Z data are stored normalized to the reference impedance in v1 files and are
    de-normalized here. Two-port rows follow the v1 order N11 N21 N12 N22.
    """
    path = Path(path)
    if port_count is None:
        m = _EXT.search(path.name)
        if m is None:
            raise TouchstoneError("cannot infer port count from file extension; pass port_count", path)
        port_count = int(m.group(2))
    if port_count < 1:
        raise TouchstoneError("port count must be >= 1", path)
    n_values = 1 + 2 * port_count * port_count

    option = None
    records = []  # (lineno, values)
    pending, pending_line = [], None
    with open(path, encoding="utf-8", errors="replace") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.split("!", 1)[0].strip()
            if not line:
                continue
            if line.startswith("["):
                raise TouchstoneError(
                    f"Touchstone v2 keyword {line.split()[0]!r} found; only v1 files are supported", path, lineno
                )
            if line.startswith("#"):
                if option is not None:
                    raise TouchstoneError("duplicate option line", path, lineno)
                option = _parse_option_line(line[1:].split(), path, lineno)
                continue
            try:
                vals = [float(t) for t in line.split()]
            except ValueError as exc:
                raise TouchstoneError(f"non-numeric data: {exc}", path, lineno)
            if port_count <= 2:
                if len(vals) != n_values:
                    raise TouchstoneError(
                        f"expected {n_values} columns for a {port_count}-port file, got {len(vals)}", path, lineno
                    )
                records.append((lineno, vals))
                continue
            # Three or more ports: a record may wrap over several lines.
            if not pending:
                pending_line = lineno
            pending.extend(vals)
            if len(pending) > n_values:
                raise TouchstoneError(
                    f"record starting at line {pending_line} has too many values ({len(pending)} > {n_values})",
                    path,
                    lineno,
                )
            if len(pending) == n_values:
                records.append((pending_line, pending))
                pending = []
    if pending:
        raise TouchstoneError(f"incomplete final record ({len(pending)} of {n_values} values)", path, pending_line)
    if option is None:
        option = _parse_option_line([], path, None)
    scale, param, fmt, z_ref = option
    if not records:
        raise TouchstoneError("no data records", path)

    freqs = np.empty(len(records))
    data = np.empty((len(records), port_count, port_count), dtype=complex)
    prev = -math.inf
    for k, (lineno, vals) in enumerate(records):
        f = vals[0] * scale
        if not f > prev:
            raise TouchstoneError("frequency column is not strictly increasing", path, lineno)
        if not f > 0:
            raise TouchstoneError("frequency must be positive", path, lineno)
        prev = f
        freqs[k] = f
        entries = _pairs_to_complex(np.asarray(vals[1:]), fmt)
        mat = entries.reshape(port_count, port_count)
        if port_count == 2:
            mat = mat.T  # v1 two-port order is 11 21 12 22
        data[k] = mat
    if param == "Z":
        data = data * z_ref
    elif param == "Y":
        data = data / z_ref
    return FrequencyResponse(freqs, data, param, z_ref)


def load_csv(path, representation: str = "S", z_ref: float = 50.0) -> FrequencyResponse:
    """Read a CSV whose header starts with ``freq_hz`` followed by re/im column pairs.

    Matrix entries are laid out row-major; the port count is the square root of the
    number of pairs.
    """
    path = Path(path)
    with open(path, newline="", encoding="utf-8") as fh:
        rows = [r for r in csv.reader(fh) if r and not r[0].lstrip().startswith("#")]
    if not rows:
        raise NetworkError(f"{path}: empty CSV")
    header = [h.strip().lower() for h in rows[0]]
    if header[0] != "freq_hz":
        raise NetworkError(f"{path}:1: CSV header must start with 'freq_hz'")
    n_pairs = (len(header) - 1) // 2
    n = int(round(math.sqrt(n_pairs)))
    if (len(header) - 1) % 2 or n * n != n_pairs or n == 0:
        raise NetworkError(f"{path}:1: header needs one re/im pair per matrix entry, got {len(header) - 1} columns")
    for k in range(n_pairs):
        re_h, im_h = header[1 + 2 * k], header[2 + 2 * k]
        if not (re_h.startswith("re") and im_h.startswith("im")):
            raise NetworkError(f"{path}:1: expected re/im column pair, got {re_h!r}, {im_h!r}")
    freqs, data = [], []
    for lineno, row in enumerate(rows[1:], start=2):
        if len(row) != len(header):
            raise NetworkError(f"{path}:{lineno}: expected {len(header)} columns, got {len(row)}")
        try:
            vals = np.array([float(v) for v in row])
        except ValueError as exc:
            raise NetworkError(f"{path}:{lineno}: {exc}")
        if freqs and not vals[0] > freqs[-1]:
            raise NetworkError(f"{path}:{lineno}: frequency column is not strictly increasing")
        freqs.append(vals[0])
        data.append((vals[1::2] + 1j * vals[2::2]).reshape(n, n))
    return FrequencyResponse(np.array(freqs), np.array(data), representation, z_ref)


def load_network(path, representation: str = "S", z_ref: float = 50.0) -> FrequencyResponse:
    """Dispatch on extension: ``.csv`` goes to :func:`load_csv`, anything else to Touchstone."""
    path = Path(path)
    if path.suffix.lower() == ".csv":
        return load_csv(path, representation, z_ref)
    return load_touchstone(path)
