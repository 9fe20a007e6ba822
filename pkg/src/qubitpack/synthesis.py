"""Linear black-box analysis of a one-port admittance.

The admittance seen by a qubit is fitted to a stable pole-residue model,

    Y(s) = sum_k r_k / (s - p_k) + d + s*e + k_L / s,

realized as a Foster bank of shunt branches, and interrogated for its resonances
(Im Y = 0 with positive slope), their quality factors and effective capacitances,
and the T1 limit it imposes on a qubit of given capacitance.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .network import FrequencyResponse, convert_network

MAX_ORDER = 20


class FitError(RuntimeError):
    """Vector fit failed to reach the requested accuracy."""


class FosterError(ValueError):
    """Model cannot be mapped onto the Foster branch topology."""


class PassivityError(ValueError):
    """Negative real admittance where a passive environment is required."""


@dataclass(frozen=True, eq=False)
class RationalModel:
    """Pole-residue admittance model.

    Complex poles are stored in conjugate pairs, positive imaginary part first.
    ``inductive_term`` is the residue of a pole at s = 0 (1/H), kept separate from
    ``poles`` so that the DC path of a shunt inductor is not mistaken for an
    overdamped branch.
    """

    poles: np.ndarray
    residues: np.ndarray
    direct_term: float = 0.0
    capacitive_term: float = 0.0
    inductive_term: float = 0.0
    rms_error: float = 0.0
    fit_band: tuple[float, float] | None = None

    def __post_init__(self):
        p = np.atleast_1d(np.asarray(self.poles, dtype=complex))
        r = np.atleast_1d(np.asarray(self.residues, dtype=complex))
        if p.shape != r.shape:
            raise ValueError("poles and residues must have the same length")
        if np.any(p.real > 0):
            raise ValueError("unstable pole(s): " + ", ".join(f"{x:.6g}" for x in p[p.real > 0]))
        if not _conjugate_closed(p, r):
            raise ValueError("complex poles and residues must occur in conjugate pairs")
        object.__setattr__(self, "poles", p)
        object.__setattr__(self, "residues", r)

    @property
    def order(self) -> int:
        return self.poles.size

    def admittance_s(self, s):
        s = np.asarray(s, dtype=complex)
        y = self.direct_term + s * self.capacitive_term
        if self.inductive_term:
            y = y + self.inductive_term / s
        for p, r in zip(self.poles, self.residues):
            y = y + r / (s - p)
        return y

    def admittance(self, freqs):
        """Y(j 2 pi f)."""
        return self.admittance_s(2j * np.pi * np.asarray(freqs, dtype=float))

    def d_admittance_d_omega(self, freqs):
        """dY/d(omega) = j dY/ds, evaluated analytically."""
        s = 2j * np.pi * np.asarray(freqs, dtype=float)
        dyds = self.capacitive_term + 0j * s
        if self.inductive_term:
            dyds = dyds - self.inductive_term / s**2
        for p, r in zip(self.poles, self.residues):
            dyds = dyds - r / (s - p) ** 2
        return 1j * dyds

    def zeros(self) -> np.ndarray:
        """Roots of the admittance numerator (the resonances of the parallel circuit)."""
        factors = [np.array([1.0, -p]) for p in self.poles]
        if self.inductive_term:
            factors.append(np.array([1.0, 0.0]))

        def prod(fs):
            out = np.array([1.0 + 0j])
            for f in fs:
                out = np.polymul(out, f)
            return out

        num = np.polymul([self.capacitive_term, self.direct_term], prod(factors))
        for i, r in enumerate(self.residues):
            num = np.polyadd(num, r * prod(factors[:i] + factors[i + 1:]))
        if self.inductive_term:
            num = np.polyadd(num, self.inductive_term * prod(factors[:-1]))
        num = np.trim_zeros(np.asarray(num, complex), "f")
        return np.roots(num)


def _conjugate_closed(p, r, tol=1e-9):
    used = np.zeros(p.size, bool)
    for i in range(p.size):
        if used[i]:
            continue
        scale = max(abs(p[i]), 1e-300)
        if abs(p[i].imag) <= tol * scale:
            used[i] = True
            continue
        partners = [
            j for j in range(p.size)
            if not used[j] and j != i and abs(p[j] - np.conj(p[i])) <= tol * scale
            and abs(r[j] - np.conj(r[i])) <= tol * max(abs(r[i]), 1e-300)
        ]
        if not partners:
            return False
        used[i] = used[partners[0]] = True
    return True


def _as_one_port_y(resp: FrequencyResponse) -> FrequencyResponse:
    if resp.port_count != 1:
        raise ValueError(f"expected a one-port admittance, got {resp.port_count} ports")
    return resp if resp.representation == "Y" else convert_network(resp, "Y")


def initial_poles(f_lo: float, f_hi: float, order: int, q: float = 100.0) -> np.ndarray:
    """Log-spaced complex pairs across the band with quality factor ``q``.

    An odd order adds one real pole at minus the geometric band centre.
    """
    n_pairs = order // 2
    poles = []
    if n_pairs:
        w = 2 * np.pi * np.geomspace(f_lo, f_hi, n_pairs)
        for wk in w:
            re = -wk / (2 * q)
            im = wk * math.sqrt(1 - 1 / (4 * q * q))
            poles += [complex(re, im), complex(re, -im)]
    if order % 2:
        poles.insert(0, complex(-2 * np.pi * math.sqrt(f_lo * f_hi), 0.0))
    return np.array(poles, dtype=complex)


def _split(poles):
    """Indices of real poles and of the upper member of each complex pair."""
    real = [i for i, p in enumerate(poles) if p.imag == 0]
    upper = [i for i, p in enumerate(poles) if p.imag > 0]
    return real, upper


def _basis(s, poles):
    """Real-coefficient partial-fraction basis; columns match _split ordering."""
    real, upper = _split(poles)
    cols = [1 / (s - poles[i]) for i in real]
    for i in upper:
        a = poles[i]
        cols.append(1 / (s - a) + 1 / (s - np.conj(a)))
        cols.append(1j / (s - a) - 1j / (s - np.conj(a)))
    if not cols:
        return np.zeros((s.size, 0), complex)
    return np.column_stack(cols)


def _coeffs_to_residues(coef, poles):
    real, upper = _split(poles)
    out_p, out_r = [], []
    k = 0
    for i in real:
        out_p.append(poles[i])
        out_r.append(complex(coef[k]))
        k += 1
    for i in upper:
        r = complex(coef[k], coef[k + 1])
        out_p += [poles[i], np.conj(poles[i])]
        out_r += [r, np.conj(r)]
        k += 2
    return np.array(out_p, complex), np.array(out_r, complex)


def _solve_real(a_cplx, b_cplx, weights):
    """Weighted least squares of a complex system with real unknowns, column-scaled."""
    a = np.vstack([(a_cplx * weights[:, None]).real, (a_cplx * weights[:, None]).imag])
    b = np.concatenate([(b_cplx * weights).real, (b_cplx * weights).imag])
    scale = np.linalg.norm(a, axis=0)
    scale[scale == 0] = 1.0
    x, *_ = np.linalg.lstsq(a / scale, b, rcond=None)
    return x / scale


def _extra_columns(s, inductive):
    cols = [np.ones_like(s), s]
    if inductive:
        cols.append(1 / s)
    return np.column_stack(cols)


def _relocate(s, y, w, poles, inductive):
    phi = _basis(s, poles)
    extra = _extra_columns(s, inductive)
    a = np.hstack([phi, extra, -y[:, None] * phi])
    x = _solve_real(a, y, w)
    n = poles.size
    c_sigma = x[-n:]
    # State-space realization of sigma(s) = 1 + sum c~/(s - p); new poles are its zeros.
    real, upper = _split(poles)
    amat = np.zeros((n, n))
    bvec = np.zeros(n)
    k = 0
    for i in real:
        amat[k, k] = poles[i].real
        bvec[k] = 1.0
        k += 1
    for i in upper:
        al, be = poles[i].real, poles[i].imag
        amat[k:k + 2, k:k + 2] = [[al, be], [-be, al]]
        bvec[k] = 2.0
        k += 2
    new = np.linalg.eigvals(amat - np.outer(bvec, c_sigma))
    return _clean_poles(new)


def _clean_poles(poles):
    poles = np.asarray(poles, complex)
    # Flip unstable poles into the left half-plane.
    poles = np.where(poles.real > 0, -poles.real + 1j * poles.imag, poles)
    out = []
    for p in poles:
        if abs(p.imag) <= 1e-10 * abs(p):
            out.append(complex(p.real, 0.0))
    uppers = sorted((p for p in poles if p.imag > 1e-10 * abs(p)), key=lambda z: z.imag)
    lowers = [p for p in poles if p.imag < -1e-10 * abs(p)]
    if len(uppers) != len(lowers):
        raise FitError("pole relocation produced an unpaired complex pole")
    out.sort(key=lambda z: z.real)
    for p in uppers:
        out += [p, np.conj(p)]
    return np.array(out, complex)


def _fit_residues(s, y, w, poles, inductive):
    phi = _basis(s, poles)
    extra = _extra_columns(s, inductive)
    x = _solve_real(np.hstack([phi, extra]), y, w)
    n = phi.shape[1]
    p, r = _coeffs_to_residues(x[:n], poles)
    d, e = x[n], x[n + 1]
    k = x[n + 2] if inductive else 0.0
    return p, r, float(d), float(e), float(k)


def _rms_rel(y_fit, y):
    den = np.maximum(np.abs(y), 1e-300)
    return float(np.sqrt(np.mean(np.abs(y_fit - y) ** 2 / den**2)))


def _fit_fixed_order(f, y, order, inductive, max_iter, pole_tol):
    s = 2j * np.pi * f
    w = 1.0 / np.maximum(np.abs(y), 1e-12 * np.max(np.abs(y)))
    poles = initial_poles(f[0], f[-1], order)
    converged = order == 0
    for _ in range(max_iter if order else 0):
        new = _relocate(s, y, w, poles, inductive)
        if new.size == poles.size:
            change = np.max(np.abs(new - poles) / np.maximum(np.abs(poles), 1e-300))
        else:
            change = np.inf
        poles = new
        if change < pole_tol:
            converged = True
            break
    p, r, d, e, k = _fit_residues(s, y, w, poles, inductive)
    model = RationalModel(p, r, d, e, k, fit_band=(float(f[0]), float(f[-1])))
    err = _rms_rel(model.admittance(f), y)
    return RationalModel(p, r, d, e, k, rms_error=err, fit_band=model.fit_band), converged


def vector_fit(
    resp: FrequencyResponse,
    order: int | str = "auto",
    tol: float = 1e-3,
    inductive: bool | None = None,
    max_iter: int = 50,
    pole_tol: float = 1e-10,
) -> RationalModel:
    """Fit a one-port admittance by iterative pole relocation.

    ``order`` is the number of poles; ``"auto"`` tries 0, 2, 4, ... up to 20 and
    returns the first model whose RMS relative error is within ``tol``.
    ``inductive`` adds a pole at DC (a shunt inductor); ``None`` tries without
    it first and falls back to including it.
    """
    y_resp = _as_one_port_y(resp)
    f = np.asarray(y_resp.freqs)
    y = np.asarray(y_resp.entry(0, 0))
    orders = range(0, MAX_ORDER + 1, 2) if order == "auto" else [int(order)]
    variants = [False, True] if inductive is None else [bool(inductive)]

    best = None
    for n in orders:
        if n < 0 or n > MAX_ORDER:
            raise ValueError(f"order must be in [0, {MAX_ORDER}]")
        if f.size < max(4 * n, 2 + len(variants)):
            if order == "auto":
                break
            raise ValueError(f"need at least {4 * n} frequency points for order {n}, got {f.size}")
        for ind in variants:
            model, converged = _fit_fixed_order(f, y, n, ind, max_iter, pole_tol)
            if model.rms_error <= tol:
                return model
            if best is None or model.rms_error < best[0].rms_error:
                best = (model, converged, n)
    if best is None:
        raise FitError("not enough frequency points for any model order")
    model, converged, n = best
    if not converged:
        raise FitError(
            f"pole relocation did not converge within {max_iter} iterations "
            f"(best RMS relative error {model.rms_error:.3g} > tol {tol:.3g})"
        )
    raise FitError(f"order {n} insufficient: RMS relative error {model.rms_error:.3g} > tol {tol:.3g}")


@dataclass(frozen=True)
class FosterBranch:
    """Shunt branch: R and L in series with (C parallel G).

    A lossy conjugate pole pair has four degrees of freedom; G absorbs the one a plain
    series RLC cannot. G is zero when the pair maps onto an ordinary series RLC.
    """

    R: float
    L: float
    C: float
    G: float = 0.0

    @property
    def physical(self) -> bool:
        return min(self.R, self.L, self.C, self.G) >= 0

    def admittance_s(self, s):
        yc = s * self.C + self.G
        return yc / ((s * self.L + self.R) * yc + 1)

    @property
    def resonance(self) -> float:
        return 1 / (2 * np.pi * math.sqrt(abs(self.L * self.C)))


@dataclass(frozen=True)
class LumpedCircuit:
    shunt_capacitance: float
    shunt_conductance: float
    branches: tuple[FosterBranch, ...] = ()
    shunt_inductance: float | None = None
    non_physical: tuple[str, ...] = field(default=())

    @property
    def physical(self) -> bool:
        return not self.non_physical

    def admittance(self, freqs):
        s = 2j * np.pi * np.asarray(freqs, dtype=float)
        y = self.shunt_conductance + s * self.shunt_capacitance
        if self.shunt_inductance is not None:
            y = y + 1 / (s * self.shunt_inductance)
        for b in self.branches:
            y = y + b.admittance_s(s)
        return y


# Negative values smaller than this fraction of the local scale are rounding noise.
_FLAG_RTOL = 1e-9


def _reference_omega(model: RationalModel) -> float:
    if model.fit_band is not None:
        return 2 * np.pi * math.sqrt(model.fit_band[0] * model.fit_band[1])
    if model.order:
        return float(np.exp(np.mean(np.log(np.abs(model.poles)))))
    return 2 * np.pi * 1e9


def foster_synthesize(model: RationalModel) -> LumpedCircuit:
    """Realize ``model`` as shunt C, G, optional L and one branch per conjugate pole pair.

    Negative element values are kept and listed in ``non_physical``. Values that are
    negative by less than the model's RMS fit error (relative to the branch or shunt
    admittance scale) are fit noise and are not flagged.
    """
    real = [p for p in model.poles if p.imag == 0]
    if real:
        raise FosterError(
            "real (overdamped) poles cannot be mapped to a Foster branch: "
            + ", ".join(f"{p.real:.6g} rad/s" for p in real)
        )
    w_ref = _reference_omega(model)
    y_scale = max(
        abs(model.direct_term),
        w_ref * abs(model.capacitive_term),
        abs(model.inductive_term) / w_ref,
        *(abs(r) / abs(p) for p, r in zip(model.poles, model.residues)),
        1e-300,
    )
    tol = max(_FLAG_RTOL, model.rms_error)
    flags = []
    branches = []
    for p, r in zip(model.poles, model.residues):
        if p.imag <= 0:
            continue
        a = 2 * r.real
        b = -2 * (r * np.conj(p)).real
        two_alpha = -2 * p.real
        mag2 = abs(p) ** 2
        if a == 0:
            raise FosterError(f"pole pair {p:.6g} has zero inductive residue; no branch realization")
        L = 1 / a
        g = b / a
        R = L * (two_alpha - g)
        C = 1 / (L * mag2 - R * g)
        G = g * C
        br = FosterBranch(R=R, L=L, C=C, G=G)
        w0 = abs(p)
        bad = [name for name, v in (("L", L), ("C", C)) if v < 0]
        if R < -tol * w0 * abs(L):
            bad.append("R")
        if G < -tol * w0 * abs(C):
            bad.append("G")
        if bad:
            flags.append(f"branch at {w0 / (2 * np.pi):.6g} Hz: negative {', '.join(bad)}")
        branches.append(br)
    l_shunt = None
    if model.inductive_term:
        l_shunt = 1 / model.inductive_term
        if model.inductive_term / w_ref < -tol * y_scale:
            flags.append("negative shunt inductance")
    if model.capacitive_term * w_ref < -tol * y_scale:
        flags.append("negative shunt capacitance")
    if model.direct_term < -tol * y_scale:
        flags.append("negative shunt conductance")
    return LumpedCircuit(
        shunt_capacitance=model.capacitive_term,
        shunt_conductance=model.direct_term,
        branches=tuple(branches),
        shunt_inductance=l_shunt,
        non_physical=tuple(flags),
    )


@dataclass(frozen=True)
class ModeSummary:
    frequency: float
    quality_factor: float
    effective_capacitance: float


def _admittance_fn(source):
    if isinstance(source, RationalModel):
        return source.admittance
    if isinstance(source, LumpedCircuit):
        return source.admittance
    raise TypeError(f"unsupported admittance source {type(source).__name__}")


def _find_crossings(im_y, f_lo, f_hi, breakpoints, n_grid):
    grid = np.linspace(f_lo, f_hi, n_grid)
    extra = [b for b in breakpoints if f_lo < b < f_hi]
    if extra:
        grid = np.unique(np.concatenate([grid, extra]))
    vals = im_y(grid)
    roots = []
    for i in range(grid.size - 1):
        lo, hi, vlo, vhi = grid[i], grid[i + 1], vals[i], vals[i + 1]
        if vlo < 0 <= vhi:
            if vhi == 0:
                roots.append(hi)
                continue
            # Bisection to 1e-12 relative.
            while hi - lo > 1e-12 * hi:
                mid = 0.5 * (lo + hi)
                vm = im_y(np.array([mid]))[0]
                if vm < 0:
                    lo = mid
                else:
                    hi = mid
            roots.append(0.5 * (lo + hi))
    return sorted(set(roots))


def extract_modes(source, band: tuple[float, float], n_grid: int | None = None) -> list[ModeSummary]:
    """Resonances inside ``band`` (Hz) where Im Y crosses zero upward.

    ``source`` is a :class:`RationalModel` or :class:`LumpedCircuit` (converted back
    to pole-residue form). Slopes are analytic, not finite differences.
    """
    f_lo, f_hi = band
    if not 0 < f_lo < f_hi:
        raise ValueError("band must satisfy 0 < f_lo < f_hi")
    if isinstance(source, LumpedCircuit):
        source = circuit_to_model(source)
    model = source
    if n_grid is None:
        n_grid = 10 * max(200, 20 * model.order)
    breakpoints = [abs(p.imag) / (2 * np.pi) for p in model.poles]

    def im_y(f):
        return model.admittance(f).imag

    modes = []
    for f0 in _find_crossings(im_y, f_lo, f_hi, breakpoints, n_grid):
        slope = model.d_admittance_d_omega(np.array([f0]))[0].imag
        re_y = model.admittance(np.array([f0]))[0].real
        w0 = 2 * np.pi * f0
        q = math.inf if re_y <= 0 else 0.5 * w0 * slope / re_y
        modes.append(ModeSummary(frequency=float(f0), quality_factor=float(q), effective_capacitance=float(0.5 * slope)))
    return modes


def circuit_to_model(circuit: LumpedCircuit) -> RationalModel:
    """Inverse of :func:`foster_synthesize`: partial fractions of each branch."""
    poles, residues = [], []
    for b in circuit.branches:
        # Y_b = (s/L + G/(LC)) / (s^2 + (G/C + R/L) s + (RG + 1)/(LC))
        a1 = 1 / b.L
        a0 = b.G / (b.L * b.C)
        c1 = b.G / b.C + b.R / b.L
        c0 = (b.R * b.G + 1) / (b.L * b.C)
        p = complex(-c1 / 2, math.sqrt(max(c0 - c1 * c1 / 4, 0.0)))
        if p.imag == 0:
            raise FosterError("branch is overdamped; no conjugate pole pair")
        r = (a1 * p + a0) / (p - np.conj(p))
        poles += [p, np.conj(p)]
        residues += [r, np.conj(r)]
    k = 0.0 if circuit.shunt_inductance is None else 1 / circuit.shunt_inductance
    return RationalModel(poles, residues, circuit.shunt_conductance, circuit.shunt_capacitance, k)


def admittance_at(source, f: float) -> complex:
    """Admittance of a model, circuit or tabulated one-port at ``f`` (linear interpolation for tables)."""
    if isinstance(source, FrequencyResponse):
        y = _as_one_port_y(source)
        fr = y.freqs
        if not fr[0] <= f <= fr[-1]:
            raise ValueError(f"frequency {f:.6g} Hz outside tabulated range [{fr[0]:.6g}, {fr[-1]:.6g}] Hz")
        v = y.entry(0, 0)
        return complex(np.interp(f, fr, v.real), np.interp(f, fr, v.imag))
    if isinstance(source, RationalModel) and source.fit_band is not None:
        lo, hi = source.fit_band
        if not lo <= f <= hi:
            raise ValueError(f"frequency {f:.6g} Hz outside fitted range [{lo:.6g}, {hi:.6g}] Hz")
    return complex(_admittance_fn(source)(np.array([f]))[0])


def t1_from_conductance(qubit_capacitance: float, re_y: float) -> float:
    if re_y < 0:
        raise PassivityError(f"Re Y = {re_y:.3g} S is negative; environment is not passive")
    if re_y == 0:
        return math.inf
    return qubit_capacitance / re_y


def t1_estimate(qubit_capacitance: float, source, f_q: float, passivity_floor: float = 1e-12) -> float:
    """T1 = C_q / Re Y(2 pi f_q).

    Real parts in ``[-passivity_floor, 0]`` count as lossless; anything more negative
    raises :class:`PassivityError`.
    """
    if not qubit_capacitance > 0:
        raise ValueError("qubit capacitance must be positive")
    re_y = admittance_at(source, f_q).real
    if -passivity_floor <= re_y <= 0:
        return math.inf
    return t1_from_conductance(qubit_capacitance, re_y)


def required_conductance(qubit_capacitance: float, t1: float) -> float:
    """Largest Re Y compatible with a target T1."""
    return qubit_capacitance / t1
