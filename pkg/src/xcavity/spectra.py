"""Nuclear linear response, Fano reflectance, visibility and rocking curves.

Detunings and widths are in units of gamma0. The electronic background r_el
is treated as constant across the nuclear line.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq

from .effective import coupling_prefactor, resonant_isotope
from .fresnel import parratt_at
from .greens import GreensEval, evaluate_at
from .materials import HBARC_EV_NM, MaterialDB, areal_density, dipole_strength, wavenumber
from .stack import CavityStack, Geometry

ZERO_BACKGROUND = 1e-12


@dataclass(frozen=True)
class FanoParams:
    r_el: complex
    a_weight: complex
    phi: float
    center: float  # Delta_CLS
    hwhm: float  # (1 + Gamma_SR) / 2

    @property
    def zero_background(self) -> bool:
        return abs(self.r_el) < ZERO_BACKGROUND


@dataclass(frozen=True)
class Spectrum:
    x: np.ndarray
    intensity: np.ndarray
    axis: str = "detuning_gamma0"

    @property
    def detuning(self):
        return self.x


def default_detuning(span=200.0, points=4001) -> np.ndarray:
    return np.linspace(-span, span, points)


def nuclear_response(fp: FanoParams, detuning, coupling=1.0):
    """Spin-wave amplitude -coupling / (Delta + i Gamma) at `detuning` from omega_nuc."""
    return -coupling / (np.asarray(detuning) - fp.center + 1j * fp.hwhm)


def reflection(fp: FanoParams, detuning):
    """Complex reflection amplitude r_el + A / (Delta + i Gamma)."""
    return fp.r_el + fp.a_weight / (np.asarray(detuning) - fp.center + 1j * fp.hwhm)


def reflectance(fp: FanoParams, detuning):
    return np.abs(reflection(fp, detuning)) ** 2


def _fano_from_greens(g: GreensEval, prefactor: float):
    a = -prefactor * g.g_0z * g.e_in_z
    r_el = g.coeffs.r_el
    ref = np.where(np.abs(r_el) < ZERO_BACKGROUND, 0.0, np.angle(r_el))
    phi = np.angle(a * np.exp(-1j * ref))
    return r_el, a, phi, -prefactor * g.g_zz.real, (1 + 2 * prefactor * g.g_zz.imag) / 2


def fano_params_at(db: MaterialDB, stack: CavityStack, iso, theta):
    """Arrays (r_el, A, phi, center, hwhm) over an angle grid."""
    iso = resonant_isotope(db, stack, iso)
    g = evaluate_at(db, stack, iso.omega_nuc, theta)
    return _fano_from_greens(g, coupling_prefactor(iso, stack.resonant.thickness))


def fano_params(db: MaterialDB, stack: CavityStack, iso, geom: Geometry) -> FanoParams:
    """Fano parameters at one geometry.

    When |r_el| < 1e-12 the phase is measured from the real axis and
    `zero_background` is set.
    """
    iso = resonant_isotope(db, stack, iso)
    g = evaluate_at(db, stack, geom.omega, geom.theta)
    r_el, a, phi, center, hwhm = _fano_from_greens(
        g, coupling_prefactor(iso, stack.resonant.thickness)
    )
    return FanoParams(complex(r_el), complex(a), float(phi), float(center), float(hwhm))


def input_output_reflection(db: MaterialDB, stack: CavityStack, iso, geom: Geometry, detuning):
    """Reflection assembled from the spin-wave amplitude and the surface propagator.

    Independent of `fano_params`: uses the absolute dipole moment, the Rabi
    frequency and mu0 omega^2 G(0,z) d explicitly.
    """
    iso = resonant_isotope(db, stack, iso)
    g = evaluate_at(db, stack, geom.omega, geom.theta)
    d = math.sqrt(dipole_strength(iso))  # nm
    gamma0 = iso.gamma0 * 1e-9 / HBARC_EV_NM  # 1/nm
    k = wavenumber(iso.omega_nuc)
    n_a = areal_density(iso, stack.resonant.thickness)
    omega_rabi = d * complex(g.e_in_z) * n_a / gamma0
    shift = -n_a * k * k * d * d * complex(g.g_zz).real / gamma0
    width = 0.5 * (1 + 2 * n_a * k * k * d * d * complex(g.g_zz).imag / gamma0)
    sigma = -omega_rabi / (np.asarray(detuning) - shift + 1j * width)
    return complex(g.e_in_0) - 1 + k * k * complex(g.g_0z) * d * sigma


def extrema_closed_form(fp: FanoParams):
    """Detunings (Delta_+, Delta_-) of the two reflectance extrema, relative to `center`."""
    r = abs(fp.r_el)
    a = abs(fp.a_weight)
    G = fp.hwhm
    sec = 1.0 / math.cos(fp.phi)
    tan = math.tan(fp.phi)
    root = math.sqrt(a * a + 4 * r * r * G * G + 4 * a * r * G * math.sin(fp.phi))
    lead = a * sec + 2 * r * G * tan
    return -(lead + sec * root) / (2 * r), -(lead - sec * root) / (2 * r)


def _slope(fp: FanoParams, delta):
    den = delta + 1j * fp.hwhm
    rr = fp.r_el + fp.a_weight / den
    return 2 * (np.conj(rr) * (-fp.a_weight / den**2)).real


def extrema_numeric(fp: FanoParams, samples=4001):
    """Stationary points of |r|^2 (relative to `center`) by bracketed root search."""
    scale = fp.hwhm + (abs(fp.a_weight) / abs(fp.r_el) if not fp.zero_background else 0.0)
    u = np.linspace(-np.pi / 2, np.pi / 2, samples + 2)[1:-1]
    x = scale * np.tan(u)
    s = _slope(fp, x)
    roots = []
    for i in np.nonzero(np.sign(s[:-1]) * np.sign(s[1:]) < 0)[0]:
        roots.append(brentq(lambda t: _slope(fp, t), x[i], x[i + 1], xtol=1e-13, rtol=1e-15))
    roots += [float(x[i]) for i in np.nonzero(s == 0)[0]]
    return sorted(roots)


def _intensity_rel(fp: FanoParams, delta):
    return abs(fp.r_el + fp.a_weight / (delta + 1j * fp.hwhm)) ** 2


def visibility(fp: FanoParams) -> float:
    """Peak-to-peak amplitude of the Fano feature in |r|^2.

    Closed-form extrema where |r_el| > 1e-12 and cos(phi) is not ~0; else a
    bracketed numerical search. With no background the value is the
    Lorentzian peak height (|A| / Gamma)^2.
    """
    if fp.a_weight == 0:
        return 0.0
    if fp.zero_background:
        return (abs(fp.a_weight) / fp.hwhm) ** 2
    if abs(math.cos(fp.phi)) > 1e-8:
        dp, dm = extrema_closed_form(fp)
        if math.isfinite(dp) and math.isfinite(dm):
            return abs(_intensity_rel(fp, dp) - _intensity_rel(fp, dm))
    return visibility_numeric(fp)


def visibility_numeric(fp: FanoParams) -> float:
    # |r|^2 -> |r_el|^2 far from resonance, so the asymptote bounds the range
    # when fewer than two extrema exist (no background, or phi = 0, pi)
    vals = [_intensity_rel(fp, p) for p in extrema_numeric(fp)] + [abs(fp.r_el) ** 2]
    return max(vals) - min(vals)


def visibility_array(r_el, a, phi, hwhm):
    """Vectorised closed-form visibility; falls back per element where singular."""
    shape = np.broadcast(r_el, a, phi, hwhm).shape
    r_el, a, phi, hwhm = (np.atleast_1d(v).ravel() for v in np.broadcast_arrays(r_el, a, phi, hwhm))
    r = np.abs(r_el)
    aa = np.abs(a)
    with np.errstate(divide="ignore", invalid="ignore"):
        c = np.cos(phi)
        root = np.sqrt(aa**2 + 4 * r**2 * hwhm**2 + 4 * aa * r * hwhm * np.sin(phi))
        lead = aa / c + 2 * r * hwhm * np.tan(phi)
        dp = -(lead + root / c) / (2 * r)
        dm = -(lead - root / c) / (2 * r)
        ip = np.abs(r_el + a / (dp + 1j * hwhm)) ** 2
        im = np.abs(r_el + a / (dm + 1j * hwhm)) ** 2
        out = np.abs(ip - im)
    bad = ~np.isfinite(out) | (r < ZERO_BACKGROUND) | (np.abs(c) <= 1e-8)
    for i in np.flatnonzero(bad):
        out[i] = visibility(FanoParams(complex(r_el[i]), complex(a[i]), float(phi[i]), 0.0, float(hwhm[i])))
    return out.reshape(shape)


def fano_spectrum(fp: FanoParams, detuning=None) -> Spectrum:
    det = default_detuning() if detuning is None else np.asarray(detuning, dtype=float)
    return Spectrum(det, reflectance(fp, det), "detuning_gamma0")


def rocking_curve(db: MaterialDB, stack: CavityStack, theta, omega=None) -> Spectrum:
    """Electronic reflected intensity |r_el|^2 over an angle grid (mrad)."""
    if omega is None:
        omega = resonant_isotope(db, stack).omega_nuc
    theta = np.asarray(theta, dtype=float)
    return Spectrum(theta, np.abs(parratt_at(db, stack, omega, theta)) ** 2, "theta_mrad")
