"""Cavity + isotope + geometry -> parameters of the artificial two-level system.

Rates and shifts are in units of the natural linewidth gamma0.
"""
from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from .errors import IsotopeMismatch
from .greens import GreensEval, evaluate_at
from .materials import Isotope, MaterialDB, areal_density, coupling_scale, wavenumber
from .stack import CavityStack, Geometry


@dataclass(frozen=True)
class TwoLevelParams:
    cls: np.ndarray | float  # collective Lamb shift
    sr: np.ndarray | float  # superradiant broadening
    rabi_rel: np.ndarray | complex  # Rabi frequency relative to the same layer in free space
    fe: np.ndarray | float  # |E_in(z)|^2


def resonant_isotope(db: MaterialDB, stack: CavityStack, iso: Isotope | str | None = None) -> Isotope:
    name = stack.resonant.material
    if iso is None:
        return db.isotope(name)
    if isinstance(iso, str):
        iso = db.isotope(iso)
    if iso.name != name:
        raise IsotopeMismatch(f"resonant layer is {name!r}, isotope is {iso.name!r}")
    return iso


def coupling_prefactor(iso: Isotope, d3: float) -> float:
    """(N/A) omega^2 |d|^2 / gamma0 in 1/nm; multiplies G (nm) to give gamma0 units."""
    return areal_density(iso, d3) * coupling_scale(iso)


def params_from_greens(g: GreensEval, prefactor: float) -> TwoLevelParams:
    return TwoLevelParams(
        cls=-prefactor * g.g_zz.real,
        sr=2 * prefactor * g.g_zz.imag,
        rabi_rel=g.e_in_z,
        fe=g.field_enhancement,
    )


def two_level_params_at(db: MaterialDB, stack: CavityStack, iso, theta, omega=None) -> TwoLevelParams:
    """Vectorised over `theta` (mrad). `omega` defaults to the isotope transition."""
    iso = resonant_isotope(db, stack, iso)
    omega = iso.omega_nuc if omega is None else omega
    g = evaluate_at(db, stack, omega, theta)
    return params_from_greens(g, coupling_prefactor(iso, stack.resonant.thickness))


def two_level_params(db: MaterialDB, stack: CavityStack, iso, geom: Geometry) -> TwoLevelParams:
    iso = resonant_isotope(db, stack, iso)
    if not np.isclose(geom.omega, iso.omega_nuc, rtol=1e-12, atol=0):
        raise IsotopeMismatch(
            f"probe energy {geom.omega} keV is off the {iso.name} resonance {iso.omega_nuc} keV"
        )
    p = two_level_params_at(db, stack, iso, geom.theta, geom.omega)
    return TwoLevelParams(float(p.cls), float(p.sr), complex(p.rabi_rel), float(p.fe))


def _naive_factor(iso: Isotope, d3: float) -> float:
    # omega^2 |d|^2 / gamma0 ~ 1/omega, times N/A, times G ~ 1/omega
    return coupling_prefactor(iso, d3) / wavenumber(iso.omega_nuc)


def naive_isotope_rescale(
    base: TwoLevelParams, iso_from: Isotope, iso_to: Isotope, d3: float
) -> TwoLevelParams:
    """Estimate cls/sr for `iso_to` by rescaling `base` computed for `iso_from`.

    Holds the photonic environment fixed apart from the 1/omega scaling of G;
    fields are unchanged.
    """
    ratio = _naive_factor(iso_to, d3) / _naive_factor(iso_from, d3)
    if iso_from.name == iso_to.name:
        ratio = 1.0
    return replace(base, cls=base.cls * ratio, sr=base.sr * ratio)
