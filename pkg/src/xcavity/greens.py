"""In-plane Fourier-transformed Green's function and driving fields at the nuclei.

All quantities are evaluated from the composite coefficients around the
resonant medium m, with the nuclei at depth ``z = z_rel * d_m`` below its top
boundary. The common denominator is the mode function

    D = 1 - r_up r_down e^{2 i beta_m d_m}

whose zeros in the complex angle plane are the cavity modes.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ResonantLayerZero
from .fresnel import CompositeCoeffs, composite_from_arrays, stack_arrays
from .materials import MaterialDB
from .stack import CavityStack, Geometry


@dataclass(frozen=True)
class GreensEval:
    g_zz: np.ndarray  # nm
    g_0z: np.ndarray  # nm
    e_in_z: np.ndarray
    e_in_0: np.ndarray
    coeffs: CompositeCoeffs
    beta0: np.ndarray
    beta_m: np.ndarray

    @property
    def field_enhancement(self):
        return np.abs(self.e_in_z) ** 2


def mode_denominator(c: CompositeCoeffs):
    return 1 - c.r_up * c.r_down * c.phase**2


def _standing(c: CompositeCoeffs, beta_m, d_m, z):
    """(1 + r_down e^{2i beta (d-z)}, 1 + r_up e^{2i beta z}); bounded for thick lossy layers."""
    below = 1 + c.r_down * np.exp(2j * beta_m * (d_m - z))
    above = 1 + c.r_up * np.exp(2j * beta_m * z)
    return below, above


def evaluate_arrays(betas, d, m, z_rel) -> GreensEval:
    if not d[m] > 0:
        raise ResonantLayerZero("resonant layer has zero thickness")
    c = composite_from_arrays(betas, d, m)
    beta_m = betas[m]
    z = z_rel * d[m]
    den = mode_denominator(c)
    below, above = _standing(c, beta_m, d[m], z)
    g_zz = 1j / (2 * beta_m) * below * above / den
    e_z = c.t_in * np.exp(1j * beta_m * z) * below / den
    g_0z = 1j / (2 * betas[0]) * e_z
    return GreensEval(g_zz, g_0z, e_z, 1 + c.r_el, c, betas[0], beta_m)


def evaluate_at(db: MaterialDB, stack: CavityStack, omega: float, theta) -> GreensEval:
    """Green's functions and fields for an array of angles (mrad) at energy `omega` (keV)."""
    betas, d = stack_arrays(db, stack, omega, theta)
    return evaluate_arrays(betas, d, stack.resonant_index + 1, stack.z_rel)


def evaluate(db: MaterialDB, stack: CavityStack, geom: Geometry) -> GreensEval:
    return evaluate_at(db, stack, geom.omega, geom.theta)


def green_equal_z(db: MaterialDB, stack: CavityStack, geom: Geometry) -> complex:
    """G(z, z, k_par) at the nuclei, in nm."""
    return complex(evaluate(db, stack, geom).g_zz)


def green_surface(db: MaterialDB, stack: CavityStack, geom: Geometry) -> complex:
    """G(0, z, k_par): propagation of the nuclear response to the surface, in nm."""
    return complex(evaluate(db, stack, geom).g_0z)


def field_at_nuclei(db: MaterialDB, stack: CavityStack, geom: Geometry) -> complex:
    """Electronic field amplitude at the nuclei for unit incident amplitude."""
    return complex(evaluate(db, stack, geom).e_in_z)


def field_at_surface(db: MaterialDB, stack: CavityStack, geom: Geometry) -> complex:
    """Total electronic field at the surface, 1 + r_el."""
    return complex(evaluate(db, stack, geom).e_in_0)
