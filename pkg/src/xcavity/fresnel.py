"""Fresnel coefficients and the two-term layer recursions built on them.

Media are numbered 0 (vacuum) .. K-1 (substrate); medium j for 1 <= j <= K-2
is layer j-1 of the stack with thickness ``d[j]``. Every recursion below is
the same two-term combination

    R' = (r + R e^{2 i beta d}) / (1 + r R e^{2 i beta d})

applied outward from a semi-infinite medium, and works elementwise on
arrays of angles. s-polarisation throughout.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DegenerateInterface
from .materials import MaterialDB
from .stack import CavityStack, Geometry, betas_from_indices, indices


@dataclass(frozen=True)
class InterfaceCoeffs:
    r: complex
    t: complex


@dataclass(frozen=True)
class CompositeCoeffs:
    """Coefficients seen from the resonant medium m.

    r_up    reflection of a wave in m travelling up (r_{m/0}), at the top of m
    r_down  reflection of a wave in m travelling down (r_{m/K-1}), at the bottom of m
    t_in    transmission vacuum -> m through the layers above (t_{0/m})
    t_out   transmission m -> vacuum (t_{m/0})
    r_top   reflection from vacuum on the layers above a semi-infinite m (r_{0/m})
    r_el    electronic reflectivity of the whole stack
    phase   e^{i beta_m d_m}
    """

    r_up: np.ndarray
    r_down: np.ndarray
    t_in: np.ndarray
    t_out: np.ndarray
    r_top: np.ndarray
    r_el: np.ndarray
    phase: np.ndarray


def fresnel(beta_i, beta_j) -> InterfaceCoeffs:
    """Interface coefficients for a wave in medium i hitting medium j."""
    s = beta_i + beta_j
    if s == 0:
        raise DegenerateInterface("beta_i + beta_j = 0")
    return InterfaceCoeffs((beta_i - beta_j) / s, 2 * beta_i / s)


def _r(bi, bj):
    return (bi - bj) / (bi + bj)


def _t(bi, bj):
    return 2 * bi / (bi + bj)


def _combine(r, R, e2):
    x = R * e2
    return (r + x) / (1 + r * x)


def stack_arrays(db: MaterialDB, stack: CavityStack, omega: float, theta):
    """Betas (K, ...) and thickness vector (K,) for a stack at energy `omega`."""
    betas = betas_from_indices(indices(db, stack, omega), omega, theta)
    d = np.array([0.0] + stack.thicknesses + [0.0])
    return betas, d


def _phases(betas, d):
    """e^{i beta_j d_j} for every medium (1 for the semi-infinite ends)."""
    d = np.asarray(d, dtype=float).reshape((-1,) + (1,) * (np.ndim(betas) - 1))
    return np.exp(1j * betas * d)


def down_reflection(betas, d, start, stop, p=None):
    """Reflection in medium `start` off media start+1..stop (stop semi-infinite).

    Referenced at the lower boundary of `start`. `p` optionally holds
    precomputed `_phases(betas, d)`.
    """
    p = _phases(betas, d) if p is None else p
    R = _r(betas[stop - 1], betas[stop])
    for j in range(stop - 1, start, -1):
        R = _combine(_r(betas[j - 1], betas[j]), R, p[j] * p[j])
    return R


def up_reflection(betas, d, start, stop, p=None):
    """Reflection in medium `stop` off media stop-1..start (start semi-infinite).

    Referenced at the upper boundary of `stop`.
    """
    p = _phases(betas, d) if p is None else p
    R = _r(betas[start + 1], betas[start])
    for j in range(start + 1, stop):
        R = _combine(_r(betas[j + 1], betas[j]), R, p[j] * p[j])
    return R


def down_transmission(betas, d, stop, p=None):
    """t_{0/stop}: vacuum into semi-infinite medium `stop`."""
    p = _phases(betas, d) if p is None else p
    T = _t(betas[0], betas[1])
    R_up = _r(betas[1], betas[0])
    for j in range(1, stop):
        e2 = p[j] * p[j]
        rjk = _r(betas[j], betas[j + 1])
        T = T * _t(betas[j], betas[j + 1]) * p[j] / (1 - R_up * rjk * e2)
        R_up = _combine(_r(betas[j + 1], betas[j]), R_up, e2)
    return T


def up_transmission(betas, d, start, p=None):
    """t_{start/0}: semi-infinite medium `start` into vacuum."""
    p = _phases(betas, d) if p is None else p
    T = _t(betas[start], betas[start - 1])
    R_down = _r(betas[start - 1], betas[start])
    for j in range(start - 1, 0, -1):
        e2 = p[j] * p[j]
        rjk = _r(betas[j], betas[j - 1])
        T = T * _t(betas[j], betas[j - 1]) * p[j] / (1 - R_down * rjk * e2)
        R_down = _combine(_r(betas[j - 1], betas[j]), R_down, e2)
    return T


def composite_from_arrays(betas, d, m) -> CompositeCoeffs:
    last = len(betas) - 1
    p = _phases(betas, d)
    r_up = up_reflection(betas, d, 0, m, p)
    r_down = down_reflection(betas, d, m, last, p)
    r_top = down_reflection(betas, d, 0, m, p)
    t_in = down_transmission(betas, d, m, p)
    t_out = up_transmission(betas, d, m, p)
    phase = p[m]
    e2 = phase * phase
    r_el = (r_top + (t_in * t_out - r_top * r_up) * r_down * e2) / (1 - r_up * r_down * e2)
    return CompositeCoeffs(r_up, r_down, t_in, t_out, r_top, r_el, phase)


def composite_coeffs(db: MaterialDB, stack: CavityStack, geom: Geometry) -> CompositeCoeffs:
    """Composite coefficients around the resonant layer."""
    return composite_at(db, stack, geom.omega, geom.theta)


def composite_at(db: MaterialDB, stack: CavityStack, omega: float, theta) -> CompositeCoeffs:
    betas, d = stack_arrays(db, stack, omega, theta)
    return composite_from_arrays(betas, d, stack.resonant_index + 1)


def parratt_from_arrays(betas, d):
    return down_reflection(betas, d, 0, len(betas) - 1)


def parratt(db: MaterialDB, stack: CavityStack, geom: Geometry) -> complex:
    """Electronic reflectivity of the whole stack (bottom-up Parratt recursion)."""
    return parratt_at(db, stack, geom.omega, geom.theta)


def parratt_at(db: MaterialDB, stack: CavityStack, omega: float, theta):
    betas, d = stack_arrays(db, stack, omega, theta)
    return parratt_from_arrays(betas, d)
