"""Cavity modes as complex-angle poles of G(z, z) at fixed energy.

Angles are in mrad throughout. G = N / D with D the mode denominator of
`xcavity.greens`; poles are zeros of D reached by Newton iteration from
minima of |D| along the real axis.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ContourDisagreement, EmptyWindow, NoConvergence
from .fresnel import composite_from_arrays, stack_arrays
from .greens import _standing, evaluate_at, mode_denominator
from .materials import MaterialDB
from .stack import CavityStack

DEDUP_MRAD = 1e-6
D_TOL = 1e-10
CONTOUR_FLAG = 1e-4


@dataclass(frozen=True)
class Pole:
    theta0: complex  # mrad
    residue: complex  # nm * mrad
    order_index: int
    contour_residue: complex | None = None

    @property
    def half_width(self) -> float:
        return abs(self.theta0.imag)

    @property
    def contour_check_rel_err(self) -> float:
        if self.contour_residue is None:
            return float("nan")
        return abs(self.contour_residue - self.residue) / abs(self.residue)

    @property
    def flagged(self) -> bool:
        """Derivative and contour residues disagree beyond 1e-4 relative."""
        return not self.contour_check_rel_err <= CONTOUR_FLAG

    def to_json(self) -> dict:
        return {
            "re_theta0_mrad": self.theta0.real,
            "im_theta0_mrad": self.theta0.imag,
            "re_residue": self.residue.real,
            "im_residue": self.residue.imag,
            "order_index": self.order_index,
            "contour_check_rel_err": self.contour_check_rel_err,
        }


@dataclass(frozen=True)
class PoleSearch:
    poles: list[Pole]
    dropped: int  # seeds that failed to converge


class ModeFunctions:
    """N(theta), D(theta) and G(theta) of one stack at one energy, for complex angles."""

    def __init__(self, db: MaterialDB, stack: CavityStack, omega: float):
        self.db, self.stack, self.omega = db, stack, omega
        self.m = stack.resonant_index + 1

    def parts(self, theta):
        betas, d = stack_arrays(self.db, self.stack, self.omega, theta)
        c = composite_from_arrays(betas, d, self.m)
        beta_m = betas[self.m]
        below, above = _standing(c, beta_m, d[self.m], self.stack.z_rel * d[self.m])
        return 1j / (2 * beta_m) * below * above, mode_denominator(c)

    def D(self, theta):
        return self.parts(theta)[1]

    def N(self, theta):
        return self.parts(theta)[0]

    def G(self, theta):
        n, d = self.parts(theta)
        return n / d

    def dD(self, theta, h=1e-4):
        """Five-point central difference of the holomorphic D."""
        t = np.asarray(theta, dtype=complex)
        f = self.D(np.stack([t - 2 * h, t - h, t + h, t + 2 * h]))
        return (f[0] - 8 * f[1] + 8 * f[2] - f[3]) / (12 * h)


def _newton(mf: ModeFunctions, theta, max_iter=60):
    t = complex(theta)
    with np.errstate(all="ignore"):
        for _ in range(max_iter):
            d = complex(mf.D(t))
            step = d / complex(mf.dD(t))
            t -= step
            if not np.isfinite(t) or abs(step) < 1e-13 * max(1.0, abs(t)):
                break
        ok = np.isfinite(t) and abs(complex(mf.D(t))) < D_TOL
    if not ok:
        raise NoConvergence(f"Newton did not converge from {theta}")
    return t


def residue_derivative(mf: ModeFunctions, theta0: complex) -> complex:
    return complex(mf.N(theta0)) / complex(mf.dD(theta0))


def residue_contour(mf: ModeFunctions, theta0: complex, radius=None, nodes=64) -> complex:
    """(1 / 2 pi i) of the closed integral of G around theta0, trapezoidal rule."""
    if radius is None:
        radius = 0.1 * abs(theta0.imag)
    w = radius * np.exp(2j * np.pi * np.arange(nodes) / nodes)
    return complex(np.mean(mf.G(theta0 + w) * w))


def find_poles(
    db: MaterialDB,
    stack: CavityStack,
    omega: float,
    window: tuple[float, float],
    height: float | None = None,
    seeds: int = 4000,
) -> PoleSearch:
    """Zeros of the mode denominator with Re theta in `window` and |Im theta| <= `height`."""
    lo, hi = window
    if not hi > lo:
        raise EmptyWindow(f"empty angle window {window}")
    height = (hi - lo) if height is None else height
    mf = ModeFunctions(db, stack, omega)
    grid = np.linspace(lo, hi, seeds)
    mag = np.abs(mf.D(grid))
    interior = np.nonzero((mag[1:-1] < mag[:-2]) & (mag[1:-1] <= mag[2:]))[0] + 1
    found: list[complex] = []
    dropped = 0
    for i in interior:
        try:
            t = _newton(mf, grid[i])
        except NoConvergence:
            dropped += 1
            continue
        if not (lo <= t.real <= hi and abs(t.imag) <= height):
            continue
        if all(abs(t - f) > DEDUP_MRAD for f in found):
            found.append(t)
    found.sort(key=lambda t: (t.real, t.imag))
    poles = [
        Pole(t, residue_derivative(mf, t), k + 1, residue_contour(mf, t))
        for k, t in enumerate(found)
    ]
    return PoleSearch(poles, dropped)


def residue(
    db: MaterialDB, stack: CavityStack, omega: float, pole: Pole | complex, strict: bool = False
) -> complex:
    """Residue of G(z, z) in the angle plane (nm mrad).

    With `strict`, a contour-integral cross-check that disagrees by more
    than 1e-4 relative raises ContourDisagreement.
    """
    t = pole.theta0 if isinstance(pole, Pole) else complex(pole)
    mf = ModeFunctions(db, stack, omega)
    res = residue_derivative(mf, t)
    if strict:
        err = abs(residue_contour(mf, t) - res) / abs(res)
        if not err <= CONTOUR_FLAG:
            raise ContourDisagreement(f"residue at {t}: contour check off by {err:.3g}")
    return res


def mittag_leffler(poles, g_at_zero: complex, theta):
    """G(0) + sum Res (1/theta0 + 1/(theta - theta0))."""
    theta = np.asarray(theta)
    out = np.full(theta.shape, complex(g_at_zero), dtype=complex)
    for p in poles:
        out = out + p.residue * (1 / p.theta0 + 1 / (theta - p.theta0))
    return out


def green_at_zero(db: MaterialDB, stack: CavityStack, omega: float) -> complex:
    return complex(ModeFunctions(db, stack, omega).G(0.0))


@dataclass(frozen=True)
class CircleFit:
    center: complex
    radius: float
    residual: float  # rms radial deviation

    @property
    def rel_residual(self) -> float:
        return self.residual / self.radius


def fit_circle(points) -> CircleFit:
    """Least-squares circle through complex points (algebraic fit, then geometric refinement)."""
    z = np.asarray(points, dtype=complex).ravel()
    x, y = z.real, z.imag
    x0, y0 = x.mean(), y.mean()
    s = max(np.ptp(x), np.ptp(y), 1e-300)
    u, v = (x - x0) / s, (y - y0) / s
    M = np.column_stack([u, v, np.ones_like(u)])
    sol, *_ = np.linalg.lstsq(M, u * u + v * v, rcond=None)
    cu, cv = sol[0] / 2, sol[1] / 2
    for _ in range(20):
        du, dv = u - cu, v - cv
        r = np.hypot(du, dv)
        R = r.mean()
        J = np.column_stack([-du / r, -dv / r])
        step, *_ = np.linalg.lstsq(J - J.mean(axis=0), -(r - R), rcond=None)
        cu, cv = cu + step[0], cv + step[1]
        if np.hypot(*step) < 1e-15:
            break
    r = np.hypot(u - cu, v - cv)
    R = r.mean()
    return CircleFit(complex(x0 + s * cu, y0 + s * cv), s * R, s * float(np.sqrt(np.mean((r - R) ** 2))))


def single_mode(pole: Pole, C: complex, theta):
    """C + Res / (theta - theta0)."""
    return C + pole.residue / (np.asarray(theta) - pole.theta0)


def single_mode_constant(mf_or_g, pole: Pole, off_resonant) -> complex:
    """C estimated from two off-resonant samples of the exact G."""
    th = np.asarray(off_resonant, dtype=float)
    g = mf_or_g(th)
    return complex(np.mean(g - pole.residue / (th - pole.theta0)))


def single_mode_circle(pole: Pole, C: complex, theta) -> CircleFit:
    """Circle traced by the single-mode form along real angles."""
    return fit_circle(single_mode(pole, C, theta))


def complex_shift(g, prefactor: float):
    """cls + i sr/2 = -prefactor conj(G); the (cls, sr/2) plane is an isometric image of the G plane."""
    return -prefactor * np.conj(g)


def greens_trajectory(db: MaterialDB, stack: CavityStack, omega: float, theta):
    return evaluate_at(db, stack, omega, theta).g_zz
