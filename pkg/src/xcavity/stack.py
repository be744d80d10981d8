"""Layered cavity geometry and per-layer longitudinal wavenumbers."""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, replace
from pathlib import Path

import numpy as np

from .errors import ConfigError, ResonantLayerZero
from .materials import VACUUM, MaterialDB, refractive_index, wavenumber

NORMAL_INCIDENCE_MRAD = 500.0 * math.pi


@dataclass(frozen=True)
class Layer:
    material: str
    thickness: float  # nm


@dataclass(frozen=True)
class CavityStack:
    """Layers listed from the top; vacuum above, semi-infinite `substrate` below.

    `resonant_index` is 0-based into `layers`; `z_rel` is the depth of the
    nuclei inside the resonant layer as a fraction of its thickness.
    """

    layers: tuple[Layer, ...]
    substrate: str
    resonant_index: int
    z_rel: float = 0.5

    def __post_init__(self):
        layers = tuple(l if isinstance(l, Layer) else Layer(*l) for l in self.layers)
        object.__setattr__(self, "layers", layers)
        for layer in layers:
            if not layer.thickness >= 0:
                raise ConfigError(f"negative thickness {layer.thickness} nm for {layer.material}")
        if not 0 <= self.resonant_index < len(layers):
            raise ConfigError(f"resonant index {self.resonant_index} outside 0..{len(layers) - 1}")
        if not 0 <= self.z_rel <= 1:
            raise ConfigError(f"z_rel must lie in [0, 1], got {self.z_rel}")

    @classmethod
    def from_spec(cls, layers, substrate, resonant, z_rel=0.5):
        """Build from ``[(material, d_nm), ...]``."""
        return cls(tuple(Layer(m, float(d)) for m, d in layers), substrate, resonant, z_rel)

    @property
    def resonant(self) -> Layer:
        return self.layers[self.resonant_index]

    @property
    def materials(self) -> list[str]:
        """Material of every medium: vacuum, layers..., substrate."""
        return [VACUUM] + [l.material for l in self.layers] + [self.substrate]

    @property
    def thicknesses(self) -> list[float]:
        return [l.thickness for l in self.layers]

    def with_thickness(self, i: int, d: float) -> "CavityStack":
        layers = list(self.layers)
        layers[i] = Layer(layers[i].material, d)
        return replace(self, layers=tuple(layers))

    def mirrored(self) -> "CavityStack":
        """Stack turned upside down; requires a vacuum substrate to be a true mirror."""
        if self.substrate != VACUUM:
            raise ConfigError("mirroring needs a vacuum substrate")
        return CavityStack(
            tuple(reversed(self.layers)),
            VACUUM,
            len(self.layers) - 1 - self.resonant_index,
            1.0 - self.z_rel,
        )

    def to_json(self) -> dict:
        return {
            "layers": [{"material": l.material, "d_nm": l.thickness} for l in self.layers],
            "substrate": self.substrate,
            "resonant": self.resonant_index,
            "z_rel": self.z_rel,
        }

    @classmethod
    def from_json(cls, doc: dict) -> "CavityStack":
        try:
            layers = tuple(Layer(str(l["material"]), float(l["d_nm"])) for l in doc["layers"])
            return cls(layers, str(doc["substrate"]), int(doc["resonant"]), float(doc.get("z_rel", 0.5)))
        except (KeyError, TypeError) as exc:
            raise ConfigError(f"malformed stack document: {exc}") from None

    @classmethod
    def load(cls, path) -> "CavityStack":
        try:
            return cls.from_json(json.loads(Path(path).read_text(encoding="utf-8")))
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read stack {path}: {exc}") from None

    def __str__(self):
        body = "/".join(f"{l.material}({l.thickness:g})" for l in self.layers)
        return f"{body}/{self.substrate}" if body else self.substrate


@dataclass(frozen=True)
class Geometry:
    omega: float  # keV
    theta: float  # mrad, grazing angle from the surface plane

    def __post_init__(self):
        if not self.omega > 0:
            raise ConfigError(f"omega must be > 0, got {self.omega}")
        if not 0 < self.theta <= 1570.8:
            raise ConfigError(f"theta must lie in (0, pi/2] mrad, got {self.theta}")


def k_parallel(geom: Geometry) -> float:
    """In-plane wavevector in 1/nm; exactly zero at normal incidence."""
    if geom.theta >= NORMAL_INCIDENCE_MRAD:
        return 0.0
    return wavenumber(geom.omega) * math.cos(geom.theta * 1e-3)


def indices(db: MaterialDB, stack: CavityStack, omega: float) -> np.ndarray:
    """Refractive index of every medium (vacuum, layers, substrate) at `omega` keV."""
    return np.array([refractive_index(db, m, omega) for m in stack.materials])


def _sin2(theta_mrad):
    th = np.asarray(theta_mrad) * 1e-3
    s = np.sin(th)
    s2 = s * s
    if np.isrealobj(th):
        s2 = np.where(th >= NORMAL_INCIDENCE_MRAD * 1e-3, 1.0, s2)
    return s2


def _passive_sqrt(x):
    s = np.sqrt(np.asarray(x, dtype=complex))
    flip = (s.imag < 0) | ((s.imag == 0) & (s.real < 0))
    return np.where(flip, -s, s)


def betas_from_indices(n: np.ndarray, omega: float, theta) -> np.ndarray:
    """Longitudinal wavenumbers, shape ``(len(n),) + shape(theta)``.

    For real angles the branch satisfies Im beta >= 0 (Re beta >= 0 when
    Im beta == 0). For complex angles each beta is the analytic continuation
    of that branch from the real part of the angle.
    """
    k0 = wavenumber(omega)
    n = np.asarray(n, dtype=complex).reshape((-1,) + (1,) * np.ndim(theta))
    theta = np.asarray(theta)
    x = k0 * k0 * ((n - 1) * (n + 1) + _sin2(theta))
    if not np.iscomplexobj(theta) or not np.any(theta.imag):
        return _passive_sqrt(x)
    ref = betas_from_indices(n.ravel(), omega, theta.real)
    s = np.sqrt(x.astype(complex))
    return np.where(np.abs(s - ref) <= np.abs(s + ref), s, -s)


def layer_beta(db: MaterialDB, stack: CavityStack, geom: Geometry) -> np.ndarray:
    """Longitudinal wavenumbers (1/nm) of vacuum, every layer, and the substrate."""
    return betas_from_indices(indices(db, stack, geom.omega), geom.omega, geom.theta)


def collapse_zero_layers(stack: CavityStack) -> CavityStack:
    """Drop zero-thickness non-resonant layers."""
    if stack.resonant.thickness == 0:
        raise ResonantLayerZero("resonant layer has zero thickness")
    keep = [i for i, l in enumerate(stack.layers) if l.thickness > 0]
    if len(keep) == len(stack.layers):
        return stack
    return CavityStack(
        tuple(stack.layers[i] for i in keep),
        stack.substrate,
        keep.index(stack.resonant_index),
        stack.z_rel,
    )
