"""Optical constants and Moessbauer isotope data.

Internal units: lengths in nm, photon energies in keV, nuclear rates in
units of the natural linewidth. Energies enter the wave equations as vacuum
wavenumbers ``k0 = E / (hbar c)`` in 1/nm.
"""
from __future__ import annotations

import csv
import math
import os
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from types import MappingProxyType
from typing import Mapping

import numpy as np

from .errors import (
    ConfigError,
    EnergyOutOfRange,
    NonPositiveThickness,
    UnknownIsotope,
    UnknownMaterial,
)

HBARC_EV_NM = 197.3269804
VACUUM = "vacuum"
DB_ENV_VAR = "XCAVITY_DB"


def wavenumber(energy_kev):
    """Vacuum wavenumber in 1/nm for a photon energy in keV."""
    return energy_kev * 1e3 / HBARC_EV_NM


@dataclass(frozen=True)
class Material:
    name: str
    energy: np.ndarray
    delta: np.ndarray
    beta: np.ndarray

    def __post_init__(self):
        e = np.asarray(self.energy, dtype=float)
        if e.size == 0:
            raise ConfigError(f"material {self.name!r} has an empty table")
        if np.any(np.diff(e) <= 0):
            raise ConfigError(f"material {self.name!r}: energies not strictly increasing")
        d = np.asarray(self.delta, dtype=float)
        b = np.asarray(self.beta, dtype=float)
        if not np.all(np.isfinite(d)) or np.any(b < 0) or not np.all(np.isfinite(b)):
            raise ConfigError(f"material {self.name!r}: need finite delta and beta >= 0")
        for arr in (e, d, b):
            arr.flags.writeable = False
        object.__setattr__(self, "energy", e)
        object.__setattr__(self, "delta", d)
        object.__setattr__(self, "beta", b)

    def index(self, energy_kev: float) -> complex:
        e = self.energy
        if not e[0] <= energy_kev <= e[-1]:
            raise EnergyOutOfRange(
                f"{self.name}: {energy_kev} keV outside [{e[0]}, {e[-1]}] keV"
            )
        i = int(np.searchsorted(e, energy_kev))
        if e[i] == energy_kev:
            return complex(1.0 - self.delta[i], self.beta[i])
        t = math.log(energy_kev / e[i - 1]) / math.log(e[i] / e[i - 1])
        d = _loglog(self.delta[i - 1], self.delta[i], t)
        b = _loglog(self.beta[i - 1], self.beta[i], t)
        return complex(1.0 - d, b)


def _loglog(y0, y1, t):
    # log-log where both nodes are positive, linear in log E otherwise
    if y0 > 0 and y1 > 0:
        return math.exp((1 - t) * math.log(y0) + t * math.log(y1))
    return (1 - t) * y0 + t * y1


@dataclass(frozen=True)
class Isotope:
    name: str
    omega_nuc: float  # keV
    gamma0: float  # neV
    alpha_ic: float
    spin_e: float
    spin_g: float
    f_LM: float
    abundance: float
    rho_V: float  # atoms / nm^3
    electronic_delta: float
    electronic_beta: float

    def __post_init__(self):
        if not (self.omega_nuc > 0 and self.gamma0 > 0 and self.rho_V > 0):
            raise ConfigError(f"isotope {self.name!r}: omega_nuc, gamma0, rho_V must be > 0")
        if self.alpha_ic < 0:
            raise ConfigError(f"isotope {self.name!r}: alpha_ic must be >= 0")
        if not 0 <= self.f_LM <= 1 or not 0 < self.abundance <= 1:
            raise ConfigError(f"isotope {self.name!r}: f_LM in [0,1], abundance in (0,1]")

    @property
    def electronic_index(self) -> complex:
        return complex(1.0 - self.electronic_delta, self.electronic_beta)


@dataclass(frozen=True)
class MaterialDB:
    materials: Mapping[str, Material]
    isotopes: Mapping[str, Isotope] = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, "materials", MappingProxyType(dict(self.materials)))
        object.__setattr__(self, "isotopes", MappingProxyType(dict(self.isotopes)))

    def material(self, name: str) -> Material:
        try:
            return self.materials[name]
        except KeyError:
            raise UnknownMaterial(name) from None

    def isotope(self, name: str) -> Isotope:
        try:
            return self.isotopes[name]
        except KeyError:
            raise UnknownIsotope(name) from None

    def index(self, name: str, energy_kev: float) -> complex:
        return refractive_index(self, name, energy_kev)


def refractive_index(db: MaterialDB, material: str, energy: float) -> complex:
    """Complex refractive index ``1 - delta + i beta`` of `material` at `energy` keV."""
    if material == VACUUM:
        return 1.0 + 0.0j
    return db.material(material).index(float(energy))


def dipole_strength(iso: Isotope) -> float:
    """Squared transition dipole |d|^2 in nm^2 (hbar = c = mu0 = 1, lengths in nm)."""
    gamma0 = iso.gamma0 * 1e-9 / HBARC_EV_NM
    omega = wavenumber(iso.omega_nuc)
    return 2 * math.pi * gamma0 / omega**3 * _radiative_factor(iso)


def _radiative_factor(iso: Isotope) -> float:
    return (2 * iso.spin_e + 1) / (2 * iso.spin_g + 1) / (2 * (1 + iso.alpha_ic))


def coupling_scale(iso: Isotope) -> float:
    """omega^2 |d|^2 / gamma0 in nm^2; multiply by N/A [1/nm^2] and G [nm]."""
    return 2 * math.pi * _radiative_factor(iso) / wavenumber(iso.omega_nuc)


def areal_density(iso: Isotope, d3: float) -> float:
    """Effective resonant nuclei per nm^2 in a layer of thickness `d3` nm."""
    if not d3 > 0:
        raise NonPositiveThickness(f"resonant layer thickness must be > 0, got {d3}")
    return d3 * iso.rho_V * iso.abundance * iso.f_LM


def default_db_path() -> Path:
    env = os.environ.get(DB_ENV_VAR)
    if env:
        return Path(env)
    return Path(str(resources.files("xcavity") / "data"))


def _rows(path: Path):
    with open(path, encoding="utf-8", newline="") as fh:
        yield from csv.DictReader(line for line in fh if not line.lstrip().startswith("#"))


def load_materials(path) -> dict[str, Material]:
    tables: dict[str, list[tuple[float, float, float]]] = {}
    for row in _rows(Path(path)):
        tables.setdefault(row["name"], []).append(
            (float(row["energy_keV"]), float(row["delta"]), float(row["beta"]))
        )
    out = {}
    for name, rows in tables.items():
        rows.sort()
        e, d, b = (np.array(c) for c in zip(*rows))
        out[name] = Material(name, e, d, b)
    return out


def load_isotopes(path) -> dict[str, Isotope]:
    out = {}
    for row in _rows(Path(path)):
        out[row["name"]] = Isotope(
            name=row["name"],
            omega_nuc=float(row["omega_nuc_keV"]),
            gamma0=float(row["gamma0_neV"]),
            alpha_ic=float(row["alpha_ic"]),
            spin_e=int(row["two_Ie"]) / 2,
            spin_g=int(row["two_Ig"]) / 2,
            f_LM=float(row["f_LM"]),
            abundance=float(row["abundance"]),
            rho_V=float(row["rho_V_per_nm3"]),
            electronic_delta=float(row["delta_el"]),
            electronic_beta=float(row["beta_el"]),
        )
    return out


def load_db(path=None) -> MaterialDB:
    """Load ``materials.csv`` and ``isotopes.csv`` from a directory.

    Without `path`, uses ``$XCAVITY_DB`` or the database shipped with the package.
    """
    root = Path(path) if path is not None else default_db_path()
    if not root.is_dir():
        raise ConfigError(f"material database directory not found: {root}")
    try:
        return MaterialDB(load_materials(root / "materials.csv"), load_isotopes(root / "isotopes.csv"))
    except (OSError, KeyError, ValueError) as exc:
        if isinstance(exc, ConfigError):
            raise
        raise ConfigError(f"cannot read material database in {root}: {exc!r}") from None


_DEFAULT: MaterialDB | None = None


def default_db() -> MaterialDB:
    global _DEFAULT
    if _DEFAULT is None:
        _DEFAULT = load_db()
    return _DEFAULT
