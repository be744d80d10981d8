"""Thin-film x-ray cavities with Moessbauer nuclei as tunable two-level systems.

Forward model: layered stack -> Green's function and fields at the nuclei
-> collective Lamb shift, superradiant width, Fano reflectance and
visibility. On top of it: complex-angle mode analysis and inverse design.
"""
from .design import DesignPoint, DesignSpace, archetype_space, evaluate, fabry_perot_space, optimize
from .effective import TwoLevelParams, two_level_params
from .errors import CavityError, ConfigError, NumericalError
from .fresnel import parratt
from .greens import evaluate as evaluate_greens
from .materials import MaterialDB, default_db, load_db
from .modes import Pole, find_poles, mittag_leffler
from .spectra import FanoParams, fano_params, visibility
from .stack import CavityStack, Geometry, Layer

__all__ = [
    "CavityError",
    "CavityStack",
    "ConfigError",
    "DesignPoint",
    "DesignSpace",
    "FanoParams",
    "Geometry",
    "Layer",
    "MaterialDB",
    "NumericalError",
    "Pole",
    "TwoLevelParams",
    "archetype_space",
    "default_db",
    "evaluate",
    "evaluate_greens",
    "fabry_perot_space",
    "fano_params",
    "find_poles",
    "load_db",
    "mittag_leffler",
    "optimize",
    "parratt",
    "two_level_params",
    "visibility",
]
