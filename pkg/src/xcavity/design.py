"""Inverse design over cavity geometry and boundary tracing of objective sets.

A design space fixes a stack template and isotope and exposes a subset of
{d_top, d_guide_up, d_guide_down, d_bottom, z_rel, theta, omega} as bounded
variables. Optimisation runs in the unit hypercube with a bounded
Nelder-Mead simplex from Latin-hypercube starts, so every run is
reproducible from its seed.

Objectives of a design point: cls and sr (gamma0), vis (Fano visibility) and
fe (|E_in(z)|^2). For spaces without an isotope the rates are normalised to
the same emitter in free space instead (prefactor k0), which is what the
optical Fabry-Perot comparison uses.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Callable, Mapping, Sequence

import numpy as np
from scipy.optimize import minimize
from scipy.stats import qmc

from .effective import coupling_prefactor
from .errors import AllInfeasible, CavityError, ConfigError, OutOfBounds, TargetUnreachable
from .greens import evaluate_at
from .materials import MaterialDB, default_db, wavenumber
from .spectra import FanoParams, _fano_from_greens, visibility, visibility_array
from .stack import NORMAL_INCIDENCE_MRAD, CavityStack

VARIABLE_UNITS = {
    "d_top": "nm",
    "d_guide_up": "nm",
    "d_guide_down": "nm",
    "d_bottom": "nm",
    "z_rel": "1",
    "theta": "mrad",
    "omega": "keV",
}
OBJECTIVES = ("cls", "sr", "vis", "fe")
DEFAULT_SCALES = {"cls": 100.0, "sr": 100.0, "vis": 1.0, "fe": 1.0}
INFEASIBLE_COST = 1e30
ZOOM_POINTS = 65
RESEED_GAIN = 1e-6  # relative cost gain that justifies another fresh simplex
FE57_KEV = 14.4125


@dataclass(frozen=True)
class Variable:
    name: str
    lower: float
    upper: float

    def __post_init__(self):
        if self.name not in VARIABLE_UNITS:
            raise ConfigError(f"unknown design variable {self.name!r}")
        if not (math.isfinite(self.lower) and math.isfinite(self.upper) and self.lower < self.upper):
            raise ConfigError(f"{self.name}: need finite bounds with lower < upper")
        if self.name.startswith("d_") and self.lower < 0:
            raise ConfigError(f"{self.name}: thickness bounds must be >= 0")
        if self.name == "theta" and not (0 < self.lower and self.upper <= NORMAL_INCIDENCE_MRAD):
            raise ConfigError("theta bounds must lie in (0, pi/2] mrad")
        if self.name == "z_rel" and not (0 <= self.lower and self.upper <= 1):
            raise ConfigError("z_rel bounds must lie in [0, 1]")
        if self.name == "omega" and not self.lower > 0:
            raise ConfigError("omega bounds must be > 0")

    @property
    def unit(self) -> str:
        return VARIABLE_UNITS[self.name]


@dataclass(frozen=True)
class DesignPoint:
    x: tuple[float, ...]
    objectives: Mapping[str, float]
    feasible: bool
    names: tuple[str, ...] = ()

    def __getitem__(self, key: str) -> float:
        return self.objectives[key]

    def to_json(self) -> dict:
        return {
            "x": dict(zip(self.names, self.x)) if self.names else list(self.x),
            "objectives": dict(self.objectives),
            "feasible": self.feasible,
        }


@dataclass(frozen=True)
class BoundaryTrace:
    points: list[DesignPoint]
    method: str  # "linear" | "parabola"
    angles: np.ndarray  # direction (linear) or rotation (parabola) per point, rad
    pair: tuple[str, str]
    samples: np.ndarray | None = None  # every feasible (obj1, obj2) evaluated, normalised

    def coords(self, normalised_by: Mapping[str, float] | None = None) -> np.ndarray:
        s1, s2 = (1.0, 1.0) if normalised_by is None else (normalised_by[self.pair[0]], normalised_by[self.pair[1]])
        return np.array([[p[self.pair[0]] / s1, p[self.pair[1]] / s2] for p in self.points])


@dataclass(frozen=True)
class DesignSpace:
    """Stack template + isotope with a list of bounded variables.

    `isotope=None` selects free-space normalisation of the rates. `theta`
    and `omega` hold the fixed values used when they are not variables;
    `omega` defaults to the isotope transition energy.
    """

    template: CavityStack
    variables: tuple[Variable, ...]
    isotope: str | None = "Fe-57"
    theta: float | None = None
    omega: float | None = None
    scales: Mapping[str, float] = field(default_factory=lambda: dict(DEFAULT_SCALES))

    def __post_init__(self):
        object.__setattr__(self, "variables", tuple(self.variables))
        names = self.names
        if len(set(names)) != len(names):
            raise ConfigError("duplicate design variable")
        if "theta" not in names and self.theta is None:
            raise ConfigError("theta must be a variable or fixed")
        if self.isotope is None and "omega" not in names and self.omega is None:
            raise ConfigError("omega must be a variable or fixed when no isotope is set")
        for n in names:
            if n.startswith("d_"):
                self.layer_of(n)

    @property
    def names(self) -> tuple[str, ...]:
        return tuple(v.name for v in self.variables)

    @property
    def lower(self) -> np.ndarray:
        return np.array([v.lower for v in self.variables])

    @property
    def upper(self) -> np.ndarray:
        return np.array([v.upper for v in self.variables])

    def layer_of(self, name: str) -> int:
        r = self.template.resonant_index
        last = len(self.template.layers) - 1
        idx = {"d_top": 0, "d_guide_up": r - 1, "d_guide_down": r + 1, "d_bottom": last}[name]
        if not 0 <= idx <= last or idx == r:
            raise ConfigError(f"{name} has no layer in template {self.template}")
        return idx

    def to_unit(self, x) -> np.ndarray:
        return (np.asarray(x, dtype=float) - self.lower) / (self.upper - self.lower)

    def from_unit(self, u) -> np.ndarray:
        return self.lower + np.asarray(u, dtype=float) * (self.upper - self.lower)

    def build(self, x) -> tuple[CavityStack, float, float]:
        """Stack, theta (mrad) and omega (keV) at the variable vector `x`."""
        stack = self.template
        theta, omega, z_rel = self.theta, self.omega, stack.z_rel
        for name, value in zip(self.names, x):
            if name.startswith("d_"):
                stack = stack.with_thickness(self.layer_of(name), float(value))
            elif name == "theta":
                theta = float(value)
            elif name == "omega":
                omega = float(value)
            else:
                z_rel = float(value)
        if z_rel != stack.z_rel:
            stack = replace(stack, z_rel=z_rel)
        return stack, theta, omega

    def to_json(self) -> dict:
        return {
            "template": self.template.to_json(),
            "isotope": self.isotope,
            "theta": self.theta,
            "omega": self.omega,
            "variables": [{"name": v.name, "lower": v.lower, "upper": v.upper} for v in self.variables],
            "scales": dict(self.scales),
        }

    @classmethod
    def from_json(cls, doc: dict) -> "DesignSpace":
        try:
            scales = dict(DEFAULT_SCALES)
            scales.update(doc.get("scales", {}))
            return cls(
                CavityStack.from_json(doc["template"]),
                tuple(Variable(v["name"], float(v["lower"]), float(v["upper"])) for v in doc["variables"]),
                doc.get("isotope", "Fe-57"),
                doc.get("theta"),
                doc.get("omega"),
                scales,
            )
        except (KeyError, TypeError) as exc:
            raise ConfigError(f"malformed design space: {exc}") from None


@dataclass(frozen=True)
class FunctionSpace:
    """Design space backed by a plain function x -> objectives (for stubs and tests)."""

    variables: tuple[Variable, ...]
    fn: Callable[[np.ndarray], Mapping[str, float]]
    scales: Mapping[str, float] = field(default_factory=lambda: dict(DEFAULT_SCALES))

    names = DesignSpace.names
    lower = DesignSpace.lower
    upper = DesignSpace.upper
    to_unit = DesignSpace.to_unit
    from_unit = DesignSpace.from_unit


def archetype_space(
    cladding: str = "Pt",
    guide: str = "C",
    isotope: str = "Fe-57",
    substrate: str = "Si",
    d_resonant: float = 0.574,
    db: MaterialDB | None = None,
    variables: Sequence[str] = ("d_top", "d_guide_up", "d_guide_down", "d_bottom", "theta"),
    bounds: Mapping[str, tuple[float, float]] | None = None,
    z_rel: float = 0.5,
) -> DesignSpace:
    """cladding/guide/isotope/guide/cladding/substrate with default bounds.

    Thicknesses in [0, 400] nm, z_rel in [0.05, 0.95] and theta in
    [0.5, 10] mrad at 14.4 keV, scaled by 14.4125 keV / omega_nuc for other
    isotopes so the same range of k_perp is covered.
    """
    db = default_db() if db is None else db
    omega = db.isotope(isotope).omega_nuc
    scale = FE57_KEV / omega
    defaults = {
        "d_top": (0.0, 400.0),
        "d_guide_up": (0.0, 400.0),
        "d_guide_down": (0.0, 400.0),
        "d_bottom": (0.0, 400.0),
        "z_rel": (0.05, 0.95),
        "theta": (0.5 * scale, 10.0 * scale),
    }
    defaults["omega"] = (omega * (1 - 1e-3), omega * (1 + 1e-3))
    defaults.update(bounds or {})
    template = CavityStack.from_spec(
        [(cladding, 20.0), (guide, 40.0), (isotope, d_resonant), (guide, 40.0), (cladding, 20.0)],
        substrate,
        2,
        z_rel,
    )
    fixed_theta = None if "theta" in variables else 0.5 * sum(defaults["theta"])
    return DesignSpace(
        template,
        tuple(Variable(n, *defaults[n]) for n in variables),
        isotope,
        fixed_theta,
        omega,
    )


FP_GAP = "fp-gap"
FP_MIRROR = "diamond"


def fabry_perot_space(
    lambda_nm: float = 700.0,
    mirror: str = FP_MIRROR,
    gap: str = FP_GAP,
    variables: Sequence[str] = ("d_guide_up", "d_guide_down"),
    bounds: Mapping[str, tuple[float, float]] | None = None,
    d_mirror: float | None = None,
    sheet_nm: float = 0.1,
) -> DesignSpace:
    """Optical Fabry-Perot cavity at normal incidence in vacuum.

    mirror/gap/emitter sheet/gap/mirror/vacuum. The emitter sheet is made of
    gap material so the gap halves d_guide_up and d_guide_down fix both the
    gap length and the emitter position. Mirrors default to quarter-wave
    thickness at `lambda_nm` for n = 2.4.
    """
    omega = 1e-3 * 2 * math.pi * 197.3269804 / lambda_nm
    d_mirror = lambda_nm / (4 * 2.4) if d_mirror is None else d_mirror
    defaults = {
        "d_top": (0.0, 400.0),
        "d_guide_up": (0.0, 400.0),
        "d_guide_down": (0.0, 400.0),
        "d_bottom": (0.0, 400.0),
        "omega": (omega * 700 / 750, omega * 700 / 650),
    }
    defaults.update(bounds or {})
    template = CavityStack.from_spec(
        [(mirror, d_mirror), (gap, 200.0), (gap, sheet_nm), (gap, 200.0), (mirror, d_mirror)],
        "vacuum",
        2,
        0.5,
    )
    return DesignSpace(
        template,
        tuple(Variable(n, *defaults[n]) for n in variables),
        None,
        NORMAL_INCIDENCE_MRAD,
        None if "omega" in variables else omega,
    )


def _nan_objectives():
    return {k: float("nan") for k in OBJECTIVES}


def _prefactor(db: MaterialDB, space: DesignSpace, stack: CavityStack, omega):
    if space.isotope is not None:
        iso = db.isotope(space.isotope)
        omega = iso.omega_nuc if omega is None else omega
        return coupling_prefactor(iso, stack.resonant.thickness), omega
    return wavenumber(omega), omega


def _objectives(db: MaterialDB, space: DesignSpace, x) -> dict:
    stack, theta, omega = space.build(x)
    prefactor, omega = _prefactor(db, space, stack, omega)
    g = evaluate_at(db, stack, omega, theta)
    r_el, a, phi, center, hwhm = _fano_from_greens(g, prefactor)
    fp = FanoParams(complex(r_el), complex(a), float(phi), float(center), float(hwhm))
    return {
        "cls": float(center),
        "sr": float(2 * hwhm - 1),
        "vis": float(visibility(fp)),
        "fe": float(g.field_enhancement),
    }


def objectives_along_theta(db: MaterialDB, space: DesignSpace, x, thetas, keys=OBJECTIVES) -> dict:
    """Objectives `keys` at `x` with theta replaced by each entry of `thetas` (vectorised)."""
    stack, _, omega = space.build(x)
    prefactor, omega = _prefactor(db, space, stack, omega)
    thetas = np.asarray(thetas, dtype=float)
    with np.errstate(all="ignore"):
        g = evaluate_at(db, stack, omega, thetas)
        r_el, a, phi, center, hwhm = _fano_from_greens(g, prefactor)
        out = {"cls": center, "sr": 2 * hwhm - 1, "fe": g.field_enhancement}
        if "vis" in keys:
            out["vis"] = visibility_array(r_el, a, phi, hwhm)
    return {k: out[k] for k in keys}


class _KeyProbe(dict):
    def __init__(self):
        super().__init__()
        self.seen = set()

    def __getitem__(self, key):
        self.seen.add(key)
        return 1.0


def _cost_keys(cost: Cost) -> tuple[str, ...]:
    """Objectives a cost reads, found by calling it once on a probe."""
    probe = _KeyProbe()
    try:
        cost(probe)
    except Exception:
        return OBJECTIVES
    keys = tuple(k for k in OBJECTIVES if k in probe.seen)
    return keys if keys and probe.seen <= set(OBJECTIVES) else OBJECTIVES


def evaluate(db: MaterialDB | None, space, x) -> DesignPoint:
    """Objectives at `x`; forward-model failures give an infeasible point."""
    x = np.asarray(x, dtype=float)
    if x.shape != (len(space.variables),):
        raise OutOfBounds(f"expected {len(space.variables)} variables, got shape {x.shape}")
    if np.any(x < space.lower) or np.any(x > space.upper):
        raise OutOfBounds(f"x = {x.tolist()} outside bounds")
    try:
        with np.errstate(all="ignore"):
            obj = dict(space.fn(x)) if isinstance(space, FunctionSpace) else _objectives(db, space, x)
    except CavityError:
        return DesignPoint(tuple(x.tolist()), _nan_objectives(), False, space.names)
    feasible = all(math.isfinite(v) for v in obj.values())
    return DesignPoint(tuple(x.tolist()), obj, feasible, space.names)


Cost = Callable[[Mapping[str, float]], float]


def normalised(obj: Mapping[str, float], scales: Mapping[str, float]) -> dict:
    return {k: v / scales.get(k, 1.0) for k, v in obj.items()}


def maximize(name: str) -> Cost:
    return lambda o: -o[name]


def minimize_objective(name: str) -> Cost:
    return lambda o: o[name]


def linear_cost(weights: Mapping[str, float]) -> Cost:
    """Minimise sum w_k * objective_k (normalised objectives)."""
    return lambda o: sum(w * o[k] for k, w in weights.items())


def cost_from_json(doc: Mapping) -> Cost:
    if "maximize" in doc:
        return maximize(doc["maximize"])
    if "minimize" in doc:
        return minimize_objective(doc["minimize"])
    if "linear" in doc:
        return linear_cost(doc["linear"])
    raise ConfigError(f"cost needs maximize, minimize or linear: {dict(doc)}")


@dataclass
class _Recorder:
    points: list = field(default_factory=list)

    def add(self, p: DesignPoint):
        if p.feasible:
            self.points.append(p)


def latin_starts(n_vars: int, restarts: int, seed: int) -> np.ndarray:
    return qmc.LatinHypercube(d=n_vars, rng=np.random.default_rng(seed)).random(restarts)


class _Objective:
    """Cost over the free unit coordinates; theta is profiled out when requested.

    Tracks the best feasible point seen and optionally records every
    feasible evaluation.
    """

    def __init__(self, db, space, cost: Cost, record, theta_grid: int):
        self.db, self.space, self.cost, self.record = db, space, cost, record
        self.profile = theta_grid > 0 and isinstance(space, DesignSpace) and "theta" in space.names
        self.i_theta = space.names.index("theta") if self.profile else -1
        self.free = [i for i in range(len(space.variables)) if i != self.i_theta]
        self.theta_grid = theta_grid
        self.keys = _cost_keys(cost) if self.profile else OBJECTIVES
        self.cache: dict = {}
        self.reset()

    def reset(self):
        self.best, self.best_cost = None, math.inf

    def _score(self, p: DesignPoint) -> float:
        if self.record is not None:
            self.record.add(p)
        if not p.feasible:
            return INFEASIBLE_COST
        c = float(self.cost(normalised(p.objectives, self.space.scales)))
        return c if math.isfinite(c) else INFEASIBLE_COST

    def _point(self, u_full) -> tuple[DesignPoint, float]:
        x = self.space.from_unit(u_full).clip(self.space.lower, self.space.upper)
        p = evaluate(self.db, self.space, x)
        return p, self._score(p)

    def _grid_costs(self, x, grid):
        obj = objectives_along_theta(self.db, self.space, x, grid, self.keys)
        with np.errstate(all="ignore"):
            c = np.asarray(self.cost(normalised(obj, self.space.scales)), dtype=float) * np.ones(len(grid))
        bad = ~np.isfinite(c)
        for v in obj.values():
            bad |= ~np.isfinite(v)
        c[bad] = np.inf
        return c

    def _profiled(self, u_full) -> tuple[DesignPoint, float]:
        """Best theta from a coarse scan followed by two 65-point zooms."""
        sp, i = self.space, self.i_theta
        lo, hi = sp.lower[i], sp.upper[i]
        x = sp.from_unit(u_full).clip(sp.lower, sp.upper)
        grid = np.linspace(lo, hi, self.theta_grid)
        try:
            for _ in range(3):
                c = self._grid_costs(x, grid)
                if not np.any(np.isfinite(c)):
                    return self._point(u_full)
                j = int(np.argmin(c))
                best = grid[j]
                grid = np.linspace(grid[max(j - 1, 0)], grid[min(j + 1, len(grid) - 1)], ZOOM_POINTS)
        except CavityError:
            return self._point(u_full)
        u = np.array(u_full, dtype=float)
        u[i] = (best - lo) / (hi - lo)
        return self._point(u)

    def __call__(self, u_free) -> float:
        key = tuple(np.clip(u_free, 0.0, 1.0).tolist())
        if key in self.cache:
            p, c = self.cache[key]
        else:
            u = np.zeros(len(self.space.variables))
            u[self.free] = key
            p, c = self._profiled(u) if self.profile else self._point(u)
            self.cache[key] = (p, c)
        if p.feasible and c < self.best_cost:
            self.best, self.best_cost = p, c
        return c


def _simplex_search(f: _Objective, u0, space, xatol: float, max_evals: int) -> None:
    """Bounded Nelder-Mead, re-seeded from its own result while that still helps.

    A collapsed simplex in a narrow curved valley reports convergence early;
    a fresh simplex at the same point continues along the valley.
    """
    budget, u, last = max_evals, u0, math.inf
    while budget > 0:
        res = minimize(
            f,
            u,
            method="Nelder-Mead",
            bounds=[(0.0, 1.0)] * len(f.free),
            options={"xatol": xatol, "fatol": math.inf, "maxfev": budget},
        )
        budget -= res.nfev
        if f.best is None or (math.isfinite(last) and not f.best_cost < last - RESEED_GAIN * max(1.0, abs(last))):
            break
        last = f.best_cost
        u = np.clip(space.to_unit(f.best.x), 0.0, 1.0)[f.free]


def optimize(
    db: MaterialDB | None,
    space,
    cost: Cost,
    restarts: int = 32,
    seed: int = 0,
    max_evals: int = 2000,
    xatol: float = 1e-6,
    starts=None,
    record: _Recorder | None = None,
    theta_grid: int = 2048,
) -> DesignPoint:
    """Best feasible point of `cost` (a function of normalised objectives).

    Bounded Nelder-Mead in unit coordinates from `restarts` Latin-hypercube
    starts (plus any explicit `starts`, given in variable units). Stops per
    restart when the simplex is within `xatol` and a fresh simplex at the
    result no longer improves it, or after `max_evals` evaluations.

    Cavity resonances are needles in theta, so for cavity spaces with a theta
    variable theta is profiled out: every simplex evaluation picks the best
    theta on a `theta_grid`-point scan refined by two 65-point zooms. Costs
    must then accept arrays of objectives. `theta_grid=0` disables this.
    """
    if restarts < 1:
        raise ConfigError("restarts must be >= 1")
    f = _Objective(db, space, cost, record, theta_grid)
    u_starts = list(latin_starts(len(f.free), restarts, seed)) if f.free else [np.zeros(0)]
    if starts is not None:
        u_starts += [np.clip(space.to_unit(s), 0, 1)[f.free] for s in starts]
    results = []
    for k, u0 in enumerate(u_starts):
        f.reset()
        if f.free:
            _simplex_search(f, np.asarray(u0, dtype=float), space, xatol, max_evals)
        else:
            f(np.zeros(0))
        if f.best is not None:
            results.append((f.best_cost, k, f.best))
    if not results:
        raise AllInfeasible("no feasible point found in any restart")
    results.sort(key=lambda t: (t[0], t[1]))
    return results[0][2]


def _pair_scales(space, pair):
    return space.scales.get(pair[0], 1.0), space.scales.get(pair[1], 1.0)


def _angles(n, angles):
    if angles is not None:
        return np.asarray(angles, dtype=float)
    return 2 * np.pi * np.arange(n) / n


def trace_boundary_linear(
    db: MaterialDB | None,
    space,
    pair: tuple[str, str],
    n_directions: int = 16,
    restarts: int = 8,
    seed: int = 0,
    max_evals: int = 2000,
    angles=None,
) -> BoundaryTrace:
    """Support points maximising cos(phi) obj1' + sin(phi) obj2' for phi on [0, 2 pi)."""
    if angles is None and n_directions < 4:
        raise ConfigError("n_directions must be >= 4")
    phis = _angles(n_directions, angles)
    o1, o2 = pair
    rec = _Recorder()
    points = []
    for phi in phis:
        c, s = math.cos(phi), math.sin(phi)
        points.append(
            optimize(db, space, lambda o, c=c, s=s: -(c * o[o1] + s * o[o2]), restarts, seed, max_evals, record=rec)
        )
    return BoundaryTrace(points, "linear", phis, (o1, o2), _samples(rec, space, pair))


def _samples(rec: _Recorder, space, pair):
    s1, s2 = _pair_scales(space, pair)
    return np.array([[p[pair[0]] / s1, p[pair[1]] / s2] for p in rec.points]).reshape(-1, 2)


def parabola_cost(anchor, psi: float, kappa: float, pair) -> Cost:
    """Minimise -(y' - kappa x'^2) with (x', y') the anchor-centred coordinates rotated by psi.

    y' runs along the direction psi, x' across it.
    """
    a1, a2 = anchor
    c, s = math.cos(psi), math.sin(psi)

    def cost(o):
        dx, dy = o[pair[0]] - a1, o[pair[1]] - a2
        yp = c * dx + s * dy
        xp = -s * dx + c * dy
        return -(yp - kappa * xp * xp)

    return cost


def trace_boundary_parabola(
    db: MaterialDB | None,
    space,
    pair: tuple[str, str],
    anchor: tuple[float, float],
    n_rotations: int = 16,
    kappa: float = 50.0,
    restarts: int = 8,
    seed: int = 0,
    max_evals: int = 2000,
    angles=None,
) -> BoundaryTrace:
    """Boundary points from narrow rotated parabolas opening away from `anchor`.

    `anchor` is in objective units and must lie inside the set; `kappa`
    applies after normalisation by the space scales.
    """
    s1, s2 = _pair_scales(space, pair)
    a = (anchor[0] / s1, anchor[1] / s2)
    psis = _angles(n_rotations, angles)
    rec = _Recorder()
    points = [
        optimize(db, space, parabola_cost(a, psi, kappa, pair), restarts, seed, max_evals, record=rec)
        for psi in psis
    ]
    return BoundaryTrace(points, "parabola", psis, tuple(pair), _samples(rec, space, pair))


def constrained_best(
    db: MaterialDB | None,
    space,
    target: tuple[float, float],
    maximize: str = "vis",
    tol: float = 1.0,
    restarts: int = 16,
    seed: int = 0,
    max_evals: int = 2000,
    penalty: float = 1.0,
    stages: int = 3,
) -> DesignPoint:
    """Maximise `maximize` subject to |cls - cls*| < tol and |sr - sr*| < tol.

    Exact (L1) penalty on the normalised constraint violation, weight ramped
    x10 per stage; later stages restart from the earlier winners.
    """
    cls_t, sr_t = target
    sc, ss = space.scales.get("cls", 1.0), space.scales.get("sr", 1.0)

    def violation(o):
        return np.maximum(0.0, np.abs(o["cls"] - cls_t / sc) - 0.5 * tol / sc) + np.maximum(
            0.0, np.abs(o["sr"] - sr_t / ss) - 0.5 * tol / ss
        )

    starts: list = []
    best = None
    for k in range(stages):
        mu = penalty * 10**k
        best = optimize(
            db,
            space,
            lambda o, mu=mu: -o[maximize] + mu * violation(o),
            restarts,
            seed + k,
            max_evals,
            starts=starts or None,
        )
        starts = [best.x]
    if not (abs(best["cls"] - cls_t) < tol and abs(best["sr"] - sr_t) < tol):
        raise TargetUnreachable(
            f"target (cls, sr) = {target} not met within {tol}: got ({best['cls']:.6g}, {best['sr']:.6g})"
        )
    return best


def calibrate_scales(db: MaterialDB | None, space, samples: int = 256, seed: int = 0):
    """Copy of `space` with vis and fe scales set to their maxima over a pilot sweep."""
    u = latin_starts(len(space.variables), samples, seed)
    pts = [evaluate(db, space, space.from_unit(v)) for v in u]
    scales = dict(space.scales)
    for k in ("vis", "fe"):
        vals = [p[k] for p in pts if p.feasible and p[k] > 0]
        if vals:
            scales[k] = max(vals)
    return replace(space, scales=scales)


@dataclass(frozen=True)
class GridScan:
    names: tuple[str, str]
    axes: tuple[np.ndarray, np.ndarray]
    values: Mapping[str, np.ndarray]  # objective -> (n1, n2)

    def argmax(self, key: str) -> tuple[int, int]:
        v = np.where(np.isfinite(self.values[key]), self.values[key], -np.inf)
        return tuple(int(i) for i in np.unravel_index(np.argmax(v), v.shape))

    def at(self, key: str, idx) -> float:
        return float(self.values[key][idx])


def grid_scan(db: MaterialDB | None, space, n1: int = 81, n2: int = 81) -> GridScan:
    """All objectives on a regular grid over the first two variables (others at mid-range)."""
    if len(space.variables) < 2:
        raise ConfigError("grid scan needs at least two variables")
    ax1 = np.linspace(space.lower[0], space.upper[0], n1)
    ax2 = np.linspace(space.lower[1], space.upper[1], n2)
    mid = 0.5 * (space.lower + space.upper)
    out = {k: np.full((n1, n2), np.nan) for k in OBJECTIVES}
    for i, a in enumerate(ax1):
        for j, b in enumerate(ax2):
            x = mid.copy()
            x[0], x[1] = a, b
            p = evaluate(db, space, x)
            for k in OBJECTIVES:
                out[k][i, j] = p[k]
    return GridScan((space.names[0], space.names[1]), (ax1, ax2), out)


@dataclass(frozen=True)
class SurveyRow:
    cladding: str
    guide: str
    isotope: str
    objective: str
    best: DesignPoint


def survey(
    db: MaterialDB,
    families: Sequence[tuple[str, str, str]],
    objectives: Sequence[str] = ("sr", "fe"),
    restarts: int = 16,
    seed: int = 0,
    max_evals: int = 2000,
    substrate: str = "Si",
    d_resonant: float = 0.574,
) -> list[SurveyRow]:
    """Maximise each objective for every (cladding, guide, isotope) family."""
    rows = []
    for cladding, guide, iso in families:
        space = archetype_space(cladding, guide, iso, substrate, d_resonant, db=db)
        for name in objectives:
            best = optimize(db, space, maximize(name), restarts, seed, max_evals)
            rows.append(SurveyRow(cladding, guide, iso, name, best))
    return rows


def space_from_json(doc: Mapping, db: MaterialDB | None = None):
    """Design space from a run-config ``space`` entry.

    Accepts ``{"archetype": {...}}``, ``{"fabry_perot": {...}}`` (keyword
    arguments of the matching constructors) or an explicit
    ``{"template": ..., "variables": [...]}`` document.
    """
    try:
        if "archetype" in doc:
            a = dict(doc["archetype"])
            bounds = {k: tuple(v) for k, v in a.pop("bounds", {}).items()}
            if "variables" in a:
                a["variables"] = tuple(a["variables"])
            space = archetype_space(db=db, bounds=bounds, **a)
        elif "fabry_perot" in doc:
            a = dict(doc["fabry_perot"])
            bounds = {k: tuple(v) for k, v in a.pop("bounds", {}).items()}
            if "variables" in a:
                a["variables"] = tuple(a["variables"])
            space = fabry_perot_space(bounds=bounds, **a)
        else:
            return DesignSpace.from_json(doc)
    except TypeError as exc:
        raise ConfigError(f"bad design space entry: {exc}") from None
    if "scales" in doc:
        scales = dict(space.scales)
        scales.update(doc["scales"])
        space = replace(space, scales=scales)
    return space


@dataclass(frozen=True)
class DesignRun:
    space: DesignSpace
    cost: Mapping | None
    seed: int = 0
    restarts: int = 32
    max_evals: int = 2000
    calibrate: bool = False
    trace: Mapping | None = None

    @classmethod
    def from_json(cls, doc: Mapping, db: MaterialDB | None = None) -> "DesignRun":
        if "space" not in doc:
            raise ConfigError("design config needs a 'space' entry")
        unknown = set(doc) - {"space", "cost", "seed", "restarts", "max_evals", "calibrate", "trace"}
        if unknown:
            raise ConfigError(f"unknown design config keys: {sorted(unknown)}")
        return cls(
            space_from_json(doc["space"], db),
            doc.get("cost"),
            int(doc.get("seed", 0)),
            int(doc.get("restarts", 32)),
            int(doc.get("max_evals", 2000)),
            bool(doc.get("calibrate", False)),
            doc.get("trace"),
        )

    def resolved(self) -> dict:
        return {
            "space": self.space.to_json(),
            "cost": None if self.cost is None else dict(self.cost),
            "seed": self.seed,
            "restarts": self.restarts,
            "max_evals": self.max_evals,
            "calibrate": self.calibrate,
            "trace": None if self.trace is None else dict(self.trace),
        }


def run_trace(db: MaterialDB, run: DesignRun) -> BoundaryTrace:
    t = dict(run.trace or {})
    method = t.get("method", "linear")
    pair = tuple(t.get("pair", ("cls", "sr")))
    if len(pair) != 2 or any(p not in OBJECTIVES for p in pair):
        raise ConfigError(f"trace pair must name two of {OBJECTIVES}, got {pair}")
    n = int(t.get("n", 16))
    common = dict(restarts=run.restarts, seed=run.seed, max_evals=run.max_evals)
    if method == "linear":
        return trace_boundary_linear(db, run.space, pair, n, **common)
    if method == "parabola":
        if "anchor" not in t:
            raise ConfigError("parabola trace needs an 'anchor' point")
        return trace_boundary_parabola(
            db, run.space, pair, tuple(t["anchor"]), n, float(t.get("kappa", 50.0)), **common
        )
    raise ConfigError(f"trace method must be linear or parabola, got {method!r}")
