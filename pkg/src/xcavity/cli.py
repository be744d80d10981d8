"""Command-line front end.

Every command writes a comma-separated table (or JSON) whose first lines are
``#`` comments holding the command name and the fully resolved
configuration, so identical inputs give byte-identical files. Sweeps use
``start:stop:count`` in the unit of the swept variable. Exit status is 0 on
success, 1 on configuration or usage errors and 2 on numerical failures.
"""
from __future__ import annotations

import argparse
import io
import json
import sys
from dataclasses import replace
from pathlib import Path

import numpy as np

from . import design, report
from .effective import resonant_isotope, two_level_params_at
from .errors import CavityError, ConfigError, NumericalError
from .materials import default_db_path, load_db
from .modes import find_poles
from .spectra import (
    extrema_closed_form,
    fano_params,
    fano_params_at,
    reflectance,
    rocking_curve,
    visibility,
    visibility_array,
)
from .stack import CavityStack, Geometry


class UsageError(ConfigError):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.format_usage()}{self.prog}: error: {message}")


def parse_sweep(text: str) -> np.ndarray:
    """``start:stop:count`` -> linspace(start, stop, count)."""
    parts = text.split(":")
    if len(parts) != 3:
        raise ConfigError(f"sweep must be start:stop:count, got {text!r}")
    try:
        a, b, n = float(parts[0]), float(parts[1]), int(parts[2])
    except ValueError:
        raise ConfigError(f"sweep must be start:stop:count, got {text!r}") from None
    if n < 1:
        raise ConfigError(f"sweep count must be >= 1, got {n}")
    return np.linspace(a, b, n)


def parse_window(text: str) -> tuple[float, float]:
    parts = text.split(":")
    try:
        a, b = (float(p) for p in parts)
    except ValueError:
        raise ConfigError(f"window must be start:stop, got {text!r}") from None
    return a, b


def _read_json(path) -> dict:
    try:
        return json.loads(Path(path).read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot read {path}: {exc}") from None


SWEEP_HELP = "sweep as start:stop:count"


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="xcavity", description=__doc__.split("\n\n")[0])
    common = _Parser(add_help=False)
    common.add_argument("--db", help="material database directory (default: $XCAVITY_DB or bundled)")
    common.add_argument("--out", "-o", help="output file (default: standard output)")
    common.add_argument("--plot", help="also render a PNG figure to this path")
    sub = p.add_subparsers(dest="command", metavar="command", parser_class=_Parser)

    s = sub.add_parser("spectrum", parents=[common], help="Fano reflectance over detuning")
    s.add_argument("--stack", required=True)
    s.add_argument("--theta", type=float, required=True, help="incidence angle [mrad]")
    s.add_argument("--isotope")
    s.add_argument("--detuning", default="-200:200:4001", help=f"detuning [gamma0], {SWEEP_HELP}")

    s = sub.add_parser("rocking", parents=[common], help="electronic reflectivity over theta")
    s.add_argument("--stack", required=True)
    s.add_argument("--theta-sweep", required=True, help=f"angles [mrad], {SWEEP_HELP}")
    s.add_argument("--omega", type=float, help="energy [keV] (default: resonant isotope)")

    s = sub.add_parser("params", parents=[common], help="two-level parameters cls, sr, fe, vis")
    s.add_argument("--stack", required=True)
    g = s.add_mutually_exclusive_group(required=True)
    g.add_argument("--theta", type=float, help="angle [mrad]")
    g.add_argument("--theta-sweep", help=f"angles [mrad], {SWEEP_HELP}")
    s.add_argument("--isotope")

    s = sub.add_parser("poles", parents=[common], help="complex-angle pole report (JSON)")
    s.add_argument("--stack", required=True)
    s.add_argument("--window", required=True, help="Re theta window start:stop [mrad]")
    s.add_argument("--height", type=float, help="max |Im theta| [mrad] (default: window width)")
    s.add_argument("--seeds", type=int, default=4000)
    s.add_argument("--omega", type=float, help="energy [keV] (default: resonant isotope)")

    for name, text in (("optimize", "scalar design run"), ("trace", "boundary trace")):
        s = sub.add_parser(name, parents=[common], help=text)
        s.add_argument("--design", required=True, help="design run config JSON")
        s.add_argument("--seed", type=int)
        s.add_argument("--restarts", type=int)
        if name == "trace":
            s.add_argument("--summary", help="summary CSV of the traced boundary")

    s = sub.add_parser("fp", parents=[common], help="Fabry-Perot scan of Gamma and |E|^2")
    s.add_argument("--lambda-nm", type=float, default=700.0)
    s.add_argument("--vars", default="d_guide_up,d_guide_down", help="two comma-separated variables")
    s.add_argument("--n1", type=int, default=81)
    s.add_argument("--n2", type=int, default=81)

    s = sub.add_parser("survey", parents=[common], help="material/isotope batch optimisation")
    s.add_argument("--families", default="Pt/C/Fe-57,Pd/C/Fe-57,Pd/C/Sn-119,Pd/C/Sc-45",
                   help="comma-separated cladding/guide/isotope triples")
    s.add_argument("--objectives", default="sr,fe")
    s.add_argument("--restarts", type=int, default=16)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--d-resonant", type=float, default=0.574)
    return p


def _config(ns, **extra) -> dict:
    cfg = {k: v for k, v in vars(ns).items() if k not in ("out", "plot") and v is not None}
    cfg["db"] = str(Path(ns.db) if ns.db else default_db_path())
    cfg.update(extra)
    return cfg


def _load_stack(path) -> CavityStack:
    return CavityStack.load(path)


def cmd_spectrum(ns, db, out):
    stack = _load_stack(ns.stack)
    iso = resonant_isotope(db, stack, ns.isotope)
    fp = fano_params(db, stack, iso, Geometry(iso.omega_nuc, ns.theta))
    det = parse_sweep(ns.detuning)
    inten = reflectance(fp, det)
    report.write_header(out, "spectrum", _config(ns, stack_doc=stack.to_json(), isotope=iso.name))
    report.write_table(out, ["detuning_gamma0", "reflectance"], zip(det, inten))
    summary = {
        "visibility": visibility(fp),
        "cls": fp.center,
        "sr": 2 * fp.hwhm - 1,
        "re_r_el": fp.r_el.real,
        "im_r_el": fp.r_el.imag,
        "re_A": fp.a_weight.real,
        "im_A": fp.a_weight.imag,
        "phi": fp.phi,
    }
    if not fp.zero_background:
        dp, dm = extrema_closed_form(fp)
        summary["delta_plus"] = dp + fp.center
        summary["delta_minus"] = dm + fp.center
    report.write_footer(out, summary)
    return lambda path: _plot("spectrum", path, det, inten, title=str(stack))


def _omega(db, stack, omega):
    return resonant_isotope(db, stack).omega_nuc if omega is None else omega


def cmd_rocking(ns, db, out):
    stack = _load_stack(ns.stack)
    omega = _omega(db, stack, ns.omega)
    th = parse_sweep(ns.theta_sweep)
    spec = rocking_curve(db, stack, th, omega)
    report.write_header(out, "rocking", _config(ns, stack_doc=stack.to_json(), omega=omega))
    report.write_table(out, ["theta_mrad", "reflectivity"], zip(th, spec.intensity))
    return lambda path: _plot("rocking", path, th, spec.intensity, title=str(stack))


def cmd_params(ns, db, out):
    stack = _load_stack(ns.stack)
    iso = resonant_isotope(db, stack, ns.isotope)
    th = np.array([ns.theta]) if ns.theta is not None else parse_sweep(ns.theta_sweep)
    if np.any(th <= 0):
        raise ConfigError("angles must be > 0 mrad")
    with np.errstate(all="ignore"):
        p = two_level_params_at(db, stack, iso, th)
        r_el, a, phi, _, hwhm = fano_params_at(db, stack, iso, th)
        vis = visibility_array(r_el, a, phi, hwhm)
    if not np.all(np.isfinite(p.sr)):
        raise NumericalError("non-finite two-level parameters")
    report.write_header(out, "params", _config(ns, stack_doc=stack.to_json(), isotope=iso.name))
    rabi = np.asarray(p.rabi_rel)
    report.write_table(
        out,
        ["theta_mrad", "cls", "sr", "fe", "vis", "re_rabi_rel", "im_rabi_rel"],
        zip(th, p.cls, p.sr, p.fe, vis, rabi.real, rabi.imag),
    )
    i = int(np.argmax(p.sr))
    report.write_footer(out, {"theta_at_max_sr": th[i], "max_sr": p.sr[i], "max_fe": np.max(p.fe), "max_vis": np.max(vis)})
    return lambda path: _plot("params", path, th, p.cls, p.sr, p.fe, title=str(stack))


def cmd_poles(ns, db, out):
    stack = _load_stack(ns.stack)
    omega = _omega(db, stack, ns.omega)
    window = parse_window(ns.window)
    res = find_poles(db, stack, omega, window, ns.height, ns.seeds)
    report.write_header(out, "poles", _config(ns, stack_doc=stack.to_json(), omega=omega, dropped_seeds=res.dropped))
    out.write(report.dumps([p.to_json() for p in res.poles]) + "\n")
    return lambda path: _plot(
        "poles", path, [p.theta0 for p in res.poles], np.array([abs(p.residue) for p in res.poles]), title=str(stack)
    )


def _design_run(ns, db):
    doc = _read_json(ns.design)
    if ns.seed is not None:
        doc["seed"] = ns.seed
    if ns.restarts is not None:
        doc["restarts"] = ns.restarts
    run = design.DesignRun.from_json(doc, db)
    if run.calibrate:
        run = replace(run, space=design.calibrate_scales(db, run.space, seed=run.seed))
    return run


def cmd_optimize(ns, db, out):
    run = _design_run(ns, db)
    if run.cost is None:
        raise ConfigError("optimize needs a 'cost' entry")
    best = design.optimize(
        db, run.space, design.cost_from_json(run.cost), run.restarts, run.seed, run.max_evals
    )
    report.write_header(out, "optimize", _config(ns, run=run.resolved()))
    report.write_jsonl(out, [best.to_json()])
    return None


def cmd_trace(ns, db, out):
    run = _design_run(ns, db)
    tr = design.run_trace(db, run)
    cfg = _config(ns, run=run.resolved())
    report.write_header(out, "trace", cfg)
    report.write_jsonl(
        out, [dict(p.to_json(), angle=float(a), method=tr.method) for p, a in zip(tr.points, tr.angles)]
    )
    if ns.summary:
        buf = io.StringIO()
        report.write_header(buf, "trace summary", cfg)
        report.write_table(
            buf,
            ["angle_rad", *tr.pair, "feasible"],
            [(a, p[tr.pair[0]], p[tr.pair[1]], p.feasible) for p, a in zip(tr.points, tr.angles)],
        )
        _write_text(ns.summary, buf.getvalue())
    s1, s2 = run.space.scales.get(tr.pair[0], 1.0), run.space.scales.get(tr.pair[1], 1.0)
    return lambda path: _plot("trace", path, tr.coords({tr.pair[0]: s1, tr.pair[1]: s2}), tr.samples, tr.pair)


def cmd_fp(ns, db, out):
    names = tuple(v.strip() for v in ns.vars.split(","))
    if len(names) != 2:
        raise ConfigError("--vars needs exactly two variables")
    space = design.fabry_perot_space(ns.lambda_nm, variables=names)
    scan = design.grid_scan(db, space, ns.n1, ns.n2)
    i, j = scan.argmax("sr"), scan.argmax("fe")
    report.write_header(out, "fp", _config(ns, space=space.to_json()))
    rows = (
        (a, b, scan.values["sr"][k, l], scan.values["fe"][k, l], scan.values["cls"][k, l])
        for k, a in enumerate(scan.axes[0])
        for l, b in enumerate(scan.axes[1])
    )
    report.write_table(out, [*names, "gamma", "fe", "shift"], rows)
    report.write_footer(
        out,
        {
            "argmax_gamma": [float(scan.axes[0][i[0]]), float(scan.axes[1][i[1]])],
            "argmax_fe": [float(scan.axes[0][j[0]]), float(scan.axes[1][j[1]])],
            "max_gamma": scan.at("sr", i),
            "max_fe": scan.at("fe", j),
            "coincide_within_grid": abs(i[0] - j[0]) <= 1 and abs(i[1] - j[1]) <= 1,
        },
    )
    return lambda path: _plot("grid", path, *scan.axes, scan.values["sr"], scan.values["fe"], names)


def cmd_survey(ns, db, out):
    fams = []
    for f in ns.families.split(","):
        parts = f.strip().split("/")
        if len(parts) != 3:
            raise ConfigError(f"family must be cladding/guide/isotope, got {f!r}")
        fams.append(tuple(parts))
    objectives = tuple(o.strip() for o in ns.objectives.split(","))
    for o in objectives:
        if o not in design.OBJECTIVES:
            raise ConfigError(f"unknown objective {o!r}")
    rows = design.survey(db, fams, objectives, ns.restarts, ns.seed, d_resonant=ns.d_resonant)
    report.write_header(out, "survey", _config(ns))
    names = rows[0].best.names if rows else ()
    report.write_table(
        out,
        ["cladding", "guide", "isotope", "objective", *design.OBJECTIVES, *names],
        [
            (r.cladding, r.guide, r.isotope, r.objective, *(r.best[k] for k in design.OBJECTIVES), *r.best.x)
            for r in rows
        ],
    )
    return None


COMMANDS = {
    "spectrum": cmd_spectrum,
    "rocking": cmd_rocking,
    "params": cmd_params,
    "poles": cmd_poles,
    "optimize": cmd_optimize,
    "trace": cmd_trace,
    "fp": cmd_fp,
    "survey": cmd_survey,
}


def _plot(kind, path, *args, **kwargs):
    from . import plotting

    getattr(plotting, kind)(path, *args, **kwargs)


def _write_text(path, text):
    try:
        Path(path).write_text(text, encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot write {path}: {exc}") from None


def run(argv=None, stdout=None, stderr=None) -> int:
    stdout = sys.stdout if stdout is None else stdout
    stderr = sys.stderr if stderr is None else stderr
    parser = build_parser()
    try:
        ns = parser.parse_args(argv)
        if ns.command is None:
            raise UsageError(parser.format_usage() + "xcavity: error: a command is required")
        db = load_db(ns.db)
        buf = io.StringIO()
        plot = COMMANDS[ns.command](ns, db, buf)
        if ns.out:
            _write_text(ns.out, buf.getvalue())
        else:
            stdout.write(buf.getvalue())
        if ns.plot and plot is not None:
            plot(ns.plot)
    except ConfigError as exc:
        stderr.write(f"{exc}\n")
        return 1
    except NumericalError as exc:
        stderr.write(f"numerical failure: {exc}\n")
        return 2
    except CavityError as exc:
        stderr.write(f"{exc}\n")
        return 2
    return 0


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
