import json
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from xcavity.design import (
    DesignRun,
    DesignSpace,
    FunctionSpace,
    Variable,
    archetype_space,
    calibrate_scales,
    constrained_best,
    cost_from_json,
    evaluate,
    fabry_perot_space,
    grid_scan,
    latin_starts,
    linear_cost,
    maximize,
    objectives_along_theta,
    optimize,
    parabola_cost,
    space_from_json,
    trace_boundary_linear,
    trace_boundary_parabola,
)
from xcavity.errors import AllInfeasible, ConfigError, OutOfBounds, TargetUnreachable
from xcavity.spectra import fano_params, visibility
from xcavity.effective import two_level_params
from xcavity.stack import Geometry

from conftest import ROOT

UNIT = {"cls": 1.0, "sr": 1.0, "vis": 1.0, "fe": 1.0}


def stub(fn, lo=(0.0, 0.0), hi=(1.0, 1.0)):
    return FunctionSpace((Variable("d_top", lo[0], hi[0]), Variable("d_bottom", lo[1], hi[1])), fn, dict(UNIT))


def quad(x):
    v = -((x[0] - 0.3) ** 2) - 2 * (x[1] - 0.8) ** 2
    return {"cls": x[0], "sr": v, "vis": 0.0, "fe": x[1]}


def test_quadratic_optimum():
    p = optimize(None, stub(quad), maximize("sr"), restarts=4, seed=1)
    assert p.x == pytest.approx((0.3, 0.8), abs=1e-4)
    assert p.feasible and p.names == ("d_top", "d_bottom")


def test_optimum_on_bound():
    p = optimize(None, stub(quad), maximize("cls"), restarts=4, seed=0)
    assert p.x[0] == pytest.approx(1.0, abs=1e-6)


def test_deterministic_for_seed():
    a = optimize(None, stub(quad), maximize("sr"), restarts=3, seed=5)
    b = optimize(None, stub(quad), maximize("sr"), restarts=3, seed=5)
    assert a == b


def test_latin_starts_are_stratified():
    u = latin_starts(3, 10, 0)
    assert u.shape == (10, 3)
    for col in u.T:
        assert sorted(np.floor(col * 10).astype(int)) == list(range(10))
    assert np.array_equal(u, latin_starts(3, 10, 0))


def test_evaluate_bounds():
    sp = stub(quad)
    with pytest.raises(OutOfBounds):
        evaluate(None, sp, [1.5, 0.0])
    with pytest.raises(OutOfBounds):
        evaluate(None, sp, [0.5])
    assert evaluate(None, sp, [1.0, 0.0]).feasible


def test_all_infeasible():
    sp = stub(lambda x: {"cls": math.nan, "sr": 0.0, "vis": 0.0, "fe": 0.0})
    with pytest.raises(AllInfeasible):
        optimize(None, sp, maximize("sr"), restarts=2)
    with pytest.raises(ConfigError):
        optimize(None, sp, maximize("sr"), restarts=0)


def ellipse(x):
    r, phi = x[0], 2 * math.pi * x[1]
    return {"cls": 2 * r * math.cos(phi), "sr": r * math.sin(phi), "vis": 0.0, "fe": 0.0}


def test_linear_trace_of_ellipse():
    t = trace_boundary_linear(None, stub(ellipse), ("cls", "sr"), n_directions=8, restarts=4)
    for phi, pt in zip(t.angles, t.coords()):
        # support point of the ellipse (2 cos s, sin s) in direction phi
        s = math.atan2(math.sin(phi), 2 * math.cos(phi))
        assert pt == pytest.approx([2 * math.cos(s), math.sin(s)], abs=1e-3)
    assert t.method == "linear" and t.samples.shape[1] == 2


def test_linear_trace_needs_four_directions():
    with pytest.raises(ConfigError):
        trace_boundary_linear(None, stub(ellipse), ("cls", "sr"), n_directions=3)


def square(x):
    return {"cls": x[0] - 1, "sr": x[1] - 1, "vis": 0.0, "fe": 0.0}


def test_square_support_values():
    t = trace_boundary_linear(None, stub(square, (0, 0), (2, 2)), ("cls", "sr"), n_directions=4, restarts=3)
    support = [c * p[0] + s * p[1] for p, c, s in zip(t.coords(), np.cos(t.angles), np.sin(t.angles))]
    assert support == pytest.approx([1.0] * 4, abs=1e-6)


def test_parabola_cost_geometry():
    c = parabola_cost((0.0, 0.0), 0.0, 10.0, ("cls", "sr"))
    assert c({"cls": 2.0, "sr": 0.0}) == pytest.approx(-2.0)
    assert c({"cls": 2.0, "sr": 0.5}) == pytest.approx(-2.0 + 2.5)


def test_parabola_trace_closes_on_circle():
    t = trace_boundary_parabola(
        None, stub(lambda x: ellipse(x) | {"cls": math.cos(2 * math.pi * x[1]) * x[0]}),
        ("cls", "sr"), (0.0, 0.0), n_rotations=8, kappa=50, restarts=4,
    )
    r = np.hypot(*t.coords().T)
    assert r == pytest.approx(np.ones(8), abs=1e-3)


def test_constrained_best():
    def fn(x):
        return {"cls": 10 * x[0], "sr": 10 * x[1], "vis": -(x[0] - 1) ** 2 - (x[1] - 1) ** 2, "fe": 0.0}

    sp = stub(fn)
    p = constrained_best(None, sp, (5.0, 5.0), tol=1.0, restarts=4)
    assert abs(p["cls"] - 5) < 1 and abs(p["sr"] - 5) < 1
    # witness: the best feasible vis sits on the corner of the tolerance box towards (1, 1)
    assert p.x == pytest.approx((0.55, 0.55), abs=5e-3)
    with pytest.raises(TargetUnreachable):
        constrained_best(None, sp, (50.0, 5.0), tol=1.0, restarts=2)


def test_cost_from_json():
    o = {"cls": 1.0, "sr": 2.0, "vis": 3.0, "fe": 4.0}
    assert cost_from_json({"maximize": "fe"})(o) == -4.0
    assert cost_from_json({"minimize": "cls"})(o) == 1.0
    assert cost_from_json({"linear": {"sr": 2, "vis": -1}})(o) == 1.0
    assert linear_cost({"fe": 1})(o) == 4.0
    with pytest.raises(ConfigError):
        cost_from_json({"bogus": 1})


@pytest.mark.parametrize(
    "name,lo,hi",
    [("d_top", -1, 5), ("theta", 0, 3), ("z_rel", 0.1, 1.2), ("wavelength", 0, 1), ("d_top", 3, 3)],
)
def test_variable_validation(name, lo, hi):
    with pytest.raises(ConfigError):
        Variable(name, lo, hi)


def test_archetype_layout(db):
    sp = archetype_space(db=db)
    stack, theta, omega = sp.build([10.0, 20.0, 30.0, 40.0, 3.0])
    assert [l.thickness for l in stack.layers] == [10.0, 20.0, 0.574, 30.0, 40.0]
    assert theta == 3.0 and omega == 14.4125
    sn = archetype_space(isotope="Sn-119", db=db)
    assert sn.upper[-1] == pytest.approx(10.0 * 14.4125 / 23.8795)


def test_space_json_roundtrip(db):
    sp = archetype_space(db=db, variables=("d_top", "z_rel", "theta"))
    again = DesignSpace.from_json(json.loads(json.dumps(sp.to_json())))
    assert again == sp
    with pytest.raises(ConfigError):
        DesignSpace.from_json({"variables": []})


def test_design_matches_forward_model(db, fig3):
    sp = archetype_space(db=db)
    x = [80.4, 46.0, 46.1, 17.8, 2.2124]
    sp = DesignSpace(sp.template.with_thickness(4, 17.8), sp.variables, "Fe-57")
    p = evaluate(db, sp, x)
    g = Geometry(14.4125, 2.2124)
    tl = two_level_params(db, fig3, None, g)
    assert p["sr"] == pytest.approx(tl.sr, rel=1e-12)
    assert p["cls"] == pytest.approx(tl.cls, rel=1e-12)
    assert p["fe"] == pytest.approx(tl.fe, rel=1e-12)
    assert p["vis"] == pytest.approx(visibility(fano_params(db, fig3, None, g)), rel=1e-10)


def test_objectives_along_theta_vectorised(db):
    sp = archetype_space(db=db)
    x = np.array([20.0, 40.0, 40.0, 20.0, 3.0])
    th = np.linspace(1.0, 5.0, 9)
    vec = objectives_along_theta(db, sp, x, th)
    for i, t in enumerate(th):
        x[-1] = t
        p = evaluate(db, sp, x)
        for k in ("cls", "sr", "vis", "fe"):
            assert vec[k][i] == pytest.approx(p[k], rel=1e-10, abs=1e-14)


def test_degenerate_geometry_is_infeasible(db):
    sp = archetype_space(db=db, variables=("d_top", "theta"), bounds={"theta": (1e-9, 1.0)})
    p = evaluate(db, sp, [0.0, 1e-9])
    assert p.feasible or math.isnan(p["sr"])


def test_fabry_perot_space(db):
    sp = fabry_perot_space()
    stack, theta, omega = sp.build([100.0, 150.0])
    assert stack.materials == ["vacuum", "diamond", "fp-gap", "fp-gap", "fp-gap", "diamond", "vacuum"]
    assert [l.thickness for l in stack.layers][1:4] == [100.0, 0.1, 150.0]
    assert omega == pytest.approx(1e-3 * 2 * math.pi * 197.3269804 / 700)
    p = evaluate(db, sp, [100.0, 150.0])
    assert p.feasible and p["sr"] > -1


def test_fabry_perot_rate_tracks_field(db):
    # in 1D the rate relative to free space is the mean of |E|^2 for light from either side
    sp = fabry_perot_space()
    from xcavity.greens import evaluate_at

    for x in ([60.0, 200.0], [145.0, 146.0], [10.0, 300.0]):
        stack, th, om = sp.build(x)
        g_top = evaluate_at(db, stack, om, th)
        g_bot = evaluate_at(db, stack.mirrored(), om, th)
        p = evaluate(db, sp, x)
        assert p["sr"] == pytest.approx(
            (g_top.field_enhancement + g_bot.field_enhancement) / 2, rel=1e-3
        )


def test_grid_scan_shapes():
    g = grid_scan(None, stub(quad), 11, 6)
    assert g.values["sr"].shape == (11, 6)
    i, j = g.argmax("sr")
    assert g.axes[0][i] == pytest.approx(0.3) and g.axes[1][j] == pytest.approx(0.8)
    with pytest.raises(ConfigError):
        grid_scan(None, FunctionSpace((Variable("d_top", 0, 1),), quad), 3, 3)


def test_calibrate_scales():
    sp = calibrate_scales(None, stub(lambda x: {"cls": 0.0, "sr": 0.0, "vis": 3 * x[0], "fe": 7 * x[1]}), 32)
    assert 2.8 < sp.scales["vis"] <= 3.0 and 6.5 < sp.scales["fe"] <= 7.0


@pytest.mark.parametrize("name", ["max_sr.json", "trace_cls_sr.json", "trace_sr_fe.json"])
def test_shipped_configs_parse(db, name):
    doc = json.loads((ROOT / "configs" / name).read_text())
    run = DesignRun.from_json(doc, db)
    assert run.space.isotope == "Fe-57"
    json.dumps(run.resolved())


def test_design_run_rejects_unknown_keys(db):
    with pytest.raises(ConfigError):
        DesignRun.from_json({"space": {"archetype": {}}, "sed": 1}, db)
    with pytest.raises(ConfigError):
        DesignRun.from_json({"cost": {}}, db)
    with pytest.raises(ConfigError):
        space_from_json({"archetype": {"nonsense": 1}}, db)


def test_scales_override(db):
    sp = space_from_json({"archetype": {}, "scales": {"sr": 50}}, db)
    assert sp.scales["sr"] == 50 and sp.scales["cls"] == 100


@given(st.floats(0, 1), st.floats(0, 1))
@settings(max_examples=100, deadline=None)
def test_unit_mapping_roundtrip(a, b):
    sp = stub(quad, (2.0, 3.0), (5.0, 9.0))
    x = sp.from_unit([a, b])
    assert np.allclose(sp.to_unit(x), [a, b], atol=1e-12)
    assert np.all(x >= sp.lower - 1e-12) and np.all(x <= sp.upper + 1e-12)
