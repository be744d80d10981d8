import numpy as np
import pytest
from oracles import random_stack, wronskian

from xcavity.errors import ResonantLayerZero
from xcavity.fresnel import stack_arrays
from xcavity.greens import (
    evaluate,
    evaluate_arrays,
    evaluate_at,
    field_at_nuclei,
    field_at_surface,
    green_equal_z,
    green_surface,
    mode_denominator,
)
from xcavity.stack import CavityStack, Geometry

KEYS = (("g_zz", "g_zz"), ("g_0z", "g_0z"), ("e_in_z", "e_z"), ("e_in_0", "e_0"))


@pytest.mark.parametrize("seed", range(150))
def test_random_stacks_match_wronskian(db, seed):
    rng = np.random.default_rng(1000 + seed)
    s = random_stack(rng)
    theta = float(rng.uniform(0.3, 15.0))
    b, d = stack_arrays(db, s, 14.4125, theta)
    got = evaluate_arrays(b, d, s.resonant_index + 1, s.z_rel)
    ref = wronskian(b, d, s.resonant_index + 1, s.z_rel)
    for mine, theirs in KEYS:
        val = complex(getattr(got, mine))
        scale = max(abs(ref[theirs]), 1e-3 if theirs.startswith("g") else 1e-6)
        assert abs(val - ref[theirs]) <= 1e-8 * scale, (mine, s, theta)


def test_scalar_accessors_agree(db, fig3):
    g = Geometry(14.4125, 2.2124)
    full = evaluate(db, fig3, g)
    assert green_equal_z(db, fig3, g) == complex(full.g_zz)
    assert green_surface(db, fig3, g) == complex(full.g_0z)
    assert field_at_nuclei(db, fig3, g) == complex(full.e_in_z)
    assert field_at_surface(db, fig3, g) == complex(full.e_in_0)


def test_vectorised_equals_scalar(db, fig4):
    th = np.linspace(1.0, 6.0, 17)
    vec = evaluate_at(db, fig4, 14.4125, th)
    for i, t in enumerate(th):
        one = evaluate_at(db, fig4, 14.4125, t)
        assert complex(one.g_zz) == pytest.approx(vec.g_zz[i], rel=1e-14)


def test_reciprocity_under_mirroring(db):
    # G(z, z) is a property of the structure, not of which side light enters
    s = CavityStack.from_spec(
        [("Pt", 4.0), ("C", 30.0), ("Fe-57", 1.2), ("C", 22.0), ("Pd", 9.0)], "vacuum", 2, 0.3
    )
    th = np.linspace(0.5, 9.0, 200)
    a = evaluate_at(db, s, 14.4125, th).g_zz
    b = evaluate_at(db, s.mirrored(), 14.4125, th).g_zz
    assert np.allclose(a, b, rtol=1e-11, atol=1e-14)


def test_free_space_green(db):
    s = CavityStack.from_spec([("vacuum", 5.0)], "vacuum", 0, 0.4)
    th = np.array([0.7, 3.0, 40.0])
    g = evaluate_at(db, s, 14.4125, th)
    beta = 14.4125e3 / 197.3269804 * np.sin(th * 1e-3)
    assert np.allclose(g.g_zz, 1j / (2 * beta), rtol=1e-13)
    assert np.allclose(g.e_in_z, np.exp(1j * beta * 2.0), rtol=1e-13)
    assert np.allclose(g.e_in_0, 1.0)


def test_im_green_positive_for_passive_stacks(db):
    # power radiated by a dipole sheet is positive: Im G(z,z) > 0
    rng = np.random.default_rng(3)
    for _ in range(100):
        s = random_stack(rng)
        g = evaluate_at(db, s, 14.4125, np.linspace(0.3, 12.0, 50))
        assert np.all(g.g_zz.imag > 0)


def test_zero_resonant_thickness_rejected(db, fig3):
    b, d = stack_arrays(db, fig3, 14.4125, 2.0)
    d[3] = 0.0
    with pytest.raises(ResonantLayerZero):
        evaluate_arrays(b, d, 3, 0.5)


def test_mode_denominator_small_near_guided_mode(db, fig3):
    th = np.linspace(2.0, 2.5, 5001)
    c = evaluate_at(db, fig3, 14.4125, th).coeffs
    D = np.abs(mode_denominator(c))
    assert th[np.argmin(D)] == pytest.approx(2.2124, abs=2e-3)
    assert D.min() < 0.1 * np.median(D)
