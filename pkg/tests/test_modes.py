import numpy as np
import pytest

from xcavity.effective import coupling_prefactor, two_level_params_at
from xcavity.errors import ContourDisagreement, EmptyWindow, NoConvergence
from xcavity.modes import (
    ModeFunctions,
    Pole,
    _newton,
    complex_shift,
    find_poles,
    fit_circle,
    green_at_zero,
    greens_trajectory,
    mittag_leffler,
    residue,
    residue_contour,
    residue_derivative,
    single_mode,
    single_mode_circle,
    single_mode_constant,
)
from xcavity.stack import CavityStack

OMEGA = 14.4125


class Rational(ModeFunctions):
    """G = (t^2 + 1) / ((t - a)(t - b)) with known residues."""

    def __init__(self, a, b):
        self.a, self.b = a, b

    def parts(self, theta):
        t = np.asarray(theta, dtype=complex)
        return t * t + 1, (t - self.a) * (t - self.b)


def test_residue_of_known_rational_function():
    a, b = 2.0 - 0.01j, 3.5 - 0.2j
    mf = Rational(a, b)
    expect = (a * a + 1) / (a - b)
    t0 = _newton(mf, 2.1)
    assert t0 == pytest.approx(a, abs=1e-12)
    assert residue_derivative(mf, t0) == pytest.approx(expect, rel=1e-9)
    assert residue_contour(mf, t0) == pytest.approx(expect, rel=1e-12)


def test_newton_failure_raises():
    class NoRoot(Rational):
        def parts(self, theta):
            t = np.asarray(theta, dtype=complex)
            return t, t * t + 1  # Newton from a real start never leaves the real axis

    with pytest.raises(NoConvergence):
        _newton(NoRoot(0, 0), 1.0)


@pytest.fixture(scope="module")
def fig3_poles(db, fig3):
    return find_poles(db, fig3, OMEGA, (2.0, 4.6))


def test_fig3_guided_modes(fig3_poles):
    strong = [p for p in fig3_poles.poles if abs(p.residue) > 0.1]
    expect = [2.2124 - 0.0024j, 2.5401 - 0.0055j, 3.0874 - 0.0101j, 3.7579 - 0.0163j, 4.4914 - 0.0256j]
    assert len(strong) == len(expect)
    for p, e in zip(strong, expect):
        assert p.theta0 == pytest.approx(e, abs=2e-4)


def test_poles_decay_and_residues_check(fig3_poles):
    for p in fig3_poles.poles:
        assert p.theta0.imag < 0
        assert p.contour_check_rel_err < 1e-6 and not p.flagged
    assert [p.order_index for p in fig3_poles.poles] == list(range(1, len(fig3_poles.poles) + 1))


def test_poles_are_zeros_of_denominator(db, fig3, fig3_poles):
    mf = ModeFunctions(db, fig3, OMEGA)
    for p in fig3_poles.poles:
        assert abs(mf.D(p.theta0)) < 1e-10


def test_seed_count_does_not_change_poles(db, fig3, fig3_poles):
    more = find_poles(db, fig3, OMEGA, (2.0, 4.6), seeds=8000)
    a = np.array([p.theta0 for p in fig3_poles.poles])
    b = np.array([p.theta0 for p in more.poles])
    assert a.shape == b.shape and np.allclose(a, b, atol=1e-9)


def test_window_filters(db, fig3, fig3_poles):
    part = find_poles(db, fig3, OMEGA, (2.4, 3.2))
    assert all(2.4 <= p.theta0.real <= 3.2 for p in part.poles)
    assert len(part.poles) < len(fig3_poles.poles)
    with pytest.raises(EmptyWindow):
        find_poles(db, fig3, OMEGA, (3.0, 3.0))


def test_vacuum_has_no_modes(db):
    s = CavityStack.from_spec([("vacuum", 10.0)], "vacuum", 0)
    assert find_poles(db, s, OMEGA, (0.5, 10.0)).poles == []


def test_poles_move_continuously(db, fig3, fig3_poles):
    moved = find_poles(db, fig3.with_thickness(1, 46.01), OMEGA, (2.0, 4.6))
    strong = [p.theta0 for p in fig3_poles.poles if abs(p.residue) > 0.1]
    other = [p.theta0 for p in moved.poles if abs(p.residue) > 0.1]
    assert len(strong) == len(other)
    assert max(abs(x - y) for x, y in zip(strong, other)) < 1e-3


def test_strict_residue(db, fig3, fig3_poles):
    p = fig3_poles.poles[0]
    assert residue(db, fig3, OMEGA, p, strict=True) == pytest.approx(p.residue, rel=1e-10)
    # a point that is not a pole makes the contour integral vanish
    with pytest.raises(ContourDisagreement):
        residue(db, fig3, OMEGA, p.theta0 + 0.05, strict=True)


def test_symmetric_cavity_suppresses_odd_modes(db):
    s = CavityStack.from_spec(
        [("Pt", 20.0), ("C", 46.0), ("Fe-57", 0.574), ("C", 46.0), ("Pt", 20.0)], "vacuum", 2
    )
    # same stack with the whole layer order reversed sees the same modes
    res = find_poles(db, s, OMEGA, (2.0, 4.6)).poles
    mags = sorted(abs(p.residue) for p in res)
    assert mags[0] < 1e-8 * mags[-1]


def test_mittag_leffler_without_poles_is_constant():
    th = np.linspace(1, 2, 5)
    assert np.all(mittag_leffler([], 0.3 + 0.1j, th) == 0.3 + 0.1j)


def test_mittag_leffler_reconstructs_green(db, fig3):
    poles = find_poles(db, fig3, OMEGA, (0.3, 4.6)).poles
    top = max(poles, key=lambda p: p.theta0.real)
    th = np.linspace(top.theta0.real - top.half_width / 2, top.theta0.real + top.half_width / 2, 21)
    exact = greens_trajectory(db, fig3, OMEGA, th)
    approx = mittag_leffler(poles, green_at_zero(db, fig3, OMEGA), th)
    assert np.max(np.abs(approx - exact) / np.abs(exact)) < 0.05


def test_fit_circle_exact():
    t = np.linspace(0, 5, 40)
    z = 1 - 2j + 3.0 * np.exp(1j * t)
    c = fit_circle(z)
    assert c.center == pytest.approx(1 - 2j, abs=1e-12)
    assert c.radius == pytest.approx(3.0, rel=1e-12) and c.residual < 1e-12


def test_single_mode_is_exact_circle():
    p = Pole(2.0 - 0.01j, 0.5 + 0.2j, 1)
    th = np.linspace(1.9, 2.1, 300)
    c = single_mode_circle(p, 0.1j, th)
    # Moebius image of a line: centre C + i Res / (2 Im theta0) conj-free form
    assert c.rel_residual < 1e-10
    assert c.radius == pytest.approx(abs(p.residue) / (2 * p.half_width), rel=1e-8)


def test_shift_plane_is_isometric(db, fig3, fig3_poles):
    p = fig3_poles.poles[0]
    th = np.linspace(p.theta0.real - 3 * p.half_width, p.theta0.real + 3 * p.half_width, 201)
    iso = db.isotope("Fe-57")
    pre = coupling_prefactor(iso, 0.574)
    tl = two_level_params_at(db, fig3, iso, th)
    z = complex_shift(greens_trajectory(db, fig3, OMEGA, th), pre)
    assert np.allclose(z, tl.cls + 0.5j * tl.sr, rtol=1e-13)
    assert fit_circle(z).rel_residual < 1e-3
    # the literal (cls, sr) plane stretches the circle into an ellipse
    assert fit_circle(tl.cls + 1j * tl.sr).rel_residual > 10 * fit_circle(z).rel_residual


def test_single_mode_constant_from_off_resonant_samples(db, fig3, fig3_poles):
    mf = ModeFunctions(db, fig3, OMEGA)
    p = fig3_poles.poles[0]
    C = single_mode_constant(mf.G, p, [p.theta0.real - 0.1, p.theta0.real + 0.1])
    near = np.array([p.theta0.real])
    assert abs(single_mode(p, C, near)[0] - mf.G(near)[0]) < 0.05 * abs(mf.G(near)[0])


def test_fig5_trajectory_circles_each_mode(db, fig5):
    poles = [p for p in find_poles(db, fig5, OMEGA, (2.0, 4.6)).poles if abs(p.residue) > 1e-3]
    assert poles
    for p in poles:
        th = np.linspace(p.theta0.real - p.half_width / 2, p.theta0.real + p.half_width / 2, 101)
        assert fit_circle(greens_trajectory(db, fig5, OMEGA, th)).rel_residual < 0.02
