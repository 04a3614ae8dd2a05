import math

import numpy as np
import pytest
import sympy as sp
from hypothesis import given, settings
from hypothesis import strategies as st

from ising_geometry.geometry import (
    CurvatureDomainError,
    PoleProximityError,
    cos2theta_from_curvature,
    curvature_closed_form,
    curvature_extrema,
    entanglement_vs_curvature,
    evolution_circle_radius,
    fs_metric_fd,
    metric_closed_form,
    metric_from_products,
    negative_curvature_region,
    scalar_curvature,
    scalar_curvature_numeric,
    scalar_products,
)
from ising_geometry.states import SystemConfig

from .oracles import zero_field_state

GRID = np.linspace(0.1, math.pi - 0.1, 50)


def kron_fd_metric(n, theta, chi, step=1e-4, phi=0.0):
    """Fubini-Study metric from central differences of explicit Kronecker-product states."""
    psi = zero_field_state(n, theta, phi, chi)
    dt = (zero_field_state(n, theta + step, phi, chi) - zero_field_state(n, theta - step, phi, chi)) / (2 * step)
    dc = (zero_field_state(n, theta, phi, chi + step) - zero_field_state(n, theta, phi, chi - step)) / (2 * step)

    def g(a, b):
        return (np.vdot(a, b) - np.vdot(a, psi) * np.vdot(psi, b)).real

    return g(dt, dt), g(dt, dc), g(dc, dc)


def sympy_curvature(n):
    """Scalar curvature 2K of the closed-form metric via the Gaussian curvature formula."""
    t = sp.symbols("t")
    e = sp.Rational(n, 4)
    g = sp.Rational(n * (n - 1), 4) * sp.sin(t) ** 2 * (n - 1 - (n - sp.Rational(3, 2)) * sp.sin(t) ** 2)
    root = sp.sqrt(e * g)
    k = -sp.diff(sp.diff(g, t) / root, t) / (2 * root)
    return sp.lambdify(t, 2 * k, "math")


def test_metric_examples():
    m = metric_closed_form(SystemConfig(6), math.pi / 2)
    assert (m.g11, m.g12) == (1.5, 0.0)
    assert m.g22 == pytest.approx(3.75, abs=1e-15)
    assert metric_closed_form(SystemConfig(2), math.pi / 2).g22 == pytest.approx(0.25, abs=1e-16)
    for n in (1, 4, 9):
        assert metric_closed_form(SystemConfig(n), 0.0).g22 == 0


def test_metric_gauge_factor_scales_quadratically():
    a = metric_closed_form(SystemConfig(5, gauge_factor=2.0), 0.7)
    b = metric_closed_form(SystemConfig(5), 0.7)
    assert a.g11 == pytest.approx(4 * b.g11) and a.g22 == pytest.approx(4 * b.g22)


@pytest.mark.parametrize("n", [2, 3, 6])
@pytest.mark.parametrize("theta", [0.3, math.pi / 3, 1.9])
def test_metric_against_kron_oracle(n, theta):
    g11, g12, g22 = kron_fd_metric(n, theta, 1.0)
    m = metric_closed_form(SystemConfig(n), theta)
    assert abs(g11 - m.g11) <= 1e-6 * m.g11
    assert abs(g22 - m.g22) <= 1e-6 * m.g22
    assert abs(g12) <= 1e-8


def test_fd_metric_example():
    c = SystemConfig(6)
    fd, cf = fs_metric_fd(c, math.pi / 3, 1.0, 1e-4), metric_closed_form(c, math.pi / 3)
    assert abs(fd.g11 - cf.g11) <= 1e-6 * cf.g11
    assert abs(fd.g22 - cf.g22) <= 1e-6 * cf.g22


@pytest.mark.parametrize("n", [2, 3, 6, 9])
def test_fd_metric_grid(n):
    c = SystemConfig(n)
    for th in GRID:
        fd, cf = fs_metric_fd(c, th, 1.0), metric_closed_form(c, th)
        assert abs(fd.g11 - cf.g11) <= 1e-5 * cf.g11
        assert abs(fd.g22 - cf.g22) <= 1e-5 * cf.g22
        assert abs(fd.g12) <= 1e-8


def test_fd_metric_independent_of_chi_and_phi():
    c = SystemConfig(5)
    ref = fs_metric_fd(c, 1.1, 0.3)
    for chi in (1.1, 2.7):
        for phi in (0.0, 2.0):
            m = fs_metric_fd(c, 1.1, chi, phi=phi)
            assert abs(m.g11 - ref.g11) <= 1e-8 and abs(m.g22 - ref.g22) <= 1e-8 and abs(m.g12) <= 1e-8


def test_fd_metric_guards():
    with pytest.raises(PoleProximityError):
        fs_metric_fd(SystemConfig(3), 0.01, 1.0)
    with pytest.raises(PoleProximityError):
        fs_metric_fd(SystemConfig(3), math.pi - 0.04, 1.0)
    with pytest.raises(ValueError):
        fs_metric_fd(SystemConfig(3), 1.0, 1.0, step=1e-2)


def test_scalar_product_examples():
    assert scalar_products(SystemConfig(2), math.pi / 2).theta_chi == pytest.approx(0, abs=1e-16)
    assert scalar_products(SystemConfig(3), 0.0).psi_chi == -9j / 4
    for n in (1, 5, 12):
        assert scalar_products(SystemConfig(n), 0.8).psi_theta == 0


@pytest.mark.parametrize("n", range(1, 13))
def test_scalar_products_assemble_to_metric(n):
    c = SystemConfig(n, gauge_factor=math.sqrt(2))
    for th in np.linspace(0, math.pi, 19):
        a, b = metric_from_products(scalar_products(c, th), c.gauge_factor), metric_closed_form(c, th)
        assert abs(a.g11 - b.g11) <= 1e-12 and abs(a.g12) <= 1e-12 and abs(a.g22 - b.g22) <= 1e-12


@pytest.mark.parametrize("n", [2, 4, 7])
def test_scalar_products_against_kron_states(n):
    th, step = 0.9, 1e-5
    psi = zero_field_state(n, th, 0.0, 0.0)
    dt = (zero_field_state(n, th + step, 0, 0) - zero_field_state(n, th - step, 0, 0)) / (2 * step)
    dc = (zero_field_state(n, th, 0, step) - zero_field_state(n, th, 0, -step)) / (2 * step)
    p = scalar_products(SystemConfig(n), th)
    got = [np.vdot(psi, dt), np.vdot(psi, dc), np.vdot(dt, dt), np.vdot(dc, dc), np.vdot(dt, dc)]
    np.testing.assert_allclose(got, list(p), atol=1e-7)


@pytest.mark.parametrize(
    "n, theta, expected",
    [(2, math.pi / 2, 0.0), (6, math.pi / 2, -32 / 3), (6, 0.0, 8 / 3 * (2 - 3 / 20))],
)
def test_curvature_examples(n, theta, expected):
    assert scalar_curvature(SystemConfig(n), theta).R == pytest.approx(expected, abs=1e-12)


@pytest.mark.parametrize("n", [2, 3, 6, 9])
def test_curvature_against_sympy(n):
    oracle = sympy_curvature(n)
    for th in np.linspace(0.05, math.pi - 0.05, 25):
        assert curvature_closed_form(SystemConfig(n), th) == pytest.approx(oracle(th), abs=1e-9)


@pytest.mark.parametrize("n", [2, 3, 6, 9])
def test_curvature_riemann_pipeline(n):
    c = SystemConfig(n)
    for th in GRID:
        sample = scalar_curvature(c, th)
        m = metric_closed_form(c, th)
        assert 2 * sample.riemann_component / (m.g11 * m.g22) == pytest.approx(sample.R, abs=1e-9)
        assert abs(scalar_curvature_numeric(c, th) - sample.R) <= 1e-6


@pytest.mark.parametrize("n, expected", [(2, (0.0, 10.0)), (9, (-112 / 9, 61 / 18))])
def test_curvature_extrema_examples(n, expected):
    assert curvature_extrema(SystemConfig(n)) == pytest.approx(expected, abs=1e-12)


@pytest.mark.parametrize("n", [2, 3, 4, 6, 9, 20])
def test_curvature_extrema_bound_grid(n):
    c = SystemConfig(n)
    lo, hi = curvature_extrema(c)
    r = curvature_closed_form(c, np.linspace(0, math.pi, 1000))
    assert r.min() >= lo - 1e-12 and r.max() <= hi + 1e-12
    assert curvature_closed_form(c, math.pi / 2) == pytest.approx(lo, abs=1e-12)
    assert curvature_closed_form(c, 0.0) == pytest.approx(hi, abs=1e-12)
    assert curvature_closed_form(c, math.pi) == pytest.approx(hi, abs=1e-12)


def test_curvature_extrema_reject_single_spin():
    with pytest.raises(ValueError):
        curvature_extrema(SystemConfig(1))


@settings(max_examples=200, deadline=None)
@given(n=st.integers(2, 60), theta=st.floats(0, math.pi / 2))
def test_curvature_mirror_symmetry(n, theta):
    mirror = math.pi - theta
    c = SystemConfig(n)
    assert abs(curvature_closed_form(c, math.pi - mirror) - curvature_closed_form(c, mirror)) <= 1e-14


def test_negative_region():
    assert negative_curvature_region(SystemConfig(2)) is None
    for n in (3, 6, 9, 40):
        c = SystemConfig(n)
        lo, hi = negative_curvature_region(c)
        assert lo < math.pi / 2 < hi
        assert lo + hi == pytest.approx(math.pi)
        assert abs(curvature_closed_form(c, lo)) <= 1e-9 and abs(curvature_closed_form(c, hi)) <= 1e-9
        inside = np.linspace(lo, hi, 50)[1:-1]
        assert np.all(curvature_closed_form(c, inside) < 0)
        outside = np.concatenate([np.linspace(0, lo, 20)[:-1], np.linspace(hi, math.pi, 20)[1:]])
        assert np.all(curvature_closed_form(c, outside) > 0)


def test_radius():
    assert evolution_circle_radius(SystemConfig(4), 0.0) == 0
    assert evolution_circle_radius(SystemConfig(2), math.pi / 2) == pytest.approx(0.5, abs=1e-15)
    assert evolution_circle_radius(SystemConfig(6), math.pi / 2) == pytest.approx(math.sqrt(15) / 2, abs=1e-14)
    radii = [evolution_circle_radius(SystemConfig(n), math.pi / 2) for n in range(2, 30)]
    assert np.all(np.diff(radii) > 0)
    for n in (2, 3, 6, 9):
        for th in np.linspace(0, math.pi, 41):
            c = SystemConfig(n, gauge_factor=1.7)
            assert abs(evolution_circle_radius(c, th) ** 2 - metric_closed_form(c, th).g22) <= 1e-12


@pytest.mark.parametrize("n", [2, 3, 6, 9])
@pytest.mark.parametrize("gamma", [1.0, 2.0])
def test_inversion_roundtrip(n, gamma):
    c = SystemConfig(n, gauge_factor=gamma)
    lo, hi = curvature_extrema(c)
    assert cos2theta_from_curvature(c, lo) == pytest.approx(0, abs=1e-9)
    assert cos2theta_from_curvature(c, hi) == pytest.approx(1, abs=1e-9)
    for th in np.linspace(1e-3, math.pi / 2, 200):
        assert abs(cos2theta_from_curvature(c, curvature_closed_form(c, th)) - math.cos(th) ** 2) <= 1e-9


def test_inversion_example():
    c = SystemConfig(6)
    assert cos2theta_from_curvature(c, curvature_closed_form(c, math.pi / 3)) == pytest.approx(0.25, abs=1e-9)


def test_inversion_domain_errors():
    c = SystemConfig(6)
    lo, hi = curvature_extrema(c)
    with pytest.raises(CurvatureDomainError):
        cos2theta_from_curvature(c, hi + 1.0)
    with pytest.raises(CurvatureDomainError):
        cos2theta_from_curvature(c, lo - 5.0)


@pytest.mark.parametrize("n", [2, 3, 6, 9])
def test_entanglement_vs_curvature(n):
    c = SystemConfig(n)
    lo, hi = curvature_extrema(c)
    assert entanglement_vs_curvature(c, math.pi / 2, lo) == pytest.approx(0.5, abs=1e-12)
    assert entanglement_vs_curvature(c, math.pi / 2, hi) == pytest.approx(0.0, abs=1e-12)
    e = [entanglement_vs_curvature(c, math.pi / 2, r) for r in np.linspace(lo, hi, 100)]
    assert np.all(np.diff(e) <= 0)
