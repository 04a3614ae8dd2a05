import json
import math

import numpy as np
import pytest
from scipy.linalg import expm

from ising_geometry.evolution import PeriodicityReport
from ising_geometry.field_geometry import (
    CLOSED_DUMBBELL,
    INFINITE_CYLINDER,
    SPHERE,
    TORUS,
    TransformedCoords,
    classify_topology,
    diagonalized_field_metric,
    field_metric_closed_form,
    field_metric_fd,
    pulled_back_field_metric,
    transform_coordinates,
)
from ising_geometry.geometry import PoleProximityError, fs_metric_fd, metric_closed_form
from ising_geometry.states import SystemConfig

from .oracles import SX, SZ, pauli_sum, product_state, product_state_dtheta


def dense_field_metric(n, ratio, theta, phi, chi, gamma=1.0):
    """Metric from the exact tangent vectors of exp(-i chi G) on Kronecker product states.

    d/dchi gives -i G psi; d/dtheta pushes the exact derivative of the
    initial product state through the same propagator.
    """
    mz = pauli_sum(n, SZ)
    gen = mz @ mz / 4 + ratio / 2 * pauli_sum(n, SX)
    u = expm(-1j * chi * gen)
    psi = u @ product_state(n, theta, phi)
    d_theta = u @ product_state_dtheta(n, theta, phi)
    d_chi = -1j * gen @ psi

    def g(a, b):
        return gamma**2 * (np.vdot(a, b) - np.vdot(a, psi) * np.vdot(psi, b)).real

    return g(d_theta, d_theta), g(d_theta, d_chi), g(d_chi, d_chi)


@pytest.mark.parametrize("n", [1, 2, 3, 5])
@pytest.mark.parametrize("ratio", [0.3, 1.0])
@pytest.mark.parametrize("phi", [0.0, math.pi / 3, math.pi / 2, 2.5])
def test_closed_form_against_dense_oracle(n, ratio, phi):
    c = SystemConfig(n, field=ratio, gauge_factor=1.3)
    for theta in (0.2, 1.0, 2.4):
        for chi in (0.0, 0.9):
            g11, g12, g22 = dense_field_metric(n, ratio, theta, phi, chi, 1.3)
            m = field_metric_closed_form(c, theta, phi)
            assert m.g11 == pytest.approx(g11, abs=1e-12)
            assert m.g12 == pytest.approx(g12, abs=1e-12)
            assert m.g22 == pytest.approx(g22, abs=1e-11)


def test_closed_form_example():
    m = field_metric_closed_form(SystemConfig(2, field=1.0), math.pi / 2, math.pi / 2)
    assert m.g22 == pytest.approx(0.75, abs=1e-15)
    assert m.g12 == pytest.approx(-0.5, abs=1e-15)
    assert m.g11 == 0.5


def test_phi_zero_keeps_field_corrections():
    c = SystemConfig(4, field=0.6)
    m = field_metric_closed_form(c, 1.0, 0.0)
    assert m.g12 == 0
    assert m.g22 != metric_closed_form(SystemConfig(4), 1.0).g22


def test_zero_field_is_bitwise_identical():
    rng = np.random.default_rng(7)
    for _ in range(100):
        n = int(rng.integers(1, 30))
        gamma = float(rng.uniform(0.5, 2))
        theta, phi = rng.uniform(0, math.pi), rng.uniform(-math.pi, math.pi)
        c = SystemConfig(n, gauge_factor=gamma)
        a, b = field_metric_closed_form(c, theta, phi), metric_closed_form(c, theta)
        assert (a.g11, a.g12, a.g22) == (b.g11, b.g12, b.g22)
        d = diagonalized_field_metric(c, TransformedCoords(theta, 0.4, phi))
        assert (d.g11, d.g12, d.g22) == (b.g11, b.g12, b.g22)


@pytest.mark.parametrize("n", [2, 3, 6])
@pytest.mark.parametrize("ratio", [0.3, 1.0])
@pytest.mark.parametrize("phi", [0.0, math.pi / 3, math.pi / 2])
def test_closed_form_against_fd(n, ratio, phi):
    c = SystemConfig(n, field=ratio)
    for theta in np.linspace(0.1, math.pi - 0.1, 20):
        fd, cf = field_metric_fd(c, theta, phi, 0.7), field_metric_closed_form(c, theta, phi)
        scale = max(abs(cf.g11), abs(cf.g22))
        assert abs(fd.g11 - cf.g11) <= 1e-5 * abs(cf.g11)
        assert abs(fd.g22 - cf.g22) <= 1e-5 * abs(cf.g22)
        assert abs(fd.g12 - cf.g12) <= 1e-5 * max(abs(cf.g12), 1e-3 * scale)


def test_fd_examples():
    c0 = SystemConfig(4)
    a, b = field_metric_fd(c0, 0.8, 0.3, 1.2), fs_metric_fd(c0, 0.8, 1.2, phi=0.3)
    assert abs(a.g11 - b.g11) <= 1e-9 and abs(a.g12 - b.g12) <= 1e-9 and abs(a.g22 - b.g22) <= 1e-9
    c = SystemConfig(3, field=0.5)
    m = field_metric_fd(c, 1.1, math.pi / 3, 0.4)
    assert m.g11 == pytest.approx(0.75, abs=1e-6)
    assert m.g12 == pytest.approx(-0.25 * 0.5 * 3 * math.sin(math.pi / 3), abs=1e-6)
    with pytest.raises(PoleProximityError):
        field_metric_fd(c, 0.0, 0.0, 0.0)


def test_offdiagonal_independent_of_theta_and_chi():
    c = SystemConfig(4, field=0.8)
    ref = field_metric_closed_form(c, 0.5, 1.0).g12
    for theta in np.linspace(0.2, 2.9, 7):
        assert field_metric_closed_form(c, theta, 1.0).g12 == ref
        for chi in (0.0, 1.3, 4.0):
            assert abs(field_metric_fd(c, theta, 1.0, chi, step=1e-5).g12 - ref) <= 1e-8


def test_transform_examples():
    c = SystemConfig(3, field=2.0)
    assert transform_coordinates(c, TransformedCoords(0.3, 0.5, math.pi / 2)) == pytest.approx((1.3, 0.5))
    assert transform_coordinates(c, TransformedCoords(0.3, 0.5, 0.0)) == (0.3, 0.5)
    assert transform_coordinates(SystemConfig(3), TransformedCoords(0.3, 0.5, 1.0)) == (0.3, 0.5)


def test_pullback_diagonalizes_on_random_grid():
    rng = np.random.default_rng(99)
    for _ in range(100):
        n = int(rng.integers(1, 15))
        c = SystemConfig(n, coupling=float(rng.uniform(0.5, 2)), field=float(rng.uniform(-2, 2)),
                         gauge_factor=float(rng.choice([1.0, math.sqrt(2), 2.0])))
        coords = TransformedCoords(rng.uniform(0, math.pi), rng.uniform(-3, 3), rng.uniform(-math.pi, math.pi))
        pulled, diag = pulled_back_field_metric(c, coords), diagonalized_field_metric(c, coords)
        assert abs(pulled.g12) <= 1e-12
        assert abs(pulled.g22 - diag.g22) <= 1e-12
        assert pulled.g11 == diag.g11 == c.gauge_factor**2 * n / 4
        theta, _ = transform_coordinates(c, coords)
        shift = c.gauge_factor**2 * n / 4 * c.field_ratio**2 * math.sin(coords.phi) ** 2
        assert diag.g22 == pytest.approx(field_metric_closed_form(c, theta, coords.phi).g22 - shift, abs=1e-12)


def test_sphere_chart_loses_explicit_field_term():
    c = SystemConfig(5, field=1.5)
    coords = TransformedCoords(0.4, 0.2, math.pi / 2)
    theta, _ = transform_coordinates(c, coords)
    assert diagonalized_field_metric(c, coords).g22 == pytest.approx(metric_closed_form(SystemConfig(5), theta).g22, abs=1e-12)


@pytest.mark.parametrize("phi", [0.0, 0.7, math.pi / 2])
def test_zero_field_is_dumbbell(phi):
    r = classify_topology(SystemConfig(5), phi)
    assert r.classification == CLOSED_DUMBBELL and not r.horizon_limited
    assert r.periodicity.periodic and r.periodicity.period_chi == pytest.approx(math.pi)
    assert r.periodicity.max_return_fidelity >= 1 - 1e-12


@pytest.mark.parametrize("phi", [math.pi / 2, -math.pi / 2])
def test_sphere(phi):
    r = classify_topology(SystemConfig(4, field=0.7), phi)
    assert r.classification == SPHERE and r.periodicity is None


def test_torus_and_cylinder():
    torus = classify_topology(SystemConfig(2, field=math.sqrt(3) / 2), 0.0)
    assert torus.classification == TORUS
    assert torus.periodicity.period_chi == pytest.approx(4 * math.pi, rel=1e-9)
    cyl = classify_topology(SystemConfig(4, field=0.7), 0.0, horizon_chi=100.0)
    assert cyl.classification == INFINITE_CYLINDER and cyl.horizon_limited
    assert not cyl.periodicity.periodic


def test_near_sphere_uses_generic_branch():
    r = classify_topology(SystemConfig(2, field=math.sqrt(3) / 2), math.pi / 2 - 1e-3)
    assert r.classification in (TORUS, INFINITE_CYLINDER)
    assert r.phi == math.pi / 2 - 1e-3


def test_report_serializes():
    d = classify_topology(SystemConfig(2, field=math.sqrt(3) / 2), 0.0).to_dict()
    assert json.loads(json.dumps(d))["classification"] == TORUS
    assert isinstance(classify_topology(SystemConfig(3), 0.0).periodicity, PeriodicityReport)
    with pytest.raises(ValueError):
        classify_topology(SystemConfig(3), 0.0, horizon_chi=0)
