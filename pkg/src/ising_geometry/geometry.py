"""Fubini-Study geometry of the zero-field (theta, chi) state manifold.

The manifold at fixed azimuth phi is swept by the initial polar angle theta
and the evolution parameter chi. Closed forms for the metric, the scalar
curvature and derived quantities live here next to a finite-difference
construction of the metric straight from evolved states, used as an oracle.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple, Optional, Tuple

import numpy as np

from .entanglement import entanglement_from_squares
from .evolution import closed_form_evolve
from .states import BlochAngles, SystemConfig

POLE_EXCLUSION = 0.05
MIN_STEP, MAX_STEP = 1e-6, 1e-3
DOMAIN_SLACK = 1e-9


class PoleProximityError(ValueError):
    """Finite differences requested too close to theta = 0 or pi."""


class CurvatureDomainError(ValueError):
    """Curvature value outside the range the angle inversion can handle."""


@dataclass(frozen=True)
class MetricTensor2D:
    coord_labels: Tuple[str, str]
    g11: float
    g12: float
    g22: float

    def matrix(self) -> np.ndarray:
        return np.array([[self.g11, self.g12], [self.g12, self.g22]])

    def pullback(self, jacobian, coord_labels: Tuple[str, str]) -> "MetricTensor2D":
        """Components in new coordinates, given d(old)/d(new) as a 2x2 array."""
        jac = np.asarray(jacobian, dtype=float)
        g = jac.T @ self.matrix() @ jac
        return MetricTensor2D(coord_labels, float(g[0, 0]), float(g[0, 1]), float(g[1, 1]))


@dataclass(frozen=True)
class CurvatureSample:
    theta: float
    R: float
    riemann_component: float


class ScalarProducts(NamedTuple):
    """<psi|psi_theta>, <psi|psi_chi>, <psi_theta|psi_theta>, <psi_chi|psi_chi>, <psi_theta|psi_chi>."""

    psi_theta: complex
    psi_chi: complex
    theta_theta: complex
    chi_chi: complex
    theta_chi: complex


def fubini_study(psi, d1, d2, gamma: float = 1.0):
    """Metric components from a state and two tangent vectors.

    g_ab = gamma^2 Re(<d_a|d_b> - <d_a|psi><psi|d_b>); the projector term
    makes the result independent of the phase convention of ``psi``.
    """
    a1, a2 = np.vdot(psi, d1), np.vdot(psi, d2)

    def g(x, y, ax, ay):
        return gamma**2 * float((np.vdot(x, y) - np.conj(ax) * ay).real)

    return g(d1, d1, a1, a1), g(d1, d2, a1, a2), g(d2, d2, a2, a2)


def g_chichi(spins: int, gamma: float, theta):
    s2 = np.sin(theta) ** 2
    return gamma**2 / 4 * spins * (spins - 1) * s2 * (spins - 1 - (spins - 1.5) * s2)


def metric_closed_form(config: SystemConfig, theta: float) -> MetricTensor2D:
    n, gamma = config.spins, config.gauge_factor
    return MetricTensor2D(
        ("theta", "chi"), gamma**2 * n / 4, 0.0, float(g_chichi(n, gamma, theta))
    )


def scalar_products(config: SystemConfig, theta: float) -> ScalarProducts:
    n = config.spins
    c2 = math.cos(theta) ** 2
    return ScalarProducts(
        0j,
        -0.25j * n * (1 + (n - 1) * c2),
        complex(n / 4),
        complex(
            n / 16 * ((n - 1) * (n - 2) * (n - 3) * c2**2 + (n - 1) * (6 * n - 8) * c2 + 3 * n - 2)
        ),
        0.25j * n * (n - 1) * math.sin(theta) * math.cos(theta),
    )


def metric_from_products(products: ScalarProducts, gamma: float = 1.0) -> MetricTensor2D:
    """Assemble the Fubini-Study metric from the five scalar products."""
    p = products
    g11 = gamma**2 * (p.theta_theta - np.conj(p.psi_theta) * p.psi_theta).real
    g12 = gamma**2 * (p.theta_chi - np.conj(p.psi_theta) * p.psi_chi).real
    g22 = gamma**2 * (p.chi_chi - np.conj(p.psi_chi) * p.psi_chi).real
    return MetricTensor2D(("theta", "chi"), float(g11), float(g12), float(g22))


def check_fd_args(theta: float, step: float):
    if not POLE_EXCLUSION <= theta <= math.pi - POLE_EXCLUSION:
        raise PoleProximityError(
            f"theta={theta!r} is within {POLE_EXCLUSION} of a pole; finite differences are unreliable there"
        )
    if not MIN_STEP <= step <= MAX_STEP:
        raise ValueError(f"step must lie in [{MIN_STEP}, {MAX_STEP}], got {step!r}")


def fd_metric(state_fn, theta: float, chi: float, step: float, gamma: float) -> MetricTensor2D:
    """Metric of the family ``state_fn(theta, chi)`` from central-difference tangents."""
    check_fd_args(theta, step)
    d_theta = (state_fn(theta + step, chi) - state_fn(theta - step, chi)) / (2 * step)
    d_chi = (state_fn(theta, chi + step) - state_fn(theta, chi - step)) / (2 * step)
    g = fubini_study(state_fn(theta, chi), d_theta, d_chi, gamma)
    return MetricTensor2D(("theta", "chi"), *g)


def fs_metric_fd(
    config: SystemConfig, theta: float, chi: float, step: float = 1e-4, phi: float = 0.0
) -> MetricTensor2D:
    """Metric from central-difference tangent vectors of zero-field evolved states."""

    def psi(t, c):
        return closed_form_evolve(config, BlochAngles(t, phi), c).amplitudes

    return fd_metric(psi, theta, chi, step, config.gauge_factor)


def fold_polar(theta):
    """Map theta to [0, pi/2] preserving cos^2 and sin^2.

    pi - t is exact in floating point for t in [pi/2, pi], so mirror pairs
    (t, pi - t) fold to the same number.
    """
    t = np.mod(theta, np.pi)
    return np.where(t > np.pi / 2, np.pi - t, t)


def curvature_closed_form(config: SystemConfig, theta):
    """Scalar curvature as a function of theta; vectorized over ``theta``."""
    n, gamma = config.spins, config.gauge_factor
    u = (2 * n - 3) * np.cos(fold_polar(theta)) ** 2
    out = 16 / (gamma**2 * n) * (2 - (u + n) / (u + 1) ** 2)
    return float(out) if np.ndim(out) == 0 else out


def _g_chichi_derivatives(spins: int, gamma: float, theta: float):
    a = gamma**2 / 4 * spins * (spins - 1)
    b = spins - 1.5
    s, c = math.sin(theta), math.cos(theta)
    # g = a [(N-1) s^2 - b s^4]
    g1 = a * ((spins - 1) * 2 * s * c - b * 4 * s**3 * c)
    g2 = a * ((spins - 1) * 2 * math.cos(2 * theta) - b * (12 * s**2 * c**2 - 4 * s**4))
    return g1, g2


def riemann_from_metric(g: float, g1: float, g2: float) -> float:
    """R_{theta chi theta chi} of a diagonal 2D metric with constant g_thetatheta."""
    return -0.5 * g2 + g1**2 / (4 * g)


def scalar_curvature(config: SystemConfig, theta: float) -> CurvatureSample:
    """Closed-form scalar curvature plus the Riemann component from analytic derivatives.

    At the poles g_chichi vanishes and the Riemann component is returned as
    its limiting value, computed just off the pole.
    """
    n, gamma = config.spins, config.gauge_factor
    t = theta
    if abs(math.sin(theta)) < 1e-6:
        t = theta + math.copysign(1e-6, math.sin(theta) * math.cos(theta) or 1.0)
    g = float(g_chichi(n, gamma, t))
    riemann = riemann_from_metric(g, *_g_chichi_derivatives(n, gamma, t)) if g > 0 else math.nan
    return CurvatureSample(float(theta), curvature_closed_form(config, theta), riemann)


def scalar_curvature_numeric(config: SystemConfig, theta: float, step: float = 1e-4) -> float:
    """Curvature via the Riemann component with finite-difference derivatives of g_chichi.

    Five-point central stencils (fourth order); the three-point versions lose
    about 1e-5 near the poles to truncation, where g_chichi ~ theta^2.
    """
    check_fd_args(theta, step)
    n, gamma = config.spins, config.gauge_factor
    gm2, gm1, g0, gp1, gp2 = (float(g_chichi(n, gamma, theta + k * step)) for k in (-2, -1, 0, 1, 2))
    g1 = (gm2 - 8 * gm1 + 8 * gp1 - gp2) / (12 * step)
    g2 = (-gm2 + 16 * gm1 - 30 * g0 + 16 * gp1 - gp2) / (12 * step**2)
    return 2 * riemann_from_metric(g0, g1, g2) / (gamma**2 * n / 4 * g0)


def curvature_extrema(config: SystemConfig) -> Tuple[float, float]:
    """(R at theta = pi/2, R at theta = 0 or pi): the minimum and maximum of R."""
    n, gamma = config.spins, config.gauge_factor
    if n < 2:
        raise ValueError("curvature extrema need at least 2 spins")
    scale = 16 / (gamma**2 * n)
    return scale * (2 - n), scale * (2 - 3 / (4 * (n - 1)))


def negative_curvature_region(config: SystemConfig) -> Optional[Tuple[float, float]]:
    """Open theta-interval around pi/2 where R < 0, or None if there is none.

    With y = (2N-3) cos^2 + 1 the sign change sits at 2 y^2 - y - (N-1) = 0.
    """
    n = config.spins
    if n < 2:
        return None
    y = (1 + math.sqrt(1 + 8 * (n - 1))) / 4
    cos2 = (y - 1) / (2 * n - 3)
    if cos2 <= 0:
        return None
    lo = math.acos(math.sqrt(cos2))
    return lo, math.pi - lo


def evolution_circle_radius(config: SystemConfig, theta: float) -> float:
    n, gamma = config.spins, config.gauge_factor
    s = math.sin(theta)
    bracket = max(n - 1 - (n - 1.5) * s**2, 0.0)
    return gamma / 2 * math.sqrt(n * (n - 1)) * math.sqrt(bracket) * abs(s)


def cos2theta_from_curvature(config: SystemConfig, R: float) -> float:
    """Invert R(theta) for cos^2(theta); theta and pi - theta share the result."""
    n, gamma = config.spins, config.gauge_factor
    if n < 2:
        raise ValueError("curvature inversion needs at least 2 spins")
    a = R * gamma**2 * n
    disc = a * (1 - n) + 32 * n - 28
    if disc < 0:
        raise CurvatureDomainError(f"R={R!r} gives a negative square-root argument {disc!r}")
    denom = (a - 32) * (2 * n - 3)
    if denom == 0:
        raise CurvatureDomainError(f"R={R!r} makes the inversion singular")
    cos2 = -(a - 24 + 4 * math.sqrt(disc)) / denom
    if not -DOMAIN_SLACK <= cos2 <= 1 + DOMAIN_SLACK:
        raise CurvatureDomainError(f"R={R!r} maps to cos^2(theta)={cos2!r}, outside [0, 1]")
    return min(max(cos2, 0.0), 1.0)


def entanglement_vs_curvature(config: SystemConfig, chi: float, R: float) -> float:
    config.require_pair()
    return entanglement_from_squares(config.spins, cos2theta_from_curvature(config, R), chi)
