"""Geometry of the state manifold when a transverse field is switched on.

States are exp(-i chi [(sum sigma^z)^2 / 4 + (h/2J) sum sigma^x]) applied to
the spin-coherent state at (theta, phi). The metric on (theta, chi) picks up
an off-diagonal term proportional to sin(phi); the shear
theta = theta' + (h/J) sin(phi) chi' removes it.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass
from typing import Optional, Tuple

import numpy as np

from .evolution import PeriodicityReport, detect_period, field_evolve
from .geometry import MetricTensor2D, fd_metric, g_chichi
from .states import BlochAngles, SystemConfig

SPHERE_TOL = 1e-12
DEFAULT_HORIZON = 200.0

CLOSED_DUMBBELL = "closed-dumbbell"
TORUS = "torus"
INFINITE_CYLINDER = "infinite-cylinder"
SPHERE = "sphere"


@dataclass(frozen=True)
class TransformedCoords:
    theta_prime: float
    chi_prime: float
    phi: float = 0.0

    def implied_theta(self, field_ratio: float) -> float:
        return self.theta_prime + field_ratio * math.sin(self.phi) * self.chi_prime


def _field_terms(spins: int, gamma: float, ratio: float, theta: float, phi: float, last: float):
    s, c2 = math.sin(theta), math.cos(theta) ** 2
    return gamma**2 / 4 * spins * (-2 * ratio * (spins - 1) * s * c2 * math.cos(phi) + ratio**2 * last)


def field_metric_closed_form(config: SystemConfig, theta: float, phi: float) -> MetricTensor2D:
    n, gamma, lam = config.spins, config.gauge_factor, config.field_ratio
    # zero-field part first, so h = 0 reproduces metric_closed_form bit for bit
    last = 1 - math.sin(theta) ** 2 * math.cos(phi) ** 2
    g22 = float(g_chichi(n, gamma, theta)) + _field_terms(n, gamma, lam, theta, phi, last)
    g12 = -(gamma**2) / 4 * lam * n * math.sin(phi)
    return MetricTensor2D(("theta", "chi"), gamma**2 * n / 4, g12 + 0.0, g22)


def field_metric_fd(
    config: SystemConfig, theta: float, phi: float, chi: float, step: float = 1e-4
) -> MetricTensor2D:
    """Finite-difference metric of the field family.

    theta moves the initial spin-coherent state; chi moves the evolution.
    """

    def psi(t, c):
        return field_evolve(config, BlochAngles(t, phi), c).amplitudes

    return fd_metric(psi, theta, chi, step, config.gauge_factor)


def transform_coordinates(config: SystemConfig, coords: TransformedCoords) -> Tuple[float, float]:
    """(theta', chi') -> (theta, chi)."""
    return coords.implied_theta(config.field_ratio), coords.chi_prime


def transform_jacobian(config: SystemConfig, phi: float) -> np.ndarray:
    """d(theta, chi) / d(theta', chi'); constant because the map is linear."""
    return np.array([[1.0, config.field_ratio * math.sin(phi)], [0.0, 1.0]])


def pulled_back_field_metric(config: SystemConfig, coords: TransformedCoords) -> MetricTensor2D:
    """The field metric at the implied theta, expressed in the primed chart."""
    theta, _ = transform_coordinates(config, coords)
    g = field_metric_closed_form(config, theta, coords.phi)
    return g.pullback(transform_jacobian(config, coords.phi), ("theta'", "chi'"))


def diagonalized_field_metric(config: SystemConfig, coords: TransformedCoords) -> MetricTensor2D:
    n, gamma, lam = config.spins, config.gauge_factor, config.field_ratio
    theta, _ = transform_coordinates(config, coords)
    last = math.cos(theta) ** 2 * math.cos(coords.phi) ** 2
    g22 = float(g_chichi(n, gamma, theta)) + _field_terms(n, gamma, lam, theta, coords.phi, last)
    return MetricTensor2D(("theta'", "chi'"), gamma**2 * n / 4, 0.0, g22)


@dataclass(frozen=True)
class TopologyReport:
    classification: str
    spins: int
    field: float
    phi: float
    periodicity: Optional[PeriodicityReport]
    horizon_limited: bool

    def to_dict(self) -> dict:
        p = self.periodicity
        return {
            "spins": self.spins,
            "field": self.field,
            "phi": self.phi,
            "periodic": None if p is None else p.periodic,
            "period_chi": None if p is None else p.period_chi,
            "classification": self.classification,
            "horizon_limited": self.horizon_limited,
            "periodicity": None if p is None else asdict(p),
        }


def classify_topology(
    config: SystemConfig,
    phi: float,
    horizon_chi: float = DEFAULT_HORIZON,
    grid_steps: int = 20000,
) -> TopologyReport:
    """Classify the (theta, chi) manifold at azimuth ``phi``.

    No field: closed dumbbell. Field with sin^2(phi) = 1: sphere. Otherwise a
    torus if the evolution returns to its start within ``horizon_chi`` and an
    infinite cylinder if it does not, the latter always marked horizon-limited.
    """
    if not horizon_chi > 0:
        raise ValueError("horizon_chi must be positive")
    if config.field == 0:
        period = detect_period(config, horizon_chi, grid_steps, BlochAngles(1.0, phi))
        return TopologyReport(CLOSED_DUMBBELL, config.spins, 0.0, phi, period, False)
    if abs(math.sin(phi) ** 2 - 1) <= SPHERE_TOL:
        return TopologyReport(SPHERE, config.spins, config.field, phi, None, False)
    period = detect_period(config, horizon_chi, grid_steps, BlochAngles(1.0, phi))
    if period.periodic:
        return TopologyReport(TORUS, config.spins, config.field, phi, period, False)
    return TopologyReport(INFINITE_CYLINDER, config.spins, config.field, phi, period, True)
