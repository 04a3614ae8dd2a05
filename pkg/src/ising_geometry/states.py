"""System parameters and state representations.

Two representations are used. ``SymmetricState`` stores the N+1 amplitudes of
the permutation-symmetric (Dicke) sector and is what every production path
works with. ``FullState`` stores all 2**N amplitudes and exists only so the
brute-force oracles have something to act on.

Conventions: ``k`` counts down spins, and in a full-space index bit ``j``
set means spin ``j`` is down (spin 0 is the least significant bit).
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import NamedTuple, Optional, Union

import numpy as np
from scipy.special import gammaln, xlogy

NORM_TOL = 1e-12
LEAKAGE_TOL = 1e-10


class OracleCapError(ValueError):
    """Raised when a full-space operation is requested above ``oracle_cap``."""


class SymmetryLeakageWarning(RuntimeWarning):
    """A full-space state has weight outside the symmetric sector."""


@dataclass(frozen=True)
class SystemConfig:
    spins: int
    coupling: float = 1.0
    field: float = 0.0
    gauge_factor: float = 1.0
    oracle_cap: int = 12

    def __post_init__(self):
        if int(self.spins) != self.spins or self.spins < 1:
            raise ValueError(f"spins must be a positive integer, got {self.spins!r}")
        if not self.gauge_factor > 0:
            raise ValueError(f"gauge_factor must be positive, got {self.gauge_factor!r}")
        if int(self.oracle_cap) != self.oracle_cap or self.oracle_cap < 1:
            raise ValueError(f"oracle_cap must be a positive integer, got {self.oracle_cap!r}")
        for name in ("coupling", "field", "gauge_factor"):
            if not math.isfinite(getattr(self, name)):
                raise ValueError(f"{name} must be finite")
        for name in ("coupling", "field", "gauge_factor"):
            object.__setattr__(self, name, float(getattr(self, name)))
        object.__setattr__(self, "spins", int(self.spins))
        object.__setattr__(self, "oracle_cap", int(self.oracle_cap))

    @property
    def field_ratio(self) -> float:
        """Dimensionless field strength h/J."""
        if self.coupling == 0:
            raise ValueError("h/J is undefined for zero coupling")
        return self.field / self.coupling

    def require_pair(self):
        if self.spins < 2:
            raise ValueError("one-spin-vs-rest quantities need at least 2 spins")

    def require_oracle(self):
        if self.spins > self.oracle_cap:
            raise OracleCapError(
                f"N={self.spins} exceeds oracle_cap={self.oracle_cap} for full-space states"
            )


@dataclass(frozen=True)
class BlochAngles:
    theta: float
    phi: float = 0.0

    def __post_init__(self):
        if not (math.isfinite(self.theta) and math.isfinite(self.phi)):
            raise ValueError("Bloch angles must be finite")

    @property
    def direction(self) -> np.ndarray:
        st = math.sin(self.theta)
        return np.array([st * math.cos(self.phi), st * math.sin(self.phi), math.cos(self.theta)])


def _frozen_unit_vector(amplitudes, expected_size: int, label: str) -> np.ndarray:
    a = np.array(amplitudes, dtype=complex).reshape(-1)
    if a.size != expected_size:
        raise ValueError(f"{label} needs {expected_size} amplitudes, got {a.size}")
    norm = np.linalg.norm(a)
    if abs(norm - 1.0) > NORM_TOL:
        raise ValueError(f"{label} is not normalized (norm={norm!r})")
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class SymmetricState:
    """Amplitudes ``d_k`` on the Dicke states with ``k`` down spins."""

    amplitudes: np.ndarray

    def __post_init__(self):
        a = np.array(self.amplitudes, dtype=complex).reshape(-1)
        object.__setattr__(self, "amplitudes", _frozen_unit_vector(a, a.size, "SymmetricState"))

    @property
    def spins(self) -> int:
        return self.amplitudes.size - 1


@dataclass(frozen=True, eq=False)
class FullState:
    """Amplitudes over all 2**N computational basis states."""

    amplitudes: np.ndarray

    def __post_init__(self):
        a = np.array(self.amplitudes, dtype=complex).reshape(-1)
        n = a.size.bit_length() - 1
        if a.size < 2 or a.size != 1 << n:
            raise ValueError(f"FullState size must be a power of two >= 2, got {a.size}")
        object.__setattr__(self, "amplitudes", _frozen_unit_vector(a, a.size, "FullState"))

    @property
    def spins(self) -> int:
        return self.amplitudes.size.bit_length() - 1


State = Union[SymmetricState, FullState]


class Projection(NamedTuple):
    state: Optional[SymmetricState]
    leakage: float


def log_binomial(n: int, k) -> np.ndarray:
    k = np.asarray(k, dtype=float)
    return gammaln(n + 1) - gammaln(k + 1) - gammaln(n - k + 1)


def coherent_amplitudes(spins: int, theta, phi) -> np.ndarray:
    """Dicke amplitudes of the product state with every spin along (theta, phi).

    Computed in log space so that large N does not overflow the binomials.
    """
    k = np.arange(spins + 1)
    c, s = math.cos(theta / 2), math.sin(theta / 2)
    logmag = 0.5 * log_binomial(spins, k) + xlogy(spins - k, abs(c)) + xlogy(k, abs(s))
    sign = np.sign(c) ** (spins - k) * np.sign(s) ** k
    return sign * np.exp(logmag) * np.exp(1j * k * phi)


def spin_coherent_state(config: SystemConfig, angles: BlochAngles) -> SymmetricState:
    d = coherent_amplitudes(config.spins, angles.theta, angles.phi)
    return SymmetricState(d / np.linalg.norm(d))


def weights(spins: int) -> np.ndarray:
    """Number of down spins for every full-space basis index."""
    idx = np.arange(1 << spins)
    w = np.zeros(idx.size, dtype=np.int64)
    for j in range(spins):
        w += (idx >> j) & 1
    return w


def _exact_binomials(n: int) -> np.ndarray:
    return np.array([math.comb(n, k) for k in range(n + 1)], dtype=float)


def embed_full(config: SystemConfig, state: SymmetricState) -> FullState:
    config.require_oracle()
    _check_size(config, state)
    w = weights(config.spins)
    norms = np.sqrt(_exact_binomials(config.spins))
    return FullState(state.amplitudes[w] / norms[w])


def project_symmetric(config: SystemConfig, state: FullState) -> Projection:
    """Project a full-space state onto the Dicke sector.

    Returns the renormalized symmetric state (``None`` when nothing is left)
    and the norm of the component outside the sector. Leakage above
    ``LEAKAGE_TOL`` is flagged with a ``SymmetryLeakageWarning``; both model
    Hamiltonians commute with spin permutations, so it indicates a bug.
    """
    config.require_oracle()
    _check_size(config, state)
    n = config.spins
    w = weights(n)
    sums = np.bincount(w, weights=state.amplitudes.real, minlength=n + 1) + 1j * np.bincount(
        w, weights=state.amplitudes.imag, minlength=n + 1
    )
    counts = _exact_binomials(n)
    d = sums / np.sqrt(counts)
    # difference with the embedded projection, not sqrt(1 - |P psi|^2), to keep precision
    leakage = float(np.linalg.norm(state.amplitudes - (d / np.sqrt(counts))[w]))
    if leakage > LEAKAGE_TOL:
        warnings.warn(
            f"full-space state leaks {leakage:.3e} outside the symmetric sector",
            SymmetryLeakageWarning,
            stacklevel=2,
        )
    kept = np.linalg.norm(d)
    if kept < 1e-12:
        return Projection(None, leakage)
    return Projection(SymmetricState(d / kept), leakage)


def overlap(a: State, b: State) -> complex:
    if type(a) is not type(b) or a.amplitudes.size != b.amplitudes.size:
        raise ValueError("states must share representation and number of spins")
    return complex(np.vdot(a.amplitudes, b.amplitudes))


def fidelity(a: State, b: State) -> float:
    """|<a|b>|, insensitive to global phase."""
    return min(1.0, abs(overlap(a, b)))


def _check_size(config: SystemConfig, state: State):
    if state.spins != config.spins:
        raise ValueError(f"state has {state.spins} spins, config has {config.spins}")
