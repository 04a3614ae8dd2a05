"""Geometric entanglement of one spin with the rest of the system.

The measure is E = (1 - |<sigma_j>|) / 2, with <sigma_j> the Bloch vector of
a single spin. In the symmetric sector every spin carries the same Bloch
vector, so it is read off the collective spin: <sigma_j> = (2/N) <S>.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .evolution import ladder_elements
from .states import FullState, SymmetricState, SystemConfig


@dataclass(frozen=True)
class MeanSpinVector:
    sx: float
    sy: float
    sz: float

    @property
    def magnitude(self) -> float:
        return float(np.sqrt(self.sx**2 + self.sy**2 + self.sz**2))

    def as_array(self) -> np.ndarray:
        return np.array([self.sx, self.sy, self.sz])


def mean_spin(config: SystemConfig, state: SymmetricState) -> MeanSpinVector:
    n = config.spins
    if state.spins != n:
        raise ValueError(f"state has {state.spins} spins, config has {n}")
    d = state.amplitudes
    p = np.abs(d) ** 2
    sz = float(np.sum(p * (n - 2 * np.arange(n + 1)))) / n
    # <S_+> = sum_k conj(d_k) d_{k+1} <k|S_+|k+1>, and <S_+> = <S_x> + i <S_y>
    s_plus = np.sum(np.conj(d[:-1]) * d[1:] * ladder_elements(n))
    return MeanSpinVector(2 * s_plus.real / n, 2 * s_plus.imag / n, sz)


def geometric_entanglement(config: SystemConfig, state: SymmetricState) -> float:
    """Entanglement of a single spin with the remaining N-1, in [0, 1/2]."""
    config.require_pair()
    mag = min(mean_spin(config, state).magnitude, 1.0)
    return 0.5 * (1.0 - mag)


def reduced_bloch_vector(state: FullState, spin: int = 0) -> np.ndarray:
    """Bloch vector of one spin from its 2x2 reduced density matrix.

    Brute-force oracle route: partial trace over the other N-1 spins.
    """
    n = state.spins
    if not 0 <= spin < n:
        raise ValueError(f"spin index {spin} out of range for N={n}")
    # index bit j is axis (n-1-j) of the C-ordered reshape
    psi = np.moveaxis(state.amplitudes.reshape((2,) * n), n - 1 - spin, 0).reshape(2, -1)
    rho = psi @ psi.conj().T
    return np.array([2 * rho[0, 1].real, -2 * rho[0, 1].imag, (rho[0, 0] - rho[1, 1]).real])


def full_state_entanglement(state: FullState, spin: int = 0) -> float:
    if state.spins < 2:
        raise ValueError("one-spin-vs-rest quantities need at least 2 spins")
    return 0.5 * (1.0 - min(float(np.linalg.norm(reduced_bloch_vector(state, spin))), 1.0))


def entanglement_closed_form(config: SystemConfig, theta, chi):
    """Zero-field entanglement as a function of the initial polar angle and chi.

    Accepts scalars or broadcastable arrays.
    """
    config.require_pair()
    c2 = np.cos(theta) ** 2
    s2 = np.sin(theta) ** 2
    contraction = np.cos(chi) ** 2 + c2 * np.sin(chi) ** 2
    out = 0.5 * (1.0 - np.sqrt(c2 + s2 * contraction ** (config.spins - 1)))
    return float(out) if np.ndim(out) == 0 else out


def entanglement_from_squares(spins: int, cos2, chi):
    """Same closed form, parametrized by cos^2(theta) (sin^2 = 1 - cos^2)."""
    cos2 = np.asarray(cos2, dtype=float)
    contraction = np.cos(chi) ** 2 + cos2 * np.sin(chi) ** 2
    out = 0.5 * (1.0 - np.sqrt(cos2 + (1.0 - cos2) * contraction ** (spins - 1)))
    return float(out) if np.ndim(out) == 0 else out


def entanglement_theta_half(config: SystemConfig, chi):
    """Closed form at theta = pi/2: (1 - |cos chi|^(N-1)) / 2."""
    config.require_pair()
    out = 0.5 * (1.0 - np.abs(np.cos(chi)) ** (config.spins - 1))
    return float(out) if np.ndim(out) == 0 else out


def entanglement_large_n_limit(theta):
    """Value approached at chi = pi/2 as N grows: (1 - |cos theta|) / 2."""
    out = 0.5 * (1.0 - np.abs(np.cos(theta)))
    return float(out) if np.ndim(out) == 0 else out
