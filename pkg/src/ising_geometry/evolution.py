"""Time evolution under the all-range Ising Hamiltonian, optionally with a transverse field.

All public functions take the dimensionless time ``chi = J t`` (hbar = 1).
Three routes are provided:

* ``closed_form_evolve``: the zero-field phases exp(-i chi (N-2k)^2 / 4) on the
  Dicke amplitudes;
* ``field_evolve``: eigendecomposition of the real symmetric tridiagonal
  collective Hamiltonian H/J in the Dicke sector;
* ``brute_force_evolve``: the full 2**N Hamiltonian, for oracle checks.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache, reduce
from typing import Optional

import numpy as np
import scipy.sparse as sp
from scipy.linalg import eigh_tridiagonal
from scipy.optimize import minimize_scalar
from scipy.sparse.linalg import expm_multiply

from .states import (
    BlochAngles,
    FullState,
    SymmetricState,
    SystemConfig,
    embed_full,
    spin_coherent_state,
    weights,
)

PERIOD_FIDELITY_TOL = 1e-9
RATIO_TOL = 1e-9
MAX_DENOMINATOR = 10**4
# generic initial direction for period confirmation: overlaps every eigenvector
DEFAULT_PROBE = BlochAngles(theta=1.0, phi=0.4)


def ladder_elements(spins: int) -> np.ndarray:
    """<k+1| S_- |k> for the Dicke states, k = 0..N-1 (k = number of down spins)."""
    s = spins / 2
    m = s - np.arange(spins)
    return np.sqrt(s * (s + 1) - m * (m - 1))


@dataclass(frozen=True, eq=False)
class CollectiveHamiltonian:
    """Real symmetric tridiagonal Hamiltonian restricted to the Dicke sector.

    ``offdiagonal[k]`` couples Dicke states ``k`` and ``k+1``.
    """

    spins: int
    diagonal: np.ndarray
    offdiagonal: np.ndarray

    def dense(self) -> np.ndarray:
        return np.diag(self.diagonal) + np.diag(self.offdiagonal, 1) + np.diag(self.offdiagonal, -1)

    def eigh(self):
        if self.spins == 0 or not np.any(self.offdiagonal):
            order = np.argsort(self.diagonal, kind="stable")
            return self.diagonal[order], np.eye(self.spins + 1)[:, order]
        return eigh_tridiagonal(self.diagonal, self.offdiagonal)

    def expectation(self, state: SymmetricState) -> float:
        d = state.amplitudes
        val = np.sum(self.diagonal * np.abs(d) ** 2)
        val += 2 * np.sum(self.offdiagonal * np.real(np.conj(d[:-1]) * d[1:]))
        return float(val)


def collective_hamiltonian(config: SystemConfig, scaled: bool = False) -> CollectiveHamiltonian:
    """(J/4)(sum sigma^z)^2 + (h/2) sum sigma^x in the Dicke basis.

    With ``scaled=True`` everything is divided by J, which is the generator of
    evolution in ``chi``.
    """
    n = config.spins
    k = np.arange(n + 1)
    if scaled:
        zz, x = 0.25, config.field_ratio
    else:
        zz, x = config.coupling / 4, config.field
    # (h/2) sum sigma^x = h S_x, and <k+1|S_x|k> = ladder/2
    return CollectiveHamiltonian(n, zz * (n - 2 * k) ** 2.0, x * 0.5 * ladder_elements(n))


def zero_field_levels(config: SystemConfig) -> dict:
    """Distinct zero-field energies (J/4)(N-2k)^2 and their full-space degeneracies.

    Degeneracy is 2 C(N,k) for the paired levels and C(N, N/2) for the
    unpaired middle level of even N.
    """
    n = config.spins
    levels = {}
    for k in range(n // 2 + 1):
        e = config.coupling / 4 * (n - 2 * k) ** 2
        levels[e] = math.comb(n, k) if 2 * k == n else 2 * math.comb(n, k)
    return levels


@lru_cache(maxsize=256)
def _scaled_eigensystem(spins: int, field_ratio: float):
    h = collective_hamiltonian(SystemConfig(spins, 1.0, field_ratio), scaled=True)
    vals, vecs = h.eigh()
    vals.setflags(write=False)
    vecs.setflags(write=False)
    return vals, vecs


def scaled_eigensystem(config: SystemConfig):
    """Eigenvalues and eigenvectors of H/J in the Dicke sector (cached, read-only)."""
    return _scaled_eigensystem(config.spins, float(config.field_ratio))


def closed_form_evolve(config: SystemConfig, angles: BlochAngles, chi: float) -> SymmetricState:
    n = config.spins
    d0 = spin_coherent_state(config, angles).amplitudes
    m = n - 2 * np.arange(n + 1)
    return SymmetricState(d0 * np.exp(-0.25j * chi * m**2))


def field_evolve(config: SystemConfig, angles: BlochAngles, chi: float) -> SymmetricState:
    if config.field == 0:
        return closed_form_evolve(config, angles, chi)
    vals, vecs = scaled_eigensystem(config)
    d0 = spin_coherent_state(config, angles).amplitudes
    d = vecs @ (np.exp(-1j * chi * vals) * (vecs.T @ d0))
    return SymmetricState(d / np.linalg.norm(d))


def evolve(config: SystemConfig, angles: BlochAngles, chi: float) -> SymmetricState:
    """Evolve with whatever field the config carries."""
    return field_evolve(config, angles, chi)


def return_amplitudes(config: SystemConfig, angles: BlochAngles, chis) -> np.ndarray:
    """<psi(0)|psi(chi)> for an array of chi, via the spectral decomposition."""
    vals, vecs = scaled_eigensystem(config)
    d0 = spin_coherent_state(config, angles).amplitudes
    p = np.abs(vecs.T @ d0) ** 2
    chis = np.asarray(chis, dtype=float)
    return np.exp(-1j * np.multiply.outer(chis, vals)) @ p


def full_hamiltonian(config: SystemConfig, scaled: bool = False) -> sp.csr_matrix:
    """Full 2**N Hamiltonian: bit weights for the zz term, bit flips for sigma^x."""
    config.require_oracle()
    n = config.spins
    dim = 1 << n
    if scaled:
        zz, hx = 0.25, 0.5 * config.field_ratio
    else:
        zz, hx = config.coupling / 4, config.field / 2
    h = sp.diags(zz * (n - 2.0 * weights(n)) ** 2, format="csr")
    if hx != 0:
        idx = np.arange(dim)
        rows = np.concatenate([idx ^ (1 << j) for j in range(n)])
        cols = np.tile(idx, n)
        h = h + sp.csr_matrix((np.full(rows.size, hx), (rows, cols)), shape=(dim, dim))
    return h


def brute_force_evolve(config: SystemConfig, angles: BlochAngles, chi: float) -> FullState:
    config.require_oracle()
    psi0 = embed_full(config, spin_coherent_state(config, angles)).amplitudes
    h = full_hamiltonian(config, scaled=True)
    if config.field == 0:
        psi = np.exp(-1j * chi * h.diagonal()) * psi0
    else:
        psi = expm_multiply(-1j * chi * h, psi0.astype(complex), traceA=0.0)
        psi = psi / np.linalg.norm(psi)
    return FullState(psi)


def full_space_levels(config: SystemConfig, decimals: int = 9) -> dict:
    """Distinct eigenvalues of the dense full Hamiltonian with their multiplicities."""
    vals = np.linalg.eigvalsh(full_hamiltonian(config).toarray())
    uniq, counts = np.unique(np.round(vals, decimals), return_counts=True)
    return {float(u): int(c) for u, c in zip(uniq, counts)}


@dataclass(frozen=True)
class PeriodicityReport:
    periodic: bool
    period_chi: Optional[float]
    horizon_chi: float
    max_return_fidelity: float
    method: str = "spectral"
    candidate_period_chi: Optional[float] = None

    def __post_init__(self):
        if self.periodic and (self.period_chi is None or self.period_chi > self.horizon_chi):
            raise ValueError("a periodic report needs a period within the horizon")


def _distinct(values, tol: float) -> np.ndarray:
    vals = np.sort(np.asarray(values, dtype=float))
    keep = [vals[0]]
    for v in vals[1:]:
        if v - keep[-1] > tol * max(1.0, abs(v)):
            keep.append(v)
    return np.array(keep)


def commensurate_period(eigenvalues, tol: float = RATIO_TOL, max_denominator: int = MAX_DENOMINATOR):
    """Smallest chi > 0 at which every phase exp(-i chi E) agrees up to a global one.

    Returns ``None`` when some gap ratio has no rational approximation with
    denominator <= ``max_denominator`` within ``tol``. A spectrum with a
    single distinct level returns 2 pi by convention (the state never moves).
    """
    levels = _distinct(eigenvalues, tol)
    if levels.size == 1:
        return 2 * math.pi
    gaps = levels[1:] - levels[0]
    fracs = []
    for r in gaps / gaps[0]:
        f = Fraction(float(r)).limit_denominator(max_denominator)
        if abs(r - f.numerator / f.denominator) > tol * max(1.0, abs(r)):
            return None
        fracs.append(f)
    lcm = reduce(lambda a, b: a * b // math.gcd(a, b), (f.denominator for f in fracs))
    ints = [f.numerator * (lcm // f.denominator) for f in fracs]
    g = reduce(math.gcd, ints)
    omega = float(gaps[0]) * g / lcm
    return 2 * math.pi / omega


def detect_period(
    config: SystemConfig,
    horizon_chi: float,
    grid_steps: int = 20000,
    angles: Optional[BlochAngles] = None,
) -> PeriodicityReport:
    """Decide whether evolution in ``chi`` returns to the initial state.

    First the spectrum of H/J is tested for commensurate level spacings; a
    candidate period found that way is confirmed by the return fidelity of
    ``angles`` (a generic probe direction by default). Otherwise the return
    fidelity is scanned on ``grid_steps`` points of (0, horizon_chi] and the
    best point is refined locally. Non-periodic means "not found within the
    horizon", never a proof of aperiodicity.
    """
    if not horizon_chi > 0:
        raise ValueError("horizon_chi must be positive")
    if grid_steps < 100:
        raise ValueError("grid_steps must be at least 100")
    angles = angles or DEFAULT_PROBE
    vals, _ = scaled_eigensystem(config)

    def ret(chi):
        return min(1.0, float(abs(return_amplitudes(config, angles, [chi])[0])))

    candidate = commensurate_period(vals)
    if candidate is not None:
        fid = ret(candidate)
        if fid >= 1 - PERIOD_FIDELITY_TOL and candidate <= horizon_chi:
            return PeriodicityReport(True, candidate, horizon_chi, fid, "spectral", candidate)

    grid = np.linspace(0, horizon_chi, grid_steps + 1)[1:]
    fids = np.abs(return_amplitudes(config, angles, grid))
    # ignore the initial decay away from chi = 0
    leaving = np.nonzero(fids < 1 - 1e-3)[0]
    best, best_chi = 0.0, None
    if leaving.size:
        tail = slice(leaving[0], None)
        i = leaving[0] + int(np.argmax(fids[tail]))
        best, best_chi = float(fids[i]), float(grid[i])
        dx = grid[1] - grid[0] if grid.size > 1 else horizon_chi
        lo, hi = max(best_chi - dx, grid[leaving[0]]), min(best_chi + dx, horizon_chi)
        opt = minimize_scalar(lambda c: -ret(c), bounds=(lo, hi), method="bounded",
                              options={"xatol": 1e-12})
        if -opt.fun > best:
            best, best_chi = float(-opt.fun), float(opt.x)
    if candidate is not None and candidate <= horizon_chi:
        best = max(best, ret(candidate))
    if best >= 1 - PERIOD_FIDELITY_TOL and best_chi is not None:
        return PeriodicityReport(True, best_chi, horizon_chi, best, "scan", candidate)
    return PeriodicityReport(False, None, horizon_chi, best, "scan", candidate)
