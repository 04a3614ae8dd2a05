"""Self-verification suite: every closed form against its independent route.

Each check returns the largest deviation it saw; it passes when that is at
most the check's tolerance. ``quick`` caps N at 6 and grids at 10 points.
"""

from __future__ import annotations

import math
import time
from dataclasses import asdict, dataclass
from typing import Callable, Dict, List, Optional

import numpy as np

from .entanglement import (
    entanglement_closed_form,
    entanglement_large_n_limit,
    entanglement_theta_half,
    full_state_entanglement,
    geometric_entanglement,
)
from .evolution import (
    brute_force_evolve,
    closed_form_evolve,
    collective_hamiltonian,
    detect_period,
    field_evolve,
    full_space_levels,
    zero_field_levels,
)
from .field_geometry import (
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
)
from .geometry import (
    cos2theta_from_curvature,
    curvature_closed_form,
    curvature_extrema,
    entanglement_vs_curvature,
    evolution_circle_radius,
    fs_metric_fd,
    metric_closed_form,
    metric_from_products,
    scalar_curvature_numeric,
    scalar_products,
)
from .states import (
    BlochAngles,
    SymmetricState,
    SystemConfig,
    embed_full,
    fidelity,
    project_symmetric,
    spin_coherent_state,
)

LEVELS = ("quick", "full")


@dataclass(frozen=True)
class Level:
    max_spins: int
    grid: int
    quick: bool


def _level(name: str) -> Level:
    if name == "quick":
        return Level(6, 10, True)
    if name == "full":
        return Level(12, 50, False)
    raise ValueError(f"unknown verification level {name!r}; expected one of {LEVELS}")


def _spins(lv: Level, values):
    return [n for n in values if n <= lv.max_spins]


def _rel(a: float, b: float) -> float:
    return abs(a - b) / abs(b) if b != 0 else abs(a)


# ---------------------------------------------------------------- states


def check_coherent_norm(lv):
    top = 50 if lv.quick else 200
    return max(
        abs(np.linalg.norm(spin_coherent_state(SystemConfig(n), BlochAngles(t, p)).amplitudes) - 1)
        for n in range(1, top + 1)
        for t, p in ((0.3, 0.1), (math.pi / 2, 2.0), (2.9, 5.0))
    )


def check_embed_roundtrip(lv):
    rng = np.random.default_rng(7)
    worst = 0.0
    for n in _spins(lv, range(1, 11)):
        c = SystemConfig(n)
        for _ in range(3):
            v = rng.normal(size=n + 1) + 1j * rng.normal(size=n + 1)
            s = SymmetricState(v / np.linalg.norm(v))
            back = project_symmetric(c, embed_full(c, s))
            worst = max(worst, np.max(np.abs(back.state.amplitudes - s.amplitudes)), back.leakage)
    return worst


# ---------------------------------------------------------------- evolution


def _oracle_points(lv):
    rng = np.random.default_rng(11)
    spins = list(range(2, lv.max_spins + 1))
    count = lv.grid if lv.quick else 60
    for i in range(count):
        n = spins[i % len(spins)]
        yield n, float(rng.uniform(0, math.pi)), float(rng.uniform(0, 2 * math.pi)), float(
            rng.uniform(0, 2 * math.pi)
        ), float(rng.choice([0.0, 0.3, 0.7, 1.5]))


def check_oracle_evolution(lv):
    worst = 0.0
    for n, th, ph, chi, lam in _oracle_points(lv):
        c = SystemConfig(n, field=lam)
        a = BlochAngles(th, ph)
        proj = project_symmetric(c, brute_force_evolve(c, a, chi))
        worst = max(worst, 1 - fidelity(proj.state, field_evolve(c, a, chi)))
    return worst


def check_symmetric_leakage(lv):
    return max(
        project_symmetric(SystemConfig(n, field=lam), brute_force_evolve(
            SystemConfig(n, field=lam), BlochAngles(th, ph), chi)).leakage
        for n, th, ph, chi, lam in _oracle_points(lv)
    )


def check_norm_conservation(lv):
    worst = 0.0
    for n in _spins(lv, (2, 5, 9, 40)) + ([] if lv.quick else [200]):
        for lam in (0.0, 0.8):
            c = SystemConfig(n, field=lam)
            for chi in np.linspace(0, 20, lv.grid):
                worst = max(worst, abs(np.linalg.norm(field_evolve(c, BlochAngles(1.1, 0.4), chi).amplitudes) - 1))
    return worst


def check_energy_conservation(lv):
    worst = 0.0
    for n in _spins(lv, (2, 4, 6, 9, 30)):
        for lam in (0.0, 0.6):
            c = SystemConfig(n, field=lam)
            h = collective_hamiltonian(c)
            a = BlochAngles(0.9, 0.7)
            e0 = h.expectation(field_evolve(c, a, 0.0))
            for chi in np.linspace(0, 15, lv.grid):
                worst = max(worst, _rel(h.expectation(field_evolve(c, a, chi)), e0))
    return worst


def check_zero_field_period(lv):
    worst = 0.0
    for n in range(2, 10):
        c = SystemConfig(n)
        a = BlochAngles(1.0, 0.5)
        worst = max(worst, 1 - fidelity(closed_form_evolve(c, a, 0.0), closed_form_evolve(c, a, 2 * math.pi)))
        rep = detect_period(c, 20.0, 1000)
        ok = rep.periodic and any(abs(rep.period_chi - 2 * math.pi / d) < 1e-9 for d in range(1, 9))
        worst = max(worst, 1 - rep.max_return_fidelity if ok else 1.0)
    return worst


def check_zero_field_spectrum(lv):
    """Mismatch count between predicted and diagonalized levels/degeneracies."""
    bad = 0
    for n in range(1, 7):
        c = SystemConfig(n, coupling=1.3)
        h = collective_hamiltonian(c)
        k = np.arange(n + 1)
        bad += int(np.any(h.diagonal != 1.3 / 4 * (n - 2 * k) ** 2.0)) + int(np.any(h.offdiagonal))
        predicted = {round(e, 9): d for e, d in zero_field_levels(c).items()}
        bad += int(predicted != full_space_levels(c))
        bad += int(sum(predicted.values()) != 2**n)
    return float(bad)


# ---------------------------------------------------------------- entanglement


def check_entanglement_oracle(lv):
    worst = 0.0
    chis = np.linspace(0, 2 * math.pi, 10 if lv.quick else 25)
    for n in _spins(lv, range(2, 11)):
        c = SystemConfig(n)
        for th in (math.pi / 8, math.pi / 4, 3 * math.pi / 8, math.pi / 2):
            for ph in (0.0, math.pi / 3, math.pi / 2):
                for chi in chis:
                    brute = full_state_entanglement(brute_force_evolve(c, BlochAngles(th, ph), chi))
                    sym = geometric_entanglement(c, closed_form_evolve(c, BlochAngles(th, ph), chi))
                    closed = entanglement_closed_form(c, th, chi)
                    worst = max(worst, abs(closed - brute), abs(closed - sym))
    return worst


def check_cat_state(lv):
    worst = 0.0
    for n in range(2, 11):
        c = SystemConfig(n)
        a = BlochAngles(math.pi / 2, 0.0)
        worst = max(
            worst,
            abs(entanglement_theta_half(c, math.pi / 2) - 0.5),
            abs(full_state_entanglement(brute_force_evolve(c, a, math.pi / 2)) - 0.5),
            abs(geometric_entanglement(c, closed_form_evolve(c, a, math.pi / 2)) - 0.5),
        )
    return worst


def check_entanglement_extrema(lv):
    """Distance of grid maxima from pi/2, 3pi/2 plus the value at the zeros."""
    chis = np.linspace(0, 2 * math.pi, 501)
    step = chis[1]
    worst = 0.0
    for n in (2, 3, 6, 9):
        c = SystemConfig(n)
        for th in np.linspace(0.2, math.pi - 0.2, 7):
            e = entanglement_closed_form(c, th, chis)
            for lo, hi, target in ((0, 250, math.pi / 2), (250, 501, 3 * math.pi / 2)):
                i = lo + int(np.argmax(e[lo:hi]))
                worst = max(worst, max(abs(chis[i] - target) - step, 0.0))
            worst = max(worst, float(np.max(np.abs(entanglement_closed_form(c, th, [0, math.pi, 2 * math.pi])))))
    return worst


def check_large_n(lv):
    c = SystemConfig(50)
    th = math.pi / 4
    dev = abs(entanglement_closed_form(c, th, math.pi / 2) - entanglement_large_n_limit(th))
    vals = [entanglement_closed_form(SystemConfig(n), th, math.pi / 2) for n in range(2, 31)]
    drop = max(0.0, -float(np.min(np.diff(vals))))
    return max(dev, drop)


# ---------------------------------------------------------------- geometry


def _thetas(lv, count=50):
    return np.linspace(0.1, math.pi - 0.1, lv.grid if lv.quick else count)


def check_metric_fd(lv):
    worst = 0.0
    for n in _spins(lv, (2, 3, 6, 9)):
        c = SystemConfig(n)
        for th in _thetas(lv):
            fd, cf = fs_metric_fd(c, th, 1.0), metric_closed_form(c, th)
            worst = max(worst, _rel(fd.g11, cf.g11), _rel(fd.g22, cf.g22))
    return worst


def check_metric_offdiagonal(lv):
    return max(
        abs(fs_metric_fd(SystemConfig(n), th, chi, phi=ph).g12)
        for n in _spins(lv, (2, 3, 6, 9))
        for th in _thetas(lv, 20)
        for chi in (0.3, 1.1, 2.7)
        for ph in (0.0, 1.0)
    )


def check_metric_assembly(lv):
    worst = 0.0
    for n in range(1, 13):
        c = SystemConfig(n, gauge_factor=math.sqrt(2))
        for th in np.linspace(0, math.pi, 37):
            a = metric_from_products(scalar_products(c, th), c.gauge_factor)
            cf = metric_closed_form(c, th)
            worst = max(worst, abs(a.g11 - cf.g11), abs(a.g12 - cf.g12), abs(a.g22 - cf.g22))
    return worst


def check_curvature_numeric(lv):
    return max(
        abs(scalar_curvature_numeric(SystemConfig(n), th) - curvature_closed_form(SystemConfig(n), th))
        for n in _spins(lv, (2, 3, 6, 9))
        for th in _thetas(lv)
    )


def check_curvature_extrema(lv):
    worst = 0.0
    for n in (2, 3, 6, 9):
        c = SystemConfig(n)
        lo, hi = curvature_extrema(c)
        worst = max(
            worst,
            abs(lo - 16 * (2 - n) / n),
            abs(hi - 16 / n * (2 - 3 / (4 * (n - 1)))),
            abs(curvature_closed_form(c, math.pi / 2) - lo),
            abs(curvature_closed_form(c, 0.0) - hi),
            abs(curvature_closed_form(c, math.pi) - hi),
        )
        grid = curvature_closed_form(c, np.linspace(0, math.pi, 1000))
        worst = max(worst, lo - float(grid.min()), float(grid.max()) - hi)
    return worst


def check_curvature_symmetry(lv):
    # mirror pairs that are exact in floating point: pi - mirror is computed exactly
    mirror = math.pi - np.linspace(0, math.pi / 2, 200)
    th = math.pi - mirror
    return max(
        float(np.max(np.abs(curvature_closed_form(SystemConfig(n), th) - curvature_closed_form(SystemConfig(n), mirror))))
        for n in (2, 3, 6, 9, 25)
    )


def check_radius_identity(lv):
    return max(
        abs(evolution_circle_radius(SystemConfig(n), th) ** 2 - metric_closed_form(SystemConfig(n), th).g22)
        for n in (2, 3, 6, 9)
        for th in np.linspace(0, math.pi, 101)
    )


def check_curvature_roundtrip(lv):
    worst = 0.0
    for n in (2, 3, 6, 9):
        c = SystemConfig(n)
        for th in np.linspace(1e-3, math.pi / 2, lv.grid if lv.quick else 200):
            worst = max(worst, abs(cos2theta_from_curvature(c, curvature_closed_form(c, th)) - math.cos(th) ** 2))
    return worst


def check_ent_vs_curvature(lv):
    worst = 0.0
    for n in (2, 3, 6, 9):
        c = SystemConfig(n)
        lo, hi = curvature_extrema(c)
        e = [entanglement_vs_curvature(c, math.pi / 2, r) for r in np.linspace(lo, hi, 100)]
        worst = max(worst, abs(e[0] - 0.5), abs(e[-1]), max(0.0, float(np.max(np.diff(e)))))
    return worst


# ---------------------------------------------------------------- field geometry


def check_field_metric_fd(lv):
    worst = 0.0
    for n in _spins(lv, (2, 3, 6)):
        for lam in (0.3, 1.0):
            c = SystemConfig(n, field=lam)
            for ph in (0.0, math.pi / 3, math.pi / 2):
                for th in np.linspace(0.1, math.pi - 0.1, 10 if lv.quick else 20):
                    fd, cf = field_metric_fd(c, th, ph, 0.8), field_metric_closed_form(c, th, ph)
                    worst = max(worst, _rel(fd.g11, cf.g11), _rel(fd.g22, cf.g22))
                    # g12 is exactly zero at phi = 0, so compare on the g11 scale there
                    worst = max(worst, abs(fd.g12 - cf.g12) / max(abs(cf.g12), cf.g11))
    return worst


def check_pullback(lv):
    rng = np.random.default_rng(5)
    worst = 0.0
    for _ in range(lv.grid if lv.quick else 100):
        n = int(rng.integers(2, 12))
        c = SystemConfig(n, field=float(rng.uniform(-2, 2)), gauge_factor=float(rng.choice([1, math.sqrt(2), 2])))
        tc = TransformedCoords(float(rng.uniform(0, math.pi)), float(rng.uniform(-3, 3)), float(rng.uniform(0, 2 * math.pi)))
        pb, dg = pulled_back_field_metric(c, tc), diagonalized_field_metric(c, tc)
        worst = max(worst, abs(pb.g12), abs(pb.g22 - dg.g22), abs(pb.g11 - dg.g11))
    return worst


def check_field_zero_limit(lv):
    """Any nonzero difference between the h = 0 field route and the zero-field route."""
    bad = 0
    for n in (2, 3, 6):
        c = SystemConfig(n)
        for th in np.linspace(0.1, math.pi - 0.1, 7):
            for ph in (0.0, 1.0):
                bad += field_metric_closed_form(c, th, ph) != metric_closed_form(c, th)
                bad += field_metric_fd(c, th, ph, 0.5) != fs_metric_fd(c, th, 0.5, phi=ph)
                dg = diagonalized_field_metric(c, TransformedCoords(th, 0.9, ph))
                cf = metric_closed_form(c, th)
                bad += (dg.g11, dg.g12, dg.g22) != (cf.g11, cf.g12, cf.g22)
    return float(bad)


def check_topology(lv):
    """Number of misclassified reference cases."""
    cases = [
        (SystemConfig(6), 0.3, CLOSED_DUMBBELL),
        (SystemConfig(4, field=1.0), math.pi / 2, SPHERE),
        (SystemConfig(4, field=1.0), -math.pi / 2, SPHERE),
        (SystemConfig(1, field=1.0), 0.0, TORUS),
        (SystemConfig(2, field=math.sqrt(3) / 2), 0.0, TORUS),
        (SystemConfig(4, field=0.7), 0.0, INFINITE_CYLINDER),
    ]
    return float(sum(classify_topology(c, ph, 200.0).classification != want for c, ph, want in cases))


@dataclass(frozen=True)
class Check:
    name: str
    tolerance: float
    run: Callable[[Level], float]


CHECKS: List[Check] = [
    Check("coherent_state_norm", 1e-13, check_coherent_norm),
    Check("embed_project_roundtrip", 1e-14, check_embed_roundtrip),
    Check("oracle_evolution_fidelity", 1e-10, check_oracle_evolution),
    Check("symmetric_sector_leakage", 1e-12, check_symmetric_leakage),
    Check("norm_conservation", 1e-12, check_norm_conservation),
    Check("energy_conservation", 1e-10, check_energy_conservation),
    Check("zero_field_periodicity", 1e-12, check_zero_field_period),
    Check("zero_field_spectrum", 0.0, check_zero_field_spectrum),
    Check("entanglement_closed_vs_oracle", 1e-10, check_entanglement_oracle),
    Check("cat_state_entanglement", 1e-10, check_cat_state),
    Check("entanglement_extrema", 1e-12, check_entanglement_extrema),
    Check("large_n_entanglement", 1e-12, check_large_n),
    Check("metric_fd_vs_closed_form", 1e-5, check_metric_fd),
    Check("metric_offdiagonal_zero", 1e-8, check_metric_offdiagonal),
    Check("metric_scalar_product_assembly", 1e-12, check_metric_assembly),
    Check("curvature_riemann_pipeline", 1e-6, check_curvature_numeric),
    Check("curvature_extrema", 1e-10, check_curvature_extrema),
    Check("curvature_symmetry", 1e-14, check_curvature_symmetry),
    Check("radius_squared_is_g_chichi", 1e-12, check_radius_identity),
    Check("curvature_inversion_roundtrip", 1e-9, check_curvature_roundtrip),
    Check("entanglement_vs_curvature", 1e-12, check_ent_vs_curvature),
    Check("field_metric_fd_vs_closed_form", 1e-5, check_field_metric_fd),
    Check("field_metric_pullback", 1e-12, check_pullback),
    Check("field_zero_limit_bitwise", 0.0, check_field_zero_limit),
    Check("topology_classification", 0.0, check_topology),
]


@dataclass(frozen=True)
class CheckResult:
    name: str
    tolerance: float
    max_deviation: float
    passed: bool
    seconds: float


@dataclass(frozen=True)
class VerificationReport:
    level: str
    results: List[CheckResult]

    @property
    def passed(self) -> bool:
        return all(r.passed for r in self.results)

    @property
    def first_failure(self) -> Optional[str]:
        return next((r.name for r in self.results if not r.passed), None)

    def to_dict(self) -> dict:
        return {
            "level": self.level,
            "passed": self.passed,
            "first_failure": self.first_failure,
            "checks": [asdict(r) for r in self.results],
        }


def run_verification(level: str = "quick", tolerances: Optional[Dict[str, float]] = None) -> VerificationReport:
    """Run every check; ``tolerances`` overrides individual tolerances by name."""
    lv = _level(level)
    tolerances = dict(tolerances or {})
    unknown = set(tolerances) - {c.name for c in CHECKS}
    if unknown:
        raise ValueError(f"unknown checks: {sorted(unknown)}")
    results = []
    for check in CHECKS:
        tol = tolerances.get(check.name, check.tolerance)
        start = time.perf_counter()
        dev = float(check.run(lv))
        results.append(CheckResult(check.name, tol, dev, bool(dev <= tol), time.perf_counter() - start))
    return VerificationReport(level, results)
