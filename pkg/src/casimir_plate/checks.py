"""Randomised invariant checks and oracle comparisons shipped with the CLI."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .atoms import StaticAtom
from .correlations import correlation_density
from .geometry import PlateGeometry
from .potential import cp_far_zone_plate, cp_plate_correlation, far_zone_terms
from .tensors import angular_oracle_tau, dipole_matrix, fd_oracle_dipole, tau_matrix


@dataclass
class CheckOutcome:
    name: str
    passed: bool
    worst: float
    limit: float


def random_geometry(rng: np.random.Generator, z_max: float = 10.0, on_plate: bool = False) -> PlateGeometry:
    while True:
        r_a = np.array([rng.uniform(-5, 5), rng.uniform(-5, 5), 0.0 if on_plate else rng.uniform(0, z_max)])
        r_b = np.array([rng.uniform(-5, 5), rng.uniform(-5, 5), rng.uniform(0, z_max)])
        if r_a[2] == 0 and not on_plate:
            continue
        if np.linalg.norm(r_b - r_a) > 1e-3:
            return PlateGeometry(r_a, r_b)


def random_separation(rng: np.random.Generator, r_min: float, r_max: float) -> np.ndarray:
    n = rng.normal(size=3)
    return rng.uniform(r_min, r_max) * n / np.linalg.norm(n)


def oracle_samples(rng: np.random.Generator, count: int, x_min=0.1, x_max=50.0, r_min=2.0, r_max=10.0):
    """(k, R_vec) pairs with kR log-uniform in [x_min, x_max]."""
    out = []
    for _ in range(count):
        R_vec = random_separation(rng, r_min, r_max)
        x = float(np.exp(rng.uniform(np.log(x_min), np.log(x_max))))
        out.append((x / np.linalg.norm(R_vec), R_vec))
    return out


def fd_step(k: float, R: float) -> float:
    """Finite-difference step balancing truncation against rounding of the phase."""
    return 1e-2 * min(R, 1.0 / k)


def oracle_rows(seed: int, samples: int, node_budget: int = 128) -> list[dict]:
    rng = np.random.default_rng(seed)
    rows = []
    for k, R_vec in oracle_samples(rng, samples):
        R = float(np.linalg.norm(R_vec))
        ang = angular_oracle_tau(k, R_vec, node_budget)
        fd = fd_oracle_dipole(k, R_vec, fd_step(k, R))
        rows.append({
            "k": k, "R": R, "kR": k * R,
            "x": float(R_vec[0]), "y": float(R_vec[1]), "z": float(R_vec[2]),
            "tau_max_abs_diff": float(np.max(np.abs(ang.matrix - tau_matrix(k, R_vec)))),
            "tau_oracle_imag_max": ang.imag_max,
            "dipole_max_abs_diff": float(np.max(np.abs(fd - dipole_matrix(k, R_vec)))),
        })
    return rows


def run_selftest(seed: int = 0, samples: int = 100) -> list[CheckOutcome]:
    rng = np.random.default_rng(seed)
    out = []

    worst = 0.0
    rbar_ok = True
    for _ in range(samples * 10):
        g = random_geometry(rng)
        lhs = g.R * np.sqrt(g.sin2_theta)
        rhs = g.Rbar * np.sqrt(g.sin2_theta_bar)
        worst = max(worst, abs(lhs - rhs) / max(g.R, g.Rbar))
        rbar_ok &= g.Rbar >= g.R
    out.append(CheckOutcome("geometry: R sin(theta) = Rbar sin(theta_bar)", worst <= 1e-12, worst, 1e-12))
    out.append(CheckOutcome("geometry: Rbar >= R", bool(rbar_ok), 0.0, 0.0))

    worst = 0.0
    for _ in range(samples):
        g = random_geometry(rng, on_plate=True)
        k = float(np.exp(rng.uniform(np.log(0.01), np.log(100))))
        m = np.asarray(correlation_density(k, g).tensor)
        worst = max(worst, np.max(np.abs(m[:2])) / np.max(np.abs(m[2])))
    out.append(CheckOutcome("correlations: tangential rows vanish on the plate", worst <= 1e-13, worst, 1e-13))

    worst_t = worst_d = 0.0
    for k, R_vec in oracle_samples(rng, samples):
        R = float(np.linalg.norm(R_vec))
        worst_t = max(worst_t, np.max(np.abs(angular_oracle_tau(k, R_vec, 128).matrix - tau_matrix(k, R_vec))))
        fd = fd_oracle_dipole(k, R_vec, fd_step(k, R))
        worst_d = max(worst_d, np.max(np.abs(fd - dipole_matrix(k, R_vec))))
    out.append(CheckOutcome("tensors: tau vs sphere quadrature", worst_t <= 1e-9, worst_t, 1e-9))
    out.append(CheckOutcome("tensors: dipole kernel vs finite differences", worst_d <= 1e-6, worst_d, 1e-6))

    worst = 0.0
    signs_ok = True
    for _ in range(samples):
        g = random_geometry(rng)
        a, b = rng.uniform(0.1, 10, size=2)
        fwd = cp_far_zone_plate(a, b, g).value
        rev = cp_far_zone_plate(b, a, g.swapped()).value
        worst = max(worst, abs(fwd - rev) / abs(fwd))
        direct, image, mixed = far_zone_terms(a, b, g)
        signs_ok &= direct < 0 and image < 0 and mixed >= 0
    out.append(CheckOutcome("potential: closed form symmetric under atom exchange", worst <= 1e-13, worst, 1e-13))
    out.append(CheckOutcome("potential: term signs (-, -, +)", bool(signs_ok), 0.0, 0.0))

    worst = 0.0
    unit = StaticAtom(1.0)
    for _ in range(max(3, samples // 20)):
        g = random_geometry(rng)
        ref = cp_far_zone_plate(1.0, 1.0, g).value
        for mode in ("wick", "abel"):
            val = cp_plate_correlation(unit, unit, g, mode=mode).value
            worst = max(worst, abs(val - ref) / abs(ref))
    out.append(CheckOutcome("potential: correlation integral matches closed form", worst <= 1e-6, worst, 1e-6))
    return out
