"""Casimir-Polder interaction of two atoms near a perfectly conducting plate.

All energies are in units of hbar*c with polarizabilities in length**3, so a
far-zone potential reads ``value = coefficient * alpha_A(0) * alpha_B(0) / R**7``
and the free-space benchmark coefficient is -23/(4 pi).

Methods
-------
far     closed form in R, Rbar and the angles to the plate normal
wick    induced-dipole correlation integral over real k, rotated onto the
        imaginary axis
abel    the same integral on the real axis, damped by exp(-eta k) and
        extrapolated to eta = 0 (static polarizabilities only)
double  dressed-state double k-integral (static polarizabilities), reduced
        to one integral by Laplace-factorising 1/(k + k')
free    free-space interaction through the imaginary-axis integral
"""
from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .atoms import far_zone
from .errors import (
    CasimirPlateError,
    EndpointSingularity,
    ExtrapolationUnstable,
    NumericalError,
    ResonantIntegrand,
)
from .geometry import SIGMA, PlateGeometry
from .quadrature import QuadratureConfig, integrate_semi_infinite, neville_to_zero
from .tensors import dipole_out, laplace_k3_tau, tau_out_k3

FREE_SPACE_COEFFICIENT = -23.0 / (4.0 * math.pi)

METHOD_TAGS = {
    "far": "far_zone_closed",
    "wick": "correlation_wick",
    "abel": "correlation_abel",
    "double": "double_integral_far",
    "free": "free_space",
}
PLATE_METHODS = ("far", "wick", "abel", "double")

_EPS = np.finfo(float).eps


@dataclass(frozen=True)
class PotentialResult:
    value: float
    reduced_coefficient: float
    method: str
    error_estimate: float
    diagnostics: dict = field(default_factory=dict)
    geometry: Optional[PlateGeometry] = None

    def __post_init__(self):
        if not math.isfinite(self.value):
            raise NumericalError(f"{self.method}: non-finite potential {self.value!r}")
        if not self.error_estimate >= 0:
            raise NumericalError(f"{self.method}: invalid error estimate {self.error_estimate!r}")

    def to_dict(self) -> dict:
        out = {} if self.geometry is None else self.geometry.as_dict()
        out.update(
            method=self.method,
            value=self.value,
            reduced_coefficient=self.reduced_coefficient,
            error_estimate=self.error_estimate,
        )
        return out


def _result(value, error, method, alpha_product, R, diagnostics, geometry=None) -> PotentialResult:
    return PotentialResult(
        value=float(value),
        reduced_coefficient=float(value * R**7 / alpha_product),
        method=METHOD_TAGS[method],
        error_estimate=float(error),
        diagnostics=diagnostics,
        geometry=geometry,
    )


# --------------------------------------------------------------------------
# free space


def cp_free_space(atom_a, atom_b, R: float, quad: QuadratureConfig | None = None) -> PotentialResult:
    """Free-space potential from the imaginary-frequency integral.

    With s = uR the integrand is alpha_A(is/R) alpha_B(is/R) times
    (s^4 + 2s^3 + 5s^2 + 6s + 3) exp(-2s); the bracket is written as one
    polynomial so nothing divides by s.
    """
    quad = quad or QuadratureConfig()
    if not R > 0:
        raise ValueError(f"separation must be positive, got {R!r}")

    def integrand(s):
        u = np.asarray(s, dtype=float) / R
        poly = (((s + 2) * s + 5) * s + 6) * s + 3
        return atom_a.alpha_imag(u) * atom_b.alpha_imag(u) * poly * np.exp(-2 * s)

    res = integrate_semi_infinite(integrand, quad, scale=1.0)
    norm = math.pi * R**7
    return _result(
        -res.value / norm, res.error / norm, "free",
        atom_a.alpha_static() * atom_b.alpha_static(), R,
        {"evaluations": res.evaluations},
    )


# --------------------------------------------------------------------------
# closed form


def far_zone_terms(alpha_a0: float, alpha_b0: float, geometry: PlateGeometry) -> tuple[float, float, float]:
    """Direct, image and mixed contributions of the far-zone closed form."""
    R, Rb = geometry.R, geometry.Rbar
    s2, sb2 = geometry.sin2_theta, geometry.sin2_theta_bar
    p = alpha_a0 * alpha_b0
    direct = -23.0 / (4.0 * math.pi) * p / R**7
    image = -23.0 / (4.0 * math.pi) * p / Rb**7
    numerator = (
        R**4 * s2
        + 5 * R**3 * Rb * s2
        + R**2 * Rb**2 * (6 + s2 + sb2)
        + 5 * R * Rb**3 * sb2
        + Rb**4 * sb2
    )
    mixed = 8.0 / math.pi * p * numerator / (R**3 * Rb**3 * (R + Rb) ** 5)
    return direct, image, mixed


def cp_far_zone_plate(alpha_a0: float, alpha_b0: float, geometry: PlateGeometry) -> PotentialResult:
    if not (alpha_a0 > 0 and alpha_b0 > 0):
        raise ValueError("static polarizabilities must be positive")
    direct, image, mixed = far_zone_terms(alpha_a0, alpha_b0, geometry)
    value = direct + image + mixed
    err = 8 * _EPS * (abs(direct) + abs(image) + abs(mixed))
    diag = {"direct": direct, "image": image, "mixed": mixed}
    return _result(value, err, "far", alpha_a0 * alpha_b0, geometry.R, diag, geometry)


# --------------------------------------------------------------------------
# correlation integral


def phase_groups(k, geometry: PlateGeometry, which: Sequence[int] = (0, 1, 2)) -> list[tuple[float, np.ndarray]]:
    """Outgoing-wave decomposition of the correlation integrand.

    For real k,
        k^3 tau_plate(k) : V_plate(k) = sum_a Re[g_a(k) exp(i k a)]
    with phases a in (2R, 2Rbar, R + Rbar) and g_a polynomial in k. Products
    of outgoing and incoming waves (phase Rbar - R and 0) cancel identically,
    so every phase is at least 2R. ``which`` selects a subset of the three.
    """
    R, Rb = geometry.R, geometry.Rbar
    need_direct = 0 in which or 2 in which
    need_image = 1 in which or 2 in which
    if need_direct:
        h1 = tau_out_k3(k, geometry.R_vec)
        v1 = dipole_out(k, geometry.R_vec)
    if need_image:
        h2 = -SIGMA @ tau_out_k3(k, geometry.Rbar_vec)
        v2 = -SIGMA @ dipole_out(k, geometry.Rbar_vec)

    def dot(a, b):
        return np.einsum("...ij,...ij->...", a, b)

    out = []
    for i in which:
        if i == 0:
            out.append((2 * R, 2 * dot(h1, v1)))
        elif i == 1:
            out.append((2 * Rb, 2 * dot(h2, v2)))
        else:
            out.append((R + Rb, 2 * (dot(h1, v2) + dot(h2, v1))))
    return out


def correlation_integrand(k, geometry: PlateGeometry, atom_a=None, atom_b=None):
    """Real-axis integrand k^3 alpha_A alpha_B tau_plate : V_plate (rebuilt from phases)."""
    k = np.asarray(k, dtype=float)
    total = sum((g * np.exp(1j * k * a)).real for a, g in phase_groups(k, geometry))
    if atom_a is not None:
        total = total * atom_a.alpha_dynamic(k) * atom_b.alpha_dynamic(k)
    return total


def _wick(atom_a, atom_b, geometry, quad):
    R = geometry.R
    groups_at = lambda u: phase_groups(1j * u, geometry)  # noqa: E731

    def integrand(s):
        u = np.asarray(s, dtype=float) / R
        rotated = sum((1j * g * np.exp(-u * a)).real for a, g in groups_at(u))
        return R**6 * rotated * atom_a.alpha_imag(u) * atom_b.alpha_imag(u)

    res = integrate_semi_infinite(integrand, quad, scale=1.0)
    norm = math.pi * R**7
    return res.value / norm, res.error / norm, {"evaluations": res.evaluations}


def _abel_phase(a: float, coeff_fn, fractions, quad, n_panels_cap=200000):
    """Abel-regularised integral of Re[g(k) e^{ika}] over k in [0, inf).

    In x = a k the damping exp(-eta k) becomes exp(-c x) with c = eta/a, so
    every phase is regulated on the same relative schedule. Gauss-Legendre
    panels of width pi carry the oscillation; sums are exact (fsum).
    """
    c_min = fractions[-1]
    x_max = (60.0 + 4.0 * math.log(1.0 / c_min)) / c_min
    n_panels = min(int(math.ceil(x_max / math.pi)), n_panels_cap)
    xg, wg = np.polynomial.legendre.leggauss(quad.nodes_per_panel)
    left = np.arange(n_panels)[:, None] * math.pi
    x = (left + (xg[None, :] + 1.0) * (math.pi / 2)).ravel()
    w = np.tile(wg * (math.pi / 2), n_panels)
    base = (coeff_fn(x / a) * np.exp(1j * x)).real * w / a
    return np.array([math.fsum(base * np.exp(-c * x)) for c in fractions])


def _abel(atom_a, atom_b, geometry, quad):
    if not (atom_a.is_static and atom_b.is_static):
        raise ResonantIntegrand(
            "abel mode integrates on the real axis, where dynamic polarizabilities have "
            "resonance poles; use static polarizabilities or mode='wick'"
        )
    R = geometry.R
    unit = geometry.scaled(1.0 / R)
    fractions = np.array(quad.regulator_fractions)
    order = quad.extrapolation_order
    used = fractions[-(order + 1):]
    value = 0.0
    error = 0.0
    per_phase = []
    for idx, (a, _) in enumerate(phase_groups(np.zeros(1), unit)):
        samples = _abel_phase(a, lambda k, i=idx: phase_groups(k, unit, (i,))[0][1], used, quad)
        est = neville_to_zero(used, samples)
        resid = np.abs(np.diff(est))
        scale = max(abs(est[-1]), float(np.max(np.abs(samples))) * _EPS)
        if (
            len(resid) >= 3
            and resid[-1] > resid[-2] > resid[-3]
            and resid[-1] > math.sqrt(quad.rel_tol) * scale
        ):
            raise ExtrapolationUnstable(
                f"Abel extrapolation residuals grow for phase {a * R!r}: {resid[-3:].tolist()}"
            )
        value += est[-1]
        error += resid[-1]
        per_phase.append({"phase": a * R, "estimate": float(est[-1]), "residuals": resid.tolist()})
    norm = math.pi * R**7
    p = atom_a.alpha_static() * atom_b.alpha_static()
    diag = {"regulator_fractions": used.tolist(), "phases": per_phase}
    return p * value / norm, p * error / norm, diag


def cp_plate_correlation(
    atom_a, atom_b, geometry: PlateGeometry, quad: QuadratureConfig | None = None, mode: str = "wick"
) -> PotentialResult:
    """Potential from the correlated induced-dipole model with image dipoles.

    Integrates k^3 alpha_A(k) alpha_B(k) tau_plate(k) : V_plate(k) / pi over
    k >= 0. ``mode='wick'`` rotates every outgoing phase onto the imaginary
    axis; ``mode='abel'`` stays on the real axis with an exponential
    regulator and needs static polarizabilities.
    """
    quad = quad or QuadratureConfig()
    if mode == "wick":
        value, err, diag = _wick(atom_a, atom_b, geometry, quad)
    elif mode == "abel":
        value, err, diag = _abel(atom_a, atom_b, geometry, quad)
    else:
        raise ValueError(f"mode must be 'wick' or 'abel', got {mode!r}")
    diag["static"] = bool(atom_a.is_static and atom_b.is_static)
    # dynamic results cannot be checked against the real-axis route
    diag["cross_checkable"] = diag["static"]
    p = atom_a.alpha_static() * atom_b.alpha_static()
    return _result(value, err, mode, p, geometry.R, diag, geometry)


# --------------------------------------------------------------------------
# dressed-state double integral


def laplace_tau_plate(t, geometry: PlateGeometry) -> np.ndarray:
    """g_lm(t) = int_0^inf dk k^3 exp(-k t) tau_plate(k)_lm, closed form."""
    return laplace_k3_tau(t, geometry.R_vec) - SIGMA @ laplace_k3_tau(t, geometry.Rbar_vec)


def cp_plate_double_integral_far(
    alpha_a0: float, alpha_b0: float, geometry: PlateGeometry, quad: QuadratureConfig | None = None
) -> PotentialResult:
    """Far-zone potential from the dressed-state double integral.

    After the angular integrals the energy is
        -(a_A a_B / pi^2) Int dk dk' (k k')^3/(k + k') T(k) : T(k'),
    T = tau_plate. Writing 1/(k + k') = Int_0^inf dt exp(-(k + k') t)
    leaves -(a_A a_B / pi^2) Int_0^inf dt g(t) : g(t).
    """
    quad = quad or QuadratureConfig()
    if not (alpha_a0 > 0 and alpha_b0 > 0):
        raise ValueError("static polarizabilities must be positive")
    R = geometry.R
    unit = geometry.scaled(1.0 / R)

    def integrand(t):
        g = laplace_tau_plate(t, unit)
        return np.einsum("...ij,...ij->...", g, g)

    at_zero = float(integrand(0.0))
    if not math.isfinite(at_zero):
        raise EndpointSingularity(f"t-integrand is not finite at t = 0 ({at_zero!r})")
    res = integrate_semi_infinite(integrand, quad, scale=1.0)
    p = alpha_a0 * alpha_b0
    norm = math.pi**2 * R**7
    diag = {"evaluations": res.evaluations, "integrand_at_zero": at_zero}
    return _result(-p * res.value / norm, p * res.error / norm, "double", p, R, diag, geometry)


# --------------------------------------------------------------------------
# dispatch and comparison


def evaluate(method: str, atom_a, atom_b, geometry: PlateGeometry, quad: QuadratureConfig | None = None) -> PotentialResult:
    quad = quad or QuadratureConfig()
    if method == "far":
        return cp_far_zone_plate(atom_a.alpha_static(), atom_b.alpha_static(), geometry)
    if method in ("wick", "abel"):
        return cp_plate_correlation(atom_a, atom_b, geometry, quad, mode=method)
    if method == "double":
        return cp_plate_double_integral_far(atom_a.alpha_static(), atom_b.alpha_static(), geometry, quad)
    if method == "free":
        res = cp_free_space(atom_a, atom_b, geometry.R, quad)
        return PotentialResult(res.value, res.reduced_coefficient, res.method, res.error_estimate,
                               res.diagnostics, geometry)
    raise ValueError(f"unknown method {method!r}; choose from {sorted(METHOD_TAGS)}")


@dataclass
class ComparisonRow:
    index: int
    geometry: Optional[PlateGeometry]
    results: dict = field(default_factory=dict)
    failures: dict = field(default_factory=dict)
    max_deviation: float = float("nan")
    passed: bool = False
    error: Optional[str] = None

    def deviations(self) -> dict:
        out = {}
        names = sorted(self.results)
        for i, a in enumerate(names):
            for b in names[i + 1:]:
                va, vb = self.results[a].value, self.results[b].value
                out[f"{a}-{b}"] = abs(va - vb) / max(abs(va), abs(vb))
        return out


@dataclass
class ComparisonReport:
    methods: tuple[str, ...]
    tol: float
    rows: list[ComparisonRow]

    @property
    def all_passed(self) -> bool:
        return all(r.passed for r in self.rows)

    @property
    def numerical_failures(self) -> int:
        return sum(bool(r.failures) for r in self.rows)


def _compare_point(args) -> ComparisonRow:
    index, geometry, atom_a, atom_b, quad, methods, tol = args
    row = ComparisonRow(index, geometry if isinstance(geometry, PlateGeometry) else None)
    if not isinstance(geometry, PlateGeometry):
        row.error = str(geometry)
        return row
    for m in methods:
        try:
            row.results[m] = evaluate(m, atom_a, atom_b, geometry, quad)
        except CasimirPlateError as exc:
            row.failures[m] = f"{type(exc).__name__}: {exc}"
    devs = row.deviations()
    row.max_deviation = max(devs.values()) if devs else 0.0
    row.passed = not row.failures and row.max_deviation <= tol
    return row


def compare_methods(
    atom_a,
    atom_b,
    geometry_grid: Sequence,
    quad: QuadratureConfig | None = None,
    methods: Sequence[str] = PLATE_METHODS,
    tol: float = 1e-5,
    far_zone_only: bool = True,
    jobs: int = 1,
) -> ComparisonReport:
    """Evaluate every method at every grid point and compare them pairwise.

    ``geometry_grid`` items are PlateGeometry instances or exceptions (a
    geometry that failed validation); bad rows are flagged, never dropped.
    With ``far_zone_only`` the correlation methods use static polarizabilities,
    which is the regime where all four methods describe the same quantity.
    """
    if len(geometry_grid) == 0:
        from .errors import InvalidGrid

        raise InvalidGrid("comparison grid is empty")
    quad = quad or QuadratureConfig()
    if far_zone_only:
        atom_a, atom_b = far_zone(atom_a), far_zone(atom_b)
    tasks = [(i, g, atom_a, atom_b, quad, tuple(methods), tol) for i, g in enumerate(geometry_grid)]
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            rows = list(pool.map(_compare_point, tasks, chunksize=max(1, len(tasks) // (4 * jobs))))
    else:
        rows = [_compare_point(t) for t in tasks]
    return ComparisonReport(tuple(methods), tol, rows)


__all__ = [
    "FREE_SPACE_COEFFICIENT",
    "PotentialResult",
    "compare_methods",
    "cp_far_zone_plate",
    "cp_free_space",
    "cp_plate_correlation",
    "cp_plate_double_integral_far",
    "evaluate",
    "far_zone_terms",
    "laplace_tau_plate",
    "phase_groups",
]
