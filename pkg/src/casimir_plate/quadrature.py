"""Numerical plumbing: semi-infinite quadrature and polynomial extrapolation."""
from __future__ import annotations

import warnings
from dataclasses import dataclass, field, replace

import numpy as np
from scipy import integrate

from .errors import InvalidConfig, QuadratureFailure

SEMI_INFINITE_MAPS = ("rational", "tanh-sinh")


def _default_fractions() -> tuple[float, ...]:
    return tuple(float(c) for c in np.geomspace(0.5, 0.05, 14))


@dataclass(frozen=True)
class QuadratureConfig:
    """Tolerances and budgets shared by every integral in the engine.

    Tolerances apply to scale-free integrals (lengths measured in units of
    the interatomic distance), so ``abs_tol`` acts on O(1) numbers.

    ``regulator_fractions`` are the Abel regulators eta/a, one schedule per
    oscillation length ``a``; they must be positive and strictly decreasing.
    ``extrapolation_order`` is the degree of the polynomial in eta used to
    reach eta = 0 and may not exceed ``len(regulator_fractions) - 1``.
    """

    rel_tol: float = 1e-10
    abs_tol: float = 1e-14
    max_subdivisions: int = 200
    regulator_fractions: tuple[float, ...] = field(default_factory=_default_fractions)
    extrapolation_order: int = 13
    semi_infinite_map: str = "rational"
    nodes_per_panel: int = 24

    def __post_init__(self):
        if not (self.rel_tol > 0 and self.abs_tol > 0):
            raise InvalidConfig("tolerances must be positive")
        if self.max_subdivisions < 1:
            raise InvalidConfig("max_subdivisions must be >= 1")
        fr = tuple(float(c) for c in self.regulator_fractions)
        if len(fr) < 2 or any(c <= 0 for c in fr) or any(b >= a for a, b in zip(fr, fr[1:])):
            raise InvalidConfig("regulator_fractions must be positive and strictly decreasing (>= 2 values)")
        object.__setattr__(self, "regulator_fractions", fr)
        if not 1 <= self.extrapolation_order <= len(fr) - 1:
            raise InvalidConfig(
                f"extrapolation_order must be in [1, {len(fr) - 1}], got {self.extrapolation_order}"
            )
        if self.semi_infinite_map not in SEMI_INFINITE_MAPS:
            raise InvalidConfig(f"semi_infinite_map must be one of {SEMI_INFINITE_MAPS}")
        if self.nodes_per_panel < 8:
            raise InvalidConfig("nodes_per_panel must be >= 8")

    def with_overrides(self, **overrides) -> "QuadratureConfig":
        if "regulator_fractions" in overrides:
            overrides["regulator_fractions"] = tuple(overrides["regulator_fractions"])
        return replace(self, **overrides)

    def to_dict(self) -> dict:
        return {
            "rel_tol": self.rel_tol,
            "abs_tol": self.abs_tol,
            "max_subdivisions": self.max_subdivisions,
            "regulator_fractions": list(self.regulator_fractions),
            "extrapolation_order": self.extrapolation_order,
            "semi_infinite_map": self.semi_infinite_map,
            "nodes_per_panel": self.nodes_per_panel,
        }


@dataclass(frozen=True)
class Integral:
    value: float
    error: float
    evaluations: int


def integrate_semi_infinite(f, config: QuadratureConfig, scale: float = 1.0) -> Integral:
    """Integrate ``f`` over [0, inf).

    ``scale`` is the length over which the integrand varies; the default
    rational map sends x in [0, 1) to u = scale * x / (1 - x) and hands the
    result to adaptive Gauss-Kronrod (QUADPACK). ``f`` must accept arrays.
    """
    if config.semi_infinite_map == "tanh-sinh":
        res = integrate.tanhsinh(f, 0.0, np.inf, atol=config.abs_tol, rtol=config.rel_tol)
        if not res.success:
            raise QuadratureFailure(f"tanh-sinh did not converge (status {int(res.status)})")
        return Integral(float(res.integral), float(res.error), int(res.nfev))

    def mapped(x):
        one_minus = 1.0 - x
        if one_minus == 0.0:
            return 0.0
        return float(f(scale * x / one_minus)) * scale / one_minus**2

    with warnings.catch_warnings():
        warnings.simplefilter("ignore", integrate.IntegrationWarning)
        result = integrate.quad(
            mapped, 0.0, 1.0, epsabs=config.abs_tol, epsrel=config.rel_tol,
            limit=config.max_subdivisions, full_output=1,
        )
    value, err, info = result[:3]
    if len(result) > 3 or not np.isfinite(value):
        message = result[3] if len(result) > 3 else "non-finite result"
        tol = max(config.abs_tol, config.rel_tol * abs(value))
        # roundoff-limited runs that still meet the requested tolerance are accepted
        if not ("roundoff" in message and err <= tol and np.isfinite(value)):
            raise QuadratureFailure(
                f"adaptive quadrature failed (value={value!r}, error={err!r}): {message.splitlines()[0]}"
            )
    return Integral(float(value), float(err), int(info["neval"]))


def neville_to_zero(x, y) -> np.ndarray:
    """Polynomial extrapolation of samples (x_i, y_i) to x = 0.

    Points are consumed from the end of the arrays (smallest x last). Returns
    the estimates P_0, P_1, ..., where P_m interpolates the last m+1 points.
    """
    x = np.asarray(x, dtype=float)[::-1]
    y = np.asarray(y, dtype=float)[::-1]
    n = len(x)
    table = y.copy()
    estimates = [table[0]]
    for m in range(1, n):
        # table[i] holds the degree-(m-1) interpolant of points i..i+m-1 at 0
        table = (x[m:] * table[: n - m] - x[: n - m] * table[1 : n - m + 1]) / (x[m:] - x[: n - m])
        estimates.append(table[0])
    return np.array(estimates)
