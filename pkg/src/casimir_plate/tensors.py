"""Closed-form interaction tensors and their brute-force oracles.

Two kernels, both functions of a wavenumber ``k`` and a separation vector:

``tau``
    angular average of the transverse projector times a plane wave,
    ``(1/4pi) Int dOmega (delta - k^k^) exp(i k.R)``. With x = kR and P = R^R^::

        tau = (I - P) sin(x)/x + (I - 3P) (cos(x)/x**2 - sin(x)/x**3)

``dipole_kernel``
    ``(lap delta - grad grad) cos(kR)/R``, the classical dipole-dipole
    tensor for dipoles oscillating at wavenumber k::

        V = -(I - P) k**2 cos(kR)/R + (I - 3P) (cos(kR)/R**3 + k sin(kR)/R**2)

Both split into outgoing and incoming waves, ``tau = h(k) + h(-k)`` and
``V = v(k) + v(-k)``, with ``h = tau_out * exp(ikR)`` and
``v = dipole_out * exp(ikR)`` where the prefactors are Laurent polynomials
in k. The potential engine rotates integrals of those outgoing parts onto the
imaginary axis and Laplace-transforms them in closed form.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import DegenerateSeparation, StepTooLarge
from .geometry import SIGMA, PlateGeometry

_I3 = np.eye(3)

# cos(x)/x**2 - sin(x)/x**3 switches to its Taylor series below this argument;
# the direct form loses about eps/x**3 to cancellation.
SMALL_X = 1.0
# coefficients of x**(2n-2), n = 1..11: (-1)**n * 2n / (2n+1)!
_SERIES = tuple((-1) ** n * 2 * n / math.factorial(2 * n + 1) for n in range(1, 12))


@dataclass(frozen=True)
class InteractionTensor:
    matrix: np.ndarray
    kind: str
    k: float
    geometry: Optional[PlateGeometry] = None

    def __post_init__(self):
        m = np.array(self.matrix, dtype=float)
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)

    def __array__(self, dtype=None, copy=None):
        return self.matrix if dtype is None else self.matrix.astype(dtype)

    @property
    def trace(self) -> float:
        return float(np.trace(self.matrix))

    def contract(self, other) -> float:
        """Full double contraction sum_lm T_lm U_lm."""
        return float(np.sum(self.matrix * np.asarray(other)))


@dataclass(frozen=True)
class OracleEstimate:
    matrix: np.ndarray
    imag_max: float
    error_estimate: float


def _unit(R_vec) -> tuple[float, np.ndarray, np.ndarray]:
    R_vec = np.asarray(R_vec, dtype=float)
    R = float(np.linalg.norm(R_vec))
    if R == 0.0:
        raise DegenerateSeparation("separation vector has zero length")
    n = R_vec / R
    P = np.outer(n, n)
    return R, _I3 - P, _I3 - 3.0 * P


def _radial_tau(x):
    """sin(x)/x and cos(x)/x**2 - sin(x)/x**3 for an array of x >= 0."""
    x = np.asarray(x, dtype=float)
    a = np.sinc(x / np.pi)
    small = x < SMALL_X
    x2 = x * x
    series = np.zeros_like(x)
    for c in reversed(_SERIES):
        series = series * x2 + c
    xd = np.where(small, 1.0, x)
    direct = np.cos(xd) / xd**2 - np.sin(xd) / xd**3
    return a, np.where(small, series, direct)


def tau_matrix(k, R_vec) -> np.ndarray:
    """Vectorised tau for an array of wavenumbers; shape ``k.shape + (3, 3)``."""
    R, A, B = _unit(R_vec)
    a, b = _radial_tau(np.abs(np.asarray(k, dtype=float)) * R)
    return a[..., None, None] * A + b[..., None, None] * B


def dipole_matrix(k, R_vec) -> np.ndarray:
    R, A, B = _unit(R_vec)
    k = np.asarray(k, dtype=float)[..., None, None]
    c, s = np.cos(k * R), np.sin(k * R)
    return -A * k**2 * c / R + B * (c / R**3 + k * s / R**2)


def tau(k: float, R_vec) -> InteractionTensor:
    if not k > 0:
        raise ValueError(f"tau requires k > 0, got {k!r}")
    return InteractionTensor(tau_matrix(k, R_vec), "tau", float(k))


def dipole_kernel(k: float, R_vec) -> InteractionTensor:
    if k < 0:
        raise ValueError(f"dipole_kernel requires k >= 0, got {k!r}")
    return InteractionTensor(dipole_matrix(k, R_vec), "dipole", float(k))


def tau_plate(k: float, geometry: PlateGeometry) -> InteractionTensor:
    """tau(k, R) minus the reflected image tensor sigma . tau(k, Rbar)."""
    if not k > 0:
        raise ValueError(f"tau_plate requires k > 0, got {k!r}")
    m = tau_matrix(k, geometry.R_vec) - SIGMA @ tau_matrix(k, geometry.Rbar_vec)
    return InteractionTensor(m, "tau_plate", float(k), geometry)


def dipole_kernel_plate(k: float, geometry: PlateGeometry) -> InteractionTensor:
    if k < 0:
        raise ValueError(f"dipole_kernel_plate requires k >= 0, got {k!r}")
    m = dipole_matrix(k, geometry.R_vec) - SIGMA @ dipole_matrix(k, geometry.Rbar_vec)
    return InteractionTensor(m, "dipole_plate", float(k), geometry)


# Outgoing-wave prefactors. ``k`` may be complex (the Wick rotation evaluates
# them at k = iu); the returned arrays have shape k.shape + (3, 3).

def tau_out_k3(k, R_vec) -> np.ndarray:
    """k**3 times the outgoing prefactor of tau (a polynomial in k)."""
    R, A, B = _unit(R_vec)
    k = np.asarray(k, dtype=complex)[..., None, None]
    return A * (k**2 / (2j * R)) + B * (k / (2 * R**2) - 1 / (2j * R**3))


def dipole_out(k, R_vec) -> np.ndarray:
    """Outgoing prefactor of the dipole kernel: (lap - grad grad) e^{ikR}/(2R) / e^{ikR}."""
    R, A, B = _unit(R_vec)
    k = np.asarray(k, dtype=complex)[..., None, None]
    return 0.5 * (-A * k**2 / R + B * (1 / R**3 - 1j * k / R**2))


def laplace_k3_tau(t, R_vec) -> np.ndarray:
    """Closed form of ``Int_0^inf dk k**3 exp(-k t) tau(k, R)`` for t >= 0.

    Each outgoing monomial k**n exp(ikR) transforms to n!/(t - iR)**(n+1);
    the incoming half is its complex conjugate.
    """
    R, A, B = _unit(R_vec)
    z = np.asarray(t, dtype=float)[..., None, None] - 1j * R
    out = A * (2.0 / (2j * R * z**3)) + B * (1.0 / (2 * R**2 * z**2) - 1.0 / (2j * R**3 * z))
    return 2.0 * out.real


def angular_oracle_tau(k: float, R_vec, node_budget: int = 64) -> OracleEstimate:
    """Brute-force sphere quadrature of the angular average defining tau.

    Gauss-Legendre in cos(theta) times the trapezoid rule in phi, each with
    ``node_budget`` nodes. ``error_estimate`` compares against a run at half
    the budget; ``imag_max`` is the largest imaginary residue (should vanish).
    """
    if node_budget < 6:
        raise ValueError("node_budget must be at least 6")

    def run(n):
        mu, w_mu = np.polynomial.legendre.leggauss(n)
        phi = 2 * np.pi * np.arange(n) / n
        st = np.sqrt(1 - mu**2)
        kh = np.stack(
            [st[:, None] * np.cos(phi)[None, :], st[:, None] * np.sin(phi)[None, :],
             np.broadcast_to(mu[:, None], (n, n))], axis=-1,
        ).reshape(-1, 3)
        w = (w_mu[:, None] * np.full(n, 2 * np.pi / n)[None, :]).ravel() / (4 * np.pi)
        phase = np.exp(1j * k * kh @ np.asarray(R_vec, dtype=float))
        proj = _I3[None] - kh[:, :, None] * kh[:, None, :]
        return np.einsum("n,n,nij->ij", w, phase, proj)

    full = run(node_budget)
    half = run(max(6, node_budget // 2))
    return OracleEstimate(full.real, float(np.max(np.abs(full.imag))), float(np.max(np.abs(full.real - half.real))))


def fd_oracle_dipole(k: float, R_vec, step: float, extrapolate: bool = True) -> np.ndarray:
    """(lap delta - grad grad) cos(kr)/r from central second differences.

    With ``extrapolate`` the O(step**2) error is removed by one Richardson
    step combining ``step`` and ``step/2``.
    """
    R_vec = np.asarray(R_vec, dtype=float)
    R = float(np.linalg.norm(R_vec))
    if R == 0.0:
        raise DegenerateSeparation("separation vector has zero length")
    if not 0 < step <= 0.01 * R * (1 + 1e-12):
        raise StepTooLarge(f"step {step!r} must lie in (0, 0.01*R] with R={R!r}")

    def f(r):
        d = np.linalg.norm(r)
        return math.cos(k * d) / d

    def hessian(h):
        H = np.empty((3, 3))
        f0 = f(R_vec)
        e = _I3 * h
        for l in range(3):
            H[l, l] = (f(R_vec + e[l]) - 2 * f0 + f(R_vec - e[l])) / h**2
            for m in range(l + 1, 3):
                H[l, m] = H[m, l] = (
                    f(R_vec + e[l] + e[m]) - f(R_vec + e[l] - e[m])
                    - f(R_vec - e[l] + e[m]) + f(R_vec - e[l] - e[m])
                ) / (4 * h**2)
        return np.trace(H) * _I3 - H

    coarse = hessian(step)
    if not extrapolate:
        return coarse
    return (4 * hessian(step / 2) - coarse) / 3
