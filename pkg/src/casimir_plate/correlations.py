"""Equal-time vacuum correlations of the transverse displacement field.

``correlation_density`` is the spectral density at fixed wavenumber after
the polarization sum and the angular integration have been done, i.e. the
integrand of the remaining radial k-integral (hbar = c = 1, quantization
volume already absorbed by the continuum limit):

    C_lm(k) = 2 pi k [tau_lm(k R) - sigma_ln tau_nm(k Rbar)]
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from .errors import InvalidGrid, NonUnitDirection, CasimirPlateError
from .geometry import SIGMA, PlateGeometry, from_axes
from .tensors import InteractionTensor, tau_matrix, tau_plate

_I3 = np.eye(3)
COMPONENTS = tuple(f"c_{a}{b}" for a in "xyz" for b in "xyz")


def polarization_sum(k_hat, r, r_prime, k: float = 1.0) -> np.ndarray:
    """Mode sum over polarizations for one propagation direction ``k_hat``.

    Free transverse projector with phase exp(i k.(r - r')) minus its mirror
    image with phase exp(i k.(r - sigma r')); complex 3x3.
    """
    k_hat = np.asarray(k_hat, dtype=float)
    if abs(np.linalg.norm(k_hat) - 1.0) > 1e-12:
        raise NonUnitDirection(f"|k_hat| = {np.linalg.norm(k_hat)!r}, expected 1")
    r = np.asarray(r, dtype=float)
    r_prime = np.asarray(r_prime, dtype=float)
    proj = _I3 - np.outer(k_hat, k_hat)
    kv = k * k_hat
    direct = proj * np.exp(1j * kv @ (r - r_prime))
    image = SIGMA @ proj * np.exp(1j * kv @ (r - SIGMA @ r_prime))
    return direct - image


def angular_average_polarization_sum(k: float, r, r_prime, node_budget: int = 64) -> np.ndarray:
    """Sphere quadrature of ``polarization_sum`` over k_hat (complex 3x3)."""
    mu, w_mu = np.polynomial.legendre.leggauss(node_budget)
    phi = 2 * np.pi * np.arange(node_budget) / node_budget
    st = np.sqrt(1 - mu**2)
    kh = np.stack(
        [np.outer(st, np.cos(phi)), np.outer(st, np.sin(phi)), np.repeat(mu[:, None], node_budget, 1)],
        axis=-1,
    ).reshape(-1, 3)
    w = np.repeat(w_mu, node_budget) * (2 * np.pi / node_budget) / (4 * np.pi)
    r = np.asarray(r, dtype=float)
    r_prime = np.asarray(r_prime, dtype=float)
    proj = _I3[None] - kh[:, :, None] * kh[:, None, :]
    direct = np.exp(1j * k * kh @ (r - r_prime))
    image = np.exp(1j * k * kh @ (r - SIGMA @ r_prime))
    total = np.einsum("n,nij->ij", w * direct, proj) - SIGMA @ np.einsum("n,nij->ij", w * image, proj)
    return total


@dataclass(frozen=True)
class CorrelationDensity:
    k: float
    geometry: PlateGeometry
    tensor: InteractionTensor

    @property
    def free_space(self) -> np.ndarray:
        return 2 * np.pi * self.k * tau_matrix(self.k, self.geometry.R_vec)

    @property
    def image(self) -> np.ndarray:
        """Plate contribution (the part that vanishes as the plate recedes)."""
        return np.asarray(self.tensor) - self.free_space


def correlation_density(k: float, geometry: PlateGeometry) -> CorrelationDensity:
    t = tau_plate(k, geometry)
    scaled = InteractionTensor(2 * np.pi * k * t.matrix, "correlation", float(k), geometry)
    return CorrelationDensity(float(k), geometry, scaled)


@dataclass(frozen=True)
class CorrelationGrid:
    z_a: tuple[float, ...]
    z_b: tuple[float, ...]
    rho: tuple[float, ...]
    k: tuple[float, ...]

    def __post_init__(self):
        for name in ("z_a", "z_b", "rho", "k"):
            vals = tuple(float(v) for v in getattr(self, name))
            if not vals:
                raise InvalidGrid(f"grid axis '{name}' is empty")
            if not all(np.isfinite(vals)):
                raise InvalidGrid(f"grid axis '{name}' has non-finite values")
            object.__setattr__(self, name, vals)
        if any(k <= 0 for k in self.k):
            raise InvalidGrid("wavenumbers must be positive")


def correlation_scan(grid: CorrelationGrid) -> list[dict]:
    """Rows ordered lexicographically by (k, z_a, z_b, rho) grid index.

    Raises InvalidGrid if any grid point is not a valid geometry.
    """
    rows = []
    for k, za, zb, rho in itertools.product(grid.k, grid.z_a, grid.z_b, grid.rho):
        try:
            geom = from_axes(za, zb, rho)
        except CasimirPlateError as exc:
            raise InvalidGrid(f"grid point z_a={za}, z_b={zb}, rho={rho}: {exc}") from exc
        m = np.asarray(correlation_density(k, geom).tensor)
        row = {"k": k, "z_a": za, "z_b": zb, "rho": rho}
        row.update({name: float(v) for name, v in zip(COMPONENTS, m.ravel())})
        rows.append(row)
    return rows
