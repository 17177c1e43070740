"""Two atoms above a perfectly conducting plate at z = 0.

Lengths are in reduced units (1/k_ref). The separation vector points from
atom A to atom B; the image vector joins the mirror image of A to B.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import BelowPlate, CoincidentAtoms, ValidationError

# Reflection through the plate.
SIGMA = np.diag([1.0, 1.0, -1.0])
SIGMA.setflags(write=False)


def reflect(p) -> np.ndarray:
    """Mirror a point (or stack of points) through the plane z = 0."""
    q = np.array(p, dtype=float, copy=True)
    q[..., 2] = -q[..., 2]
    return q


def _as_point(p, name: str) -> np.ndarray:
    arr = np.asarray(p, dtype=float)
    if arr.shape != (3,):
        raise ValidationError(f"{name} must be a 3-vector, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ValidationError(f"{name} has non-finite components: {arr}")
    return arr


@dataclass(frozen=True)
class PlateGeometry:
    """Atom positions and every derived quantity the potentials consume.

    ``sin2_theta`` and ``sin2_theta_bar`` are computed as (rho/R)^2 and
    (rho/Rbar)^2, so ``R*sqrt(sin2_theta) == Rbar*sqrt(sin2_theta_bar)``
    holds to rounding.
    """

    r_a: np.ndarray
    r_b: np.ndarray
    R_vec: np.ndarray = field(init=False, repr=False)
    Rbar_vec: np.ndarray = field(init=False, repr=False)
    R: float = field(init=False)
    Rbar: float = field(init=False)
    rho: float = field(init=False)
    theta: float = field(init=False)
    theta_bar: float = field(init=False)
    sin2_theta: float = field(init=False)
    sin2_theta_bar: float = field(init=False)

    def __post_init__(self):
        r_a = _as_point(self.r_a, "r_a")
        r_b = _as_point(self.r_b, "r_b")
        if r_a[2] < 0 or r_b[2] < 0:
            raise BelowPlate(f"atoms must satisfy z >= 0, got z_A={float(r_a[2])!r}, z_B={float(r_b[2])!r}")
        R_vec = r_b - r_a
        Rbar_vec = r_b - reflect(r_a)
        R = float(np.linalg.norm(R_vec))
        if R == 0.0:
            raise CoincidentAtoms(f"atoms coincide at {tuple(float(v) for v in r_a)}")
        Rbar = float(np.linalg.norm(Rbar_vec))
        rho = math.hypot(R_vec[0], R_vec[1])
        for arr in (r_a, r_b, R_vec, Rbar_vec):
            arr.setflags(write=False)
        s = object.__setattr__
        s(self, "r_a", r_a)
        s(self, "r_b", r_b)
        s(self, "R_vec", R_vec)
        s(self, "Rbar_vec", Rbar_vec)
        s(self, "R", R)
        s(self, "Rbar", Rbar)
        s(self, "rho", rho)
        s(self, "theta", math.atan2(rho, R_vec[2]))
        s(self, "theta_bar", math.atan2(rho, Rbar_vec[2]))
        s(self, "sin2_theta", (rho / R) ** 2)
        s(self, "sin2_theta_bar", (rho / Rbar) ** 2)

    @property
    def z_a(self) -> float:
        return float(self.r_a[2])

    @property
    def z_b(self) -> float:
        return float(self.r_b[2])

    @property
    def on_plate(self) -> bool:
        """True when at least one atom sits on the plate (then Rbar == R)."""
        return self.z_a == 0.0 or self.z_b == 0.0

    def swapped(self) -> "PlateGeometry":
        return PlateGeometry(self.r_b, self.r_a)

    def scaled(self, factor: float) -> "PlateGeometry":
        return PlateGeometry(self.r_a * factor, self.r_b * factor)

    def as_dict(self) -> dict:
        return {
            "x_a": float(self.r_a[0]), "y_a": float(self.r_a[1]), "z_a": self.z_a,
            "x_b": float(self.r_b[0]), "y_b": float(self.r_b[1]), "z_b": self.z_b,
            "R": self.R, "Rbar": self.Rbar,
        }


def build_geometry(r_a, r_b) -> PlateGeometry:
    return PlateGeometry(r_a, r_b)


def from_axes(z_a: float, z_b: float, rho: float) -> PlateGeometry:
    """Atom A on the z axis, atom B displaced by ``rho`` along x."""
    return PlateGeometry((0.0, 0.0, z_a), (rho, 0.0, z_b))
