"""Isotropic ground-state polarizabilities in reduced units (hbar = c = 1).

An atom is a finite list of dipole transitions from the ground state, each a
transition wavenumber ``k`` and a squared dipole matrix element ``mu2``::

    alpha(k) = 2/3 * sum_p k_p * mu2_p / (k_p**2 - k**2)

``StaticAtom`` stands in for an atom whose polarizability is frozen at its
zero-frequency value; every far-zone formula works with it.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import InvalidAtom, PoleProximity

DEFAULT_POLE_GUARD = 1e-6


@dataclass(frozen=True)
class Transition:
    k: float
    mu2: float


@dataclass(frozen=True)
class AtomSpec:
    transitions: tuple[Transition, ...]
    label: str = "atom"
    pole_guard: float = DEFAULT_POLE_GUARD

    def __post_init__(self):
        trans = tuple(
            t if isinstance(t, Transition) else Transition(float(t[0]), float(t[1]))
            for t in self.transitions
        )
        if not trans:
            raise InvalidAtom(f"{self.label}: at least one transition is required")
        for t in trans:
            if not (math.isfinite(t.k) and t.k > 0):
                raise InvalidAtom(f"{self.label}: transition wavenumber must be finite and > 0, got {t.k!r}")
            if not (math.isfinite(t.mu2) and t.mu2 >= 0):
                raise InvalidAtom(f"{self.label}: mu2 must be finite and >= 0, got {t.mu2!r}")
        if not any(t.mu2 > 0 for t in trans):
            raise InvalidAtom(f"{self.label}: at least one transition needs mu2 > 0")
        if not self.pole_guard >= 0:
            raise InvalidAtom("pole_guard must be non-negative")
        object.__setattr__(self, "transitions", tuple(sorted(trans, key=lambda t: (t.k, t.mu2))))

    @property
    def _k(self) -> np.ndarray:
        return np.array([t.k for t in self.transitions])

    @property
    def _mu2(self) -> np.ndarray:
        return np.array([t.mu2 for t in self.transitions])

    @property
    def is_static(self) -> bool:
        return False

    def alpha_static(self) -> float:
        return 2.0 / 3.0 * float(np.sum(self._mu2 / self._k))

    def alpha_dynamic(self, k):
        """Polarizability on the real wavenumber axis.

        Raises PoleProximity when any ``k`` is within ``pole_guard`` (relative)
        of a transition wavenumber.
        """
        k_arr = np.asarray(k, dtype=float)
        if np.any(k_arr < 0):
            raise ValueError("wavenumber must be non-negative")
        kp, mu2 = self._k, self._mu2
        close = np.abs(k_arr[..., None] - kp) / kp < self.pole_guard
        if np.any(close):
            idx = np.argwhere(close)[0]
            raise PoleProximity(float(kp[idx[-1]]), float(k_arr[tuple(idx[:-1])]))
        val = 2.0 / 3.0 * np.sum(kp * mu2 / (kp**2 - k_arr[..., None] ** 2), axis=-1)
        return float(val) if np.ndim(val) == 0 else val

    def alpha_imag(self, u):
        """Polarizability at imaginary wavenumber ``i*u`` (real, positive, decreasing)."""
        u_arr = np.asarray(u, dtype=float)
        if np.any(u_arr < 0):
            raise ValueError("imaginary-axis wavenumber must be non-negative")
        kp, mu2 = self._k, self._mu2
        val = 2.0 / 3.0 * np.sum(kp * mu2 / (kp**2 + u_arr[..., None] ** 2), axis=-1)
        return float(val) if np.ndim(val) == 0 else val

    def to_dict(self) -> dict:
        return {
            "schema_version": 1,
            "label": self.label,
            "transitions": [{"k": t.k, "mu2": t.mu2} for t in self.transitions],
        }

    @classmethod
    def from_dict(cls, data: dict, pole_guard: float = DEFAULT_POLE_GUARD) -> "AtomSpec":
        try:
            transitions = [Transition(float(t["k"]), float(t["mu2"])) for t in data["transitions"]]
        except (KeyError, TypeError) as exc:
            raise InvalidAtom(f"malformed atom record: {exc}") from exc
        return cls(tuple(transitions), label=str(data.get("label", "atom")), pole_guard=pole_guard)


@dataclass(frozen=True)
class StaticAtom:
    """Polarizability fixed at ``alpha0`` for every wavenumber."""

    alpha0: float = 1.0
    label: str = "static"

    def __post_init__(self):
        if not (math.isfinite(self.alpha0) and self.alpha0 > 0):
            raise InvalidAtom(f"static polarizability must be finite and > 0, got {self.alpha0!r}")

    @property
    def is_static(self) -> bool:
        return True

    def alpha_static(self) -> float:
        return self.alpha0

    def alpha_dynamic(self, k):
        return np.full_like(np.asarray(k, dtype=float), self.alpha0)[()]

    def alpha_imag(self, u):
        return np.full_like(np.asarray(u, dtype=float), self.alpha0)[()]


def alpha_dynamic(atom, k):
    return atom.alpha_dynamic(k)


def alpha_imag(atom, u):
    return atom.alpha_imag(u)


def alpha_static(atom) -> float:
    return atom.alpha_static()


def far_zone(atom) -> StaticAtom:
    """Static-polarizability stand-in for ``atom``."""
    if isinstance(atom, StaticAtom):
        return atom
    return StaticAtom(atom.alpha_static(), label=f"{atom.label}(static)")


def load_atom(path, pole_guard: float = DEFAULT_POLE_GUARD) -> AtomSpec:
    from .io import read_json, validate

    data = read_json(path)
    validate(data, "atom", source=str(path))
    return AtomSpec.from_dict(data, pole_guard=pole_guard)


def save_atom(atom: AtomSpec, path) -> None:
    Path(path).write_text(json.dumps(atom.to_dict(), indent=2, sort_keys=True) + "\n")
