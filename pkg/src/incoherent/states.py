"""Qubit states: Bloch vectors, 2x2 density matrices and the checks between them."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

SIGMA_X = np.array([[0, 1], [1, 0]], dtype=complex)
SIGMA_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
SIGMA_Z = np.array([[1, 0], [0, -1]], dtype=complex)
PAULI = (SIGMA_X, SIGMA_Y, SIGMA_Z)

ALGEBRAIC_TOL = 1e-12
PHYSICAL_TOL = 1e-9


class PhysicalityError(ValueError):
    """A state or map left the set of physical qubit states."""


@dataclass(frozen=True)
class QubitState:
    """Coherence (Bloch) vector of a qubit, rho = (I + s.sigma)/2."""

    bloch: tuple[float, float, float]

    def __post_init__(self):
        v = np.asarray(self.bloch, dtype=float).reshape(-1)
        if v.shape != (3,) or not np.all(np.isfinite(v)):
            raise ValueError(f"Bloch vector needs 3 finite components, got {self.bloch!r}")
        if np.linalg.norm(v) > 1 + ALGEBRAIC_TOL:
            raise PhysicalityError(f"Bloch vector norm {np.linalg.norm(v):.15g} exceeds 1")
        object.__setattr__(self, "bloch", tuple(float(x) for x in v))

    @property
    def vector(self) -> np.ndarray:
        return np.array(self.bloch)

    def density_matrix(self) -> np.ndarray:
        return bloch_to_density(self.bloch)

    @classmethod
    def from_density(cls, rho) -> "QubitState":
        return cls(tuple(density_to_bloch(rho)))


def as_qubit_state(value) -> QubitState:
    if isinstance(value, QubitState):
        return value
    return QubitState(tuple(np.asarray(value, dtype=float).reshape(-1)))


def bloch_to_density(s) -> np.ndarray:
    sx, sy, sz = np.asarray(s, dtype=float)
    return 0.5 * (np.eye(2) + sx * SIGMA_X + sy * SIGMA_Y + sz * SIGMA_Z)


def density_to_bloch(rho) -> np.ndarray:
    rho = np.asarray(rho)
    return np.array([np.trace(rho @ p).real for p in PAULI])


def density_defects(rho) -> dict[str, float]:
    """Trace error, Hermiticity error and smallest eigenvalue of ``rho``."""
    rho = np.asarray(rho, dtype=complex)
    herm = float(np.max(np.abs(rho - rho.conj().T)))
    return {
        "trace_error": float(abs(np.trace(rho) - 1)),
        "hermiticity_error": herm,
        "min_eigenvalue": float(np.linalg.eigvalsh(0.5 * (rho + rho.conj().T))[0]),
    }


def check_density(rho, tol: float = ALGEBRAIC_TOL, name: str = "rho") -> np.ndarray:
    """Validate a 2x2 density matrix and return it as a complex array.

    Raises
    ------
    PhysicalityError
        If ``rho`` is not Hermitian, not unit trace, or has a negative
        eigenvalue, each judged at ``tol``.
    """
    rho = np.asarray(rho, dtype=complex)
    if rho.shape != (2, 2):
        raise ValueError(f"{name} must be 2x2, got shape {rho.shape}")
    d = density_defects(rho)
    if d["hermiticity_error"] > tol:
        raise PhysicalityError(f"{name} is not Hermitian (error {d['hermiticity_error']:.3g})")
    if d["trace_error"] > tol:
        raise PhysicalityError(f"{name} trace differs from 1 by {d['trace_error']:.3g}")
    if d["min_eigenvalue"] < -tol:
        raise PhysicalityError(f"{name} has negative eigenvalue {d['min_eigenvalue']:.3g}")
    return rho


def purity(rho) -> float:
    rho = np.asarray(rho)
    return float(np.trace(rho @ rho).real)


def partial_trace_second(rho4) -> np.ndarray:
    """Trace out the second qubit of a 4x4 operator on S (x) P."""
    return np.einsum("ajbj->ab", np.asarray(rho4).reshape(2, 2, 2, 2))


def random_bloch(rng: np.random.Generator, pure: bool = False) -> np.ndarray:
    v = rng.normal(size=3)
    v /= np.linalg.norm(v)
    if pure:
        return v
    return v * rng.random() ** (1 / 3)


AXIS_STATES = {
    "+x": (1.0, 0.0, 0.0),
    "-x": (-1.0, 0.0, 0.0),
    "+y": (0.0, 1.0, 0.0),
    "-y": (0.0, -1.0, 0.0),
    "+z": (0.0, 0.0, 1.0),
    "-z": (0.0, 0.0, -1.0),
}
