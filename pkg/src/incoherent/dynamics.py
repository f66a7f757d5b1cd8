"""Reduced dynamics of the system qubit under the common dephasing bath.

Three routes are provided: the generic one for any eigenbasis of the
coupling operator, a closed form for product eigenvectors, and the affine
Bloch-vector map for Bell eigenvectors (with its one-nonzero-eigenvalue
special case).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .model import (
    BathSpec,
    Eigenbasis,
    InteractionSpec,
    dephasing_f,
    gamma_matrix,
    phase_phi,
)
from .states import (
    PHYSICAL_TOL,
    PhysicalityError,
    QubitState,
    as_qubit_state,
    bloch_to_density,
    check_density,
    density_to_bloch,
    partial_trace_second,
)


@dataclass(frozen=True)
class AffineMap:
    """s = A p + a, taking the probe Bloch vector to the system Bloch vector."""

    A: np.ndarray
    a: np.ndarray
    t: float
    s0: QubitState

    def __post_init__(self):
        A = np.array(self.A, dtype=float).reshape(3, 3)
        a = np.array(self.a, dtype=float).reshape(3)
        A.setflags(write=False)
        a.setflags(write=False)
        object.__setattr__(self, "A", A)
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "s0", as_qubit_state(self.s0))

    def __call__(self, p) -> np.ndarray:
        return self.A @ np.asarray(p, dtype=float) + self.a


@dataclass(frozen=True)
class SimplifiedGammas:
    gamma_re: float
    gamma_im: float


def _require_basis(interaction: InteractionSpec, basis: Eigenbasis, op: str) -> None:
    if interaction.eigenbasis is not basis:
        raise ValueError(f"{op} needs a {basis.value} eigenbasis, got {interaction.eigenbasis.value}")


def evolve_total(interaction: InteractionSpec, bath: BathSpec, rho_total, t: float) -> np.ndarray:
    """Evolve a 4x4 system+probe state: elementwise gamma scaling in the eigenbasis."""
    u = interaction.eigenvectors()
    in_eigenbasis = u.conj().T @ np.asarray(rho_total, dtype=complex) @ u
    return u @ (in_eigenbasis * gamma_matrix(interaction, bath, t)) @ u.conj().T


def evolve_general(interaction: InteractionSpec, bath: BathSpec, rho_s, rho_p, t: float) -> np.ndarray:
    """Reduced system state at time ``t`` for any coupling eigenbasis."""
    rho_s = check_density(rho_s, name="rho_s")
    rho_p = check_density(rho_p, name="rho_p")
    return partial_trace_second(evolve_total(interaction, bath, np.kron(rho_s, rho_p), t))


def evolve_factorized(interaction: InteractionSpec, bath: BathSpec, rho_s, rho_p, t: float) -> np.ndarray:
    """Closed form for product eigenvectors |k>|l>.

    Only the probe populations enter; the system populations never move and
    each coherence (k, m) picks up sum_n (rho_p)_nn gamma_{(k,n)(m,n)}.
    """
    _require_basis(interaction, Eigenbasis.FACTORIZED, "evolve_factorized")
    rho_s = check_density(rho_s, name="rho_s")
    rho_p = check_density(rho_p, name="rho_p")
    g = gamma_matrix(interaction, bath, t)
    pops = np.diag(rho_p).real
    out = np.empty((2, 2), dtype=complex)
    for k in range(2):
        for m in range(2):
            factor = sum(pops[n] * g[2 * k + n, 2 * m + n] for n in range(2))
            out[k, m] = rho_s[k, m] * factor
    return out


def _combo(g: np.ndarray, i: int, j: int, sign: int, k: int, l: int) -> complex:
    # gamma_{ij +- kl} with 1-based labels
    return g[i - 1, j - 1] + sign * g[k - 1, l - 1]


def bell_affine_map(interaction: InteractionSpec, bath: BathSpec, s0, t: float) -> AffineMap:
    _require_basis(interaction, Eigenbasis.BELL, "bell_affine_map")
    s0 = as_qubit_state(s0)
    sx, sy, sz = s0.bloch
    g = gamma_matrix(interaction, bath, t)
    im = np.imag
    A = 0.5 * np.array(
        [
            [im(1j * _combo(g, 1, 3, -1, 2, 4)), im(sz * _combo(g, 1, 3, -1, 2, 4)), im(sy * _combo(g, 1, 3, 1, 2, 4))],
            [im(sz * _combo(g, 1, 4, -1, 2, 3)), im(1j * _combo(g, 2, 3, -1, 1, 4)), -im(sx * _combo(g, 2, 3, 1, 1, 4))],
            [-im(sy * _combo(g, 1, 2, 1, 3, 4)), im(sx * _combo(g, 3, 4, -1, 1, 2)), im(1j * _combo(g, 1, 2, -1, 3, 4))],
        ]
    )
    a = 0.5 * np.real(
        [sx * _combo(g, 1, 3, 1, 2, 4), sy * _combo(g, 2, 3, 1, 1, 4), sz * _combo(g, 1, 2, 1, 3, 4)]
    )
    return AffineMap(A, a, t, s0)


def simplified_gammas(alpha4: float, bath: BathSpec, t: float) -> SimplifiedGammas:
    mag = np.exp(-(alpha4**2) * float(dephasing_f(bath, t)))
    ang = alpha4**2 * float(phase_phi(bath, t))
    return SimplifiedGammas(mag * np.cos(ang), mag * np.sin(ang))


def cross_matrix(v) -> np.ndarray:
    """Matrix [v]x with [v]x @ p == cross(v, p)."""
    x, y, z = v
    return np.array([[0.0, -z, y], [z, 0.0, -x], [-y, x, 0.0]])


def simplified_map(alpha4: float, bath: BathSpec, s0, t: float) -> AffineMap:
    """Affine map for Bell eigenvectors with alphas (0, 0, 0, alpha4).

    A = ((1 - gamma_re) I - gamma_im [s0]x) / 2 and a = (1 + gamma_re) s0 / 2.
    """
    s0 = as_qubit_state(s0)
    gm = simplified_gammas(alpha4, bath, t)
    v = s0.vector
    A = 0.5 * ((1 - gm.gamma_re) * np.eye(3) - gm.gamma_im * cross_matrix(v))
    a = 0.5 * (1 + gm.gamma_re) * v
    return AffineMap(A, a, t, s0)


def affine_map_numeric(interaction: InteractionSpec, bath: BathSpec, s0, t: float) -> AffineMap:
    """Affine map for any eigenbasis, read off the generic route by linearity in rho_p."""
    s0 = as_qubit_state(s0)
    rho_s = s0.density_matrix()

    def image(p):
        return density_to_bloch(evolve_general(interaction, bath, rho_s, bloch_to_density(p), t))

    a = image(np.zeros(3))
    A = np.column_stack([image(e) - a for e in np.eye(3)])
    return AffineMap(A, a, t, s0)


def evolve_bloch(affine: AffineMap, p, tol: float = PHYSICAL_TOL) -> QubitState:
    s = affine(as_qubit_state(p).vector)
    norm = np.linalg.norm(s)
    if norm > 1 + tol:
        raise PhysicalityError(f"mapped Bloch vector has norm {norm:.15g} > 1")
    if norm > 1:
        s = s / norm
    return QubitState(tuple(s))
