"""Brute-force reference: dense evolution on qubits (x) truncated Fock spaces.

Nothing here uses the fact that the coupling operator is conserved; the full
Hamiltonian is diagonalized as a generic Hermitian matrix.
"""

from __future__ import annotations

import os
from dataclasses import dataclass
from functools import reduce

import numpy as np

from .model import BathSpec, InteractionSpec
from .states import check_density

DEFAULT_DIM_CAP = 4096
DIM_CAP_ENV = "INCOHERENT_DIM_CAP"
WEIGHT_FLOOR = 1e-17


class DimensionCapError(ValueError):
    pass


def dimension_cap() -> int:
    raw = os.environ.get(DIM_CAP_ENV)
    return int(raw) if raw else DEFAULT_DIM_CAP


@dataclass(frozen=True)
class FockCutoffs:
    dims: tuple[int, ...]

    def __post_init__(self):
        dims = tuple(int(d) for d in self.dims)
        if not dims or min(dims) < 2:
            raise ValueError(f"every Fock cutoff must be >= 2, got {dims}")
        object.__setattr__(self, "dims", dims)

    @classmethod
    def uniform(cls, d: int, n_modes: int) -> "FockCutoffs":
        return cls((d,) * n_modes)

    @classmethod
    def heuristic(cls, bath: BathSpec, alpha_max: float = 1.0, cap: int | None = None) -> "FockCutoffs":
        """d_i = 10 + 20 (alpha_max g_i / omega_i)^2 (1 + 2 nbar_i), shrunk uniformly to fit the cap."""
        cap = dimension_cap() if cap is None else cap
        d = np.ceil(10 + 20 * alpha_max**2 * bath.strengths * (1 + 2 * bath.nbars)).astype(int)
        while 4 * np.prod(d) > cap and np.any(d > 2):
            d = np.maximum(d - 1, 2)
        return cls(tuple(int(x) for x in d))

    def doubled(self) -> "FockCutoffs":
        return FockCutoffs(tuple(2 * d for d in self.dims))

    def total(self, system_dim: int = 4) -> int:
        return system_dim * int(np.prod(self.dims))

    def check(self, system_dim: int = 4, cap: int | None = None) -> None:
        cap = dimension_cap() if cap is None else cap
        if self.total(system_dim) > cap:
            raise DimensionCapError(
                f"Hilbert dimension {self.total(system_dim)} exceeds cap {cap} (set {DIM_CAP_ENV} to raise it)"
            )


@dataclass(frozen=True)
class BathState:
    """Initial bath state: vacuum, or a product of diagonal thermal mixtures."""

    nbar: tuple[float, ...] | None = None

    @classmethod
    def vacuum(cls) -> "BathState":
        return cls(None)

    @classmethod
    def thermal(cls, nbar) -> "BathState":
        return cls(tuple(float(x) for x in nbar))

    @property
    def is_vacuum(self) -> bool:
        return self.nbar is None

    def populations(self, cutoffs: FockCutoffs) -> np.ndarray:
        """Diagonal of the truncated, renormalized bath density matrix."""
        per_mode = []
        nbars = self.nbar if self.nbar is not None else (0.0,) * len(cutoffs.dims)
        if len(nbars) != len(cutoffs.dims):
            raise ValueError("thermal occupations and cutoffs disagree in mode count")
        for nb, d in zip(nbars, cutoffs.dims):
            p = np.zeros(d)
            if nb == 0:
                p[0] = 1.0
            else:
                p = (nb / (1 + nb)) ** np.arange(d)
                p /= p.sum()
            per_mode.append(p)
        return reduce(np.kron, per_mode)


def annihilation(d: int) -> np.ndarray:
    return np.diag(np.sqrt(np.arange(1, d)), k=1).astype(complex)


def _embed(op: np.ndarray, k: int, dims) -> np.ndarray:
    mats = [op if i == k else np.eye(d) for i, d in enumerate(dims)]
    return reduce(np.kron, mats)


def bath_operators(bath: BathSpec, cutoffs: FockCutoffs) -> tuple[np.ndarray, np.ndarray]:
    """(H_E, X) with H_E = sum w (b^+ b + 1/2) and X = sum g (b + b^+) on the bath space."""
    dims = cutoffs.dims
    if len(dims) != len(bath):
        raise ValueError(f"{len(dims)} cutoffs for {len(bath)} modes")
    n = int(np.prod(dims))
    h_e = np.zeros((n, n), dtype=complex)
    x = np.zeros((n, n), dtype=complex)
    for k, (mode, d) in enumerate(zip(bath.modes, dims)):
        b = annihilation(d)
        h_e += mode.omega * (_embed(b.conj().T @ b, k, dims) + 0.5 * np.eye(n))
        x += mode.g * _embed(b + b.conj().T, k, dims)
    return h_e, x


def coupled_hamiltonian(coupling: np.ndarray, bath: BathSpec, cutoffs: FockCutoffs, cap: int | None = None) -> np.ndarray:
    coupling = np.asarray(coupling, dtype=complex)
    dim_s = coupling.shape[0]
    cutoffs.check(dim_s, cap)
    h_e, x = bath_operators(bath, cutoffs)
    return np.kron(np.eye(dim_s), h_e) + np.kron(coupling, x)


def build_hamiltonian(
    interaction: InteractionSpec, bath: BathSpec, cutoffs: FockCutoffs, cap: int | None = None
) -> np.ndarray:
    return coupled_hamiltonian(interaction.operator(), bath, cutoffs, cap)


class Propagator:
    """exp(-i H t) from one dense Hermitian eigendecomposition."""

    def __init__(self, hamiltonian: np.ndarray):
        self.energies, self.vectors = np.linalg.eigh(hamiltonian)

    def __call__(self, t: float) -> np.ndarray:
        return (self.vectors * np.exp(-1j * self.energies * t)) @ self.vectors.conj().T

    def evolve(self, rho: np.ndarray, t: float) -> np.ndarray:
        # rotate into the energy basis, dephase, rotate back
        v = self.vectors
        r = v.conj().T @ rho @ v
        ph = np.exp(-1j * self.energies * t)
        return v @ (ph[:, None] * r * ph.conj()[None, :]) @ v.conj().T


def _trace_bath(rho: np.ndarray, dim_s: int, dim_e: int) -> np.ndarray:
    return np.einsum("aibi->ab", rho.reshape(dim_s, dim_e, dim_s, dim_e))


class Oracle:
    """Reusable brute-force evolution for one (interaction, bath, cutoffs) triple."""

    def __init__(
        self,
        interaction: InteractionSpec,
        bath: BathSpec,
        cutoffs: FockCutoffs,
        bath_state: BathState | None = None,
        cap: int | None = None,
    ):
        self.cutoffs = cutoffs
        self.bath_state = bath_state or BathState.vacuum()
        self.hamiltonian = build_hamiltonian(interaction, bath, cutoffs, cap)
        self.propagator = Propagator(self.hamiltonian)
        self.rho_e = np.diag(self.bath_state.populations(cutoffs)).astype(complex)

    def total_state(self, rho_s, rho_p, t: float) -> np.ndarray:
        rho0 = np.kron(np.kron(rho_s, rho_p), self.rho_e)
        return self.propagator.evolve(rho0, t)

    def evolve(self, rho_s, rho_p, t: float) -> np.ndarray:
        return self.evolve_many(rho_s, rho_p, [t])[0]

    def evolve_many(self, rho_s, rho_p, times) -> list[np.ndarray]:
        """Reduced system states at each of ``times`` for one initial product state."""
        rho_s = check_density(rho_s, name="rho_s")
        rho_p = check_density(rho_p, name="rho_p")
        weights, coeffs = self._pure_components(np.kron(rho_s, rho_p))
        v = self.propagator.vectors
        dim_e = v.shape[0] // 4
        out = []
        for t in times:
            phases = np.exp(-1j * self.propagator.energies * t)
            psi = (v @ (phases[:, None] * coeffs)).reshape(4, dim_e, -1)
            rho_t = np.einsum("aik,bik,k->ab", psi, psi.conj(), weights)
            out.append(np.einsum("ajbj->ab", rho_t.reshape(2, 2, 2, 2)))
        return out

    def _pure_components(self, rho_t0: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        # rho_T (x) rho_E = sum_k w_k |a_k, n><a_k, n|; returns the weights and the
        # energy-basis coefficients of each component, dropping weights below WEIGHT_FLOOR
        weights_t, vecs_t = np.linalg.eigh(rho_t0)
        pops = self.bath_state.populations(self.cutoffs)
        dim_e = len(pops)
        v_rows = self.propagator.vectors.conj().T.reshape(-1, 4, dim_e)
        ws, cols = [], []
        for n in np.flatnonzero(pops > WEIGHT_FLOOR):
            for w, a in zip(weights_t, vecs_t.T):
                if w * pops[n] > WEIGHT_FLOOR:
                    ws.append(w * pops[n])
                    cols.append(v_rows[:, :, n] @ a)
        return np.array(ws), np.column_stack(cols)


def oracle_evolve(
    interaction: InteractionSpec,
    bath: BathSpec,
    rho_s,
    rho_p,
    bath_state: BathState,
    cutoffs: FockCutoffs,
    t: float,
    cap: int | None = None,
) -> np.ndarray:
    return Oracle(interaction, bath, cutoffs, bath_state, cap).evolve(rho_s, rho_p, t)


def oracle_gamma(
    bath: BathSpec,
    alpha_i: float,
    alpha_j: float,
    bath_state: BathState,
    cutoffs: FockCutoffs,
    t,
    cap: int | None = None,
):
    """Off-diagonal decay factor of a two-level probe coupled via diag(alpha_i, alpha_j).

    ``t`` may be a scalar or an array of times.
    """
    h = coupled_hamiltonian(np.diag([alpha_i, alpha_j]), bath, cutoffs, cap)
    prop = Propagator(h)
    plus = np.full((2, 2), 0.5, dtype=complex)
    rho_e = np.diag(bath_state.populations(cutoffs)).astype(complex)
    rho0 = np.kron(plus, rho_e)
    dim_e = rho_e.shape[0]
    times = np.atleast_1d(np.asarray(t, dtype=float))
    out = np.array([_trace_bath(prop.evolve(rho0, ti), 2, dim_e)[0, 1] / 0.5 for ti in times])
    return out[0] if np.ndim(t) == 0 else out
