"""Bath and interaction specifications and the closed-form bath functions.

Units: hbar = 1, so the dimensionless ratio entering every formula is g / omega.
For a bath of modes (omega_i, g_i, nbar_i) and coupling eigenvalues alpha_i:

    f(t)        = sum_i (g_i/omega_i)^2 (1 + 2 nbar_i) (1 - cos omega_i t)
    phi(t)      = sum_i (g_i/omega_i)^2 (omega_i t - sin omega_i t)
    gamma_ij(t) = exp(-(a_i - a_j)^2 f(t) + i (a_i^2 - a_j^2) phi(t))
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from math import factorial

import numpy as np

from .series import DEFAULT_ORDER, MAX_ORDER, SeriesOrderError, TruncatedSeries


@dataclass(frozen=True)
class Mode:
    omega: float
    g: float
    nbar: float = 0.0

    def __post_init__(self):
        for name in ("omega", "g", "nbar"):
            v = getattr(self, name)
            if not np.isfinite(v):
                raise ValueError(f"mode {name} must be finite, got {v!r}")
            object.__setattr__(self, name, float(v))
        if self.omega <= 0:
            raise ValueError(f"mode omega must be > 0, got {self.omega}")
        if self.nbar < 0:
            raise ValueError(f"mode nbar must be >= 0, got {self.nbar}")


@dataclass(frozen=True)
class BathSpec:
    """A finite set of independent bosonic modes."""

    modes: tuple[Mode, ...]

    def __post_init__(self):
        modes = tuple(m if isinstance(m, Mode) else Mode(**m) for m in self.modes)
        if not modes:
            raise ValueError("bath needs at least one mode")
        object.__setattr__(self, "modes", modes)

    @classmethod
    def single(cls, omega: float, g: float, nbar: float = 0.0) -> "BathSpec":
        return cls((Mode(omega, g, nbar),))

    @property
    def omegas(self) -> np.ndarray:
        return np.array([m.omega for m in self.modes])

    @property
    def couplings(self) -> np.ndarray:
        return np.array([m.g for m in self.modes])

    @property
    def nbars(self) -> np.ndarray:
        return np.array([m.nbar for m in self.modes])

    @property
    def strengths(self) -> np.ndarray:
        """(g_i / omega_i)^2 per mode."""
        return (self.couplings / self.omegas) ** 2

    def __len__(self):
        return len(self.modes)


class Eigenbasis(str, enum.Enum):
    FACTORIZED = "factorized"
    BELL = "bell"
    GENERAL = "general"


_INV_SQRT2 = 1 / np.sqrt(2)

# columns |00>, |01>, |10>, |11> in the S (x) P ordering
FACTORIZED_VECTORS = np.eye(4, dtype=complex)
BELL_VECTORS = _INV_SQRT2 * np.array(
    [
        [1, 1, 0, 0],
        [0, 0, 1, 1],
        [0, 0, 1, -1],
        [1, -1, 0, 0],
    ],
    dtype=complex,
)


@dataclass(frozen=True)
class InteractionSpec:
    """Eigen-decomposition of the system+probe coupling operator.

    ``alphas[i]`` is paired with column ``i`` of :meth:`eigenvectors`. The
    factorized basis orders product states as (k, l) -> 2k + l; the Bell basis
    is (|00>+|11>, |00>-|11>, |01>+|10>, |01>-|10>) / sqrt(2).
    """

    alphas: tuple[float, float, float, float]
    eigenbasis: Eigenbasis = Eigenbasis.BELL
    unitary: np.ndarray | None = field(default=None, compare=False, repr=False)

    def __post_init__(self):
        a = np.asarray(self.alphas, dtype=float).reshape(-1)
        if a.shape != (4,) or not np.all(np.isfinite(a)):
            raise ValueError(f"alphas must be 4 finite reals, got {self.alphas!r}")
        object.__setattr__(self, "alphas", tuple(float(x) for x in a))
        basis = Eigenbasis(self.eigenbasis)
        object.__setattr__(self, "eigenbasis", basis)
        if basis is Eigenbasis.GENERAL:
            if self.unitary is None:
                raise ValueError("general eigenbasis requires a 4x4 unitary")
            u = np.array(self.unitary, dtype=complex)
            if u.shape != (4, 4):
                raise ValueError(f"unitary must be 4x4, got shape {u.shape}")
            err = np.max(np.abs(u.conj().T @ u - np.eye(4)))
            if err > 1e-12:
                raise ValueError(f"eigenvector matrix is not unitary (error {err:.3g})")
            u.setflags(write=False)
            object.__setattr__(self, "unitary", u)
        elif self.unitary is not None:
            raise ValueError(f"unitary given for {basis.value} eigenbasis")

    def eigenvectors(self) -> np.ndarray:
        if self.eigenbasis is Eigenbasis.BELL:
            return BELL_VECTORS
        if self.eigenbasis is Eigenbasis.FACTORIZED:
            return FACTORIZED_VECTORS
        return self.unitary

    def operator(self) -> np.ndarray:
        """The 4x4 Hermitian coupling operator U diag(alphas) U^dagger."""
        u = self.eigenvectors()
        return (u * np.array(self.alphas)) @ u.conj().T


def bose_occupation(omega: float, temperature: float) -> float:
    """Mean occupation of a mode at ``temperature`` (energy units, k_B = 1)."""
    if not omega > 0:
        raise ValueError(f"omega must be > 0, got {omega}")
    if temperature < 0:
        raise ValueError(f"temperature must be >= 0, got {temperature}")
    if temperature == 0:
        return 0.0
    return float(1 / np.expm1(omega / temperature))


def dephasing_f(bath: BathSpec, t):
    t = np.asarray(t, dtype=float)
    w = bath.omegas
    terms = bath.strengths * (1 + 2 * bath.nbars) * (1 - np.cos(np.multiply.outer(t, w)))
    return terms.sum(axis=-1)


def phase_phi(bath: BathSpec, t):
    t = np.asarray(t, dtype=float)
    wt = np.multiply.outer(t, bath.omegas)
    return (bath.strengths * (wt - np.sin(wt))).sum(axis=-1)


def gamma(bath: BathSpec, alpha_i: float, alpha_j: float, t):
    """Decoherence factor of the (i, j) element in the coupling eigenbasis."""
    decay = (alpha_i - alpha_j) ** 2 * dephasing_f(bath, t)
    phase = (alpha_i**2 - alpha_j**2) * phase_phi(bath, t)
    mag = np.exp(-decay)
    return mag * np.cos(phase) + 1j * mag * np.sin(phase)


def gamma_matrix(interaction: InteractionSpec, bath: BathSpec, t: float) -> np.ndarray:
    """4x4 array of gamma_ij(t) for all eigenvalue pairs."""
    a = np.array(interaction.alphas)
    f = float(dephasing_f(bath, t))
    phi = float(phase_phi(bath, t))
    mag = np.exp(-np.subtract.outer(a, a) ** 2 * f)
    ang = np.subtract.outer(a**2, a**2) * phi
    return mag * np.cos(ang) + 1j * mag * np.sin(ang)


def _check_order(order: int) -> None:
    if order < 0 or order > MAX_ORDER:
        raise SeriesOrderError(f"series order must be in [0, {MAX_ORDER}], got {order}")


def taylor_f(bath: BathSpec, order: int = DEFAULT_ORDER) -> TruncatedSeries:
    _check_order(order)
    c = np.zeros(order + 1)
    weight = bath.strengths * (1 + 2 * bath.nbars)
    for n in range(2, order + 1, 2):
        sign = 1 if (n // 2) % 2 == 1 else -1
        c[n] = sign * np.sum(weight * bath.omegas**n) / factorial(n)
    return TruncatedSeries(c)


def taylor_phi(bath: BathSpec, order: int = DEFAULT_ORDER) -> TruncatedSeries:
    _check_order(order)
    c = np.zeros(order + 1)
    for n in range(3, order + 1, 2):
        sign = 1 if ((n - 1) // 2) % 2 == 1 else -1
        c[n] = sign * np.sum(bath.strengths * bath.omegas**n) / factorial(n)
    return TruncatedSeries(c)


def taylor_gamma(
    alpha_i: float, alpha_j: float, f_series: TruncatedSeries, phi_series: TruncatedSeries
) -> TruncatedSeries:
    exponent = -((alpha_i - alpha_j) ** 2) * f_series + 1j * (alpha_i**2 - alpha_j**2) * phi_series
    return exponent.exp()
