"""Reachable sets, accessibility certificates and exact-swap control search."""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import reduce

import numpy as np

from .dynamics import AffineMap
from .model import (
    BathSpec,
    Eigenbasis,
    InteractionSpec,
    phase_phi,
    taylor_f,
    taylor_gamma,
    taylor_phi,
)
from .series import DEFAULT_ORDER, SeriesOrderError, TruncatedSeries, det3
from .states import PHYSICAL_TOL, as_qubit_state

ACCESS_RTOL = 1e-9
COMMENSURATE_MAX_DENOMINATOR = 10**6
COMMENSURATE_RTOL = 1e-9
SWAP_TOL = 1e-9


class IncommensurateBathError(ValueError):
    """No common base frequency exists, so f(t) never returns to zero for t > 0."""


@dataclass(frozen=True)
class Ellipsoid:
    center: np.ndarray
    semi_axes: np.ndarray
    axes: np.ndarray  # columns are the principal directions

    def surface_points(self, n: int, rng: np.random.Generator | None = None) -> np.ndarray:
        """Images of ``n`` unit vectors (random if ``rng`` is given, else a Fibonacci lattice)."""
        if rng is None:
            k = np.arange(n) + 0.5
            z = 1 - 2 * k / n
            r = np.sqrt(1 - z**2)
            theta = np.pi * (1 + 5**0.5) * k
            u = np.column_stack([r * np.cos(theta), r * np.sin(theta), z])
        else:
            u = rng.normal(size=(n, 3))
            u /= np.linalg.norm(u, axis=1, keepdims=True)
        return self.center + (u * self.semi_axes) @ self.axes.T

    def mahalanobis(self, points, tol: float = PHYSICAL_TOL) -> np.ndarray:
        """Normalized radius of each point; <= 1 inside.

        Components along degenerate (zero-length) axes count as infinitely
        far unless they are below ``tol``.
        """
        y = (np.atleast_2d(points) - self.center) @ self.axes
        scale = self.semi_axes
        with np.errstate(divide="ignore", invalid="ignore"):
            q = np.where(scale > 0, y / np.where(scale > 0, scale, 1), np.where(np.abs(y) <= tol, 0.0, np.inf))
        return np.sqrt(np.sum(q**2, axis=1))

    def contains(self, points, tol: float = PHYSICAL_TOL) -> np.ndarray:
        return self.mahalanobis(points, tol) <= 1 + tol


def reachable_ellipsoid(affine: AffineMap) -> Ellipsoid:
    u, s, _ = np.linalg.svd(affine.A)
    return Ellipsoid(center=affine.a.copy(), semi_axes=s, axes=u)


@dataclass
class ReachableUnion:
    """Sampled union of reachable sets over a growing time horizon."""

    times: list[float] = field(default_factory=list)
    clouds: list[np.ndarray] = field(default_factory=list)

    def add(self, t: float, points) -> None:
        if self.times and t < self.times[-1]:
            raise ValueError("times must be added in non-decreasing order")
        self.times.append(float(t))
        self.clouds.append(np.atleast_2d(np.array(points, dtype=float)))

    def up_to(self, horizon: float) -> np.ndarray:
        kept = [c for t, c in zip(self.times, self.clouds) if t <= horizon]
        return np.vstack(kept) if kept else np.empty((0, 3))


class AccessStatus(str, enum.Enum):
    ACCESSIBLE_SUFFICIENT = "AccessibleSufficient"
    INCONCLUSIVE = "Inconclusive"


@dataclass(frozen=True)
class AccessVerdict:
    holds: tuple[bool, bool, bool]
    status: AccessStatus
    certificate: float | None = None


_ACCESS_PAIRS = (
    ((1, 3), (0, 2)),  # (a2-a4)^2 vs (a1-a3)^2
    ((0, 3), (1, 2)),  # (a1-a4)^2 vs (a2-a3)^2
    ((2, 3), (0, 1)),  # (a3-a4)^2 vs (a1-a2)^2
)


def access_margins(alphas) -> np.ndarray:
    """Signed differences of the three squared eigenvalue gaps that must not vanish."""
    a = np.asarray(alphas, dtype=float)
    return np.array([(a[i] - a[j]) ** 2 - (a[k] - a[l]) ** 2 for (i, j), (k, l) in _ACCESS_PAIRS])


def accessibility_check(alphas, certificate: float | None = None) -> AccessVerdict:
    a = np.asarray(alphas, dtype=float)
    holds = []
    for (i, j), (k, l) in _ACCESS_PAIRS:
        lhs, rhs = (a[i] - a[j]) ** 2, (a[k] - a[l]) ** 2
        holds.append(bool(abs(lhs - rhs) > ACCESS_RTOL * max(lhs, rhs)))
    status = AccessStatus.ACCESSIBLE_SUFFICIENT if all(holds) else AccessStatus.INCONCLUSIVE
    return AccessVerdict(tuple(holds), status, certificate)


def detA_series(
    interaction: InteractionSpec, bath: BathSpec, s0, order: int = DEFAULT_ORDER
) -> TruncatedSeries:
    """Maclaurin series of det A(t) for the Bell-basis affine map."""
    if interaction.eigenbasis is not Eigenbasis.BELL:
        raise ValueError("determinant certificate needs a Bell eigenbasis")
    sx, sy, sz = as_qubit_state(s0).bloch
    fs, ps = taylor_f(bath, order), taylor_phi(bath, order)
    al = interaction.alphas
    g = {(i, j): taylor_gamma(al[i - 1], al[j - 1], fs, ps) for i in range(1, 5) for j in range(i + 1, 5)}

    def comb(i, j, sign, k, l):
        return g[i, j] + sign * g[k, l]

    def im(x):
        return x.imag

    def re(x):
        return x.real

    m = [
        [re(comb(1, 3, -1, 2, 4)), sz * im(comb(1, 3, -1, 2, 4)), sy * im(comb(1, 3, 1, 2, 4))],
        [sz * im(comb(1, 4, -1, 2, 3)), re(comb(2, 3, -1, 1, 4)), -sx * im(comb(2, 3, 1, 1, 4))],
        [-sy * im(comb(1, 2, 1, 3, 4)), sx * im(comb(3, 4, -1, 1, 2)), re(comb(1, 2, -1, 3, 4))],
    ]
    m = [[0.5 * e for e in row] for row in m]
    return det3(m)


def detA_sixth_derivative(
    interaction: InteractionSpec, bath: BathSpec, s0, order: int = DEFAULT_ORDER, lower_tol: float = 1e-12
) -> float:
    """Sixth time derivative of det A at t = 0.

    The coefficients of t^0 .. t^5 vanish identically; a violation beyond
    ``lower_tol`` raises, since it would mean the series is inconsistent.
    """
    if order < 6:
        raise SeriesOrderError(f"order {order} cannot resolve a sixth derivative")
    series = detA_series(interaction, bath, s0, order)
    lower = np.abs(series.coeffs[:6])
    if np.any(lower > lower_tol):
        raise ArithmeticError(f"low-order coefficients of det A do not vanish: {lower}")
    return float(series.derivative_at_zero(6))


@dataclass(frozen=True)
class SwapSolution:
    t_hat: float
    k1: int
    k2: tuple[int, ...]
    alpha4: float


def _simplest_ratio(r: float, max_denominator: int, rtol: float) -> Fraction | None:
    """First continued-fraction convergent of r within rtol, or None."""
    x = Fraction(r)
    h0, h1, k0, k1 = 0, 1, 1, 0
    while True:
        a = math.floor(x)
        h0, h1 = h1, a * h1 + h0
        k0, k1 = k1, a * k1 + k0
        if k1 > max_denominator:
            return None
        q = Fraction(h1, k1)
        if abs(float(q) - r) <= rtol * abs(r):
            return q
        if x == a:
            return None
        x = 1 / (x - a)


def base_frequency(
    omegas,
    max_denominator: int = COMMENSURATE_MAX_DENOMINATOR,
    rtol: float = COMMENSURATE_RTOL,
) -> tuple[float, tuple[int, ...]]:
    """Largest omega0 with every omega_i = m_i * omega0 for integers m_i.

    Each ratio omega_i / omega_1 is replaced by its simplest rational
    (first continued-fraction convergent) within ``rtol``; the search gives
    up once denominators pass ``max_denominator``.
    """
    w = np.asarray(omegas, dtype=float)
    ref = w[0]
    fracs = []
    for x in w:
        q = _simplest_ratio(x / ref, max_denominator, rtol)
        if q is None:
            raise IncommensurateBathError(
                f"frequency ratio {x / ref!r} has no rational form with denominator <= {max_denominator}"
            )
        fracs.append(q)
    lcm = reduce(math.lcm, (q.denominator for q in fracs))
    ints = [q.numerator * (lcm // q.denominator) for q in fracs]
    g = reduce(math.gcd, ints)
    multiples = tuple(n // g for n in ints)
    return float(ref * g / lcm), multiples


def swap_times(
    bath: BathSpec,
    alpha4: float,
    k1_max: int,
    omega0: float | None = None,
    max_denominator: int = COMMENSURATE_MAX_DENOMINATOR,
) -> list[SwapSolution]:
    """All revival times 2 pi j / omega0 at which alpha4^2 phi is an odd multiple of pi, k1 <= k1_max.

    ``omega0`` defaults to the detected base frequency of the bath.
    """
    if k1_max < 0:
        raise ValueError("k1_max must be >= 0")
    if omega0 is None:
        omega0, multiples = base_frequency(bath.omegas, max_denominator)
    else:
        ratios = bath.omegas / omega0
        multiples = tuple(int(round(r)) for r in ratios)
        if np.any(np.abs(ratios - multiples) > COMMENSURATE_RTOL * ratios):
            raise IncommensurateBathError(f"frequencies are not multiples of omega0={omega0}")
    # phi at a revival is exactly 2 pi j sum_i (g_i/w_i)^2 m_i
    per_period = 2 * np.pi * float(np.dot(bath.strengths, multiples))
    scale = alpha4**2 * per_period / np.pi
    if scale <= 0:
        return []
    j_max = int(math.floor((2 * k1_max + 1) / scale * (1 + SWAP_TOL))) + 1
    out = []
    for j in range(1, j_max + 1):
        t_hat = 2 * np.pi * j / omega0
        x = alpha4**2 * float(phase_phi(bath, t_hat)) / np.pi
        n = round(x)
        if n % 2 == 1 and abs(x - n) <= SWAP_TOL * max(1.0, abs(n)):
            k1 = (n - 1) // 2
            if k1 <= k1_max:
                out.append(SwapSolution(t_hat, k1, tuple(j * m for m in multiples), float(alpha4)))
    return sorted(out, key=lambda s: (s.t_hat, s.k1))


def design_alpha4(bath: BathSpec, k1: int, k2) -> float:
    """Coupling eigenvalue that makes t_hat = 2 pi k2_i / omega_i an exact swap with index k1."""
    k2 = np.asarray(k2, dtype=int).reshape(-1)
    if len(k2) != len(bath):
        raise ValueError(f"k2 has {len(k2)} entries for {len(bath)} modes")
    times = k2 / bath.omegas
    if np.any(k2 <= 0) or np.any(np.abs(times - times[0]) > COMMENSURATE_RTOL * np.abs(times[0])):
        raise ValueError(f"k2={k2.tolist()} does not describe a single positive revival time")
    denom = 2.0 / (2 * k1 + 1) * float(np.dot(k2, bath.strengths))
    if not denom > 0:
        raise ValueError("design equation has a non-positive right-hand side")
    return float(1 / np.sqrt(denom))
