"""Truncated power series in time, used for leading-order derivative certificates."""

from __future__ import annotations

from math import factorial

import numpy as np

DEFAULT_ORDER = 8
MAX_ORDER = 12


class SeriesOrderError(ValueError):
    pass


class TruncatedSeries:
    """Coefficients of t^0 .. t^order of a function of time.

    Coefficients may be real or complex. Binary operations between series of
    different order truncate to the smaller one.
    """

    __slots__ = ("coeffs",)

    def __init__(self, coeffs, order: int | None = None):
        c = np.asarray(coeffs)
        if c.dtype.kind not in "fc":
            c = c.astype(float)
        if order is None:
            order = len(c) - 1
        if order < 0:
            raise SeriesOrderError("series order must be non-negative")
        out = np.zeros(order + 1, dtype=c.dtype)
        n = min(len(c), order + 1)
        out[:n] = c[:n]
        self.coeffs = out
        self.coeffs.setflags(write=False)

    @property
    def order(self) -> int:
        return len(self.coeffs) - 1

    @classmethod
    def constant(cls, value, order: int = DEFAULT_ORDER) -> "TruncatedSeries":
        return cls([value], order)

    def __repr__(self):
        return f"TruncatedSeries({self.coeffs.tolist()!r})"

    def _coerce(self, other):
        if isinstance(other, TruncatedSeries):
            k = min(self.order, other.order)
            return self.coeffs[: k + 1], other.coeffs[: k + 1]
        if np.ndim(other) == 0:
            return self.coeffs, None
        return NotImplemented

    def __add__(self, other):
        pair = self._coerce(other)
        if pair is NotImplemented:
            return pair
        a, b = pair
        if b is None:
            out = a.astype(np.result_type(a, other))
            out[0] = out[0] + other
            return TruncatedSeries(out)
        return TruncatedSeries(a + b)

    __radd__ = __add__

    def __neg__(self):
        return TruncatedSeries(-self.coeffs)

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        pair = self._coerce(other)
        if pair is NotImplemented:
            return pair
        a, b = pair
        if b is None:
            return TruncatedSeries(a * other)
        return TruncatedSeries(np.convolve(a, b)[: len(a)])

    __rmul__ = __mul__

    def __truediv__(self, scalar):
        if isinstance(scalar, TruncatedSeries):
            raise TypeError("series division is not supported")
        return TruncatedSeries(self.coeffs / scalar)

    @property
    def real(self) -> "TruncatedSeries":
        return TruncatedSeries(self.coeffs.real.copy())

    @property
    def imag(self) -> "TruncatedSeries":
        return TruncatedSeries(self.coeffs.imag.copy())

    def exp(self) -> "TruncatedSeries":
        """Series of exp(self), via n y_n = sum_k k x_k y_{n-k}."""
        x = self.coeffs
        y = np.zeros_like(x, dtype=np.result_type(x, float))
        y[0] = np.exp(x[0])
        for n in range(1, len(x)):
            k = np.arange(1, n + 1)
            y[n] = np.sum(k * x[k] * y[n - k]) / n
        return TruncatedSeries(y)

    def __call__(self, t):
        # Horner, highest power first
        return np.polyval(self.coeffs[::-1], t)

    def derivative_at_zero(self, n: int):
        if n > self.order:
            raise SeriesOrderError(f"derivative {n} exceeds series order {self.order}")
        return factorial(n) * self.coeffs[n]


def det3(m) -> TruncatedSeries:
    """Determinant of a 3x3 nested list of series (cofactor expansion)."""
    return (
        m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
        - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
        + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
    )
