from math import factorial

import numpy as np
import pytest

from incoherent.series import SeriesOrderError, TruncatedSeries, det3


def test_product_truncates_at_order():
    a = TruncatedSeries([1.0, 1.0], order=3)  # 1 + t
    cube = a * a * a
    np.testing.assert_allclose(cube.coeffs, [1, 3, 3, 1])
    assert (cube * a).order == 3
    np.testing.assert_allclose((cube * a).coeffs, [1, 4, 6, 4])


def test_mixed_orders_use_smaller():
    a = TruncatedSeries([1, 2, 3, 4, 5])
    b = TruncatedSeries([1, 1, 1])
    assert (a + b).order == 2
    assert (a * b).order == 2


def test_exp_matches_exponential_series():
    x = TruncatedSeries([0.0, 1.0], order=10)
    np.testing.assert_allclose(x.exp().coeffs, [1 / factorial(n) for n in range(11)], rtol=1e-15)


def test_exp_of_complex_argument():
    theta = TruncatedSeries([0.0, 2.0j], order=8)
    e = theta.exp()
    t = 0.05
    assert abs(e(t) - np.exp(2j * t)) < 1e-14


def test_real_imag_and_scalar_ops():
    s = TruncatedSeries([1 + 2j, 3 - 1j])
    np.testing.assert_array_equal(s.real.coeffs, [1, 3])
    np.testing.assert_array_equal(s.imag.coeffs, [2, -1])
    np.testing.assert_allclose((2 - s).coeffs, [1 - 2j, -3 + 1j])
    np.testing.assert_allclose((s / 2).coeffs, [0.5 + 1j, 1.5 - 0.5j])


def test_derivative_at_zero():
    s = TruncatedSeries([0, 0, 0, 2.0])
    assert s.derivative_at_zero(3) == 12.0
    with pytest.raises(SeriesOrderError):
        s.derivative_at_zero(4)


def test_det3_matches_numpy_on_constants(rng):
    m = rng.normal(size=(3, 3))
    series = [[TruncatedSeries([m[i, j], 0.0]) for j in range(3)] for i in range(3)]
    assert det3(series).coeffs[0] == pytest.approx(np.linalg.det(m), rel=1e-12)
