"""lattice.py のテスト"""

import logging

import numpy as np
import pytest
from scipy.special import erf

from errors import DimensionError, InvalidStateError, NumericalIntegrityError
from lattice import (
    Grid1D,
    SampledWave,
    integrate,
    integrate_2d,
    interpolate,
    lag_grid,
    oscillatory_transform,
)


class TestGrid1D:
    """一様格子のテスト"""

    def test_points_and_spacing(self):
        grid = Grid1D(-1.0, 1.0, 9)
        assert grid.spacing == 0.25
        assert grid.points[0] == -1.0
        assert grid.points[-1] == 1.0
        assert len(grid.points) == 9

    @pytest.mark.parametrize("lo, hi, n", [(0.0, 1.0, 7), (1.0, 1.0, 10), (2.0, 1.0, 10), (0.0, np.inf, 10), (0.0, 1.0, 10.5)])
    def test_invalid_grid(self, lo, hi, n):
        """不正な格子は DimensionError"""
        with pytest.raises(DimensionError):
            Grid1D(lo, hi, n)

    def test_with_spacing(self):
        grid = Grid1D.with_spacing(8.0, 1.0 / 64.0)
        assert grid.n == 1025
        assert grid.spacing == 1.0 / 64.0

    def test_from_points_roundtrip(self):
        grid = Grid1D(-3.0, 5.0, 33)
        assert Grid1D.from_points(grid.points) == grid

    def test_from_points_rejects_non_uniform(self):
        points = np.linspace(0.0, 1.0, 20)
        points[5] += 1e-4
        with pytest.raises(DimensionError):
            Grid1D.from_points(points)

    def test_lag_grid_is_symmetric(self):
        lags = lag_grid(Grid1D(2.0, 6.0, 65))
        assert lags.min == -2.0
        assert lags.max == 2.0
        assert lags.spacing == 0.0625


class TestIntegrate:
    """台形則のテスト"""

    def test_constant(self):
        grid = Grid1D(0.0, 1.0, 101)
        assert integrate(np.ones(101), grid) == pytest.approx(1.0, abs=1e-14)

    def test_linear(self):
        grid = Grid1D(0.0, 1.0, 101)
        assert integrate(grid.points, grid) == pytest.approx(0.5, abs=1e-14)

    def test_gaussian(self):
        grid = Grid1D(-8.0, 8.0, 1025)
        assert abs(integrate(np.exp(-grid.points**2), grid) - np.sqrt(np.pi)) < 1e-8

    def test_length_mismatch(self):
        with pytest.raises(DimensionError):
            integrate(np.ones(10), Grid1D(0.0, 1.0, 11))

    def test_linearity(self, rng):
        grid = Grid1D(-2.0, 2.0, 64)
        f = rng.normal(size=64) + 1j * rng.normal(size=64)
        g = rng.normal(size=64)
        a, b = 2.5 - 1j, -0.75
        lhs = integrate(a * f + b * g, grid)
        rhs = a * integrate(f, grid) + b * integrate(g, grid)
        assert abs(lhs - rhs) < 1e-12

    def test_second_order_convergence(self):
        """[0, 1] の e^{-p^2} で誤差が n 倍化でおよそ1/4になる"""
        exact = 0.5 * np.sqrt(np.pi) * erf(1.0)
        errors = []
        for n in (201, 401):
            grid = Grid1D(0.0, 1.0, n)
            errors.append(abs(integrate(np.exp(-grid.points**2), grid).real - exact))
        assert 3.5 < errors[0] / errors[1] < 4.5

    def test_integrate_2d_separable(self):
        g1 = Grid1D(-8.0, 8.0, 513)
        g2 = Grid1D(-6.0, 6.0, 385)
        values = np.outer(np.exp(-g1.points**2), np.exp(-2 * g2.points**2))
        assert abs(integrate_2d(values, g1, g2) - np.pi / np.sqrt(2)) < 1e-8

    def test_integrate_2d_shape_mismatch(self):
        g = Grid1D(0.0, 1.0, 10)
        with pytest.raises(DimensionError):
            integrate_2d(np.ones((10, 11)), g, g)


class TestInterpolate:
    """線形補間のテスト"""

    def test_exact_at_nodes(self):
        grid = Grid1D(0.0, 1.0, 11)
        values = np.sin(grid.points)
        np.testing.assert_allclose(interpolate(values, grid, grid.points), values, rtol=1e-14, atol=1e-15)

    def test_midpoint_is_average(self):
        grid = Grid1D(0.0, 1.0, 11)
        values = grid.points**2
        mid = 0.5 * (grid.points[3] + grid.points[4])
        assert interpolate(values, grid, mid) == pytest.approx(0.5 * (values[3] + values[4]))

    def test_zero_outside_support(self):
        grid = Grid1D(-1.0, 1.0, 21)
        result = interpolate(np.ones(21), grid, np.array([-1.5, -1.0, 1.0, 1.01, np.nan]))
        np.testing.assert_array_equal(result, [0.0, 1.0, 1.0, 0.0, 0.0])

    def test_2d_along_first_axis(self):
        grid = Grid1D(0.0, 7.0, 8)
        values = np.outer(grid.points, [1.0, 2.0, 3.0])
        result = interpolate(values, grid, np.array([0.5, 6.5]))
        np.testing.assert_allclose(result, [[0.5, 1.0, 1.5], [6.5, 13.0, 19.5]])


class TestOscillatoryTransform:
    """振動核変換のテスト"""

    def test_zero_delta_equals_integrate(self, rng):
        grid = Grid1D(-4.0, 4.0, 257)
        values = np.exp(-grid.points**2) * (1 + 0.3j * grid.points)
        assert oscillatory_transform(values, grid, [0.0])[0] == pytest.approx(integrate(values, grid), abs=1e-14)

    def test_gaussian_closed_form(self):
        width = 1.5
        grid = Grid1D(-16.0, 16.0, 2049)
        values = np.exp(-grid.points**2 / width**2)
        deltas = np.array([-1.0, 0.0, 0.3, 0.7, 1.4])
        expected = width * np.sqrt(np.pi) * np.exp(-(width**2) * deltas**2)
        np.testing.assert_allclose(oscillatory_transform(values, grid, deltas, method="direct").real, expected, atol=1e-10)

    def test_czt_matches_direct(self, rng):
        """chirp-z 経路は直接法と相対1e-9で一致"""
        grid = Grid1D(-6.0, 6.0, 769)
        p = grid.points
        coeffs = rng.normal(size=4) + 1j * rng.normal(size=4)
        values = np.exp(-0.5 * p**2) * np.polyval(coeffs, p)
        deltas = np.linspace(-3.1, 2.7, 64)
        direct = oscillatory_transform(values, grid, deltas, method="direct")
        fast = oscillatory_transform(values, grid, deltas, method="czt")
        assert np.max(np.abs(fast - direct)) <= 1e-9 * np.max(np.abs(direct))

    def test_auto_uses_direct_for_irregular_deltas(self, rng):
        grid = Grid1D(-6.0, 6.0, 257)
        values = np.exp(-grid.points**2)
        deltas = np.sort(rng.uniform(-2, 2, size=40))
        np.testing.assert_allclose(
            oscillatory_transform(values, grid, deltas),
            oscillatory_transform(values, grid, deltas, method="direct"),
            rtol=0,
            atol=1e-15,
        )

    def test_czt_requires_uniform_deltas(self):
        grid = Grid1D(-1.0, 1.0, 16)
        with pytest.raises(DimensionError):
            oscillatory_transform(np.ones(16), grid, [0.0, 0.1, 0.5], method="czt")


class TestSampledWave:
    """規格化済み波動関数のテスト"""

    def test_normalized_constructor(self):
        grid = Grid1D(-8.0, 8.0, 1025)
        wave = SampledWave.normalized(grid, 7.0 * np.exp(-grid.points**2))
        assert abs(wave.norm() - 1.0) <= 1e-10

    def test_unnormalized_amp_rejected(self):
        grid = Grid1D(-8.0, 8.0, 1025)
        with pytest.raises(NumericalIntegrityError):
            SampledWave(grid, np.exp(-grid.points**2))

    def test_zero_amp_rejected(self):
        with pytest.raises(InvalidStateError):
            SampledWave.normalized(Grid1D(0.0, 1.0, 16), np.zeros(16))

    def test_non_finite_rejected(self):
        grid = Grid1D(-1.0, 1.0, 16)
        amp = np.ones(16)
        amp[3] = np.nan
        with pytest.raises(InvalidStateError):
            SampledWave.normalized(grid, amp)

    def test_amp_is_read_only(self):
        grid = Grid1D(-8.0, 8.0, 1025)
        wave = SampledWave.normalized(grid, np.exp(-grid.points**2))
        with pytest.raises(ValueError):
            wave.amp[0] = 1.0

    def test_truncation_warning(self, caplog):
        """格子端で減衰していなければ警告"""
        grid = Grid1D(-1.0, 1.0, 65)
        with caplog.at_level(logging.WARNING, logger="lattice"):
            wave = SampledWave.normalized(grid, np.exp(-grid.points**2), label="wide")
        assert wave.boundary_ratio > 1e-6
        assert "減衰していません" in caplog.text

    def test_moments(self):
        grid = Grid1D(-8.0, 8.0, 1025)
        wave = SampledWave.normalized(grid, np.exp(-((grid.points - 0.5) ** 2)))
        assert wave.mean() == pytest.approx(0.5, abs=1e-10)
        assert wave.variance() == pytest.approx(0.25, abs=1e-10)
        assert wave.is_real()
        assert not wave.is_even()
