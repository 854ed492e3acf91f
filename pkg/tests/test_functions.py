"""Benchmark test functions and point generators."""
import math

import numpy as np
import pytest

import pospoly as pp
from pospoly import functions
from pospoly.errors import CapacityError


class TestUnivariateFunctions:
    def test_runge_spot_values(self):
        tf = pp.make_test_function("runge", 1)
        # (101/100) (1/(1+100 x^2) - 1/101): 1 at x=0, 0 at x=+-1
        vals = functions.evaluate(tf, np.array([-1.0, 0.0, 1.0]))
        np.testing.assert_allclose(vals, [0.0, 1.0, 0.0], atol=1e-15)
        x = 0.1
        expected = 1.01 * (1.0 / (1.0 + 100 * x * x) - 1.0 / 101.0)
        assert functions.eval_at(tf, x) == pytest.approx(expected, abs=1e-16)

    def test_truncated_sine(self):
        tf = pp.make_test_function("truncated_sine", 1)
        # zero outside |x| < 0.2, sin-shifted inside
        vals = functions.evaluate(tf, np.array([-0.5, -0.2, 0.2, 0.9]))
        np.testing.assert_array_equal(vals, 0.0)
        x = 0.1
        expected = math.sin(math.pi * (x + 1) / 2) - math.sin(0.6 * math.pi)
        assert functions.eval_at(tf, x) == pytest.approx(expected, abs=1e-15)
        # the peak value at x=0 is positive, edges approach 0
        assert functions.eval_at(tf, 0.0) > 0.04

    def test_step(self):
        tf = pp.make_test_function("step", 1)
        vals = functions.evaluate(tf, np.array([-0.3, 0.0, 1e-12, 0.7]))
        np.testing.assert_array_equal(vals, [0.0, 0.0, 1.0, 1.0])

    def test_univariate_rejects_d_above_1(self):
        with pytest.raises(ValueError):
            pp.make_test_function("runge", 2)


class TestPeakFunctions:
    def test_gaussian_peak_value(self):
        tf = pp.make_test_function("gaussian_peak", 2, sigma=3.0, omega=0.25)
        x = np.array([[0.1, -0.4]])
        u = (x + 1) / 2
        expected = math.exp(-float(np.sum(9.0 * (u - 0.25) ** 2)))
        assert functions.evaluate(tf, x)[0] == pytest.approx(expected, rel=1e-14)
        # maximum 1 exactly at the peak location x = 2*omega - 1
        assert functions.eval_at(tf, [-0.5, -0.5]) == 1.0

    def test_continuous_peak_value(self):
        tf = pp.make_test_function("continuous_peak", 3)
        x = np.array([[0.0, 0.2, -0.6]])
        u = (x + 1) / 2
        expected = math.exp(-float(np.sum(10.0 * np.abs(u - 0.5))))
        assert functions.evaluate(tf, x)[0] == pytest.approx(expected, rel=1e-14)

    def test_corner_peak_value(self):
        tf = pp.make_test_function("corner_peak", 2)
        x = np.array([[0.4, -0.8]])
        u = (x + 1) / 2
        expected = (1.0 + float(np.sum(20.0 * u))) ** (-3.0)
        assert functions.evaluate(tf, x)[0] == pytest.approx(expected, rel=1e-14)

    def test_default_parameters(self):
        g = pp.make_test_function("gaussian_peak", 4)
        np.testing.assert_array_equal(g.sigma, 10.0)
        np.testing.assert_array_equal(g.omega, 0.5)
        c = pp.make_test_function("corner_peak", 4)
        np.testing.assert_array_equal(c.sigma, 20.0)
        assert c.omega is None

    def test_sigma_length_validated(self):
        with pytest.raises(ValueError):
            pp.TestFunction(kind="gaussian_peak", dim=3, sigma=np.ones(2),
                            omega=np.ones(3))

    def test_all_positive(self):
        pts = np.random.default_rng(0).uniform(-1, 1, (200, 5))
        for kind in functions.PEAK_KINDS:
            tf = pp.make_test_function(kind, 5)
            assert np.all(functions.evaluate(tf, pts) > 0)


class TestSamplers:
    def test_chebyshev_nodes(self):
        s = pp.chebyshev_nodes(5)
        i = np.arange(1, 6)
        expected = np.sort(np.cos((2 * i - 1) * np.pi / 10))
        np.testing.assert_allclose(s.points[:, 0], expected, atol=1e-15)
        assert s.generator == "chebyshev" and s.dim == 1

    def test_equidistant(self):
        s = pp.equidistant(3)
        np.testing.assert_array_equal(s.points[:, 0], [-1.0, 0.0, 1.0])
        s = pp.equidistant(101)
        assert s.points[0, 0] == -1.0 and s.points[-1, 0] == 1.0
        np.testing.assert_allclose(np.diff(s.points[:, 0]), 0.02, atol=1e-15)

    def test_uniform_random_seeded(self):
        a = pp.uniform_random(50, 3, seed=42)
        b = pp.uniform_random(50, 3, seed=42)
        np.testing.assert_array_equal(a.points, b.points)
        c = pp.uniform_random(50, 3, seed=43)
        assert not np.array_equal(a.points, c.points)
        assert np.all(np.abs(a.points) <= 1.0)
        assert a.metadata()["rng"] == "numpy-PCG64"

    def test_tensor_grid(self):
        s = pp.tensor_grid(31, 2)
        assert len(s) == 961
        # row-major: the last axis varies fastest
        np.testing.assert_array_equal(s.points[0], [-1.0, -1.0])
        np.testing.assert_array_equal(s.points[1][0], -1.0)
        assert s.points[1][1] > -1.0

    def test_tensor_grid_capacity(self):
        with pytest.raises(CapacityError):
            pp.tensor_grid(100, 5)

    def test_validation(self):
        with pytest.raises(ValueError):
            pp.chebyshev_nodes(0)
        with pytest.raises(ValueError):
            pp.equidistant(1)
        with pytest.raises(ValueError):
            pp.uniform_random(0, 1, seed=1)
