import numpy as np
import pytest

from quadsurf import (Dataset, InputError, SurfaceParams, build_design, margins,
                      predict, predict_many, smooth_gradient, smooth_value, total_loss)

from conftest import random_dataset


def fd_gradient(fun, x, h=1e-5):
    """Central-difference gradient, the independent oracle for smooth parts."""
    g = np.zeros_like(x)
    for j in range(x.size):
        e = np.zeros_like(x)
        e[j] = h
        g[j] = (fun(x + e) - fun(x - e)) / (2 * h)
    return g


def fd_hessian(fun, x, h=1e-5):
    """Central-difference Hessian from function values only."""
    d = x.size
    H = np.zeros((d, d))
    for i in range(d):
        for j in range(d):
            ei = np.zeros(d); ei[i] = h
            ej = np.zeros(d); ej[j] = h
            H[i, j] = (fun(x + ei + ej) - fun(x + ei - ej)
                       - fun(x - ei + ej) + fun(x - ei - ej)) / (4 * h * h)
    return H


class TestDataset:
    def test_rejects_nonfinite(self):
        with pytest.raises(InputError):
            Dataset(points=np.array([[1.0, np.inf]]), labels=np.array([1.0]))

    def test_rejects_bad_labels(self):
        with pytest.raises(InputError):
            Dataset(points=np.ones((2, 2)), labels=np.array([1.0, 0.0]))

    def test_rejects_empty(self):
        with pytest.raises(InputError):
            Dataset(points=np.ones((0, 2)), labels=np.zeros(0))


class TestBuildDesign:
    def test_single_point_row(self):
        # m=1, x=(2), y=+1: s(x) = 0.5*4 = 2, so a_1 = -(2, 2, 1)
        data = Dataset(points=np.array([[2.0]]), labels=np.array([1.0]))
        cache = build_design(data)
        np.testing.assert_array_equal(cache.a, [[-2.0, -2.0, -1.0]])

    def test_c_row_of_hessian_zero(self, small_cache):
        np.testing.assert_array_equal(small_cache.G[-1, :], 0.0)
        np.testing.assert_array_equal(small_cache.G[:, -1], 0.0)

    def test_hessian_psd_symmetric(self, small_cache):
        G = small_cache.G
        np.testing.assert_array_equal(G, G.T)
        w = np.linalg.eigvalsh(G)
        assert w.min() > -1e-10 * max(1.0, w.max())

    def test_hessian_matches_finite_differences(self, rng):
        data = random_dataset(rng, 5, 3)
        cache = build_design(data)
        theta0 = rng.normal(size=cache.d)

        def f(v):
            return smooth_value(SurfaceParams.from_vector(v, 2 + 1), cache)

        # f is exactly quadratic, so central differences are step-exact; the
        # larger step keeps the 1/h^2 rounding amplification below the bar
        H = fd_hessian(f, theta0, h=1e-2)
        err = np.abs(H - cache.G).max() / max(1.0, np.abs(cache.G).max())
        assert err < 1e-6

    def test_deterministic(self, small_data):
        c1, c2 = build_design(small_data), build_design(small_data)
        np.testing.assert_array_equal(c1.a, c2.a)
        np.testing.assert_array_equal(c1.G, c2.G)
        np.testing.assert_array_equal(c1.M, c2.M)


class TestMargins:
    def test_zero_theta_gives_ones(self, small_cache):
        F = margins(SurfaceParams.zeros(3), small_cache)
        np.testing.assert_array_equal(F, np.ones(small_cache.n))

    def test_hand_case(self):
        # W=I, b=0, c=-1, x=(2,0), y=+1: h = 0.5*4 - 1 = 1, F = 0
        data = Dataset(points=np.array([[2.0, 0.0]]), labels=np.array([1.0]))
        cache = build_design(data)
        theta = SurfaceParams(np.array([1.0, 1.0, 0.0]), np.zeros(2), -1.0)
        np.testing.assert_allclose(margins(theta, cache), [0.0], atol=1e-14)

    def test_affine(self, rng, small_cache):
        t1 = rng.normal(size=small_cache.d)
        t2 = rng.normal(size=small_cache.d)
        m = small_cache.m

        def F(v):
            return margins(SurfaceParams.from_vector(v, m), small_cache)

        F0 = F(np.zeros(small_cache.d))
        lhs = F(t1 + t2) - F0
        rhs = (F(t1) - F0) + (F(t2) - F0)
        np.testing.assert_allclose(lhs, rhs, atol=1e-12)

    def test_jacobian_is_cached_rows(self, rng, small_cache):
        m = small_cache.m
        theta0 = rng.normal(size=small_cache.d)

        for i in range(small_cache.n):
            def Fi(v):
                return margins(SurfaceParams.from_vector(v, m), small_cache)[i]
            g = fd_gradient(Fi, theta0)
            np.testing.assert_allclose(g, small_cache.a[i], rtol=1e-6, atol=1e-8)

    def test_dimension_mismatch(self, small_cache):
        with pytest.raises(InputError):
            margins(SurfaceParams.zeros(2), small_cache)


class TestSmoothPart:
    def test_zero_at_origin(self, small_cache):
        theta = SurfaceParams.zeros(3)
        assert smooth_value(theta, small_cache) == 0.0
        np.testing.assert_array_equal(smooth_gradient(theta, small_cache), 0.0)

    def test_hand_value(self):
        # m=1, x=(1), W=(2), b=(1): 0.5*(2+1)^2 = 4.5
        data = Dataset(points=np.array([[1.0]]), labels=np.array([1.0]))
        cache = build_design(data)
        theta = SurfaceParams(np.array([2.0]), np.array([1.0]), 0.0)
        assert smooth_value(theta, cache) == pytest.approx(4.5, abs=1e-14)

    def test_gradient_matches_finite_differences(self, rng):
        for _ in range(10):
            data = random_dataset(rng, 6, 2)
            cache = build_design(data)
            theta0 = rng.normal(size=cache.d)

            def f(v):
                return smooth_value(SurfaceParams.from_vector(v, 2), cache)

            g_fd = fd_gradient(f, theta0)
            g = smooth_gradient(SurfaceParams.from_vector(theta0, 2), cache)
            np.testing.assert_allclose(g, g_fd, rtol=1e-6, atol=1e-8)

    def test_value_is_quadratic_form(self, rng, small_cache):
        v = rng.normal(size=small_cache.d)
        theta = SurfaceParams.from_vector(v, small_cache.m)
        quad = 0.5 * v @ small_cache.G @ v
        val = smooth_value(theta, small_cache)
        assert abs(val - quad) <= 1e-10 * max(1.0, abs(val))


class TestTotalLoss:
    def test_zero_theta(self, small_cache):
        lv = total_loss(SurfaceParams.zeros(3), small_cache, lam=2.0)
        assert lv.smooth == 0.0
        assert lv.count == small_cache.n
        assert lv.total == 2.0 * small_cache.n

    def test_counts_match_bruteforce(self, rng, small_cache):
        for _ in range(20):
            v = rng.normal(size=small_cache.d)
            theta = SurfaceParams.from_vector(v, small_cache.m)
            lv = total_loss(theta, small_cache, lam=0.5)
            F = margins(theta, small_cache)
            assert lv.count == sum(1 for t in F if t > 0)

    def test_rejects_bad_lambda(self, small_cache):
        with pytest.raises(ValueError):
            total_loss(SurfaceParams.zeros(3), small_cache, lam=0.0)


class TestPredict:
    def setup_method(self):
        # unit circle surface: h(x) = 0.5|x|^2 - 1
        self.theta = SurfaceParams(np.array([1.0, 1.0, 0.0]), np.zeros(2), -1.0)

    def test_outside(self):
        assert predict(self.theta, [2.0, 0.0]) == 1

    def test_inside(self):
        assert predict(self.theta, [0.0, 0.0]) == -1

    def test_tie_maps_to_plus(self):
        x = [np.sqrt(2.0), 0.0]  # h = 0 exactly up to rounding
        h = self.theta.decision_values(np.array([x]))[0]
        assert abs(h) < 1e-12
        assert predict(self.theta, [0.0, np.sqrt(2.0)]) in (-1, 1)
        theta = SurfaceParams(np.array([2.0, 2.0, 0.0]), np.zeros(2), -1.0)
        assert predict(theta, [1.0, 0.0]) == 1  # h = 0 exactly

    def test_misclassified_implies_margin_violation(self, rng, small_cache, small_data):
        for _ in range(20):
            v = rng.normal(size=small_cache.d)
            theta = SurfaceParams.from_vector(v, small_cache.m)
            pred = predict_many(theta, small_data.points)
            F = margins(theta, small_cache)
            wrong = pred != small_data.labels
            assert np.all(F[wrong] > 0)
            lv = total_loss(theta, small_cache, lam=1.0)
            assert wrong.sum() <= lv.count
