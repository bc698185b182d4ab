"""Structural properties of the empirical geometric distribution function:
monotonicity, cyclical monotonicity, inversion, equivariance, nestedness,
the univariate reduction, and uniform convergence."""

import numpy as np
import pytest

from mvquantiles import (
    GeometricQuantiles,
    check_function,
    cycle_sum,
    geometric_cdf,
    geometric_objective,
    geometric_quantile,
    points_in_polygon,
    sample,
)
from mvquantiles.distributions import STANDARD_GAUSSIAN, GaussianSpec


def rotation(theta):
    c, s = np.cos(theta), np.sin(theta)
    return np.array([[c, -s], [s, c]])


def test_monotone_over_random_pairs():
    X = sample(GaussianSpec(cov=((2.0, 1.0), (1.0, 1.0))), 100, 0).points
    rng = np.random.Generator(np.random.Philox(10))
    Z1 = rng.normal(size=(1000, 2), scale=3)
    Z2 = rng.normal(size=(1000, 2), scale=3)
    F1, F2 = geometric_cdf(X, Z1), geometric_cdf(X, Z2)
    inner = np.einsum("ij,ij->i", F2 - F1, Z2 - Z1)
    assert inner.min() >= -1e-9


def test_cyclically_monotone_over_random_cycles():
    X = sample(STANDARD_GAUSSIAN, 100, 1).points
    rng = np.random.Generator(np.random.Philox(11))
    for _ in range(1000):
        m = int(rng.integers(2, 6))
        pts = rng.normal(size=(m, 2), scale=2.5)
        assert cycle_sum(geometric_cdf(X, pts), pts) >= -1e-9


def test_quantile_inverts_distribution_function():
    X = sample(STANDARD_GAUSSIAN, 500, 2).points
    u = np.array([0.6, 0.8])
    for tau in np.arange(0.1, 0.95, 0.1):
        res = geometric_quantile(X, tau, u)
        assert np.linalg.norm(geometric_cdf(X, res.point) - tau * u) <= 1e-8


def test_quantile_equivariance_under_rotation_and_shift():
    X = sample(GaussianSpec(cov=((2.0, 1.0), (1.0, 1.0))), 300, 3).points
    rng = np.random.Generator(np.random.Philox(12))
    tol = 1e-8
    for _ in range(5):
        O = rotation(rng.uniform(0, 2 * np.pi))
        shift = rng.normal(size=2)
        for tau in (0.25, 0.5, 0.75):
            u = rng.normal(size=2)
            u /= np.linalg.norm(u)
            base = geometric_quantile(X, tau, u, tol=tol)
            moved = geometric_quantile(shift + X @ O.T, tau, O @ u, tol=tol)
            dev = np.linalg.norm(moved.point - (shift + O @ base.point))
            assert dev <= 10 * tol


def test_contour_equivariance():
    from mvquantiles import direction_grid

    X = sample(GaussianSpec(cov=((2.0, 1.0), (1.0, 1.0))), 200, 4).points
    O = rotation(0.7)
    shift = np.array([1.5, -0.5])
    dirs = direction_grid(8)
    base = GeometricQuantiles().fit(X).contour(0.5, directions=dirs)
    moved = GeometricQuantiles().fit(shift + X @ O.T).contour(0.5, directions=dirs @ O.T)
    np.testing.assert_allclose(moved.vertices, shift + base.vertices @ O.T, atol=1e-7)


def test_contours_strictly_nested():
    X = sample(GaussianSpec(cov=((2.0, 1.0), (1.0, 1.0))), 400, 5).points
    est = GeometricQuantiles().fit(X)
    c_in = est.contour(0.2)
    c_mid = est.contour(0.5)
    c_out = est.contour(0.8)
    assert points_in_polygon(c_in.vertices, c_mid.vertices, include_boundary=False).all()
    assert points_in_polygon(c_mid.vertices, c_out.vertices, include_boundary=False).all()


def test_univariate_reduction_objective_match():
    rng = np.random.Generator(np.random.Philox(13))
    for _ in range(10):
        X = rng.normal(size=int(rng.integers(5, 60)), scale=2.0)
        beta = float(rng.uniform(-0.8, 0.8))
        u = np.array([1.0 if beta >= 0 else -1.0])
        tau = abs(beta)
        res = geometric_quantile(X, tau, u)
        solved = geometric_objective(X, res.point, tau, u)
        zs = np.linspace(X.min() - 1, X.max() + 1, 4001)[:, None]
        oracle = min(
            float(geometric_objective(X, zs, tau, u).min()),
            float(geometric_objective(X, X[:, None], tau, u).min()),
        )
        assert solved == pytest.approx(oracle, abs=1e-6)


def test_check_function_objective_identity():
    # mean of rho_alpha(X - theta) - rho_alpha(X) equals the direction-form
    # objective at beta = 2*alpha - 1, whose minimizers are the
    # alpha-quantiles
    rng = np.random.Generator(np.random.Philox(14))
    X = rng.normal(size=40, scale=1.5)
    for alpha in (0.1, 0.35, 0.5, 0.8):
        beta = 2 * alpha - 1
        u = np.array([1.0 if beta >= 0 else -1.0])
        for theta in rng.normal(size=5, scale=2.0):
            via_check = np.mean(check_function(X - theta, alpha) - check_function(X, alpha))
            via_objective = geometric_objective(X, [theta], abs(beta), u)
            assert via_check == pytest.approx(via_objective, rel=1e-12, abs=1e-12)


def test_check_loss_minimizer_is_alpha_quantile():
    # direct check that minimizing the expected check loss recovers the
    # usual sample quantile convention
    rng = np.random.Generator(np.random.Philox(15))
    X = np.sort(rng.normal(size=101, scale=2.0))
    thetas = np.linspace(X.min() - 1, X.max() + 1, 20001)
    for alpha in (0.1, 0.5, 0.9):
        losses = np.mean(check_function(X[None, :] - thetas[:, None], alpha), axis=1)
        theta_star = thetas[np.argmin(losses)]
        assert abs(theta_star - np.quantile(X, alpha)) < 2e-3


def test_uniform_convergence_to_larger_sample():
    # sup distance to a 10x-sample evaluation shrinks along the ladder
    Z = sample(STANDARD_GAUSSIAN, 200, 555).points
    errs = []
    for i, n in enumerate((300, 1200, 4800)):
        Xn = sample(STANDARD_GAUSSIAN, n, i).points
        Xref = sample(STANDARD_GAUSSIAN, 10 * n, 50 + i).points
        errs.append(
            np.linalg.norm(geometric_cdf(Xn, Z) - geometric_cdf(Xref, Z), axis=1).max()
        )
    assert errs[0] > errs[1] > errs[2]
