from itertools import permutations

import numpy as np
import pytest
from scipy.stats import spearmanr
from sklearn.base import clone
from sklearn.exceptions import NotFittedError

from mvquantiles import (
    CenterOutwardQuantiles,
    center_outward_contour,
    center_outward_values,
    cycle_sum,
    empirical_center_outward_cdf,
    interpolated_center_outward_cdf,
    optimal_assignment,
    sample,
    spherical_grid,
    two_swap_margin,
)
from mvquantiles.distributions import STANDARD_GAUSSIAN, GaussianSpec
from mvquantiles.transport import SphericalGrid
from mvquantiles._validation import readonly


def rotation(theta):
    c, s = np.cos(theta), np.sin(theta)
    return np.array([[c, -s], [s, c]])


def rotated_grid(grid, O):
    return SphericalGrid(
        n_rings=grid.n_rings,
        n_sectors=grid.n_sectors,
        points=readonly(grid.points @ O.T),
        ring_radii=grid.ring_radii,
        sector_angles=grid.sector_angles,
    )


# ---------------------------------------------------------------------- grid


def test_small_grid_layout():
    g = spherical_grid(2, 4)
    assert g.n_points == 8
    np.testing.assert_allclose(sorted(set(np.round(np.linalg.norm(g.points, axis=1), 12))),
                               [1 / 3, 2 / 3])
    expected_first_ring = np.array([[1, 0], [0, 1], [-1, 0], [0, -1]]) / 3.0
    np.testing.assert_allclose(g.points[:4], expected_first_ring, atol=1e-15)


def test_benchmark_grid_sizes():
    assert spherical_grid(40, 60).n_points == 2400
    assert spherical_grid(20, 50).n_points == 1000


def test_grid_norms_in_open_ball():
    g = spherical_grid(5, 7)
    r = np.linalg.norm(g.points, axis=1)
    assert r.min() > 0 and r.max() < 1
    assert np.all(np.diff(g.ring_radii) > 0)


def test_grid_validation():
    with pytest.raises(ValueError):
        spherical_grid(0, 5)
    with pytest.raises(ValueError):
        spherical_grid(3, 2)


# ---------------------------------------------------------------- assignment


def test_perfect_match_has_zero_cost():
    g = spherical_grid(3, 5)
    rng = np.random.Generator(np.random.Philox(0))
    perm = rng.permutation(g.n_points)
    a = optimal_assignment(g.points[perm], g)
    assert a.cost == pytest.approx(0.0, abs=1e-15)
    np.testing.assert_allclose(center_outward_values(a, g), g.points[perm])


def test_assignment_matches_brute_force():
    g = spherical_grid(2, 3)
    rng = np.random.Generator(np.random.Philox(1))
    perms = np.array(list(permutations(range(6))))
    for _ in range(20):
        X = rng.normal(size=(6, 2))
        a = optimal_assignment(X, g)
        C = ((X[:, None, :] - g.points[None, :, :]) ** 2).sum(-1)
        best = C[np.arange(6)[None, :], perms].sum(1).min()
        assert a.cost == pytest.approx(best, abs=1e-12)


def test_assignment_is_bijective_and_two_swap_optimal():
    g = spherical_grid(10, 20)
    X = sample(STANDARD_GAUSSIAN, 200, 2).points
    a = optimal_assignment(X, g)
    assert np.array_equal(np.sort(a.to_grid), np.arange(200))
    assert np.array_equal(a.to_grid[a.to_sample], np.arange(200))
    assert two_swap_margin(X, g, a) >= -1e-9


def test_assignment_size_mismatch():
    g = spherical_grid(2, 4)
    with pytest.raises(ValueError):
        optimal_assignment(np.zeros((5, 2)), g)


# -------------------------------------------------------- distribution values


def test_empirical_cdf_norms_cover_each_ring():
    g = spherical_grid(6, 10)
    X = sample(STANDARD_GAUSSIAN, 60, 3).points
    a = optimal_assignment(X, g)
    norms = np.sort(np.linalg.norm(center_outward_values(a, g), axis=1))
    expected = np.sort(np.repeat(g.ring_radii, g.n_sectors))
    np.testing.assert_allclose(norms, expected, atol=1e-12)


def test_empirical_cdf_single_lookup():
    g = spherical_grid(2, 4)
    X = g.points.copy()
    a = optimal_assignment(X, g)
    np.testing.assert_allclose(empirical_center_outward_cdf(a, g, 3), X[3])
    with pytest.raises(IndexError):
        empirical_center_outward_cdf(a, g, 8)


def test_ranks_track_sample_radii_and_two_swap_optimality():
    X = sample(STANDARD_GAUSSIAN, 2400, 4).points
    cow = CenterOutwardQuantiles(40, 60).fit(X)
    rho = spearmanr(np.linalg.norm(X, axis=1),
                    np.linalg.norm(cow.values_, axis=1)).statistic
    assert rho > 0.95
    # pairwise-exchange audit over all pairs at benchmark size
    assert two_swap_margin(X, cow.grid_, cow.assignment_) >= -1e-9


def test_region_counts_exact_between_rings():
    # with tau strictly between rings, the region holds whole rings:
    # floor(tau * (n_rings + 1)) * n_sectors points
    X = sample(GaussianSpec(cov=((2.0, 1.0), (1.0, 1.0))), 200, 18).points
    cow = CenterOutwardQuantiles(10, 20).fit(X)
    radii = np.linalg.norm(cow.values_, axis=1)
    for tau in (0.37, 0.5, 0.83):
        expected = int(np.floor(tau * 11)) * 20
        assert int((radii < tau).sum()) == expected


# -------------------------------------------------------------- interpolation


def test_interpolation_exact_at_sample_points():
    g = spherical_grid(5, 8)
    X = sample(STANDARD_GAUSSIAN, 40, 5).points
    a = optimal_assignment(X, g)
    vals = center_outward_values(a, g)
    for k in (0, 7, 39):
        np.testing.assert_allclose(
            interpolated_center_outward_cdf(a, g, X, X[k], n_neighbors=1), vals[k])
        np.testing.assert_allclose(
            interpolated_center_outward_cdf(a, g, X, X[k], n_neighbors=5), vals[k])


def test_interpolation_far_field_approaches_grid_barycenter():
    g = spherical_grid(5, 8)
    X = sample(STANDARD_GAUSSIAN, 40, 6).points
    a = optimal_assignment(X, g)
    far = interpolated_center_outward_cdf(a, g, X, [1e6, 1e6], n_neighbors=40)
    assert np.linalg.norm(far) < 1e-3


def test_interpolation_stays_in_unit_ball():
    g = spherical_grid(5, 8)
    X = sample(STANDARD_GAUSSIAN, 40, 7).points
    a = optimal_assignment(X, g)
    rng = np.random.Generator(np.random.Philox(8))
    Z = rng.normal(size=(300, 2), scale=4)
    out = interpolated_center_outward_cdf(a, g, X, Z)
    assert np.linalg.norm(out, axis=1).max() <= 1 + 1e-12


def test_interpolation_accuracy_against_analytic_map():
    from mvquantiles import analytic_center_outward_cdf

    X = sample(STANDARD_GAUSSIAN, 2400, 0).points
    cow = CenterOutwardQuantiles(40, 60, n_neighbors=8).fit(X)
    Z = sample(STANDARD_GAUSSIAN, 200, 10_000).points
    err = np.linalg.norm(cow.transform(Z) - analytic_center_outward_cdf(Z), axis=1)
    assert err.max() < 0.12


# ------------------------------------------------------------------- contour


def test_contour_exact_at_ring_radius():
    g = spherical_grid(4, 12)
    X = sample(STANDARD_GAUSSIAN, 48, 9).points
    a = optimal_assignment(X, g)
    inv = a.to_sample
    tau = 2 / 5  # exactly the second of four rings
    from mvquantiles import direction_grid

    c = center_outward_contour(a, g, X, tau, directions=direction_grid(4))
    assert not c.ring_clamped
    np.testing.assert_allclose(c.vertices[0], X[inv[1 * 12 + 0]])
    np.testing.assert_allclose(c.vertices[1], X[inv[1 * 12 + 3]])
    np.testing.assert_allclose(c.vertices[2], X[inv[1 * 12 + 6]])


def test_contour_interpolates_between_rings():
    g = spherical_grid(4, 12)
    X = sample(STANDARD_GAUSSIAN, 48, 10).points
    a = optimal_assignment(X, g)
    inv = a.to_sample
    tau = 0.5  # halfway between rings 2 and 3 (radii 2/5 and 3/5)
    from mvquantiles import direction_grid

    c = center_outward_contour(a, g, X, tau, directions=direction_grid(4))
    lo, hi = X[inv[1 * 12 + 0]], X[inv[2 * 12 + 0]]
    np.testing.assert_allclose(c.vertices[0], (lo + hi) / 2)


def test_contour_clamps_outside_ring_range():
    g = spherical_grid(4, 12)
    X = sample(STANDARD_GAUSSIAN, 48, 11).points
    a = optimal_assignment(X, g)
    from mvquantiles import direction_grid

    dirs = direction_grid(4)
    low = center_outward_contour(a, g, X, 0.05, directions=dirs)
    high = center_outward_contour(a, g, X, 0.95, directions=dirs)
    assert low.ring_clamped and high.ring_clamped
    mid = center_outward_contour(a, g, X, 0.5, directions=dirs)
    assert not mid.ring_clamped
    with pytest.raises(ValueError):
        center_outward_contour(a, g, X, 0.0)


def test_cyclical_monotonicity_of_coupled_map():
    X = sample(GaussianSpec(cov=((2.0, 1.0), (1.0, 1.0))), 200, 12).points
    cow = CenterOutwardQuantiles(10, 20).fit(X)
    rng = np.random.Generator(np.random.Philox(13))
    for _ in range(500):
        m = int(rng.integers(2, 6))
        idx = rng.choice(200, size=m, replace=False)
        assert cycle_sum(cow.values_[idx], X[idx]) >= -1e-9


def test_rotation_equivariance_of_coupling():
    X = sample(GaussianSpec(cov=((2.0, 1.0), (1.0, 1.0))), 200, 14).points
    g = spherical_grid(10, 20)
    a = optimal_assignment(X, g)
    O = rotation(1.1)
    a_rot = optimal_assignment(X @ O.T, rotated_grid(g, O))
    assert a_rot.cost == pytest.approx(a.cost, abs=1e-9)
    np.testing.assert_allclose(
        center_outward_values(a_rot, rotated_grid(g, O)),
        center_outward_values(a, g) @ O.T, atol=1e-8)


def test_sector_shift_equivariance():
    X = sample(GaussianSpec(cov=((2.0, 1.0), (1.0, 1.0))), 200, 15).points
    g = spherical_grid(10, 20)
    O = rotation(2 * np.pi / 20)
    a = optimal_assignment(X, g)
    a_rot = optimal_assignment(X @ O.T, g)  # grid invariant under sector shift
    assert a_rot.cost == pytest.approx(a.cost, abs=1e-9)
    np.testing.assert_allclose(center_outward_values(a_rot, g),
                               center_outward_values(a, g) @ O.T, atol=1e-8)


def test_contours_nested_for_spherical_sample():
    from mvquantiles import points_in_polygon

    X = sample(STANDARD_GAUSSIAN, 600, 16).points
    cow = CenterOutwardQuantiles(20, 30).fit(X)
    inner = cow.contour(0.3)
    outer = cow.contour(0.7)
    assert points_in_polygon(inner.vertices, outer.vertices,
                             include_boundary=False).all()


# ----------------------------------------------------------------- estimator


def test_estimator_api():
    X = sample(STANDARD_GAUSSIAN, 60, 17).points
    est = CenterOutwardQuantiles(6, 10, n_neighbors=4)
    assert est.get_params() == {"n_rings": 6, "n_sectors": 10, "n_neighbors": 4}
    est.fit(X)
    assert est.cost_ > 0
    assert est.values_.shape == (60, 2)
    c = est.contour(0.5)
    assert c.method == "center-outward"
    assert c.n_vertices == 70
    cloned = clone(est)
    with pytest.raises(NotFittedError):
        cloned.transform(X[:2])
    with pytest.raises(ValueError):
        CenterOutwardQuantiles(6, 9).fit(X)  # 54 != 60
    with pytest.raises(ValueError):
        CenterOutwardQuantiles(6, 10).fit(np.zeros((60, 3)))
