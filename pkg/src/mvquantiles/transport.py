"""Discrete center-outward distribution and quantile functions via the
optimal least-squares coupling between a sample and a polar grid.

The coupling is the exact minimizer of the total squared distance between
sample points and the grid discretizing the spherical uniform on the
punctured unit ball; the grid point coupled to an observation is its
empirical center-outward distribution value, whose norm is the rank radius
and whose direction is the sign.
"""

from dataclasses import dataclass

import numpy as np
from scipy.optimize import linear_sum_assignment
from scipy.spatial import cKDTree
from scipy.spatial.distance import cdist
from sklearn.base import BaseEstimator
from sklearn.utils.validation import check_is_fitted

from ._validation import check_order, check_sample, readonly
from .contours import CENTER_OUTWARD, Contour
from .directions import direction_grid


@dataclass(frozen=True)
class SphericalGrid:
    """Regular polar grid of n_rings * n_sectors points in the punctured
    unit ball: radius i/(n_rings + 1) at angle 2*pi*j/n_sectors."""

    n_rings: int
    n_sectors: int
    points: np.ndarray
    ring_radii: np.ndarray
    sector_angles: np.ndarray

    @property
    def n_points(self):
        return self.points.shape[0]


def spherical_grid(n_rings, n_sectors):
    """Build the regular polar grid, ring-major ordering.

    Parameters
    ----------
    n_rings : int, at least 1
    n_sectors : int, at least 3
    """
    n_rings, n_sectors = int(n_rings), int(n_sectors)
    if n_rings < 1:
        raise ValueError(f"need at least one ring, got {n_rings}")
    if n_sectors < 3:
        raise ValueError(f"need at least 3 sectors, got {n_sectors}")
    radii = np.arange(1, n_rings + 1) / (n_rings + 1)
    angles = 2.0 * np.pi * np.arange(n_sectors) / n_sectors
    circle = np.column_stack([np.cos(angles), np.sin(angles)])
    points = (radii[:, None, None] * circle[None, :, :]).reshape(-1, 2)
    return SphericalGrid(
        n_rings=n_rings,
        n_sectors=n_sectors,
        points=readonly(points),
        ring_radii=readonly(radii),
        sector_angles=readonly(angles),
    )


@dataclass(frozen=True)
class Assignment:
    """Bijection sample index -> grid index minimizing total squared distance."""

    to_grid: np.ndarray
    cost: float

    def __post_init__(self):
        to_grid = np.array(self.to_grid, dtype=np.intp)
        to_grid.setflags(write=False)
        object.__setattr__(self, "to_grid", to_grid)
        object.__setattr__(self, "cost", float(self.cost))

    @property
    def to_sample(self):
        """Inverse permutation, grid index -> sample index."""
        inv = np.empty(self.to_grid.shape[0], dtype=np.intp)
        inv[self.to_grid] = np.arange(self.to_grid.shape[0])
        return inv


def optimal_assignment(X, grid):
    """Exact least-squares coupling between the sample and the grid.

    Solved as a linear sum assignment over the squared-distance cost
    matrix (shortest augmenting path solver), never a heuristic: the
    cyclical monotonicity of the coupled map is only guaranteed at the
    exact optimum.

    Parameters
    ----------
    X : array-like of shape (n, 2)
        Sample with n equal to the grid size.
    grid : SphericalGrid

    Returns
    -------
    Assignment
    """
    X = check_sample(X)
    if X.shape[0] != grid.n_points:
        raise ValueError(
            f"sample size {X.shape[0]} must equal the grid size "
            f"{grid.n_points} (= n_rings * n_sectors)"
        )
    if X.shape[1] != grid.points.shape[1]:
        raise ValueError("dimension mismatch between sample and grid")
    cost = cdist(X, grid.points, "sqeuclidean")
    rows, cols = linear_sum_assignment(cost)
    return Assignment(to_grid=cols, cost=cost[rows, cols].sum())


def center_outward_values(assignment, grid):
    """Grid values of the empirical center-outward distribution function,
    one row per sample point."""
    return grid.points[assignment.to_grid]


def empirical_center_outward_cdf(assignment, grid, k):
    """The grid point coupled to sample point k."""
    n = assignment.to_grid.shape[0]
    k = int(k)
    if not 0 <= k < n:
        raise IndexError(f"sample index {k} out of range [0, {n})")
    return grid.points[assignment.to_grid[k]]


def two_swap_margin(X, grid, assignment):
    """Smallest cost change over all pairwise exchanges of grid targets.

    Nonnegative (up to arithmetic noise) for an optimal coupling; a clearly
    negative margin certifies suboptimality.
    """
    X = check_sample(X)
    targets = center_outward_values(assignment, grid)
    # D[k, l]: cost of sending sample k to the grid point currently owned by l
    D = cdist(X, targets, "sqeuclidean")
    own = np.diag(D)
    gain = D + D.T - own[:, None] - own[None, :]
    np.fill_diagonal(gain, np.inf)
    return float(gain.min())


def _interpolate(tree, values, Z, n_neighbors):
    single = np.asarray(Z).ndim == 1
    Z = np.atleast_2d(np.asarray(Z, dtype=float))
    m = min(int(n_neighbors), values.shape[0])
    if m < 1:
        raise ValueError("need at least one neighbor")
    dist, idx = tree.query(Z, k=m)
    dist = np.atleast_2d(dist.reshape(Z.shape[0], m))
    idx = idx.reshape(Z.shape[0], m)
    exact = dist[:, 0] <= 1e-12
    with np.errstate(divide="ignore"):
        w = 1.0 / dist**2
    w[exact] = 0.0
    w[exact, 0] = 1.0
    out = np.einsum("ij,ijk->ik", w, values[idx]) / w.sum(axis=1)[:, None]
    norms = np.linalg.norm(out, axis=1)
    over = norms > 1.0
    out[over] /= norms[over, None]
    return out[0] if single else out


def interpolated_center_outward_cdf(assignment, grid, X, Z, n_neighbors=8):
    """Continuous stand-in for the discrete center-outward map.

    Inverse-squared-distance average of the grid values coupled to the
    ``n_neighbors`` sample points nearest to each query, clamped to the
    closed unit ball; reproduces the discrete value exactly at sample
    points.

    Parameters
    ----------
    assignment : Assignment
    grid : SphericalGrid
    X : array-like of shape (n, 2)
        The sample the coupling was computed from.
    Z : array-like of shape (m, 2) or (2,)
    n_neighbors : int
    """
    X = check_sample(X)
    values = center_outward_values(assignment, grid)
    return _interpolate(cKDTree(X), values, Z, n_neighbors)


def _bracket_rings(tau, n_rings):
    """Rings (lo, hi), interpolation weight on hi, and a clamp flag."""
    t = tau * (n_rings + 1)
    if t < 1.0:
        return 1, 1, 0.0, True
    if t >= n_rings:
        return n_rings, n_rings, 0.0, t > n_rings
    lo = int(np.floor(t))
    frac = t - lo
    if frac == 0.0:
        return lo, lo, 0.0, False
    return lo, lo + 1, frac, False


def center_outward_contour(assignment, grid, X, tau, directions=None):
    """Center-outward quantile contour at order tau from the coupling.

    For each direction, the two grid rings bracketing tau are located, the
    sample point coupled to the angularly nearest node on each ring is
    looked up, and the vertex interpolates the two sample points linearly
    in the ring radius. Orders outside the ring range are clamped to the
    nearest ring and flagged.

    Parameters
    ----------
    assignment : Assignment
    grid : SphericalGrid
    X : array-like of shape (n, 2)
    tau : float in (0, 1)
    directions : ndarray of shape (K, 2), unit rows, or None (70 directions)

    Returns
    -------
    Contour
    """
    X = check_sample(X)
    tau = check_order(tau)
    if tau == 0.0:
        raise ValueError("center-outward contours need an order in (0, 1)")
    if directions is None:
        directions = direction_grid(70)
    directions = np.atleast_2d(np.asarray(directions, dtype=float))
    inv = assignment.to_sample
    n_s = grid.n_sectors
    lo, hi, frac, clamped = _bracket_rings(tau, grid.n_rings)
    angles = np.mod(np.arctan2(directions[:, 1], directions[:, 0]), 2.0 * np.pi)
    # nearest sector node: angles are equally spaced, so round the index
    sector = np.mod(np.round(angles / (2.0 * np.pi / n_s)).astype(int), n_s)
    v_lo = X[inv[(lo - 1) * n_s + sector]]
    v_hi = X[inv[(hi - 1) * n_s + sector]]
    vertices = (1.0 - frac) * v_lo + frac * v_hi
    return Contour(tau=tau, method=CENTER_OUTWARD, vertices=vertices,
                   ring_clamped=clamped)


class CenterOutwardQuantiles(BaseEstimator):
    """Center-outward ranks, signs, and quantile contours of a planar sample.

    ``fit`` solves the exact least-squares coupling between the sample and
    a regular polar grid of ``n_rings * n_sectors`` points (which must
    equal the sample size). The coupled grid values give the empirical
    center-outward distribution function; ``transform`` interpolates it off
    the sample.

    Parameters
    ----------
    n_rings, n_sectors : int
        Grid shape; the sample size must equal ``n_rings * n_sectors``.
    n_neighbors : int
        Neighbors used by the interpolated map.

    Attributes
    ----------
    grid_ : SphericalGrid
    assignment_ : Assignment
    values_ : ndarray of shape (n_samples, 2)
        Center-outward distribution value coupled to each sample point.
    cost_ : float
        Total squared distance of the optimal coupling.
    """

    def __init__(self, n_rings, n_sectors, n_neighbors=8):
        self.n_rings = n_rings
        self.n_sectors = n_sectors
        self.n_neighbors = n_neighbors

    def fit(self, X, y=None):
        X = check_sample(X)
        if X.shape[1] != 2:
            raise ValueError("center-outward grids are planar; expected 2-d data")
        grid = spherical_grid(self.n_rings, self.n_sectors)
        self.grid_ = grid
        self.assignment_ = optimal_assignment(X, grid)
        self.X_ = readonly(X)
        self.n_samples_, self.n_features_ = X.shape
        self.values_ = readonly(center_outward_values(self.assignment_, grid))
        self.cost_ = self.assignment_.cost
        self._tree = cKDTree(X)
        return self

    def transform(self, Z):
        """Interpolated center-outward distribution function at each row of Z."""
        check_is_fitted(self, "values_")
        Z = check_sample(Z)
        if Z.shape[1] != self.n_features_:
            raise ValueError("dimension mismatch with the fitted sample")
        return _interpolate(self._tree, np.asarray(self.values_), Z, self.n_neighbors)

    def contour(self, tau, directions=None):
        check_is_fitted(self, "values_")
        return center_outward_contour(
            self.assignment_, self.grid_, self.X_, tau, directions=directions
        )
