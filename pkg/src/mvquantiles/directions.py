"""Planar direction grids and the cycle-sum statistic for monotonicity checks."""

import numpy as np

from ._validation import check_sample


def direction_grid(n_directions, dim=2):
    """Regular grid of unit directions on the circle.

    Parameters
    ----------
    n_directions : int
        Number of directions K, at least 3. Direction k points at angle
        2*pi*k/K for k = 0..K-1; contour polygons are invariant to the
        angular offset convention.
    dim : int
        Ambient dimension. Only dim=2 grids are produced; quantile
        operations themselves accept any dimension.

    Returns
    -------
    ndarray of shape (n_directions, 2)
        Unit vectors (cos, sin), angles strictly increasing in [0, 2*pi).
    """
    K = int(n_directions)
    if K < 3:
        raise ValueError(f"need at least 3 directions for a polygon, got {K}")
    if dim != 2:
        raise ValueError("direction grids are only defined for dim=2")
    angles = 2.0 * np.pi * np.arange(K) / K
    return np.column_stack([np.cos(angles), np.sin(angles)])


def cycle_sum(values, points):
    """Cycle sum sum_k (G(x_{k+1}) - G(x_k))' x_{k+1} with x_{m+1} = x_1.

    ``values`` holds G evaluated at each point of the cycle, in order.
    Nonnegative for every cycle exactly when G is cyclically monotone,
    i.e. the gradient of a convex function.

    Parameters
    ----------
    values : array-like of shape (m, d)
    points : array-like of shape (m, d)

    Returns
    -------
    float
    """
    values = check_sample(values)
    points = check_sample(points)
    if values.shape != points.shape:
        raise ValueError(
            f"values and points must have matching shapes, got {values.shape} "
            f"and {points.shape}"
        )
    if values.shape[0] < 2:
        raise ValueError("a cycle needs at least 2 points")
    nxt_values = np.roll(values, -1, axis=0)
    nxt_points = np.roll(points, -1, axis=0)
    return float(np.sum((nxt_values - values) * nxt_points))
