"""Quantile contour container and planar polygon utilities."""

from dataclasses import dataclass

import numpy as np

from ._validation import readonly

GEOMETRIC = "geometric"
CENTER_OUTWARD = "center-outward"


@dataclass(frozen=True)
class Contour:
    """Closed polygon of quantile points at one order, tagged by method.

    ``failed_directions`` lists direction indices whose solve did not
    converge (the best iterate is still used as the vertex), and
    ``ring_clamped`` flags transport contours whose order fell outside the
    grid's ring radii and was clamped to the nearest ring.
    """

    tau: float
    method: str
    vertices: np.ndarray
    closed: bool = True
    failed_directions: tuple = ()
    ring_clamped: bool = False

    def __post_init__(self):
        v = readonly(self.vertices)
        if v.ndim != 2:
            raise ValueError("contour vertices must form a (K, d) array")
        if self.closed and v.shape[0] < 3:
            raise ValueError("a closed contour needs at least 3 vertices")
        if not np.all(np.isfinite(v)):
            raise ValueError("contour vertices must be finite")
        object.__setattr__(self, "vertices", v)
        object.__setattr__(self, "failed_directions", tuple(self.failed_directions))

    @property
    def n_vertices(self):
        return self.vertices.shape[0]

    @property
    def is_partial(self):
        return len(self.failed_directions) > 0


def _edge_arrays(vertices):
    v = np.asarray(vertices, dtype=float)
    return v, np.roll(v, -1, axis=0)


def points_on_boundary(points, vertices, tol=None):
    """Boolean mask of points lying on a polygon edge within ``tol``."""
    pts = np.atleast_2d(np.asarray(points, dtype=float))
    a, b = _edge_arrays(vertices)
    if tol is None:
        tol = 1e-12 * max(1.0, float(np.abs(vertices).max()))
    on = np.zeros(pts.shape[0], dtype=bool)
    for k in range(a.shape[0]):
        e = b[k] - a[k]
        ee = float(e @ e)
        w = pts - a[k]
        if ee == 0.0:
            dist2 = np.einsum("ij,ij->i", w, w)
        else:
            t = np.clip((w @ e) / ee, 0.0, 1.0)
            proj = a[k] + t[:, None] * e
            dw = pts - proj
            dist2 = np.einsum("ij,ij->i", dw, dw)
        on |= dist2 <= tol * tol
    return on


def points_in_polygon(points, vertices, include_boundary=True):
    """Even-odd point-in-polygon test for a closed planar polygon.

    Points on an edge count as inside when ``include_boundary`` is set
    (the deterministic tie rule used for probability-content counts) and
    as outside otherwise (the strict test used for nestedness checks).

    Parameters
    ----------
    points : array-like of shape (m, 2) or (2,)
    vertices : array-like of shape (K, 2)
    include_boundary : bool

    Returns
    -------
    ndarray of bool, shape (m,), or a scalar bool for a single point
    """
    pts = np.asarray(points, dtype=float)
    single = pts.ndim == 1
    pts = np.atleast_2d(pts)
    a, b = _edge_arrays(vertices)
    px, py = pts[:, 0], pts[:, 1]
    inside = np.zeros(pts.shape[0], dtype=bool)
    for k in range(a.shape[0]):
        (x1, y1), (x2, y2) = a[k], b[k]
        if y1 == y2:
            continue
        crosses = (y1 > py) != (y2 > py)
        with np.errstate(invalid="ignore"):
            x_at = x1 + (py - y1) * (x2 - x1) / (y2 - y1)
        inside ^= crosses & (px < x_at)
    on = points_on_boundary(pts, vertices)
    inside = (inside | on) if include_boundary else (inside & ~on)
    return bool(inside[0]) if single else inside


def fraction_inside(points, vertices, include_boundary=True):
    """Fraction of points falling inside the polygon."""
    return float(np.mean(points_in_polygon(points, vertices, include_boundary)))


def turn_sines(vertices):
    """Normalized cross products of consecutive edges (sines of turn angles)."""
    v = np.asarray(vertices, dtype=float)
    e = np.roll(v, -1, axis=0) - v
    e_next = np.roll(e, -1, axis=0)
    cross = e[:, 0] * e_next[:, 1] - e[:, 1] * e_next[:, 0]
    norms = np.linalg.norm(e, axis=1) * np.linalg.norm(e_next, axis=1)
    with np.errstate(invalid="ignore", divide="ignore"):
        s = np.where(norms > 0, cross / norms, 0.0)
    return s


def reflex_vertex_count(vertices, tol=1e-9):
    """Number of reflex vertices (turns against the polygon's orientation)."""
    s = turn_sines(vertices)
    orientation = 1.0 if s.sum() >= 0 else -1.0
    return int(np.sum(orientation * s < -tol))


def is_convex(vertices, tol=1e-9):
    return reflex_vertex_count(vertices, tol=tol) == 0


def half_extents(vertices):
    """Half the bounding-box width and height of a planar polygon."""
    v = np.asarray(vertices, dtype=float)
    ext = (v.max(axis=0) - v.min(axis=0)) / 2.0
    return float(ext[0]), float(ext[1])
