"""Empirical geometric quantiles, their distribution function, and
probability-content relabeling.

The geometric quantile of order tau in direction u minimizes the convex map
z -> mean_i(|z - X_i| - |X_i|) - tau * u'z over R^d (norms Euclidean). Its
first-order condition equates the empirical geometric distribution function
F(z) = mean_i (z - X_i)/|z - X_i| with tau * u.
"""

import math
from dataclasses import dataclass

import numpy as np
from sklearn.base import BaseEstimator
from sklearn.utils.validation import check_is_fitted

from ._validation import check_direction, check_order, check_sample, readonly
from .contours import GEOMETRIC, Contour
from .directions import direction_grid
from .exceptions import DegenerateSampleError, SolverConvergenceError

COLLISION_EPS = 1e-12
_STALL_WINDOW = 50
_STALL_FACTOR = 0.5
_CHUNK_PAIRS = 2_000_000


def check_function(z, alpha):
    """Univariate check loss |z| + (2*alpha - 1)*z for alpha in [0, 1)."""
    alpha = check_order(alpha)
    z = np.asarray(z, dtype=float)
    return np.abs(z) + (2.0 * alpha - 1.0) * z


def geometric_objective(X, z, tau, u):
    """Value of the geometric quantile objective at z (or at each row of z).

    Parameters
    ----------
    X : array-like of shape (n, d)
    z : array-like of shape (d,) or (m, d)
    tau : float in [0, 1)
    u : array-like of shape (d,), unit norm

    Returns
    -------
    float or ndarray of shape (m,)
    """
    X = check_sample(X)
    tau = check_order(tau)
    u = check_direction(u, dim=X.shape[1])
    z = np.asarray(z, dtype=float)
    single = z.ndim <= 1
    Z = np.atleast_2d(np.asarray(z, dtype=float))
    if Z.shape[1] != X.shape[1]:
        raise ValueError("dimension mismatch between z and the sample")
    base = float(np.linalg.norm(X, axis=1).mean())
    out = np.empty(Z.shape[0])
    chunk = max(1, _CHUNK_PAIRS // X.shape[0])
    for i0 in range(0, Z.shape[0], chunk):
        block = Z[i0 : i0 + chunk]
        dist = np.linalg.norm(block[:, None, :] - X[None, :, :], axis=2)
        out[i0 : i0 + chunk] = dist.mean(axis=1)
    out -= base + tau * (Z @ u)
    return float(out[0]) if single else out


def geometric_cdf(X, z):
    """Empirical geometric distribution function mean_i (z - X_i)/|z - X_i|.

    Sample points equal to z contribute nothing to the average (the mean
    still divides by n), so the value always has norm at most 1.

    Parameters
    ----------
    X : array-like of shape (n, d)
    z : array-like of shape (d,) or (m, d)

    Returns
    -------
    ndarray of shape (d,) or (m, d)
    """
    X = check_sample(X)
    z = np.asarray(z, dtype=float)
    single = z.ndim <= 1
    Z = np.atleast_2d(z)
    if Z.shape[1] != X.shape[1]:
        raise ValueError("dimension mismatch between z and the sample")
    n = X.shape[0]
    out = np.empty_like(Z)
    chunk = max(1, _CHUNK_PAIRS // n)
    for i0 in range(0, Z.shape[0], chunk):
        block = Z[i0 : i0 + chunk]
        diff = block[:, None, :] - X[None, :, :]
        dist = np.linalg.norm(diff, axis=2)
        # coincident sample points contribute a zero vector, not 0/0
        safe = np.where(dist > 0.0, dist, 1.0)
        out[i0 : i0 + chunk] = (diff / safe[:, :, None]).sum(axis=1) / n
    return out[0] if single else out


@dataclass(frozen=True)
class GeometricQuantileResult:
    """Solver output: the quantile point plus convergence diagnostics.

    ``gradient_norm`` is |F(point) - tau*u|. When the minimizer sits exactly
    on a sample point the distribution function jumps there, so optimality is
    certified through the subgradient condition instead and the reported
    gradient norm may legitimately exceed the tolerance (it is at most 1/n);
    ``at_sample_point`` marks that case.
    """

    point: np.ndarray
    order: float
    direction: np.ndarray
    gradient_norm: float
    iterations: int
    converged: bool = True
    at_sample_point: bool = False


def _check_spanning(X):
    # Uniqueness needs the sample to span at least a plane for d >= 2.
    n, d = X.shape
    if d < 2:
        return
    s = np.linalg.svd(X - X.mean(axis=0), compute_uv=False)
    rank = int(np.sum(s > s[0] * max(n, d) * np.finfo(float).eps)) if s.size else 0
    if rank < 2:
        raise DegenerateSampleError(
            "sample is concentrated on a single line; geometric quantiles are not unique"
        )


def _pull_residual(X, target, mask):
    """Residual pull R = sum_{i not colliding} (x - X_i)/|x - X_i| - n*target
    at the sample location marked by ``mask``; x optimal iff |R| <= #colliding."""
    n = X.shape[0]
    x = X[mask][0]
    diff = x - X[~mask]
    dist = np.linalg.norm(diff, axis=1)
    R = (diff / dist[:, None]).sum(axis=0) - n * target
    return R, x


def _newton_direction(X, target, z):
    diff = z - X
    dist = np.linalg.norm(diff, axis=1)
    n, d = X.shape
    E = diff / dist[:, None]
    g = E.sum(axis=0) / n - target
    H = np.eye(d) * float(np.mean(1.0 / dist)) - (E / dist[:, None]).T @ E / n
    try:
        s = np.linalg.solve(H, -g)
        if not np.all(np.isfinite(s)) or float(s @ g) >= 0.0:
            s = -g
    except np.linalg.LinAlgError:
        s = -g
    return g, s, float(dist.min())


def _newton_burst(X, target, z, gtol, budget):
    """Damped Newton descent on the objective; returns (z_best, gn_best, used)."""

    def obj(p):
        return float(np.linalg.norm(p - X, axis=1).mean() - target @ p)

    z_best, gn_best = z, np.inf
    used = 0
    for _ in range(budget):
        used += 1
        g, s, dmin = _newton_direction(X, target, z)
        gn = float(np.linalg.norm(g))
        if gn < gn_best:
            z_best, gn_best = z.copy(), gn
        if gn <= gtol or dmin <= 1e-9 * (1.0 + float(np.linalg.norm(z))):
            break
        o0 = obj(z)
        gs = float(g @ s)
        t = 1.0
        while obj(z + t * s) > o0 + 1e-4 * t * gs:
            t *= 0.5
            if t < 1e-14:
                break
        if t < 1e-14:
            break
        z = z + t * s
    return z_best, gn_best, used


def geometric_quantile(X, tau, u=None, tol=1e-8, max_iter=10_000, raise_on_failure=True):
    """Geometric quantile of order tau in direction u of the sample X.

    Damped Weiszfeld fixed-point iteration with a Vardi-Zhang style
    correction when an iterate collides with a sample point, switching to
    guarded Newton descent on the convex objective when the fixed point
    stalls (the fixed-point contraction degrades like tau near 1).

    Parameters
    ----------
    X : array-like of shape (n, d)
        Sample; must not be concentrated on a single line when d >= 2.
    tau : float in [0, 1)
    u : array-like of shape (d,), unit norm, or None
        Direction; may be omitted only for tau = 0 (the geometric median).
    tol : float
        Convergence tolerance on |F(z) - tau*u|.
    max_iter : int
    raise_on_failure : bool
        Raise SolverConvergenceError on non-convergence instead of returning
        the best iterate with ``converged=False``.

    Returns
    -------
    GeometricQuantileResult
    """
    X = check_sample(X)
    n, d = X.shape
    tau = check_order(tau)
    if u is None:
        if tau > 0.0:
            raise ValueError("a direction is required for tau > 0")
        u = np.zeros(d)
        u[0] = 1.0
    else:
        u = check_direction(u, dim=d)
    _check_spanning(X)
    target = tau * u

    def result(point, gn, iters, converged, at_sample):
        return GeometricQuantileResult(
            point=readonly(point),
            order=tau,
            direction=readonly(u),
            gradient_norm=float(gn),
            iterations=iters,
            converged=converged,
            at_sample_point=at_sample,
        )

    def sample_point_check(z):
        # Subgradient optimality test at the sample point nearest to z
        # (grouping exact duplicates of that point).
        j = int(np.argmin(np.linalg.norm(z - X, axis=1)))
        mask = np.linalg.norm(X - X[j], axis=1) <= COLLISION_EPS
        R, x = _pull_residual(X, target, mask)
        ok = float(np.linalg.norm(R)) <= mask.sum() + 1e-9
        return ok, x, float(np.linalg.norm(R)) / n

    z = np.median(X, axis=0)
    lam = 1.0
    prev_step = None
    hist = []
    best_gn, best_z, best_at = np.inf, z.copy(), False
    it = 0
    while it < max_iter:
        it += 1
        diff = z - X
        dist = np.linalg.norm(diff, axis=1)
        colliding = dist <= COLLISION_EPS
        if colliding.any():
            eta = int(colliding.sum())
            R, x = _pull_residual(X, target, colliding)
            rnorm = float(np.linalg.norm(R))
            gn = rnorm / n
            if gn < best_gn:
                best_gn, best_z, best_at = gn, x.copy(), True
            if rnorm <= eta + 1e-9:
                return result(x, gn, it, True, True)
            w = 1.0 / dist[~colliding]
            T = ((X[~colliding] * w[:, None]).sum(axis=0) + n * target) / w.sum()
            z = (1.0 - eta / rnorm) * T + (eta / rnorm) * x
            prev_step = None
            hist.clear()
            continue
        F = (diff / dist[:, None]).sum(axis=0) / n
        g = F - target
        gn = float(np.linalg.norm(g))
        if gn < best_gn:
            best_gn, best_z, best_at = gn, z.copy(), False
        if gn <= tol:
            z2, gn2, used = _newton_burst(X, target, z, min(tol * 1e-4, 1e-11), 5)
            it += used
            if gn2 < gn:
                z, gn = z2, gn2
            return result(z, gn, it, True, False)
        hist.append(gn)
        if len(hist) > _STALL_WINDOW and hist[-1] > _STALL_FACTOR * hist[-_STALL_WINDOW - 1]:
            z2, gn2, used = _newton_burst(X, target, z, tol, min(100, max_iter - it))
            it += used
            if gn2 <= tol:
                return result(z2, gn2, it, True, False)
            ok, x, gn_at = sample_point_check(z2 if gn2 < gn else z)
            if gn_at < best_gn:
                best_gn, best_z, best_at = gn_at, x.copy(), True
            if ok:
                return result(x, gn_at, it, True, True)
            if gn2 < gn:
                z = z2
            prev_step = None
            hist.clear()
            continue
        w = 1.0 / dist
        T = ((X * w[:, None]).sum(axis=0) + n * target) / w.sum()
        step = T - z
        if prev_step is not None and float(step @ prev_step) < 0.0:
            lam = max(0.05, lam * 0.9)
        else:
            lam = min(1.0, lam / 0.9)
        z = z + lam * step
        prev_step = step

    ok, x, gn_at = sample_point_check(best_z)
    if gn_at < best_gn:
        best_gn, best_z, best_at = gn_at, x, True
    if ok:
        return result(x, gn_at, it, True, True)
    res = result(best_z, best_gn, it, False, best_at)
    if raise_on_failure:
        raise SolverConvergenceError(
            f"no convergence after {it} iterations "
            f"(tau={tau}, best gradient norm {best_gn:.3e})",
            result=res,
        )
    return res


def build_relabel_table(X):
    """Sorted norms of the empirical geometric distribution function at the
    sample points, each point excluded from its own average.

    These are the empirical center-outward rank radii used to relabel
    quantile orders by probability content.
    """
    X = check_sample(X)
    n = X.shape[0]
    norms = np.empty(n)
    chunk = max(1, _CHUNK_PAIRS // n)
    for i0 in range(0, n, chunk):
        block = X[i0 : i0 + chunk]
        diff = block[:, None, :] - X[None, :, :]
        dist = np.linalg.norm(diff, axis=2)
        safe = np.where(dist > 0.0, dist, 1.0)
        vals = (diff / safe[:, :, None]).sum(axis=1) / n
        norms[i0 : i0 + chunk] = np.linalg.norm(vals, axis=1)
    norms.sort()
    return norms


def relabel_order(table, tau):
    """Map a probability-content level tau to the raw geometric order tau'.

    tau' is the type-1 empirical tau-quantile of the table, so the geometric
    region of order tau' captures ceil(tau * n) of the sample points.
    Monotone nondecreasing in tau.
    """
    tau = check_order(tau)
    table = np.asarray(table, dtype=float)
    n = table.shape[0]
    if tau == 0.0:
        return 0.0
    idx = min(math.ceil(tau * n), n) - 1
    return float(table[idx])


class GeometricQuantiles(BaseEstimator):
    """Geometric quantile contours of a sample, relabeled by probability content.

    ``fit`` stores the sample and builds the relabeling table (an O(n^2)
    pass over sample pairs). Quantiles and contours are then solved per
    query direction.

    Parameters
    ----------
    tol : float
        Gradient-norm tolerance of the quantile solver.
    max_iter : int
        Iteration budget per quantile solve.

    Attributes
    ----------
    X_ : ndarray of shape (n_samples, n_features)
    relabel_table_ : ndarray of shape (n_samples,)
        Sorted norms of the empirical geometric distribution function at
        the sample points.
    """

    def __init__(self, tol=1e-8, max_iter=10_000):
        self.tol = tol
        self.max_iter = max_iter

    def fit(self, X, y=None):
        X = check_sample(X)
        self.X_ = readonly(X)
        self.n_samples_, self.n_features_ = X.shape
        self.relabel_table_ = readonly(build_relabel_table(X))
        return self

    def transform(self, Z):
        """Empirical geometric distribution function at each row of Z."""
        check_is_fitted(self, "X_")
        Z = check_sample(Z)
        if Z.shape[1] != self.n_features_:
            raise ValueError("dimension mismatch with the fitted sample")
        return geometric_cdf(self.X_, Z)

    def relabel_order(self, tau):
        check_is_fitted(self, "relabel_table_")
        return relabel_order(self.relabel_table_, tau)

    def quantile(self, tau, u=None, relabeled=False, raise_on_failure=True):
        """Solve for one quantile point; ``relabeled`` maps tau through the
        probability-content table first."""
        check_is_fitted(self, "X_")
        order = self.relabel_order(tau) if relabeled else check_order(tau)
        return geometric_quantile(
            self.X_, order, u, tol=self.tol, max_iter=self.max_iter,
            raise_on_failure=raise_on_failure,
        )

    def contour(self, tau, directions=None, relabeled=True, raise_on_failure=False):
        """Quantile contour polygon at level tau.

        Parameters
        ----------
        tau : float in [0, 1)
        directions : ndarray of shape (K, d), unit rows, or None
            Defaults to a regular 70-direction planar grid.
        relabeled : bool
            Relabel tau by probability content (the default labeling).
        raise_on_failure : bool
            If False, non-converged directions keep their best iterate and
            are listed in ``failed_directions``.
        """
        check_is_fitted(self, "X_")
        tau = check_order(tau)
        if directions is None:
            directions = direction_grid(70, dim=self.n_features_)
        directions = np.atleast_2d(np.asarray(directions, dtype=float))
        order = self.relabel_order(tau) if relabeled else tau
        if order == 0.0:
            res = geometric_quantile(
                self.X_, 0.0, tol=self.tol, max_iter=self.max_iter,
                raise_on_failure=raise_on_failure,
            )
            vertices = np.tile(res.point, (directions.shape[0], 1))
            failed = () if res.converged else tuple(range(directions.shape[0]))
            return Contour(tau=tau, method=GEOMETRIC, vertices=vertices,
                           failed_directions=failed)
        vertices = np.empty((directions.shape[0], self.n_features_))
        failed = []
        for k in range(directions.shape[0]):
            res = geometric_quantile(
                self.X_, order, directions[k], tol=self.tol,
                max_iter=self.max_iter, raise_on_failure=raise_on_failure,
            )
            vertices[k] = res.point
            if not res.converged:
                failed.append(k)
        return Contour(tau=tau, method=GEOMETRIC, vertices=vertices,
                       failed_directions=tuple(failed))


def relabeled_geometric_contour(X, tau, directions=None, tol=1e-8, max_iter=10_000):
    """One-shot relabeled geometric contour of a sample (fits an estimator)."""
    est = GeometricQuantiles(tol=tol, max_iter=max_iter).fit(X)
    return est.contour(tau, directions=directions, relabeled=True)
