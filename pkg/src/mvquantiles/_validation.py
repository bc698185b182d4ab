"""Input validation helpers shared by the estimators and module-level functions."""

import numpy as np
from sklearn.utils import check_array

UNIT_NORM_TOL = 1e-12


def check_sample(X, min_samples=1):
    """Validate a sample as a finite float64 array of shape (n, d).

    One-dimensional input is treated as n scalar observations and lifted
    to shape (n, 1).
    """
    X = np.asarray(X, dtype=np.float64)
    if X.ndim == 1:
        X = X[:, None]
    X = check_array(X, dtype=np.float64, ensure_2d=True, ensure_min_samples=min_samples)
    if not np.all(np.isfinite(X)):
        raise ValueError("sample contains non-finite values")
    return X


def check_point(z, dim=None):
    """Validate a single point as a finite 1-d float64 vector."""
    z = np.asarray(z, dtype=np.float64)
    if z.ndim == 0:
        z = z[None]
    if z.ndim != 1:
        raise ValueError(f"expected a single point, got array of shape {z.shape}")
    if not np.all(np.isfinite(z)):
        raise ValueError("point contains non-finite values")
    if dim is not None and z.shape[0] != dim:
        raise ValueError(f"dimension mismatch: expected {dim}, got {z.shape[0]}")
    return z


def check_direction(u, dim=None, tol=UNIT_NORM_TOL):
    """Validate a unit direction (Euclidean norm 1 within ``tol``)."""
    u = check_point(u, dim=dim)
    norm = float(np.linalg.norm(u))
    if abs(norm - 1.0) > tol:
        raise ValueError(f"direction must have unit norm, got norm {norm!r}")
    return u


def check_order(tau):
    """Validate a quantile order tau in [0, 1)."""
    tau = float(tau)
    if not 0.0 <= tau < 1.0:
        raise ValueError(f"quantile order must lie in [0, 1), got {tau!r}")
    return tau


def check_orders(taus):
    """Validate a strictly increasing sequence of quantile orders."""
    taus = tuple(check_order(t) for t in taus)
    if any(b <= a for a, b in zip(taus, taus[1:])):
        raise ValueError("quantile orders must be strictly increasing")
    return taus


def readonly(a):
    """Return ``a`` as a float64 array with the writeable flag cleared."""
    a = np.array(a, dtype=np.float64)
    a.setflags(write=False)
    return a
