"""Seeded samplers for the benchmark distributions, plus analytic references.

All samplers draw from a counter-based Philox generator keyed by an explicit
64-bit seed; there is no global RNG state, so identical (spec, n, seed)
triples regenerate bit-identical samples.
"""

from dataclasses import dataclass, field
from typing import ClassVar, Union

import numpy as np

from ._validation import readonly

_WEIGHT_TOL = 1e-12


def _as_vector(v):
    return tuple(float(x) for x in np.atleast_1d(np.asarray(v, dtype=float)))


def _as_matrix(m):
    m = np.asarray(m, dtype=float)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {m.shape}")
    return tuple(tuple(float(x) for x in row) for row in m)


def _check_covariance(cov):
    """Reject asymmetric or non-positive-semidefinite covariance matrices."""
    c = np.asarray(cov, dtype=float)
    if not np.allclose(c, c.T, atol=1e-12):
        raise ValueError("covariance matrix must be symmetric")
    w = np.linalg.eigvalsh(c)
    if w[0] < -1e-10 * max(w[-1], 1.0):
        raise ValueError(f"covariance matrix is not positive semi-definite (min eigenvalue {w[0]})")


def _covariance_factor(cov):
    """A factor L with L L' = cov; Cholesky when possible, eigen-based for PSD."""
    c = np.asarray(cov, dtype=float)
    try:
        return np.linalg.cholesky(c)
    except np.linalg.LinAlgError:
        w, v = np.linalg.eigh(c)
        return v * np.sqrt(np.clip(w, 0.0, None))


@dataclass(frozen=True)
class GaussianSpec:
    """Multivariate normal with the given mean and covariance."""

    mean: tuple = (0.0, 0.0)
    cov: tuple = ((1.0, 0.0), (0.0, 1.0))
    kind: ClassVar[str] = "gaussian"

    def __post_init__(self):
        mean = _as_vector(self.mean)
        cov = _as_matrix(self.cov)
        if len(cov) != len(mean):
            raise ValueError("mean and covariance dimensions disagree")
        _check_covariance(cov)
        object.__setattr__(self, "mean", mean)
        object.__setattr__(self, "cov", cov)

    @property
    def dim(self):
        return len(self.mean)


@dataclass(frozen=True)
class ExponentialSpec:
    """Independent exponential marginals with the given rates."""

    rates: tuple = (1.0, 1.0)
    kind: ClassVar[str] = "indep_exponential"

    def __post_init__(self):
        rates = _as_vector(self.rates)
        if any(r <= 0 for r in rates):
            raise ValueError("exponential rates must be positive")
        object.__setattr__(self, "rates", rates)

    @property
    def dim(self):
        return len(self.rates)


@dataclass(frozen=True)
class SkewTSpec:
    """Skew-t with identity scale, the given degrees of freedom and slant vector.

    The scale matrix is fixed to the identity ("standard" convention); only
    dof and slant are free parameters.
    """

    dof: float = 4.0
    slant: tuple = (10.0, 10.0)
    kind: ClassVar[str] = "skew_t"

    def __post_init__(self):
        if float(self.dof) <= 0:
            raise ValueError("degrees of freedom must be positive")
        object.__setattr__(self, "dof", float(self.dof))
        object.__setattr__(self, "slant", _as_vector(self.slant))

    @property
    def dim(self):
        return len(self.slant)


@dataclass(frozen=True)
class MixtureSpec:
    """Finite mixture of Gaussian components."""

    weights: tuple
    means: tuple
    covs: tuple
    kind: ClassVar[str] = "custom_mixture"

    def __post_init__(self):
        weights = _as_vector(self.weights)
        means = tuple(_as_vector(m) for m in self.means)
        covs = tuple(_as_matrix(c) for c in self.covs)
        if not len(weights) == len(means) == len(covs):
            raise ValueError("weights, means and covs must have equal lengths")
        if any(w < 0 for w in weights):
            raise ValueError("mixture weights must be nonnegative")
        if abs(sum(weights) - 1.0) > _WEIGHT_TOL:
            raise ValueError(f"mixture weights must sum to 1, got {sum(weights)!r}")
        dims = {len(m) for m in means} | {len(c) for c in covs}
        if len(dims) != 1:
            raise ValueError("mixture components must share one dimension")
        for c in covs:
            _check_covariance(c)
        object.__setattr__(self, "weights", weights)
        object.__setattr__(self, "means", means)
        object.__setattr__(self, "covs", covs)

    @property
    def dim(self):
        return len(self.means[0])


# Banana-shaped benchmark target: two anti-correlated lobes plus a base
# component, weights 3/8, 3/8, 1/4.
_BANANA_WEIGHTS = (0.375, 0.375, 0.25)
_BANANA_MEANS = ((-3.0, 0.0), (3.0, 0.0), (0.0, -2.5))
_BANANA_COVS = (
    ((5.0, -4.0), (-4.0, 5.0)),
    ((5.0, 4.0), (4.0, 5.0)),
    ((4.0, 0.0), (0.0, 1.0)),
)


@dataclass(frozen=True)
class BananaSpec:
    """The fixed banana-shaped three-component Gaussian mixture."""

    kind: ClassVar[str] = "banana_mixture"

    @property
    def dim(self):
        return 2

    def as_mixture(self):
        return MixtureSpec(_BANANA_WEIGHTS, _BANANA_MEANS, _BANANA_COVS)


DistributionSpec = Union[GaussianSpec, ExponentialSpec, SkewTSpec, MixtureSpec, BananaSpec]

STANDARD_GAUSSIAN = GaussianSpec((0.0, 0.0), ((1.0, 0.0), (0.0, 1.0)))

# CLI preset names.
PRESETS = {
    "gauss": GaussianSpec((0.0, 0.0), ((2.0, 1.0), (1.0, 1.0))),
    "exp": ExponentialSpec((1.0, 1.0)),
    "skewt": SkewTSpec(4.0, (10.0, 10.0)),
    "banana": BananaSpec(),
    "gauss-aniso": GaussianSpec((0.0, 0.0), ((0.125, 0.0), (0.0, 0.75))),
}


@dataclass(frozen=True)
class SampleSet:
    """An immutable (n, d) sample together with its generating seed and spec."""

    points: np.ndarray
    seed: int
    spec: DistributionSpec = field(repr=False)

    def __post_init__(self):
        pts = readonly(self.points)
        if pts.ndim != 2 or pts.shape[0] < 1:
            raise ValueError("a sample needs at least one point of shape (n, d)")
        if not np.all(np.isfinite(pts)):
            raise ValueError("sample contains non-finite values")
        object.__setattr__(self, "points", pts)
        object.__setattr__(self, "seed", int(self.seed))

    @property
    def n(self):
        return self.points.shape[0]

    @property
    def dim(self):
        return self.points.shape[1]


def _rng(seed):
    return np.random.Generator(np.random.Philox(key=np.uint64(seed)))


def derive_seed(seed, *tags):
    """A reproducible child seed for sub-draws of an experiment."""
    ss = np.random.SeedSequence((int(seed),) + tuple(int(t) for t in tags))
    hi, lo = ss.generate_state(2, np.uint32)
    return int((np.uint64(hi) << np.uint64(32)) | np.uint64(lo))


def _sample_gaussian(rng, n, mean, cov):
    mean = np.asarray(mean, dtype=float)
    L = _covariance_factor(cov)
    z = rng.standard_normal((n, mean.shape[0]))
    return mean + z @ L.T


def _sample_exponential(rng, n, rates):
    rates = np.asarray(rates, dtype=float)
    u = rng.random((n, rates.shape[0]))
    return -np.log1p(-u) / rates


def _sample_skew_t(rng, n, dof, slant):
    # Skew-normal via the conditioning representation: draw (t, x) jointly
    # normal with corr(t, x_j) = delta_j, keep x when t > 0, flip otherwise.
    # Divide by sqrt(chi2/dof) for the t tail.
    alpha = np.asarray(slant, dtype=float)
    d = alpha.shape[0]
    delta = alpha / np.sqrt(1.0 + alpha @ alpha)
    joint = np.eye(d + 1)
    joint[0, 1:] = delta
    joint[1:, 0] = delta
    L = _covariance_factor(joint)
    y = rng.standard_normal((n, d + 1)) @ L.T
    sn = np.where(y[:, :1] > 0, y[:, 1:], -y[:, 1:])
    chi2 = rng.chisquare(dof, size=n)
    return sn / np.sqrt(chi2 / dof)[:, None]


def _sample_mixture(rng, n, weights, means, covs):
    """Draw (points, component labels) from a Gaussian mixture."""
    weights = np.asarray(weights, dtype=float)
    means = [np.asarray(m, dtype=float) for m in means]
    factors = [_covariance_factor(c) for c in covs]
    d = means[0].shape[0]
    labels = rng.choice(len(weights), size=n, p=weights)
    z = rng.standard_normal((n, d))
    points = np.empty((n, d))
    for c in range(len(weights)):
        idx = labels == c
        points[idx] = means[c] + z[idx] @ factors[c].T
    return points, labels


def sample(spec, n, seed):
    """Draw n i.i.d. observations from ``spec``.

    Parameters
    ----------
    spec : DistributionSpec
    n : int
        Number of observations, at least 1.
    seed : int
        Explicit seed for the counter-based generator.

    Returns
    -------
    SampleSet
    """
    n = int(n)
    if n < 1:
        raise ValueError("need at least one observation")
    rng = _rng(seed)
    if isinstance(spec, GaussianSpec):
        pts = _sample_gaussian(rng, n, spec.mean, spec.cov)
    elif isinstance(spec, ExponentialSpec):
        pts = _sample_exponential(rng, n, spec.rates)
    elif isinstance(spec, SkewTSpec):
        pts = _sample_skew_t(rng, n, spec.dof, spec.slant)
    elif isinstance(spec, BananaSpec):
        mix = spec.as_mixture()
        pts, _ = _sample_mixture(rng, n, mix.weights, mix.means, mix.covs)
    elif isinstance(spec, MixtureSpec):
        pts, _ = _sample_mixture(rng, n, spec.weights, spec.means, spec.covs)
    else:
        raise TypeError(f"unknown distribution spec {spec!r}")
    return SampleSet(points=pts, seed=seed, spec=spec)


def analytic_center_outward_radius(tau):
    """Radius of the population center-outward contour of order tau for the
    standard bivariate normal.

    The squared radius of a standard bivariate normal is Exp(1/2), so the
    radial rank map is r -> 1 - exp(-r^2/2) and its inverse is
    sqrt(-2 log(1 - tau)).
    """
    tau = float(tau)
    if not 0.0 <= tau < 1.0:
        raise ValueError(f"quantile order must lie in [0, 1), got {tau!r}")
    return float(np.sqrt(-2.0 * np.log1p(-tau)))


def analytic_center_outward_cdf(z):
    """Population center-outward distribution function of the standard
    bivariate normal: z -> (1 - exp(-|z|^2/2)) z/|z|, with 0 at the origin."""
    z = np.asarray(z, dtype=float)
    single = z.ndim == 1
    pts = np.atleast_2d(z)
    if pts.shape[1] != 2:
        raise ValueError("analytic map is only available for the bivariate case")
    r = np.linalg.norm(pts, axis=1)
    with np.errstate(invalid="ignore", divide="ignore"):
        out = (-np.expm1(-0.5 * r**2) / r)[:, None] * pts
    out[r == 0] = 0.0
    return out[0] if single else out


def _fmt_floats(values):
    return " ".join(repr(float(v)) for v in np.asarray(values, dtype=float).ravel())


def _fmt_groups(groups):
    return "; ".join(_fmt_floats(g) for g in groups)


def _parse_floats(text):
    return tuple(float(t) for t in text.split())


def _parse_matrix(text):
    flat = _parse_floats(text)
    d = int(round(len(flat) ** 0.5))
    if d * d != len(flat):
        raise ValueError(f"matrix entries do not form a square: {text!r}")
    return tuple(tuple(flat[i * d : (i + 1) * d]) for i in range(d))


def spec_to_config(spec):
    """Serialize a DistributionSpec to a plain-text key=value block."""
    lines = [f"kind={spec.kind}"]
    if isinstance(spec, GaussianSpec):
        lines.append(f"mean={_fmt_floats(spec.mean)}")
        lines.append(f"cov={_fmt_floats(spec.cov)}")
    elif isinstance(spec, ExponentialSpec):
        lines.append(f"rates={_fmt_floats(spec.rates)}")
    elif isinstance(spec, SkewTSpec):
        lines.append(f"dof={spec.dof!r}")
        lines.append(f"slant={_fmt_floats(spec.slant)}")
    elif isinstance(spec, MixtureSpec):
        lines.append(f"weights={_fmt_floats(spec.weights)}")
        lines.append(f"means={_fmt_groups(spec.means)}")
        lines.append(f"covs={_fmt_groups(spec.covs)}")
    elif isinstance(spec, BananaSpec):
        pass
    else:
        raise TypeError(f"unknown distribution spec {spec!r}")
    return "\n".join(lines) + "\n"


def spec_from_config(text):
    """Parse a DistributionSpec from its key=value block."""
    from .io import parse_kv_text

    kv = parse_kv_text(text)
    kind = kv.get("kind")
    if kind == "gaussian":
        return GaussianSpec(_parse_floats(kv["mean"]), _parse_matrix(kv["cov"]))
    if kind == "indep_exponential":
        return ExponentialSpec(_parse_floats(kv["rates"]))
    if kind == "skew_t":
        return SkewTSpec(float(kv["dof"]), _parse_floats(kv["slant"]))
    if kind == "custom_mixture":
        means = tuple(_parse_floats(g) for g in kv["means"].split(";"))
        covs = tuple(_parse_matrix(g) for g in kv["covs"].split(";"))
        return MixtureSpec(_parse_floats(kv["weights"]), means, covs)
    if kind == "banana_mixture":
        return BananaSpec()
    raise ValueError(f"unknown distribution kind {kind!r}")
