"""Experiment runners: the two benchmark figures, the extreme-quantile
asymptotics check, and the distribution-function convergence study.

Every runner is deterministic given its config (seeds are derived per
sub-draw from the config seed) and writes CSV data, SVG plots, and a
key=value manifest echoing the resolved configuration.
"""

import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import io
from ._validation import check_orders
from .contours import CENTER_OUTWARD, GEOMETRIC, fraction_inside, half_extents
from .directions import direction_grid
from .distributions import (
    PRESETS,
    STANDARD_GAUSSIAN,
    GaussianSpec,
    analytic_center_outward_cdf,
    derive_seed,
    sample,
    spec_to_config,
)
from .geometric import GeometricQuantiles, geometric_cdf, geometric_quantile
from .transport import CenterOutwardQuantiles

FIGURE1_DISTRIBUTIONS = ("gauss", "exp", "skewt", "banana")

_EXPERIMENT_DEFAULTS = {
    "sample": dict(dist_name="gauss", n=2400),
    "contour": dict(dist_name="gauss", n=2400, n_rings=40, n_sectors=60,
                    n_directions=70, taus=(0.25, 0.5, 0.75), method="both"),
    "figure1": dict(dist_name="gauss", n=2400, n_rings=40, n_sectors=60,
                    n_directions=70, taus=(0.25, 0.5, 0.75)),
    "figure2": dict(dist_name="gauss-aniso", n=1000, n_rings=20, n_sectors=50,
                    n_directions=50, taus=(0.9, 0.95, 0.99)),
    "extreme-check": dict(dist_name="gauss-aniso", n=100_000,
                          taus=(0.9, 0.99, 0.999)),
    "gc-check": dict(dist_name="gauss-std", n=100_000),
}


@dataclass(frozen=True)
class ExperimentConfig:
    """Resolved settings of one experiment run."""

    experiment: str
    dist_name: str = "gauss"
    dist: object = None
    n: int = 2400
    n_rings: int = 40
    n_sectors: int = 60
    n_directions: int = 70
    taus: tuple = (0.25, 0.5, 0.75)
    seed: int = 0
    out_dir: Path = Path("out")
    tol: float = 1e-8
    max_iter: int = 10_000
    n_neighbors: int = 8
    method: str = "both"

    def __post_init__(self):
        object.__setattr__(self, "taus", check_orders(self.taus))
        object.__setattr__(self, "out_dir", Path(self.out_dir))
        object.__setattr__(self, "n", int(self.n))
        object.__setattr__(self, "seed", int(self.seed))
        if self.dist is None:
            spec = STANDARD_GAUSSIAN if self.dist_name == "gauss-std" else PRESETS.get(self.dist_name)
            if spec is None:
                raise ValueError(f"unknown distribution preset {self.dist_name!r}")
            object.__setattr__(self, "dist", spec)

    def require_grid_match(self):
        if self.n != self.n_rings * self.n_sectors:
            raise ValueError(
                f"transport experiments need n = n_rings * n_sectors, got "
                f"{self.n} != {self.n_rings} * {self.n_sectors}"
            )


def make_config(experiment, **overrides):
    """Config with per-experiment defaults, overridden by keyword values."""
    if experiment not in _EXPERIMENT_DEFAULTS:
        raise ValueError(f"unknown experiment {experiment!r}")
    kw = dict(_EXPERIMENT_DEFAULTS[experiment])
    kw.update({k: v for k, v in overrides.items() if v is not None})
    return ExperimentConfig(experiment=experiment, **kw)


def _manifest_mapping(config):
    out = {
        "experiment": config.experiment,
        "dist": config.dist_name,
        "n": config.n,
        "n_rings": config.n_rings,
        "n_sectors": config.n_sectors,
        "k_dirs": config.n_directions,
        "taus": ",".join(repr(t) for t in config.taus),
        "seed": config.seed,
        "tol": repr(config.tol),
        "max_iter": config.max_iter,
        "n_neighbors": config.n_neighbors,
    }
    for line in spec_to_config(config.dist).strip().splitlines():
        key, value = line.split("=", 1)
        out[f"dist.{key}"] = value
    return out


def _write_manifest(config, name):
    config.out_dir.mkdir(parents=True, exist_ok=True)
    return io.write_manifest(config.out_dir / name, _manifest_mapping(config))


@dataclass
class ContourSuiteResult:
    """Contours plus bookkeeping common to the figure runners."""

    contours: dict
    contents: dict
    relabeled_orders: dict
    failures: list
    files: list = field(default_factory=list)


def _fit_both(X, config):
    geo = GeometricQuantiles(tol=config.tol, max_iter=config.max_iter).fit(X)
    cow = CenterOutwardQuantiles(
        config.n_rings, config.n_sectors, config.n_neighbors
    ).fit(X)
    return geo, cow


def _contour_pair(name, X, geo, cow, taus, dirs, result):
    for tau in taus:
        cg = geo.contour(tau, directions=dirs, relabeled=True, raise_on_failure=False)
        result.contours[(name, GEOMETRIC, tau)] = cg
        result.contents[(name, GEOMETRIC, tau)] = fraction_inside(X, cg.vertices)
        result.relabeled_orders[(name, tau)] = geo.relabel_order(tau)
        result.failures.extend((name, tau, k) for k in cg.failed_directions)
        if cow is not None:
            co = cow.contour(tau, directions=dirs)
            result.contours[(name, CENTER_OUTWARD, tau)] = co
            result.contents[(name, CENTER_OUTWARD, tau)] = fraction_inside(X, co.vertices)


def _summary_rows(result, taus, names, methods):
    rows = []
    for name in names:
        for method in methods:
            for tau in taus:
                key = (name, method, tau)
                if key not in result.contours:
                    continue
                c = result.contours[key]
                solved = result.relabeled_orders[(name, tau)] if method == GEOMETRIC else tau
                rows.append((name, method, tau, solved, result.contents[key],
                             c.n_vertices, len(c.failed_directions)))
    return rows


_SUMMARY_HEADER = ("distribution", "method", "tau", "tau_solved", "content",
                   "n_vertices", "n_failed")


def run_figure1(config):
    """Both contour families at each level for the four benchmark
    distributions; emits vertices, per-contour content summary, and one SVG
    per distribution."""
    config.require_grid_match()
    dirs = direction_grid(config.n_directions)
    result = ContourSuiteResult({}, {}, {}, [])
    out = config.out_dir
    out.mkdir(parents=True, exist_ok=True)
    samples = {}
    for i, name in enumerate(FIGURE1_DISTRIBUTIONS):
        X = sample(PRESETS[name], config.n, derive_seed(config.seed, i)).points
        samples[name] = X
        geo, cow = _fit_both(X, config)
        _contour_pair(name, X, geo, cow, config.taus, dirs, result)
    labeled = [
        (name, result.contours[(name, method, tau)])
        for name in FIGURE1_DISTRIBUTIONS
        for method in (GEOMETRIC, CENTER_OUTWARD)
        for tau in config.taus
    ]
    result.files.append(io.write_contours_csv(out / "figure1_contours.csv", labeled))
    result.files.append(io.write_table_csv(
        out / "figure1_summary.csv", _SUMMARY_HEADER,
        _summary_rows(result, config.taus, FIGURE1_DISTRIBUTIONS,
                      (GEOMETRIC, CENTER_OUTWARD)),
    ))
    for name in FIGURE1_DISTRIBUTIONS:
        cs = [result.contours[(name, m, t)] for m in (GEOMETRIC, CENTER_OUTWARD)
              for t in config.taus]
        result.files.append(io.write_svg(out / f"figure1_{name}.svg", cs,
                                         sample=samples[name], title=name))
    result.files.append(_write_manifest(config, "figure1_manifest.txt"))
    return result


def run_figure2(config):
    """Both contour families at high orders for the anisotropic Gaussian;
    records each contour's horizontal and vertical half-extents."""
    config.require_grid_match()
    dirs = direction_grid(config.n_directions)
    result = ContourSuiteResult({}, {}, {}, [])
    out = config.out_dir
    out.mkdir(parents=True, exist_ok=True)
    name = config.dist_name
    X = sample(config.dist, config.n, config.seed).points
    geo, cow = _fit_both(X, config)
    _contour_pair(name, X, geo, cow, config.taus, dirs, result)
    labeled = [(name, result.contours[(name, m, t)])
               for m in (GEOMETRIC, CENTER_OUTWARD) for t in config.taus]
    result.files.append(io.write_contours_csv(out / "figure2_contours.csv", labeled))
    extent_rows = []
    for method in (GEOMETRIC, CENTER_OUTWARD):
        for tau in config.taus:
            hx, hy = half_extents(result.contours[(name, method, tau)].vertices)
            extent_rows.append((method, tau, hx, hy))
    result.files.append(io.write_table_csv(
        out / "figure2_extents.csv",
        ("method", "tau", "half_extent_x", "half_extent_y"), extent_rows))
    result.files.append(io.write_svg(out / "figure2.svg", [c for _, c in labeled],
                                     sample=X, title=name))
    result.files.append(_write_manifest(config, "figure2_manifest.txt"))
    return result


@dataclass(frozen=True)
class ExtremeCheckResult:
    """Scaled norms |Q(tau u)|^2 (1 - tau) along one direction, against the
    predicted limit (trace(Sigma) - u'Sigma u) / 2."""

    direction: tuple
    taus: tuple
    scaled_norms: tuple
    predicted_limit: float

    @property
    def relative_gaps(self):
        return tuple(abs(s / self.predicted_limit - 1.0) for s in self.scaled_norms)


@dataclass
class ExtremeCheckOutcome:
    results: list
    failures: list
    files: list = field(default_factory=list)


def run_extreme_check(config, directions=None):
    """Escape rate of extreme geometric quantiles for a Gaussian sample.

    Directions default to the covariance eigenvectors. For each direction u
    and each tau in the ladder, solves the raw (unrelabeled) geometric
    quantile on one large sample and reports |Q|^2 (1 - tau) against the
    predicted limit (trace(Sigma) - u'Sigma u) / 2.
    """
    if not isinstance(config.dist, GaussianSpec):
        raise ValueError("the extreme-quantile check needs a Gaussian spec")
    cov = np.asarray(config.dist.cov, dtype=float)
    if directions is None:
        _, vecs = np.linalg.eigh(cov)
        directions = [vecs[:, j] for j in range(vecs.shape[1])]
    X = sample(config.dist, config.n, config.seed).points
    outcome = ExtremeCheckOutcome([], [])
    rows = []
    for u in directions:
        u = np.asarray(u, dtype=float)
        predicted = 0.5 * (np.trace(cov) - u @ cov @ u)
        scaled = []
        for tau in config.taus:
            res = geometric_quantile(X, tau, u, tol=config.tol,
                                     max_iter=config.max_iter,
                                     raise_on_failure=False)
            if not res.converged:
                outcome.failures.append((config.dist_name, tau, tuple(u)))
            s = float(res.point @ res.point) * (1.0 - tau)
            scaled.append(s)
            gap = abs(s / predicted - 1.0) if predicted > 0 else math.inf
            rows.append((" ".join(repr(v) for v in u), tau, s, predicted, gap))
        outcome.results.append(ExtremeCheckResult(
            direction=tuple(float(v) for v in u), taus=tuple(config.taus),
            scaled_norms=tuple(scaled), predicted_limit=float(predicted)))
    out = config.out_dir
    out.mkdir(parents=True, exist_ok=True)
    outcome.files.append(io.write_table_csv(
        out / "extreme_check.csv",
        ("direction", "tau", "scaled_norm", "predicted_limit", "relative_gap"),
        rows))
    outcome.files.append(_write_manifest(config, "extreme_check_manifest.txt"))
    return outcome


def grid_shape_for(n):
    """A spherical grid shape (n_rings, n_sectors) with product n, sectors
    about 1.5x rings when the factorization allows."""
    fixed = {300: (15, 20), 1200: (30, 40), 2400: (40, 60), 4800: (60, 80)}
    if n in fixed:
        return fixed[n]
    best = None
    for nr in range(1, int(math.isqrt(n)) + 1):
        if n % nr:
            continue
        ns = n // nr
        if ns < 3:
            continue
        score = abs(ns / nr - 1.5)
        if best is None or score < best[0]:
            best = (score, nr, ns)
    if best is None:
        raise ValueError(f"no usable grid factorization for n={n}")
    return best[1], best[2]


@dataclass
class GcCheckResult:
    n_values: tuple
    geometric_errors: tuple
    transport_errors: tuple
    files: list = field(default_factory=list)
    failures: list = field(default_factory=list)


def run_gc_check(config, n_ladder=(300, 1200, 4800), n_test_points=200,
                 reference_n=None):
    """Uniform convergence study of both empirical distribution functions.

    For each sample size in the ladder, reports the sup (over fixed test
    points) of the distance between the empirical geometric distribution
    function and its large-sample reference evaluation, and between the
    interpolated center-outward map and the analytic map of the standard
    bivariate normal.
    """
    spec = config.dist
    if spec != STANDARD_GAUSSIAN:
        raise ValueError("the convergence study is calibrated for the standard "
                         "bivariate normal only")
    reference_n = int(reference_n or config.n)
    Z = sample(spec, n_test_points, derive_seed(config.seed, 90001)).points
    X_ref = sample(spec, reference_n, derive_seed(config.seed, 90002)).points
    F_ref = geometric_cdf(X_ref, Z)
    F_true = analytic_center_outward_cdf(Z)
    geo_errs, tr_errs = [], []
    for n in n_ladder:
        Xn = sample(spec, n, derive_seed(config.seed, n)).points
        geo_errs.append(float(np.linalg.norm(geometric_cdf(Xn, Z) - F_ref, axis=1).max()))
        nr, ns = grid_shape_for(n)
        cow = CenterOutwardQuantiles(nr, ns, config.n_neighbors).fit(Xn)
        tr_errs.append(float(np.linalg.norm(cow.transform(Z) - F_true, axis=1).max()))
    result = GcCheckResult(tuple(n_ladder), tuple(geo_errs), tuple(tr_errs))
    out = config.out_dir
    out.mkdir(parents=True, exist_ok=True)
    result.files.append(io.write_table_csv(
        out / "gc_check.csv",
        ("n", "geometric_sup_error", "transport_sup_error"),
        list(zip(n_ladder, geo_errs, tr_errs))))
    result.files.append(_write_manifest(config, "gc_check_manifest.txt"))
    return result


def run_sample(config):
    """Draw one sample and emit it as CSV."""
    s = sample(config.dist, config.n, config.seed)
    out = config.out_dir
    out.mkdir(parents=True, exist_ok=True)
    header = ("x", "y") if s.dim == 2 else tuple(f"x{i}" for i in range(s.dim))
    files = [io.write_table_csv(out / "sample.csv", header, s.points),
             _write_manifest(config, "sample_manifest.txt")]
    return files


def run_contour(config):
    """Contours of one sample with the chosen method(s); emits vertices,
    a content summary, and an SVG."""
    if config.method not in ("geom", "ot", "both"):
        raise ValueError(f"unknown contour method {config.method!r}")
    use_geo = config.method in ("geom", "both")
    use_ot = config.method in ("ot", "both")
    if use_ot:
        config.require_grid_match()
    dirs = direction_grid(config.n_directions)
    X = sample(config.dist, config.n, config.seed).points
    result = ContourSuiteResult({}, {}, {}, [])
    name = config.dist_name
    geo = GeometricQuantiles(tol=config.tol, max_iter=config.max_iter).fit(X) if use_geo else None
    cow = (CenterOutwardQuantiles(config.n_rings, config.n_sectors,
                                  config.n_neighbors).fit(X) if use_ot else None)
    methods = []
    if use_geo:
        methods.append(GEOMETRIC)
    if use_ot:
        methods.append(CENTER_OUTWARD)
    for tau in config.taus:
        if use_geo:
            cg = geo.contour(tau, directions=dirs, relabeled=True, raise_on_failure=False)
            result.contours[(name, GEOMETRIC, tau)] = cg
            result.contents[(name, GEOMETRIC, tau)] = fraction_inside(X, cg.vertices)
            result.relabeled_orders[(name, tau)] = geo.relabel_order(tau)
            result.failures.extend((name, tau, k) for k in cg.failed_directions)
        if use_ot:
            co = cow.contour(tau, directions=dirs)
            result.contours[(name, CENTER_OUTWARD, tau)] = co
            result.contents[(name, CENTER_OUTWARD, tau)] = fraction_inside(X, co.vertices)
    out = config.out_dir
    out.mkdir(parents=True, exist_ok=True)
    labeled = [(name, result.contours[(name, m, t)]) for m in methods for t in config.taus]
    result.files.append(io.write_contours_csv(out / "contours.csv", labeled))
    result.files.append(io.write_table_csv(
        out / "contours_summary.csv", _SUMMARY_HEADER,
        _summary_rows(result, config.taus, (name,), methods)))
    result.files.append(io.write_svg(out / "contours.svg", [c for _, c in labeled],
                                     sample=X, title=name))
    result.files.append(_write_manifest(config, "contour_manifest.txt"))
    return result
