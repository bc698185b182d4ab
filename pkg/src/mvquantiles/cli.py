"""Command-line interface.

Subcommands: sample, contour, figure1, figure2, extreme-check, gc-check.
A key=value config file may supply any flag (flags win on conflict).
Exit codes: 0 success, 1 usage or I/O error, 2 solver non-convergence.
"""

import argparse
import sys
from pathlib import Path

from . import experiments
from .distributions import PRESETS, spec_from_config
from .exceptions import SolverConvergenceError
from .io import parse_kv_text


class _Parser(argparse.ArgumentParser):
    # usage errors are exit code 1 (argparse defaults to 2, reserved here
    # for solver non-convergence)
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def _add_common(p, with_grid=True):
    p.add_argument("--config", metavar="FILE",
                   help="key=value file supplying any of the flags below")
    p.add_argument("--dist", help="distribution preset (%s) or a key=value "
                                  "spec file" % ", ".join(sorted(PRESETS)))
    p.add_argument("--n", type=int, help="sample size")
    p.add_argument("--seed", type=int, help="RNG seed")
    p.add_argument("--taus", help="comma-separated quantile orders, increasing")
    if with_grid:
        p.add_argument("--nr", type=int, help="transport grid rings")
        p.add_argument("--ns", type=int, help="transport grid sectors")
        p.add_argument("--k-dirs", type=int, dest="k_dirs",
                       help="number of contour directions")
    p.add_argument("--tol", type=float, help="quantile solver tolerance")
    p.add_argument("--out", help="output directory")


def build_parser():
    parser = _Parser(prog="mvq", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("sample", help="draw a sample and emit it as CSV")
    _add_common(p, with_grid=False)

    p = sub.add_parser("contour", help="quantile contours of one sample")
    p.add_argument("--method", choices=("geom", "ot", "both"),
                   help="contour family: geometric, transport, or both")
    _add_common(p)

    p = sub.add_parser("figure1", help="contour comparison on four distributions")
    _add_common(p)

    p = sub.add_parser("figure2", help="high-order contours, anisotropic Gaussian")
    _add_common(p)

    p = sub.add_parser("extreme-check", help="extreme geometric quantile escape rate")
    _add_common(p, with_grid=False)

    p = sub.add_parser("gc-check", help="distribution-function convergence study")
    _add_common(p)
    return parser


def _parse_taus(text):
    return tuple(float(t) for t in str(text).split(","))


def _resolve_dist(value):
    if value in PRESETS or value == "gauss-std":
        return {"dist_name": value}
    path = Path(value)
    if path.is_file():
        return {"dist_name": path.stem, "dist": spec_from_config(path.read_text())}
    raise ValueError(f"unknown distribution {value!r} (not a preset or spec file)")


_KEY_CONV = {
    "n": ("n", int),
    "seed": ("seed", int),
    "taus": ("taus", _parse_taus),
    "nr": ("n_rings", int),
    "ns": ("n_sectors", int),
    "k_dirs": ("n_directions", int),
    "k-dirs": ("n_directions", int),
    "tol": ("tol", float),
    "out": ("out_dir", str),
    "method": ("method", str),
}


def _gather_overrides(args):
    """Merge the config file (if any) under the explicit flags."""
    kw = {}
    if getattr(args, "config", None):
        for key, raw in parse_kv_text(Path(args.config).read_text()).items():
            if key == "dist":
                kw.update(_resolve_dist(raw))
            elif key in _KEY_CONV:
                name, conv = _KEY_CONV[key]
                kw[name] = conv(raw)
            else:
                raise ValueError(f"unknown config key {key!r}")
    for key, (name, conv) in _KEY_CONV.items():
        flag = getattr(args, key.replace("-", "_"), None)
        if flag is not None:
            kw[name] = conv(flag) if not isinstance(flag, (int, float, tuple)) else flag
    if getattr(args, "dist", None) is not None:
        kw.update(_resolve_dist(args.dist))
    return kw


_RUNNERS = {
    "sample": experiments.run_sample,
    "contour": experiments.run_contour,
    "figure1": experiments.run_figure1,
    "figure2": experiments.run_figure2,
    "extreme-check": experiments.run_extreme_check,
    "gc-check": experiments.run_gc_check,
}


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        config = experiments.make_config(args.command, **_gather_overrides(args))
        outcome = _RUNNERS[args.command](config)
    except SolverConvergenceError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    files = outcome if isinstance(outcome, list) else outcome.files
    for f in files:
        print(f"wrote {f}")
    failures = getattr(outcome, "failures", [])
    if failures:
        for item in failures:
            print(f"solver failure: {item}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
