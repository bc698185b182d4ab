"""CSV, SVG, and plain-text config emission for the experiment pipelines.

All writers are deterministic functions of their inputs: fixed inputs
produce byte-identical files.
"""

import csv
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

CONTOUR_HEADER = ("distribution", "method", "tau", "k", "x", "y")


def _cell(value):
    # repr round-trips doubles exactly
    if isinstance(value, (float, np.floating)):
        return repr(float(value))
    return str(value)


def write_table_csv(path, header, rows):
    """Write a CSV table with a header row, floats at full double precision."""
    path = Path(path)
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        for row in rows:
            writer.writerow([_cell(v) for v in row])
    return path


def write_contours_csv(path, labeled_contours):
    """Write contour vertices as rows (distribution, method, tau, k, x, y).

    ``labeled_contours`` is an iterable of (distribution_name, Contour).
    """
    rows = []
    for name, contour in labeled_contours:
        for k, (x, y) in enumerate(contour.vertices):
            rows.append((name, contour.method, contour.tau, k, x, y))
    return write_table_csv(path, CONTOUR_HEADER, rows)


def read_contours_csv(path):
    """Parse a contour CSV back into (distribution, method, tau, k, x, y) rows."""
    out = []
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = tuple(next(reader))
        if header != CONTOUR_HEADER:
            raise ValueError(f"unexpected contour header {header!r}")
        for name, method, tau, k, x, y in reader:
            out.append((name, method, float(tau), int(k), float(x), float(y)))
    return out


def parse_kv_text(text):
    """Parse key=value lines ('#' starts a comment) into an ordered dict."""
    out = {}
    for raw in text.splitlines():
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValueError(f"malformed config line: {raw!r}")
        key, value = line.split("=", 1)
        out[key.strip()] = value.strip()
    return out


def write_manifest(path, mapping):
    """Echo a resolved configuration to a key=value manifest file."""
    path = Path(path)
    lines = [f"{k}={v}" for k, v in mapping.items()]
    path.write_text("\n".join(lines) + "\n")
    return path


@dataclass(frozen=True)
class SvgStyle:
    """Fixed styling of the contour plots: red geometric contours, blue
    center-outward contours, gray sample scatter."""

    width: int = 640
    height: int = 640
    margin: float = 40.0
    point_radius: float = 1.6
    point_color: str = "#999999"
    stroke_width: float = 1.5
    method_colors: dict = field(
        default_factory=lambda: {"geometric": "red", "center-outward": "blue"}
    )


def _fmt(v):
    return format(float(v), ".3f")


def write_svg(path, contours, sample=None, style=None, title=None):
    """Render a sample scatter plus closed contour polylines to a standalone SVG.

    Parameters
    ----------
    path : path-like
    contours : sequence of Contour
    sample : ndarray of shape (n, 2) or None
    style : SvgStyle or None
    title : str or None
    """
    style = style or SvgStyle()
    pieces = []
    if sample is not None and len(sample):
        pieces.append(np.asarray(sample, dtype=float))
    for c in contours:
        pieces.append(np.asarray(c.vertices, dtype=float))
    if pieces:
        allpts = np.concatenate(pieces, axis=0)
        lo, hi = allpts.min(axis=0), allpts.max(axis=0)
    else:
        lo, hi = np.array([-1.0, -1.0]), np.array([1.0, 1.0])
    span = np.maximum(hi - lo, 1e-9)
    pad = 0.05 * float(span.max())
    lo, hi = lo - pad, hi + pad
    span = hi - lo
    inner_w = style.width - 2 * style.margin
    inner_h = style.height - 2 * style.margin
    scale = min(inner_w / span[0], inner_h / span[1])
    off_x = style.margin + (inner_w - scale * span[0]) / 2.0
    off_y = style.margin + (inner_h - scale * span[1]) / 2.0

    def to_px(pts):
        pts = np.asarray(pts, dtype=float)
        px = off_x + (pts[:, 0] - lo[0]) * scale
        py = style.height - (off_y + (pts[:, 1] - lo[1]) * scale)
        return px, py

    out = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{style.width}" '
        f'height="{style.height}" viewBox="0 0 {style.width} {style.height}">',
        f'<rect width="{style.width}" height="{style.height}" fill="white"/>',
    ]
    if title:
        out.append(
            f'<text x="{style.width / 2:.1f}" y="20" text-anchor="middle" '
            f'font-family="sans-serif" font-size="14">{title}</text>'
        )
    if sample is not None and len(sample):
        px, py = to_px(sample)
        out.append('<g fill="%s" fill-opacity="0.6">' % style.point_color)
        for x, y in zip(px, py):
            out.append(f'<circle cx="{_fmt(x)}" cy="{_fmt(y)}" r="{style.point_radius}"/>')
        out.append("</g>")
    for c in contours:
        color = style.method_colors.get(c.method, "black")
        px, py = to_px(c.vertices)
        pts = " ".join(f"{_fmt(x)},{_fmt(y)}" for x, y in zip(px, py))
        tag = "polygon" if c.closed else "polyline"
        out.append(
            f'<{tag} points="{pts}" fill="none" stroke="{color}" '
            f'stroke-width="{style.stroke_width}"/>'
        )
    out.append("</svg>")
    Path(path).write_text("\n".join(out) + "\n")
    return Path(path)
