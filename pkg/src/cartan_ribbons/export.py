"""OBJ meshes, SVG flat patterns and CSV traces.

All writers are deterministic: fixed number formatting and a fixed order,
so an identical scene produces byte-identical files.
"""
from __future__ import annotations

import csv
import io
from pathlib import Path
from typing import Iterable, Optional
from xml.sax.saxutils import quoteattr

import numpy as np

from .errors import IoError
from .ribbon import PlanarRibbon, lattice_fractions

MM_PER_UNIT = 10.0
SVG_MARGIN_MM = 10.0


def _write(path, text: str) -> None:
    try:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    except OSError as exc:
        raise IoError(f"cannot write {path}: {exc}") from None


def _u_fractions(m: int) -> np.ndarray:
    if m < 2:
        raise ValueError("need at least 2 samples across the ribbon")
    return lattice_fractions(m) if m % 2 else np.linspace(-1.0, 1.0, m)


def mesh_text(ribbons, wedges=(), u_samples: int = 33, t_stride: int = 1) -> str:
    """OBJ text: one object per ribbon (quads), then one per wedge polyline."""
    out = ["# cartan ribbon lattices"]
    base = 1
    u = _u_fractions(u_samples)
    for k, rb in enumerate(ribbons):
        rows = np.arange(0, len(rb.t), t_stride)
        if rows[-1] != len(rb.t) - 1:
            rows = np.append(rows, len(rb.t) - 1)
        grid = rb.points(u)[rows]
        nt, nu = grid.shape[:2]
        out.append(f"o ribbon_{k}" + (f"_{rb.name}" if rb.name else "").replace(" ", "_"))
        out += [f"v {x:.9g} {y:.9g} {z:.9g}" for x, y, z in grid.reshape(-1, 3)]
        for i in range(nt - 1):
            for j in range(nu - 1):
                a = base + i * nu + j
                out.append(f"f {a} {a + nu} {a + nu + 1} {a + 1}")
        base += nt * nu
    for k, w in enumerate(wedges):
        out.append(f"o wedge_{k}")
        pts = np.asarray(w.points)
        out += [f"v {x:.9g} {y:.9g} {z:.9g}" for x, y, z in pts]
        idx = list(range(base, base + len(pts)))
        if w.closed:
            idx.append(base)
        out.append("l " + " ".join(str(i) for i in idx))
        base += len(pts)
    return "\n".join(out) + "\n"


def export_mesh(r, path, u_samples: int = 33, t_stride: int = 1) -> None:
    """Write a ribbonization (or anything with ``ribbons``/``wedges``) as OBJ."""
    _write(path, mesh_text(r.ribbons, getattr(r, "wedges", ()), u_samples, t_stride))


def _path_d(points: np.ndarray, closed: bool) -> str:
    cmds = [f"M {points[0, 0]:.4f} {points[0, 1]:.4f}"]
    cmds += [f"L {x:.4f} {y:.4f}" for x, y in points[1:]]
    if closed:
        cmds.append("Z")
    return " ".join(cmds)


def flat_pattern_svg(ribbons: Iterable[PlanarRibbon], scale: float = MM_PER_UNIT,
                     margin: float = SVG_MARGIN_MM) -> str:
    """SVG document in millimetres; ribbons are laid out left to right."""
    groups = []
    x_cursor = margin
    height = 0.0
    for k, pr in enumerate(ribbons):
        outline = pr.outline() * scale
        lo, hi = outline.min(axis=0), outline.max(axis=0)
        # SVG's y axis points down; flip so patterns keep their orientation
        def place(p, lo=lo, hi=hi, x0=x_cursor):
            q = np.asarray(p) * scale
            return np.stack([q[:, 0] - lo[0] + x0, hi[1] - q[:, 1] + margin], axis=-1)
        edge_lo, edge_hi = pr.edge(-1), pr.edge(+1)
        cuts = [np.stack([edge_lo[0], edge_hi[0]]), np.stack([edge_lo[-1], edge_hi[-1]])]
        gid = quoteattr(f"ribbon_{k}" + (f"_{pr.name}" if pr.name else ""))
        body = [f"  <g id={gid}>",
                f'    <path class="outline" d="{_path_d(place(pr.outline()), True)}" '
                'fill="none" stroke="black" stroke-width="0.2"/>',
                f'    <path class="center" d="{_path_d(place(pr.center.points), False)}" '
                'fill="none" stroke="gray" stroke-width="0.2" stroke-dasharray="2,1"/>']
        for c in cuts:
            body.append(f'    <path class="cut" d="{_path_d(place(c), False)}" '
                        'fill="none" stroke="red" stroke-width="0.3"/>')
        body.append("  </g>")
        groups += body
        x_cursor += (hi[0] - lo[0]) + margin
        height = max(height, hi[1] - lo[1])
    width = max(x_cursor, 2 * margin)
    total_h = height + 2 * margin
    head = ['<?xml version="1.0" encoding="UTF-8"?>',
            f'<svg xmlns="http://www.w3.org/2000/svg" width="{width:.4f}mm" '
            f'height="{total_h:.4f}mm" viewBox="0 0 {width:.4f} {total_h:.4f}">']
    return "\n".join(head + groups + ["</svg>"]) + "\n"


def export_flat_patterns(ribbons, path, scale: float = MM_PER_UNIT) -> None:
    _write(path, flat_pattern_svg(ribbons, scale))


def csv_text(header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([f"{x + 0.0:.12g}" if isinstance(x, (float, np.floating)) else x for x in row])
    return buf.getvalue()


def curvature_csv(frames) -> str:
    """``t, kg, kn, tg, speed`` per sample."""
    rows = zip(frames.t, frames.kg, frames.kn, frames.tg, frames.speed)
    return csv_text(["t", "kg", "kn", "tg", "speed"], rows)


def rolling_csv(samples) -> str:
    """``t`` and the target-frame angular velocity with its classification."""
    rows = ((m.t, *(float(x) for x in m.omega_frame), m.classification.name) for m in samples)
    return csv_text(["t", "omega_e", "omega_h", "omega_n", "classification"], rows)


def widths_csv(rb) -> str:
    return csv_text(["t", "w_minus", "w_plus"], zip(rb.t, rb.w_minus, rb.w_plus))


def write_csv(text: str, path) -> None:
    _write(path, text)


def safe_name(name: Optional[str], k: int) -> str:
    stem = "".join(ch if ch.isalnum() or ch in "-_" else "_" for ch in (name or ""))
    return f"{k:02d}_{stem}" if stem else f"{k:02d}"


def ensure_dir(path) -> Path:
    p = Path(path)
    try:
        p.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise IoError(f"cannot create {p}: {exc}") from None
    return p
