"""SVG trajectory plots for 2-D runs and text exports of antenna results."""

from pathlib import Path
from xml.sax.saxutils import escape

import contourpy
import numpy as np

__all__ = [
    "TrajectoryError",
    "emit_trajectory_svg",
    "write_pattern",
    "write_layout",
]

_PALETTE = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#e377c2", "#17becf"]


class TrajectoryError(ValueError):
    pass


def _paths_by_rls(trajectory):
    tracks = {}
    for it, rls, x, _ in trajectory:
        tracks.setdefault(int(rls), []).append((int(it), np.asarray(x, dtype=float)))
    return {k: np.array([p for _, p in sorted(v, key=lambda e: e[0])]) for k, v in sorted(tracks.items())}


def _star(cx, cy, r):
    pts = []
    for k in range(10):
        ang = -np.pi / 2 + k * np.pi / 5
        rad = r if k % 2 == 0 else r * 0.45
        pts.append(f"{cx + rad * np.cos(ang):.2f},{cy + rad * np.sin(ang):.2f}")
    return " ".join(pts)


def emit_trajectory_svg(record, problem, path, size=600, lattice=120, levels=12):
    """Write contour lines of ``problem`` and one polyline per local search.

    Starts are drawn as stars (``class="start"``), final positions as squares
    (``class="end"``), paths as ``<polyline class="trajectory">``.
    """
    if problem.dim != 2:
        raise TrajectoryError(f"trajectory plots need a 2-D problem, got dim={problem.dim}")
    if not record.trajectory:
        raise TrajectoryError("run has no trajectory; enable trajectory logging")
    tracks = _paths_by_rls(record.trajectory)

    lo, hi = problem.lower, problem.upper
    pad = 30.0
    scale = (size - 2 * pad) / (hi - lo)

    def to_px(p):
        return pad + (p[..., 0] - lo[0]) * scale[0], size - pad - (p[..., 1] - lo[1]) * scale[1]

    gx = np.linspace(lo[0], hi[0], lattice)
    gy = np.linspace(lo[1], hi[1], lattice)
    GX, GY = np.meshgrid(gx, gy)
    Z = problem.evaluate_batch(np.column_stack([GX.ravel(), GY.ravel()])).reshape(GX.shape)
    gen = contourpy.contour_generator(gx, gy, Z, line_type="Separate")
    zs = np.quantile(Z, np.linspace(0.02, 0.9, levels))

    out = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{size}" height="{size}" '
        f'viewBox="0 0 {size} {size}">',
        f"<title>{escape(problem.name)}: {len(tracks)} search trajectories</title>",
        f'<rect x="0" y="0" width="{size}" height="{size}" fill="white"/>',
        '<g class="contours" fill="none" stroke="#bbbbbb" stroke-width="0.7">',
    ]
    for z in zs:
        for line in gen.lines(z):
            if len(line) < 2:
                continue
            px, py = to_px(line)
            d = "M" + " L".join(f"{a:.2f},{b:.2f}" for a, b in zip(px, py))
            out.append(f'<path class="contour" d="{d}"/>')
    out.append("</g>")

    for k, (rls, pts) in enumerate(tracks.items()):
        color = _PALETTE[k % len(_PALETTE)]
        px, py = to_px(pts)
        coords = " ".join(f"{a:.2f},{b:.2f}" for a, b in zip(px, py))
        out.append(
            f'<polyline class="trajectory" data-rls="{rls}" points="{coords}" '
            f'fill="none" stroke="{color}" stroke-width="1"/>'
        )
        out.append(
            f'<polygon class="start" data-rls="{rls}" points="{_star(px[0], py[0], 8)}" '
            f'fill="{color}" stroke="black" stroke-width="0.5"/>'
        )
        out.append(
            f'<rect class="end" data-rls="{rls}" x="{px[-1] - 5:.2f}" y="{py[-1] - 5:.2f}" '
            f'width="10" height="10" fill="{color}" stroke="black" stroke-width="0.5"/>'
        )
    out.append("</svg>")
    path = Path(path)
    path.write_text("\n".join(out) + "\n")
    return path


def write_pattern(path, theta, level_db):
    """Two columns: angle in degrees, normalized |AF| in dB."""
    np.savetxt(path, np.column_stack([theta, level_db]), fmt="%.6f", header="theta_deg level_db")


def write_layout(path, layout):
    """Two columns: element position (wavelengths), phase (radians)."""
    np.savetxt(
        path,
        np.column_stack([layout.positions / layout.wavelength, layout.phases]),
        fmt="%.10f",
        header="position_wavelengths phase_rad",
    )
