"""SVG and CSV emitters for patterns, defect fields and heightmaps.

SVG conventions: stable lines 0.6-unit strokes, singular set 2.0-unit bold,
domain outline 1.2-unit, unconstrained regions unfilled.  All floats are
formatted to 9 significant digits so identical inputs produce identical
bytes.
"""

from __future__ import annotations

import numpy as np

FMT = "{:.9g}"


def _f(x):
    return FMT.format(float(x))


def _poly_points(points):
    return " ".join(f"{_f(p[0])},{_f(p[1])}" for p in points)


def domain_outline(domain, n=256):
    samples = domain.boundary_sample(n)
    return np.array([bp.position for bp in samples])


class SvgCanvas:
    def __init__(self, bbox, pad=0.05):
        (x0, y0), (x1, y1) = bbox
        w, h = x1 - x0, y1 - y0
        m = pad * max(w, h)
        self.x0, self.y0 = x0 - m, y0 - m
        self.w, self.h = w + 2 * m, h + 2 * m
        self.elems = []

    def line(self, p, q, width, color="#000000"):
        self.elems.append(
            f'<line x1="{_f(p[0])}" y1="{_f(p[1])}" x2="{_f(q[0])}" y2="{_f(q[1])}" '
            f'stroke="{color}" stroke-width="{_f(width)}" stroke-linecap="round"/>'
        )

    def polyline(self, pts, width, color="#000000", closed=False):
        tag = "polygon" if closed else "polyline"
        self.elems.append(
            f'<{tag} points="{_poly_points(pts)}" fill="none" '
            f'stroke="{color}" stroke-width="{_f(width)}" stroke-linejoin="round"/>'
        )

    def circle(self, c, r, width, color="#000000", fill="none"):
        self.elems.append(
            f'<circle cx="{_f(c[0])}" cy="{_f(c[1])}" r="{_f(r)}" fill="{fill}" '
            f'stroke="{color}" stroke-width="{_f(width)}"/>'
        )

    def rect(self, p, w, h, fill):
        self.elems.append(
            f'<rect x="{_f(p[0])}" y="{_f(p[1])}" width="{_f(w)}" height="{_f(h)}" '
            f'fill="{fill}" stroke="none"/>'
        )

    def to_string(self):
        # flip the y axis so +y points up in the figure
        header = (
            '<?xml version="1.0" encoding="UTF-8"?>\n'
            f'<svg xmlns="http://www.w3.org/2000/svg" '
            f'viewBox="{_f(self.x0)} {_f(-self.y0 - self.h)} {_f(self.w)} {_f(self.h)}">\n'
            f'<g transform="scale(1,-1)">\n'
        )
        return header + "\n".join(self.elems) + "\n</g>\n</svg>\n"


# stroke widths relative to a unit-ish diagram; scaled by the domain size
LINE_W = 0.6
SIGMA_W = 2.0
OUTLINE_W = 1.2


def pattern_svg(domain, family, medial=None, unit=None):
    """Stable lines as strokes, singular set bold, unconstrained blank."""
    canvas = SvgCanvas(domain.bbox())
    unit = unit if unit is not None else domain.diameter() / 100.0
    for ln in family.lines:
        canvas.line(ln.start, ln.end, LINE_W * unit)
    if medial is not None:
        for pts in medial.polylines():
            canvas.polyline(pts, SIGMA_W * unit)
        for v, deg in medial.vertices:
            canvas.circle(v, 1.0 * unit, SIGMA_W * unit * 0.5, fill="#000000")
    canvas.polyline(domain_outline(domain), OUTLINE_W * unit, closed=True)
    return canvas.to_string()


def heatmap_svg(grid_x0, grid_y0, h, values, mask, domain=None, overlay=None, unit=None):
    """Grayscale cell heatmap with optional stable-line overlay."""
    vals = np.asarray(values, dtype=float)
    lo = float(np.nanmin(vals[mask])) if mask.any() else 0.0
    hi = float(np.nanmax(vals[mask])) if mask.any() else 1.0
    span = hi - lo if hi > lo else 1.0
    nx, ny = vals.shape
    bbox = ((grid_x0, grid_y0), (grid_x0 + nx * h, grid_y0 + ny * h))
    canvas = SvgCanvas(bbox)
    unit = unit if unit is not None else max(nx, ny) * h / 100.0
    # coarse row-run encoding: merge horizontal runs of equal grey level
    levels = np.full((nx, ny), -1, dtype=int)
    levels[mask] = np.clip(((vals[mask] - lo) / span * 32).astype(int), 0, 32)
    for j in range(ny):
        i = 0
        while i < nx:
            L = levels[i, j]
            if L < 0:
                i += 1
                continue
            i2 = i
            while i2 + 1 < nx and levels[i2 + 1, j] == L:
                i2 += 1
            grey = 255 - int(L * 255 / 32)
            fill = f"#{grey:02x}{grey:02x}{grey:02x}"
            canvas.rect(
                (grid_x0 + i * h, grid_y0 + j * h), (i2 - i + 1) * h, h, fill
            )
            i = i2 + 1
    if overlay is not None:
        for ln in overlay.lines:
            canvas.line(ln.start, ln.end, 0.3 * unit, color="#cc3311")
    if domain is not None:
        canvas.polyline(domain_outline(domain), OUTLINE_W * unit, closed=True)
    return canvas.to_string()


# ----------------------------------------------------------------------
# CSV writers (comma-separated, header row, row-major grid order)
# ----------------------------------------------------------------------


def csv_lines(header, rows):
    out = [",".join(header)]
    for row in rows:
        out.append(",".join(_f(v) if isinstance(v, (int, float, np.floating)) else str(v) for v in row))
    return "\n".join(out) + "\n"


def family_csv(family):
    rows = []
    for ln in family.lines:
        rows.append(
            (
                ln.start[0], ln.start[1], ln.end[0], ln.end[1],
                ln.eta[0], ln.eta[1], ln.start_kind, ln.end_kind,
            )
        )
    return csv_lines(
        ["x1", "y1", "x2", "y2", "eta_x", "eta_y", "start_kind", "end_kind"], rows
    )


def medial_csv(medial):
    return csv_lines(["x1", "y1", "x2", "y2"], medial.to_csv_rows())


def defect_csv(defect):
    grid = defect.grid
    rows = []
    X, Y = grid.X, grid.Y
    for i in range(grid.nx):
        for j in range(grid.ny):
            if not grid.mask[i, j]:
                continue
            e = defect.eta[i, j]
            rows.append(
                (X[i, j], Y[i, j], defect.lam[i, j],
                 e[0] if np.isfinite(e[0]) else 0.0,
                 e[1] if np.isfinite(e[1]) else 0.0)
            )
    return csv_lines(["x", "y", "lambda", "eta_x", "eta_y"], rows)


def heightmap_csv(field):
    X, Y = field.points()
    rows = []
    nx, ny = field.shape
    for i in range(nx):
        for j in range(ny):
            rows.append((X[i, j], Y[i, j], field.w[i, j]))
    return csv_lines(["x", "y", "w"], rows)
