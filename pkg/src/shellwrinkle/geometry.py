"""Planar shape catalog with exact boundary distance, normals and medial axes.

The catalog is closed: disc, ellipse, half-disc, rectangle, convex polygon.
Every operation is a pure function of an immutable shape; all point-valued
arguments accept single points ``(2,)`` or batches ``(n, 2)``.

Conventions: boundaries are oriented counterclockwise, ``nu`` is the outward
unit normal, ``tau = rot90(nu)`` the unit tangent (counterclockwise rotation),
and the exit gradient ``grad d`` points away from the nearest boundary point.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .errors import AmbiguityError, DomainError, ParameterError, UnsupportedShapeError

CORNER_DELTA_FACTOR = 1e-3  # corner cutoff: delta = 1e-3 * diam by default
_BISECT_TOL = 1e-10  # bisector intersection tolerance for polygon axes


def rot90(v):
    """Counterclockwise rotation by 90 degrees; works on (..., 2) arrays."""
    v = np.asarray(v, dtype=float)
    out = np.empty_like(v)
    out[..., 0] = -v[..., 1]
    out[..., 1] = v[..., 0]
    return out


def _as_points(x):
    """Normalize point input to (n, 2); return (array, was_single)."""
    x = np.asarray(x, dtype=float)
    if x.ndim == 1:
        return x[None, :], True
    if x.ndim != 2 or x.shape[1] != 2:
        raise ValueError("points must have shape (2,) or (n, 2)")
    return x, False


def _unsingle(vals, single):
    return vals[0] if single else vals


@dataclass(frozen=True)
class BoundaryPoint:
    """A boundary sample: position, outward normal, tangent, arclength.

    At polygon corners the normal is undefined; ``corner`` is set and
    ``nu``/``tau`` are None.
    """

    position: np.ndarray
    nu: Optional[np.ndarray]
    tau: Optional[np.ndarray]
    arclength: float
    corner: bool = False


@dataclass(frozen=True)
class ParabolicArc:
    """Medial-axis arc in focus + directrix form.

    The arc is {x : |x - focus| = d(x, directrix)} with the directrix the
    line through ``directrix_point`` with unit normal ``directrix_normal``
    (pointing from the arc toward the line).  ``t_range`` parameterizes the
    arc by the coordinate along the directrix direction.
    """

    focus: np.ndarray
    directrix_point: np.ndarray
    directrix_normal: np.ndarray
    t_range: tuple

    def points(self, n=129):
        """Sample the arc as an (n, 2) polyline."""
        u = np.asarray(self.directrix_normal, float)
        u = u / np.hypot(*u)
        v = rot90(u)
        c = np.asarray(self.focus, float)
        p0 = np.asarray(self.directrix_point, float)
        h = (p0 - c) @ u  # distance focus -> directrix
        t = np.linspace(self.t_range[0], self.t_range[1], n)
        # In the (v, u) frame centered at the focus the arc is
        # s = (h^2 - t^2) / (2 h), measured toward the directrix.
        s = (h * h - t * t) / (2.0 * h)
        return c + t[:, None] * v[None, :] + s[:, None] * u[None, :]


@dataclass(frozen=True)
class MedialAxis:
    """Medial axis as straight segments, parabolic arcs, and vertices."""

    segments: list = field(default_factory=list)  # [((x1,y1),(x2,y2)), ...]
    arcs: list = field(default_factory=list)  # [ParabolicArc, ...]
    vertices: list = field(default_factory=list)  # [(point, degree), ...]

    def polylines(self, arc_samples=129):
        """All components as polylines (for CSV/SVG export and tests)."""
        lines = [np.asarray(seg, dtype=float) for seg in self.segments]
        lines += [arc.points(arc_samples) for arc in self.arcs]
        if not lines and self.vertices:
            lines = [np.asarray([v for v, _ in self.vertices], dtype=float)]
        return lines

    def to_csv_rows(self, arc_samples=129):
        """Flatten to (x1, y1, x2, y2) rows, one per sub-segment."""
        rows = []
        for line in self.polylines(arc_samples):
            for p, q in zip(line[:-1], line[1:]):
                rows.append((p[0], p[1], q[0], q[1]))
        return rows


class Domain:
    """Base class for catalog shapes.  Subclasses implement the exact
    closed-form queries; generic Lipschitz domains are rejected by design."""

    name = "domain"

    # -- queries every shape provides ------------------------------------
    def contains(self, x, tol=0.0):
        raise NotImplementedError

    def boundary_distance(self, x):
        """Shortest distance to the boundary; raises DomainError outside."""
        x, single = _as_points(x)
        d = self._signed_inside_distance(x)
        if np.any(d < -1e-12 * self.diameter()):
            raise DomainError(f"point outside {self.name}")
        return _unsingle(np.maximum(d, 0.0), single)

    def _signed_inside_distance(self, x):
        raise NotImplementedError

    def nearest_boundary_point(self, x):
        raise NotImplementedError

    def quickest_exit_gradient(self, x, tol=1e-9):
        """grad d at interior points off the medial axis (unit vector)."""
        x, single = _as_points(x)
        if np.any(self._signed_inside_distance(x) < -1e-12 * self.diameter()):
            raise DomainError(f"point outside {self.name}")
        if np.any(self._on_medial_axis(x, tol)):
            raise AmbiguityError("exit gradient undefined on the medial axis")
        y = self.nearest_boundary_point(x)
        g = x - y
        n = np.hypot(g[:, 0], g[:, 1])
        bad = n < 1e-14
        if np.any(bad):
            # on the boundary itself the gradient is the inward normal
            nu = self._outward_normal_at(y[bad])
            g[bad] = -nu
            n[bad] = 1.0
        return _unsingle(g / n[:, None], single)

    def _on_medial_axis(self, x, tol):
        raise NotImplementedError

    def _outward_normal_at(self, y):
        """Outward normal at boundary points (smooth points only)."""
        raise NotImplementedError

    def medial_axis(self):
        raise NotImplementedError

    def boundary_sample(self, n):
        """Quasi-uniform arclength sampling of the boundary."""
        raise NotImplementedError

    def bbox(self):
        """((xmin, ymin), (xmax, ymax))"""
        raise NotImplementedError

    def diameter(self):
        (x0, y0), (x1, y1) = self.bbox()
        return float(np.hypot(x1 - x0, y1 - y0))

    def area(self):
        raise NotImplementedError

    def corner_points(self):
        """Boundary corners (where the normal is undefined)."""
        return np.zeros((0, 2))

    def corner_delta(self):
        return CORNER_DELTA_FACTOR * self.diameter()

    # -- serialization -----------------------------------------------------
    def spec(self):
        raise NotImplementedError


@dataclass(frozen=True)
class Disc(Domain):
    radius: float
    center: tuple = (0.0, 0.0)
    name = "disc"

    def __post_init__(self):
        if self.radius <= 0:
            raise ParameterError("disc radius must be positive")

    def _c(self):
        return np.asarray(self.center, dtype=float)

    def contains(self, x, tol=0.0):
        x, single = _as_points(x)
        r = np.hypot(*(x - self._c()).T)
        return _unsingle(r <= self.radius + tol, single)

    def _signed_inside_distance(self, x):
        r = np.hypot(*(x - self._c()).T)
        return self.radius - r

    def nearest_boundary_point(self, x):
        x, single = _as_points(x)
        v = x - self._c()
        r = np.hypot(v[:, 0], v[:, 1])
        safe = np.where(r < 1e-300, 1.0, r)
        y = self._c() + self.radius * v / safe[:, None]
        y[r < 1e-300] = self._c() + np.array([self.radius, 0.0])
        return _unsingle(y, single)

    def _on_medial_axis(self, x, tol):
        r = np.hypot(*(x - self._c()).T)
        return r <= tol

    def _outward_normal_at(self, y):
        v = y - self._c()
        n = np.hypot(v[:, 0], v[:, 1])
        return v / n[:, None]

    def medial_axis(self):
        return MedialAxis(vertices=[(tuple(self._c()), 0)])

    def boundary_sample(self, n):
        if n < 4:
            raise ParameterError("need at least 4 boundary samples")
        th = 2.0 * np.pi * np.arange(n) / n
        pts = []
        for t in th:
            nu = np.array([np.cos(t), np.sin(t)])
            pts.append(
                BoundaryPoint(
                    position=self._c() + self.radius * nu,
                    nu=nu,
                    tau=rot90(nu),
                    arclength=float(self.radius * t),
                )
            )
        return pts

    def bbox(self):
        c = self._c()
        r = self.radius
        return ((c[0] - r, c[1] - r), (c[0] + r, c[1] + r))

    def area(self):
        return float(np.pi * self.radius**2)

    def perimeter(self):
        return float(2 * np.pi * self.radius)

    def spec(self):
        return {"shape": "disc", "radius": self.radius, "center": list(self.center)}


@dataclass(frozen=True)
class Ellipse(Domain):
    """Axis-aligned ellipse x1^2/a^2 + x2^2/b^2 < 1 centered at the origin,
    with 0 < b < a."""

    a: float
    b: float
    name = "ellipse"

    def __post_init__(self):
        if not (0 < self.b < self.a):
            raise ParameterError("ellipse requires 0 < b < a")

    def contains(self, x, tol=0.0):
        x, single = _as_points(x)
        q = (x[:, 0] / self.a) ** 2 + (x[:, 1] / self.b) ** 2
        return _unsingle(q <= 1.0 + tol, single)

    def _foot_parameter(self, x):
        """Largest root t of the foot equation, vectorized bisection.

        The nearest boundary point of p is ((a^2 p1)/(t+a^2), (b^2 p2)/(t+b^2))
        where t solves (a p1/(t+a^2))^2 + (b p2/(t+b^2))^2 = 1.  For points in
        the closed ellipse the relevant root is the largest one, which lies in
        [-b^2 + b|p2|, -b^2 + hypot(a p1, b p2)].
        """
        a, b = self.a, self.b
        p = np.abs(x)
        r = np.hypot(a * p[:, 0], b * p[:, 1])
        lo = -b * b + b * p[:, 1]
        hi = -b * b + r
        hi = np.maximum(hi, lo + 1e-300)
        for _ in range(80):
            mid = 0.5 * (lo + hi)
            f = (a * p[:, 0] / (mid + a * a)) ** 2 + (b * p[:, 1] / (mid + b * b)) ** 2 - 1.0
            take = f > 0.0
            lo = np.where(take, mid, lo)
            hi = np.where(take, hi, mid)
        return 0.5 * (lo + hi)

    def nearest_boundary_point(self, x):
        x, single = _as_points(x)
        a, b = self.a, self.b
        y = np.empty_like(x)
        p = np.abs(x)
        on_major = p[:, 1] < 1e-14 * b
        # off-axis (or on the minor axis): the foot equation is well posed
        gen = ~on_major
        if np.any(gen):
            t = self._foot_parameter(x[gen])
            y[gen, 0] = a * a * p[gen, 0] / (t + a * a)
            y[gen, 1] = b * b * p[gen, 1] / (t + b * b)
        if np.any(on_major):
            # on the major axis the foot is either the vertex or a symmetric
            # off-axis pair; return the upper representative of the pair.
            x1 = p[on_major, 0]
            cusp = a - b * b / a
            beyond = x1 >= cusp
            c = np.minimum(x1 * a / (a * a - b * b), 1.0)
            yy = np.empty((int(on_major.sum()), 2))
            yy[:, 0] = np.where(beyond, a, a * c)
            yy[:, 1] = np.where(beyond, 0.0, b * np.sqrt(np.maximum(1 - c * c, 0.0)))
            y[on_major] = yy
        # restore quadrant signs (points exactly on an axis keep the + side)
        sgn = np.where(np.abs(x) < 1e-300, 1.0, np.sign(np.where(x == 0.0, 1.0, x)))
        return _unsingle(y * sgn, single)

    def _signed_inside_distance(self, x):
        y = self.nearest_boundary_point(x)
        y = np.atleast_2d(y)
        d = np.hypot(*(x - y).T)
        inside = (x[:, 0] / self.a) ** 2 + (x[:, 1] / self.b) ** 2 <= 1.0
        return np.where(inside, d, -d)

    def medial_segment_halflength(self):
        return self.a - self.b**2 / self.a

    def _on_medial_axis(self, x, tol):
        return (np.abs(x[:, 1]) <= tol) & (np.abs(x[:, 0]) <= self.medial_segment_halflength() + tol)

    def _outward_normal_at(self, y):
        g = np.stack([y[:, 0] / self.a**2, y[:, 1] / self.b**2], axis=1)
        n = np.hypot(g[:, 0], g[:, 1])
        return g / n[:, None]

    def medial_axis(self):
        m = self.medial_segment_halflength()
        return MedialAxis(
            segments=[((-m, 0.0), (m, 0.0))],
            vertices=[((-m, 0.0), 1), ((m, 0.0), 1)],
        )

    def _param_table(self, n_table=16384):
        phi = np.linspace(0.0, 2 * np.pi, n_table + 1)
        pts = np.stack([self.a * np.cos(phi), self.b * np.sin(phi)], axis=1)
        seg = np.hypot(*(np.diff(pts, axis=0)).T)
        s = np.concatenate([[0.0], np.cumsum(seg)])
        return phi, s

    def perimeter(self):
        from scipy.special import ellipe

        m = 1.0 - (self.b / self.a) ** 2
        return float(4.0 * self.a * ellipe(m))

    def boundary_sample(self, n):
        if n < 4:
            raise ParameterError("need at least 4 boundary samples")
        phi_tab, s_tab = self._param_table()
        total = s_tab[-1]
        targets = total * np.arange(n) / n
        phi = np.interp(targets, s_tab, phi_tab)
        pos = np.stack([self.a * np.cos(phi), self.b * np.sin(phi)], axis=1)
        nu = self._outward_normal_at(pos)
        pts = []
        for i in range(n):
            pts.append(
                BoundaryPoint(
                    position=pos[i],
                    nu=nu[i],
                    tau=rot90(nu[i]),
                    arclength=float(targets[i]),
                )
            )
        return pts

    def bbox(self):
        return ((-self.a, -self.b), (self.a, self.b))

    def area(self):
        return float(np.pi * self.a * self.b)

    def boundary_curvature(self, y):
        """Curvature of the boundary at boundary points (convex: > 0)."""
        y = np.atleast_2d(np.asarray(y, dtype=float))
        a, b = self.a, self.b
        # kappa = a b / (a^2 sin^2 t + b^2 cos^2 t)^{3/2}, cos t = y1/a
        c2 = np.clip((y[:, 0] / a) ** 2, 0.0, 1.0)
        s2 = 1.0 - c2
        return a * b / (a * a * s2 + b * b * c2) ** 1.5

    def spec(self):
        return {"shape": "ellipse", "a": self.a, "b": self.b}


@dataclass(frozen=True)
class Rectangle(Domain):
    """Axis-aligned rectangle (-a, a) x (-b, b) with 0 < b < a."""

    a: float
    b: float
    name = "rectangle"

    def __post_init__(self):
        if not (0 < self.b < self.a):
            raise ParameterError("rectangle requires 0 < b < a")

    def contains(self, x, tol=0.0):
        x, single = _as_points(x)
        ok = (np.abs(x[:, 0]) <= self.a + tol) & (np.abs(x[:, 1]) <= self.b + tol)
        return _unsingle(ok, single)

    def _signed_inside_distance(self, x):
        return np.minimum(self.a - np.abs(x[:, 0]), self.b - np.abs(x[:, 1]))

    def nearest_boundary_point(self, x):
        x, single = _as_points(x)
        dx = self.a - np.abs(x[:, 0])
        dy = self.b - np.abs(x[:, 1])
        y = x.copy()
        use_x = dx <= dy
        y[use_x, 0] = np.copysign(self.a, np.where(np.abs(x[use_x, 0]) < 1e-300, 1.0, x[use_x, 0]))
        y[~use_x, 1] = np.copysign(self.b, np.where(np.abs(x[~use_x, 1]) < 1e-300, 1.0, x[~use_x, 1]))
        return _unsingle(y, single)

    def _on_medial_axis(self, x, tol):
        dx = self.a - np.abs(x[:, 0])
        dy = self.b - np.abs(x[:, 1])
        central = (np.abs(x[:, 1]) <= tol) & (np.abs(x[:, 0]) <= self.a - self.b + tol)
        corner = np.abs(dx - dy) <= tol
        return central | corner

    def _outward_normal_at(self, y):
        nu = np.zeros_like(y)
        on_x = np.abs(np.abs(y[:, 0]) - self.a) < 1e-9 * self.a
        nu[on_x, 0] = np.sign(y[on_x, 0])
        nu[~on_x, 1] = np.sign(y[~on_x, 1])
        return nu

    def medial_axis(self):
        a, b = self.a, self.b
        m = a - b
        segs = [((-m, 0.0), (m, 0.0))]
        for sx in (-1, 1):
            for sy in (-1, 1):
                segs.append(((sx * a, sy * b), (sx * m, 0.0)))
        verts = [((-m, 0.0), 3), ((m, 0.0), 3)]
        return MedialAxis(segments=segs, vertices=verts)

    def as_polygon(self):
        a, b = self.a, self.b
        return ConvexPolygon(((-a, -b), (a, -b), (a, b), (-a, b)))

    def boundary_sample(self, n):
        return self.as_polygon().boundary_sample(n)

    def corner_points(self):
        a, b = self.a, self.b
        return np.array([(-a, -b), (a, -b), (a, b), (-a, b)], dtype=float)

    def bbox(self):
        return ((-self.a, -self.b), (self.a, self.b))

    def area(self):
        return float(4 * self.a * self.b)

    def perimeter(self):
        return float(4 * (self.a + self.b))

    def spec(self):
        return {"shape": "rectangle", "a": self.a, "b": self.b}


@dataclass(frozen=True)
class HalfDisc(Domain):
    """Half-disc {|x - center| < radius, (x - center).u > 0} where u is the
    unit vector at angle ``orientation``; the flat side passes through the
    center."""

    radius: float
    center: tuple = (0.0, 0.0)
    orientation: float = np.pi / 2
    name = "half_disc"

    def __post_init__(self):
        if self.radius <= 0:
            raise ParameterError("half-disc radius must be positive")

    def _frame(self):
        u = np.array([np.cos(self.orientation), np.sin(self.orientation)])
        return np.asarray(self.center, dtype=float), u, -rot90(u)

    def to_local(self, x):
        """Map to the canonical frame: center at origin, flat side on v=0,
        bulge toward v>0.  Returns (t, v) with t along the flat side."""
        c, u, w = self._frame()
        x, single = _as_points(x)
        d = x - c
        loc = np.stack([d @ w, d @ u], axis=1)
        return _unsingle(loc, single)

    def from_local(self, loc):
        c, u, w = self._frame()
        loc, single = _as_points(loc)
        return _unsingle(c + loc[:, :1] * w + loc[:, 1:] * u, single)

    def contains(self, x, tol=0.0):
        single = np.asarray(x, dtype=float).ndim == 1
        loc = np.atleast_2d(self.to_local(x))
        r = np.hypot(loc[:, 0], loc[:, 1])
        ok = (r <= self.radius + tol) & (loc[:, 1] >= -tol)
        return ok[0] if single else ok

    def _signed_inside_distance(self, x):
        loc = np.atleast_2d(self.to_local(x))
        r = np.hypot(loc[:, 0], loc[:, 1])
        d_arc = self.radius - r
        d_flat = loc[:, 1]
        inside = (d_arc >= 0) & (d_flat >= 0)
        d = np.minimum(d_arc, d_flat)
        # outside: distance is not needed exactly, only its sign
        return np.where(inside, d, -np.abs(d))

    def nearest_boundary_point(self, x):
        x, single = _as_points(x)
        loc = np.atleast_2d(self.to_local(x))
        r = np.hypot(loc[:, 0], loc[:, 1])
        d_arc = self.radius - r
        d_flat = loc[:, 1]
        y = loc.copy()
        use_arc = d_arc <= d_flat
        safe = np.where(r < 1e-300, 1.0, r)
        y[use_arc] = self.radius * loc[use_arc] / safe[use_arc, None]
        y[~use_arc, 1] = 0.0
        return _unsingle(np.atleast_2d(self.from_local(y)), single)

    def _on_medial_axis(self, x, tol):
        loc = np.atleast_2d(self.to_local(x))
        # arc: 2 R v = R^2 - t^2
        res = 2 * self.radius * loc[:, 1] - (self.radius**2 - loc[:, 0] ** 2)
        return np.abs(res) <= 2 * self.radius * tol

    def _outward_normal_at(self, y):
        loc = np.atleast_2d(self.to_local(y))
        r = np.hypot(loc[:, 0], loc[:, 1])
        on_arc = np.abs(r - self.radius) < 1e-9 * self.radius
        nu_loc = np.zeros_like(loc)
        nu_loc[on_arc] = loc[on_arc] / r[on_arc, None]
        nu_loc[~on_arc] = np.array([0.0, -1.0])
        c, u, w = self._frame()
        return nu_loc[:, :1] * w + nu_loc[:, 1:] * u

    def medial_axis(self):
        c, u, w = self._frame()
        arc = ParabolicArc(
            focus=c,
            directrix_point=c + self.radius * u,
            directrix_normal=u,
            t_range=(-self.radius, self.radius),
        )
        return MedialAxis(arcs=[arc])

    def corner_points(self):
        c, u, w = self._frame()
        return np.stack([c - self.radius * w, c + self.radius * w])

    def boundary_sample(self, n):
        if n < 4:
            raise ParameterError("need at least 4 boundary samples")
        R = self.radius
        total = (2 + np.pi) * R
        targets = total * np.arange(n) / n
        pts = []
        corners = {0.0, 2 * R}
        for s in targets:
            if s < 2 * R:  # flat side, from t=-R to t=R
                t = -R + s
                loc = np.array([t, 0.0])
                nu_loc = np.array([0.0, -1.0])
                corner = any(abs(s - cval) < 1e-12 * R for cval in corners)
            else:  # arc, from t=R back around to t=-R
                th = (s - 2 * R) / R
                loc = np.array([R * np.cos(th), R * np.sin(th)])
                nu_loc = loc / R
                corner = False
            c, u, w = self._frame()
            pos = c + loc[0] * w + loc[1] * u
            nu = None if corner else nu_loc[0] * w + nu_loc[1] * u
            pts.append(
                BoundaryPoint(
                    position=pos,
                    nu=nu,
                    tau=None if corner else rot90(nu),
                    arclength=float(s),
                    corner=corner,
                )
            )
        return pts

    def bbox(self):
        c, u, w = self._frame()
        # bounding box of the half disc = hull of corners and arc extremes
        pts = [c - self.radius * w, c + self.radius * w]
        for th in np.linspace(0, np.pi, 181):
            pts.append(c + self.radius * (np.cos(th) * w + np.sin(th) * u))
        pts = np.array(pts)
        return ((pts[:, 0].min(), pts[:, 1].min()), (pts[:, 0].max(), pts[:, 1].max()))

    def area(self):
        return float(0.5 * np.pi * self.radius**2)

    def perimeter(self):
        return float((2 + np.pi) * self.radius)

    def spec(self):
        return {
            "shape": "half_disc",
            "radius": self.radius,
            "center": list(self.center),
            "orientation": self.orientation,
        }


class ConvexPolygon(Domain):
    """Strictly convex polygon with CCW vertices.  Collinear or repeated
    vertices are rejected."""

    name = "convex_polygon"

    def __init__(self, vertices):
        v = np.asarray(vertices, dtype=float)
        if v.ndim != 2 or v.shape[1] != 2 or len(v) < 3:
            raise ParameterError("need at least 3 planar vertices")
        scale = np.max(np.abs(v)) + 1.0
        n = len(v)
        for i in range(n):
            e1 = v[(i + 1) % n] - v[i]
            e2 = v[(i + 2) % n] - v[(i + 1) % n]
            cross = e1[0] * e2[1] - e1[1] * e2[0]
            if np.hypot(*e1) < 1e-12 * scale:
                raise ParameterError("repeated polygon vertices")
            if cross <= 1e-12 * scale**2:
                raise ParameterError("polygon must be strictly convex with CCW vertices")
        self.vertices = v
        d = np.roll(v, -1, axis=0) - v
        self.edge_lengths = np.hypot(d[:, 0], d[:, 1])
        self.edge_tangents = d / self.edge_lengths[:, None]
        self.edge_normals = -rot90(self.edge_tangents)  # outward for CCW
        self.edge_offsets = np.sum(self.edge_normals * v, axis=1)  # x.nu = c on edge

    def __repr__(self):
        return f"ConvexPolygon({self.vertices.tolist()})"

    def n_sides(self):
        return len(self.vertices)

    def side_distances(self, x):
        """(n_pts, n_sides) array of inward distances c_i - x.nu_i."""
        x = np.atleast_2d(np.asarray(x, dtype=float))
        return self.edge_offsets[None, :] - x @ self.edge_normals.T

    def contains(self, x, tol=0.0):
        x, single = _as_points(x)
        ok = np.all(self.side_distances(x) >= -tol, axis=1)
        return _unsingle(ok, single)

    def _signed_inside_distance(self, x):
        return self.side_distances(x).min(axis=1)

    def nearest_boundary_point(self, x):
        x, single = _as_points(x)
        sd = self.side_distances(x)
        i = np.argmin(sd, axis=1)
        nu = self.edge_normals[i]
        y = x + sd[np.arange(len(x)), i][:, None] * nu
        return _unsingle(y, single)

    def nearest_side(self, x):
        x = np.atleast_2d(np.asarray(x, dtype=float))
        return np.argmin(self.side_distances(x), axis=1)

    def _on_medial_axis(self, x, tol):
        sd = np.sort(self.side_distances(x), axis=1)
        return sd[:, 1] - sd[:, 0] <= tol

    def _outward_normal_at(self, y):
        return self.edge_normals[self.nearest_side(y)]

    def medial_axis(self):
        """Exact medial axis from bisector intersections.

        Nodes are polygon vertices plus every point equidistant to three or
        more sides at minimal distance; edges are the bisector segments of
        side pairs between consecutive nodes.
        """
        v = self.vertices
        n = len(v)
        nodes = [tuple(p) for p in v]
        node_d = [0.0] * n
        tol = max(_BISECT_TOL, 1e-12 * self.diameter())
        # tri-bisector candidates
        for i in range(n):
            for j in range(i + 1, n):
                for k in range(j + 1, n):
                    A = np.stack([self.edge_normals[i] - self.edge_normals[j],
                                  self.edge_normals[i] - self.edge_normals[k]])
                    b = np.array([self.edge_offsets[i] - self.edge_offsets[j],
                                  self.edge_offsets[i] - self.edge_offsets[k]])
                    det = A[0, 0] * A[1, 1] - A[0, 1] * A[1, 0]
                    if abs(det) < 1e-14:
                        continue
                    p = np.linalg.solve(A, b)
                    sd = self.side_distances(p)[0]
                    di = sd[i]
                    if di < -tol or sd.min() < di - tol:
                        continue
                    nodes.append((p[0], p[1]))
                    node_d.append(di)
        # dedupe
        uniq = []
        uniq_d = []
        for p, dd in zip(nodes, node_d):
            if not any(np.hypot(p[0] - q[0], p[1] - q[1]) < 10 * tol for q in uniq):
                uniq.append(p)
                uniq_d.append(dd)
        pts = np.array(uniq)
        sd_all = self.side_distances(pts)
        segments = []
        degree = np.zeros(len(pts), dtype=int)
        for i in range(n):
            for j in range(i + 1, n):
                # nodes lying on the (i, j) bisector at minimal distance
                on = (np.abs(sd_all[:, i] - sd_all[:, j]) <= 10 * tol) & (
                    sd_all[:, i] <= sd_all.min(axis=1) + 10 * tol
                )
                idx = np.where(on)[0]
                if len(idx) < 2:
                    continue
                # order along the bisector direction and keep valid spans
                direction = self.edge_normals[j] - self.edge_normals[i]
                if np.hypot(*direction) < 1e-12:
                    direction = rot90(self.edge_normals[i])
                order = np.argsort(pts[idx] @ direction)
                idx = idx[order]
                for u_, w_ in zip(idx[:-1], idx[1:]):
                    mid = 0.5 * (pts[u_] + pts[w_])
                    sd_mid = np.sort(self.side_distances(mid)[0])
                    if sd_mid[1] - sd_mid[0] <= 10 * tol and np.hypot(*(pts[u_] - pts[w_])) > 10 * tol:
                        segments.append((tuple(pts[u_]), tuple(pts[w_])))
                        degree[u_] += 1
                        degree[w_] += 1
        interior = [i for i in range(len(pts)) if uniq_d[i] > 10 * tol]
        vertices = [(tuple(pts[i]), int(degree[i])) for i in interior]
        return MedialAxis(segments=segments, vertices=vertices)

    def incircle(self):
        """(incenter, inradius) of the maximal inscribed circle (Chebyshev)."""
        from scipy.optimize import linprog

        n = len(self.vertices)
        # maximize t  s.t.  x.nu_i + t <= c_i
        res = linprog(
            c=[0.0, 0.0, -1.0],
            A_ub=np.hstack([self.edge_normals, np.ones((n, 1))]),
            b_ub=self.edge_offsets,
            bounds=[(None, None), (None, None), (0, None)],
            method="highs",
        )
        if not res.success:
            raise UnsupportedShapeError("could not compute incircle")
        return np.array(res.x[:2]), float(res.x[2])

    def is_tangential(self, tol=1e-9):
        """True if the incircle touches every side."""
        c, r = self.incircle()
        sd = self.side_distances(c)[0]
        return bool(np.all(np.abs(sd - r) <= tol * (1 + r)))

    def boundary_sample(self, n):
        if n < 4:
            raise ParameterError("need at least 4 boundary samples")
        v = self.vertices
        m = len(v)
        L = self.edge_lengths
        total = L.sum()
        cum = np.concatenate([[0.0], np.cumsum(L)])
        pts = []
        # vertices are always included; distribute the rest by edge length
        per_edge = np.maximum(1, np.round(n * L / total).astype(int))
        for i in range(m):
            k = per_edge[i]
            for jj in range(k):
                frac = jj / k
                pos = v[i] + frac * (v[(i + 1) % m] - v[i])
                corner = jj == 0
                nu = None if corner else self.edge_normals[i]
                pts.append(
                    BoundaryPoint(
                        position=pos,
                        nu=nu,
                        tau=None if corner else self.edge_tangents[i],
                        arclength=float(cum[i] + frac * L[i]),
                        corner=corner,
                    )
                )
        return pts

    def corner_points(self):
        return self.vertices.copy()

    def bbox(self):
        v = self.vertices
        return ((v[:, 0].min(), v[:, 1].min()), (v[:, 0].max(), v[:, 1].max()))

    def area(self):
        v = self.vertices
        x, y = v[:, 0], v[:, 1]
        return float(0.5 * np.abs(np.dot(x, np.roll(y, -1)) - np.dot(y, np.roll(x, -1))))

    def perimeter(self):
        return float(self.edge_lengths.sum())

    def spec(self):
        return {"shape": "convex_polygon", "vertices": self.vertices.tolist()}


def make_domain(spec):
    """Build a catalog shape from a JSON-compatible description."""
    if not isinstance(spec, dict) or "shape" not in spec:
        raise ParameterError("domain spec must be a mapping with a 'shape' key")
    kind = spec["shape"]
    if kind == "disc":
        return Disc(radius=float(spec["radius"]), center=tuple(spec.get("center", (0.0, 0.0))))
    if kind == "ellipse":
        return Ellipse(a=float(spec["a"]), b=float(spec["b"]))
    if kind == "rectangle":
        return Rectangle(a=float(spec["a"]), b=float(spec["b"]))
    if kind == "half_disc":
        return HalfDisc(
            radius=float(spec["radius"]),
            center=tuple(spec.get("center", (0.0, 0.0))),
            orientation=float(spec.get("orientation", np.pi / 2)),
        )
    if kind == "convex_polygon":
        return ConvexPolygon(spec["vertices"])
    raise UnsupportedShapeError(f"unknown shape {kind!r}")
