"""Two-scale herringbone test fields for a constant (or slowly varying)
target defect, and the optimized parameter choices.

A herringbone superimposes twinned uni-directional wrinkles on alternating
bands of in-plane shear.  Away from the cutoff walls the construction
accommodates the target exactly:

    e(v) + (1/2) grad w (x) grad w = (1/2) mu.

The piecewise variant tiles the domain with squares, freezes the target to
its cell average, and glues the per-square fields with edge cutoffs.
All fields have closed-form derivatives; grids are sampled from those.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .errors import ParameterError, RegimeError
from .geometry import Domain, Rectangle

GRID_PER_WAVELENGTH = 32  # default h = l_wr / 32


# ----------------------------------------------------------------------
# one-dimensional profiles
# ----------------------------------------------------------------------


def profile_A(t, lambda1, lambda2):
    """One-periodic shear profile: slope lambda2/2 on [0, theta), slope
    -lambda1/2 on [theta, 1], A(0) = 0; the slopes integrate to zero."""
    if lambda1 < 0 or lambda2 <= 0:
        raise ParameterError("profile_A needs lambda2 > 0 and lambda1 >= 0")
    theta = lambda1 / (lambda1 + lambda2)
    tt = np.mod(np.asarray(t, dtype=float), 1.0)
    up = 0.5 * lambda2 * tt
    down = 0.5 * lambda2 * theta - 0.5 * lambda1 * (tt - theta)
    return np.where(tt < theta, up, down)


def profile_A_prime(t, lambda1, lambda2):
    theta = lambda1 / (lambda1 + lambda2)
    tt = np.mod(np.asarray(t, dtype=float), 1.0)
    return np.where(tt < theta, 0.5 * lambda2, -0.5 * lambda1)


def profile_W(t):
    """Wrinkle profile sqrt(2) cos t."""
    return np.sqrt(2.0) * np.cos(np.asarray(t, dtype=float))


def profile_V(t):
    """The 2 pi-periodic solution of V' + |W'|^2 = 1 with V(0) = 0,
    i.e. V(t) = sin(2t)/2."""
    return 0.5 * np.sin(2.0 * np.asarray(t, dtype=float))


# ----------------------------------------------------------------------
# parameters and targets
# ----------------------------------------------------------------------


@dataclass(frozen=True)
class HerringboneParams:
    l_wr: float
    l_sh: float
    l_avg: float
    delta_int: float
    delta_ext: float

    def __post_init__(self):
        for name in ("l_wr", "l_sh", "l_avg", "delta_int", "delta_ext"):
            if getattr(self, name) <= 0:
                raise ParameterError(f"{name} must be positive")

    def validate_single(self, theta):
        """Single-square constraint: delta_int < theta l_sh / 2 (vacuous for
        rank-one targets, which have no internal walls)."""
        if theta > 0 and not self.delta_int < 0.5 * theta * self.l_sh:
            raise ParameterError("delta_int must be below theta l_sh / 2")

    def validate_full(self, lam, Lam):
        """Lattice constraint: delta_int < (lam/Lam) l_sh / 4 and
        delta_ext < l_avg / 2."""
        if lam > 0 and not self.delta_int < 0.25 * (lam / Lam) * self.l_sh:
            raise ParameterError("delta_int must be below (lam/Lam) l_sh / 4")
        if not self.delta_ext < 0.5 * self.l_avg:
            raise ParameterError("delta_ext must be below l_avg / 2")


class TargetDefect:
    """Constant matrix or Lipschitz field target, with eigen-structure.

    For isotropic targets the first eigenvector defaults to e1.  Rank-one
    targets (smallest eigenvalue zero) are allowed: they produce wall-free
    uni-directional wrinkles.
    """

    def __init__(self, mu):
        if callable(mu):
            self.field = mu
            self.constant = None
        else:
            m = np.asarray(mu, dtype=float)
            if m.shape != (2, 2) or abs(m[0, 1] - m[1, 0]) > 1e-12:
                raise ParameterError("constant target must be symmetric 2x2")
            self.constant = m
            self.field = None

    def matrix_at(self, x):
        if self.constant is not None:
            x = np.atleast_2d(x)
            return np.broadcast_to(self.constant, (len(x), 2, 2)).copy()
        x = np.atleast_2d(x)
        vals = np.asarray(self.field(x), dtype=float)
        return vals.reshape(len(x), 2, 2)

    @staticmethod
    def eigen(m):
        """Sorted eigen-decomposition (lam1 <= lam2, eta1, eta2) with the
        e1 tie-break for isotropic matrices."""
        a, b, c = m[0, 0], m[0, 1], m[1, 1]
        if abs(b) < 1e-14 * (1 + abs(a) + abs(c)):
            if a <= c:
                return a, c, np.array([1.0, 0.0]), np.array([0.0, 1.0])
            return c, a, np.array([0.0, 1.0]), np.array([1.0, 0.0])
        tr = a + c
        # disc via the stable form sqrt(((a-c)/2)^2 + b^2)
        disc = np.hypot(0.5 * (a - c), b)
        lam1, lam2 = tr / 2 - disc, tr / 2 + disc
        # pick the better-conditioned eigenvector row
        cand1 = np.array([b, lam1 - a])
        cand2 = np.array([lam1 - c, b])
        v1 = cand1 if np.hypot(*cand1) >= np.hypot(*cand2) else cand2
        v1 = v1 / np.hypot(*v1)
        v2 = np.array([-v1[1], v1[0]])
        return lam1, lam2, v1, v2

    def bounds(self, sample_pts=None):
        """(lam, Lam): global eigenvalue bounds (exact for constants)."""
        if self.constant is not None:
            l1, l2, _, _ = self.eigen(self.constant)
            return float(l1), float(l2)
        mats = self.matrix_at(sample_pts)
        los, his = [], []
        for m in mats:
            l1, l2, _, _ = self.eigen(m)
            los.append(l1)
            his.append(l2)
        return float(min(los)), float(max(his))


def optimal_params(b, k, mu: TargetDefect, sample_pts=None) -> HerringboneParams:
    """Scale-optimized parameters:
    l_wr = (b/k)^(1/4), l_avg = l_wr^(1/5), l_sh = sqrt(l_wr l_avg),
    delta_int = l_wr, delta_ext = l_sh.

    Raises RegimeError when the validity inequality l_wr^(2/5) < lam/(4 Lam)
    fails (for rank-one targets, which carry no internal walls, only
    l_wr << 1 is required).
    """
    if b <= 0 or k <= 0:
        raise ParameterError("b and k must be positive")
    if b > k:
        raise RegimeError("requires b <= k")
    l_wr = (b / k) ** 0.25
    l_avg = l_wr ** 0.2
    l_sh = np.sqrt(l_wr * l_avg)
    lam, Lam = mu.bounds(sample_pts)
    if lam > 1e-14 * max(Lam, 1.0):
        if not l_wr ** 0.4 < 0.25 * lam / Lam:
            raise RegimeError("validity inequality l_wr^(2/5) < lam/(4 Lam) fails")
    else:
        # rank-one targets carry no internal walls; only the scale ordering
        # l_wr << l_sh << l_avg matters
        if not l_wr ** 0.4 < 0.5:
            raise RegimeError("l_wr too large for a wall-free pattern")
    return HerringboneParams(
        l_wr=l_wr, l_sh=l_sh, l_avg=l_avg, delta_int=l_wr, delta_ext=l_sh
    )


# ----------------------------------------------------------------------
# cutoffs
# ----------------------------------------------------------------------


def smoothstep(u):
    """Quintic smoothstep on [0, 1] (C^2: s'' vanishes at both ends)."""
    u = np.clip(u, 0.0, 1.0)
    return u**3 * (10.0 - 15.0 * u + 6.0 * u**2)


def smoothstep_d1(u):
    uu = np.clip(u, 0.0, 1.0)
    v = 30.0 * uu**2 - 60.0 * uu**3 + 30.0 * uu**4
    return np.where((u > 0) & (u < 1), v, 0.0)


def smoothstep_d2(u):
    uu = np.clip(u, 0.0, 1.0)
    v = 60.0 * uu - 180.0 * uu**2 + 120.0 * uu**3
    return np.where((u > 0) & (u < 1), v, 0.0)


def ramp(d, lo, hi):
    """C^2 ramp in the scalar d: 0 for d <= lo, 1 for d >= hi.
    Returns (value, d/dd, d2/dd2)."""
    width = hi - lo
    u = (np.asarray(d, dtype=float) - lo) / width
    return smoothstep(u), smoothstep_d1(u) / width, smoothstep_d2(u) / width**2


# ----------------------------------------------------------------------
# the single-square herringbone (analytic evaluator)
# ----------------------------------------------------------------------


class HerringboneField:
    """Closed-form herringbone displacements for a constant target.

    Evaluates v, w and all first/second derivatives analytically; grids and
    stencils are sampled views of this object.
    """

    def __init__(self, mu_matrix, params: HerringboneParams, single=True):
        m = np.asarray(mu_matrix, dtype=float)
        lam1, lam2, eta1, eta2 = TargetDefect.eigen(m)
        if lam1 < -1e-12 or lam2 <= 0:
            raise ParameterError("target defect must be positive semidefinite, nonzero")
        lam1 = max(lam1, 0.0)
        self.mu = m
        self.lam1, self.lam2 = lam1, lam2
        self.eta1, self.eta2 = eta1, eta2
        self.tr = lam1 + lam2
        self.theta = lam1 / (lam1 + lam2)
        self.params = params
        if single:
            params.validate_single(self.theta)
        self.rank_one = self.theta < 1e-12
        # band geometry
        self.mdir = (eta2 - eta1) / np.sqrt(2.0)  # wall normal
        self.pdir = (eta2 + eta1) / np.sqrt(2.0)
        self.l_sh = params.l_sh
        self.l_wr = params.l_wr
        self.d_int = params.delta_int

    # -- band helpers ---------------------------------------------------
    def _band(self, x):
        """(eta at x, distance to the jump set, sign of d(dist)/ds)."""
        x = np.atleast_2d(x)
        s = x @ self.mdir
        if self.rank_one:
            eta = np.broadcast_to(self.eta2, x.shape)
            dist = np.full(len(x), np.inf)
            dsign = np.zeros(len(x))
            return eta, dist, dsign
        u = np.mod(s, self.l_sh)
        in_first = u < self.theta * self.l_sh
        eta = np.where(in_first[:, None], self.eta1[None, :], self.eta2[None, :])
        d0 = np.minimum(u, self.l_sh - u)
        d1 = np.abs(u - self.theta * self.l_sh)
        dist = np.minimum(d0, d1)
        # sign of the derivative of dist with respect to s
        up0 = (u < 0.5 * self.l_sh) & (d0 <= d1)
        up1 = (u < self.theta * self.l_sh) & (d1 < d0)
        dsign = np.where(d0 <= d1, np.where(up0, 1.0, -1.0), np.where(up1, -1.0, 1.0))
        return eta, dist, dsign

    def chi_int(self, x):
        """Internal cutoff and derivatives: (chi, grad chi, hess chi)."""
        x = np.atleast_2d(x)
        if self.rank_one:
            n = len(x)
            return np.ones(n), np.zeros((n, 2)), np.zeros((n, 2, 2))
        eta, dist, dsign = self._band(x)
        val, d1, d2 = ramp(dist, 0.5 * self.d_int, self.d_int)
        grad = (d1 * dsign)[:, None] * self.mdir[None, :]
        hess = (d2)[:, None, None] * np.einsum("i,j->ij", self.mdir, self.mdir)[None, :, :]
        return val, grad, hess

    # -- displacement pieces ---------------------------------------------
    def shear(self, x):
        """v_sh and its gradient: (v (n,2), grad v (n,2,2))."""
        x = np.atleast_2d(x)
        if self.rank_one:
            return np.zeros_like(x), np.zeros((len(x), 2, 2))
        arg = (x @ (self.eta2 - self.eta1)) / (np.sqrt(2.0) * self.l_sh)
        Aval = profile_A(arg, self.lam1, self.lam2)
        Ader = profile_A_prime(arg, self.lam1, self.lam2)
        v = np.sqrt(2.0) * self.l_sh * Aval[:, None] * (self.eta2 + self.eta1)[None, :]
        grad = Ader[:, None, None] * np.einsum(
            "i,j->ij", self.eta2 + self.eta1, (self.eta2 - self.eta1) / np.sqrt(2.0)
        )[None, :, :] * np.sqrt(2.0)
        return v, grad

    def wrinkle(self, x):
        """(v_wr, grad v_wr, w_wr, grad w_wr, hess w_wr), before cutoffs.

        eta is constant within each band so derivatives are taken at fixed
        eta; the cutoff removes the bands' jump set from the support.
        """
        x = np.atleast_2d(x)
        eta, dist, _ = self._band(x)
        t = np.sum(x * eta, axis=1) / self.l_wr
        ct, st = np.cos(t), np.sin(t)
        amp_w = np.sqrt(self.tr) * self.l_wr
        w = amp_w * np.sqrt(2.0) * ct
        grad_w = (-amp_w * np.sqrt(2.0) * st / self.l_wr)[:, None] * eta
        hess_w = (-amp_w * np.sqrt(2.0) * ct / self.l_wr**2)[:, None, None] * np.einsum(
            "ni,nj->nij", eta, eta
        )
        Vval = profile_V(t)
        Vder = np.cos(2.0 * t)
        amp_v = 0.5 * self.tr * self.l_wr
        v = amp_v * Vval[:, None] * eta
        grad_v = amp_v * (Vder / self.l_wr)[:, None, None] * np.einsum("ni,nj->nij", eta, eta)
        return v, grad_v, w, grad_w, hess_w

    # -- assembled fields -------------------------------------------------
    def evaluate(self, x):
        """All assembled fields at points x: dict with v, grad_v, w, grad_w,
        hess_w, chi (internal cutoff), wall mask."""
        x = np.atleast_2d(x)
        chi, gchi, hchi = self.chi_int(x)
        v_sh, g_sh = self.shear(x)
        v_wr, g_wr, w_wr, gw_wr, hw_wr = self.wrinkle(x)
        v = v_sh + v_wr * chi[:, None]
        grad_v = (
            g_sh
            + g_wr * chi[:, None, None]
            + np.einsum("ni,nj->nij", v_wr, gchi)
        )
        w = w_wr * chi
        grad_w = gw_wr * chi[:, None] + w_wr[:, None] * gchi
        hess_w = (
            hw_wr * chi[:, None, None]
            + np.einsum("ni,nj->nij", gw_wr, gchi)
            + np.einsum("ni,nj->nij", gchi, gw_wr)
            + w_wr[:, None, None] * hchi
        )
        _, dist, _ = self._band(x)
        bulk = dist >= self.d_int
        return {
            "v": v, "grad_v": grad_v, "w": w, "grad_w": grad_w,
            "hess_w": hess_w, "chi_int": chi, "bulk": bulk,
        }

    def strain_deviation(self, x):
        """e(v) + (1/2) grad w (x) grad w - (1/2) mu, from closed forms."""
        out = self.evaluate(x)
        g = out["grad_v"]
        gw = out["grad_w"]
        e_v = 0.5 * (g + np.transpose(g, (0, 2, 1)))
        return e_v + 0.5 * np.einsum("ni,nj->nij", gw, gw) - 0.5 * self.mu[None, :, :]


@dataclass
class DisplacementField:
    """Sampled displacements on a square-cell grid with derivative stencils.

    The grid must resolve the wrinkles: h <= l_wr / 16.
    """

    origin: tuple
    h: float
    u: np.ndarray  # (nx, ny, 2)
    w: np.ndarray  # (nx, ny)
    domain_mask: np.ndarray
    bulk_mask: np.ndarray
    params: Optional[HerringboneParams] = None
    analytic: Optional[object] = None  # evaluator when available

    @property
    def shape(self):
        return self.w.shape

    def stencil_bulk_mask(self, cells=2):
        """Bulk mask eroded so centered stencils never read wall samples."""
        out = self.bulk_mask.copy()
        for _ in range(cells):
            shrunk = out.copy()
            shrunk[1:, :] &= out[:-1, :]
            shrunk[:-1, :] &= out[1:, :]
            shrunk[:, 1:] &= out[:, :-1]
            shrunk[:, :-1] &= out[:, 1:]
            out = shrunk
        return out

    def points(self):
        nx, ny = self.w.shape
        xs = self.origin[0] + (np.arange(nx) + 0.5) * self.h
        ys = self.origin[1] + (np.arange(ny) + 0.5) * self.h
        X, Y = np.meshgrid(xs, ys, indexing="ij")
        return X, Y

    def _d(self, arr, axis):
        """Centered first difference, one-sided at the array edges."""
        out = np.gradient(arr, self.h, axis=axis, edge_order=2)
        return out

    def grad_w(self):
        return np.stack([self._d(self.w, 0), self._d(self.w, 1)], axis=-1)

    def hess_w(self):
        wx = self._d(self.w, 0)
        wy = self._d(self.w, 1)
        return np.stack(
            [self._d(wx, 0), 0.5 * (self._d(wx, 1) + self._d(wy, 0)), self._d(wy, 1)],
            axis=-1,
        )  # components 11, 12, 22

    def sym_grad_u(self):
        ux_x = self._d(self.u[..., 0], 0)
        ux_y = self._d(self.u[..., 0], 1)
        uy_x = self._d(self.u[..., 1], 0)
        uy_y = self._d(self.u[..., 1], 1)
        return np.stack([ux_x, 0.5 * (ux_y + uy_x), uy_y], axis=-1)


def _grid_for(lo, hi, l_wr, h=None):
    h = h if h is not None else l_wr / GRID_PER_WAVELENGTH
    if h > l_wr / 16 + 1e-15:
        raise ParameterError("grid must resolve the wrinkles: h <= l_wr/16")
    nx = max(2, int(np.round((hi[0] - lo[0]) / h)))
    ny = max(2, int(np.round((hi[1] - lo[1]) / h)))
    return h, nx, ny


def _square_bounds(square):
    if isinstance(square, Rectangle):
        return (-square.a, -square.b), (square.a, square.b)
    (x0, y0), side = square
    return (x0, y0), (x0 + side, y0 + side)


def _sample_rows(evaluator, lo, h, nx, ny, keys=("v", "w", "bulk"), block_rows=64):
    """Sample evaluator fields on the cell-centered grid, in row blocks."""
    store = {
        "v": np.empty((nx, ny, 2)),
        "w": np.empty((nx, ny)),
        "bulk": np.empty((nx, ny), dtype=bool),
    }
    ys = lo[1] + (np.arange(ny) + 0.5) * h
    for r0 in range(0, nx, block_rows):
        r1 = min(r0 + block_rows, nx)
        xs = lo[0] + (np.arange(r0, r1) + 0.5) * h
        X, Y = np.meshgrid(xs, ys, indexing="ij")
        pts = np.stack([X.ravel(), Y.ravel()], axis=1)
        out = evaluator.evaluate(pts)
        store["v"][r0:r1] = out["v"].reshape(r1 - r0, ny, 2)
        store["w"][r0:r1] = out["w"].reshape(r1 - r0, ny)
        store["bulk"][r0:r1] = out["bulk"].reshape(r1 - r0, ny)
    return store


def herringbone(square, mu, params: HerringboneParams, h=None) -> DisplacementField:
    """Single herringbone adapted to a constant target on a square."""
    target = mu if isinstance(mu, TargetDefect) else TargetDefect(mu)
    if target.constant is None:
        raise ParameterError("single-square construction needs a constant target")
    lo, hi = _square_bounds(square)
    field_ = HerringboneField(target.constant, params, single=True)
    h, nx, ny = _grid_for(lo, hi, params.l_wr, h)
    store = _sample_rows(field_, lo, h, nx, ny)
    return DisplacementField(
        origin=lo, h=h, u=store["v"], w=store["w"],
        domain_mask=np.ones((nx, ny), dtype=bool),
        bulk_mask=store["bulk"], params=params, analytic=field_,
    )


class PiecewiseHerringboneField:
    """Lattice of per-square herringbones glued by edge cutoffs.

    Squares Q_alpha = alpha l_avg + [0, l_avg)^2 tile the plane; each square
    carries the cell average of the target and its own closed-form field,
    multiplied by a separable C^2 edge cutoff.
    """

    def __init__(self, domain: Domain, mu: TargetDefect, params: HerringboneParams,
                 avg_samples=12):
        params.validate_full(*mu.bounds(_domain_samples(domain)))
        self.domain = domain
        self.params = params
        self.l_avg = params.l_avg
        (x0, y0), (x1, y1) = domain.bbox()
        i0, i1 = int(np.floor(x0 / self.l_avg)), int(np.ceil(x1 / self.l_avg))
        j0, j1 = int(np.floor(y0 / self.l_avg)), int(np.ceil(y1 / self.l_avg))
        self.i0, self.j0 = i0, j0
        self.ncols = i1 - i0
        self.nrows = j1 - j0
        self.cells = {}
        offs = (np.arange(avg_samples) + 0.5) / avg_samples
        ox, oy = np.meshgrid(offs, offs, indexing="ij")
        for i in range(i0, i1):
            for j in range(j0, j1):
                qx, qy = i * self.l_avg, j * self.l_avg
                sub = np.stack(
                    [qx + ox.ravel() * self.l_avg, qy + oy.ravel() * self.l_avg],
                    axis=1,
                )
                ins = np.atleast_1d(domain.contains(sub))
                if not np.any(ins):
                    continue
                mats = mu.matrix_at(sub[ins])
                m_avg = mats.mean(axis=0)
                if m_avg[0, 0] + m_avg[1, 1] <= 1e-14:
                    continue  # vanishing target: zero field on this square
                self.cells[(i, j)] = {
                    "origin": np.array([qx, qy]),
                    "field": HerringboneField(m_avg, params, single=False),
                    "mu": m_avg,
                }

    def chi_ext(self, x, origin):
        """Separable edge cutoff on the square at `origin` (value, grad, hess
        as (n,), (n,2), (n,2,2))."""
        d_ext = self.params.delta_ext
        L = self.l_avg
        vals = []
        d1s = []
        d2s = []
        for axis in range(2):
            t = np.atleast_2d(x)[:, axis] - origin[axis]
            d_edge = np.minimum(t, L - t)
            sgn = np.where(t < L - t, 1.0, -1.0)
            val, d1, d2 = ramp(d_edge, 0.5 * d_ext, d_ext)
            vals.append(val)
            d1s.append(d1 * sgn)
            d2s.append(d2)
        chi = vals[0] * vals[1]
        grad = np.stack([d1s[0] * vals[1], vals[0] * d1s[1]], axis=1)
        hess = np.empty((len(chi), 2, 2))
        hess[:, 0, 0] = d2s[0] * vals[1]
        hess[:, 1, 1] = vals[0] * d2s[1]
        hess[:, 0, 1] = hess[:, 1, 0] = d1s[0] * d1s[1]
        return chi, grad, hess

    def cell_of(self, x):
        x = np.atleast_2d(x)
        i = np.floor(x[:, 0] / self.l_avg).astype(int)
        j = np.floor(x[:, 1] / self.l_avg).astype(int)
        return i, j

    def evaluate(self, x):
        """Assembled fields at points x (same keys as HerringboneField plus
        'mu_local' and 'wall')."""
        x = np.atleast_2d(x)
        n = len(x)
        out = {
            "v": np.zeros((n, 2)), "grad_v": np.zeros((n, 2, 2)),
            "w": np.zeros(n), "grad_w": np.zeros((n, 2)),
            "hess_w": np.zeros((n, 2, 2)), "bulk": np.zeros(n, dtype=bool),
            "mu_local": np.zeros((n, 2, 2)), "chi_ext": np.zeros(n),
        }
        i, j = self.cell_of(x)
        stride = self.nrows + 2
        keys = (i - self.i0).astype(np.int64) * stride + (j - self.j0)
        order = np.argsort(keys, kind="stable")
        sk = keys[order]
        split_at = np.flatnonzero(np.diff(sk)) + 1
        for idx in np.split(order, split_at):
            key = int(keys[idx[0]])
            ci = key // stride + self.i0
            cj = key % stride + self.j0
            cell = self.cells.get((ci, cj))
            if cell is None:
                continue
            pts = x[idx]
            f = cell["field"].evaluate(pts)
            chi, gchi, hchi = self.chi_ext(pts, cell["origin"])
            out["v"][idx] = f["v"] * chi[:, None]
            out["grad_v"][idx] = f["grad_v"] * chi[:, None, None] + np.einsum(
                "ni,nj->nij", f["v"], gchi
            )
            out["w"][idx] = f["w"] * chi
            out["grad_w"][idx] = f["grad_w"] * chi[:, None] + f["w"][:, None] * gchi
            out["hess_w"][idx] = (
                f["hess_w"] * chi[:, None, None]
                + np.einsum("ni,nj->nij", f["grad_w"], gchi)
                + np.einsum("ni,nj->nij", gchi, f["grad_w"])
                + f["w"][:, None, None] * hchi
            )
            out["bulk"][idx] = f["bulk"] & (chi > 1.0 - 1e-12)
            out["mu_local"][idx] = cell["mu"]
            out["chi_ext"][idx] = chi
        return out


def _domain_samples(domain, n=33):
    (x0, y0), (x1, y1) = domain.bbox()
    xs = np.linspace(x0, x1, n)
    ys = np.linspace(y0, y1, n)
    X, Y = np.meshgrid(xs, ys, indexing="ij")
    pts = np.stack([X.ravel(), Y.ravel()], axis=1)
    return pts[np.atleast_1d(domain.contains(pts))]


def piecewise_herringbone(domain: Domain, mu, params: HerringboneParams,
                          h=None) -> DisplacementField:
    """Glued lattice of herringbones over the domain, sampled on a grid."""
    target = mu if isinstance(mu, TargetDefect) else TargetDefect(mu)
    assembly = PiecewiseHerringboneField(domain, target, params)
    (x0, y0), (x1, y1) = domain.bbox()
    h, nx, ny = _grid_for((x0, y0), (x1, y1), params.l_wr, h)
    store = _sample_rows(assembly, (x0, y0), h, nx, ny)
    xs = x0 + (np.arange(nx) + 0.5) * h
    ys = y0 + (np.arange(ny) + 0.5) * h
    X, Y = np.meshgrid(xs, ys, indexing="ij")
    pts = np.stack([X.ravel(), Y.ravel()], axis=1)
    inside = np.atleast_1d(domain.contains(pts)).reshape(nx, ny)
    u, w = store["v"], store["w"]
    u[~inside] = 0.0
    w[~inside] = 0.0
    return DisplacementField(
        origin=(x0, y0), h=h, u=u, w=w,
        domain_mask=inside,
        bulk_mask=store["bulk"] & inside,
        params=params, analytic=assembly,
    )
