"""Geometry catalog: exact distances, exit gradients, medial axes, sampling."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import interior_points
from shellwrinkle.errors import AmbiguityError, DomainError, ParameterError
from shellwrinkle.geometry import (
    ConvexPolygon,
    Disc,
    Ellipse,
    HalfDisc,
    Rectangle,
    make_domain,
)


def brute_distance(domain, x, n=100_000):
    bnd = np.array([bp.position for bp in domain.boundary_sample(n)])
    return np.min(np.hypot(*(bnd - np.asarray(x)).T))


class TestBoundaryDistance:
    def test_disc_center(self, disc):
        assert disc.boundary_distance((0.0, 0.0)) == pytest.approx(1.0, abs=1e-15)

    def test_rectangle_center_brute_force(self, rect):
        d = rect.boundary_distance((0.0, 0.0))
        assert d == pytest.approx(1.0, abs=1e-12)
        assert d == pytest.approx(brute_distance(rect, (0.0, 0.0)), abs=1e-4)

    def test_boundary_points_give_zero(self, ellipse, rect, triangle):
        for dom in (ellipse, rect, triangle):
            for bp in dom.boundary_sample(32):
                assert dom.boundary_distance(bp.position) == pytest.approx(0.0, abs=1e-9)

    def test_outside_raises(self, disc):
        with pytest.raises(DomainError):
            disc.boundary_distance((2.0, 0.0))

    @pytest.mark.parametrize("seed", [0, 1])
    def test_ellipse_against_brute_force(self, ellipse, seed):
        pts = interior_points(ellipse, 50, seed=seed)
        d = ellipse.boundary_distance(pts)
        phi = np.linspace(0, 2 * np.pi, 400_000)
        bnd = np.stack([2 * np.cos(phi), np.sin(phi)], axis=1)
        for p, dd in zip(pts, d):
            ref = np.min(np.hypot(*(bnd - p).T))
            assert dd == pytest.approx(ref, abs=5e-9)

    def test_lipschitz_all_shapes(self, ellipse, disc, rect, half_disc_neg, pentagon):
        for dom in (ellipse, disc, rect, half_disc_neg, pentagon):
            pts = interior_points(dom, 4000, seed=3)
            a, b = pts[:2000], pts[2000:]
            da = np.atleast_1d(dom.boundary_distance(a))
            db = np.atleast_1d(dom.boundary_distance(b))
            gap = np.abs(da - db) - np.hypot(*(a - b).T)
            assert gap.max() <= 1e-9 * dom.diameter()

    def test_concavity_on_convex_shapes(self, ellipse, disc, rect, pentagon):
        for dom in (ellipse, disc, rect, pentagon):
            pts = interior_points(dom, 4000, seed=4)
            a, b = pts[:2000], pts[2000:]
            mid = 0.5 * (a + b)
            d_mid = np.atleast_1d(dom.boundary_distance(mid))
            avg = 0.5 * (
                np.atleast_1d(dom.boundary_distance(a))
                + np.atleast_1d(dom.boundary_distance(b))
            )
            assert np.min(d_mid - avg) >= -1e-9 * dom.diameter()


class TestExitGradient:
    def test_disc_example(self, disc):
        g = disc.quickest_exit_gradient((0.5, 0.0))
        assert np.allclose(g, (-1.0, 0.0), atol=1e-12)

    def test_rectangle_example(self, rect):
        g = rect.quickest_exit_gradient((0.0, -0.5))
        assert np.allclose(g, (0.0, 1.0), atol=1e-12)

    def test_polygon_side_midpoint(self, pentagon):
        # nearest point of an interior point just inside a side midpoint is
        # the foot on that side, so the gradient is the inward side normal
        i = 2
        mid = 0.5 * (pentagon.vertices[i] + pentagon.vertices[(i + 1) % 5])
        p = mid - 0.05 * pentagon.edge_normals[i]
        g = pentagon.quickest_exit_gradient(p)
        assert np.allclose(g, -pentagon.edge_normals[i], atol=1e-10)

    def test_medial_axis_ambiguity(self, disc, ellipse):
        with pytest.raises(AmbiguityError):
            disc.quickest_exit_gradient((0.0, 0.0))
        with pytest.raises(AmbiguityError):
            ellipse.quickest_exit_gradient((0.5, 0.0))

    def test_unit_norm_and_foot(self, ellipse, rect, half_disc_neg, pentagon):
        for dom in (ellipse, rect, half_disc_neg, pentagon):
            pts = interior_points(dom, 400, seed=6)
            # keep off-axis points only
            keep = []
            for p in pts:
                try:
                    g = dom.quickest_exit_gradient(p)
                except AmbiguityError:
                    continue
                keep.append((p, g))
            assert len(keep) > 200
            for p, g in keep:
                assert np.hypot(*g) == pytest.approx(1.0, abs=1e-12)
                d = dom.boundary_distance(p)
                foot = p - d * g
                assert dom.boundary_distance(foot) == pytest.approx(0.0, abs=1e-8)

    def test_against_finite_differences(self, rect, ellipse):
        h = 1e-6
        for dom, p in ((rect, (0.3, -0.45)), (ellipse, (0.7, 0.4))):
            p = np.asarray(p)
            g = dom.quickest_exit_gradient(p)
            for axis in range(2):
                e = np.zeros(2)
                e[axis] = h
                fd = (
                    dom.boundary_distance(p + e) - dom.boundary_distance(p - e)
                ) / (2 * h)
                assert g[axis] == pytest.approx(fd, abs=1e-6)


class TestMedialAxis:
    def test_disc_is_center(self, disc):
        ma = disc.medial_axis()
        assert ma.segments == [] and ma.arcs == []
        assert np.allclose(ma.vertices[0][0], (0.0, 0.0))

    def test_ellipse_segment_endpoints(self, ellipse):
        ma = ellipse.medial_axis()
        (p, q), = ma.segments
        ends = sorted([p[0], q[0]])
        assert ends == pytest.approx([-1.5, 1.5], abs=1e-12)
        assert p[1] == q[1] == 0.0

    def test_rectangle_axis(self, rect):
        ma = rect.medial_axis()
        assert len(ma.segments) == 5
        central = [s for s in ma.segments if abs(s[0][1]) < 1e-12 and abs(s[1][1]) < 1e-12]
        assert len(central) == 1
        (p, q), = central
        assert sorted([p[0], q[0]]) == pytest.approx([-1.0, 1.0], abs=1e-10)
        diag = [s for s in ma.segments if s not in central]
        for p, q in diag:
            v = np.subtract(q, p)
            assert abs(abs(v[0]) - abs(v[1])) < 1e-10  # 45 degree bisectors

    def test_square_collapses_to_center(self):
        sq = ConvexPolygon([(-1, -1), (1, -1), (1, 1), (-1, 1)])
        ma = sq.medial_axis()
        assert len(ma.segments) == 4
        for p, q in ma.segments:
            assert np.allclose(p, (0, 0), atol=1e-9) or np.allclose(q, (0, 0), atol=1e-9)

    def test_half_disc_parabolic_arc(self, half_disc_neg):
        ma = half_disc_neg.medial_axis()
        (arc,) = ma.arcs
        pts = arc.points(65)
        # on the axis: distance to the flat side equals distance to the arc
        inner = pts[2:-2]
        d_flat = inner[:, 1]
        d_arc = 1.0 - np.hypot(inner[:, 0], inner[:, 1])
        assert np.allclose(d_flat, d_arc, atol=1e-12)

    def test_axis_points_have_two_feet(self, pentagon):
        ma = pentagon.medial_axis()
        bnd = np.array([bp.position for bp in pentagon.boundary_sample(8192)])
        for p, q in ma.segments:
            mid = 0.5 * (np.asarray(p) + np.asarray(q))
            d = pentagon.boundary_distance(mid)
            if d < 1e-6:
                continue
            near = np.hypot(*(bnd - mid).T) <= d + 1e-6
            hits = bnd[near]
            assert len(hits) >= 2
            assert np.max(np.hypot(*(hits - hits.mean(axis=0)).T)) > 1e-3


class TestBoundarySample:
    def test_disc_n4_symmetry(self, disc):
        pts = disc.boundary_sample(4)
        pos = np.array([bp.position for bp in pts])
        expect = np.array([(1, 0), (0, 1), (-1, 0), (0, -1)], dtype=float)
        assert np.allclose(pos, expect, atol=1e-12)
        for bp in pts:
            assert np.allclose(bp.nu, bp.position, atol=1e-12)  # nu = e_r
            assert np.allclose(bp.tau, (-bp.nu[1], bp.nu[0]), atol=1e-15)

    def test_ellipse_perimeter(self, ellipse):
        from scipy.special import ellipe

        pts = ellipse.boundary_sample(256)
        pos = np.array([bp.position for bp in pts])
        poly_len = np.hypot(*np.diff(np.vstack([pos, pos[:1]]), axis=0).T).sum()
        exact = 4 * 2.0 * ellipe(1 - 0.25)
        assert abs(poly_len - exact) / exact < 1e-3

    def test_polygon_vertices_included(self, pentagon):
        pts = pentagon.boundary_sample(64)
        pos = np.array([bp.position for bp in pts])
        for v in pentagon.vertices:
            assert np.min(np.hypot(*(pos - v).T)) < 1e-12
        corners = [bp for bp in pts if bp.corner]
        assert len(corners) == 5
        assert all(bp.nu is None for bp in corners)

    def test_tau_is_rotated_nu(self, ellipse, half_disc_neg):
        for dom in (ellipse, half_disc_neg):
            for bp in dom.boundary_sample(64):
                if bp.corner:
                    continue
                assert np.allclose(bp.tau, (-bp.nu[1], bp.nu[0]), atol=1e-12)


class TestValidationAndConfig:
    def test_ellipse_needs_b_below_a(self):
        with pytest.raises(ParameterError):
            Ellipse(1.0, 1.0)

    def test_polygon_rejects_collinear(self):
        with pytest.raises(ParameterError):
            ConvexPolygon([(0, 0), (1, 0), (2, 0), (1, 1)])

    def test_polygon_rejects_cw(self):
        with pytest.raises(ParameterError):
            ConvexPolygon([(0, 0), (0, 1), (1, 0)])

    def test_make_domain_round_trip(self, ellipse, disc, rect, half_disc_neg, triangle):
        for dom in (ellipse, disc, rect, half_disc_neg, triangle):
            clone = make_domain(dom.spec())
            assert clone.spec() == dom.spec()

    def test_make_domain_rejects_unknown(self):
        with pytest.raises(Exception):
            make_domain({"shape": "annulus", "r0": 1, "r1": 2})


@settings(max_examples=40, deadline=None)
@given(
    rho=st.floats(0.0, 0.99),
    ang=st.floats(0.0, 2 * np.pi),
    r=st.floats(0.5, 3.0),
)
def test_disc_distance_property(rho, ang, r):
    d = Disc(r)
    p = r * rho * np.array([np.cos(ang), np.sin(ang)])
    assert d.boundary_distance(p) == pytest.approx(r * (1 - rho), abs=1e-12)


@settings(max_examples=25, deadline=None)
@given(st.floats(0.05, 0.95), st.floats(0.0, 2 * np.pi))
def test_half_disc_contains_consistent(rho, ang):
    hd = HalfDisc(1.0, center=(0.3, -0.2), orientation=1.1)
    # a point built in the local frame is inside iff its local coords are
    c, u, w = hd._frame()
    p = c + rho * (np.cos(ang) * w + np.sin(ang) * u)
    loc = hd.to_local(p)
    assert hd.contains(p) == bool((np.hypot(*loc) <= 1.0) and loc[1] >= 0)
