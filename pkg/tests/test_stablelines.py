"""Partition and stable-line families: counts, orientation, disjointness,
endpoint classification, and measure factors."""

import numpy as np
import pytest

from conftest import interior_points
from shellwrinkle import airy
from shellwrinkle.errors import FamilyLookupError, ParameterError
from shellwrinkle.geometry import ConvexPolygon, Disc, Ellipse, HalfDisc, Rectangle
from shellwrinkle.grids import MaskedGrid
from shellwrinkle.shell import ShellProfile
from shellwrinkle.stablelines import (
    ORDERED,
    OUTSIDE,
    SIGMA,
    UNCONSTRAINED,
    partition,
    stable_lines,
)

POS = ShellProfile.constant(1.0)
NEG = ShellProfile.constant(-1.0)


def segments_intersect(p1, p2, q1, q2, tol=1e-9):
    """Proper interior intersection test for two segments."""
    d1 = p2 - p1
    d2 = q2 - q1
    den = d1[0] * d2[1] - d1[1] * d2[0]
    if abs(den) < 1e-14:
        return False
    t = ((q1 - p1)[0] * d2[1] - (q1 - p1)[1] * d2[0]) / den
    s = ((q1 - p1)[0] * d1[1] - (q1 - p1)[1] * d1[0]) / den
    return tol < t < 1 - tol and tol < s < 1 - tol


class TestPartition:
    def test_positive_ellipse_all_ordered(self, ellipse):
        af = airy.solve_dual(ellipse, POS)
        part = partition(ellipse, af)
        grid = MaskedGrid(ellipse, 64)
        lab = part.labels(grid)
        inside = grid.mask
        assert np.all(lab[inside] == ORDERED)
        assert np.all(lab[~inside] == OUTSIDE)

    def test_positive_disc_all_unconstrained(self, disc):
        af = airy.solve_dual(disc, POS)
        lab = partition(disc, af).labels(MaskedGrid(disc, 64))
        assert np.all(lab[lab != OUTSIDE] == UNCONSTRAINED)

    def test_negative_half_disc_sigma_is_arc(self, half_disc_neg):
        af = airy.solve_dual(half_disc_neg, NEG)
        part = partition(half_disc_neg, af)
        grid = MaskedGrid(half_disc_neg, 64)
        lab = part.labels(grid)
        sig = lab == SIGMA
        assert sig.sum() > 10
        pts = grid.points().reshape(grid.nx, grid.ny, 2)[sig]
        # sigma cells sit on the parabolic medial arc 2R v = R^2 - t^2
        res = 2 * pts[:, 1] - (1 - pts[:, 0] ** 2)
        assert np.max(np.abs(res)) < 2.5 * grid.h

    def test_rectangle_positive_regions(self, rect):
        af = airy.solve_dual(rect, POS)
        part = partition(rect, af)
        grid = MaskedGrid(rect, 64)
        lab = part.labels(grid)
        pts = grid.points().reshape(grid.nx, grid.ny, 2)
        # blank triangles around (+-1.5, 0)
        assert lab[np.argmin(np.abs(pts[..., 0].ravel() - 1.5) + np.abs(pts[..., 1].ravel()))
                   // grid.ny, grid.ny // 2] == UNCONSTRAINED
        # center column is ordered (vertical band)
        assert lab[grid.nx // 2, grid.ny // 2] == ORDERED
        # union covers the rectangle mask up to boundary cells
        covered = (lab != OUTSIDE).sum()
        assert covered == grid.mask.sum()

    def test_region_of_tangential(self, triangle):
        af = airy.solve_dual(triangle, POS)
        part = partition(triangle, af)
        c, r, _ = __import__("shellwrinkle.rulings", fromlist=["tangential_data"]).tangential_data(triangle)
        labels = part.region_of(np.array([c, c + [r * 0.9, 0.0]]))
        assert labels[0] == "U"  # incenter is inside the contact polygon

    def test_consistency_error(self, ellipse, disc):
        af = airy.solve_dual(ellipse, POS)
        from shellwrinkle.errors import ConsistencyError

        with pytest.raises(ConsistencyError):
            partition(disc, af)


class TestFamilies:
    def test_ellipse_39_chords(self, ellipse):
        af = airy.solve_dual(ellipse, POS)
        fam = stable_lines(ellipse, af, 0.1)
        assert len(fam.lines) == 39
        for ln in fam.lines:
            assert np.allclose(ln.eta, (1.0, 0.0), atol=1e-12)
            # endpoints on the boundary
            for p in ln.endpoints:
                q = (p[0] / 2) ** 2 + p[1] ** 2
                assert q == pytest.approx(1.0, abs=1e-9)

    def test_negative_disc_rays(self, disc):
        af = airy.solve_dual(disc, NEG)
        fam = stable_lines(disc, af, 0.1)
        for ln in fam.lines:
            assert ln.start_kind == "focal_point"
            assert np.hypot(*ln.start) < 1e-9
            assert np.hypot(*ln.end) == pytest.approx(1.0, abs=1e-12)
            # eta perpendicular to the ray
            d = ln.end - ln.start
            assert abs(d @ ln.eta) < 1e-12

    def test_negative_polygon_lines_parallel_to_normals(self, pentagon):
        af = airy.solve_dual(pentagon, NEG)
        fam = stable_lines(pentagon, af, 0.05)
        for chart, lines in zip(fam.charts, fam.lines_by_chart):
            nu = chart.nu
            for ln in lines:
                d = ln.end - ln.start
                d = d / np.hypot(*d)
                assert abs(d @ nu) == pytest.approx(1.0, abs=1e-12)
                assert ln.start_kind == "medial_axis"

    def test_pairwise_disjoint(self, ellipse, half_disc_pos, rect):
        for dom, sh in ((ellipse, POS), (half_disc_pos, POS), (rect, NEG)):
            af = airy.solve_dual(dom, sh)
            fam = stable_lines(dom, af, dom.diameter() / 30)
            lines = fam.lines
            for i in range(len(lines)):
                for j in range(i + 1, len(lines)):
                    assert not segments_intersect(
                        lines[i].start, lines[i].end, lines[j].start, lines[j].end
                    )

    def test_perpendicularity_everywhere(self, triangle, half_disc_neg):
        for dom, sh in ((triangle, POS), (half_disc_neg, NEG)):
            af = airy.solve_dual(dom, sh)
            fam = stable_lines(dom, af, dom.diameter() / 40)
            for ln in fam.lines:
                d = ln.end - ln.start
                d = d / np.hypot(*d)
                assert abs(d @ ln.eta) < 1e-12

    def test_endpoint_classification(self, ellipse, pentagon):
        af = airy.solve_dual(ellipse, POS)
        for ln in stable_lines(ellipse, af, 0.1).lines:
            assert ln.start_kind == ln.end_kind == "boundary"
            for p in ln.endpoints:
                assert ellipse.boundary_distance(p) < 1e-8
        afn = airy.solve_dual(pentagon, NEG)
        for ln in stable_lines(pentagon, afn, 0.1).lines:
            assert ln.end_kind == "boundary"
            assert pentagon.boundary_distance(ln.end) < 1e-8
            # start on the medial axis: two nearest sides equidistant
            sd = np.sort(pentagon.side_distances(ln.start[None, :])[0])
            assert sd[1] - sd[0] < 1e-8

    def test_exit_direction_negative_shapes(self, pentagon, half_disc_neg):
        for dom in (pentagon, half_disc_neg):
            af = airy.solve_dual(dom, NEG)
            fam = stable_lines(dom, af, dom.diameter() / 30)
            for ln in fam.lines:
                mid = 0.5 * (ln.start + ln.end)
                try:
                    g = dom.quickest_exit_gradient(mid)
                except Exception:
                    continue
                d = ln.end - ln.start
                d = d / np.hypot(*d)
                # line direction equals the exit direction -grad d
                assert np.allclose(d, -g, atol=1e-8)

    def test_eta_matches_hessian_direction(self, ellipse, half_disc_pos, disc):
        cases = [(ellipse, POS), (half_disc_pos, POS), (disc, NEG)]
        for dom, sh in cases:
            af = airy.solve_dual(dom, sh)
            fam = stable_lines(dom, af, dom.diameter() / 30)
            pts = interior_points(dom, 100, seed=9, margin=5e-2)
            zeta, eta_h, rank = af.hessian_ac(pts)
            for chart in fam.charts:
                m = np.asarray(chart.contains(pts)) & (rank == 1)
                if not m.any():
                    continue
                eta_f = chart.eta_at(pts[m])
                align = np.abs(np.sum(eta_f * eta_h[m], axis=1))
                assert np.allclose(align, 1.0, atol=1e-9)


class TestEtaRhoLookup:
    def test_ellipse_eta(self, ellipse):
        af = airy.solve_dual(ellipse, POS)
        fam = stable_lines(ellipse, af, 0.1)
        assert np.allclose(fam.eta((1.0, 0.3)), (1, 0), atol=1e-12)
        val, singular = fam.rho((1.0, 0.3))
        assert val == 1.0 and not singular

    def test_negative_disc_eta_and_rho(self, disc):
        af = airy.solve_dual(disc, NEG)
        fam = stable_lines(disc, af, 0.02)
        # the query point snaps to the nearest ray of the sampled family,
        # so the answer matches the polar frame up to the ray spacing
        eta = fam.eta((0.0, 0.5))
        assert np.allclose(eta, (1.0, 0.0), atol=0.02)
        val, singular = fam.rho((0.0, 0.5))
        assert val == pytest.approx(0.5, abs=1e-3)
        assert not singular
        # exactly on a sampled ray the answer is that ray's frame
        ln = fam.lines[0]
        mid = 0.5 * (ln.start + ln.end)
        assert np.allclose(fam.eta(mid), ln.eta, atol=1e-12)
        val0, singular0 = fam.rho(ln.start + 1e-15 * (ln.end - ln.start))
        assert singular0

    def test_half_disc_rho_ratio(self, half_disc_pos):
        af = airy.solve_dual(half_disc_pos, POS)
        fam = stable_lines(half_disc_pos, af, 0.02)
        # ray at theta = pi/2 runs from r=1 to r=2; index point at r=1
        # (snapping to the nearest sampled ray costs a spacing-sized error)
        val, _ = fam.rho((0.0, 1.5))
        assert val == pytest.approx(1.5, abs=1e-3)

    def test_lookup_error_off_family(self, ellipse):
        af = airy.solve_dual(ellipse, POS)
        fam = stable_lines(ellipse, af, 0.5)
        with pytest.raises(FamilyLookupError):
            fam.eta((0.26, 0.1), snap_tol=1e-6)

    def test_spacing_guard(self, ellipse):
        af = airy.solve_dual(ellipse, POS)
        with pytest.raises(ParameterError):
            stable_lines(ellipse, af, 0.0)

    def test_rho_kinds(self, ellipse, disc, half_disc_neg):
        af = airy.solve_dual(ellipse, POS)
        assert stable_lines(ellipse, af, 0.2).rho_kind == "constant"
        afd = airy.solve_dual(disc, NEG)
        assert stable_lines(disc, afd, 0.2).rho_kind == "proportional_to_r"
        afh = airy.solve_dual(half_disc_neg, NEG)
        assert stable_lines(half_disc_neg, afh, 0.2).rho_kind == "general"
