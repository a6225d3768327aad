"""Scalar geometry layer: predicates, segments, duality."""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from epsample.geom import (
    DEFAULT_TOL,
    DegenerateLine,
    DoubleWedge,
    GeometryError,
    Line,
    Point,
    Segment,
    Side,
    Tolerance,
    approx_eq,
    dualize_line,
    dualize_point,
    dualize_segment,
    intersect_lines,
    line_through,
    rotate_points,
    rotation_angle,
    segment_intersection,
)

finite = st.floats(min_value=-100.0, max_value=100.0,
                   allow_nan=False, allow_infinity=False)


class TestTolerance:
    def test_basic(self):
        t = Tolerance(1e-9, 1e-12)
        assert t.eq(1.0, 1.0 + 1e-13)
        assert not t.eq(1.0, 1.001)
        assert t.eq(1e6, 1e6 * (1 + 1e-10))

    def test_infinities(self):
        t = Tolerance()
        assert not t.eq(-math.inf, math.inf)
        assert t.eq(math.inf, math.inf)
        assert not t.eq(math.inf, 1.0)

    def test_approx_eq_default(self):
        assert approx_eq(2.0, 2.0 + 1e-13)


class TestPointLine:
    def test_point_rejects_nonfinite(self):
        with pytest.raises(GeometryError):
            Point(math.nan, 0.0)
        with pytest.raises(GeometryError):
            Point(0.0, math.inf)

    def test_above_tie_is_closed(self):
        l = Line(2.0, -1.0)
        on = Point(1.0, 1.0)
        assert l.above_closed(on)
        assert not l.above_open(on)
        assert l.above_open(Point(1.0, 1.0 + 1e-9))

    def test_line_through(self):
        l = line_through(Point(0.0, 1.0), Point(2.0, 5.0))
        assert l.a == pytest.approx(2.0)
        assert l.b == pytest.approx(1.0)
        assert l.y_at(0.0) == pytest.approx(1.0)
        assert l.y_at(2.0) == pytest.approx(5.0)

    def test_line_through_vertical_raises(self):
        with pytest.raises(DegenerateLine):
            line_through(Point(1.0, 0.0), Point(1.0, 5.0))

    def test_intersect(self):
        p = intersect_lines(Line(1.0, 0.0), Line(-1.0, 2.0))
        assert p == Point(1.0, 1.0)
        assert intersect_lines(Line(0.5, 0.0), Line(0.5, 3.0)) is None


class TestSegments:
    def test_endpoints(self):
        s = Segment(Line(1.0, 0.0), 0.0, 2.0)
        lo, hi = s.endpoints()
        assert lo == Point(0.0, 0.0)
        assert hi == Point(2.0, 2.0)
        assert s.bounded
        assert not Segment(Line(1.0, 0.0)).bounded

    def test_inverted_extent_raises(self):
        with pytest.raises(GeometryError):
            Segment(Line(0.0, 0.0), 2.0, 1.0)

    def test_classify_strictly_above(self):
        s = Segment(Line(0.0, 1.0), -1.0, 1.0)
        assert s.classify(Line(0.0, 0.0)) == Side.ABOVE
        assert s.classify(Line(0.0, 0.0), closed=False) == Side.ABOVE

    def test_classify_crossing(self):
        s = Segment(Line(1.0, 0.0), -1.0, 1.0)
        assert s.classify(Line(0.0, 0.0)) == Side.CROSSES
        assert s.classify(Line(0.0, 0.0), closed=False) == Side.CROSSES

    def test_classify_endpoint_contact(self):
        # y = x on [0, 1] touches y = 0 at its left endpoint only
        s = Segment(Line(1.0, 0.0), 0.0, 1.0)
        assert s.classify(Line(0.0, 0.0), closed=True) == Side.ABOVE
        assert s.classify(Line(0.0, 0.0), closed=False) == Side.CROSSES

    def test_classify_unbounded(self):
        s = Segment(Line(1.0, 0.0))  # full line y = x
        assert s.classify(Line(0.0, 0.0)) == Side.CROSSES
        assert s.classify(Line(1.0, -5.0)) == Side.ABOVE
        assert s.classify(Line(1.0, 5.0)) == Side.BELOW

    def test_segment_intersection(self):
        s = Segment(Line(1.0, 0.0), 0.0, 2.0)
        t = Segment(Line(-1.0, 2.0), 0.0, 2.0)
        p = segment_intersection(s, t)
        assert p is not None
        assert p.x == pytest.approx(1.0)
        assert p.y == pytest.approx(1.0)
        # same lines, disjoint extents
        t2 = Segment(Line(-1.0, 2.0), 1.5, 2.0)
        assert segment_intersection(s, t2) is None
        # parallel
        assert segment_intersection(s, Segment(Line(1.0, 1.0))) is None


class TestDuality:
    def test_involution(self):
        rng = np.random.default_rng(7)
        for _ in range(50):
            p = Point(*rng.normal(size=2))
            back = dualize_line(dualize_point(p))
            assert back.x == pytest.approx(p.x)
            assert back.y == pytest.approx(p.y)
            l = Line(*rng.normal(size=2))
            lb = dualize_point(dualize_line(l))
            assert lb.a == pytest.approx(l.a)
            assert lb.b == pytest.approx(l.b)

    def test_order_transfer(self):
        rng = np.random.default_rng(8)
        for _ in range(50):
            p = Point(*rng.normal(size=2))
            l = Line(*rng.normal(size=2))
            primal_above = p.y > l.y_at(p.x)
            dual_pt = dualize_line(l)
            dual_ln = dualize_point(p)
            dual_above = dual_pt.y > dual_ln.y_at(dual_pt.x)
            assert primal_above == dual_above

    def test_incidence_transfer(self):
        p = Point(2.0, 7.0)
        l = Line(3.0, 1.0)
        assert p.y == l.y_at(p.x)  # p on l
        dual_pt = dualize_line(l)
        dual_ln = dualize_point(p)
        assert dual_pt.y == pytest.approx(dual_ln.y_at(dual_pt.x))

    def test_segment_crossing_transfer(self):
        rng = np.random.default_rng(9)
        hits = 0
        for _ in range(200):
            x0, x1 = np.sort(rng.normal(size=2) * 2)
            if x1 - x0 < 1e-3:
                continue
            s = Segment(Line(*rng.normal(size=2)), x0, x1)
            g = Line(*rng.normal(size=2))
            d0 = g.y_at(s.x_lo) - s.line.y_at(s.x_lo)
            d1 = g.y_at(s.x_hi) - s.line.y_at(s.x_hi)
            crosses = d0 * d1 <= 0
            wedge = dualize_segment(s)
            assert wedge.contains(dualize_line(g)) == crosses
            hits += crosses
        assert hits > 10  # both outcomes exercised

    def test_dualize_segment_requires_bounded(self):
        with pytest.raises(GeometryError):
            dualize_segment(Segment(Line(1.0, 0.0), 0.0, math.inf))

    def test_wedge_degenerate(self):
        apex = Point(0.0, 0.0)
        w = DoubleWedge(apex, Line(1.0, 0.0), Line(1.0, 0.0))
        assert w.degenerate
        assert w.contains(Point(55.0, -3.0))

    def test_wedge_apex_mismatch_raises(self):
        with pytest.raises(GeometryError):
            DoubleWedge(Point(0.0, 0.0), Line(1.0, 0.0), Line(1.0, 5.0))

    # integer coordinates keep b = ay - s*ax exact, so the apex lands exactly
    # on both boundaries
    @given(ax=st.integers(-50, 50).map(float),
           ay=st.integers(-50, 50).map(float),
           s1=st.integers(-50, 50).map(float),
           s2=st.integers(-50, 50).map(float))
    @settings(max_examples=50, deadline=None)
    def test_wedge_contains_apex(self, ax, ay, s1, s2):
        apex = Point(ax, ay)
        w = DoubleWedge(apex, Line(s1, ay - s1 * ax), Line(s2, ay - s2 * ax))
        assert w.contains(apex)


class TestRotation:
    def test_angle_deterministic_and_small(self):
        a1 = rotation_angle(42)
        a2 = rotation_angle(42)
        assert a1 == a2
        assert 1e-4 <= a1 < 1e-3
        assert rotation_angle(43) != a1

    def test_rotation_preserves_distances(self):
        rng = np.random.default_rng(10)
        pts = rng.normal(size=(40, 2))
        rot = rotate_points(pts, rotation_angle(1))
        d0 = np.linalg.norm(pts[None, :, :] - pts[:, None, :], axis=2)
        d1 = np.linalg.norm(rot[None, :, :] - rot[:, None, :], axis=2)
        np.testing.assert_allclose(d0, d1, atol=1e-9)

    def test_rotation_separates_equal_x(self):
        pts = np.array([[1.0, 0.0], [1.0, 5.0], [1.0, -3.0]])
        rot = rotate_points(pts, rotation_angle(2))
        xs = np.sort(rot[:, 0])
        assert np.min(np.diff(xs)) > 1e-6


@given(px=finite, py=finite, la=finite, lb=finite)
@settings(max_examples=100, deadline=None)
def test_duality_order_transfer_property(px, py, la, lb):
    p = Point(px, py)
    l = Line(la, lb)
    primal = p.y > l.y_at(p.x)
    dual_pt = dualize_line(l)
    dual_ln = dualize_point(p)
    assert primal == (dual_pt.y > dual_ln.y_at(dual_pt.x))
