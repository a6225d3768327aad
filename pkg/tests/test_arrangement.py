"""Arrangement tree structure: splits, routing, zone, wedge queries."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from epsample.arrangement import (
    POLY4,
    POLY8,
    POLY_UNCAPPED,
    TRAPEZOID,
    ArrangementTree,
    CellKind,
    NoCrossing,
)
from epsample.geom import DoubleWedge, Line, Point


def split_all(tree, line):
    """Split every leaf the line crosses; ignore the ones it misses."""
    for leaf in list(tree.leaves()):
        try:
            tree.split_leaf(leaf, line)
        except NoCrossing:
            pass


def random_tree(kind, rng, n_pts=300, n_lines=5):
    pts = rng.normal(size=(n_pts, 2))
    t = ArrangementTree(kind, points=pts)
    for _ in range(n_lines):
        split_all(t, Line(rng.normal(), rng.normal() * 0.3))
    return t, pts


class TestCellKind:
    def test_rejects_bad_shape(self):
        with pytest.raises(ValueError):
            CellKind("disc")

    def test_rejects_tiny_cap(self):
        with pytest.raises(ValueError):
            CellKind("polygon", 2)


class TestSplitting:
    @pytest.mark.parametrize("kind", [POLY4, POLY8, TRAPEZOID])
    def test_points_partition_exactly(self, kind):
        rng = np.random.default_rng(101)
        t, pts = random_tree(kind, rng)
        assert t.total_points() == pts.shape[0]
        for i in range(0, pts.shape[0], 3):
            p = Point(*pts[i])
            holders = [c for c in t.leaves() if c.contains(p)]
            assert len(holders) == 1
            assert t.locate(p) is holders[0]

    def test_no_crossing_raises(self):
        t = ArrangementTree(POLY8)
        t.split_leaf(t.leaves()[0], Line(0.0, 0.0))
        upper = next(c for c in t.leaves()
                     if c.contains(Point(0.0, 10.0)))
        with pytest.raises(NoCrossing):
            t.split_leaf(upper, Line(0.0, -5.0))

    def test_split_consumed_leaf_rejected(self):
        t = ArrangementTree(POLY8)
        root = t.leaves()[0]
        t.split_leaf(root, Line(1.0, 0.0))
        with pytest.raises(Exception):
            t.split_leaf(root, Line(-1.0, 0.0))

    def test_side_caps_hold(self):
        rng = np.random.default_rng(102)
        for kind, cap in ((POLY4, 4), (POLY8, 8)):
            t, _ = random_tree(kind, rng, n_pts=100, n_lines=9)
            assert max(c.side_count() for c in t.leaves()) <= cap

    def test_trapezoid_sides_bounded(self):
        rng = np.random.default_rng(103)
        t, _ = random_tree(TRAPEZOID, rng, n_pts=100, n_lines=8)
        assert max(c.side_count() for c in t.leaves()) <= 4

    def test_trapezoid_split_at_most_four_leaves(self):
        t = ArrangementTree(TRAPEZOID)
        split_all(t, Line(1.0, 0.0))
        split_all(t, Line(-1.0, 0.0))
        before = t.n_leaves
        # one more line through a single cell yields at most 4 replacements
        target = t.locate(Point(0.0, 0.5))
        new = t.split_leaf(target, Line(0.2, 0.3))
        assert 2 <= len(new) <= 4
        assert t.n_leaves == before - 1 + len(new)

    def test_uncapped_polygon_accumulates_sides(self):
        rng = np.random.default_rng(104)
        t, _ = random_tree(POLY_UNCAPPED, rng, n_pts=50, n_lines=10)
        assert max(c.side_count() for c in t.leaves()) > 4

    def test_cap_preserves_membership(self):
        rng = np.random.default_rng(105)
        t, pts = random_tree(POLY4, rng, n_pts=400, n_lines=10)
        nodes = t.locate_bulk(pts)
        for i in range(0, 400, 7):
            assert t.leaf_of(nodes[i]).contains(Point(*pts[i]))


class TestInsertAndLocate:
    def test_insert_after_splits(self):
        rng = np.random.default_rng(111)
        t = ArrangementTree(POLY8)
        split_all(t, Line(0.5, 0.0))
        split_all(t, Line(-0.5, 0.1))
        pts = rng.normal(size=(200, 2))
        t.insert_points(pts)
        assert t.total_points() == 200
        more = rng.normal(size=(50, 2))
        t.insert_points(more)
        assert t.total_points() == 250
        for i in range(50):
            p = Point(*more[i])
            assert t.locate(p).contains(p)

    def test_insert_rejects_bad_shapes(self):
        t = ArrangementTree(POLY8)
        with pytest.raises(Exception):
            t.insert_points(np.zeros((3, 3)))
        with pytest.raises(Exception):
            t.insert_points(np.array([[0.0, np.nan]]))


class TestZone:
    @pytest.mark.parametrize("kind", [POLY4, POLY8, TRAPEZOID])
    def test_matches_brute_force(self, kind):
        rng = np.random.default_rng(121)
        t, _ = random_tree(kind, rng, n_pts=50, n_lines=6)
        for _ in range(25):
            l = Line(rng.normal(), rng.normal() * 0.5)
            got = [c.node for c in t.zone(l)]
            want = sorted(c.node for c in t.leaves()
                          if c.crossed_by(l.a, l.b))
            assert got == want

    def test_four_cell_example(self):
        # two crossing splits make four cells; a third line misses one of them
        t = ArrangementTree(POLY8)
        split_all(t, Line(1.0, 0.0))
        split_all(t, Line(-1.0, 0.0))
        assert t.n_leaves == 4
        probe = Line(0.0, 1.0)  # horizontal, above the crossing point
        zone_nodes = {c.node for c in t.zone(probe)}
        brute = {c.node for c in t.leaves() if c.crossed_by(0.0, 1.0)}
        assert zone_nodes == brute
        assert len(zone_nodes) == 3  # misses the bottom cell


class TestWedgeAndFreeze:
    def test_freeze_cached_until_mutation(self):
        rng = np.random.default_rng(131)
        t, _ = random_tree(POLY8, rng, n_pts=60, n_lines=3)
        f1 = t.freeze()
        assert t.freeze() is f1
        split_all(t, Line(0.7, 0.0))
        assert t.freeze() is not f1

    def test_counts_sum_to_total(self):
        rng = np.random.default_rng(132)
        t, pts = random_tree(POLY8, rng)
        frozen = t.freeze()
        counts = frozen[7]
        assert counts[0] == pts.shape[0]

    @pytest.mark.parametrize("kind", [POLY8, TRAPEZOID])
    def test_wedge_count_and_report(self, kind):
        rng = np.random.default_rng(133)
        t, pts = random_tree(kind, rng, n_pts=350, n_lines=4)
        for _ in range(15):
            apex = Point(*rng.normal(size=2))
            a1, a2 = rng.normal(size=2)
            w = DoubleWedge(apex, Line(a1, apex.y - a1 * apex.x),
                            Line(a2, apex.y - a2 * apex.x))
            want_ids = np.array(sorted(
                i for i in range(pts.shape[0]) if w.contains(Point(*pts[i]))),
                dtype=np.int64)
            assert t.count_in_wedge(w) == want_ids.shape[0]
            np.testing.assert_array_equal(t.report_in_wedge(w), want_ids)


class TestCrossingsAndRegions:
    def test_attach_and_split_crossings(self):
        rng = np.random.default_rng(141)
        t = ArrangementTree(POLY8)
        m = 30
        la, lb = rng.normal(size=m), rng.normal(size=m) * 0.3
        w = rng.uniform(0.5, 2.0, size=m)
        t.attach_crossings(t.leaves()[0], np.arange(m), la, lb, w)
        root_w = t.leaves()[0].crossing_weight()
        assert root_w == pytest.approx(w.sum())
        split_all(t, Line(0.1, 0.0))
        split_all(t, Line(-0.4, 0.2))
        # each line's surviving pieces are exactly the cells it crosses
        for k in range(m):
            holders = {c.node for c in t.leaves()
                       if c.cross is not None and k in set(c.cross[0])}
            brute = {c.node for c in t.leaves()
                     if c.crossed_by(la[k], lb[k])}
            assert holders == brute

    def test_region_rooted_tree(self):
        # root a fresh tree at one leaf of another and keep querying
        rng = np.random.default_rng(142)
        outer, pts = random_tree(POLY8, rng, n_pts=500, n_lines=3)
        cell = max(outer.leaves(), key=lambda c: c.point_idx.shape[0])
        sub_pts = outer.points[cell.point_idx]
        sub = ArrangementTree(POLY8, points=sub_pts, root_cell=cell)
        split_all(sub, Line(0.05, 0.0))
        assert sub.total_points() == sub_pts.shape[0]
        l = Line(0.3, 0.05)
        got = [c.node for c in sub.zone(l)]
        want = sorted(c.node for c in sub.leaves() if c.crossed_by(l.a, l.b))
        assert got == want


class TestExport:
    def test_json_shape(self):
        rng = np.random.default_rng(151)
        t, _ = random_tree(POLY8, rng, n_pts=40, n_lines=3)
        d = t.to_json()
        assert d["kind"] == "polygon"
        assert d["n_leaves"] == t.n_leaves == len(d["cells"])
        assert sum(c["n_points"] for c in d["cells"]) == 40
        for c in d["cells"]:
            assert c["sides"] <= 8

    def test_vertices_on_boundary(self):
        t = ArrangementTree(POLY8)
        split_all(t, Line(1.0, 0.0))
        split_all(t, Line(-1.0, 0.0))
        split_all(t, Line(0.0, 1.0))
        for cell in t.leaves():
            for v in cell.vertices():
                # each vertex satisfies every edge constraint loosely
                for e in cell.edges:
                    y = e.a * v.x + e.b
                    if e.up:
                        assert v.y >= y - 1e-9
                    else:
                        assert v.y <= y + 1e-9


@given(seed=st.integers(0, 10_000))
@settings(max_examples=25, deadline=None)
def test_membership_partition_property(seed):
    rng = np.random.default_rng(seed)
    kind = (POLY4, POLY8, TRAPEZOID)[seed % 3]
    pts = rng.normal(size=(60, 2))
    t = ArrangementTree(kind, points=pts)
    for _ in range(4):
        split_all(t, Line(rng.normal(), rng.normal() * 0.4))
    assert t.total_points() == 60
    for i in range(0, 60, 5):
        p = Point(*pts[i])
        holders = [c for c in t.leaves() if c.contains(p)]
        assert len(holders) == 1
        assert t.locate(p) is holders[0]
