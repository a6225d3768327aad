"""Synthetic generators and CSV ingestion."""

import numpy as np
import pytest

from epsample.data import (
    SchemaError,
    TooManyBadRows,
    generate,
    generate_lines,
    ingest_csv,
)
from epsample.geom import GeometryError, rotate_points, rotation_angle


class TestGenerate:
    @pytest.mark.parametrize("kind", ["uniform", "gaussian_clusters",
                                      "annulus"])
    def test_shape_and_determinism(self, kind):
        a = generate(kind, 500, seed=3)
        b = generate(kind, 500, seed=3)
        assert a.shape == (500, 2)
        assert np.array_equal(a, b)
        assert not np.array_equal(a, generate(kind, 500, seed=4))

    def test_single_point(self):
        assert generate("uniform", 1, seed=0).shape == (1, 2)

    def test_uniform_fills_unit_square(self):
        X = generate("uniform", 2000, seed=1)
        assert X.min() >= 0.0 and X.max() <= 1.0

    def test_annulus_radii(self):
        X = generate("annulus", 2000, seed=2)
        r = np.hypot(X[:, 0] - 0.5, X[:, 1] - 0.5)
        assert r.min() >= 0.25 - 1e-9
        assert r.max() <= 0.45 + 1e-9

    def test_clusters_concentrate(self):
        # nearest-cluster distance stays a few sigma for almost all points
        X = generate("gaussian_clusters", 1000, seed=5)
        means = np.random.default_rng(5).random((20, 2))
        d = np.hypot(X[:, None, 0] - means[None, :, 0],
                     X[:, None, 1] - means[None, :, 1]).min(axis=1)
        assert np.quantile(d, 0.95) < 5 * 0.02

    def test_validation(self):
        with pytest.raises(GeometryError):
            generate("uniform", 0)
        with pytest.raises(GeometryError):
            generate("voronoi", 10)
        with pytest.raises(GeometryError):
            generate("gaussian_clusters", 10, clusters=0)

    def test_lines(self):
        H = generate_lines(40, seed=6)
        assert len(H) == 40
        assert all(wl.weight == 1.0 for wl in H)
        again = generate_lines(40, seed=6)
        assert [(w.line.a, w.line.b) for w in H] == \
            [(w.line.a, w.line.b) for w in again]


class TestIngestCsv:
    def test_well_formed(self, tmp_path):
        p = tmp_path / "pts.csv"
        p.write_text("x,y\n0.1,0.2\n0.3,0.4\n0.5,0.6\n")
        res = ingest_csv(p, "x", "y")
        assert res.points.shape == (3, 2)
        assert res.n_bad == 0
        raw = np.array([[0.1, 0.2], [0.3, 0.4], [0.5, 0.6]])
        assert np.allclose(res.points,
                           rotate_points(raw, rotation_angle(0)))

    def test_one_bad_row_in_a_thousand(self, tmp_path):
        rows = ["x,y"] + [f"{i},{i}" for i in range(999)] + ["oops,nan?"]
        p = tmp_path / "big.csv"
        p.write_text("\n".join(rows) + "\n")
        res = ingest_csv(p, "x", "y")
        assert res.points.shape[0] == 999
        assert res.n_bad == 1
        assert res.n_rows == 1000

    def test_too_many_bad_rows(self, tmp_path):
        p = tmp_path / "bad.csv"
        p.write_text("x,y\n1,2\nbad,row\n3,4\n")
        with pytest.raises(TooManyBadRows):
            ingest_csv(p, "x", "y")

    def test_empty_file(self, tmp_path):
        p = tmp_path / "empty.csv"
        p.write_text("")
        with pytest.raises(SchemaError):
            ingest_csv(p, "x", "y")
        p.write_text("x,y\n")
        with pytest.raises(SchemaError):
            ingest_csv(p, "x", "y")

    def test_missing_column(self, tmp_path):
        p = tmp_path / "cols.csv"
        p.write_text("a,b\n1,2\n")
        with pytest.raises(SchemaError):
            ingest_csv(p, "x", "y")

    def test_flags_and_index_columns(self, tmp_path):
        p = tmp_path / "flags.csv"
        p.write_text("0.0,1.0,1,0\n2.0,3.0,0,1\n4.0,5.0,1,1\n")
        res = ingest_csv(p, 0, 1, flag_cols=[2, 3])
        assert res.points.shape == (3, 2)
        assert res.labels["2"].tolist() == [True, False, True]
        assert res.labels["3"].tolist() == [False, True, True]

    def test_nonfinite_counts_as_bad(self, tmp_path):
        p = tmp_path / "inf.csv"
        rows = ["x,y"] + [f"{i},{i}" for i in range(500)] + ["inf,0"]
        p.write_text("\n".join(rows) + "\n")
        assert ingest_csv(p, "x", "y").n_bad == 1

    def test_missing_file(self):
        with pytest.raises(OSError):
            ingest_csv("/nonexistent/nope.csv", "x", "y")
