"""Halfplane discrepancy: exact/approx error against a brute-force
oracle, planted anomalies, and the scan statistic."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from epsample.discrepancy import (
    EXACT_LIMIT,
    LabeledPoints,
    TooLarge,
    approx_error,
    exact_error,
    plant_anomaly,
    scan_discrepancy,
)
from epsample.geom import DegenerateLine, GeometryError
from epsample.sampling import WeightedSample, epsilon_sample


def identity_sample(X):
    n = X.shape[0]
    return WeightedSample(points=X.copy(), weights=np.full(n, 1.0 / n),
                          ids=np.arange(n), method="random", stats={})


def brute_error(X, sample):
    """Independent oracle: scan every pair-spanned boundary directly.

    For each point pair the candidates are the strict-above and
    strict-below masses with each endpoint's site mass included or not
    (coincident duplicates follow their site), plus axis-aligned
    thresholds for boundaries through a single coordinate class.
    """
    U = np.vstack([np.asarray(X, float), np.asarray(sample.points, float)])
    n = len(X)
    dm = np.concatenate([np.full(n, -1.0 / n),
                         np.asarray(sample.weights, float)])
    N = len(U)
    best = 0.0
    for i in range(N):
        for j in range(i + 1, N):
            dx = U[j, 0] - U[i, 0]
            if dx == 0.0:
                side = U[:, 0] - U[i, 0]
            else:
                a = (U[j, 1] - U[i, 1]) / dx
                b = U[i, 1] - a * U[i, 0]
                side = U[:, 1] - (a * U[:, 0] + b)
            on = side == 0.0
            mi = dm[on & (U == U[i]).all(axis=1)].sum()
            mj = dm[on & (U == U[j]).all(axis=1)].sum()
            for o in (dm[side > 0.0].sum(), dm[side < 0.0].sum()):
                for ai in (0.0, mi):
                    for aj in (0.0, mj):
                        best = max(best, abs(o + ai + aj))
    for axis in (0, 1):
        vals = U[:, axis]
        for c in np.unique(vals):
            onm = dm[vals == c].sum()
            for o in (dm[vals < c].sum(), dm[vals > c].sum()):
                best = max(best, abs(o), abs(o + onm))
    return best


class TestExactError:
    @pytest.mark.parametrize("seed,method", [(0, "random"), (2, "mat")])
    def test_matches_brute_oracle(self, seed, method):
        rng = np.random.default_rng(40 + seed)
        X = rng.random((200, 2))
        s = epsilon_sample(X, 20, method=method, seed=seed)
        assert exact_error(X, s) == pytest.approx(brute_error(X, s),
                                                  abs=1e-12)

    def test_two_point_hand_value(self):
        # sample = left point only: any halfplane holding exactly one
        # of the two points misses half the mass
        X = np.array([[0.0, 0.0], [1.0, 0.0]])
        s = WeightedSample(points=X[:1].copy(), weights=np.array([1.0]),
                           ids=np.array([0]), method="random", stats={})
        assert exact_error(X, s) == pytest.approx(0.5, abs=1e-15)

    def test_identity_sample_is_zero(self):
        rng = np.random.default_rng(7)
        X = rng.random((80, 2))
        assert exact_error(X, identity_sample(X)) == 0.0

    def test_bounded_by_one(self):
        rng = np.random.default_rng(8)
        X = rng.random((150, 2))
        s = epsilon_sample(X, 5, method="random", seed=1)
        assert 0.0 <= exact_error(X, s) <= 1.0 + 1e-12

    def test_size_guard(self):
        X = np.zeros((EXACT_LIMIT + 1, 2))
        X[:, 0] = np.arange(EXACT_LIMIT + 1)
        s = WeightedSample(points=X[:2].copy(), weights=np.full(2, 0.5),
                           ids=np.arange(2), method="random", stats={})
        with pytest.raises(TooLarge):
            exact_error(X, s)

    def test_rejects_bad_shapes(self):
        s = WeightedSample(points=np.zeros((2, 2)), weights=np.full(2, 0.5),
                           ids=np.arange(2), method="random", stats={})
        with pytest.raises(GeometryError):
            exact_error(np.zeros((4, 3)), s)
        with pytest.raises(GeometryError):
            exact_error(np.array([[0.0, np.inf], [1.0, 0.0]]), s)


class TestApproxError:
    def test_lower_bounds_exact(self):
        for seed in range(4):
            rng = np.random.default_rng(60 + seed)
            X = rng.random((120, 2))
            s = epsilon_sample(X, 12, method="random", seed=seed)
            ex = exact_error(X, s)
            for budget in (5, 20, 60):
                assert approx_error(X, s, budget, seed=seed) <= ex + 1e-15

    def test_monotone_in_budget(self):
        rng = np.random.default_rng(61)
        X = rng.random((160, 2))
        s = epsilon_sample(X, 16, method="random", seed=0)
        vals = [approx_error(X, s, b, seed=5)
                for b in (2, 8, 32, 128, 400)]
        assert vals == sorted(vals)

    def test_full_budget_equals_exact(self):
        rng = np.random.default_rng(62)
        X = rng.random((90, 2))
        s = epsilon_sample(X, 9, method="random", seed=0)
        assert approx_error(X, s, budget=10_000, seed=3) == exact_error(X, s)

    def test_budget_200_close_to_exact(self):
        # calibrated: 10-seed median gap 0.001 at n=500, k=50
        gaps = []
        for seed in range(10):
            rng = np.random.default_rng(100 + seed)
            X = rng.random((500, 2))
            s = epsilon_sample(X, 50, method="random", seed=seed)
            gaps.append(exact_error(X, s) - approx_error(X, s, 200,
                                                         seed=seed))
        assert min(gaps) >= -1e-15
        assert np.median(gaps) <= 0.005

    def test_budget_validation(self):
        X = np.zeros((4, 2))
        X[:, 0] = np.arange(4)
        s = identity_sample(X)
        with pytest.raises(GeometryError):
            approx_error(X, s, budget=0)

    def test_deterministic(self):
        rng = np.random.default_rng(63)
        X = rng.random((100, 2))
        s = epsilon_sample(X, 10, method="random", seed=0)
        a = approx_error(X, s, 30, seed=9)
        b = approx_error(X, s, 30, seed=9)
        assert a == b


@given(st.lists(st.tuples(st.integers(-8, 8), st.integers(-8, 8)),
                min_size=4, max_size=30))
@settings(max_examples=60, deadline=None)
def test_identity_zero_and_approx_below_exact(pts):
    # integer grid forces duplicate coordinates through the merge path
    X = np.array(pts, dtype=np.float64) / 4.0
    ident = identity_sample(X)
    assert exact_error(X, ident) == 0.0
    k = max(2, len(X) // 3)
    s = epsilon_sample(X, k, method="random", seed=1)
    ex = exact_error(X, s)
    assert 0.0 <= ex <= 1.0 + 1e-12
    assert approx_error(X, s, budget=3, seed=2) <= ex + 1e-15


class TestPlantAnomaly:
    def test_rates_at_scale(self):
        rng = np.random.default_rng(3)
        X = rng.random((100_000, 2))
        L = plant_anomaly(X, seed=0)
        assert int(L.inside.sum()) == 2000
        assert L.measured[L.inside].mean() == pytest.approx(0.7, abs=0.02)
        assert L.baseline[L.inside].mean() == pytest.approx(0.3, abs=0.02)
        assert L.measured[~L.inside].mean() == pytest.approx(0.5, abs=0.02)
        assert L.baseline[~L.inside].mean() == pytest.approx(0.5, abs=0.02)

    def test_inside_is_the_halfplane(self):
        rng = np.random.default_rng(4)
        X = rng.random((2000, 2))
        L = plant_anomaly(X, region_fraction=0.1, seed=1)
        above = X[:, 1] >= L.line.a * X[:, 0] + L.line.b
        expect = above if L.side == "above" else ~above
        # the quantile threshold point itself may flip under the line
        # form's rounding; everything off the boundary must agree
        flipped = L.inside != expect
        dist = np.abs(X[:, 1] - (L.line.a * X[:, 0] + L.line.b))
        assert flipped.sum() <= 2
        assert np.all(dist[flipped] <= 1e-9 * (1.0 + np.abs(X).max()))
        assert int(L.inside.sum()) == 200

    def test_fraction_edges(self):
        rng = np.random.default_rng(5)
        X = rng.random((50, 2))
        assert plant_anomaly(X, region_fraction=0.0, seed=0).inside.sum() == 0
        assert plant_anomaly(X, region_fraction=1.0, seed=0).inside.sum() == 50

    def test_param_validation(self):
        X = np.random.default_rng(6).random((10, 2))
        with pytest.raises(GeometryError):
            plant_anomaly(X, p_in=1.5)
        with pytest.raises(GeometryError):
            plant_anomaly(X, region_fraction=-0.1)

    def test_deterministic(self):
        rng = np.random.default_rng(7)
        X = rng.random((500, 2))
        a = plant_anomaly(X, seed=11)
        b = plant_anomaly(X, seed=11)
        assert np.array_equal(a.measured, b.measured)
        assert np.array_equal(a.baseline, b.baseline)
        assert a.line == b.line and a.side == b.side


class TestScanDiscrepancy:
    def _instance(self, n=300, seed=5):
        rng = np.random.default_rng(11)
        X = rng.random((n, 2))
        L = plant_anomaly(X, region_fraction=0.2, seed=seed)
        return L, identity_sample(X)

    def test_winner_recount_is_exact(self):
        L, s = self._instance()
        res = scan_discrepancy(L, s, net_size=300, seed=0)
        above = L.points[:, 1] >= res.line.a * L.points[:, 0] + res.line.b
        inside = above if res.side == "above" else ~above
        m = (inside & L.measured).sum() / L.measured.sum()
        b = (inside & L.baseline).sum() / L.baseline.sum()
        assert res.phi == abs(m - b)
        assert res.discrepancy_error == abs(res.phi - res.phi_planted)

    def test_estimate_maximal_over_spot_checks(self):
        L, s = self._instance()
        res = scan_discrepancy(L, s, net_size=300, seed=0)
        wm = s.weights * L.measured[s.ids]
        wb = s.weights * L.baseline[s.ids]
        wm, wb = wm / wm.sum(), wb / wb.sum()
        rng = np.random.default_rng(1)
        for _ in range(60):
            i, j = rng.choice(L.n, 2, replace=False)
            dx = L.points[j, 0] - L.points[i, 0]
            if dx == 0.0:
                continue
            a = (L.points[j, 1] - L.points[i, 1]) / dx
            b = L.points[i, 1] - a * L.points[i, 0]
            above = s.points[:, 1] >= a * s.points[:, 0] + b
            est = abs(wm[above].sum() - wb[above].sum())
            assert est <= res.phi_estimate + 1e-12

    def test_all_points_share_x_degenerates(self):
        X = np.zeros((40, 2))
        X[:, 1] = np.linspace(0.0, 1.0, 40)
        L = plant_anomaly(X, region_fraction=0.5, seed=2)
        with pytest.raises(DegenerateLine):
            scan_discrepancy(L, identity_sample(X), net_size=40, seed=0)

    def test_empty_measured_set_still_scans(self):
        L, s = self._instance()
        L = LabeledPoints(L.points, np.zeros(L.n, dtype=bool), L.baseline,
                          L.line, L.side, L.region, L.inside)
        res = scan_discrepancy(L, s, net_size=100, seed=0)
        assert np.isfinite(res.phi) and np.isfinite(res.phi_estimate)

    def test_net_size_validation(self):
        L, s = self._instance()
        with pytest.raises(GeometryError):
            scan_discrepancy(L, s, net_size=1)

    def test_deterministic(self):
        L, s = self._instance()
        a = scan_discrepancy(L, s, net_size=120, seed=3)
        b = scan_discrepancy(L, s, net_size=120, seed=3)
        assert a == b
