import numpy as np
import pytest

from anchors import PAYOFF_P15_E1
from ucx.bellman import SearchBudget, brute_force_bellman
from ucx.certificates import certificate_ge2
from ucx.domain import LambdaPoint, boundary_value, contains
from ucx.envelope import ObstacleGrid, concavify, envelope_slice, sample_boundary
from ucx.errors import DomainError, InfeasibleError


@pytest.fixture(scope="module")
def grid_p4():
    return sample_boundary(4.0, 0.5, 24, 8.0 * 2.0**4)


@pytest.fixture(scope="module")
def grid_p2():
    return sample_boundary(2.0, 0.5, 24, 8.0 * 2.0**2)


@pytest.fixture(scope="module")
def grid_p15():
    return sample_boundary(1.5, 0.5, 40, 16.0)


class TestSampleBoundary:
    def test_minimal_grid(self):
        grid = sample_boundary(2.0, 0.5, 2, 8.0)
        assert len(grid) >= 12

    def test_all_points_on_boundary(self, grid_p4):
        for pt in grid_p4.points[:: max(1, len(grid_p4) // 400)]:
            assert contains(LambdaPoint(*pt), 4.0).on_boundary

    def test_values_match_boundary_data(self, grid_p4):
        idx = np.linspace(0, len(grid_p4) - 1, 73, dtype=int)
        for i in idx:
            expected = boundary_value(LambdaPoint(*grid_p4.points[i]), 4.0, 0.5)
            assert grid_p4.values[i] == pytest.approx(expected, abs=1e-12)

    def test_antipodal_anchor_present_with_zero_value(self, grid_p4):
        target = np.array([1.0, 1.0, 2.0**4])
        dists = np.abs(grid_p4.points - target).max(axis=1)
        i = int(np.argmin(dists))
        assert dists[i] < 1e-9
        assert grid_p4.values[i] == pytest.approx(0.0, abs=1e-12)

    def test_truncation_respected(self, grid_p4):
        assert np.abs(grid_p4.points).max() <= grid_p4.radius + 1e-9

    def test_parameter_validation(self):
        with pytest.raises(DomainError):
            sample_boundary(2.0, 0.5, 1, 8.0)
        with pytest.raises(DomainError):
            sample_boundary(2.0, 0.5, 8, 0.0)


class TestConcavify:
    def test_apex_value_zero(self, grid_p2):
        assert concavify(grid_p2, LambdaPoint(0.0, 0.0, 0.0)).result == pytest.approx(0.0, abs=1e-10)

    def test_diagonal_ray_sample_reproduced(self, grid_p2):
        # the obstacle is concave along the edge ray, so the envelope touches it
        q = concavify(grid_p2, LambdaPoint(1.0, 1.0, 0.0))
        assert q.result == pytest.approx(1.0, abs=1e-9)

    def test_ge2_query_point_exact(self, grid_p4):
        # extremal decomposition (f = g mass) + (f = -g mass) lies in the grid
        q = concavify(grid_p4, LambdaPoint(1.0, 1.0, 1.0))
        assert q.result == pytest.approx(15.0 / 16.0, abs=1e-9)

    def test_active_support_caratheodory(self, grid_p4):
        q = concavify(grid_p4, LambdaPoint(1.0, 1.0, 1.0))
        assert 1 <= len(q.active_weights) <= 4
        total = sum(w for _, w in q.active_weights)
        assert total == pytest.approx(1.0, abs=1e-9)
        recon = sum(w * grid_p4.points[i] for i, w in q.active_weights)
        np.testing.assert_allclose(recon, [1.0, 1.0, 1.0], atol=1e-8)

    def test_lt2_chord_midpoint(self, grid_p15):
        q = concavify(grid_p15, LambdaPoint(1.0, 1.0, 1.0))
        assert PAYOFF_P15_E1 - 5e-3 <= q.result <= PAYOFF_P15_E1 + 1e-9

    def test_outside_hull_infeasible(self, grid_p2):
        with pytest.raises(InfeasibleError):
            concavify(grid_p2, LambdaPoint(1000.0, 1.0, 1.0))

    def test_majorizes_obstacle_at_samples(self, grid_p2):
        idx = np.linspace(0, len(grid_p2) - 1, 29, dtype=int)
        for i in idx:
            q = concavify(grid_p2, LambdaPoint(*grid_p2.points[i]))
            assert q.result >= grid_p2.values[i] - 1e-9

    def test_concavity_between_queries(self, grid_p4):
        u, v = LambdaPoint(1.0, 1.0, 0.5), LambdaPoint(1.0, 1.0, 3.0)
        qu, qv = concavify(grid_p4, u).result, concavify(grid_p4, v).result
        for lam in [0.25, 0.5, 0.75]:
            mid = LambdaPoint(1.0, 1.0, lam * 0.5 + (1 - lam) * 3.0)
            assert concavify(grid_p4, mid).result >= lam * qu + (1 - lam) * qv - 1e-9

    def test_homogeneity(self, grid_p4):
        x = LambdaPoint(1.0, 1.0, 1.0)
        base = concavify(grid_p4, x).result
        for lam in [0.5, 2.0]:
            assert concavify(grid_p4, x.scaled(lam)).result == pytest.approx(
                lam * base, rel=1e-8
            )

    def test_refinement_never_decreases(self, grid_p2):
        coarse = sample_boundary(2.0, 0.5, 8, 8.0 * 2.0**2)
        refined = ObstacleGrid(
            np.vstack([coarse.points, grid_p2.points]),
            np.concatenate([coarse.values, grid_p2.values]),
            coarse.p,
            coarse.theta,
            coarse.radius,
        )
        for x3 in [0.5, 1.5, 3.0]:
            x = LambdaPoint(1.0, 1.0, x3)
            assert concavify(refined, x).result >= concavify(coarse, x).result - 1e-9


class TestEnvelopeSlice:
    def test_p2_linear_everywhere(self, grid_p2):
        rows = envelope_slice(2.0, 0.5, np.linspace(0.0, 4.0, 17), grid_p2)
        for x3, val in rows:
            assert val == pytest.approx(1.0 - x3 / 4.0, abs=1e-9)

    def test_nonincreasing(self, grid_p4):
        rows = envelope_slice(4.0, 0.5, np.linspace(0.0, 16.0, 15), grid_p4)
        vals = [v for _, v in rows]
        assert all(b <= a + 1e-9 for a, b in zip(vals, vals[1:]))

    def test_boundary_pin_at_right_end(self, grid_p4):
        rows = envelope_slice(4.0, 0.5, [2.0**4], grid_p4)
        assert rows[0][1] == pytest.approx(0.0, abs=1e-9)

    def test_range_validation(self, grid_p2):
        with pytest.raises(DomainError):
            envelope_slice(2.0, 0.5, [5.0], grid_p2)


class TestSandwich:
    def test_three_routes_agree_at_query_point(self, grid_p4):
        x = LambdaPoint(1.0, 1.0, 1.0)
        cert = certificate_ge2(4.0).value(x)
        env = concavify(grid_p4, x).result
        bf = brute_force_bellman(x, 4.0, 0.5, SearchBudget(48, 800, seed=2)).value
        assert bf - 2e-2 <= env <= cert + 1e-9
        assert bf <= cert + 1e-9
