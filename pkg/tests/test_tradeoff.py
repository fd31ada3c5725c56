"""Frontier solver against the closed binary form and the exhaustive oracle."""

import numpy as np
import pytest

from privmetrics import (Alphabet, ConvergenceError, InvalidArgumentError,
                         LossMatrix, Pmf, ResourceLimitError, binary_example,
                         blahut_arimoto, frontier, grid_search_oracle,
                         make_uniform, mutual_information)
from privmetrics.probability import joint_from

from oracles import binary_rate_distortion, random_pmf

AB = Alphabet(("0", "1"))
UNIFORM2 = make_uniform(AB)
HAMMING2 = LossMatrix.hamming(AB)


class TestBlahutArimoto:
    def test_zero_slope_is_constant_output(self):
        prior = Pmf(AB, [0.8, 0.2])
        costs = LossMatrix(AB, AB, [[0.0, 3.0], [1.0, 0.0]])
        point = blahut_arimoto(prior, costs, 0.0)
        assert point.mutual_info == 0.0
        # Output 0 costs E=0.2, output 1 costs E=2.4; pick output 0.
        assert point.achieved_distortion == pytest.approx(0.2, abs=1e-15)
        np.testing.assert_array_equal(point.channel.probs[:, 0], [1.0, 1.0])

    def test_high_slope_approaches_identity(self):
        point = blahut_arimoto(UNIFORM2, HAMMING2, 50.0)
        assert point.mutual_info == pytest.approx(1.0, abs=1e-3)
        assert point.achieved_distortion == pytest.approx(0.0, abs=1e-3)

    def test_slope_sweep_traces_rate_distortion(self):
        for slope in (0.5, 1.0, 2.0, 4.0, 8.0):
            point = blahut_arimoto(UNIFORM2, HAMMING2, slope)
            d = point.achieved_distortion
            if 0.0 < d < 0.5:
                assert point.mutual_info == pytest.approx(
                    binary_rate_distortion(d), abs=1e-3)

    def test_objective_monotone_in_debug(self):
        point = blahut_arimoto(Pmf(AB, [0.6, 0.4]), HAMMING2, 2.0, debug=True)
        trace = point.objective_trace
        assert len(trace) >= 1
        assert all(b <= a + 1e-12 for a, b in zip(trace, trace[1:]))

    def test_zero_prior_symbols_dropped(self):
        tri = Alphabet(("a", "b", "c"))
        prior = Pmf(tri, [0.5, 0.5, 0.0])
        loss = LossMatrix.hamming(tri)
        point = blahut_arimoto(prior, loss, 3.0)
        # The returned channel still has a valid row for the dead symbol.
        assert point.channel.probs.shape == (3, 3)
        np.testing.assert_allclose(point.channel.probs.sum(axis=1), 1.0,
                                   atol=1e-12)

    def test_convergence_error_carries_state(self):
        with pytest.raises(ConvergenceError) as err:
            blahut_arimoto(Pmf(AB, [0.6, 0.4]), HAMMING2, 2.0, max_iter=1,
                           tol=1e-30)
        assert err.value.last_iterate is not None
        assert err.value.residual is not None

    def test_negative_slope_rejected(self):
        with pytest.raises(InvalidArgumentError):
            blahut_arimoto(UNIFORM2, HAMMING2, -1.0)


class TestFrontier:
    def test_budget_beyond_max_loss(self):
        curve = frontier(UNIFORM2, HAMMING2, [1.5])
        assert curve.points[0].mutual_info == 0.0
        assert curve.points[0].status == "ok"

    def test_budget_010(self):
        point = frontier(UNIFORM2, HAMMING2, [0.1]).points[0]
        assert point.status == "ok"
        assert point.mutual_info == pytest.approx(
            binary_rate_distortion(0.1), abs=1e-3)
        assert point.achieved_distortion <= 0.1 + 1e-9

    def test_budget_zero_forces_identity(self):
        point = frontier(UNIFORM2, HAMMING2, [0.0]).points[0]
        assert point.status == "ok"
        assert point.achieved_distortion == pytest.approx(0.0, abs=1e-9)
        assert point.mutual_info == pytest.approx(1.0, abs=1e-6)

    def test_curve_monotone_and_convex(self):
        budgets = [0.05, 0.1, 0.18, 0.2, 0.25, 0.33, 0.35, 0.4, 0.45]
        curve = frontier(UNIFORM2, HAMMING2, budgets)
        infos = [p.mutual_info for p in curve.points]
        for a, b in zip(infos, infos[1:]):
            assert b <= a + 1e-9
        for i in range(1, len(budgets) - 1):
            span = budgets[i + 1] - budgets[i - 1]
            weight = (budgets[i + 1] - budgets[i]) / span
            chord = weight * infos[i - 1] + (1 - weight) * infos[i + 1]
            assert infos[i] <= chord + 1e-6

    def test_budget_validation(self):
        with pytest.raises(InvalidArgumentError):
            frontier(UNIFORM2, HAMMING2, [])
        with pytest.raises(InvalidArgumentError):
            frontier(UNIFORM2, HAMMING2, [-0.1])
        with pytest.raises(InvalidArgumentError):
            frontier(UNIFORM2, HAMMING2, [0.3, 0.1])

    def test_infeasible_budget_flagged(self):
        # Every estimate costs at least 1, so a 0.5 budget cannot be met.
        loss = LossMatrix(AB, AB, [[1.0, 2.0], [3.0, 1.0]])
        curve = frontier(UNIFORM2, loss, [0.5])
        assert curve.points[0].status == "infeasible"


class TestGridSearchOracle:
    def test_binary_budget_030(self):
        point = grid_search_oracle(UNIFORM2, HAMMING2, 0.3, resolution=100)
        assert point.mutual_info == pytest.approx(
            binary_rate_distortion(0.3), abs=2e-2)

    def test_slack_budget_is_free(self):
        point = grid_search_oracle(UNIFORM2, HAMMING2, 0.5, resolution=40)
        assert point.mutual_info == 0.0

    def test_zero_budget_forces_identity(self):
        point = grid_search_oracle(UNIFORM2, HAMMING2, 0.0, resolution=40)
        assert point.mutual_info == pytest.approx(1.0, abs=1e-12)
        np.testing.assert_array_equal(point.channel.probs, np.eye(2))

    def test_cap_enforced(self):
        tri = Alphabet(("a", "b", "c"))
        with pytest.raises(ResourceLimitError):
            grid_search_oracle(make_uniform(tri), LossMatrix.hamming(tri),
                               0.3, resolution=300)

    def test_infeasible_budget_rejected(self):
        loss = LossMatrix(AB, AB, [[1.0, 2.0], [3.0, 1.0]])
        with pytest.raises(InvalidArgumentError):
            grid_search_oracle(UNIFORM2, loss, 0.5, resolution=20)

    def test_agrees_with_blahut_arimoto(self):
        rng = np.random.default_rng(61)
        shapes = [(2, 2), (3, 2), (2, 3)]
        for trial in range(6):
            nx, ny = shapes[trial % len(shapes)]
            ax = Alphabet(tuple(f"x{i}" for i in range(nx)))
            ay = Alphabet(tuple(f"y{i}" for i in range(ny)))
            prior = Pmf(ax, random_pmf(rng, nx))
            costs = rng.random((nx, ny)) * 2.0
            costs[np.arange(nx), rng.integers(0, ny, nx)] = 0.0
            loss = LossMatrix(ax, ay, costs)
            budget = float(rng.uniform(0.05, 0.5))
            resolution = 60 if ny == 2 else 40
            oracle = grid_search_oracle(prior, loss, budget, resolution=resolution)
            ba = frontier(prior, loss, [budget]).points[0]
            assert ba.status == "ok"
            # The fine oracle cannot beat the optimizer...
            assert oracle.mutual_info >= ba.mutual_info - 1e-4
            # ...and the optimizer cannot beat the oracle beyond grid error.
            assert ba.mutual_info >= oracle.mutual_info - 8.0 / resolution - 1e-9

    def test_oracle_channel_I_consistent(self):
        point = grid_search_oracle(UNIFORM2, HAMMING2, 0.25, resolution=20)
        joint = joint_from(UNIFORM2, point.channel)
        assert mutual_information(joint) == pytest.approx(
            point.mutual_info, abs=1e-12)


class TestBinaryExample:
    def test_closed_forms(self):
        result = binary_example(0.3, 0.7)
        assert result.avg_privacy == pytest.approx(0.3, abs=1e-12)
        assert result.distortion == pytest.approx(0.3, abs=1e-12)
        assert result.max_privacy_at_u0 == pytest.approx(0.3, abs=1e-12)

    def test_no_perturbation(self):
        result = binary_example(0.0, 0.8)
        assert result.avg_privacy == 0.0
        assert result.distortion == 0.0

    def test_full_utility_floor(self):
        assert binary_example(0.2, 1.0).max_privacy_at_u0 == pytest.approx(
            0.0, abs=1e-12)

    def test_parameter_validation(self):
        with pytest.raises(InvalidArgumentError):
            binary_example(0.5, 0.7)
        with pytest.raises(InvalidArgumentError):
            binary_example(-0.1, 0.7)
        with pytest.raises(InvalidArgumentError):
            binary_example(0.3, 0.5)
        with pytest.raises(InvalidArgumentError):
            binary_example(0.3, 1.1)
