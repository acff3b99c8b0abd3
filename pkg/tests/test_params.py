import math

import numpy as np
import pytest

from hetda.params import (
    CompParams,
    LowParams,
    ParameterInfeasible,
    depth_estimate,
    inverse_iterations_boost,
    low_params,
    low_ratio_bound,
    lowcomp_params,
    lowcomp_ratio_bound,
    params_for_budget,
    phi_optimal,
    reduction_counts,
)


class TestRatioBounds:
    def test_low_ratio_bound_arithmetic(self):
        # n=10, eps=0.5: 1 + (2 - 1) / (60 - 4 + 0.5)
        assert low_ratio_bound(10, 0.5) == 1.0 + 1.0 / 56.5

    def test_lowcomp_ratio_bound_arithmetic(self):
        # n=12, delta=0.1: sqrt((144 + 2*0.64) / (144 + 2*0.04))
        assert lowcomp_ratio_bound(12, 0.1) == math.sqrt(145.28 / 144.08)


class TestLowParams:
    def test_golden_tuple(self):
        pl, alpha = low_params(10, delta=0.2, epsilon=0.5, m=2)
        assert alpha == 10
        assert pl.as_tuple() == (7, 7, 2, 10)

    def test_tighter_delta_never_shrinks_parameters(self):
        prev = None
        for delta in (0.2, 0.1, 0.05, 0.01, 0.001):
            pl, alpha = low_params(10, delta)
            if prev is not None:
                assert alpha >= prev[1]
                assert pl.t >= prev[0].t and pl.d >= prev[0].d
            prev = (pl, alpha)

    def test_epsilon_one_is_infeasible(self):
        with pytest.raises(ParameterInfeasible) as err:
            low_params(10, 0.2, epsilon=1.0)
        assert "epsilon" in str(err.value)

    def test_preconditions(self):
        with pytest.raises(ValueError):
            low_params(10, 0.3)
        with pytest.raises(ValueError):
            low_params(10, 0.2, m=3)
        with pytest.raises(ValueError):
            low_params(1, 0.2)


class TestLowCompParams:
    def test_golden_tuple(self):
        pc, alpha = lowcomp_params(10, delta=0.2, eta=0.1, m=2)
        assert alpha == 4
        assert pc.as_tuple() == (5, 3, 2, 12)
        assert abs(pc.phi - phi_optimal(10, 0.2)) < 1e-15

    def test_rounds_blow_up_near_quarter(self):
        t_far = lowcomp_params(10, 0.20, 0.1)[0].t
        t_near = lowcomp_params(10, 0.249, 0.1)[0].t
        assert t_near > t_far

    def test_eta_validation(self):
        with pytest.raises(ValueError):
            lowcomp_params(10, 0.2, eta=1.5)


class TestPhiOptimal:
    @pytest.mark.parametrize("delta", [0.01, 0.1, 0.2, 0.24])
    def test_within_gap_interval(self, delta):
        for n in (4, 10, 25):
            phi = phi_optimal(n, delta)
            assert 2 * delta < phi < 1 - 2 * delta

    def test_equal_ratio_property(self):
        n, delta = 10, 0.15
        phi = phi_optimal(n, delta)
        tc = lambda x: 0.5 + x / n**2
        left = tc(phi**2) / tc((2 * delta) ** 2)
        right = tc((1 - 2 * delta) ** 2) / tc(phi**2)
        assert abs(left - right) < 1e-12

    def test_beats_grid_search(self):
        n, delta = 10, 0.2
        tc = lambda x: 0.5 + x / n**2
        a = tc((2 * delta) ** 2)
        c = tc((1 - 2 * delta) ** 2)
        best_closed = min(
            tc(phi_optimal(n, delta) ** 2) / a, c / tc(phi_optimal(n, delta) ** 2)
        )
        grid = np.linspace(a, c, 10_002)[1:-1]
        best_grid = np.minimum(grid / a, c / grid).max()
        assert best_closed >= best_grid - 1e-12

    def test_sweep_stays_in_interval(self):
        for delta in np.linspace(0.001, 0.249, 200):
            phi = phi_optimal(10, float(delta))
            assert 2 * delta < phi < 1 - 2 * delta


class TestDepthEstimate:
    @pytest.mark.parametrize(
        "pl,pc,expected_d",
        [
            ((3, 3, 2, 6), (3, 3, 2, 11), 113),
            ((3, 3, 2, 7), (3, 3, 2, 11), 119),
            ((3, 3, 2, 6), (3, 3, 2, 12), 119),
        ],
    )
    def test_reference_depth_column(self, pl, pc, expected_d):
        report = depth_estimate(10, LowParams(*pl), CompParams(*pc, phi=0.51))
        assert report.d_column == expected_d

    def test_total_depth_identity(self):
        report = depth_estimate(10, LowParams(3, 3, 2, 6), CompParams(3, 3, 2, 12, phi=0.51))
        assert report.total_depth == 45 * report.d_column

    def test_alternate_convention_recorded(self):
        report = depth_estimate(10, LowParams(3, 3, 2, 6), CompParams(3, 3, 2, 12, phi=0.51))
        # d + 1 + t(d' + log2(m) + 2) with d = d' differs by exactly 1
        assert report.d_low_alt == report.d_low - 1
        assert report.d_comp_alt == report.d_comp - 1

    def test_monotone_in_each_knob(self):
        base = depth_estimate(10, LowParams(3, 3, 2, 6), CompParams(3, 3, 2, 12, phi=0.51))
        for pl in [(4, 3, 2, 6), (3, 4, 2, 6), (3, 3, 2, 7), (3, 3, 4, 6)]:
            step = depth_estimate(10, LowParams(*pl), CompParams(3, 3, 2, 12, phi=0.51))
            assert step.total_depth >= base.total_depth

    def test_complexity_ordering_matches_depth_table(self):
        rows = [
            ((3, 3, 2, 6), (3, 3, 2, 11)),
            ((3, 3, 2, 7), (3, 3, 2, 11)),
            ((3, 3, 2, 6), (3, 3, 2, 12)),
        ]
        counts = [
            depth_estimate(10, LowParams(*pl), CompParams(*pc, phi=0.51)).mult_count
            for pl, pc in rows
        ]
        assert counts[0] < counts[1] < counts[2]


class TestCountFormulas:
    @pytest.mark.parametrize("variant", ["optimized", "basic"])
    def test_counts_match_measured_tally(self, variant):
        import warnings

        from hetda.harness import sample_matrix
        from hetda.reduction import he_reduce, he_reduce_optimized

        pl = LowParams(2, 3, 2, 3)
        pc = CompParams(3, 2, 2, 4, phi=phi_optimal(6, 0.2))
        matrix = sample_matrix(6, 0.5, 99, 0)
        runner = he_reduce_optimized if variant == "optimized" else he_reduce
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", RuntimeWarning)
            approx = runner(matrix, pl, pc)
        mults, adds = reduction_counts(6, pl, pc, variant)
        assert (approx.counter.mults, approx.counter.adds) == (mults, adds)

    def test_counts_match_with_m_four(self):
        import warnings

        from hetda.harness import sample_matrix
        from hetda.reduction import he_reduce_optimized

        pl = LowParams(2, 2, 4, 2)
        pc = CompParams(2, 2, 4, 2, phi=phi_optimal(5, 0.2))
        matrix = sample_matrix(5, 0.5, 7, 1)
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", RuntimeWarning)
            approx = he_reduce_optimized(matrix, pl, pc)
        assert (approx.counter.mults, approx.counter.adds) == reduction_counts(5, pl, pc)


class TestBudgetResolution:
    def test_resolves_both_tuples(self):
        res = params_for_budget(10, delta=0.2, eta=0.1, epsilon=0.5)
        assert res.low.as_tuple() == (7, 7, 2, 10)
        assert res.comp.as_tuple() == (5, 3, 2, 12)
        assert res.budget.alpha_low == 10 and res.budget.alpha_comp == 4

    def test_boost_rule(self):
        assert inverse_iterations_boost(2, 2) == 1
        assert inverse_iterations_boost(10, 2) == 4
        assert inverse_iterations_boost(16, 2) == 4
        assert inverse_iterations_boost(17, 2) == 5
        assert inverse_iterations_boost(10, 4) == 12
