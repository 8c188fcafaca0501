import math

import numpy as np
import pytest

from vargamma.distributions import LaplaceParams, vg_pdf
from vargamma.errors import DegenerateSample, InvalidNesting, InvalidParameter
from vargamma.estimators import (
    FitResult,
    Model,
    VgReturnParams,
    fit_returns,
    gaussian_loglik,
    laplace_fit_mle,
    laplace_fit_moments,
    likelihood_ratio_test,
    run_efficiency_experiment,
    vg_loglik,
)
from vargamma.numerics import RngStream
from vargamma.processes import VgProcessParams, vg_marginal_params, vg_terminal_sample


def _fit(loglik: float, model: Model = Model.GAUSSIAN, n: int = 100) -> FitResult:
    return FitResult(model=model, params=None, log_likelihood=loglik,
                     n_obs=n, converged=True, iterations=1)


class TestLaplaceEstimators:
    def test_mle_hand_examples(self):
        p = laplace_fit_mle([1.0, 2.0, 3.0])
        assert p.theta == pytest.approx(2.0)
        assert p.s == pytest.approx(2.0 / 3.0)
        p = laplace_fit_mle([5.0, 5.0, 5.0, 9.0])
        assert p.theta == pytest.approx(5.0)
        assert p.s == pytest.approx(1.0)

    def test_moment_hand_example(self):
        p = laplace_fit_moments([-1.0, 1.0])
        assert p.theta == pytest.approx(0.0)
        assert p.s == pytest.approx(1.0 / math.sqrt(2.0))

    def test_degenerate(self):
        with pytest.raises(DegenerateSample):
            laplace_fit_mle([3.0, 3.0, 3.0])
        with pytest.raises(DegenerateSample):
            laplace_fit_moments([3.0, 3.0, 3.0])
        with pytest.raises(InvalidParameter):
            laplace_fit_mle([1.0])

    def test_consistency(self):
        true = LaplaceParams(0.4, 1.7)
        x = RngStream(61).generator.laplace(true.theta, true.s, 10**6)
        mle = laplace_fit_mle(x)
        mom = laplace_fit_moments(x)
        assert mle.theta == pytest.approx(true.theta, abs=0.01)
        assert mle.s == pytest.approx(true.s, abs=0.01)
        assert mom.theta == pytest.approx(true.theta, abs=0.01)
        assert mom.s == pytest.approx(true.s, abs=0.02)

    def test_median_minimizes_absolute_loss(self):
        x = RngStream(62).generator.laplace(0.0, 1.0, 501)
        med = laplace_fit_mle(x).theta
        best = np.sum(np.abs(x - med))
        for probe in np.linspace(med - 1.0, med + 1.0, 101):
            assert np.sum(np.abs(x - probe)) >= best - 1e-9


class TestEfficiencyExperiment:
    def test_variance_ratios(self):
        # The mean and the scaled SD are strictly less efficient than the
        # median and the mean absolute deviation; known asymptotic ratios
        # are 2 and 5/4.
        reports = run_efficiency_experiment(
            LaplaceParams(0.0, 1.0), [2000], 2000, RngStream(0)
        )
        r = reports[0]
        assert 1.7 < r.var_mean / r.var_median < 2.3
        assert 1.1 < r.var_scaled_sd / r.var_mad < 1.4

    def test_variances_shrink_with_n(self):
        reports = run_efficiency_experiment(
            LaplaceParams(0.0, 1.0), [500, 4000], 1500, RngStream(63)
        )
        small, large = reports
        assert large.var_median < small.var_median
        assert large.var_mad < small.var_mad

    def test_cramer_rao_scaling(self):
        # n * var(MAD) approaches s^2 for the Laplace MLE scale.
        s = 1.5
        r = run_efficiency_experiment(LaplaceParams(0.0, s), [5000], 2000, RngStream(64))[0]
        assert 5000 * r.var_mad == pytest.approx(s**2, rel=0.1)

    def test_even_n_median_beats_odd_neighbors(self):
        # With an even sample size the median interpolates two order
        # statistics, which lowers its variance below the average of the
        # adjacent odd sizes.
        gen = RngStream(60).generator
        reps = 300_000
        var = {}
        for n in (99, 100, 101):
            x = gen.laplace(0.0, 1.0, size=(reps, n))
            var[n] = float(np.median(x, axis=1).var())
        assert var[100] < 0.5 * (var[99] + var[101])

    def test_replication_floor(self):
        with pytest.raises(InvalidParameter):
            run_efficiency_experiment(LaplaceParams(0, 1), [100], 500, RngStream(0))


class TestLogLikelihoods:
    def test_gaussian_single_point(self):
        assert gaussian_loglik([0.0], 0.0, 1.0) == pytest.approx(
            -0.5 * math.log(2.0 * math.pi)
        )

    def test_gaussian_matches_scipy(self):
        from scipy import stats

        x = RngStream(65).generator.standard_normal(100) * 0.3 + 0.1
        assert gaussian_loglik(x, 0.1, 0.3) == pytest.approx(
            float(np.sum(stats.norm.logpdf(x, 0.1, 0.3))), abs=1e-8
        )

    def test_vg_degenerate_near_gaussian(self):
        x = RngStream(66).generator.standard_normal(200) * 0.012 - 0.001
        p = VgReturnParams(-0.001, 0.012, 1e-8)
        g = gaussian_loglik(x, -0.001, 0.012)
        assert vg_loglik(x, p) == pytest.approx(g, abs=1e-6 * abs(g))

    def test_vg_matches_pointwise_density(self):
        p = VgReturnParams(0.05, 0.2, 0.5)
        x = np.array([-0.3, -0.05, 0.0, 0.1, 0.4])
        marginal = vg_marginal_params(VgProcessParams(p.theta, p.sigma, p.nu), 1.0)
        direct = sum(math.log(vg_pdf(marginal, float(v))) for v in x)
        assert vg_loglik(x, p) == pytest.approx(direct, abs=1e-4)

    def test_true_params_beat_perturbed(self):
        true = VgReturnParams(0.0, 0.012, 0.03)
        x = vg_terminal_sample(VgProcessParams(true.theta, true.sigma, true.nu), 1.0,
                               4000, RngStream(67))
        ll_true = vg_loglik(x, true)
        assert ll_true > vg_loglik(x, VgReturnParams(0.0, 0.02, 0.03))
        assert ll_true > vg_loglik(x, VgReturnParams(0.005, 0.012, 0.03))

    def test_invalid_args(self):
        with pytest.raises(InvalidParameter):
            vg_loglik([0.0], VgReturnParams(0.0, 1.0, 0.0))
        with pytest.raises(InvalidParameter):
            gaussian_loglik([0.0], 0.0, 0.0)


class TestFitReturns:
    def test_gaussian_closed_form(self):
        x = np.array([0.0, 1.0, 2.0, 3.0] * 6)
        fit = fit_returns(x, Model.GAUSSIAN)
        assert fit.params.theta == pytest.approx(np.mean(x))
        assert fit.params.sigma == pytest.approx(np.std(x))
        assert fit.params.nu == 0.0
        assert fit.log_likelihood == pytest.approx(
            gaussian_loglik(x, np.mean(x), np.std(x))
        )
        assert fit.converged

    def test_vg_recovers_synthetic(self):
        true = VgProcessParams(0.1, 0.25, 0.4)
        x = vg_terminal_sample(true, 1.0, 4000, RngStream(68))
        fit = fit_returns(x, Model.VG)
        assert fit.converged
        assert fit.params.theta == pytest.approx(true.theta, abs=0.05)
        assert fit.params.sigma == pytest.approx(true.sigma, rel=0.1)
        assert fit.params.nu == pytest.approx(true.nu, rel=0.35)
        # the optimum must dominate the generating parameters
        assert fit.log_likelihood >= vg_loglik(x, VgReturnParams(0.1, 0.25, 0.4)) - 1e-6

    def test_vg_beats_gaussian_on_heavy_tails(self):
        true = VgProcessParams(0.0, 0.012, 0.5)
        x = vg_terminal_sample(true, 1.0, 3000, RngStream(69))
        g = fit_returns(x, Model.GAUSSIAN)
        v = fit_returns(x, Model.VG)
        assert v.log_likelihood > g.log_likelihood

    def test_too_few_observations(self):
        with pytest.raises(InvalidParameter):
            fit_returns(np.zeros(10), Model.GAUSSIAN)
        with pytest.raises(InvalidParameter):
            fit_returns(np.ones(30), Model.LAPLACE)


class TestLikelihoodRatioTest:
    def test_reported_daily_return_values(self):
        stat, p = likelihood_ratio_test(_fit(1004.44275), _fit(1012.215, Model.VG), df=1)
        assert f"{stat:.4f}" == "15.5445"
        assert p < 0.0001

    def test_chi2_reference(self):
        from scipy import stats

        stat, p = likelihood_ratio_test(_fit(-10.0), _fit(-7.0, Model.VG), df=2)
        assert stat == pytest.approx(6.0)
        assert p == pytest.approx(float(stats.chi2.sf(6.0, 2)))

    def test_equal_likelihoods(self):
        stat, p = likelihood_ratio_test(_fit(-5.0), _fit(-5.0, Model.VG), df=1)
        assert stat == 0.0
        assert p == 1.0

    def test_tiny_negative_clamped(self):
        stat, _ = likelihood_ratio_test(_fit(-5.0), _fit(-5.0 - 1e-9, Model.VG), df=1)
        assert stat == 0.0

    def test_nesting_violation(self):
        with pytest.raises(InvalidNesting):
            likelihood_ratio_test(_fit(-5.0), _fit(-6.0, Model.VG), df=1)
        with pytest.raises(InvalidParameter):
            likelihood_ratio_test(_fit(-5.0), _fit(-4.0, Model.VG), df=0)
