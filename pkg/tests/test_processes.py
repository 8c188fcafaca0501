import math

import numpy as np
import pytest
from scipy import stats

from vargamma.distributions import vg_cf, vg_pdf
from vargamma.errors import InvalidParameter
from vargamma.numerics import RngStream
from vargamma.processes import (
    BrownianParams,
    PathGrid,
    SubordinatorParams,
    VgProcessParams,
    simulate_brownian,
    simulate_subordinator,
    simulate_vg,
    vg_central_moments,
    vg_marginal_params,
    vg_process_cf,
    vg_terminal_sample,
)

VG = VgProcessParams(theta=0.1, sigma=0.25, nu=0.4)


class TestPathGrid:
    def test_validates(self):
        with pytest.raises(InvalidParameter):
            PathGrid(np.array([0.0, 1.0]), np.array([0.0]))
        with pytest.raises(InvalidParameter):
            PathGrid(np.array([0.5, 1.0]), np.array([0.0, 0.1]))
        with pytest.raises(InvalidParameter):
            PathGrid(np.array([0.0, 2.0, 1.0]), np.zeros(3))

    def test_csv_roundtrip(self, tmp_path):
        grid = PathGrid(np.array([0.0, 0.5, 1.25]), np.array([0.0, -0.3, 0.7]))
        out = tmp_path / "path.csv"
        grid.to_csv(out)
        lines = out.read_text().strip().splitlines()
        assert lines[0] == "time,value"
        data = np.array([[float(v) for v in ln.split(",")] for ln in lines[1:]])
        assert np.array_equal(data[:, 0], grid.times)
        assert np.array_equal(data[:, 1], grid.values)


class TestBrownian:
    def test_starts_at_zero_and_reproducible(self):
        times = np.linspace(0.0, 1.0, 11)
        a = simulate_brownian(BrownianParams(0.1, 0.2), times, RngStream(5))
        b = simulate_brownian(BrownianParams(0.1, 0.2), times, RngStream(5))
        assert a.values[0] == 0.0
        assert np.array_equal(a.values, b.values)

    def test_terminal_moments(self):
        p = BrownianParams(0.3, 0.5)
        times = np.array([0.0, 2.0])
        terminal = np.array(
            [simulate_brownian(p, times, RngStream(40, k)).values[-1] for k in range(4000)]
        )
        assert terminal.mean() == pytest.approx(0.6, abs=0.05)
        assert terminal.var() == pytest.approx(0.5, abs=0.05)

    def test_increment_normality(self):
        p = BrownianParams(0.0, 1.0)
        times = np.linspace(0.0, 1.0, 2001)
        path = simulate_brownian(p, times, RngStream(41))
        z = np.diff(path.values) / math.sqrt(times[1])
        assert stats.kstest(z, "norm").pvalue > 0.01


class TestSubordinator:
    def test_deterministic_when_nu_zero(self):
        times = np.array([0.0, 0.5, 1.5])
        path = simulate_subordinator(SubordinatorParams(2.0, 0.0), times, RngStream(1))
        assert np.allclose(path.values, 2.0 * times)

    def test_nondecreasing(self):
        times = np.linspace(0.0, 5.0, 501)
        path = simulate_subordinator(SubordinatorParams(1.0, 0.5), times, RngStream(42))
        assert np.all(np.diff(path.values) >= 0)

    def test_increment_distribution(self):
        # Increments over dt are Gamma with mean mu*dt and variance nu*dt.
        mu, nu, dt = 1.3, 0.7, 0.25
        times = np.arange(0.0, 2501 * dt, dt)
        path = simulate_subordinator(SubordinatorParams(mu, nu), times, RngStream(43))
        incr = np.diff(path.values)
        shape, scale = mu**2 * dt / nu, nu / mu
        assert stats.kstest(incr, "gamma", args=(shape, 0.0, scale)).pvalue > 0.01

    def test_repeated_times_allowed(self):
        times = np.array([0.0, 1.0, 1.0, 2.0])
        path = simulate_subordinator(SubordinatorParams(1.0, 0.3), times, RngStream(44))
        assert path.values[1] == path.values[2]


class TestVgSimulation:
    def test_nu_zero_is_brownian(self):
        times = np.linspace(0.0, 1.0, 11)
        vg = simulate_vg(VgProcessParams(0.1, 0.2, 0.0), times, RngStream(6))
        bm = simulate_brownian(BrownianParams(0.1, 0.2), times, RngStream(6))
        assert np.array_equal(vg.values, bm.values)

    def test_terminal_matches_single_step(self):
        # Exact transitions: terminal draws need no intermediate grid.
        t, n = 1.5, 200_000
        x = vg_terminal_sample(VG, t, n, RngStream(50))
        m1, m2, m3, m4 = vg_central_moments(VG, t)
        d = x - x.mean()
        assert x.mean() == pytest.approx(m1, abs=4.0 * x.std() / math.sqrt(n))
        assert d.var() == pytest.approx(m2, rel=0.02)
        assert np.mean(d**3) == pytest.approx(m3, rel=0.15)
        assert np.mean(d**4) == pytest.approx(m4, rel=0.1)

    def test_terminal_against_marginal_density(self):
        # Chi-square goodness of fit of simulated X_t against the marginal pdf.
        t, n = 1.0, 100_000
        x = vg_terminal_sample(VG, t, n, RngStream(51))
        marg = vg_marginal_params(VG, t)
        edges = np.quantile(x, np.linspace(0.0, 1.0, 21))
        edges[0], edges[-1] = -np.inf, np.inf
        counts, _ = np.histogram(x, edges)
        finite = np.concatenate([[x.min() - 1.0], edges[1:-1], [x.max() + 1.0]])
        from scipy import integrate

        probs = np.array(
            [
                integrate.quad(lambda y: vg_pdf(marg, y), a, b, limit=200)[0]
                for a, b in zip(finite[:-1], finite[1:])
            ]
        )
        probs /= probs.sum()
        res = stats.chisquare(counts, n * probs)
        assert res.pvalue > 0.01

    def test_increment_stationarity_and_independence(self):
        dt = 0.1
        times = np.arange(0.0, 400.0 + dt / 2, dt)
        path = simulate_vg(VG, times, RngStream(52))
        incr = np.diff(path.values)
        first, second = incr[: incr.size // 2], incr[incr.size // 2 :]
        assert stats.ks_2samp(first, second).pvalue > 0.01
        assert abs(np.corrcoef(incr[:-1], incr[1:])[0, 1]) < 4.0 / math.sqrt(incr.size)

    def test_composition_consistency(self):
        # Building the path from its own clock draws reproduces the marginal law.
        from vargamma.numerics import gamma_variates

        t, n = 1.0, 100_000
        gen = RngStream(53).generator
        g = gamma_variates(gen, np.full(n, t / VG.nu), VG.nu, (n,))
        x = VG.theta * g + VG.sigma * np.sqrt(g) * gen.standard_normal(n)
        y = vg_terminal_sample(VG, t, n, RngStream(55))
        assert stats.ks_2samp(x, y).pvalue > 0.01


class TestProcessCf:
    def test_origin_and_time_zero(self):
        assert vg_process_cf(VG, 0.0, 2.0) == pytest.approx(1.0)
        assert vg_process_cf(VG, 3.0, 0.0) == pytest.approx(1.0)

    def test_matches_marginal_cf(self):
        t = 0.7
        marg = vg_marginal_params(VG, t)
        for u in np.linspace(-6, 6, 13):
            assert vg_process_cf(VG, u, t) == pytest.approx(vg_cf(marg, u), abs=1e-12)

    def test_nu_zero_is_gaussian_cf(self):
        p = VgProcessParams(0.1, 0.2, 0.0)
        t, u = 1.3, 2.0
        expected = np.exp(1j * 0.1 * t * u - 0.5 * 0.04 * t * u**2)
        assert vg_process_cf(p, u, t) == pytest.approx(expected)

    def test_semigroup_in_time(self):
        for u in (-2.0, 0.5, 3.0):
            assert vg_process_cf(VG, u, 3.0) == pytest.approx(
                vg_process_cf(VG, u, 1.0) * vg_process_cf(VG, u, 2.0), abs=1e-12
            )

    def test_monte_carlo(self):
        t, u, n = 1.0, 1.5, 10**6
        x = vg_terminal_sample(VG, t, n, RngStream(56))
        re, im = np.cos(u * x), np.sin(u * x)
        val = vg_process_cf(VG, u, t)
        assert abs(re.mean() - val.real) < 4.0 * re.std() / math.sqrt(n)
        assert abs(im.mean() - val.imag) < 4.0 * im.std() / math.sqrt(n)


class TestMoments:
    def test_kurtosis_symmetric(self):
        # theta=0: kurtosis is 3(1 + nu/t).
        p = VgProcessParams(0.0, 0.3, 0.2)
        for t in (0.5, 1.0, 4.0):
            _, m2, _, m4 = vg_central_moments(p, t)
            assert m4 / m2**2 == pytest.approx(3.0 * (1.0 + p.nu / t))

    def test_variance_and_skew_signs(self):
        m1, m2, m3, _ = vg_central_moments(VG, 2.0)
        assert m1 == pytest.approx(0.2)
        assert m2 == pytest.approx((0.1**2 * 0.4 + 0.25**2) * 2.0)
        assert m3 > 0
        neg = vg_central_moments(VgProcessParams(-0.1, 0.25, 0.4), 2.0)[2]
        assert neg == pytest.approx(-m3)

    def test_moments_from_cf_derivatives(self):
        # Finite-difference derivatives of the cf at 0 reproduce the raw moments.
        t, h = 1.3, 1e-3
        m1, m2, _, _ = vg_central_moments(VG, t)
        cf = lambda u: vg_process_cf(VG, u, t)
        d1 = (cf(h) - cf(-h)) / (2 * h)
        d2 = (cf(h) - 2 * cf(0.0) + cf(-h)) / h**2
        assert (d1 / 1j).real == pytest.approx(m1, abs=1e-6)
        assert (-d2).real == pytest.approx(m2 + m1**2, abs=1e-6)

    def test_invalid_time(self):
        with pytest.raises(InvalidParameter):
            vg_central_moments(VG, 0.0)
        with pytest.raises(InvalidParameter):
            vg_marginal_params(VG, -1.0)
