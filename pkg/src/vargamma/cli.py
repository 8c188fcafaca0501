"""Command-line frontend: simulate, fit, lrt, price, calibrate, efficiency."""
from __future__ import annotations

import csv
import json
import math
import sys
from functools import wraps

import click
import numpy as np

from . import estimators, io, processes, risk_neutral
from .errors import VargammaError
from .estimators import FitResult, Model
from .numerics import QuadratureSpec, RngStream

CHI2_DF2_CRIT_5PCT = 5.991464547107979
CHI2_DF2_CRIT_1PCT = 9.21034037197618


def _fail_machine_readable(exc: VargammaError):
    payload = {"error": type(exc).__name__, "message": str(exc)}
    click.echo(json.dumps(payload), err=True)
    sys.exit(1)


def wraps_errors(f):
    @wraps(f)
    def wrapper(*args, **kwargs):
        try:
            return f(*args, **kwargs)
        except VargammaError as exc:
            _fail_machine_readable(exc)

    return wrapper


@click.group()
def main():
    """Variance-Gamma model toolkit."""


@main.command()
@click.option("--process", type=click.Choice(["bm", "gamma", "vg"]), required=True)
@click.option("--theta", type=float, default=0.0, show_default=True)
@click.option("--sigma", type=float, default=0.1, show_default=True)
@click.option("--nu", type=float, default=0.3, show_default=True)
@click.option("--t-max", type=float, default=1.0, show_default=True)
@click.option("--steps", type=int, default=1000, show_default=True)
@click.option("--paths", type=int, default=1, show_default=True)
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--out", type=click.Path(dir_okay=False), required=True)
@wraps_errors
def simulate(process, theta, sigma, nu, t_max, steps, paths, seed, out):
    """Write simulated paths on a uniform grid as a plot-ready CSV."""
    times = np.linspace(0.0, t_max, steps + 1)
    sims = []
    for k in range(paths):
        rng = RngStream(seed, stream_id=k)
        if process == "bm":
            path = processes.simulate_brownian(processes.BrownianParams(theta, sigma), times, rng)
        elif process == "gamma":
            path = processes.simulate_subordinator(processes.SubordinatorParams(1.0, nu), times, rng)
        else:
            path = processes.simulate_vg(processes.VgProcessParams(theta, sigma, nu), times, rng)
        sims.append(path)
    with open(out, "w", newline="") as fh:
        writer = csv.writer(fh)
        if paths == 1:
            writer.writerow(["time", "value"])
            for t, v in zip(sims[0].times, sims[0].values):
                writer.writerow([repr(float(t)), repr(float(v))])
        else:
            writer.writerow(["path", "time", "value"])
            for k, path in enumerate(sims):
                for t, v in zip(path.times, path.values):
                    writer.writerow([k, repr(float(t)), repr(float(v))])
    click.echo(f"wrote {paths} {process} path(s) to {out}")


def _fit_row(fit: FitResult) -> dict:
    p = fit.params
    return {
        "model": fit.model.value,
        "theta": p.theta,
        "sigma": p.sigma,
        "nu": p.nu if fit.model == Model.VG else None,
        "loglik": fit.log_likelihood,
        "nobs": fit.n_obs,
        "converged": fit.converged,
        "iterations": fit.iterations,
    }


@main.command()
@click.option("--returns", "returns_path", type=click.Path(exists=True, dir_okay=False), required=True)
@click.option("--model", type=click.Choice(["gaussian", "vg", "both"]), default="both", show_default=True)
@click.option("--dt", type=float, default=1.0, show_default=True)
@click.option("--out", type=click.Path(dir_okay=False), default=None)
@wraps_errors
def fit(returns_path, model, dt, out):
    """Maximum-likelihood fits of the Gaussian and VG return models."""
    series = io.load_price_series(returns_path)
    sample = io.log_returns(series)
    report = {"n_returns": int(sample.size), "dt": dt, "fits": []}
    if model in ("gaussian", "both"):
        report["fits"].append(_fit_row(estimators.fit_returns(sample, Model.GAUSSIAN, dt)))
    if model in ("vg", "both"):
        report["fits"].append(_fit_row(estimators.fit_returns(sample, Model.VG, dt)))
    text = json.dumps(report, indent=2)
    if out:
        with open(out, "w") as fh:
            fh.write(text + "\n")
    click.echo(text)


@main.command()
@click.option("--null-loglik", type=float, required=True)
@click.option("--alt-loglik", type=float, required=True)
@click.option("--df", type=int, default=1, show_default=True)
@wraps_errors
def lrt(null_loglik, alt_loglik, df):
    """Wilks likelihood-ratio test from two log-likelihood values."""
    null_fit = FitResult(Model.GAUSSIAN, None, null_loglik, 1, True, 0)
    alt_fit = FitResult(Model.VG, None, alt_loglik, 1, True, 0)
    statistic, p_value = estimators.likelihood_ratio_test(null_fit, alt_fit, df)
    click.echo(f"statistic={statistic:.4f}")
    click.echo(f"p_value={p_value:.6g}")


@main.command()
@click.option("--s0", type=float, required=True)
@click.option("--strike", type=float, default=None)
@click.option("--rate", type=float, required=True)
@click.option("--maturity", type=float, required=True)
@click.option("--theta", type=float, default=0.0, show_default=True)
@click.option("--sigma", type=float, required=True)
@click.option("--nu", type=float, required=True)
@click.option("--strike-grid", default=None, help="LO:HI:N strike grid")
@click.option("--out", type=click.Path(dir_okay=False), default=None)
@wraps_errors
def price(s0, strike, rate, maturity, theta, sigma, nu, strike_grid, out):
    """VG and Black-Scholes call prices, single strike or a strike grid."""
    if (strike is None) == (strike_grid is None):
        raise click.UsageError("provide exactly one of --strike or --strike-grid")
    if strike_grid is not None:
        lo, hi, n = strike_grid.split(":")
        strikes = np.linspace(float(lo), float(hi), int(n))
    else:
        strikes = np.array([strike])
    market = risk_neutral.MarketParams(rate, s0, maturity)
    params = processes.VgProcessParams(theta, sigma, nu)
    rows = [
        (
            float(k),
            risk_neutral.price_call_vg(params, market, float(k)),
            risk_neutral.price_call_black_scholes(market, float(k), sigma),
        )
        for k in strikes
    ]
    if out:
        with open(out, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["strike", "vg_price", "bs_price"])
            for row in rows:
                writer.writerow([repr(v) for v in row])
    for k, vg_price, bs_price in rows:
        click.echo(f"strike={k:.6g} vg={vg_price:.10g} bs={bs_price:.10g}")


@main.command()
@click.option("--quotes", "quotes_path", type=click.Path(exists=True, dir_okay=False), required=True)
@click.option("--models", type=click.Choice(["both"]), default="both", show_default=True)
@click.option("--out", type=click.Path(dir_okay=False), required=True)
@wraps_errors
def calibrate(quotes_path, models, out):
    """Weekly risk-neutral BS and VG calibrations with per-week LRT (df=2)."""
    rows = io.load_option_quotes(quotes_path)
    weeks = {}
    for row in rows:
        iso = row.date.isocalendar()
        weeks.setdefault((iso.year, iso.week), []).append(row.quote)
    results = []
    for key in sorted(weeks):
        quotes = weeks[key]
        bs_fit = risk_neutral.fit_risk_neutral(quotes, Model.BS)
        vg_fit = risk_neutral.fit_risk_neutral(quotes, Model.VG)
        statistic, p_value = estimators.likelihood_ratio_test(bs_fit, vg_fit, df=2)
        results.append((key, bs_fit, vg_fit, statistic, p_value))
    with open(out, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow([
            "iso_year", "iso_week", "n_quotes",
            "bs_sigma", "bs_loglik",
            "vg_theta", "vg_sigma", "vg_nu", "vg_loglik",
            "lrt_statistic", "p_value", "reject_5pct", "reject_1pct",
        ])
        for (year, week), bs_fit, vg_fit, statistic, p_value in results:
            writer.writerow([
                year, week, bs_fit.n_obs,
                repr(bs_fit.params.sigma), repr(bs_fit.log_likelihood),
                repr(vg_fit.params.theta), repr(vg_fit.params.sigma),
                repr(vg_fit.params.nu), repr(vg_fit.log_likelihood),
                repr(statistic), repr(p_value),
                int(statistic > CHI2_DF2_CRIT_5PCT), int(statistic > CHI2_DF2_CRIT_1PCT),
            ])
    n_weeks = len(results)
    rej5 = sum(1 for *_, stat, _p in results if stat > CHI2_DF2_CRIT_5PCT)
    rej1 = sum(1 for *_, stat, _p in results if stat > CHI2_DF2_CRIT_1PCT)
    click.echo(f"weeks={n_weeks} reject_5pct={rej5} reject_1pct={rej1}")


@main.command()
@click.option("--s", "s_scale", type=float, default=1.0, show_default=True)
@click.option("--theta", type=float, default=0.0, show_default=True)
@click.option("--n-grid", required=True, help="LO:HI:STEP sample-size grid")
@click.option("--reps", type=int, default=5000, show_default=True)
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--out", type=click.Path(dir_okay=False), required=True)
@wraps_errors
def efficiency(s_scale, theta, n_grid, reps, seed, out):
    """Monte Carlo variances of the four Laplace estimators over an n grid."""
    lo, hi, step = (int(v) for v in n_grid.split(":"))
    n_values = list(range(lo, hi + 1, step))
    from .distributions import LaplaceParams

    reports = estimators.run_efficiency_experiment(
        LaplaceParams(theta, s_scale), n_values, reps, RngStream(seed)
    )
    with open(out, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["n", "var_median", "var_mean", "var_mad", "var_scaled_sd", "replications"])
        for rep in reports:
            writer.writerow([
                rep.n, repr(rep.var_median), repr(rep.var_mean),
                repr(rep.var_mad), repr(rep.var_scaled_sd), rep.replications,
            ])
    click.echo(f"wrote {len(reports)} rows to {out}")


if __name__ == "__main__":
    main()
