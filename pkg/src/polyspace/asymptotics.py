"""Finite-n experiments for the random-length limit laws.

Each ``verify_*`` function is a pure function of its :class:`ExperimentConfig`
(seed included).  It returns an :class:`ExperimentResult` with per-n
estimates, diagnostics, and pass/fail checks against tolerances that come
from the config (``tol.<name>``), falling back to the defaults listed in
``DEFAULT_TOLERANCES``.
"""
from __future__ import annotations

import math
import time
from math import comb

import numpy as np

from .core import Kind, quantize
from .diagnostics import (
    binary_entropy,
    fit_slope,
    is_strictly_decreasing,
    is_strictly_increasing,
    ks_normal,
    wilson_interval,
    zero_hit_upper_bound,
)
from .errors import ConfigInvalid, TNonPositive
from .exact import (
    equilateral_spatial_total,
    planar_poincare,
    short_profile_spatial,
    spatial_poincare,
    spatial_total_from_profile,
)
from .experiment import ExperimentConfig, ExperimentResult
from .quadrature import adaptive_simpson, gaussian_tail_cutoff, normal_cdf, normal_pdf
from .stochastic import (
    RandomModel,
    map_chunks,
    mc_mean_betti,
    mc_mean_poincare,
    poincare_normalizer,
    sample_length_rows,
    shuffled_taus,
    splitmix64,
    tau_samples,
    tilde_rows,
)

RARE_EVENT_UNRESOLVED = "RARE_EVENT_UNRESOLVED"

DEFAULT_TOLERANCES = {
    "clt_tau": {"ks_max": 0.05, "var_rel": 0.15},
    "ldp_tau": {"min_hits": 10, "target_hits": 40, "confidence": 0.95, "degenerate_prob": 0.5},
    "high_dim_betti_planar": {"ratio_lo": 0.9, "ratio_hi": 1.05, "exponent_rel": 0.05},
    "high_dim_betti_spatial": {"ratio_lo": 0.9, "ratio_hi": 1.05},
    "mean_poincare": {"rel": 0.10, "final_min": 0.7, "equilateral_gap": 0.15,
                      "spatial_t1_rel": 0.2, "equilateral_max": 0.2},
    "higher_moments": {"ratio_max_planar": 1.1, "ratio_max_spatial": 1.2},
    "bivariate_independence": {"corr_max": 0.05, "ks_max": 0.05},
}


def compute_c_alpha(alpha: float, model: RandomModel, tol: float = 1e-9) -> float:
    """Critical-regime constant for mean spatial Betti numbers.

    ``int_{2|alpha|}^inf phi(u) P(|Z| < u m / sigma) du`` with ``phi`` the
    standard normal density, by adaptive Simpson on a truncated range whose
    Gaussian tail is below 1e-12.
    """
    ratio = model.mean / model.sd
    lower = 2 * abs(alpha)
    upper = gaussian_tail_cutoff(lower) + 1.0

    def integrand(u):
        return normal_pdf(u) * (2 * normal_cdf(u * ratio) - 1)

    return adaptive_simpson(integrand, lower, upper, tol=tol)


def _tol(config: ExperimentConfig, name: str) -> float:
    return config.tol(name, DEFAULT_TOLERANCES[config.experiment][name])


def _n_seed(seed: int, n: int, salt: int = 0) -> int:
    return splitmix64(seed ^ (n << 20) ^ (salt << 40))


def _normalized_tau(taus, n):
    return (taus - n / 2) / math.sqrt(n)


def verify_clt_tau(config: ExperimentConfig) -> ExperimentResult:
    """KS distance of ``(tau - n/2)/sqrt(n)`` to ``N(0, sigma_tau^2)`` across the n grid."""
    result = ExperimentResult(config)
    sd = config.model.sigma_tau
    ks_tilde = []
    for n in config.n_grid:
        for use_tilde, label in ((True, "tau_tilde"), (False, "tau")):
            taus = tau_samples(config.model, n, config.n_samples, _n_seed(config.seed, n, use_tilde),
                               use_tilde=use_tilde, chunk_size=config.chunk_size, threads=config.threads)
            x = _normalized_tau(taus, n)
            ks = ks_normal(x, sd)
            result.add_row(n, f"ks_{label}", ks)
            result.add_row(n, f"mean_{label}", x.mean(), x.std(ddof=1) / math.sqrt(len(x)))
            result.add_row(n, f"var_{label}", x.var(ddof=1))
            if use_tilde:
                ks_tilde.append(ks)
    last = config.n_grid[-1]
    result.add_diagnostic("sigma_tau_sq", sd * sd)
    result.add_diagnostic("ks_monotone_decreasing", is_strictly_decreasing(ks_tilde))
    result.check("ks_tau_tilde_at_max_n", ks_tilde[-1], "<", _tol(config, "ks_max"))
    if len(ks_tilde) > 1:
        result.check("ks_decrease_first_to_last", ks_tilde[-1] - ks_tilde[0], "<", 0.0)
    var_rel = abs(result.value(last, "var_tau_tilde") / (sd * sd) - 1)
    result.check("variance_rel_error_at_max_n", var_rel, "<=", _tol(config, "var_rel"))
    return result


def _deviation_hits(config, n, eps, target_hits):
    """Adaptive sampling of ``|tau/n - 1/2| >= eps``: batches double until enough hits."""
    hits = 0
    total = 0
    batch = config.n_samples
    rounds = 0
    while total < config.max_samples:
        count = min(batch, config.max_samples - total)
        taus = tau_samples(config.model, n, count, _n_seed(config.seed, n, rounds + 1),
                           chunk_size=config.chunk_size, threads=config.threads)
        hits += int(np.count_nonzero(np.abs(taus / n - 0.5) >= eps))
        total += count
        rounds += 1
        if hits >= target_hits:
            break
        batch *= 2
    return hits, total


def verify_ldp_tau(config: ExperimentConfig) -> ExperimentResult:
    """Exponential decay of ``P(|tau/n - 1/2| >= eps)``: least-squares slope of the log-probability."""
    eps = config.epsilon
    if eps is None or not 0 < eps < 0.5:
        raise ConfigInvalid("ldp_tau needs epsilon in (0, 1/2)")
    result = ExperimentResult(config)
    min_hits = int(_tol(config, "min_hits"))
    target = max(min_hits, int(_tol(config, "target_hits")))
    confidence = _tol(config, "confidence")
    xs, ys = [], []
    probs = []
    for n in config.n_grid:
        hits, total = _deviation_hits(config, n, eps, target)
        phat = hits / total
        probs.append(phat)
        lo, hi = wilson_interval(hits, total)
        result.add_row(n, "probability", phat, math.sqrt(phat * (1 - phat) / total))
        result.add_row(n, "hits", hits)
        result.add_row(n, "samples", total)
        result.add_row(n, "wilson_upper", hi if hits else zero_hit_upper_bound(total, confidence))
        if hits >= min_hits:
            xs.append(n)
            ys.append(math.log(phat))
    status = "RESOLVED"
    if result.value(config.n_grid[-1], "hits") == 0:
        status = RARE_EVENT_UNRESOLVED
    result.add_diagnostic("status", status)
    degenerate = probs[0] > _tol(config, "degenerate_prob")
    fit = fit_slope(xs, ys, confidence)
    informative = not degenerate and fit.points >= 3
    result.add_diagnostic("slope", fit.slope)
    result.add_diagnostic("slope_std_error", fit.std_error)
    result.add_diagnostic("slope_upper_bound", fit.upper)
    result.add_diagnostic("fit_points", fit.points)
    result.add_diagnostic("slope_informative", informative)
    result.check("slope_negative", fit.slope, "<", 0.0)
    result.check("slope_upper_bound_negative", fit.upper if informative else math.nan, "<", 0.0)
    return result


def _critical_index(n, alpha):
    return int(math.floor(n / 2 + alpha * math.sqrt(n)))


def _regime_index(config, n):
    if config.regime == "CRITICAL":
        if config.alpha is None:
            raise ConfigInvalid("CRITICAL regime needs alpha")
        return _critical_index(n, config.alpha)
    if config.p is None or not 0 < config.p < 1:
        raise ConfigInvalid(f"{config.regime} regime needs p in (0, 1)")
    return int(math.floor(n * config.p))


def _predicted_planar(config, n, pn):
    if config.regime == "SUB":
        return float(comb(n - 1, pn))
    if config.regime == "SUPER":
        return float(comb(n - 1, pn + 2))
    return math.sqrt(2 / (math.pi * n)) * math.exp(-2 * config.alpha ** 2) * 2.0 ** (n - 1)


def _predicted_spatial(config, n, pn):
    if config.regime == "SUB":
        return float(sum(comb(n - 1, k) for k in range(pn + 1)))
    if config.regime == "SUPER":
        return float(sum(comb(n - 1, k) for k in range(n - pn - 2)))
    return compute_c_alpha(config.alpha, config.model) * 2.0 ** (n - 1)


def _high_dim(config, kind):
    if config.regime is None:
        raise ConfigInvalid("high-dimensional Betti experiments need a regime")
    result = ExperimentResult(config)
    ratios = []
    for n in config.n_grid:
        pn = _regime_index(config, n)
        if not 0 <= pn <= n - 3:
            raise ConfigInvalid(f"degree index {pn} outside 0..{n - 3} at n={n}")
        est = mc_mean_betti(config.model, n, pn, config.n_samples, _n_seed(config.seed, n),
                            kind=kind, chunk_size=config.chunk_size, threads=config.threads)
        predicted = _predicted_planar(config, n, pn) if kind is Kind.PLANAR else _predicted_spatial(config, n, pn)
        ratio = est.value / predicted
        ratios.append(ratio)
        result.add_row(n, "degree_index", pn)
        result.add_row(n, "mean_betti", est.value, est.std_error)
        result.add_row(n, "predicted", predicted)
        result.add_row(n, "ratio", ratio, est.std_error / predicted)
        if est.value > 0:
            result.add_row(n, "log_mean_over_n", math.log(est.value) / n)
    result.add_diagnostic("trend_toward_one", abs(ratios[-1] - 1) <= abs(ratios[0] - 1))
    result.check("final_ratio_lower", ratios[-1], ">=", _tol(config, "ratio_lo"))
    result.check("final_ratio_upper", ratios[-1], "<=", _tol(config, "ratio_hi"))
    if kind is Kind.PLANAR and config.regime in ("SUB", "SUPER"):
        # growth rate n^-1 log(mean) against the binary entropy of p
        entropy = binary_entropy(config.p)
        rates = result.series("log_mean_over_n")
        rate = rates[-1] if len(rates) == len(config.n_grid) else math.nan
        result.add_diagnostic("entropy", entropy)
        if len(rates) == len(config.n_grid) > 1:
            logs = [r * n for r, n in zip(rates, config.n_grid)]
            result.add_diagnostic("log_mean_slope", fit_slope(config.n_grid, logs).slope)
        result.check("exponent_rel_error_at_max_n", abs(rate / entropy - 1), "<=", _tol(config, "exponent_rel"))
    if config.regime == "CRITICAL" and kind is Kind.SPATIAL:
        result.add_diagnostic("c_alpha", compute_c_alpha(config.alpha, config.model))
    return result


def verify_high_dim_betti_planar(config: ExperimentConfig) -> ExperimentResult:
    """Mean planar Betti numbers in growing degree against their predicted equivalents."""
    return _high_dim(config, Kind.PLANAR)


def verify_high_dim_betti_spatial(config: ExperimentConfig) -> ExperimentResult:
    return _high_dim(config, Kind.SPATIAL)


def limit_normalized_poincare(kind, t: float) -> float:
    """Limit of the normalized mean Poincare value (see ``poincare_normalizer``).

    At ``t = 1`` spatial the target is 1/2 under the ``n 2^(n-1)``
    normalization; measured values at desk scale sit far below it.
    """
    kind = Kind.parse(kind)
    if kind is Kind.PLANAR:
        return min(1.0, t ** -2)
    if t < 1:
        return 1 / (1 - t * t)
    if t > 1:
        return 1 / (t * t * (t * t - 1))
    return 0.5


def exact_normalized_values(model, n, t, n_samples, seed, kind, chunk_size):
    """Normalized Poincare value of each sampled vector, by full enumeration.

    Draws the same vectors as the Monte Carlo estimators for the same
    ``(seed, n_samples, chunk_size)``.
    """
    kind = Kind.parse(kind)
    rows = sample_length_rows(model, n, n_samples, seed, chunk_size)
    norm = poincare_normalizer(kind, n, t)
    out = np.empty(len(rows))
    for i, row in enumerate(rows):
        ell = quantize(row)
        if kind is Kind.PLANAR:
            value = planar_poincare(ell)(t)
        elif t == 1:
            value = spatial_total_from_profile(short_profile_spatial(ell))
        else:
            value = spatial_poincare(ell)(t)
        out[i] = value / norm
    return out


def verify_mean_poincare(config: ExperimentConfig) -> ExperimentResult:
    """Normalized mean Poincare polynomial at ``t`` against its large-n limit."""
    t = config.t
    if t is None or not t > 0:
        raise TNonPositive(f"t must be positive, got {t}")
    kind = Kind.parse(config.kind)
    result = ExperimentResult(config)
    limit = limit_normalized_poincare(kind, t)
    estimates = []
    for n in config.n_grid:
        seed = _n_seed(config.seed, n)
        if config.method == "exact":
            vals = exact_normalized_values(config.model, n, t, config.n_samples, seed, kind, config.chunk_size)
            value, se = float(vals.mean()), float(vals.std(ddof=1) / math.sqrt(len(vals)))
        else:
            est = mc_mean_poincare(config.model, n, t, config.n_samples, seed, kind=kind,
                                   chunk_size=config.chunk_size, threads=config.threads)
            value, se = est.value, est.std_error
        estimates.append(value)
        result.add_row(n, "normalized_mean", value, se)
        result.add_row(n, "ratio_to_limit", value / limit, se / limit)
        if kind is Kind.PLANAR and t == 1:
            result.add_row(n, "equilateral_curve", 1 - math.sqrt(2 / (math.pi * n)))
        if kind is Kind.SPATIAL and t == 1:
            result.add_row(n, "ratio_to_n_2^(n-2)", 2 * value, 2 * se)
            if n % 2:
                result.add_row(n, "equilateral_total_ratio", equilateral_spatial_total(n) / (n * 2.0 ** (n - 2)))
    last = config.n_grid[-1]
    result.add_diagnostic("limit", limit)
    if kind is Kind.PLANAR and t == 1:
        gaps = [abs(v - (1 - math.sqrt(2 / (math.pi * n)))) for n, v in zip(config.n_grid, estimates)]
        result.add_diagnostic("equilateral_gaps", gaps)
        if len(estimates) > 1:
            result.check("increasing_in_n", float(is_strictly_increasing(estimates)), ">=", 1.0)
        result.check("final_ratio_min", estimates[-1], ">", _tol(config, "final_min"))
        result.check("max_gap_to_equilateral_curve", max(gaps), "<=", _tol(config, "equilateral_gap"))
    elif kind is Kind.SPATIAL and t == 1:
        result.check("ratio_to_n_2^(n-2)_rel_error", abs(2 * estimates[-1] - 1), "<=", _tol(config, "spatial_t1_rel"))
        odd = [n for n in config.n_grid if n % 2]
        if odd:
            result.check("equilateral_total_ratio", result.value(odd[-1], "equilateral_total_ratio"),
                         "<", _tol(config, "equilateral_max"))
    else:
        result.check("final_rel_error", abs(result.value(last, "ratio_to_limit") - 1), "<=", _tol(config, "rel"))
    return result


def verify_higher_moments(config: ExperimentConfig) -> ExperimentResult:
    """Moment ratio ``E[P^nu] / E[P]^nu`` and variance of the normalized Poincare value."""
    t = config.t
    if t is None or not t > 0:
        raise TNonPositive(f"t must be positive, got {t}")
    nu = config.nu or 2
    if nu not in (2, 3, 4):
        raise ConfigInvalid("nu must be 2, 3 or 4")
    kind = Kind.parse(config.kind)
    result = ExperimentResult(config)
    ratios, variances = [], []
    for n in config.n_grid:
        vals = exact_normalized_values(config.model, n, t, config.n_samples, _n_seed(config.seed, n),
                                       kind, config.chunk_size)
        mean = vals.mean()
        ratio = float(np.mean(vals ** nu) / mean ** nu)
        var = float(vals.var(ddof=1))
        ratios.append(ratio)
        variances.append(var)
        result.add_row(n, "normalized_mean", mean, vals.std(ddof=1) / math.sqrt(len(vals)))
        result.add_row(n, "moment_ratio", ratio)
        result.add_row(n, "variance", var)
    result.add_diagnostic("ratio_decreasing", is_strictly_decreasing(ratios))
    result.add_diagnostic("variance_decreasing", is_strictly_decreasing(variances))
    name = "ratio_max_planar" if kind is Kind.PLANAR else "ratio_max_spatial"
    result.check("final_moment_ratio", ratios[-1], "<=", _tol(config, name))
    if len(variances) > 1:
        result.check("variance_drop_first_to_last", variances[-1] - variances[0], "<", 0.0)
    return result


def _pair_chunk(model, n, rng, count):
    rows = tilde_rows(model.sample(rng, (count, n)))
    return np.stack([shuffled_taus(rows, rng), shuffled_taus(rows, rng)], axis=1)


def verify_bivariate_independence(config: ExperimentConfig) -> ExperimentResult:
    """Two orderings of one random vector: correlation and margins of the stopping times."""
    result = ExperimentResult(config)
    sd = config.model.sigma_tau
    for n in config.n_grid:
        pairs = np.concatenate(map_chunks(lambda rng, c: _pair_chunk(config.model, n, rng, c),
                                          _n_seed(config.seed, n), config.n_samples,
                                          config.chunk_size, config.threads))
        x = _normalized_tau(pairs, n)
        corr = float(np.corrcoef(x[:, 0], x[:, 1])[0, 1])
        result.add_row(n, "correlation", corr)
        result.add_row(n, "ks_first", ks_normal(x[:, 0], sd))
        result.add_row(n, "ks_second", ks_normal(x[:, 1], sd))
    last = config.n_grid[-1]
    result.add_diagnostic("sigma_tau_sq", sd * sd)
    result.check("abs_correlation_at_max_n", abs(result.value(last, "correlation")), "<", _tol(config, "corr_max"))
    result.check("ks_first_margin_at_max_n", result.value(last, "ks_first"), "<", _tol(config, "ks_max"))
    result.check("ks_second_margin_at_max_n", result.value(last, "ks_second"), "<", _tol(config, "ks_max"))
    return result


RUNNERS = {
    "clt_tau": verify_clt_tau,
    "ldp_tau": verify_ldp_tau,
    "high_dim_betti_planar": verify_high_dim_betti_planar,
    "high_dim_betti_spatial": verify_high_dim_betti_spatial,
    "mean_poincare": verify_mean_poincare,
    "higher_moments": verify_higher_moments,
    "bivariate_independence": verify_bivariate_independence,
}


def run_experiment(config: ExperimentConfig) -> ExperimentResult:
    start = time.perf_counter()
    result = RUNNERS[config.experiment](config)
    result.wall_clock = time.perf_counter() - start
    return result
