"""Statistical summaries used by the experiment runners."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import stats


def ks_normal(sample, sd: float, mean: float = 0.0) -> float:
    """Kolmogorov-Smirnov distance between the empirical law of ``sample`` and N(mean, sd^2).

    The supremum runs over all reals, so atoms of a lattice-valued sample
    contribute their full jump.
    """
    return float(stats.kstest(np.asarray(sample, dtype=float), "norm", args=(mean, sd)).statistic)


def ks_two_sample(a, b) -> float:
    return float(stats.ks_2samp(a, b).statistic)


def wilson_interval(hits: int, trials: int, z: float = 1.959963984540054):
    if trials == 0:
        return 0.0, 1.0
    phat = hits / trials
    denom = 1 + z * z / trials
    centre = (phat + z * z / (2 * trials)) / denom
    half = z * math.sqrt(phat * (1 - phat) / trials + z * z / (4 * trials * trials)) / denom
    return max(0.0, centre - half), min(1.0, centre + half)


def zero_hit_upper_bound(trials: int, confidence: float = 0.95) -> float:
    """Exact one-sided upper bound on a probability after zero hits."""
    return 1 - (1 - confidence) ** (1 / trials)


@dataclass(frozen=True)
class SlopeFit:
    slope: float
    intercept: float
    std_error: float
    upper: float
    points: int


def fit_slope(x, y, confidence: float = 0.95) -> SlopeFit:
    """Least-squares line with a one-sided upper confidence bound on the slope.

    With fewer than three points the bound is undefined (``nan``).
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    k = x.shape[0]
    if k < 2:
        return SlopeFit(math.nan, math.nan, math.nan, math.nan, k)
    fit = stats.linregress(x, y)
    if k < 3:
        return SlopeFit(fit.slope, fit.intercept, math.nan, math.nan, k)
    quantile = stats.t.ppf(confidence, k - 2)
    return SlopeFit(fit.slope, fit.intercept, fit.stderr, fit.slope + quantile * fit.stderr, k)


def binary_entropy(p: float) -> float:
    return -p * math.log(p) - (1 - p) * math.log(1 - p)


def is_strictly_increasing(values) -> bool:
    return all(b > a for a, b in zip(values, values[1:]))


def is_strictly_decreasing(values) -> bool:
    return all(b < a for a, b in zip(values, values[1:]))
