"""Random length vectors, stopping times and Monte Carlo estimators.

The stopping time of a length vector ``l`` under an ordering ``sigma`` of
its first ``n - 1`` sides is the least ``t`` with

    l_sigma(1) + ... + l_sigma(t) + l_n - (l_sigma(t+1) + ... + l_sigma(n-1)) >= 0.

``tau > p`` exactly when the anchor together with the first ``p`` sides
forms a short subset, which turns short-subset counts into permutation
probabilities and mean Betti numbers into expectations of indicators.

Reproducibility: samples are produced in chunks of ``chunk_size``; chunk
``i`` draws from ``numpy.random.default_rng(splitmix64(seed ^ i))`` and
results are reduced in chunk order, so output depends only on
``(seed, n_samples, chunk_size)`` and never on ``threads``.
"""
from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from math import comb

import numpy as np

from . import kernels
from .core import Kind, LengthVector, as_length_vector, tilde_permute
from .errors import ParseError, TNonPositive

DEFAULT_CHUNK = 1 << 16
_MASK64 = (1 << 64) - 1


def splitmix64(x: int) -> int:
    x = (x + 0x9E3779B97F4A7C15) & _MASK64
    x = ((x ^ (x >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    x = ((x ^ (x >> 27)) * 0x94D049BB133111EB) & _MASK64
    return x ^ (x >> 31)


def chunk_seed(seed: int, index: int) -> int:
    return splitmix64((seed ^ index) & _MASK64)


def chunk_sizes(n_samples: int, chunk_size: int = DEFAULT_CHUNK) -> list[int]:
    full, rest = divmod(n_samples, chunk_size)
    return [chunk_size] * full + ([rest] if rest else [])


def map_chunks(func, seed, n_samples, chunk_size=DEFAULT_CHUNK, threads=1):
    """Call ``func(rng, count)`` per chunk; results come back in chunk order."""
    sizes = chunk_sizes(n_samples, chunk_size)
    jobs = [(np.random.default_rng(chunk_seed(seed, i)), c) for i, c in enumerate(sizes)]
    if threads <= 1 or len(jobs) <= 1:
        return [func(rng, c) for rng, c in jobs]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(lambda job: func(*job), jobs))


@dataclass(frozen=True)
class RandomModel:
    """Law of a single side length.

    ``uniform`` takes ``(a, b)`` with ``0 < a < b`` (``a = 0`` is allowed,
    the law is still diffuse on ``(0, inf)``); ``exponential`` takes a rate;
    ``shifted_exp`` takes ``(offset, rate)``.
    """

    law: str
    params: tuple

    def __post_init__(self):
        law = self.law.lower()
        params = tuple(float(x) for x in self.params)
        if law == "uniform":
            if len(params) != 2 or not 0 <= params[0] < params[1]:
                raise ParseError("uniform needs 0 <= a < b")
        elif law == "exponential":
            if len(params) != 1 or params[0] <= 0:
                raise ParseError("exponential needs a positive rate")
        elif law == "shifted_exp":
            if len(params) != 2 or params[0] <= 0 or params[1] <= 0:
                raise ParseError("shifted_exp needs offset > 0 and rate > 0")
        else:
            raise ParseError(f"unknown law {self.law!r}")
        object.__setattr__(self, "law", law)
        object.__setattr__(self, "params", params)

    @classmethod
    def parse(cls, text: str) -> "RandomModel":
        """Parse ``name:p1,p2`` such as ``uniform:0,1`` or ``exponential:1``."""
        name, _, rest = str(text).partition(":")
        try:
            params = tuple(float(x) for x in rest.split(",")) if rest.strip() else ()
        except ValueError:
            raise ParseError(f"bad model parameters in {text!r}") from None
        return cls(name.strip(), params)

    def spec(self) -> str:
        return f"{self.law}:" + ",".join(repr(p) for p in self.params)

    @property
    def mean(self) -> float:
        if self.law == "uniform":
            a, b = self.params
            return (a + b) / 2
        if self.law == "exponential":
            return 1 / self.params[0]
        offset, rate = self.params
        return offset + 1 / rate

    @property
    def variance(self) -> float:
        if self.law == "uniform":
            a, b = self.params
            return (b - a) ** 2 / 12
        return 1 / self.params[-1] ** 2

    @property
    def sd(self) -> float:
        return math.sqrt(self.variance)

    @property
    def sigma_tau(self) -> float:
        """Standard deviation of the limiting normal law of ``(tau - n/2)/sqrt(n)``."""
        return self.sd / (2 * self.mean)

    def sample(self, rng: np.random.Generator, shape) -> np.ndarray:
        if self.law == "uniform":
            a, b = self.params
            if a == 0:
                # rng.random() can return exactly 0; 1 - U lies in (0, 1]
                return b * (1.0 - rng.random(shape))
            return rng.uniform(a, b, shape)
        if self.law == "exponential":
            return rng.exponential(1 / self.params[0], shape)
        offset, rate = self.params
        return offset + rng.exponential(1 / rate, shape)


UNIFORM01 = RandomModel("uniform", (0, 1))


@dataclass(frozen=True)
class McEstimate:
    value: float
    std_error: float
    n_samples: int
    seed: int

    def contains(self, target: float, k: float = 3.0) -> bool:
        return abs(self.value - target) <= k * self.std_error

    def as_dict(self) -> dict:
        return {
            "value": self.value,
            "std_error": self.std_error,
            "n_samples": self.n_samples,
            "seed": self.seed,
        }


def sample_length_vector(model: RandomModel, n: int, rng) -> LengthVector:
    if n < 3:
        raise ValueError("n must be at least 3")
    if not isinstance(rng, np.random.Generator):
        rng = np.random.default_rng(rng)
    return LengthVector.floating(model.sample(rng, n).tolist())


def tau(ell, sigma=None) -> int:
    """Stopping time of ``ell`` under ``sigma`` (0-based ordering of the first n-1 sides)."""
    values = as_length_vector(ell).lengths
    n = len(values)
    order = range(n - 1) if sigma is None else sigma
    s = values[-1] - sum(values[:-1])
    if s >= 0:
        return 0
    for t, i in enumerate(order, start=1):
        s += 2 * values[i]
        if s >= 0:
            return t
    return n - 1


def tau_tilde(ell) -> int:
    return tau(tilde_permute(ell))


def tilde_rows(rows: np.ndarray) -> np.ndarray:
    """Row-wise swap of the first maximal entry into the last column."""
    rows = np.array(rows, dtype=np.float64, copy=True)
    idx = np.arange(rows.shape[0])
    i0 = np.argmax(rows, axis=1)
    last = rows[:, -1].copy()
    rows[idx, -1] = rows[idx, i0]
    rows[idx, i0] = last
    return rows


def draw_swaps(rng: np.random.Generator, count: int, size: int) -> np.ndarray:
    """Fisher-Yates swap targets for ``count`` uniform permutations of ``size``.

    Column ``c`` is uniform on ``{0, ..., size - 1 - c}``.
    """
    if size < 2:
        return np.zeros((count, 0), dtype=np.int64)
    highs = np.arange(size, 1, -1, dtype=np.int64)
    return rng.integers(0, highs, size=(count, size - 1), dtype=np.int64)


def random_permutations(rng, count, size) -> np.ndarray:
    from ._pykernels import fisher_yates

    return fisher_yates(draw_swaps(rng, count, size), size)


def binomial_inverse(u: np.ndarray, trials: int, q: float) -> np.ndarray:
    """Binomial(trials, q) variates by inversion of the exact CDF."""
    ks = np.arange(trials + 1)
    if q <= 0:
        return np.zeros_like(u, dtype=np.int64)
    if q >= 1:
        return np.full(u.shape, trials, dtype=np.int64)
    logpmf = np.array(
        [
            math.lgamma(trials + 1) - math.lgamma(k + 1) - math.lgamma(trials - k + 1)
            + k * math.log(q) + (trials - k) * math.log1p(-q)
            for k in ks
        ]
    )
    cdf = np.cumsum(np.exp(logpmf))
    k = np.searchsorted(cdf, u, side="left")
    return np.minimum(k, trials).astype(np.int64)


def _tau_rows_for(model, n, rng, count, use_tilde):
    rows = model.sample(rng, (count, n))
    if use_tilde:
        rows = tilde_rows(rows)
    return rows, kernels.tau_rows(rows)


def tau_samples(model, n, n_samples, seed, use_tilde=False, chunk_size=DEFAULT_CHUNK, threads=1):
    """I.i.d. stopping times on fresh length vectors with the identity ordering."""
    parts = map_chunks(
        lambda rng, c: _tau_rows_for(model, n, rng, c, use_tilde)[1],
        seed, n_samples, chunk_size, threads,
    )
    return np.concatenate(parts) if parts else np.zeros(0, dtype=np.int64)


def shuffled_taus(rows: np.ndarray, rng) -> np.ndarray:
    """Stopping time of each row under its own uniform ordering of the first n-1 sides."""
    from ._pykernels import fisher_yates

    size = rows.shape[1] - 1
    perm = fisher_yates(draw_swaps(rng, rows.shape[0], size), size)
    permuted = np.array(rows, dtype=np.float64, copy=True)
    permuted[:, :-1] = np.take_along_axis(permuted[:, :-1], perm, axis=1)
    return kernels.tau_rows(permuted)


def random_order_tau_samples(model, n, n_samples, seed, use_tilde=True, chunk_size=DEFAULT_CHUNK, threads=1):
    """Stopping times with both the vector and the ordering drawn afresh per sample."""
    def chunk(rng, count):
        rows = model.sample(rng, (count, n))
        return shuffled_taus(tilde_rows(rows) if use_tilde else rows, rng)

    return np.concatenate(map_chunks(chunk, seed, n_samples, chunk_size, threads))


def permutation_taus(ell, n_perms, seed, chunk_size=DEFAULT_CHUNK, threads=1):
    """Stopping times of a fixed vector under ``n_perms`` uniform orderings."""
    arr = np.asarray(as_length_vector(ell).lengths, dtype=np.float64)
    size = arr.shape[0] - 1
    parts = map_chunks(
        lambda rng, c: kernels.tau_perm(arr, draw_swaps(rng, c, size)),
        seed, n_perms, chunk_size, threads,
    )
    return np.concatenate(parts)


def mc_short_profile(ell, kind, n_perms, seed, chunk_size=DEFAULT_CHUNK, threads=1):
    """Estimate short-subset counts as ``C(n-1, p) * P(tau_sigma > p)``.

    Planar counts use the anchor-swapped vector, spatial counts the vector
    as given.  One permutation yields the whole nested event sequence
    ``{tau > p}``, so every ``p`` shares the same draws.
    """
    ell = as_length_vector(ell)
    if n_perms < 1:
        raise ValueError("n_perms must be positive")
    kind = Kind.parse(kind)
    target = tilde_permute(ell) if kind is Kind.PLANAR else ell
    taus = permutation_taus(target, n_perms, seed, chunk_size, threads)
    n = ell.n
    hist = np.bincount(taus, minlength=n)
    # survival[p] = #{tau > p}
    survival = n_perms - np.cumsum(hist)
    out = []
    for p in range(n):
        frac = survival[p] / n_perms
        scale = comb(n - 1, p)
        se = scale * math.sqrt(frac * (1 - frac) / n_perms)
        out.append(McEstimate(scale * frac, se, n_perms, seed))
    return out


def _mean_estimate(values, seed) -> McEstimate:
    values = np.asarray(values, dtype=np.float64)
    count = values.shape[0]
    se = float(values.std(ddof=1) / math.sqrt(count)) if count > 1 else 0.0
    return McEstimate(float(values.mean()), se, count, seed)


def planar_betti_indicator(tau_t: np.ndarray, n: int, p: int) -> np.ndarray:
    """Per-sample ``C(n-1,p) 1{tau~ > p} + C(n-1,p+2) 1{tau~ > n-3-p}``."""
    return comb(n - 1, p) * (tau_t > p) + float(comb(n - 1, p + 2)) * (tau_t > n - 3 - p)


def spatial_betti_given_tau(tau_v: np.ndarray, n: int, p: int) -> np.ndarray:
    """``E_k[...]`` of the spatial Betti representation, summed exactly over k.

    With ``k ~ Binomial(n-1, 1/2)`` scaled by ``2^(n-1)`` this is
    ``sum_{k<=p, k<tau} C(n-1,k) - sum_{n-p-2<=k<=n-2, k<tau} C(n-1,k)``.
    """
    binoms = np.array([float(comb(n - 1, k)) for k in range(n)])
    lower = np.where(np.arange(n) <= p, binoms, 0.0)
    upper = np.where((np.arange(n) >= n - p - 2) & (np.arange(n) <= n - 2), binoms, 0.0)
    cum_lower = np.concatenate(([0.0], np.cumsum(lower)))
    cum_upper = np.concatenate(([0.0], np.cumsum(upper)))
    # sum over k < tau is the prefix of length tau
    return cum_lower[tau_v] - cum_upper[tau_v]


def mc_mean_betti(model, n, p, n_samples, seed, kind="planar", chunk_size=DEFAULT_CHUNK, threads=1):
    """Mean Betti number in degree ``p`` (``2p`` for spatial) over random lengths."""
    kind = Kind.parse(kind)
    taus = tau_samples(model, n, n_samples, seed, use_tilde=kind is Kind.PLANAR,
                       chunk_size=chunk_size, threads=threads)
    if kind is Kind.PLANAR:
        if p < 0:
            raise ValueError("p must be nonnegative")
        values = planar_betti_indicator(taus, n, p)
    else:
        values = spatial_betti_given_tau(taus, n, p)
    return _mean_estimate(values, seed)


def poincare_normalizer(kind, n: int, t: float) -> float:
    """Factor dividing the mean Poincare value in :func:`mc_mean_poincare`.

    ``(1+t)^(n-1)`` planar, ``(1+t^2)^(n-1)`` spatial, ``n 2^(n-1)`` spatial at t=1.
    """
    kind = Kind.parse(kind)
    if kind is Kind.PLANAR:
        return (1 + t) ** (n - 1)
    if t == 1:
        return n * 2.0 ** (n - 1)
    return (1 + t * t) ** (n - 1)


def poincare_indicator(kind, tau_v: np.ndarray, k: np.ndarray, n: int, t: float) -> np.ndarray:
    """Per-sample normalized Poincare value given the stopping time and binomial index."""
    kind = Kind.parse(kind)
    if kind is Kind.PLANAR:
        return (tau_v > k) + (tau_v > n - 1 - k) / (t * t)
    if t == 1:
        return ((n - 2) / n - 2 * k / n) * (tau_v > k)
    return ((tau_v > k) - (tau_v > n - 1 - k) / (t * t)) / (1 - t * t)


def _poincare_chunk(model, n, t, kind, rng, count):
    rows, tau_v = _tau_rows_for(model, n, rng, count, kind is Kind.PLANAR)
    u = rng.random(count)
    q = t / (1 + t) if kind is Kind.PLANAR else t * t / (1 + t * t)
    k = binomial_inverse(u, n - 1, q)
    return poincare_indicator(kind, tau_v, k, n, t)


def mc_mean_poincare(model, n, t, n_samples, seed, kind="planar", chunk_size=DEFAULT_CHUNK, threads=1):
    """Mean Poincare polynomial at ``t``, divided by :func:`poincare_normalizer`.

    Each sample draws a length vector, computes one stopping time (anchor
    swapped for planar) and one binomial index ``k``.
    """
    if not t > 0:
        raise TNonPositive(f"t must be positive, got {t}")
    kind = Kind.parse(kind)
    parts = map_chunks(
        lambda rng, c: _poincare_chunk(model, n, t, kind, rng, c),
        seed, n_samples, chunk_size, threads,
    )
    return _mean_estimate(np.concatenate(parts), seed)


def sample_length_rows(model, n, n_samples, seed, chunk_size=DEFAULT_CHUNK):
    """The length vectors drawn by the estimators above for the same arguments.

    Lets exact per-sample computations be paired with Monte Carlo output.
    """
    return np.concatenate(
        map_chunks(lambda rng, c: model.sample(rng, (c, n)), seed, n_samples, chunk_size)
    )
