import math
from itertools import permutations

import numpy as np
import pytest
from scipy import stats

from polyspace.core import LengthVector, quantize, tilde_permute
from polyspace.diagnostics import ks_two_sample
from polyspace.errors import ParseError, TNonPositive
from polyspace.exact import planar_betti, planar_poincare
from polyspace.stochastic import (
    UNIFORM01,
    RandomModel,
    binomial_inverse,
    chunk_sizes,
    mc_mean_betti,
    mc_mean_poincare,
    mc_short_profile,
    permutation_taus,
    random_order_tau_samples,
    sample_length_rows,
    sample_length_vector,
    splitmix64,
    tau,
    tau_samples,
    tau_tilde,
)


def test_model_parse_and_moments():
    m = RandomModel.parse("uniform:0,1")
    assert m == UNIFORM01
    assert m.mean == 0.5 and m.variance == pytest.approx(1 / 12)
    assert m.sigma_tau ** 2 == pytest.approx(1 / 12)
    e = RandomModel.parse("exponential:1")
    assert e.sigma_tau == pytest.approx(0.5)
    s = RandomModel.parse("shifted_exp:1,2")
    assert s.mean == pytest.approx(1.5) and s.variance == pytest.approx(0.25)
    assert RandomModel.parse(s.spec()) == s


@pytest.mark.parametrize("text", ["gamma:1", "uniform:1", "uniform:2,1", "exponential:-1", "uniform:a,b"])
def test_model_parse_errors(text):
    with pytest.raises(ParseError):
        RandomModel.parse(text)


def test_sample_length_vector():
    a = sample_length_vector(UNIFORM01, 5, 42)
    b = sample_length_vector(UNIFORM01, 5, 42)
    assert a == b and a.mode.value == "float"
    assert all(0 < x <= 1 for x in a.lengths)
    with pytest.raises(ValueError):
        sample_length_vector(UNIFORM01, 2, 0)


def test_sampling_moments():
    rng = np.random.default_rng(0)
    draws = UNIFORM01.sample(rng, 10**6)
    assert abs(draws.mean() - 0.5) < 4 * UNIFORM01.sd / 1e3
    expo = RandomModel.parse("exponential:1").sample(rng, 10**6)
    assert abs(expo.var() - 1) < 0.02


def test_tau_examples():
    assert tau([1, 1, 2]) == 0
    assert tau([1, 1, 1, 2]) == 1
    assert {tau([1, 1, 1, 2], s) for s in permutations(range(3))} == {1}


def test_tau_bounds():
    rng = np.random.default_rng(1)
    for _ in range(200):
        ell = sample_length_vector(UNIFORM01, int(rng.integers(3, 12)), rng)
        assert 0 <= tau(ell) <= ell.n - 1
        assert tau_tilde(ell) <= ell.n - 2


def test_nestedness_and_kernel_agree_with_reference():
    rng = np.random.default_rng(2)
    ell = sample_length_vector(UNIFORM01, 9, rng)
    taus = permutation_taus(ell, 50, seed=3)
    assert all(0 <= t <= 8 for t in taus)
    for _ in range(20):
        sigma = rng.permutation(8).tolist()
        t = tau(ell, sigma)
        # {tau > p} holds for p < t and fails from t on
        s = ell.lengths[-1] - sum(ell.lengths[:-1])
        partial = [s + 2 * sum(ell.lengths[i] for i in sigma[:p]) for p in range(9)]
        assert all(x < 0 for x in partial[:t]) and (t == 8 or partial[t] >= 0)


def test_mc_profile_degenerate_vector():
    est = mc_short_profile([1, 1, 1, 2], "planar", 1000, seed=7)
    assert est[0].value == 1.0 and est[0].std_error == 0.0
    assert est[1].value == 0.0
    assert est[0].n_samples == 1000 and est[0].seed == 7


def test_mc_profile_close_to_exact():
    ell = LengthVector.exact([3, 5, 7, 2, 9, 4, 6, 8, 1, 11])
    from polyspace.exact import short_profile_planar

    want = short_profile_planar(ell).counts
    got = mc_short_profile(ell, "planar", 100_000, seed=1)
    assert all(abs(e.value - w) <= 4 * e.std_error + 1e-12 for e, w in zip(got, want))


def test_mean_betti_vanishes_at_top():
    for p in (8, 9):
        assert mc_mean_betti(UNIFORM01, 10, p, 1000, seed=1).value == 0


def test_mean_betti_low_degree():
    est = mc_mean_betti(UNIFORM01, 10, 1, 10_000, seed=2)
    assert abs(est.value / 9 - 1) < 0.02


def test_mean_betti_paired_with_exact():
    n, p, samples, seed = 10, 2, 10_000, 3
    est = mc_mean_betti(UNIFORM01, n, p, samples, seed)
    rows = sample_length_rows(UNIFORM01, n, samples, seed)
    exact = np.mean([planar_betti(LengthVector.floating(r)).values[p] for r in rows])
    assert abs(est.value - exact) <= 3 * est.std_error


@pytest.mark.slow
def test_mean_poincare_paired_with_exact():
    n, samples, seed = 16, 100_000, 5
    est = mc_mean_poincare(UNIFORM01, n, 1.0, samples, seed)
    rows = sample_length_rows(UNIFORM01, n, samples, seed)
    exact = np.mean([planar_poincare(quantize(r))(1) for r in rows]) / 2 ** (n - 1)
    assert abs(est.value - exact) <= 3 * est.std_error


def test_mean_poincare_bounds_and_errors():
    t = 0.5
    est = mc_mean_poincare(UNIFORM01, 12, t, 5000, seed=1)
    assert 0 < est.value <= 1 + t ** -2
    with pytest.raises(TNonPositive):
        mc_mean_poincare(UNIFORM01, 12, 0.0, 100, seed=1)


@pytest.mark.xfail(strict=True, reason="measured value is about 0.057, far from 1/4")
def test_spatial_total_quarter_limit():
    est = mc_mean_poincare(UNIFORM01, 15, 1.0, 100_000, seed=1, kind="spatial")
    assert abs(est.value / 0.25 - 1) <= 0.10


def test_tau_samples_law_of_large_numbers():
    taus = tau_samples(UNIFORM01, 400, 5000, seed=1)
    assert 0.47 <= taus.mean() / 400 <= 0.53
    assert taus.min() >= 0 and taus.max() <= 399


def test_tau_tilde_near_constant_lengths():
    n = 101
    model = RandomModel("uniform", (1 - 1e-3, 1 + 1e-3))
    taus = tau_samples(model, n, 2000, seed=2, use_tilde=True)
    centre = math.ceil((n - 2) / 2)
    assert np.all(np.abs(taus - centre) <= 1)


def test_exchangeability_random_vectors():
    ordered = tau_samples(UNIFORM01, 20, 100_000, seed=1, use_tilde=True)
    shuffled = random_order_tau_samples(UNIFORM01, 20, 100_000, seed=2)
    assert ks_two_sample(ordered, shuffled) < 0.02


@pytest.mark.xfail(strict=True, reason="the law over orderings depends on the fixed vector at finite n")
def test_exchangeability_fixed_vector():
    ell = sample_length_vector(UNIFORM01, 20, 1)
    fixed = permutation_taus(tilde_permute(ell), 100_000, seed=3)
    fresh = tau_samples(UNIFORM01, 20, 100_000, seed=4, use_tilde=True)
    assert ks_two_sample(fixed, fresh) < 0.02


def test_determinism_and_thread_invariance():
    a = mc_mean_poincare(UNIFORM01, 14, 0.5, 20_000, seed=9, chunk_size=4096)
    b = mc_mean_poincare(UNIFORM01, 14, 0.5, 20_000, seed=9, chunk_size=4096, threads=3)
    assert a == b
    c = mc_mean_poincare(UNIFORM01, 14, 0.5, 20_000, seed=10, chunk_size=4096)
    assert c.value != a.value


def test_chunking():
    assert chunk_sizes(10, 4) == [4, 4, 2]
    assert chunk_sizes(8, 4) == [4, 4]
    assert splitmix64(0) == 0xE220A8397B1DCDAF


def test_binomial_inverse_matches_law():
    rng = np.random.default_rng(5)
    k = binomial_inverse(rng.random(200_000), 19, 0.3)
    law = stats.binom(19, 0.3)
    assert abs(k.mean() - law.mean()) < 0.02
    assert abs(k.var() - law.var()) < 0.05
    assert k.min() >= 0 and k.max() <= 19
    assert binomial_inverse(np.array([0.5]), 5, 0.0).tolist() == [0]
    assert binomial_inverse(np.array([0.5]), 5, 1.0).tolist() == [5]
