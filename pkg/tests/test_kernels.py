import os
import subprocess
import sys

import numpy as np
import pytest

from polyspace import _pykernels, kernels
from polyspace.stochastic import draw_swaps

BACKENDS = kernels.backends()
compiled = pytest.mark.skipif("compiled" not in BACKENDS, reason="extension not built")


def test_active_backend_named():
    assert kernels.BACKEND in BACKENDS


def test_pure_switch_selects_fallback():
    env = dict(os.environ, POLYSPACE_PURE="1")
    out = subprocess.run([sys.executable, "-c", "import polyspace.kernels as k; print(k.BACKEND)"],
                         env=env, capture_output=True, text=True, check=True)
    assert out.stdout.strip() == "python"


def test_subset_sum_table():
    table = _pykernels.subset_sum_table(np.array([1, 2, 4]))
    assert table.tolist() == list(range(8))


@pytest.mark.parametrize("name", sorted(BACKENDS))
def test_profile_exact_small(name):
    impl = BACKENDS[name]
    arr = np.array([1, 1, 1, 1], dtype=np.int64)
    short, median = impl.profile_exact(arr, 0, 0, 8)
    assert list(short) == [1, 0, 0, 0]
    assert list(median) == [0, 3, 0, 0]


@compiled
def test_backends_agree_on_profiles():
    c, py = BACKENDS["compiled"], BACKENDS["python"]
    rng = np.random.default_rng(1)
    for n in (3, 8, 13, 16):
        ints = rng.integers(1, 20, n).astype(np.int64)
        anchor = int(rng.integers(0, n))
        full = 1 << (n - 1)
        a = c.profile_exact(ints, anchor, 0, full)
        b = py.profile_exact(ints, anchor, 0, full)
        assert [list(x) for x in a] == [list(x) for x in b]
        floats = rng.random(n)
        total = float(np.cumsum(floats)[-1])
        a = c.profile_float(floats, anchor, 0, full, 1e-12 * total, 1e-9 * total)
        b = py.profile_float(floats, anchor, 0, full, 1e-12 * total, 1e-9 * total)
        assert [list(a[0]), list(a[1]), a[2]] == [list(b[0]), list(b[1]), b[2]]


@pytest.mark.parametrize("name", sorted(BACKENDS))
def test_partitioned_ranges_sum_to_whole(name):
    impl = BACKENDS[name]
    arr = np.arange(1, 15, dtype=np.int64)
    full = 1 << 13
    whole = [list(x) for x in impl.profile_exact(arr, 13, 0, full)]
    parts = [impl.profile_exact(arr, 13, lo, hi) for lo, hi in ((0, 1000), (1000, 5001), (5001, full))]
    assert [list(sum(p[i] for p in parts)) for i in range(2)] == whole


@compiled
def test_backends_agree_on_tau():
    c, py = BACKENDS["compiled"], BACKENDS["python"]
    rng = np.random.default_rng(2)
    rows = rng.random((500, 9))
    assert np.array_equal(c.tau_rows(rows), py.tau_rows(rows))
    lengths = rng.random(9)
    swaps = draw_swaps(rng, 500, 8)
    assert np.array_equal(c.tau_perm(lengths, swaps), py.tau_perm(lengths, swaps))


def test_fisher_yates_is_permutation():
    rng = np.random.default_rng(3)
    perms = _pykernels.fisher_yates(draw_swaps(rng, 1000, 6), 6)
    assert all(sorted(p) == list(range(6)) for p in perms.tolist())


def test_fisher_yates_uniform():
    rng = np.random.default_rng(4)
    perms = _pykernels.fisher_yates(draw_swaps(rng, 60_000, 3), 3)
    codes = perms[:, 0] * 9 + perms[:, 1] * 3 + perms[:, 2]
    counts = np.unique(codes, return_counts=True)[1]
    assert len(counts) == 6
    assert np.all(np.abs(counts / 10_000 - 1) < 0.05)


@pytest.mark.parametrize("name", sorted(BACKENDS))
def test_tau_rows_known_values(name):
    impl = BACKENDS[name]
    # running sums: (-1, 1); (-6, -4, -2, 8); (0)
    rows = np.array([[1.0, 1.0, 1.0, 2.0], [1.0, 1.0, 5.0, 1.0], [1.0, 1.0, 0.5, 2.5]])
    assert impl.tau_rows(rows).tolist() == [1, 3, 0]
