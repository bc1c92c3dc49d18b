"""Pure numpy implementations of the hot kernels.

Same signatures and results as the compiled ``_ckernels`` module; used when
the extension is not built or ``POLYSPACE_PURE=1`` is set.

Profile kernels enumerate subsets ``J`` of the non-anchor indices by their
position in an implementation-defined order, restricted to ``[lo, hi)``.
Over the full range ``[0, 2**m)`` every subset is visited exactly once, so
totals agree between backends even though partial ranges do not.
"""
import numpy as np

BLOCK = 1 << 20
LOW_BITS = 12


def subset_sum_table(values):
    """Sums of all subsets of ``values``; entry ``mask`` sums the set bits.

    Built by doubling: ``t[2**j + i] = t[i] + values[j]``.
    """
    values = np.asarray(values)
    table = np.zeros(1, dtype=values.dtype)
    for v in values:
        table = np.concatenate((table, table + v))
    return table


def popcount_table(bits):
    table = np.zeros(1, dtype=np.int64)
    for _ in range(bits):
        table = np.concatenate((table, table + 1))
    return table


def _split_tables(rest, low_bits):
    lo_sum = subset_sum_table(rest[:low_bits])
    hi_sum = subset_sum_table(rest[low_bits:])
    return lo_sum, hi_sum, popcount_table(low_bits), popcount_table(len(rest) - low_bits)


def profile_exact(lengths, anchor, lo, hi):
    """Count short and median subsets containing ``anchor`` (integer lengths).

    Returns ``(short, median)``, int64 arrays of size n indexed by
    ``|J| - 1``.
    """
    lengths = np.ascontiguousarray(lengths, dtype=np.int64)
    n = lengths.shape[0]
    rest = np.delete(lengths, anchor)
    m = n - 1
    total = int(lengths.sum())
    la = int(lengths[anchor])
    b = min(m, LOW_BITS)
    lo_sum, hi_sum, lo_card, hi_card = _split_tables(rest, b)
    mask = (1 << b) - 1
    short = np.zeros(n, dtype=np.int64)
    median = np.zeros(n, dtype=np.int64)
    for start in range(lo, hi, BLOCK):
        pos = np.arange(start, min(start + BLOCK, hi), dtype=np.int64)
        h = pos >> b
        low = pos & mask
        d = 2 * (la + hi_sum[h] + lo_sum[low]) - total
        card = hi_card[h] + lo_card[low]
        short += np.bincount(card[d < 0], minlength=n)
        median += np.bincount(card[d == 0], minlength=n)
    return short, median


def profile_float(lengths, anchor, lo, hi, tol_median, tol_ambiguous):
    """Float-mode profile with a tolerance band around zero.

    ``|d| <= tol_median`` counts as median; ``tol_median < |d| <=
    tol_ambiguous`` is tallied in the returned ambiguous count.
    Returns ``(short, median, n_ambiguous)``.
    """
    lengths = np.ascontiguousarray(lengths, dtype=np.float64)
    n = lengths.shape[0]
    rest = np.delete(lengths, anchor)
    m = n - 1
    total = float(np.cumsum(lengths)[-1])
    la = float(lengths[anchor])
    b = min(m, LOW_BITS)
    lo_sum, hi_sum, lo_card, hi_card = _split_tables(rest, b)
    mask = (1 << b) - 1
    short = np.zeros(n, dtype=np.int64)
    median = np.zeros(n, dtype=np.int64)
    ambiguous = 0
    for start in range(lo, hi, BLOCK):
        pos = np.arange(start, min(start + BLOCK, hi), dtype=np.int64)
        h = pos >> b
        low = pos & mask
        d = 2.0 * ((la + hi_sum[h]) + lo_sum[low]) - total
        card = hi_card[h] + lo_card[low]
        ad = np.abs(d)
        short += np.bincount(card[d < -tol_ambiguous], minlength=n)
        median += np.bincount(card[ad <= tol_median], minlength=n)
        ambiguous += int(np.count_nonzero((ad > tol_median) & (ad <= tol_ambiguous)))
    return short, median, ambiguous


def _first_nonnegative(steps):
    # steps[:, 0] is S_0; cumulative sums are taken left to right.
    hit = np.cumsum(steps, axis=1) >= 0
    tau = np.argmax(hit, axis=1).astype(np.int64)
    tau[~hit.any(axis=1)] = steps.shape[1] - 1
    return tau


def tau_rows(rows):
    """Stopping time with the identity permutation, one per row.

    Row layout is ``(l_1, ..., l_{n-1}, l_n)``; returns the least ``t``
    with ``l_1 + ... + l_t + l_n - (l_{t+1} + ... + l_{n-1}) >= 0``.
    """
    rows = np.ascontiguousarray(rows, dtype=np.float64)
    body = rows[:, :-1]
    base = rows[:, -1] - np.cumsum(body, axis=1)[:, -1]
    steps = np.empty_like(rows)
    steps[:, 0] = base
    steps[:, 1:] = 2.0 * body
    return _first_nonnegative(steps)


def fisher_yates(swaps, size):
    """Apply Fisher-Yates swap columns to identity permutations of ``size``.

    Column ``c`` swaps position ``size - 1 - c`` with ``swaps[:, c]``.
    """
    swaps = np.asarray(swaps, dtype=np.int64)
    count = swaps.shape[0]
    perm = np.tile(np.arange(size, dtype=np.int64), (count, 1))
    rows = np.arange(count)
    for c in range(swaps.shape[1]):
        i = size - 1 - c
        j = swaps[:, c]
        held = perm[rows, i].copy()
        perm[rows, i] = perm[rows, j]
        perm[rows, j] = held
    return perm


def tau_perm(lengths, swaps):
    """Stopping times of one length vector under a batch of permutations."""
    lengths = np.ascontiguousarray(lengths, dtype=np.float64)
    n = lengths.shape[0]
    perm = fisher_yates(swaps, n - 1)
    base = lengths[-1] - np.cumsum(lengths[:-1])[-1]
    steps = np.empty((perm.shape[0], n), dtype=np.float64)
    steps[:, 0] = base
    steps[:, 1:] = 2.0 * lengths[:-1][perm]
    return _first_nonnegative(steps)
