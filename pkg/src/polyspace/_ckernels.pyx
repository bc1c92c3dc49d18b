# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled hot kernels. Same contracts as ``polyspace._pykernels``."""
import numpy as np
cimport numpy as cnp
from libc.stdint cimport int64_t, uint64_t
from libc.math cimport fabs
from libc.stdlib cimport malloc, free

cnp.import_array()

cdef extern from *:
    int __builtin_ctzll(unsigned long long) nogil

cdef enum:
    LOW_BITS = 12


cdef void _gray_exact(const int64_t* rest, int m, int64_t la, int64_t total,
                      uint64_t lo, uint64_t hi,
                      int64_t* short_, int64_t* median) noexcept nogil:
    # Gray-code walk: consecutive subsets differ in one element, so the
    # signed difference d = sum(J) - sum(complement) moves by +-2*l_j.
    cdef uint64_t g = lo ^ (lo >> 1)
    cdef uint64_t i
    cdef int64_t s = la
    cdef int card = 0
    cdef int j
    for j in range(m):
        if (g >> j) & 1:
            s += rest[j]
            card += 1
    cdef int64_t d = 2 * s - total
    i = lo
    while True:
        short_[card] += d < 0
        median[card] += d == 0
        i += 1
        if i >= hi:
            break
        j = __builtin_ctzll(i)
        if (g >> j) & 1:
            d -= 2 * rest[j]
            card -= 1
        else:
            d += 2 * rest[j]
            card += 1
        g ^= (<uint64_t>1) << j


def profile_exact(lengths, Py_ssize_t anchor, uint64_t lo, uint64_t hi):
    cdef int64_t[::1] l = np.ascontiguousarray(lengths, dtype=np.int64)
    cdef int n = l.shape[0]
    cdef int64_t[::1] rest = np.ascontiguousarray(np.delete(np.asarray(l), anchor))
    cdef int64_t total = 0
    cdef int i
    for i in range(n):
        total += l[i]
    short_arr = np.zeros(n, dtype=np.int64)
    median_arr = np.zeros(n, dtype=np.int64)
    cdef int64_t[::1] sv = short_arr
    cdef int64_t[::1] mv = median_arr
    cdef int64_t la = l[anchor]
    if hi > lo:
        with nogil:
            _gray_exact(&rest[0] if n > 1 else NULL, n - 1, la, total, lo, hi, &sv[0], &mv[0])
    return short_arr, median_arr


cdef double* _sum_table(const double* v, int k) noexcept nogil:
    cdef Py_ssize_t size = (<Py_ssize_t>1) << k
    cdef double* t = <double*>malloc(size * sizeof(double))
    cdef Py_ssize_t i, half
    cdef int j
    t[0] = 0.0
    for j in range(k):
        half = (<Py_ssize_t>1) << j
        for i in range(half):
            t[half + i] = t[i] + v[j]
    return t


cdef int* _card_table(int k) noexcept nogil:
    cdef Py_ssize_t size = (<Py_ssize_t>1) << k
    cdef int* t = <int*>malloc(size * sizeof(int))
    cdef Py_ssize_t i, half
    cdef int j
    t[0] = 0
    for j in range(k):
        half = (<Py_ssize_t>1) << j
        for i in range(half):
            t[half + i] = t[i] + 1
    return t


def profile_float(lengths, Py_ssize_t anchor, uint64_t lo, uint64_t hi,
                  double tol_median, double tol_ambiguous):
    cdef double[::1] l = np.ascontiguousarray(lengths, dtype=np.float64)
    cdef int n = l.shape[0]
    cdef double[::1] rest = np.ascontiguousarray(np.delete(np.asarray(l), anchor))
    cdef int m = n - 1
    cdef int b = m if m < LOW_BITS else LOW_BITS
    cdef double total = 0.0
    cdef int i
    for i in range(n):
        total += l[i]
    cdef double la = l[anchor]
    short_arr = np.zeros(n, dtype=np.int64)
    median_arr = np.zeros(n, dtype=np.int64)
    cdef int64_t[::1] sv = short_arr
    cdef int64_t[::1] mv = median_arr
    cdef int64_t ambiguous = 0
    cdef double* lo_sum
    cdef double* hi_sum
    cdef int* lo_card
    cdef int* hi_card
    cdef uint64_t pos, h, h_end, low, low_start, low_end
    cdef uint64_t mask = ((<uint64_t>1) << b) - 1
    cdef double base, d, ad
    cdef int cbase, card
    if hi <= lo:
        return short_arr, median_arr, 0
    cdef const double* rp = &rest[0] if m > 0 else NULL
    with nogil:
        lo_sum = _sum_table(rp, b)
        hi_sum = _sum_table(rp + b if m > 0 else NULL, m - b)
        lo_card = _card_table(b)
        hi_card = _card_table(m - b)
        pos = lo
        while pos < hi:
            h = pos >> b
            low_start = pos & mask
            h_end = (h + 1) << b
            low_end = (h_end if h_end < hi else hi) - (h << b)
            base = la + hi_sum[h]
            cbase = hi_card[h]
            for low in range(low_start, low_end):
                d = 2.0 * (base + lo_sum[low]) - total
                ad = fabs(d)
                card = cbase + lo_card[low]
                sv[card] += d < -tol_ambiguous
                mv[card] += ad <= tol_median
                ambiguous += (ad > tol_median) & (ad <= tol_ambiguous)
            pos = (h << b) + low_end
        free(lo_sum)
        free(hi_sum)
        free(lo_card)
        free(hi_card)
    return short_arr, median_arr, int(ambiguous)


cdef inline int64_t _tau_seq(const double* l, const int64_t* order, int n,
                             double base) noexcept nogil:
    cdef double s = base
    cdef int t
    if s >= 0:
        return 0
    for t in range(1, n):
        s = s + 2.0 * l[order[t - 1]]
        if s >= 0:
            return t
    return n - 1


def tau_rows(rows):
    cdef double[:, ::1] r = np.ascontiguousarray(rows, dtype=np.float64)
    cdef Py_ssize_t count = r.shape[0]
    cdef int n = r.shape[1]
    out = np.empty(count, dtype=np.int64)
    cdef int64_t[::1] ov = out
    cdef Py_ssize_t k
    cdef int i, t
    cdef double tot, s
    with nogil:
        for k in range(count):
            tot = 0.0
            for i in range(n - 1):
                tot = tot + r[k, i]
            s = r[k, n - 1] - tot
            if s >= 0:
                ov[k] = 0
                continue
            ov[k] = n - 1
            for t in range(1, n):
                s = s + 2.0 * r[k, t - 1]
                if s >= 0:
                    ov[k] = t
                    break
    return out


def tau_perm(lengths, swaps):
    cdef double[::1] l = np.ascontiguousarray(lengths, dtype=np.float64)
    cdef int64_t[:, ::1] sw = np.ascontiguousarray(swaps, dtype=np.int64)
    cdef int n = l.shape[0]
    cdef int size = n - 1
    cdef Py_ssize_t count = sw.shape[0]
    cdef int ncols = sw.shape[1]
    out = np.empty(count, dtype=np.int64)
    cdef int64_t[::1] ov = out
    cdef int64_t* perm = <int64_t*>malloc((size if size > 0 else 1) * sizeof(int64_t))
    cdef Py_ssize_t k
    cdef int c, i, j
    cdef int64_t held
    cdef double tot = 0.0, base
    for i in range(size):
        tot = tot + l[i]
    base = l[n - 1] - tot
    with nogil:
        for k in range(count):
            for i in range(size):
                perm[i] = i
            for c in range(ncols):
                i = size - 1 - c
                j = <int>sw[k, c]
                held = perm[i]
                perm[i] = perm[j]
                perm[j] = held
            ov[k] = _tau_seq(&l[0], perm, n, base)
        free(perm)
    return out
