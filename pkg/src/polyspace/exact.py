"""Exact Betti numbers and Poincare polynomials from short-subset counts.

Planar polygon spaces are handled through counts anchored at the first
longest side, spatial ones through counts anchored at the last side.  All
arithmetic is on Python integers once the counts leave the kernels.
"""
from __future__ import annotations

from dataclasses import dataclass
from math import comb

from .core import (
    BettiProfile,
    Kind,
    PoincarePolynomial,
    SubsetProfile,
    anchored_counts,
    as_length_vector,
)
from .errors import DivisionRemainder, EvenN, NonGeneric


def short_profile_planar(ell, cap=None, threads=1) -> SubsetProfile:
    ell = as_length_vector(ell)
    short, median = anchored_counts(ell, ell.anchor(), cap=cap, threads=threads)
    return SubsetProfile(Kind.PLANAR, short, median)


def short_profile_spatial(ell, cap=None, threads=1) -> SubsetProfile:
    ell = as_length_vector(ell)
    short, median = anchored_counts(ell, ell.n - 1, cap=cap, threads=threads)
    if any(median):
        raise NonGeneric(f"length vector {ell.lengths} has median subsets")
    return SubsetProfile(Kind.SPATIAL, short, (0,) * ell.n)


def short_profile(ell, kind, cap=None, threads=1) -> SubsetProfile:
    if Kind.parse(kind) is Kind.PLANAR:
        return short_profile_planar(ell, cap=cap, threads=threads)
    return short_profile_spatial(ell, cap=cap, threads=threads)


def planar_betti_from_profile(profile: SubsetProfile) -> BettiProfile:
    a, med = profile.counts, profile.median_counts
    top = profile.n - 3
    return BettiProfile(Kind.PLANAR, tuple(a[p] + med[p] + a[top - p] for p in range(top + 1)))


def spatial_betti_from_profile(profile: SubsetProfile) -> BettiProfile:
    a = profile.counts
    n = profile.n
    values = []
    acc = 0
    for p in range(n - 2):
        acc += a[p] - a[n - p - 2]
        values.append(acc)
    return BettiProfile(Kind.SPATIAL, tuple(values))


def planar_betti(ell, cap=None, threads=1) -> BettiProfile:
    return planar_betti_from_profile(short_profile_planar(ell, cap=cap, threads=threads))


def spatial_betti(ell, cap=None, threads=1) -> BettiProfile:
    return spatial_betti_from_profile(short_profile_spatial(ell, cap=cap, threads=threads))


def betti(ell, kind, cap=None, threads=1) -> BettiProfile:
    if Kind.parse(kind) is Kind.PLANAR:
        return planar_betti(ell, cap=cap, threads=threads)
    return spatial_betti(ell, cap=cap, threads=threads)


def planar_poincare_from_profile(profile: SubsetProfile) -> PoincarePolynomial:
    # q(t) + t^(n-3) q(1/t) + r(t), q and r truncated to degree n-3
    top = profile.n - 3
    coeffs = [0] * (top + 1)
    for k in range(top + 1):
        coeffs[k] += profile.counts[k] + profile.median_counts[k]
        coeffs[top - k] += profile.counts[k]
    return PoincarePolynomial(tuple(coeffs))


def planar_poincare(ell, cap=None, threads=1) -> PoincarePolynomial:
    return planar_poincare_from_profile(short_profile_planar(ell, cap=cap, threads=threads))


def poly_divmod(num, den):
    """Divide integer polynomials (coefficients low to high degree).

    The leading coefficient of ``den`` must be +-1 so the quotient stays
    integral.  Returns ``(quotient, remainder)`` with trailing zeros trimmed.
    """
    num = list(num)
    den = list(den)
    while den and den[-1] == 0:
        den.pop()
    if not den or abs(den[-1]) != 1:
        raise ValueError("divisor must be monic up to sign")
    lead = den[-1]
    dd = len(den) - 1
    quot = [0] * max(len(num) - dd, 1)
    for i in range(len(num) - 1, dd - 1, -1):
        c = num[i] * lead
        if c:
            quot[i - dd] = c
            for j, dc in enumerate(den):
                num[i - dd + j] -= c * dc
    rem = num[:dd] if dd else []
    while len(rem) > 0 and rem[-1] == 0:
        rem.pop()
    while len(quot) > 1 and quot[-1] == 0:
        quot.pop()
    return quot, rem


def spatial_poincare_from_profile(profile: SubsetProfile) -> PoincarePolynomial:
    """``(1 - t^2)^-1 [q(t^2) - t^(2(n-2)) q(t^-2)]``, divided exactly."""
    n = profile.n
    a = profile.counts
    if a[n - 1]:
        raise DivisionRemainder("the full index set cannot be short")
    # numerator in u = t^2, degrees 0..n-2
    num = [0] * (n - 1)
    for j in range(n - 1):
        num[j] += a[j]
        num[n - 2 - j] -= a[j]
    quot, rem = poly_divmod(num, [1, -1])
    if rem:
        raise DivisionRemainder(f"numerator not divisible by 1 - t^2, remainder {rem}")
    quot = quot + [0] * (n - 2 - len(quot))
    coeffs = [0] * (2 * (n - 3) + 1)
    for i, c in enumerate(quot[: n - 2]):
        coeffs[2 * i] = c
    return PoincarePolynomial(tuple(coeffs))


def spatial_poincare(ell, cap=None, threads=1) -> PoincarePolynomial:
    return spatial_poincare_from_profile(short_profile_spatial(ell, cap=cap, threads=threads))


def poincare(ell, kind, cap=None, threads=1) -> PoincarePolynomial:
    if Kind.parse(kind) is Kind.PLANAR:
        return planar_poincare(ell, cap=cap, threads=threads)
    return spatial_poincare(ell, cap=cap, threads=threads)


def spatial_total_from_profile(profile: SubsetProfile) -> int:
    """Total Betti number as the derivative limit ``(n-2) q(1) - 2 q'(1)``."""
    n = profile.n
    a = profile.counts
    return (n - 2) * sum(a) - 2 * sum(j * x for j, x in enumerate(a))


@dataclass(frozen=True)
class EquilateralClosedForm:
    n: int
    r: int
    betti: BettiProfile
    total: int


def _require_odd(n: int) -> None:
    if n < 3 or n % 2 == 0:
        raise EvenN(f"closed form needs odd n >= 3, got {n}")


def equilateral_planar(n: int) -> EquilateralClosedForm:
    _require_odd(n)
    r = (n - 1) // 2
    values = []
    for k in range(n - 2):
        if k < r - 1:
            values.append(comb(n - 1, k))
        elif k == r - 1:
            values.append(2 * comb(n - 1, r - 1))
        else:
            values.append(comb(n - 1, k + 2))
    total = 2 ** (n - 1) - comb(n - 1, r)
    return EquilateralClosedForm(n, r, BettiProfile(Kind.PLANAR, tuple(values)), total)


def equilateral_planar_total(n: int) -> int:
    """``B_n = 2^(n-1) - C(n-1, (n-1)/2)`` for odd n."""
    _require_odd(n)
    return 2 ** (n - 1) - comb(n - 1, (n - 1) // 2)


def equilateral_spatial_total(n: int) -> int:
    """Closed-form sum ``sum_{i<k} C(2k, i) (k - i)`` for ``n = 2k + 1``.

    This does not equal the total Betti number given by the short-subset
    counts once n >= 5 (n=5 gives 6 where the counts give 7); see
    :func:`equilateral_spatial` for the value consistent with them.
    """
    _require_odd(n)
    k = (n - 1) // 2
    return sum(comb(2 * k, i) * (k - i) for i in range(k))


def equilateral_spatial(n: int) -> EquilateralClosedForm:
    """Even Betti numbers of the equilateral spatial polygon space, n odd.

    Uses ``b_2p = sum_{i<=p} C(n-1, i)`` for ``p <= k - 1`` and the mirror
    ``b_2p = b_2(n-3-p)`` above the middle degree.  The range on which the
    partial-sum formula holds is not part of the formula; this completion is
    checked against the counts in the test suite rather than assumed.
    """
    _require_odd(n)
    k = (n - 1) // 2
    lower = [sum(comb(n - 1, i) for i in range(p + 1)) for p in range(k)]
    values = tuple(lower + lower[-2::-1]) if k > 1 else tuple(lower)
    return EquilateralClosedForm(n, k, BettiProfile(Kind.SPATIAL, values), sum(values))
