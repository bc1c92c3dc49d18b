"""Brute-force subset listing, kept independent of the enumeration kernels.

Used by the test suite to check the fast profiles.  Every subset is listed
with :func:`itertools.combinations` and summed from scratch in exact
arithmetic: Python integers, or :class:`fractions.Fraction` for float input.
"""
from fractions import Fraction
from itertools import combinations

from .core import Kind, SubsetProfile
from .errors import CapExceeded, NonGeneric

ORACLE_CAP = 20


def oracle_brute_force(lengths, kind) -> SubsetProfile:
    kind = Kind.parse(kind)
    values = [x if isinstance(x, int) else Fraction(x) for x in getattr(lengths, "lengths", lengths)]
    n = len(values)
    if n > ORACLE_CAP:
        raise CapExceeded(f"oracle limited to n <= {ORACLE_CAP}")
    if kind is Kind.PLANAR:
        top = max(values)
        anchor = values.index(top)
    else:
        anchor = n - 1
    others = [i for i in range(n) if i != anchor]
    total = sum(values)
    short = [0] * n
    median = [0] * n
    for size in range(n):
        for chosen in combinations(others, size):
            inside = values[anchor] + sum(values[i] for i in chosen)
            outside = total - inside
            if inside < outside:
                short[size] += 1
            elif inside == outside:
                median[size] += 1
    if kind is Kind.SPATIAL:
        if any(median):
            raise NonGeneric("median subsets present")
        median = [0] * n
    return SubsetProfile(kind, tuple(short), tuple(median))
