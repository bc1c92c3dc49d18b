"""Domain types shared by every module: length vectors and invariant profiles.

Only ratios of side lengths matter, so a :class:`LengthVector` is unit-free.
Lengths come in two arithmetic modes.  ``EXACT`` vectors hold integers and
every subset comparison is decided exactly.  ``FLOAT`` vectors hold reals
and a subset counts as median when its signed sum is within
``MEDIAN_RTOL * sum(l)`` of zero; sums in the wider band up to
``AMBIGUOUS_RTOL * sum(l)`` raise :class:`~polyspace.errors.ToleranceAmbiguous`.
"""
from __future__ import annotations

import enum
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from numbers import Integral
from typing import Sequence

import numpy as np

from . import kernels
from .errors import CapExceeded, ParseError, ToleranceAmbiguous

MEDIAN_RTOL = 1e-12
AMBIGUOUS_RTOL = 1e-9
DEFAULT_CAP = 30
# 2*sum must stay inside int64 during enumeration
_EXACT_SUM_LIMIT = 2**61


class Mode(enum.Enum):
    EXACT = "exact"
    FLOAT = "float"


class Kind(enum.Enum):
    PLANAR = "planar"
    SPATIAL = "spatial"

    @classmethod
    def parse(cls, value: "Kind | str") -> "Kind":
        if isinstance(value, cls):
            return value
        try:
            return cls(str(value).lower())
        except ValueError:
            raise ParseError(f"unknown kind {value!r}; expected planar or spatial") from None


@dataclass(frozen=True)
class LengthVector:
    lengths: tuple
    mode: Mode

    def __post_init__(self):
        lengths = tuple(self.lengths)
        if len(lengths) < 3:
            raise ValueError(f"need at least 3 sides, got {len(lengths)}")
        if self.mode is Mode.EXACT:
            if not all(isinstance(x, Integral) for x in lengths):
                raise ValueError("EXACT lengths must be integers")
            lengths = tuple(int(x) for x in lengths)
            if sum(lengths) >= _EXACT_SUM_LIMIT:
                raise ValueError("EXACT lengths overflow 64-bit subset sums")
        else:
            lengths = tuple(float(x) for x in lengths)
            if not all(math.isfinite(x) for x in lengths):
                raise ValueError("lengths must be finite")
        if min(lengths) <= 0:
            raise ValueError("lengths must be positive")
        object.__setattr__(self, "lengths", lengths)

    @classmethod
    def exact(cls, lengths: Sequence[int]) -> "LengthVector":
        return cls(tuple(lengths), Mode.EXACT)

    @classmethod
    def floating(cls, lengths: Sequence[float]) -> "LengthVector":
        return cls(tuple(lengths), Mode.FLOAT)

    @classmethod
    def equilateral(cls, n: int) -> "LengthVector":
        return cls((1,) * n, Mode.EXACT)

    @property
    def n(self) -> int:
        return len(self.lengths)

    def __len__(self):
        return len(self.lengths)

    def as_array(self) -> np.ndarray:
        dtype = np.int64 if self.mode is Mode.EXACT else np.float64
        return np.asarray(self.lengths, dtype=dtype)

    def scaled(self, factor) -> "LengthVector":
        """Multiply every side by a positive factor, staying EXACT when possible."""
        if self.mode is Mode.EXACT and isinstance(factor, Integral):
            return LengthVector.exact([x * factor for x in self.lengths])
        return LengthVector.floating([x * factor for x in self.lengths])

    def anchor(self) -> int:
        """0-based index of the first maximal side (the planar anchor)."""
        return max_index(self.lengths)


def as_length_vector(value) -> LengthVector:
    """Coerce a sequence to a LengthVector: all integers give EXACT, else FLOAT."""
    if isinstance(value, LengthVector):
        return value
    values = list(value)
    if all(isinstance(x, (Integral, np.integer)) for x in values):
        return LengthVector.exact([int(x) for x in values])
    return LengthVector.floating(values)


def quantize(values, bits: int = 52) -> LengthVector:
    """EXACT vector approximating positive reals to ``bits`` bits of the maximum.

    Random real vectors of size ~25 and up almost surely contain some subset
    sum within the FLOAT ambiguity band, so sampled vectors are enumerated in
    integer arithmetic instead.  The relative perturbation is ``2**-bits``.
    """
    arr = np.asarray(getattr(values, "lengths", values), dtype=np.float64)
    scaled = np.rint(arr / arr.max() * float(2**bits)).astype(np.int64)
    return LengthVector.exact(np.maximum(scaled, 1).tolist())


def max_index(values) -> int:
    best = 0
    for i, x in enumerate(values):
        if x > values[best]:
            best = i
    return best


def tilde_permute(ell: LengthVector) -> LengthVector:
    """Swap the first maximal side into the last position."""
    ell = as_length_vector(ell)
    i0 = ell.anchor()
    out = list(ell.lengths)
    out[i0], out[-1] = out[-1], out[i0]
    return LengthVector(tuple(out), ell.mode)


@dataclass(frozen=True)
class SubsetProfile:
    """Short (``counts``) and median (``median_counts``) subsets through the anchor.

    Entry ``p`` counts subsets of cardinality ``p + 1``.  Planar profiles are
    anchored at the first maximal side, spatial ones at the last side.
    """

    kind: Kind
    counts: tuple
    median_counts: tuple

    @property
    def n(self) -> int:
        return len(self.counts)

    @property
    def is_generic(self) -> bool:
        return not any(self.median_counts)


@dataclass(frozen=True)
class BettiProfile:
    """Betti numbers; SPATIAL holds only the even degrees ``b_0, b_2, ...``."""

    kind: Kind
    values: tuple

    def degrees(self) -> list[int]:
        step = 2 if self.kind is Kind.SPATIAL else 1
        return [step * i for i in range(len(self.values))]

    def poincare(self) -> "PoincarePolynomial":
        coeffs = [0] * (self.degrees()[-1] + 1)
        for d, b in zip(self.degrees(), self.values):
            coeffs[d] = b
        return PoincarePolynomial(tuple(coeffs))


@dataclass(frozen=True)
class PoincarePolynomial:
    coefficients: tuple

    @property
    def degree(self) -> int:
        return len(self.coefficients) - 1

    def __call__(self, t):
        if isinstance(t, (Integral, Fraction)):
            acc = 0
        else:
            acc = 0.0
        for c in reversed(self.coefficients):
            acc = acc * t + c
        return acc

    def total(self) -> int:
        return sum(self.coefficients)

    def __str__(self):
        terms = []
        for d, c in enumerate(self.coefficients):
            if c == 0:
                continue
            if d == 0:
                terms.append(str(c))
            else:
                mono = "t" if d == 1 else f"t^{d}"
                terms.append(mono if c == 1 else f"{c}{mono}")
        return " + ".join(terms) if terms else "0"


def total_betti(b: BettiProfile) -> int:
    return sum(b.values)


def check_cap(n: int, cap: int | None) -> None:
    cap = DEFAULT_CAP if cap is None else cap
    if n > cap:
        raise CapExceeded(f"n={n} exceeds the enumeration cap {cap} (override with cap=)")


def _partitions(total: int, parts: int) -> list[tuple[int, int]]:
    parts = max(1, min(parts, total))
    edges = [total * i // parts for i in range(parts + 1)]
    return [(edges[i], edges[i + 1]) for i in range(parts) if edges[i] < edges[i + 1]]


def anchored_counts(ell: LengthVector, anchor: int, cap: int | None = None, threads: int = 1):
    """Short and median counts of subsets containing ``anchor``, by cardinality.

    The 2**(n-1) subsets are split into ``threads`` contiguous ranges; the
    integer totals do not depend on the split.
    """
    check_cap(ell.n, cap)
    arr = ell.as_array()
    ranges = _partitions(1 << (ell.n - 1), threads)
    if ell.mode is Mode.EXACT:
        def job(r):
            return kernels.profile_exact(arr, anchor, r[0], r[1]) + (0,)
    else:
        scale = math.fsum(ell.lengths)
        tol_med, tol_amb = MEDIAN_RTOL * scale, AMBIGUOUS_RTOL * scale

        def job(r):
            return kernels.profile_float(arr, anchor, r[0], r[1], tol_med, tol_amb)

    if len(ranges) == 1:
        results = [job(ranges[0])]
    else:
        with ThreadPoolExecutor(max_workers=len(ranges)) as pool:
            results = list(pool.map(job, ranges))
    short = np.zeros(ell.n, dtype=np.int64)
    median = np.zeros(ell.n, dtype=np.int64)
    ambiguous = 0
    for s, m, a in results:
        short += s
        median += m
        ambiguous += a
    if ambiguous:
        raise ToleranceAmbiguous(
            f"{ambiguous} subset sums lie within {AMBIGUOUS_RTOL:g}*sum(l) of the median "
            f"but outside {MEDIAN_RTOL:g}*sum(l); use EXACT lengths"
        )
    return tuple(int(x) for x in short), tuple(int(x) for x in median)


def is_generic(ell, cap: int | None = None, threads: int = 1) -> bool:
    """True iff no subset has the same total length as its complement.

    Subsets containing the last side suffice, since complements pair up.
    """
    ell = as_length_vector(ell)
    _, median = anchored_counts(ell, ell.n - 1, cap=cap, threads=threads)
    return not any(median)
