"""Star and extreme discrepancy of finite multisets in [0, 1].

For sorted x_(1) <= ... <= x_(M) the suprema have closed forms::

    D*(S) = max_i max(x_(i) - (i-1)/M, i/M - x_(i))
    D(S)  = 1/M + max_i (i/M - x_(i)) - min_i (i/M - x_(i))

Both are valid with repeated values.  D* is a supremum over r > 0 of
|#{x <= r}/M - r| and may be a limit rather than attained (mass at 0).
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
import math

import numpy as np


@dataclass(frozen=True, eq=False)
class PointSet:
    """Sorted multiset of points in [0, 1].

    ``numerators``/``denominators`` optionally carry the exact rational
    value of each point, aligned with ``values``.
    """

    values: np.ndarray
    numerators: np.ndarray | None = None
    denominators: np.ndarray | None = None

    @classmethod
    def from_values(cls, values):
        v = np.sort(np.asarray(values, dtype=np.float64).ravel())
        _check_unit_interval(v)
        v.setflags(write=False)
        return cls(v)

    @classmethod
    def from_fractions(cls, numerators, denominators):
        num = np.asarray(numerators, dtype=np.int64).ravel()
        den = np.asarray(denominators, dtype=np.int64).ravel()
        if num.shape != den.shape:
            raise ValueError("numerators and denominators differ in length")
        if den.size and (den.min() < 1 or num.min() < 0 or np.any(num > den)):
            raise ValueError("fractions must lie in [0, 1]")
        v = num / den
        order = np.argsort(v, kind="stable")
        out = [v[order], num[order], den[order]]
        for a in out:
            a.setflags(write=False)
        return cls(*out)

    def __len__(self):
        return len(self.values)

    @property
    def M(self):
        return len(self.values)

    def fractions(self):
        if self.numerators is None:
            raise ValueError("point set carries no exact representation")
        return [Fraction(int(a), int(b)) for a, b in zip(self.numerators, self.denominators)]


def _check_unit_interval(v):
    if v.size and (np.isnan(v).any() or v[0] < 0.0 or v[-1] > 1.0):
        raise ValueError("points must lie in [0, 1]")


def _sorted_values(points):
    if isinstance(points, PointSet):
        return points.values
    return PointSet.from_values(points).values


@dataclass(frozen=True)
class DiscrepancyResult:
    dstar: float
    d: float
    witness_star: int  # 0-based sorted index whose closed-form term attains D*
    witness_extreme: tuple  # (argmax, argmin) of i/M - x_(i), 0-based


def discrepancy(points):
    x = _sorted_values(points)
    M = len(x)
    if M == 0:
        raise ValueError("discrepancy of an empty point set is undefined")
    i = np.arange(1, M + 1, dtype=np.float64) / M
    upper = i - x  # i/M - x_(i)
    lower = x - (i - 1.0 / M)  # x_(i) - (i-1)/M
    iu, il = int(np.argmax(upper)), int(np.argmax(lower))
    if upper[iu] >= lower[il]:
        dstar, ws = float(upper[iu]), iu
    else:
        dstar, ws = float(lower[il]), il
    imin = int(np.argmin(upper))
    d = 1.0 / M + float(upper[iu]) - float(upper[imin])
    return DiscrepancyResult(dstar, d, ws, (iu, imin))


def star_discrepancy(points):
    return discrepancy(points).dstar


def extreme_discrepancy(points):
    return discrepancy(points).d


def star_discrepancy_counts(values, counts):
    """D* of the multiset holding ``counts[j]`` copies of ``values[j]``.

    ``values`` must be strictly increasing.  Runs in O(len(values)).
    """
    v = np.asarray(values, dtype=np.float64)
    c = np.asarray(counts, dtype=np.int64)
    if v.shape != c.shape:
        raise ValueError("values and counts differ in length")
    if np.any(c < 0):
        raise ValueError("counts must be nonnegative")
    keep = c > 0
    v, c = v[keep], c[keep]
    M = int(c.sum())
    if M == 0:
        raise ValueError("discrepancy of an empty point set is undefined")
    if np.any(np.diff(v) <= 0):
        raise ValueError("values must be strictly increasing")
    _check_unit_interval(v)
    cum = np.cumsum(c)
    above = cum / M - v
    below = v - (cum - c) / M
    return float(max(above.max(), below.max()))


def star_discrepancy_oracle(points):
    """Direct evaluation of sup_r |A([0,r])/M - r| at every breakpoint.

    Counts are taken by comparison against every point, O(M^2); no use
    of sorted order.  Intended for M up to a few thousand.
    """
    x = np.asarray(points.values if isinstance(points, PointSet) else points, dtype=np.float64)
    M = x.size
    if M == 0:
        raise ValueError("discrepancy of an empty point set is undefined")
    r = np.append(np.unique(x), 1.0)
    closed = (x[None, :] <= r[:, None]).sum(axis=1) / M
    strict = (x[None, :] < r[:, None]).sum(axis=1) / M  # left limit at r
    return float(max(np.abs(closed - r).max(), np.abs(strict - r).max()))


def extreme_discrepancy_oracle(points):
    """Sup over subintervals by scanning every pair of breakpoints.

    Closed intervals between points maximise A/M - length; open intervals
    between points or the ends 0, 1 maximise length - A/M.
    """
    x = np.sort(np.asarray(points.values if isinstance(points, PointSet) else points, dtype=np.float64))
    M = x.size
    if M == 0:
        raise ValueError("discrepancy of an empty point set is undefined")
    ends = np.unique(np.concatenate([x, [0.0, 1.0]]))
    a, b = np.meshgrid(ends, ends, indexing="ij")
    ok = a <= b
    length = b - a
    closed = np.searchsorted(x, b, side="right") - np.searchsorted(x, a, side="left")
    opened = np.searchsorted(x, b, side="left") - np.searchsorted(x, a, side="right")
    opened = np.maximum(opened, 0)
    over = np.where(ok, closed / M - length, -np.inf).max()
    under = np.where(ok & (a < b), length - opened / M, -np.inf).max()
    return float(max(over, under))


@dataclass(frozen=True)
class LatticeProfile:
    """Counts of a multiset supported on {k/R : k = 0..R-1} with model weights.

    The tail weights alpha_1..alpha_{R-1} must be equal and all weights must
    sum to 1; without equal tails the lattice bound does not hold.
    """

    R: int
    counts: tuple
    alphas: tuple
    tol: float = field(default=1e-12, repr=False)

    def __post_init__(self):
        if self.R < 1:
            raise ValueError("R must be >= 1")
        if len(self.counts) != self.R or len(self.alphas) != self.R:
            raise ValueError("need exactly R counts and R weights")
        if any(c < 0 or int(c) != c for c in self.counts):
            raise ValueError("counts must be nonnegative integers")
        if any(a < 0 for a in self.alphas):
            raise ValueError("weights must be nonnegative")
        if not math.isclose(sum(self.alphas), 1, rel_tol=0, abs_tol=self.tol):
            raise ValueError(f"weights sum to {sum(self.alphas)}, not 1")
        tail = self.alphas[1:]
        if tail and max(tail) - min(tail) > self.tol:
            raise ValueError("tail weights alpha_1..alpha_{R-1} must be equal")

    @classmethod
    def with_tail(cls, counts, alpha0):
        """Profile whose tail weights share 1 - alpha0 equally."""
        R = len(counts)
        if R == 1:
            return cls(1, tuple(counts), (1,))
        tail = (1 - alpha0) / (R - 1)
        return cls(R, tuple(counts), (alpha0,) + (tail,) * (R - 1))

    @property
    def M(self):
        return int(sum(self.counts))

    @property
    def epsilons(self):
        M = self.M
        return tuple(c - a * M for c, a in zip(self.counts, self.alphas))

    def lattice_values(self):
        return np.arange(self.R, dtype=np.float64) / self.R

    def realize(self):
        return PointSet.from_values(np.repeat(self.lattice_values(), self.counts))

    def star_discrepancy(self):
        return star_discrepancy_counts(self.lattice_values(), self.counts)


def lemma1_bound(profile):
    """max(alpha_0 M, M/R) + sum_k |eps_k|, an upper bound for M D*."""
    M = profile.M
    return float(max(profile.alphas[0] * M, Fraction(M, profile.R)) + sum(abs(e) for e in profile.epsilons))


def triangle_bound(parts):
    """sum_j M_j D*(S_j) for a partition S = S_1 u ... u S_K."""
    total = 0.0
    for part in parts:
        x = _sorted_values(part)
        if len(x) == 0:
            raise ValueError("every part must be nonempty")
        total += len(x) * star_discrepancy(x)
    return total


@dataclass(frozen=True)
class ContinuityGap:
    max_pointwise_gap: float
    dstar_gap: float


def continuity_gap(s1, s2):
    """Compare two equal-size multisets paired in sorted order.

    Sorted pairing minimises the largest pointwise distance, so any pairing
    within eps of each other is also within eps here.
    """
    x, y = _sorted_values(s1), _sorted_values(s2)
    if len(x) != len(y):
        raise ValueError(f"sizes differ: {len(x)} != {len(y)}")
    if len(x) == 0:
        raise ValueError("point sets are empty")
    gap = float(np.abs(x - y).max())
    return ContinuityGap(gap, abs(star_discrepancy(x) - star_discrepancy(y)))
