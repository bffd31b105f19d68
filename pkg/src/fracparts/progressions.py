"""Exact prime counts in residue classes, and the per-class census of a fiber."""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
import math

import numpy as np

from .numtheory import euler_phi, primes_upto, units_mod
from .residues import compute_zk
from .sequence import fiber


@dataclass(frozen=True)
class ProgressionCount:
    N: int
    modulus: int
    residue: int
    count: int


def pi(N):
    """Number of primes <= N."""
    return len(primes_upto(N)) if N >= 2 else 0


def residue_counts(N, m):
    """Array c with c[r] = #{p <= N prime : p == r (mod m)}."""
    if m < 1:
        raise ValueError(f"modulus must be >= 1, got {m}")
    primes = primes_upto(N) if N >= 2 else np.zeros(0, dtype=np.int64)
    return np.bincount(primes % m, minlength=m)


def pi_progression(N, m, r):
    if not 0 <= r < m:
        raise ValueError(f"residue {r} not reduced modulo {m}")
    return ProgressionCount(N, m, r, int(residue_counts(N, m)[r]))


@dataclass(frozen=True)
class Lemma4Census:
    b: int
    q: int
    N: int
    n_qN: int
    actual: tuple  # |F_k|
    predicted: tuple  # Fractions |Z_k| / phi(q(q-1)) * n(q,N)
    epsilon: tuple  # actual - predicted, exact

    @property
    def epsilon_abs_sum(self):
        return sum(abs(e) for e in self.epsilon)

    @property
    def reference_scale(self):
        return self.N / (self.q**2 * math.log(self.N))

    @property
    def scale_ratio(self):
        return float(self.epsilon_abs_sum) / self.reference_scale


def lemma4_census(b, q, N):
    table = compute_zk(b, q)
    f = fiber(b, q, N)
    n = f.n_qN
    phi_m = euler_phi(table.modulus)
    actual = tuple(int(c) for c in f.class_counts())
    predicted = tuple(Fraction(s, phi_m) * n for s in table.sizes())
    eps = tuple(a - p for a, p in zip(actual, predicted))
    return Lemma4Census(b, q, N, n, actual, predicted, eps)


def class_counts_by_progressions(b, q, N):
    """|F_k| as sums of pi(N/q; m, r) - pi(b**q; m, r) over r in Z_k.

    Counts by residue, never by classifying individual primes, so it is a
    second route to the same numbers as the fiber census.
    """
    table = compute_zk(b, q)
    m = table.modulus
    lo, hi = b**q, N // q
    if lo >= hi:
        return tuple(0 for _ in range(q))
    diff = residue_counts(hi, m) - residue_counts(lo, m)
    return tuple(int(diff[c].sum()) for c in table.classes)


@dataclass(frozen=True)
class ProgressionRow:
    modulus: int
    residue: int
    N: int
    count: int
    expected: float
    deviation: float


def sw_equidistribution_report(m, N):
    """Counts in every unit class mod m against the even share pi(N)/phi(m)."""
    if m < 2:
        raise ValueError(f"modulus must be >= 2, got {m}")
    counts = residue_counts(N, m)
    expected = pi(N) / euler_phi(m)
    return [
        ProgressionRow(m, r, N, int(counts[r]), expected, counts[r] - expected)
        for r in units_mod(m)
    ]


def max_relative_deviation(rows):
    worst = 0.0
    for row in rows:
        if row.expected:
            worst = max(worst, abs(row.deviation) / row.expected)
    return worst
