"""The index set A_N = {pq <= N : p, q prime, p > b**q} and its fractional values.

A_N splits into fibers F_{q,N} = {p prime : b**q < p <= N/q}, one per small
prime q.  For odd q not dividing b each fiber prime p is classified by the
class k of p mod q(q-1), and b**(pq) mod pq / (pq) then lies within 1/q of
k/q.
"""
from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from math import gcd
import logging
import os
from pathlib import Path

import numpy as np

from .discrepancy import PointSet
from .numtheory import mod_exp, powmod_array, primes_upto
from .residues import compute_zk

log = logging.getLogger(__name__)

CACHE_FORMAT_VERSION = 1
UNCLASSIFIED = -1


@dataclass(frozen=True)
class PairIndex:
    p: int
    q: int
    n: int
    k: int | None  # None when q == 2 or q divides b


@dataclass(frozen=True)
class SamplePoint:
    n: int
    numerator: int

    @property
    def value(self):
        return Fraction(self.numerator, self.n)

    @property
    def fvalue(self):
        return self.numerator / self.n


@dataclass(frozen=True, eq=False)
class FiberSet:
    b: int
    q: int
    N: int
    primes: np.ndarray
    ks: np.ndarray | None  # class index per prime; None when unclassified

    @property
    def n_qN(self):
        return len(self.primes)

    @property
    def classified(self):
        return self.ks is not None

    def class_counts(self):
        if self.ks is None:
            raise ValueError(f"fiber over q = {self.q} is not classified")
        return np.bincount(self.ks, minlength=self.q)

    def classes(self):
        """The partition F_0, ..., F_{q-1} as arrays of primes."""
        if self.ks is None:
            raise ValueError(f"fiber over q = {self.q} is not classified")
        return [self.primes[self.ks == k] for k in range(self.q)]

    def numerators(self):
        n = self.primes * self.q
        return powmod_array(self.b, n, n)


def is_classifiable(b, q):
    return q != 2 and gcd(b, q) == 1


def fractional_value(b, n):
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    return SamplePoint(n, mod_exp(b, n, n))


def fiber_primes_q(b, N):
    """Primes q whose fiber F_{q,N} is nonempty-capable, i.e. b**q < N // q."""
    qs = []
    # b**q >= 2**q, so q < N.bit_length() covers every candidate
    for q in primes_upto(max(N.bit_length(), 2)).tolist():
        if b**q >= N // q:
            break
        qs.append(q)
    return qs


def fiber(b, q, N):
    if b < 2:
        raise ValueError(f"base must be >= 2, got {b}")
    lo, hi = b**q, N // q
    if lo >= hi:
        primes = np.zeros(0, dtype=np.int64)
    else:
        primes = primes_upto(hi)
        primes = primes[np.searchsorted(primes, lo, side="right") :]
    ks = None
    if is_classifiable(b, q):
        ks = compute_zk(b, q).classify(primes) if len(primes) else np.zeros(0, dtype=np.int64)
    return FiberSet(b, q, N, primes, ks)


def classify_k(b, p, q, table=None):
    """Class k with (p mod q(q-1)) in Z_k."""
    table = table or compute_zk(b, q)
    if (table.b, table.q) != (b, q):
        raise ValueError("table built for a different (b, q)")
    return table.class_of(p)


@dataclass(frozen=True)
class PqEstimate:
    p: int
    q: int
    value: Fraction
    k: int
    deviation: Fraction
    holds: bool


def check_pq_estimate(b, p, q, table=None):
    """Exact check of |b**(pq) mod pq / pq - k/q| < 1/q."""
    if p <= b**q:
        raise ValueError(f"estimate only applies for p > b**q = {b**q}, got p = {p}")
    if p == q:
        raise ValueError("p and q must differ")
    k = classify_k(b, p, q, table)
    value = fractional_value(b, p * q).value
    deviation = abs(value - Fraction(k, q))
    return PqEstimate(p, q, value, k, deviation, deviation < Fraction(1, q))


@dataclass(frozen=True, eq=False)
class ATable:
    """Columnar form of A_N sorted by n; ``k`` is -1 when unclassified."""

    b: int
    N: int
    n: np.ndarray
    p: np.ndarray
    q: np.ndarray
    k: np.ndarray
    numerator: np.ndarray

    def __len__(self):
        return len(self.n)

    def pairs(self):
        for n, p, q, k in zip(self.n.tolist(), self.p.tolist(), self.q.tolist(), self.k.tolist()):
            yield PairIndex(p, q, n, None if k == UNCLASSIFIED else k)

    def point_set(self):
        ps = PointSet.from_fractions(self.numerator, self.n)
        ties = int(np.count_nonzero(np.diff(ps.values) == 0))
        if ties:
            log.info("S_b(A_N) for b=%d N=%d: %d repeated values kept as multiplicities", self.b, self.N, ties)
        return ps


def fiber_columns(b, q, N, cache_dir=None):
    """(primes, ks, numerators, ns) for one fiber, via the on-disk cache if given."""
    if cache_dir is not None:
        rows = read_fiber_cache(cache_dir, b, q, N)
        if rows is not None:
            return rows
    f = fiber(b, q, N)
    n = f.primes * q
    k = f.ks if f.classified else np.full(len(n), UNCLASSIFIED, dtype=np.int64)
    rows = (f.primes, k, f.numerators(), n)
    if cache_dir is not None:
        write_fiber_cache(cache_dir, b, q, N, *rows)
    return rows


def enumerate_table(b, N, workers=1, cache_dir=None):
    """A_N in columnar form; identical output for any worker count."""
    if b < 2:
        raise ValueError(f"base must be >= 2, got {b}")
    qs = fiber_primes_q(b, N)
    if qs:
        primes_upto(N // 2)  # warm the shared sieve before threads start
    if workers > 1 and len(qs) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            cols = list(pool.map(lambda q: fiber_columns(b, q, N, cache_dir), qs))
    else:
        cols = [fiber_columns(b, q, N, cache_dir) for q in qs]
    if not cols:
        empty = np.zeros(0, dtype=np.int64)
        return ATable(b, N, empty, empty, empty, empty, empty)
    p = np.concatenate([c[0] for c in cols])
    k = np.concatenate([c[1] for c in cols])
    num = np.concatenate([c[2] for c in cols])
    n = np.concatenate([c[3] for c in cols])
    q = np.concatenate([np.full(len(c[0]), qq, dtype=np.int64) for qq, c in zip(qs, cols)])
    order = np.argsort(n, kind="stable")
    return ATable(b, N, n[order], p[order], q[order], k[order], num[order])


def enumerate_A(b, N):
    return list(enumerate_table(b, N).pairs())


def point_set(b, indices):
    """Sorted multiset of b**n mod n / n over the given pairs."""
    ns = np.array([ix.n for ix in indices], dtype=np.int64)
    if ns.size == 0:
        return PointSet.from_fractions(ns, ns)
    return PointSet.from_fractions(powmod_array(b, ns, ns), ns)


def idealized_points(b, q, fiber_set):
    """Multiset holding k/q once for each fiber prime in F_k."""
    if not fiber_set.classified:
        raise ValueError(f"fiber over q = {fiber_set.q} is not classified")
    if (fiber_set.b, fiber_set.q) != (b, q):
        raise ValueError("fiber built for a different (b, q)")
    counts = fiber_set.class_counts()
    ks = np.repeat(np.arange(q, dtype=np.int64), counts)
    return PointSet.from_fractions(ks, np.full(len(ks), q, dtype=np.int64))


# On-disk fiber cache.  Integers only, so reads are bit-exact.

def _cache_path(cache_dir, b, q, N):
    return Path(cache_dir) / f"fiber_b{b}_q{q}_N{N}.txt"


def write_fiber_cache(cache_dir, b, q, N, primes, ks, numerators, ns):
    path = _cache_path(cache_dir, b, q, N)
    path.parent.mkdir(parents=True, exist_ok=True)
    tmp = path.with_suffix(f".tmp{os.getpid()}")
    with open(tmp, "w") as fh:
        fh.write(f"{b} {q} {N} {CACHE_FORMAT_VERSION}\n")
        for row in zip(primes.tolist(), ks.tolist(), numerators.tolist(), ns.tolist()):
            fh.write("%d,%d,%d,%d\n" % row)
    tmp.replace(path)
    return path


def read_fiber_cache(cache_dir, b, q, N):
    """Cached (primes, ks, numerators, ns), or None when missing or stale."""
    path = _cache_path(cache_dir, b, q, N)
    if not path.exists():
        return None
    with open(path) as fh:
        header = fh.readline().split()
        if header != [str(b), str(q), str(N), str(CACHE_FORMAT_VERSION)]:
            log.warning("cache %s has header %s; regenerating", path, " ".join(header))
            return None
        data = np.loadtxt(fh, delimiter=",", dtype=np.int64, ndmin=2)
    if data.size == 0:
        empty = np.zeros(0, dtype=np.int64)
        return empty, empty.copy(), empty.copy(), empty.copy()
    return tuple(np.ascontiguousarray(data[:, j]) for j in range(4))
