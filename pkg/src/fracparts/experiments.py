"""End-to-end runs: per-fiber sandwiches, the fiber decomposition of A_N,
the growth of |A_N| and the discrepancy curve with its bound-shape columns.

Every iterated logarithm is natural; a column is None (an empty CSV field)
whenever an inner logarithm is <= 0.
"""
from __future__ import annotations

import csv
from dataclasses import astuple, dataclass, fields
import math

import numpy as np

from . import VerificationError
from .discrepancy import PointSet, discrepancy, star_discrepancy, star_discrepancy_counts
from .progressions import pi
from .numtheory import is_prime
from .sequence import enumerate_table, fiber_columns, fiber_primes_q, is_classifiable

SANDWICH_SLACK = 1e-12
TRIANGLE_SLACK = 1e-9


def iterated_log(x, depth):
    """log applied ``depth`` times, or None once an argument is <= 0."""
    for _ in range(depth):
        if x is None or x <= 0:
            return None
        x = math.log(x)
    return x


def _positive(x):
    return x if x is not None and x > 0 else None


@dataclass(frozen=True)
class CurveRecord:
    b: int
    N: int
    M: int
    dstar: float | None
    d: float | None
    bound_old_shape: float | None
    bound_new_shape: float | None
    m_model: float | None


@dataclass(frozen=True)
class FiberReport:
    b: int
    q: int
    N: int
    n_qN: int
    dstar_actual: float | None
    dstar_ideal: float | None
    gap: float | None
    one_over_q: float
    lemma5_shape: float | None

    @property
    def shape_ratio(self):
        if self.dstar_actual is None or not self.lemma5_shape:
            return None
        return self.dstar_actual / self.lemma5_shape


@dataclass(frozen=True)
class CardinalityRecord:
    b: int
    N: int
    M: int
    m_model: float | None
    ratio: float | None


@dataclass(frozen=True)
class Decomposition:
    b: int
    N: int
    M: int
    dstar: float | None
    reports: list
    weighted_sum: float  # sum_q n(q,N) D*(S_b(F_{q,N}))

    @property
    def lhs(self):
        return self.M * self.dstar if self.M else 0.0


def bound_shapes(N):
    """(old, new) bound shapes log4(N)/log3(N) and 1/log3(N).

    Each is None unless every log it takes is positive: N > e**e for the
    new shape, N > e**(e**e) (about 3.8e6) for the old one.
    """
    l3 = _positive(iterated_log(N, 3))
    if l3 is None:
        return None, None
    old = math.log(l3) / l3 if l3 > 1 else None
    return old, 1.0 / l3


def m_model(N):
    l3 = _positive(iterated_log(N, 3))
    return None if l3 is None else N * l3 / math.log(N)


def lemma5_shape(q, N, n):
    if n == 0 or N < 2:
        return None
    ll = iterated_log(q, 2)
    if ll is None:
        return None
    return ll / math.log(q) + N / (q * q * math.log(N) * n)


def _fiber_report(b, q, N, numerators, ns, counts):
    n = len(ns)
    if n == 0:
        return FiberReport(b, q, N, 0, None, None, None, 1.0 / q, None)
    actual = star_discrepancy(PointSet.from_fractions(numerators, ns))
    if counts is None:
        return FiberReport(b, q, N, n, actual, None, None, 1.0 / q, None)
    ideal = star_discrepancy_counts(np.arange(q) / q, counts)
    gap = abs(actual - ideal)
    if not gap < 1.0 / q:
        raise VerificationError(
            f"sandwich fails for b={b} q={q} N={N}: |{actual!r} - {ideal!r}| >= 1/{q}"
        )
    return FiberReport(b, q, N, n, actual, ideal, gap, 1.0 / q, lemma5_shape(q, N, n))


def fiber_report(b, q, N, cache_dir=None):
    """Discrepancy of one fiber and of its idealised lattice multiset.

    Raises VerificationError if they differ by 1/q or more.  Empty fibers
    give a report with n_qN == 0 and empty measurement fields.
    """
    if not is_prime(q):
        raise ValueError(f"q must be prime, got {q}")
    _, ks, numerators, ns = fiber_columns(b, q, N, cache_dir)
    counts = np.bincount(ks, minlength=q) if is_classifiable(b, q) else None
    return _fiber_report(b, q, N, numerators, ns, counts)


def decomposition_table(b, N, workers=1, cache_dir=None):
    """Per-fiber reports plus the check M D*(S_b(A_N)) <= sum_q n(q,N) D*(fiber)."""
    table = enumerate_table(b, N, workers=workers, cache_dir=cache_dir)
    reports = []
    for q in fiber_primes_q(b, N):
        sel = table.q == q
        if not sel.any():
            continue
        counts = None
        if is_classifiable(b, q):
            counts = np.bincount(table.k[sel], minlength=q)
        reports.append(_fiber_report(b, q, N, table.numerator[sel], table.n[sel], counts))
    M = len(table)
    weighted = float(sum(r.n_qN * r.dstar_actual for r in reports))
    dstar = star_discrepancy(table.point_set()) if M else None
    out = Decomposition(b, N, M, dstar, reports, weighted)
    if M and out.lhs > weighted + TRIANGLE_SLACK:
        raise VerificationError(f"triangle inequality fails for b={b} N={N}: {out.lhs!r} > {weighted!r}")
    return out


def count_A(b, N):
    """|A_N| from prime counts alone."""
    return sum(pi(N // q) - pi(b**q) for q in fiber_primes_q(b, N))


def cardinality_curve(b, Ns):
    out = []
    for N in Ns:
        M = count_A(b, N)
        model = m_model(N)
        out.append(CardinalityRecord(b, N, M, model, None if model is None else M / model))
    return out


def discrepancy_curve(b, Ns, workers=1, cache_dir=None):
    out = []
    for N in sorted(Ns):
        table = enumerate_table(b, N, workers=workers, cache_dir=cache_dir)
        old, new = bound_shapes(N)
        dstar = d = None
        if len(table):
            res = discrepancy(table.point_set())
            dstar, d = res.dstar, res.d
            if not dstar - SANDWICH_SLACK <= d <= 2 * dstar + SANDWICH_SLACK:
                raise VerificationError(f"D* <= D <= 2D* fails at N={N}: D*={dstar!r} D={d!r}")
        out.append(CurveRecord(b, N, len(table), dstar, d, old, new, m_model(N)))
    return out


CURVE_HEADER = "b,N,M,dstar,d,bound_old_shape,bound_new_shape,m_model"
FIBER_HEADER = "b,q,N,n_qN,dstar_actual,dstar_ideal,gap,one_over_q,lemma5_shape"
CARDINALITY_HEADER = "b,N,M,m_model,ratio"


def format_field(v):
    if v is None:
        return ""
    if isinstance(v, (float, np.floating)):
        return "%.17g" % v
    return str(v)


def write_csv(records, fh, header=None):
    """Write dataclass records as CSV; floats with 17 significant digits."""
    writer = csv.writer(fh, lineterminator="\n")
    if header is None:
        header = ",".join(f.name for f in fields(records[0]))
    writer.writerow(header.split(","))
    for rec in records:
        writer.writerow([format_field(v) for v in astuple(rec)])
