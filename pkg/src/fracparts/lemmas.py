"""Seeded randomized checks of the discrepancy inequalities.

Each suite draws ``cases`` inputs from a numpy Generator and counts the
cases whose inequality fails by more than ``SLACK``.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .discrepancy import (
    LatticeProfile,
    PointSet,
    continuity_gap,
    discrepancy,
    extreme_discrepancy_oracle,
    lemma1_bound,
    star_discrepancy,
    star_discrepancy_oracle,
    triangle_bound,
)

SLACK = 1e-12
MAX_SIZE = 300


@dataclass
class SuiteResult:
    name: str
    cases: int = 0
    n_failed: int = 0
    examples: list = field(default_factory=list)  # first few counterexamples
    worst_margin: float = -np.inf  # max over checks of lhs - rhs

    @property
    def passed(self):
        return self.n_failed == 0

    def check(self, lhs, rhs, detail):
        margin = lhs - rhs
        self.worst_margin = max(self.worst_margin, margin)
        if margin > SLACK:
            self.n_failed += 1
            if len(self.examples) < 10:
                self.examples.append(f"{detail}: {lhs!r} > {rhs!r}")

    def line(self):
        status = "pass" if self.passed else f"FAIL ({self.n_failed})"
        return f"{self.name:<22} cases={self.cases:<6} worst_margin={self.worst_margin:+.3e} {status}"


def random_multiset(rng, max_size=MAX_SIZE):
    """Random points in [0,1] mixing uniform draws, ties, lattice values and endpoints."""
    M = int(rng.integers(1, max_size + 1))
    kind = rng.integers(4)
    if kind == 0:
        x = rng.random(M)
    elif kind == 1:
        pool = rng.random(int(rng.integers(1, 6)))
        x = rng.choice(pool, M)
    elif kind == 2:
        R = int(rng.integers(1, 12))
        x = rng.integers(0, R + 1, M) / R
    else:
        x = rng.random(M)
        x[rng.random(M) < 0.2] = 0.0
        x[rng.random(M) < 0.2] = 1.0
    return PointSet.from_values(x)


def oracle_suite(seed, cases):
    """Closed forms against the breakpoint scans, plus D* <= D <= 2D*."""
    rng = np.random.default_rng(seed)
    star = SuiteResult("star_vs_oracle")
    extreme = SuiteResult("extreme_vs_oracle")
    sandwich = SuiteResult("star_extreme_sandwich")
    for i in range(cases):
        ps = random_multiset(rng)
        res = discrepancy(ps)
        o = star_discrepancy_oracle(ps)
        for suite in (star, extreme, sandwich):
            suite.cases += 1
        star.check(abs(res.dstar - o), 0.0, f"case {i} M={ps.M}")
        eo = extreme_discrepancy_oracle(ps)
        extreme.check(abs(res.d - eo), 0.0, f"case {i} M={ps.M}")
        sandwich.check(max(res.dstar - res.d, res.d - 2 * res.dstar), 0.0, f"case {i} M={ps.M}")
    return [star, extreme, sandwich]


def lemma1_suite(seed, cases):
    rng = np.random.default_rng(seed)
    out = SuiteResult("lattice_bound")
    for i in range(cases):
        R = int(rng.integers(1, 25))
        counts = rng.integers(0, 60, R)
        if counts.sum() == 0:
            counts[rng.integers(R)] = 1
        alpha0 = 1.0 / R if rng.random() < 0.2 else float(rng.random())
        prof = LatticeProfile.with_tail(counts.tolist(), alpha0)
        lhs = prof.M * star_discrepancy(prof.realize())
        out.cases += 1
        out.check(lhs, lemma1_bound(prof), f"case {i} R={R} alpha0={alpha0!r}")
    return out


def lemma2_suite(seed, cases):
    rng = np.random.default_rng(seed)
    out = SuiteResult("partition_bound")
    for i in range(cases):
        ps = random_multiset(rng)
        K = int(rng.integers(1, min(10, ps.M) + 1))
        # every block gets at least one point
        labels = np.concatenate([np.arange(K), rng.integers(0, K, ps.M - K)])
        rng.shuffle(labels)
        parts = [ps.values[labels == j] for j in range(K)]
        out.cases += 1
        out.check(ps.M * star_discrepancy(ps), triangle_bound(parts), f"case {i} M={ps.M} K={K}")
    return out


def lemma3_suite(seed, cases):
    rng = np.random.default_rng(seed)
    out = SuiteResult("perturbation_bound")
    for i in range(cases):
        ps = random_multiset(rng)
        eps = float(rng.uniform(0.0, 0.2))
        shifted = np.clip(ps.values + rng.uniform(-eps, eps, ps.M), 0.0, 1.0)
        gap = continuity_gap(ps, PointSet.from_values(shifted))
        out.cases += 1
        out.check(gap.dstar_gap, gap.max_pointwise_gap, f"case {i} M={ps.M} eps={eps!r}")
        out.check(gap.max_pointwise_gap, eps, f"case {i} pairing gap")
    return out


def all_suites(seed, cases):
    return [*oracle_suite(seed, cases), lemma1_suite(seed, cases), lemma2_suite(seed, cases), lemma3_suite(seed, cases)]
