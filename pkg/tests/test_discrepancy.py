import time
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from fracparts.discrepancy import (
    LatticeProfile,
    PointSet,
    continuity_gap,
    discrepancy,
    extreme_discrepancy,
    extreme_discrepancy_oracle,
    lemma1_bound,
    star_discrepancy,
    star_discrepancy_counts,
    star_discrepancy_oracle,
    triangle_bound,
)
from fracparts.sequence import fiber, idealized_points

import brute_oracle as brute

TOL = 1e-12

# Points drawn from a mix that hits ties, 0 and 1 often.
unit = st.one_of(
    st.floats(0, 1, allow_nan=False),
    st.sampled_from([0.0, 1.0, 0.5, 0.25]),
    st.integers(0, 7).map(lambda k: k / 7),
)
multisets = st.lists(unit, min_size=1, max_size=300)


def test_star_examples():
    assert star_discrepancy([0.5]) == 0.5
    assert star_discrepancy([0.25, 0.75]) == 0.25
    assert star_discrepancy([0.0, 0.0, 0.0]) == 1.0


def test_extreme_examples():
    assert extreme_discrepancy([0.5]) == 1.0
    assert extreme_discrepancy([0.25, 0.75]) == 0.5
    assert extreme_discrepancy([(2 * i - 1) / 10 for i in range(1, 6)]) == pytest.approx(0.2, abs=1e-15)


def test_oracle_examples():
    assert star_discrepancy_oracle([0.5]) == 0.5
    assert star_discrepancy_oracle([0.25, 0.75]) == 0.25
    rng = np.random.default_rng(7)
    x = rng.random(200)
    assert abs(star_discrepancy_oracle(x) - star_discrepancy(x)) < TOL


def test_empty_set_is_an_error():
    for f in (star_discrepancy, extreme_discrepancy, star_discrepancy_oracle, extreme_discrepancy_oracle):
        with pytest.raises(ValueError):
            f([])


def test_points_outside_unit_interval_rejected():
    with pytest.raises(ValueError):
        PointSet.from_values([0.2, 1.5])
    with pytest.raises(ValueError):
        PointSet.from_values([float("nan")])
    with pytest.raises(ValueError):
        PointSet.from_fractions([3], [2])


def test_witnesses():
    r = discrepancy([0.1, 0.2, 0.9])
    x = [0.1, 0.2, 0.9]
    i = r.witness_star
    assert r.dstar == pytest.approx(max(x[i] - i / 3, (i + 1) / 3 - x[i]))
    hi, lo = r.witness_extreme
    assert r.d == pytest.approx(1 / 3 + ((hi + 1) / 3 - x[hi]) - ((lo + 1) / 3 - x[lo]))


@settings(max_examples=300, deadline=None)
@given(multisets)
def test_closed_forms_match_oracles(xs):
    r = discrepancy(xs)
    assert abs(r.dstar - star_discrepancy_oracle(xs)) <= TOL
    assert abs(r.d - extreme_discrepancy_oracle(xs)) <= TOL
    assert r.dstar - TOL <= r.d <= 2 * r.dstar + TOL
    assert 0 <= r.dstar <= 1 and r.d <= 1 + TOL


@settings(max_examples=100, deadline=None)
@given(st.lists(st.tuples(st.integers(0, 40), st.integers(1, 40)), min_size=1, max_size=60))
def test_closed_form_matches_exact_rationals(pairs):
    fr = [Fraction(min(a, b), b) for a, b in pairs]
    ps = PointSet.from_fractions([f.numerator for f in fr], [f.denominator for f in fr])
    assert abs(star_discrepancy(ps) - float(brute.star_discrepancy_exact(fr))) <= TOL


@settings(max_examples=200, deadline=None)
@given(st.lists(st.integers(0, 30), min_size=1, max_size=30))
def test_counts_form_matches_materialised(counts):
    if sum(counts) == 0:
        counts[0] = 1
    R = len(counts)
    values = np.arange(R) / R
    materialised = np.repeat(values, counts)
    assert abs(star_discrepancy_counts(values, counts) - star_discrepancy(materialised)) <= TOL


def test_counts_form_validation():
    with pytest.raises(ValueError):
        star_discrepancy_counts([0.5, 0.2], [1, 1])
    with pytest.raises(ValueError):
        star_discrepancy_counts([0.5], [0])
    with pytest.raises(ValueError):
        star_discrepancy_counts([0.5], [-1])


def test_lattice_bound_examples():
    prof = LatticeProfile(2, (5, 5), (0.5, 0.5))
    assert lemma1_bound(prof) == 5
    assert prof.M * star_discrepancy(prof.realize()) == 5
    for R in (1, 3, 8):
        uniform = LatticeProfile(R, (4,) * R, (Fraction(1, R),) * R)
        assert lemma1_bound(uniform) == pytest.approx(uniform.M / R)


def test_lattice_profile_hypotheses_enforced():
    with pytest.raises(ValueError):
        LatticeProfile(3, (1, 1, 1), (0.5, 0.3, 0.3))  # does not sum to 1
    with pytest.raises(ValueError):
        LatticeProfile(3, (1, 1, 1), (0.2, 0.5, 0.3))  # unequal tail
    with pytest.raises(ValueError):
        LatticeProfile(2, (1, -1), (0.5, 0.5))
    with pytest.raises(ValueError):
        LatticeProfile(2, (1,), (0.5, 0.5))


@settings(max_examples=300, deadline=None)
@given(st.lists(st.integers(0, 50), min_size=1, max_size=25), st.floats(0, 1))
def test_lattice_bound_holds(counts, alpha0):
    if sum(counts) == 0:
        counts[-1] = 1
    prof = LatticeProfile.with_tail(counts, alpha0)
    assert prof.M * star_discrepancy(prof.realize()) <= lemma1_bound(prof) + TOL
    assert abs(prof.star_discrepancy() - star_discrepancy(prof.realize())) <= TOL


def test_triangle_examples():
    ps = PointSet.from_values([0.1, 0.4, 0.8])
    assert triangle_bound([ps]) == pytest.approx(3 * star_discrepancy(ps))
    # D*({0.25}) = D*({0.75}) = 0.75: each is approached as r -> 0.75 from below
    assert star_discrepancy_oracle([0.75]) == 0.75
    assert triangle_bound([[0.25], [0.75]]) == pytest.approx(1.5)
    assert 2 * star_discrepancy([0.25, 0.75]) == 0.5
    with pytest.raises(ValueError):
        triangle_bound([[0.5], []])


@settings(max_examples=300, deadline=None)
@given(multisets, st.data())
def test_triangle_bound_holds(xs, data):
    labels = data.draw(st.lists(st.integers(0, 9), min_size=len(xs), max_size=len(xs)))
    x = np.asarray(xs)
    lab = np.asarray(labels)
    parts = [x[lab == j] for j in np.unique(lab)]
    assert len(xs) * star_discrepancy(xs) <= triangle_bound(parts) + TOL


def test_continuity_examples():
    ps = PointSet.from_values([0.1, 0.3, 0.9])
    g = continuity_gap(ps, ps)
    assert g.max_pointwise_gap == 0 and g.dstar_gap == 0
    shifted = np.clip(ps.values + 0.01, 0, 1)
    assert continuity_gap(ps, shifted).dstar_gap <= 0.01 + TOL
    with pytest.raises(ValueError):
        continuity_gap([0.1], [0.1, 0.2])


def test_continuity_on_fiber_against_lattice():
    f = fiber(2, 3, 100)
    actual = PointSet.from_fractions(f.numerators(), f.primes * 3)
    ideal = idealized_points(2, 3, f)
    g = continuity_gap(actual, ideal)
    assert g.max_pointwise_gap < 1 / 3
    assert g.dstar_gap < 1 / 3


@settings(max_examples=300, deadline=None)
@given(multisets, st.floats(0, 0.3), st.data())
def test_continuity_bound_holds(xs, eps, data):
    noise = data.draw(st.lists(st.floats(-eps, eps), min_size=len(xs), max_size=len(xs)))
    ys = np.clip(np.asarray(xs) + np.asarray(noise), 0, 1)
    g = continuity_gap(xs, ys)
    assert g.max_pointwise_gap <= eps + TOL
    assert g.dstar_gap <= g.max_pointwise_gap + TOL


def test_large_input_is_fast():
    x = np.random.default_rng(0).random(10**6)
    t0 = time.perf_counter()
    r = discrepancy(x)
    assert time.perf_counter() - t0 < 5
    assert r.dstar < 0.01
