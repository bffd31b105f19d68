import io
import math
from fractions import Fraction

import pytest

from fracparts import VerificationError
from fracparts import experiments as ex
from fracparts.discrepancy import extreme_discrepancy_oracle, star_discrepancy_oracle
from fracparts.experiments import (
    CURVE_HEADER,
    FIBER_HEADER,
    bound_shapes,
    cardinality_curve,
    count_A,
    decomposition_table,
    discrepancy_curve,
    fiber_report,
    iterated_log,
    m_model,
    write_csv,
)
from fracparts.sequence import enumerate_table

import brute_oracle as brute


def test_iterated_log_markers():
    assert iterated_log(math.e, 1) == pytest.approx(1.0)
    assert iterated_log(1.0, 2) is None  # log 1 = 0 cannot be logged again
    assert iterated_log(10, 3) == pytest.approx(math.log(math.log(math.log(10))))
    assert bound_shapes(15) == (None, None)  # logloglog(15) < 0
    old, new = bound_shapes(10**6)
    assert old is None and new == pytest.approx(1 / iterated_log(10**6, 3))
    assert bound_shapes(3_700_000)[0] is None and bound_shapes(3_900_000)[0] > 0
    old, new = bound_shapes(10**7)
    l3 = math.log(math.log(math.log(1e7)))
    assert new == pytest.approx(1 / l3)
    assert old == pytest.approx(math.log(l3) / l3)
    assert m_model(10) is None


def test_fiber_report_examples():
    r = fiber_report(2, 3, 100)
    assert r.n_qN == 7
    assert r.dstar_ideal == 1.0
    assert r.gap < 1 / 3
    r = fiber_report(2, 5, 10**6)
    assert r.gap < 0.2
    assert r.lemma5_shape > 0 and r.shape_ratio == pytest.approx(r.dstar_actual / r.lemma5_shape)


def test_fiber_report_empty_and_unclassified():
    r = fiber_report(2, 5, 100)
    assert r.n_qN == 0 and r.dstar_actual is None and r.gap is None
    r = fiber_report(2, 2, 1000)
    assert r.n_qN > 0 and r.dstar_ideal is None and r.lemma5_shape is None
    with pytest.raises(ValueError):
        fiber_report(2, 9, 1000)


def test_fiber_report_values_match_oracle():
    r = fiber_report(2, 7, 10**5)
    f = enumerate_table(2, 10**5)
    sel = f.q == 7
    vals = f.numerator[sel] / f.n[sel]
    assert r.dstar_actual == pytest.approx(star_discrepancy_oracle(vals), abs=1e-12)


def test_sandwich_violation_raises(monkeypatch):
    monkeypatch.setattr(ex, "star_discrepancy_counts", lambda v, c: 0.0)
    with pytest.raises(VerificationError):
        fiber_report(2, 3, 1000)


def test_decomposition_examples():
    d = decomposition_table(2, 50)
    assert [(r.q, r.n_qN) for r in d.reports] == [(2, 7), (3, 2)]
    assert d.M == 9 and d.lhs <= d.weighted_sum + 1e-9
    fr = [Fraction(brute.powmod_naive(2, n, n), n) for n in [10, 14, 22, 26, 33, 34, 38, 39, 46]]
    assert d.dstar == pytest.approx(float(brute.star_discrepancy_exact(fr)), abs=1e-15)

    d = decomposition_table(2, 10)
    assert len(d.reports) == 1 and d.reports[0].n_qN == 1
    assert d.lhs == pytest.approx(d.weighted_sum)


def test_decomposition_medium():
    d = decomposition_table(2, 10**6, workers=2)
    assert [r.q for r in d.reports] == [2, 3, 5, 7, 11, 13]
    assert sum(r.n_qN for r in d.reports) == d.M
    assert d.lhs <= d.weighted_sum + 1e-9


def test_decomposition_violation_raises(monkeypatch):
    real = ex.star_discrepancy

    def inflated(points):
        # only the 9-point union gets a (bogus) D* of 2
        return real(points) if len(points) < 9 else 2.0

    monkeypatch.setattr(ex, "star_discrepancy", inflated)
    with pytest.raises(VerificationError):
        decomposition_table(2, 50)


def test_cardinality_examples():
    recs = cardinality_curve(2, [10, 50, 10**5])
    assert [r.M for r in recs] == [1, 9, len(brute.enumerate_a(2, 10**5))]
    assert recs[0].m_model is None and recs[0].ratio is None
    assert recs[2].ratio == pytest.approx(recs[2].M / m_model(10**5))
    for b, N in [(3, 10**6), (2, 777777)]:
        assert count_A(b, N) == len(enumerate_table(b, N))


def test_discrepancy_curve_examples():
    (row,) = discrepancy_curve(2, [50])
    assert row.M == 9
    xs = [brute.powmod_naive(2, n, n) / n for n in [10, 14, 22, 26, 33, 34, 38, 39, 46]]
    assert row.dstar == pytest.approx(star_discrepancy_oracle(xs), abs=1e-12)
    assert row.d == pytest.approx(extreme_discrepancy_oracle(xs), abs=1e-12)

    (row,) = discrepancy_curve(2, [9])
    assert row.M == 0 and row.dstar is None and row.d is None

    rows = discrepancy_curve(2, [10**5, 10**4, 10**6])
    assert [r.N for r in rows] == [10**4, 10**5, 10**6]
    for r in rows:
        assert r.d <= 2 * r.dstar + 1e-12 and r.dstar <= r.d + 1e-12
        assert r.bound_new_shape == pytest.approx(1 / iterated_log(r.N, 3))


def test_oracle_reproduces_small_curve_rows():
    for N in (200, 1000, 3000):
        (row,) = discrepancy_curve(3, [N])
        t = enumerate_table(3, N)
        xs = (t.numerator / t.n).tolist()
        assert len(xs) <= 1000
        assert row.dstar == pytest.approx(star_discrepancy_oracle(xs), abs=1e-12)
        assert row.d == pytest.approx(extreme_discrepancy_oracle(xs), abs=1e-12)


def test_csv_format():
    buf = io.StringIO()
    write_csv(discrepancy_curve(2, [9, 50]), buf, CURVE_HEADER)
    lines = buf.getvalue().splitlines()
    assert lines[0] == CURVE_HEADER
    assert lines[1] == "2,9,0,,,,,"
    fields = lines[2].split(",")
    assert fields[:3] == ["2", "50", "9"]
    assert float(fields[3]) == discrepancy_curve(2, [50])[0].dstar
    assert fields[3] == "%.17g" % float(fields[3])

    buf = io.StringIO()
    write_csv([fiber_report(2, 3, 100)], buf, FIBER_HEADER)
    assert buf.getvalue().splitlines()[0] == FIBER_HEADER
