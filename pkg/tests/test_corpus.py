from __future__ import annotations

from fractions import Fraction

import numpy as np
import pytest

from dp3delta.config import builtin_configs, load_builtin, strata
from dp3delta.corpus import (
    check_lemma,
    check_stratum_table,
    curve_strata,
    lemma,
    load_lemmas,
    numeric_s,
    numeric_s_flag,
    sample,
    stratum_tables,
    trapezoid,
)
from dp3delta.delta import s_curve, s_flag
from dp3delta.piecewise import PiecewiseFunc
from dp3delta.zariski import param_zariski

RECORDS = load_lemmas()
KEYS = [r.key for r in RECORDS]


def _value(poly, v):
    return sum(Fraction(c) * v**k for k, c in enumerate(poly))


def _antiderivative(poly, v):
    return sum(Fraction(c) * v ** (k + 1) / (k + 1) for k, c in enumerate(poly))


@pytest.mark.parametrize("key", KEYS)
def test_record_is_self_consistent(key):
    # uses only the stored numbers, none of the library's algorithms
    rec = lemma(key)
    vol, deg = rec.volume, rec.degree
    assert vol[0][0] == 0 and vol[-1][1] == rec.tau
    assert [p[:2] for p in vol] == [p[:2] for p in deg]
    assert _value(vol[0][2], 0) == 3
    assert _value(vol[-1][2], rec.tau) == 0
    for (lo, hi, p), (_, _, q) in zip(vol, vol[1:]):
        assert _value(p, hi) == _value(q, hi)
    for (lo, hi, p), (_, _, d) in zip(vol, deg):
        # d/dv P(v)^2 = -2 P(v).A
        assert Fraction(p[1]) == -2 * Fraction(d[0])
        assert 2 * Fraction(p[2]) == -2 * Fraction(d[1])
        assert _value(p, (lo + hi) / 2) > 0
    total = sum(_antiderivative(p, hi) - _antiderivative(p, lo) for lo, hi, p in vol)
    assert total / 3 == rec.s_value
    assert rec.delta == 1 / rec.s_value


@pytest.mark.parametrize("key", KEYS)
def test_record_matches_its_curves(key):
    rec = lemma(key)
    reports = check_lemma(rec)
    assert reports
    assert all(r.ok for r in reports), [r for r in reports if not r.ok]


def test_distinct_s_values():
    expected = [
        "17/27", "2/3", "37/54", "25/36", "7/10", "19/27", "7/9", "5/6", "23/27", "8/9",
        "17/18", "1", "19/18", "29/27", "13/12", "10/9", "7/6", "11/9", "23/18", "35/27",
        "4/3", "13/9", "3/2", "5/3", "19/9", "13/6", "7/3", "3",
    ]
    assert {r.s_value for r in RECORDS} == {Fraction(x) for x in expected}


def test_every_builtin_curve_with_small_delta_has_a_record():
    # a curve whose 1/S is below the general-point bound must be covered
    covered = {inst for r in RECORDS for inst in r.instances}
    for c in builtin_configs():
        for k in c.curves:
            if 1 / s_curve(k.id, c) < Fraction(3, 2):
                assert (c.name, k.id) in covered


@pytest.mark.parametrize("field", ["tau", "s_value", "delta", "volume", "degree"])
def test_perturbed_record_fails(field):
    rec = lemma("root-9-13").perturbed(field)
    assert not any(r.ok for r in check_lemma(rec))


@pytest.mark.parametrize("name", sorted(stratum_tables()))
def test_stratum_tables(name):
    checks = check_stratum_table(load_builtin(name), stratum_tables()[name])
    assert all(r.ok for r in checks), [r.failures for r in checks if not r.ok]
    assert sum(len(r.strata) for r in checks) == len(strata(load_builtin(name)))


def test_stratum_table_detects_a_wrong_value():
    rows = list(stratum_tables()["A5"])
    rows[0] = rows[0].__class__(rows[0].on, rows[0].off, Fraction(2, 3), True)
    checks = check_stratum_table(load_builtin("A5"), rows)
    assert not checks[0].ok


def test_sample_evaluates_pieces():
    f = PiecewiseFunc.build([0, 1, 2], [(0, 1), (2, -1)])
    assert np.allclose(sample(f, np.array([0.0, 0.5, 1.0, 1.5, 2.0])), [0, 0.5, 1, 0.5, 0])
    assert trapezoid(PiecewiseFunc.build([0, 3], [(2,)]), 7) == pytest.approx(6, abs=1e-14)


def test_quadrature_converges_at_a_finer_grid():
    for rec in RECORDS:
        name, cid = rec.instances[0]
        c = load_builtin(name)
        exact = float(s_curve(cid, c))
        assert abs(numeric_s(c, cid, 100_000) - exact) / exact <= 1e-9
        for st in curve_strata(c, cid):
            exact = float(s_flag(cid, st, c))
            assert abs(numeric_s_flag(c, cid, st, 100_000) - exact) / exact <= 1e-9


def test_trapezoid_error_follows_the_h_squared_term():
    # for a C^1 integrand the error is (h^2 / 12) (f'(b) - f'(a)) to leading order
    for rec in RECORDS:
        name, cid = rec.instances[0]
        c = load_builtin(name)
        pz = param_zariski(c, cid)
        f = pz.volume()
        n = 10_000
        h = float(pz.tau) / (n - 1)
        slope = lambda p, v: float(p[1] + 2 * p[2] * v)  # noqa: E731
        predicted = h * h / 12 * (slope(f.pieces[-1], pz.tau) - slope(f.pieces[0], 0))
        error = trapezoid(f, n) - 3 * float(s_curve(cid, c))
        if predicted == 0:
            assert abs(error) < 1e-10  # only the h^3 terms at kinks of f'' remain
        else:
            assert error == pytest.approx(predicted, rel=1e-3)
