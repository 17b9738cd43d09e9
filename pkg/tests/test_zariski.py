from __future__ import annotations

import itertools
from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from dp3delta.config import BUILTIN_NAMES, load_builtin
from dp3delta.lattice import (
    DivisorClass,
    anticanonical_class,
    gram_matrix,
    intersect,
    is_negative_definite,
    solve,
)
from dp3delta.zariski import (
    DecompositionError,
    NotPseudoEffective,
    _rational_root_after,
    degree_function,
    is_nef,
    param_zariski,
    tau,
    volume_function,
    zariski_at,
)

names = st.sampled_from(BUILTIN_NAMES)
unit = st.fractions(min_value=0, max_value=1, max_denominator=60)


def _decomposition_by_subsets(config, d):
    """Search every support for the unique valid decomposition (small configs only)."""
    curves = config.curves
    found = []
    for k in range(len(curves) + 1):
        for sub in itertools.combinations(curves, k):
            cls = [c.cls for c in sub]
            if sub and not is_negative_definite(cls):
                continue
            coeffs = solve(gram_matrix(cls), [[intersect(d, c) for c in cls]])[0] if sub else []
            if any(a <= 0 for a in coeffs):
                continue
            p = d
            for c, a in zip(sub, coeffs):
                p = p - c.cls * a
            if all(intersect(p, c.cls) >= 0 for c in curves):
                found.append({c.id: a for c, a in zip(sub, coeffs)})
    return found


def test_anticanonical_class_is_nef():
    for name in BUILTIN_NAMES:
        c = load_builtin(name)
        assert is_nef(c, anticanonical_class())
        dec = zariski_at(c, anticanonical_class())
        assert dec.negative == {} and dec.positive == anticanonical_class()


def test_known_decomposition_on_a1():
    c = load_builtin("A1")
    pz = param_zariski(c, "E")
    assert pz.tau == Fraction(3, 2)
    assert pz.breakpoints == (0, 1, Fraction(3, 2))
    assert pz.intervals[0].active == ()
    assert set(pz.intervals[1].active) == {f"L{i}" for i in range(1, 7)}
    coeff = pz.coefficient("L1")
    assert coeff(Fraction(1, 2)) == 0 and coeff(Fraction(5, 4)) == Fraction(1, 4)
    assert volume_function(c, "E")(1) == 1
    assert degree_function(c, "E")(Fraction(3, 2)) == 0


def test_interval_lookup():
    pz = param_zariski(load_builtin("A1"), "E")
    assert pz.interval_at(1) is pz.intervals[0]
    with pytest.raises(ValueError):
        pz.interval_at(2)


def test_beyond_tau_is_not_pseudo_effective():
    for name in ("A1", "A4", "E6"):
        c = load_builtin(name)
        for k in c.curves:
            with pytest.raises(NotPseudoEffective):
                zariski_at(c, anticanonical_class() - k.cls * (tau(c, k.id) + Fraction(1, 10)))


def test_negative_class_is_not_pseudo_effective():
    c = load_builtin("E6")
    with pytest.raises(NotPseudoEffective):
        zariski_at(c, -anticanonical_class())


def test_support_never_shrinks_on_builtins():
    for name in BUILTIN_NAMES:
        c = load_builtin(name)
        for k in c.curves:
            assert param_zariski(c, k.id).monotonicity_violations == ()


def test_rational_root_helper():
    assert _rational_root_after((Fraction(9), Fraction(-12), Fraction(4)), Fraction(0)) == Fraction(3, 2)
    assert _rational_root_after((Fraction(3), Fraction(-2), Fraction(0)), Fraction(0)) == Fraction(3, 2)
    assert _rational_root_after((Fraction(1), Fraction(0), Fraction(1)), Fraction(0)) is None
    with pytest.raises(DecompositionError):
        _rational_root_after((Fraction(2), Fraction(0), Fraction(-1)), Fraction(0))


@pytest.mark.parametrize("name", ["E6", "D5", "A5"])
def test_pointwise_agrees_with_subset_search(name):
    c = load_builtin(name)
    for k in c.curves:
        t = tau(c, k.id)
        for v in (t / 3, t * 5 / 6):
            d = anticanonical_class() - k.cls * v
            (only,) = _decomposition_by_subsets(c, d)
            assert zariski_at(c, d).negative == only


@given(names, st.data(), unit)
def test_pointwise_properties(name, data, s):
    c = load_builtin(name)
    k = data.draw(st.sampled_from(c.curves))
    v = tau(c, k.id) * s
    d = anticanonical_class() - k.cls * v
    dec = zariski_at(c, d)
    assert dec.positive + dec.negative_class(c) == d
    assert is_nef(c, dec.positive)
    assert all(a > 0 for a in dec.negative.values())
    for cid in dec.negative:
        assert intersect(dec.positive, c.curve(cid).cls) == 0
    if dec.negative:
        assert is_negative_definite([c.curve(cid).cls for cid in dec.negative])
    # homogeneity
    twice = zariski_at(c, d * 2)
    assert twice.positive == dec.positive * 2
    assert twice.negative == {cid: 2 * a for cid, a in dec.negative.items()}
    # agreement with the sweep
    assert dec.negative == param_zariski(c, k.id).at(v).negative


@given(names, st.lists(st.fractions(min_value=0, max_value=3, max_denominator=5), min_size=22, max_size=22))
def test_big_divisors_decompose(name, weights):
    c = load_builtin(name)
    d = anticanonical_class()
    for curve, w in zip(c.curves, weights):
        d = d + curve.cls * w
    dec = zariski_at(c, d)
    assert dec.positive + dec.negative_class(c) == d
    assert is_nef(c, dec.positive)
    assert intersect(dec.positive, dec.positive) > 0


@given(names, st.data())
def test_volume_and_degree_are_linked(name, data):
    # d/dv P(v)^2 = -2 P(v).A on every piece
    c = load_builtin(name)
    k = data.draw(st.sampled_from(c.curves))
    vol = volume_function(c, k.id)
    deg = degree_function(c, k.id)
    assert vol(0) == 3 and vol(tau(c, k.id)) == 0
    for (lo, hi), p in zip(zip(vol.breakpoints, vol.breakpoints[1:]), vol.pieces):
        m = (lo + hi) / 2
        assert p[1] + 2 * p[2] * m == -2 * deg(m)


def test_unknown_curve_raises():
    with pytest.raises(KeyError):
        param_zariski(load_builtin("A1"), "nope")


def test_other_class_arguments():
    c = load_builtin("A2")
    assert not is_nef(c, DivisorClass.of(0, 1, -1, 0, 0, 0, 0))
