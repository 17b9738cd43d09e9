"""Zariski decomposition of ``-K - vA``, pointwise and along the whole ray.

The pointwise routine is Bauer's algorithm: start with no negative part, and
keep adding every curve on which the current positive part is negative.
The parametric version runs the same iteration on affine functions of ``v``
with all sign tests taken on the germ just to the right of the current
point, so a single run yields the support valid on a half-open interval.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .config import NegativeCurve, SurfaceConfig
from .lattice import (
    DivisorClass,
    anticanonical_class,
    gram_matrix,
    intersect,
    is_negative_definite,
    solve,
)
from .piecewise import PiecewiseFunc, integrate  # noqa: F401  (re-exported)


class NotPseudoEffective(ValueError):
    pass


class DecompositionError(RuntimeError):
    """The parametric sweep reached a state the theory rules out."""


@dataclass(frozen=True)
class Affine:
    slope: Fraction
    const: Fraction

    def __call__(self, v) -> Fraction:
        return self.const + self.slope * Fraction(v)

    def germ(self, v0) -> tuple[Fraction, Fraction]:
        return (self(v0), self.slope)

    def __str__(self) -> str:
        from .piecewise import format_poly

        return format_poly((self.const, self.slope))


def _germ_sign(value: Fraction, slope: Fraction) -> int:
    x = value if value != 0 else slope
    return (x > 0) - (x < 0)


@dataclass(frozen=True)
class Decomposition:
    positive: DivisorClass
    negative: dict[str, Fraction]

    def negative_class(self, config: SurfaceConfig) -> DivisorClass:
        total = DivisorClass.zero()
        for cid, a in self.negative.items():
            total = total + config.curve(cid).cls * a
        return total


@dataclass(frozen=True)
class Interval:
    lo: Fraction
    hi: Fraction
    active: tuple[str, ...]
    coeffs: dict[str, Affine]
    p_const: DivisorClass
    p_slope: DivisorClass

    def positive(self, v) -> DivisorClass:
        v = Fraction(v)
        return self.p_const + self.p_slope * v

    def negative(self, v) -> dict[str, Fraction]:
        return {cid: a(v) for cid, a in self.coeffs.items()}


@dataclass(frozen=True)
class ParamDecomp:
    """The decomposition of ``-K - vA`` on ``[0, tau]``."""

    curve: str
    intervals: tuple[Interval, ...]
    tau: Fraction
    monotonicity_violations: tuple[str, ...] = ()

    @property
    def breakpoints(self) -> tuple[Fraction, ...]:
        return (self.intervals[0].lo,) + tuple(i.hi for i in self.intervals)

    def interval_at(self, v) -> Interval:
        v = Fraction(v)
        if not 0 <= v <= self.tau:
            raise ValueError(f"v={v} outside [0, {self.tau}]")
        for iv in self.intervals:
            if v <= iv.hi:
                return iv
        return self.intervals[-1]

    def at(self, v) -> Decomposition:
        iv = self.interval_at(v)
        return Decomposition(iv.positive(v), {c: a for c, a in iv.negative(v).items() if a})

    def _piecewise(self, piece) -> PiecewiseFunc:
        return PiecewiseFunc.build(self.breakpoints, [piece(iv) for iv in self.intervals]).merged()

    def volume(self) -> PiecewiseFunc:
        def piece(iv: Interval):
            a, b = iv.p_const, iv.p_slope
            return (intersect(a, a), 2 * intersect(a, b), intersect(b, b))

        return self._piecewise(piece)

    def degree(self, cls: DivisorClass) -> PiecewiseFunc:
        return self._piecewise(lambda iv: (intersect(iv.p_const, cls), intersect(iv.p_slope, cls)))

    def coefficient(self, curve_id: str) -> PiecewiseFunc:
        zero = Affine(Fraction(0), Fraction(0))

        def piece(iv: Interval):
            a = iv.coeffs.get(curve_id, zero)
            return (a.const, a.slope)

        return self._piecewise(piece)


def _support(
    d0: DivisorClass,
    d1: DivisorClass,
    v0: Fraction,
    curves: Sequence[NegativeCurve],
) -> tuple[list[NegativeCurve], list[Affine], DivisorClass, DivisorClass]:
    """Bauer iteration for ``d0 + v d1`` on the germ at ``v0+``.

    Returns the support, its coefficients and ``P = p0 + v p1``.
    """
    active: list[NegativeCurve] = []
    coeffs: list[Affine] = []
    p0, p1 = d0, d1
    while True:
        new = [
            c
            for c in curves
            if c not in active
            and _germ_sign(intersect(p0, c.cls) + v0 * intersect(p1, c.cls), intersect(p1, c.cls)) < 0
        ]
        if not new:
            break
        active.extend(new)
        classes = [c.cls for c in active]
        if not is_negative_definite(classes):
            raise NotPseudoEffective(
                f"support {[c.id for c in active]} is not negative definite at v={v0}"
            )
        g = gram_matrix(classes)
        x0, x1 = solve(g, [[intersect(d0, c) for c in classes], [intersect(d1, c) for c in classes]])
        coeffs = [Affine(b, a) for a, b in zip(x0, x1)]
        for c, a in zip(active, coeffs):
            if _germ_sign(*a.germ(v0)) < 0:
                raise NotPseudoEffective(f"coefficient of {c.id} is negative at v={v0}")
        p0 = d0 - sum((c.cls * a.const for c, a in zip(active, coeffs)), DivisorClass.zero())
        p1 = d1 - sum((c.cls * a.slope for c, a in zip(active, coeffs)), DivisorClass.zero())
    sq = (intersect(p0, p0), 2 * intersect(p0, p1), intersect(p1, p1))
    value = sq[0] + v0 * (sq[1] + v0 * sq[2])
    slope = sq[1] + 2 * v0 * sq[2]
    if value < 0 or (value == 0 and (slope < 0 or (slope == 0 and sq[2] < 0))):
        raise NotPseudoEffective(f"positive part has negative square at v={v0}")
    return active, coeffs, p0, p1


def _resolve_curve(config: SurfaceConfig, curve) -> NegativeCurve:
    if isinstance(curve, NegativeCurve):
        return curve
    return config.curve(curve)


def is_nef(config: SurfaceConfig, d: DivisorClass) -> bool:
    """Nef against every negative curve of ``config`` (these span the cone of curves)."""
    return all(intersect(d, c.cls) >= 0 for c in config.curves)


def zariski_at(config: SurfaceConfig, d: DivisorClass) -> Decomposition:
    active, coeffs, p0, _ = _support(d, DivisorClass.zero(), Fraction(0), config.curves)
    return Decomposition(p0, {c.id: a.const for c, a in zip(active, coeffs) if a.const})


def _rational_root_after(q: tuple[Fraction, Fraction, Fraction], v0: Fraction) -> Fraction | None:
    """Smallest root ``> v0`` of ``q0 + q1 v + q2 v^2``; must be rational."""
    c, b, a = q
    if a == 0:
        if b == 0:
            return None
        r = -c / b
        return r if r > v0 else None
    disc = b * b - 4 * a * c
    if disc < 0:
        return None
    num, den = disc.numerator, disc.denominator
    rn, rd = math.isqrt(num), math.isqrt(den)
    if rn * rn != num or rd * rd != den:
        raise DecompositionError(f"irrational root of {q}: discriminant {disc}")
    s = Fraction(rn, rd)
    roots = sorted({(-b - s) / (2 * a), (-b + s) / (2 * a)})
    after = [r for r in roots if r > v0]
    return after[0] if after else None


def _sweep(config: SurfaceConfig, curve: NegativeCurve) -> ParamDecomp:
    d0 = anticanonical_class()
    d1 = -curve.cls
    v0 = Fraction(0)
    intervals: list[Interval] = []
    violations: list[str] = []
    for _ in range(4 * len(config.curves) + 8):
        active, coeffs, p0, p1 = _support(d0, d1, v0, config.curves)
        events = []
        for c in config.curves:
            if c in active:
                continue
            a, b = intersect(p0, c.cls), intersect(p1, c.cls)
            if b < 0:
                events.append(-a / b)
        for a in coeffs:
            if a.slope < 0:
                events.append(-a.const / a.slope)
        events = [e for e in events if e > v0]
        nxt = min(events) if events else None
        q = (intersect(p0, p0), 2 * intersect(p0, p1), intersect(p1, p1))
        sq_at = q[0] + nxt * (q[1] + nxt * q[2]) if nxt is not None else None
        # P^2 is positive on the germ at v0+, and the root of the volume
        # on this piece cannot come before a point where it is still positive
        if sq_at is not None and sq_at > 0:
            hi, done = nxt, False
        else:
            root = _rational_root_after(q, v0)
            if root is None:
                raise DecompositionError(f"sweep for {curve.id} stalled at v={v0}")
            hi, done = root, True
        ids = tuple(c.id for c in active)
        if intervals and not set(intervals[-1].active) <= set(ids):
            violations.append(
                f"support shrinks at v={v0}: {sorted(set(intervals[-1].active) - set(ids))} leave"
            )
        intervals.append(
            Interval(v0, hi, ids, {c.id: a for c, a in zip(active, coeffs)}, p0, p1)
        )
        if done:
            return ParamDecomp(curve.id, tuple(intervals), hi, tuple(violations))
        v0 = hi
    raise DecompositionError(f"sweep for {curve.id} did not terminate")


def param_zariski(config: SurfaceConfig, curve) -> ParamDecomp:
    """Decomposition of ``-K - vA`` for ``v`` in ``[0, tau(A)]``, memoised per config."""
    c = _resolve_curve(config, curve)
    return config.memo(("param_zariski", c.id), lambda: _sweep(config, c))


def tau(config: SurfaceConfig, curve) -> Fraction:
    return param_zariski(config, curve).tau


def volume_function(config: SurfaceConfig, curve) -> PiecewiseFunc:
    """``v -> P(v)^2`` on ``[0, tau]``."""
    return param_zariski(config, curve).volume()


def degree_function(config: SurfaceConfig, curve, against=None) -> PiecewiseFunc:
    """``v -> P(v).B`` on ``[0, tau]``; ``B`` defaults to ``A`` itself."""
    a = _resolve_curve(config, curve)
    b = a if against is None else _resolve_curve(config, against)
    return param_zariski(config, a).degree(b.cls)
