"""Local and global delta-invariant bounds from the flag estimate.

For a point ``p`` on a negative curve ``A``::

    delta_p >= min(1 / S(A), 1 / S(W^A; p)),      delta_p <= 1 / S(A)

with ``S(A) = (1/3) int_0^tau P(v)^2 dv`` and
``S(W^A; p) = (2/3) int_0^tau h(v) dv``, where
``h = (P.A) (N.A)_p + (P.A)^2 / 2``.  All log discrepancies are 1 since
every divisor involved is a curve on the smooth resolution.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping, Sequence

from .config import (
    CurveKind,
    PointStratum,
    StratumKind,
    SurfaceConfig,
    strata,
)
from .lattice import intersect
from .piecewise import PiecewiseFunc, integrate
from .zariski import param_zariski

INFINITY = math.inf

# Lower bound at points off every (-2)-curve and off every line that meets
# one; it comes from the smooth cubic case and is not recomputed here.
GENERAL_POINT_BOUND = Fraction(3, 2)


class StratumError(ValueError):
    pass


def _curve_id(curve) -> str:
    return curve if isinstance(curve, str) else curve.id


def s_curve(curve, config: SurfaceConfig) -> Fraction:
    cid = _curve_id(curve)

    def compute():
        pz = param_zariski(config, cid)
        return integrate(pz.volume(), 0, pz.tau) / 3

    return config.memo(("s_curve", cid), compute)


def _check_on(cid: str, stratum: PointStratum) -> None:
    if cid not in stratum.curves_through:
        raise StratumError(f"stratum {stratum.label} does not lie on {cid}")


def local_n_degree(curve, stratum: PointStratum, config: SurfaceConfig) -> PiecewiseFunc:
    """``v -> (N(v).A)_p``, the part of ``N(v).A`` concentrated at the stratum's point."""
    cid = _curve_id(curve)
    _check_on(cid, stratum)
    pz = param_zariski(config, cid)
    total = PiecewiseFunc.constant(0, 0, pz.tau)
    if stratum.kind is not StratumKind.AT_POINT:
        return total
    point = config.point(stratum.ref)
    m_a = point.multiplicity(cid)
    for other, m in point.on_curves:
        if other != cid:
            total = total + pz.coefficient(other) * (m * m_a)
    return total.merged()


def h_function(curve, stratum: PointStratum, config: SurfaceConfig) -> PiecewiseFunc:
    cid = _curve_id(curve)
    pa = param_zariski(config, cid).degree(config.curve(cid).cls)
    return (pa * local_n_degree(cid, stratum, config) + pa * pa * Fraction(1, 2)).merged()


def s_flag(curve, stratum: PointStratum, config: SurfaceConfig) -> Fraction:
    cid = _curve_id(curve)
    key = ("s_flag", cid, stratum)

    def compute():
        h = h_function(cid, stratum, config)
        return Fraction(2, 3) * integrate(h, *h.domain)

    return config.memo(key, compute)


@dataclass(frozen=True)
class DeltaBound:
    stratum: PointStratum
    lower: Fraction
    upper: Fraction | float
    witness_curve: str | None
    exact: bool
    lower_source: str = "computed"

    def __post_init__(self):
        if self.lower > self.upper:
            raise ValueError(f"lower {self.lower} exceeds upper {self.upper} on {self.stratum.label}")
        if self.exact and (self.lower != self.upper or self.witness_curve is None):
            raise ValueError("an exact bound needs lower == upper and a witness curve")

    @property
    def value(self) -> Fraction | None:
        return self.lower if self.exact else None


def _near_singular(stratum: PointStratum, config: SurfaceConfig) -> bool:
    """Does the stratum touch a (-2)-curve or a line meeting one?"""
    roots = config.minus_two
    for cid in stratum.curves_through:
        c = config.curve(cid)
        if c.kind is CurveKind.MINUS_TWO:
            return True
        if any(intersect(c.cls, r.cls) > 0 for r in roots):
            return True
    return False


def delta_bounds(stratum: PointStratum, config: SurfaceConfig) -> DeltaBound:
    if stratum.kind is StratumKind.SURFACE_GENERIC:
        return DeltaBound(stratum, GENERAL_POINT_BOUND, INFINITY, None, False, "imported")
    upper: Fraction | float = INFINITY
    witness = None
    lower = Fraction(0)
    source = "computed"
    for cid in stratum.curves_through:
        inv_s = 1 / s_curve(cid, config)
        if inv_s < upper:
            upper, witness = inv_s, cid
        candidate = min(inv_s, 1 / s_flag(cid, stratum, config))
        if candidate > lower:
            lower = candidate
            source = f"flag on {cid}"
    if lower < GENERAL_POINT_BOUND <= upper and not _near_singular(stratum, config):
        lower, source = GENERAL_POINT_BOUND, "imported"
    return DeltaBound(stratum, lower, upper, witness, lower == upper, source)


@dataclass(frozen=True)
class DeltaCertificate:
    config_name: str
    bounds: tuple[DeltaBound, ...]
    lower: Fraction
    upper: Fraction | float
    attaining_strata: tuple[PointStratum, ...]
    witness_curve: str | None = None
    exact: bool = field(default=False)

    @property
    def value(self) -> Fraction | None:
        return self.lower if self.exact else None

    def interval(self) -> tuple[Fraction, Fraction | float]:
        return self.lower, self.upper


def global_delta(config: SurfaceConfig) -> DeltaCertificate:
    def compute():
        bounds = tuple(delta_bounds(s, config) for s in strata(config))
        lo = min(b.lower for b in bounds)
        hi = min(b.upper for b in bounds)
        attaining = [b for b in bounds if b.lower == lo]
        exact = all(b.exact for b in attaining)
        witness = next((b.witness_curve for b in attaining if b.exact), None)
        return DeltaCertificate(
            config.name,
            bounds,
            lo,
            hi,
            tuple(b.stratum for b in attaining),
            witness,
            exact,
        )

    return config.memo(("global_delta",), compute)


# --- lemma verification ---------------------------------------------------


@dataclass(frozen=True)
class Mismatch:
    field: str
    expected: str
    actual: str


@dataclass(frozen=True)
class LemmaReport:
    config: str
    curve: str
    mismatches: tuple[Mismatch, ...]

    @property
    def ok(self) -> bool:
        return not self.mismatches


def _pieces_to_func(pieces: Sequence[tuple]) -> PiecewiseFunc:
    for left, right in zip(pieces, pieces[1:]):
        if Fraction(left[1]) != Fraction(right[0]):
            raise ValueError(f"pieces do not meet: {left[1]} vs {right[0]}")
    bps = [Fraction(pieces[0][0])] + [Fraction(p[1]) for p in pieces]
    return PiecewiseFunc.build(bps, [p[2] for p in pieces], check=False)


def verify_lemma(config: SurfaceConfig, curve, expected: Mapping) -> LemmaReport:
    """Compare the computed data for ``-K - vA`` with transcribed values.

    ``expected`` may hold ``tau``, ``volume`` and ``degree`` (lists of
    ``(lo, hi, (c0, c1, c2))``) and ``s_value``; absent keys are skipped.
    """
    cid = _curve_id(curve)
    out: list[Mismatch] = []
    try:
        pz = param_zariski(config, cid)
    except Exception as exc:  # the report must not raise
        return LemmaReport(config.name, cid, (Mismatch("decomposition", "success", repr(exc)),))
    if "tau" in expected and Fraction(expected["tau"]) != pz.tau:
        out.append(Mismatch("tau", str(Fraction(expected["tau"])), str(pz.tau)))
    for key, actual in (("volume", pz.volume()), ("degree", pz.degree(config.curve(cid).cls))):
        if key not in expected:
            continue
        try:
            want = _pieces_to_func(expected[key])
        except (ValueError, IndexError) as exc:
            out.append(Mismatch(key, f"malformed: {exc}", str(actual)))
            continue
        if not want.equals(actual):
            out.append(Mismatch(key, str(want), str(actual)))
    if "s_value" in expected:
        s = integrate(pz.volume(), 0, pz.tau) / 3
        if Fraction(expected["s_value"]) != s:
            out.append(Mismatch("s_value", str(Fraction(expected["s_value"])), str(s)))
    return LemmaReport(config.name, cid, tuple(out))
