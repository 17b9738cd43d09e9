"""Piecewise polynomials of degree <= 2 with exact rational data."""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

Poly = tuple[Fraction, Fraction, Fraction]  # c0 + c1 v + c2 v^2


class DomainError(ValueError):
    pass


def _poly(coeffs: Iterable) -> Poly:
    c = [Fraction(x) for x in coeffs]
    if len(c) > 3:
        if any(c[3:]):
            raise ValueError(f"degree > 2 polynomial {c}")
        c = c[:3]
    c += [Fraction(0)] * (3 - len(c))
    return (c[0], c[1], c[2])


def poly_eval(p: Poly, v: Fraction) -> Fraction:
    return p[0] + v * (p[1] + v * p[2])


def poly_antiderivative(p: Poly, v: Fraction) -> Fraction:
    return v * (p[0] + v * (p[1] / 2 + v * p[2] / 3))


def poly_mul(p: Poly, q: Poly) -> Poly:
    out = [Fraction(0)] * 5
    for i, a in enumerate(p):
        for j, b in enumerate(q):
            out[i + j] += a * b
    return _poly(out)


def affine(slope, const) -> Poly:
    return _poly((const, slope))


@dataclass(frozen=True)
class PiecewiseFunc:
    """``v -> pieces[i](v)`` on ``[breakpoints[i], breakpoints[i+1]]``.

    Continuity at interior breakpoints is checked on construction unless
    ``check=False`` is passed through :meth:`build`.
    """

    breakpoints: tuple[Fraction, ...]
    pieces: tuple[Poly, ...]

    def __post_init__(self):
        bps = tuple(Fraction(b) for b in self.breakpoints)
        pcs = tuple(_poly(p) for p in self.pieces)
        if len(bps) < 2 or len(pcs) != len(bps) - 1:
            raise ValueError("need k+1 breakpoints for k pieces")
        if any(a >= b for a, b in zip(bps, bps[1:])):
            raise ValueError(f"breakpoints must be strictly increasing: {bps}")
        object.__setattr__(self, "breakpoints", bps)
        object.__setattr__(self, "pieces", pcs)

    @classmethod
    def build(cls, breakpoints: Sequence, pieces: Sequence, check: bool = True) -> "PiecewiseFunc":
        f = cls(tuple(breakpoints), tuple(pieces))
        if check and not f.is_continuous():
            raise ValueError(f"discontinuous piecewise function: {f}")
        return f

    @classmethod
    def constant(cls, value, lo, hi) -> "PiecewiseFunc":
        return cls((lo, hi), ((value,),))

    @property
    def domain(self) -> tuple[Fraction, Fraction]:
        return self.breakpoints[0], self.breakpoints[-1]

    def is_continuous(self) -> bool:
        for i, b in enumerate(self.breakpoints[1:-1]):
            if poly_eval(self.pieces[i], b) != poly_eval(self.pieces[i + 1], b):
                return False
        return True

    def _index(self, v: Fraction) -> int:
        lo, hi = self.domain
        if v < lo or v > hi:
            raise DomainError(f"{v} outside [{lo}, {hi}]")
        for i in range(len(self.pieces)):
            if v <= self.breakpoints[i + 1]:
                return i
        return len(self.pieces) - 1

    def __call__(self, v) -> Fraction:
        v = Fraction(v)
        return poly_eval(self.pieces[self._index(v)], v)

    def refine(self, points: Iterable) -> "PiecewiseFunc":
        lo, hi = self.domain
        bps = sorted(set(self.breakpoints) | {Fraction(p) for p in points if lo < Fraction(p) < hi})
        pcs = [self.pieces[self._index((a + b) / 2)] for a, b in zip(bps, bps[1:])]
        return PiecewiseFunc(tuple(bps), tuple(pcs))

    def merged(self) -> "PiecewiseFunc":
        """Drop breakpoints between identical pieces (canonical form)."""
        bps = [self.breakpoints[0]]
        pcs: list[Poly] = []
        for p, b in zip(self.pieces, self.breakpoints[1:]):
            if pcs and pcs[-1] == p:
                bps[-1] = b
            else:
                pcs.append(p)
                bps.append(b)
        return PiecewiseFunc(tuple(bps), tuple(pcs))

    def _combine(self, other: "PiecewiseFunc", op) -> "PiecewiseFunc":
        if self.domain != other.domain:
            raise DomainError(f"domains differ: {self.domain} vs {other.domain}")
        a = self.refine(other.breakpoints)
        b = other.refine(self.breakpoints)
        return PiecewiseFunc(a.breakpoints, tuple(op(p, q) for p, q in zip(a.pieces, b.pieces)))

    def __add__(self, other: "PiecewiseFunc") -> "PiecewiseFunc":
        return self._combine(other, lambda p, q: _poly(x + y for x, y in zip(p, q)))

    def __mul__(self, other) -> "PiecewiseFunc":
        if isinstance(other, PiecewiseFunc):
            return self._combine(other, poly_mul)
        s = Fraction(other)
        return PiecewiseFunc(self.breakpoints, tuple(_poly(s * c for c in p) for p in self.pieces))

    __rmul__ = __mul__

    def equals(self, other: "PiecewiseFunc") -> bool:
        """Equality as functions on the same domain."""
        if self.domain != other.domain:
            return False
        a = self.refine(other.breakpoints)
        b = other.refine(self.breakpoints)
        return a.pieces == b.pieces

    def __str__(self) -> str:
        parts = []
        for (a, b), p in zip(zip(self.breakpoints, self.breakpoints[1:]), self.pieces):
            parts.append(f"[{a}, {b}]: {format_poly(p)}")
        return "; ".join(parts)


def format_poly(p: Poly, var: str = "v") -> str:
    terms = []
    for k, c in enumerate(p):
        if c == 0:
            continue
        mono = "" if k == 0 else (var if k == 1 else f"{var}^{k}")
        if k and abs(c) == 1:
            body = mono
        else:
            body = f"{abs(c)}{'*' + mono if mono else ''}"
        terms.append(("-" if c < 0 else "+", body))
    if not terms:
        return "0"
    sign, body = terms[0]
    out = ("-" if sign == "-" else "") + body
    for sign, body in terms[1:]:
        out += f" {sign} {body}"
    return out


def integrate(f: PiecewiseFunc, a, b) -> Fraction:
    """Exact definite integral of ``f`` over ``[a, b]``."""
    a, b = Fraction(a), Fraction(b)
    lo, hi = f.domain
    if a < lo or b > hi or a > b:
        raise DomainError(f"[{a}, {b}] not within [{lo}, {hi}]")
    total = Fraction(0)
    for (l, r), p in zip(zip(f.breakpoints, f.breakpoints[1:]), f.pieces):
        l, r = max(l, a), min(r, b)
        if l < r:
            total += poly_antiderivative(p, r) - poly_antiderivative(p, l)
    return total
