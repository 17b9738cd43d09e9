"""Randomised self-checks of the parametric Zariski decompositions."""
from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction

from .config import SurfaceConfig
from .lattice import anticanonical_class, intersect, is_negative_definite
from .zariski import Interval, param_zariski, zariski_at


def random_rational(rng: random.Random, lo: Fraction, hi: Fraction, den: int = 997) -> Fraction:
    """A rational in the closed interval ``[lo, hi]`` with a random numerator."""
    return lo + (hi - lo) * Fraction(rng.randint(0, den), den)


@dataclass(frozen=True)
class SuiteResult:
    config: str
    curve: str
    samples: int
    violations: tuple[str, ...]

    @property
    def ok(self) -> bool:
        return not self.violations


def _check_point(config: SurfaceConfig, curve: str, iv: Interval, v: Fraction, degrees) -> list[str]:
    # P(v).C is affine on an interval: degrees[C] = (P0.C, P1.C)
    out = []
    p = iv.positive(v)
    neg = iv.negative(v)
    target = anticanonical_class() - config.curve(curve).cls * v
    total = p
    for cid, a in neg.items():
        total = total + config.curve(cid).cls * a
        if a < 0:
            out.append(f"v={v}: coefficient of {cid} is {a} < 0")
    if total != target:
        out.append(f"v={v}: P + N != -K - vA")
    for c in config.curves:
        d0, d1 = degrees[c.id]
        d = d0 + v * d1
        if c.id in iv.active and d != 0:
            out.append(f"v={v}: P.{c.id} = {d} on the support")
        if d < 0:
            out.append(f"v={v}: P.{c.id} = {d} < 0, P is not nef")
    return out


def zariski_suite(config: SurfaceConfig, curve: str, per_interval: int = 50, seed: int = 0) -> SuiteResult:
    """Properties of ``-K - vA = P + N`` at random rational ``v`` on every interval.

    Checks orthogonality on the support, nefness, negative definiteness of
    the support, the exact identity ``D = P + N``, continuity of ``P`` and
    ``N`` at breakpoints and that ``P(v)^2`` does not increase.
    """
    rng = random.Random(f"{seed}:{config.name}:{curve}")
    pz = param_zariski(config, curve)
    out: list[str] = []
    n = 0
    for iv in pz.intervals:
        if iv.active and not is_negative_definite([config.curve(c).cls for c in iv.active]):
            out.append(f"[{iv.lo}, {iv.hi}]: support {iv.active} is not negative definite")
        vs = sorted(random_rational(rng, iv.lo, iv.hi) for _ in range(per_interval))
        vol = [intersect(iv.positive(v), iv.positive(v)) for v in vs]
        degrees = {c.id: (intersect(iv.p_const, c.cls), intersect(iv.p_slope, c.cls)) for c in config.curves}
        for v in vs:
            out += _check_point(config, curve, iv, v, degrees)
            n += 1
        if any(b > a for a, b in zip(vol, vol[1:])):
            out.append(f"[{iv.lo}, {iv.hi}]: P(v)^2 increases")
        slope_lo = 2 * intersect(iv.p_const, iv.p_slope) + 2 * iv.lo * intersect(iv.p_slope, iv.p_slope)
        slope_hi = 2 * intersect(iv.p_const, iv.p_slope) + 2 * iv.hi * intersect(iv.p_slope, iv.p_slope)
        if slope_lo > 0 or slope_hi > 0:
            out.append(f"[{iv.lo}, {iv.hi}]: d/dv P(v)^2 > 0 somewhere")
    for left, right in zip(pz.intervals, pz.intervals[1:]):
        b = left.hi
        if left.positive(b) != right.positive(b):
            out.append(f"P jumps at v={b}")
        ln, rn = left.negative(b), right.negative(b)
        for cid in set(ln) | set(rn):
            if ln.get(cid, 0) != rn.get(cid, 0):
                out.append(f"coefficient of {cid} jumps at v={b}")
    return SuiteResult(config.name, curve, n, tuple(out))


def pointwise_agreement(config: SurfaceConfig, curve: str, v: Fraction) -> list[str]:
    """Compare the pointwise algorithm with the parametric one at ``v``."""
    pz = param_zariski(config, curve)
    want = pz.at(v)
    got = zariski_at(config, anticanonical_class() - config.curve(curve).cls * v)
    out = []
    if got.positive != want.positive:
        out.append(f"{config.name}/{curve} v={v}: positive parts differ")
    if got.negative != want.negative:
        out.append(f"{config.name}/{curve} v={v}: {got.negative} != {want.negative}")
    return out


def random_agreement(configs, trials: int = 1000, seed: int = 0) -> tuple[int, list[str]]:
    rng = random.Random(seed)
    pairs = [(c, k.id) for c in configs for k in c.curves]
    out: list[str] = []
    for _ in range(trials):
        config, cid = pairs[rng.randrange(len(pairs))]
        t = param_zariski(config, cid).tau
        v = random_rational(rng, Fraction(0), t)
        out += pointwise_agreement(config, cid, v)
    return trials, out
