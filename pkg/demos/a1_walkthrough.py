"""A cubic surface with one node, from lines to delta.

Run with ``python3 demos/a1_walkthrough.py``.
"""
from fractions import Fraction

from dp3delta import global_delta, load_builtin, param_zariski
from dp3delta.config import strata
from dp3delta.delta import delta_bounds, s_curve, s_flag

surface = load_builtin("A1")
print(surface.name, surface.singularities)
print(len(surface.lines), "lines,", len(surface.minus_two), "(-2)-curve")

# the exceptional curve E of the node, and the six lines through the node
E = surface.curve("E")
through_node = [l.id for l in surface.lines if l.cls.dot(E.cls) > 0]
print("lines meeting E:", through_node)

# decompose -K - vE for v from 0 up to the pseudo-effective threshold
pz = param_zariski(surface, "E")
print("tau =", pz.tau)
for iv in pz.intervals:
    neg = ", ".join(f"{cid}: {a}" for cid, a in iv.coeffs.items()) or "nothing"
    print(f"  v in [{iv.lo}, {iv.hi}]  negative part on {neg}")
print("P(v)^2 =", pz.volume())
print("P(v).E =", pz.degree(E.cls))

S = s_curve("E", surface)
print("S(E) =", S, " so delta <= 1/S =", 1 / S, "at every point of E")

# the flag functional at a point of E that lies on a line
point = next(s for s in strata(surface) if "E" in s.curves_through and len(s.curves_through) == 2)
print(point.label, "flag S =", s_flag("E", point, surface))
b = delta_bounds(point, surface)
print(f"{point.label}: delta in [{b.lower}, {b.upper}]", "(exact)" if b.exact else "")

cert = global_delta(surface)
print("delta(A1) =", cert.value, "exact" if cert.exact else "interval")
assert cert.value == Fraction(6, 5)
