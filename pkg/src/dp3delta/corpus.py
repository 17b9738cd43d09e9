"""Reference data: per-curve decomposition records and per-stratum tables.

Each record fixes ``tau``, the pieces of ``P(v)^2`` and ``P(v).A`` and
``S(A)`` for one curve role, together with the built-in curves that play
that role.  The stratum tables assign a delta value (exact, or a lower
bound) to every point of a surface by the first row whose curves the point
lies on.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, replace
from fractions import Fraction
from functools import lru_cache
from importlib import resources
from typing import Sequence

import numpy as np

from .config import CurveKind, PointStratum, StratumKind, SurfaceConfig, load_builtin, strata
from .delta import DeltaBound, LemmaReport, Mismatch, delta_bounds, h_function, verify_lemma
from .piecewise import PiecewiseFunc
from .zariski import param_zariski

Piece = tuple[Fraction, Fraction, tuple[Fraction, ...]]


def _data(name: str) -> str:
    return (resources.files("dp3delta") / "data" / name).read_text("utf-8")


def _pieces(raw) -> tuple[Piece, ...]:
    return tuple((Fraction(a), Fraction(b), tuple(Fraction(c) for c in p)) for a, b, p in raw)


@dataclass(frozen=True)
class LemmaRecord:
    key: str
    curve_kind: CurveKind
    delta: Fraction
    tau: Fraction
    volume: tuple[Piece, ...]
    degree: tuple[Piece, ...]
    s_value: Fraction
    instances: tuple[tuple[str, str], ...]

    @property
    def caption(self) -> str:
        kind = "(-1)-curve" if self.curve_kind is CurveKind.MINUS_ONE else "(-2)-curve"
        return f"{kind} with tau = {self.tau}, S = {self.s_value}, delta = {self.delta}"

    def expected(self) -> dict:
        return {
            "tau": self.tau,
            "volume": list(self.volume),
            "degree": list(self.degree),
            "s_value": self.s_value,
        }

    def perturbed(self, field_name: str, delta=Fraction(1, 7)) -> "LemmaRecord":
        """Copy with one expected constant shifted (for negative controls)."""
        if field_name in ("tau", "s_value", "delta"):
            return replace(self, **{field_name: getattr(self, field_name) + delta})
        pieces = list(getattr(self, field_name))
        lo, hi, poly = pieces[0]
        pieces[0] = (lo, hi, (poly[0] + delta,) + tuple(poly[1:]))
        return replace(self, **{field_name: tuple(pieces)})


@lru_cache(maxsize=1)
def load_lemmas() -> tuple[LemmaRecord, ...]:
    out = []
    for e in json.loads(_data("lemmas.json")):
        out.append(
            LemmaRecord(
                key=e["key"],
                curve_kind=CurveKind(e["curve_kind"]),
                delta=Fraction(e["delta"]),
                tau=Fraction(e["tau"]),
                volume=_pieces(e["volume"]),
                degree=_pieces(e["degree"]),
                s_value=Fraction(e["s_value"]),
                instances=tuple((c, k) for c, k in e["instances"]),
            )
        )
    return tuple(out)


def lemma(key: str) -> LemmaRecord:
    for rec in load_lemmas():
        if rec.key == key:
            return rec
    raise KeyError(key)


def check_lemma(rec: LemmaRecord, configs: dict[str, SurfaceConfig] | None = None) -> list[LemmaReport]:
    """Run ``verify_lemma`` on every instance, plus the record's own delta = 1/S."""
    reports = []
    for cname, cid in rec.instances:
        config = configs[cname] if configs else load_builtin(cname)
        rep = verify_lemma(config, cid, rec.expected())
        if rec.delta * rec.s_value != 1:
            bad = Mismatch("delta", str(rec.delta), str(1 / rec.s_value))
            rep = LemmaReport(rep.config, rep.curve, rep.mismatches + (bad,))
        if config.curve(cid).kind is not rec.curve_kind:
            bad = Mismatch("curve_kind", rec.curve_kind.value, config.curve(cid).kind.value)
            rep = LemmaReport(rep.config, rep.curve, rep.mismatches + (bad,))
        reports.append(rep)
    return reports


# --- stratum tables -------------------------------------------------------


@dataclass(frozen=True)
class TableRow:
    on: tuple[str, ...] | None  # None: every remaining point
    off: tuple[str, ...]
    value: Fraction
    exact: bool

    @property
    def label(self) -> str:
        if self.on is None:
            return "o/w"
        head = ", ".join(self.on)
        return f"{head} \\ {', '.join(self.off)}" if self.off else head

    def matches(self, stratum: PointStratum) -> bool:
        through = set(stratum.curves_through)
        if through & set(self.off):
            return False
        return self.on is None or bool(through & set(self.on))


@lru_cache(maxsize=1)
def stratum_tables() -> dict[str, tuple[TableRow, ...]]:
    raw = json.loads(_data("stratum_tables.json"))
    return {
        name: tuple(
            TableRow(
                tuple(r["on"]) if r["on"] is not None else None,
                tuple(r["off"]),
                Fraction(r["value"]),
                r["kind"] == "exact",
            )
            for r in rows
        )
        for name, rows in raw.items()
    }


@dataclass(frozen=True)
class RowCheck:
    row: TableRow
    strata: tuple[DeltaBound, ...]
    failures: tuple[str, ...]

    @property
    def ok(self) -> bool:
        return bool(self.strata) and not self.failures


def check_stratum_table(config: SurfaceConfig, rows: Sequence[TableRow]) -> list[RowCheck]:
    """Assign each stratum to its first matching row and compare the bound.

    An exact row needs an exact bound with that value; a lower-bound row
    needs a certified lower bound at least the value.  A row that catches
    no stratum, or a stratum no row catches, counts as a failure.
    """
    ids = set(config.curve_ids)
    buckets: list[list[DeltaBound]] = [[] for _ in rows]
    orphans = []
    for s in strata(config):
        b = delta_bounds(s, config)
        for i, row in enumerate(rows):
            if row.matches(s):
                buckets[i].append(b)
                break
        else:
            orphans.append(s.label)
    out = []
    for row, bs in zip(rows, buckets):
        fails = [f"unknown curve {c}" for c in (row.on or ()) + row.off if c not in ids]
        for b in bs:
            if row.exact and not (b.exact and b.lower == row.value):
                fails.append(f"{b.stratum.label}: [{b.lower}, {b.upper}] is not exactly {row.value}")
            if not row.exact and b.lower < row.value:
                fails.append(f"{b.stratum.label}: lower bound {b.lower} < {row.value}")
        if not bs:
            fails.append("no stratum falls in this row")
        out.append(RowCheck(row, tuple(bs), tuple(fails)))
    if orphans:
        last = out[-1]
        out[-1] = RowCheck(last.row, last.strata, last.failures + tuple(f"unassigned: {o}" for o in orphans))
    return out


# --- numeric quadrature oracle --------------------------------------------


def sample(f: PiecewiseFunc, x: np.ndarray) -> np.ndarray:
    """Evaluate ``f`` in double precision at the nodes ``x``."""
    bps = np.array([float(b) for b in f.breakpoints])
    idx = np.clip(np.searchsorted(bps, x, side="left") - 1, 0, len(f.pieces) - 1)
    coeffs = np.array([[float(c) for c in p] for p in f.pieces])
    c = coeffs[idx]
    return c[:, 0] + x * (c[:, 1] + x * c[:, 2])


def trapezoid(f: PiecewiseFunc, nodes: int = 10_000) -> float:
    lo, hi = f.domain
    x = np.linspace(float(lo), float(hi), nodes)
    return float(np.trapezoid(sample(f, x), x))


def numeric_s(config: SurfaceConfig, curve: str, nodes: int = 10_000) -> float:
    return trapezoid(param_zariski(config, curve).volume(), nodes) / 3


def numeric_s_flag(config: SurfaceConfig, curve: str, stratum: PointStratum, nodes: int = 10_000) -> float:
    return 2 * trapezoid(h_function(curve, stratum, config), nodes) / 3


def curve_strata(config: SurfaceConfig, curve: str) -> list[PointStratum]:
    return [s for s in strata(config) if s.kind is not StratumKind.SURFACE_GENERIC and curve in s.curves_through]
