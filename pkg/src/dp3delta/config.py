"""Surface configurations: negative curves, incidences and point strata.

A configuration is the combinatorial shadow of the minimal resolution ``S`` of
a Du Val cubic surface: its (-2)-curves (simple roots of the singularity's
root system inside ``K^perp``), its (-1)-curves (lines) and the points where
these curves meet.
"""
from __future__ import annotations

import json
import re
import threading
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from importlib import resources
from itertools import combinations
from typing import Iterable, Sequence

import networkx as nx

from .lattice import (
    DivisorClass,
    canonical_class,
    exceptional_classes,
    intersect,
    is_positive_root,
    is_root,
    positive_roots,
)


class ValidationError(ValueError):
    pass


class ConfigParseError(ValueError):
    def __init__(self, msg: str, line: int = 0, column: int = 0):
        super().__init__(f"line {line}, column {column}: {msg}" if line else msg)
        self.line = line
        self.column = column


class CurveKind(str, Enum):
    MINUS_ONE = "MinusOne"
    MINUS_TWO = "MinusTwo"


@dataclass(frozen=True)
class NegativeCurve:
    id: str
    cls: DivisorClass
    kind: CurveKind

    def __post_init__(self):
        sq = intersect(self.cls, self.cls)
        kd = intersect(self.cls, canonical_class())
        expected = {CurveKind.MINUS_ONE: (-1, -1), CurveKind.MINUS_TWO: (-2, 0)}[self.kind]
        if (sq, kd) != expected:
            raise ValidationError(
                f"curve {self.id} {self.cls}: C^2={sq}, C.K={kd} does not fit kind {self.kind.value}"
            )

    @classmethod
    def classify(cls, id: str, c: DivisorClass) -> "NegativeCurve":
        sq = intersect(c, c)
        kd = intersect(c, canonical_class())
        if (sq, kd) == (-1, -1):
            return cls(id, c, CurveKind.MINUS_ONE)
        if (sq, kd) == (-2, 0):
            return cls(id, c, CurveKind.MINUS_TWO)
        raise ValidationError(f"curve {id} {c} is neither a (-1)- nor a (-2)-class (C^2={sq}, C.K={kd})")


@dataclass(frozen=True)
class PointIncidence:
    id: str
    on_curves: tuple[tuple[str, int], ...]

    @property
    def curve_ids(self) -> tuple[str, ...]:
        return tuple(c for c, _ in self.on_curves)

    def multiplicity(self, curve_id: str) -> int:
        return dict(self.on_curves).get(curve_id, 0)


@dataclass(frozen=True)
class Expected:
    lines: int
    delta: Fraction


class StratumKind(str, Enum):
    AT_POINT = "AtPoint"
    CURVE_GENERIC = "CurveGeneric"
    SURFACE_GENERIC = "SurfaceGeneric"


@dataclass(frozen=True)
class PointStratum:
    kind: StratumKind
    ref: str | None
    curves_through: tuple[str, ...]

    @property
    def label(self) -> str:
        if self.kind is StratumKind.SURFACE_GENERIC:
            return "o/w"
        if self.kind is StratumKind.CURVE_GENERIC:
            return f"{self.ref} (generic)"
        return " ∩ ".join(self.curves_through)


# name -> (singularity label, #lines, delta); the cubic-surface table.
REFERENCE_TABLE: dict[str, tuple[str, int, Fraction]] = {
    "A1": ("A1", 21, Fraction(6, 5)),
    "2A1": ("2A1", 16, Fraction(6, 5)),
    "3A1": ("3A1", 12, Fraction(6, 5)),
    "4A1": ("4A1", 9, Fraction(6, 5)),
    "A2": ("A2", 15, Fraction(1)),
    "A2A1": ("A2+A1", 11, Fraction(1)),
    "A22A1": ("A2+2A1", 8, Fraction(1)),
    "2A2": ("2A2", 7, Fraction(1)),
    "2A2A1": ("2A2+A1", 5, Fraction(1)),
    "3A2": ("3A2", 3, Fraction(1)),
    "A3": ("A3", 10, Fraction(9, 11)),
    "A3A1": ("A3+A1", 7, Fraction(9, 11)),
    "A32A1": ("A3+2A1", 5, Fraction(9, 11)),
    "A4": ("A4", 6, Fraction(9, 13)),
    "A4A1": ("A4+A1", 4, Fraction(9, 13)),
    "A5": ("A5", 3, Fraction(3, 5)),
    "A5A1": ("A5+A1", 2, Fraction(3, 5)),
    "D4": ("D4", 6, Fraction(3, 5)),
    "D5": ("D5", 3, Fraction(9, 19)),
    "E6": ("E6", 1, Fraction(1, 3)),
}

BUILTIN_NAMES: tuple[str, ...] = tuple(REFERENCE_TABLE)


@dataclass(frozen=True)
class SurfaceConfig:
    name: str
    singularities: str
    curves: tuple[NegativeCurve, ...]
    points: tuple[PointIncidence, ...]
    expected: Expected | None = None
    notes: tuple[str, ...] = ()
    _cache: dict = field(default_factory=dict, compare=False, hash=False, repr=False)
    _lock: threading.Lock = field(default_factory=threading.Lock, compare=False, hash=False, repr=False)

    def curve(self, curve_id: str) -> NegativeCurve:
        for c in self.curves:
            if c.id == curve_id:
                return c
        raise KeyError(f"no curve {curve_id!r} in configuration {self.name}")

    def point(self, point_id: str) -> PointIncidence:
        for p in self.points:
            if p.id == point_id:
                return p
        raise KeyError(f"no point {point_id!r} in configuration {self.name}")

    @property
    def curve_ids(self) -> tuple[str, ...]:
        return tuple(c.id for c in self.curves)

    @property
    def minus_two(self) -> tuple[NegativeCurve, ...]:
        return tuple(c for c in self.curves if c.kind is CurveKind.MINUS_TWO)

    @property
    def lines(self) -> tuple[NegativeCurve, ...]:
        return tuple(c for c in self.curves if c.kind is CurveKind.MINUS_ONE)

    def memo(self, key, compute):
        """Per-configuration memo for pure derived data.

        The value is computed outside the lock (computations nest), so two
        threads may race to compute it; the first result stored wins.
        """
        try:
            return self._cache[key]
        except KeyError:
            pass
        value = compute()
        with self._lock:
            return self._cache.setdefault(key, value)


# --- singularity labels and Dynkin diagrams -------------------------------

_TERM = re.compile(r"^(\d*)([ADE])(\d+)$")


def parse_singularities(label: str) -> list[tuple[str, int]]:
    """``"2A2+A1"`` -> ``[("A", 2), ("A", 2), ("A", 1)]``; ``""`` is smooth."""
    out: list[tuple[str, int]] = []
    label = label.replace(" ", "")
    if not label:
        return out
    for term in label.split("+"):
        m = _TERM.match(term)
        if not m:
            raise ValidationError(f"bad singularity term {term!r} in {label!r}")
        count = int(m.group(1) or 1)
        out.extend([(m.group(2), int(m.group(3)))] * count)
    return out


def dynkin_graph(label: str) -> nx.Graph:
    g = nx.Graph()
    for k, (letter, n) in enumerate(parse_singularities(label)):
        nodes = [(k, i) for i in range(n)]
        g.add_nodes_from(nodes)
        if letter == "A":
            g.add_edges_from(zip(nodes, nodes[1:]))
        elif letter == "D":
            if n < 4:
                raise ValidationError(f"D{n} is not a Dynkin type")
            g.add_edges_from(zip(nodes[: n - 1], nodes[1 : n - 1]))
            g.add_edge(nodes[n - 3], nodes[n - 1])
        elif letter == "E":
            if n not in (6, 7, 8):
                raise ValidationError(f"E{n} is not a Dynkin type")
            g.add_edges_from(zip(nodes[: n - 1], nodes[1 : n - 1]))
            g.add_edge(nodes[2], nodes[n - 1])
    return g


# --- operations -----------------------------------------------------------


def embed_root_system(label: str, n_lines: int | None = None) -> list[DivisorClass]:
    """Simple roots of type ``label`` among the positive roots of ``K^perp``.

    Backtracking over positive roots, matching the Dynkin adjacency
    (``r.r' = 1`` on edges, ``0`` otherwise).  With ``n_lines`` only an
    embedding leaving exactly that many lines is accepted, which guards the
    built-in data against a wrong count.  Returned in diagram node order.
    """
    g = dynkin_graph(label)
    order = []
    for comp in sorted(nx.connected_components(g), key=min):
        order += list(nx.dfs_preorder_nodes(g.subgraph(comp), source=min(comp)))
    pool = positive_roots()
    chosen: dict = {}

    def extend(i: int):
        if i == len(order):
            roots = [chosen[n] for n in sorted(chosen)]
            if n_lines is None or len(enumerate_lines(roots)) == n_lines:
                yield roots
            return
        node = order[i]
        used = set(chosen.values())
        for r in pool:
            if r in used:
                continue
            if all(intersect(r, s) == (1 if g.has_edge(node, m) else 0) for m, s in chosen.items()):
                chosen[node] = r
                yield from extend(i + 1)
                del chosen[node]

    found = next(extend(0), None)
    if found is None:
        raise ValidationError(f"no embedding of {label} with {n_lines} lines")
    return found


def enumerate_lines(roots: Sequence[DivisorClass]) -> list[DivisorClass]:
    """(-1)-classes meeting every given (-2)-curve non-negatively."""
    for r in roots:
        if not is_root(r):
            raise ValidationError(f"{r} is not a root (need r^2=-2, r.K=0)")
    return [l for l in exceptional_classes() if all(intersect(l, r) >= 0 for r in roots)]


def default_incidences(
    curves: Sequence[NegativeCurve], listed: Sequence[PointIncidence] = ()
) -> tuple[PointIncidence, ...]:
    """``listed`` plus one transverse point per unit of intersection it leaves unaccounted for."""
    points = list(listed)
    taken = {p.id for p in points}
    for a, b in combinations(curves, 2):
        n = intersect(a.cls, b.cls) - sum(p.multiplicity(a.id) * p.multiplicity(b.id) for p in listed)
        for k in range(int(n)):
            pid = f"{a.id}*{b.id}" + ("" if n == 1 else f"#{k + 1}")
            while pid in taken:
                pid += "'"
            taken.add(pid)
            points.append(PointIncidence(pid, ((a.id, 1), (b.id, 1))))
    return tuple(points)


def _coerce_class(raw) -> DivisorClass:
    if isinstance(raw, DivisorClass):
        return raw
    try:
        return DivisorClass(tuple(Fraction(x) for x in raw))
    except (TypeError, ValueError) as exc:
        raise ValidationError(f"bad divisor class {raw!r}: {exc}") from None


def _named(items, prefix: str) -> list[tuple[str, DivisorClass]]:
    out = []
    for k, item in enumerate(items, start=1):
        if isinstance(item, tuple) and len(item) == 2 and isinstance(item[0], str):
            out.append((item[0], _coerce_class(item[1])))
        else:
            out.append((f"{prefix}{k}", _coerce_class(item)))
    return out


def validate_config(config: SurfaceConfig) -> None:
    ids = config.curve_ids
    if len(set(ids)) != len(ids):
        raise ValidationError(f"duplicate curve ids in {config.name}")
    classes = [c.cls for c in config.curves]
    if len(set(classes)) != len(classes):
        raise ValidationError(f"duplicate curve classes in {config.name}")
    for c in config.minus_two:
        for d in config.minus_two:
            if c.id < d.id and intersect(c.cls, d.cls) < 0:
                raise ValidationError(f"(-2)-curves {c.id}, {d.id} meet negatively")
    for c in config.lines:
        bad = [r.id for r in config.minus_two if intersect(c.cls, r.cls) < 0]
        if bad:
            raise ValidationError(f"line {c.id} meets {bad} negatively, so it is reducible")
    if config.singularities is not None:
        sub = nx.Graph()
        sub.add_nodes_from(r.id for r in config.minus_two)
        for a, b in combinations(config.minus_two, 2):
            w = intersect(a.cls, b.cls)
            if w:
                sub.add_edge(a.id, b.id, weight=w)
        if any(d["weight"] != 1 for *_, d in sub.edges(data=True)) or not nx.is_isomorphic(
            sub, dynkin_graph(config.singularities)
        ):
            raise ValidationError(
                f"(-2)-curves of {config.name} do not form the Dynkin diagram {config.singularities}"
            )
    if config.expected is not None and config.expected.lines != len(config.lines):
        raise ValidationError(f"{config.name} has {len(config.lines)} lines, expected {config.expected.lines}")
    point_ids = [p.id for p in config.points]
    if len(set(point_ids)) != len(point_ids):
        raise ValidationError(f"duplicate point ids in {config.name}")
    known = set(ids)
    for p in config.points:
        if len(p.on_curves) < 2:
            raise ValidationError(f"point {p.id} lies on fewer than two curves")
        for cid, mult in p.on_curves:
            if cid not in known:
                raise ValidationError(f"point {p.id} refers to unknown curve {cid!r}")
            if mult < 1:
                raise ValidationError(f"point {p.id}: multiplicity of {cid} must be >= 1")
    for a, b in combinations(config.curves, 2):
        local = sum(p.multiplicity(a.id) * p.multiplicity(b.id) for p in config.points)
        global_ = intersect(a.cls, b.cls)
        if local != global_:
            raise ValidationError(
                f"incidences of {a.id} and {b.id} add up to {local}, but {a.id}.{b.id} = {global_}"
            )


def build_config(
    name: str,
    roots: Iterable,
    line_classes: Iterable | None = None,
    incidences: Iterable | None = None,
    *,
    singularities: str | None = None,
    expected: Expected | None = None,
    notes: Sequence[str] = (),
) -> SurfaceConfig:
    """Validate and assemble a configuration.

    ``roots`` and ``line_classes`` hold classes or ``(id, class)`` pairs.
    Lines default to every line of ``enumerate_lines``; given lines must be
    exactly that set.  Intersections not covered by ``incidences`` become
    transverse points, pairwise distinct.
    """
    named_roots = _named(list(roots), "E")
    curves = []
    for cid, c in named_roots:
        if not is_root(c):
            raise ValidationError(f"root {cid} {c} is not a (-2)-class")
        if not is_positive_root(c):
            raise ValidationError(f"root {cid} {c} is not a positive root")
        curves.append(NegativeCurve(cid, c, CurveKind.MINUS_TWO))
    allowed = set(enumerate_lines([c for _, c in named_roots]))
    if line_classes is None:
        named_lines = [(f"L{k}", c) for k, c in enumerate(sorted(allowed, key=lambda c: c.coeffs), start=1)]
    else:
        named_lines = _named(list(line_classes), "L")
    for cid, c in named_lines:
        curve = NegativeCurve.classify(cid, c)
        if curve.kind is not CurveKind.MINUS_ONE:
            raise ValidationError(f"line {cid} {c} is not a (-1)-class")
        if c not in allowed:
            raise ValidationError(f"line {cid} {c} meets a (-2)-curve negatively")
        curves.append(curve)
    missing = allowed - {c for _, c in named_lines}
    if missing:
        raise ValidationError(f"{len(missing)} line(s) missing, e.g. {min(missing, key=lambda c: c.coeffs)}")
    if singularities is None and name in REFERENCE_TABLE:
        singularities = REFERENCE_TABLE[name][0]
    if expected is None and name in REFERENCE_TABLE:
        _, n_lines, delta = REFERENCE_TABLE[name]
        expected = Expected(n_lines, delta)
    listed = tuple(
        p if isinstance(p, PointIncidence) else PointIncidence(p[0], tuple((c, int(m)) for c, m in p[1]))
        for p in incidences or ()
    )
    points = default_incidences(curves, listed)
    config = SurfaceConfig(
        name=name,
        singularities=singularities if singularities is not None else "",
        curves=tuple(curves),
        points=points,
        expected=expected,
        notes=tuple(notes),
    )
    if singularities is None:
        object.__setattr__(config, "singularities", _infer_singularities(config))
    validate_config(config)
    return config


def _infer_singularities(config: SurfaceConfig) -> str:
    g = nx.Graph()
    g.add_nodes_from(c.id for c in config.minus_two)
    for a, b in combinations(config.minus_two, 2):
        if intersect(a.cls, b.cls):
            g.add_edge(a.id, b.id)
    terms = []
    for comp in nx.connected_components(g):
        h = g.subgraph(comp)
        n = h.number_of_nodes()
        if n == 1 or max(d for _, d in h.degree()) <= 2:
            terms.append(("A", n))
        else:
            branch = [v for v, d in h.degree() if d == 3][0]
            arms = sorted(
                len(nx.node_connected_component(h.subgraph(set(comp) - {branch}), u))
                for u in h.neighbors(branch)
            )
            terms.append(("D", n) if arms[:2] == [1, 1] else ("E", n))
    counts: dict[tuple[str, int], int] = {}
    for t in terms:
        counts[t] = counts.get(t, 0) + 1
    ordered = sorted(counts, key=lambda t: ({"E": 0, "D": 1, "A": 2}[t[0]], -t[1]))
    return "+".join((f"{counts[t]}" if counts[t] > 1 else "") + f"{t[0]}{t[1]}" for t in ordered)


def dual_graph(config: SurfaceConfig) -> nx.Graph:
    """Nodes are curve ids (with ``kind`` and ``cls``); edges carry ``weight = C.C'``."""
    g = nx.Graph()
    for c in config.curves:
        g.add_node(c.id, kind=c.kind, cls=c.cls)
    for a, b in combinations(config.curves, 2):
        w = intersect(a.cls, b.cls)
        if w:
            g.add_edge(a.id, b.id, weight=w)
    return g


def strata(config: SurfaceConfig) -> list[PointStratum]:
    out = [
        PointStratum(StratumKind.AT_POINT, p.id, tuple(sorted(p.curve_ids, key=config.curve_ids.index)))
        for p in config.points
    ]
    out += [PointStratum(StratumKind.CURVE_GENERIC, c.id, (c.id,)) for c in config.curves]
    out.append(PointStratum(StratumKind.SURFACE_GENERIC, None, ()))
    return out


# --- file format ----------------------------------------------------------


def _fraction_json(x: Fraction):
    return int(x) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


def to_dict(config: SurfaceConfig) -> dict:
    out: dict = {
        "name": config.name,
        "singularities": config.singularities,
    }
    out["roots"] = [{"id": c.id, "class": [_fraction_json(x) for x in c.cls.coeffs]} for c in config.minus_two]
    out["lines"] = [{"id": c.id, "class": [_fraction_json(x) for x in c.cls.coeffs]} for c in config.lines]
    out["points"] = [{"id": p.id, "curves": [[c, m] for c, m in p.on_curves]} for p in config.points]
    if config.expected:
        out["expected"] = {"lines": config.expected.lines, "delta": _fraction_json(config.expected.delta)}
    if config.notes:
        out["notes"] = list(config.notes)
    return out


def serialize_config(config: SurfaceConfig) -> str:
    d = to_dict(config)
    # one curve / point per line keeps the data files diffable
    lines = ["{"]
    keys = list(d)
    for i, key in enumerate(keys):
        comma = "," if i < len(keys) - 1 else ""
        value = d[key]
        if isinstance(value, list) and value and isinstance(value[0], dict):
            lines.append(f"  {json.dumps(key)}: [")
            for j, item in enumerate(value):
                lines.append(f"    {json.dumps(item)}{',' if j < len(value) - 1 else ''}")
            lines.append(f"  ]{comma}")
        else:
            lines.append(f"  {json.dumps(key)}: {json.dumps(value, ensure_ascii=False)}{comma}")
    lines.append("}")
    return "\n".join(lines) + "\n"


def _entries(raw, field_name: str) -> list:
    if not isinstance(raw, list):
        raise ValidationError(f"{field_name!r} must be an array")
    out = []
    for item in raw:
        if isinstance(item, dict):
            if "id" not in item or "class" not in item:
                raise ValidationError(f"{field_name!r} entries need 'id' and 'class'")
            out.append((str(item["id"]), _coerce_class(item["class"])))
        else:
            out.append(_coerce_class(item))
    return out


def from_dict(d: dict) -> SurfaceConfig:
    if not isinstance(d, dict):
        raise ValidationError("configuration must be a JSON object")
    for key in ("name", "roots"):
        if key not in d:
            raise ValidationError(f"missing field {key!r}")
    roots = _entries(d["roots"], "roots")
    lines = _entries(d["lines"], "lines") if "lines" in d else None
    points = None
    if "points" in d:
        points = []
        for p in d["points"]:
            try:
                points.append(PointIncidence(str(p["id"]), tuple((str(c), int(m)) for c, m in p["curves"])))
            except (KeyError, TypeError, ValueError):
                raise ValidationError(f"bad point entry {p!r}") from None
    expected = None
    if "expected" in d:
        e = d["expected"]
        expected = Expected(int(e["lines"]), Fraction(str(e["delta"])))
    return build_config(
        str(d["name"]),
        roots,
        lines,
        points,
        singularities=d.get("singularities"),
        expected=expected,
        notes=d.get("notes", ()),
    )


def parse_config(text: str) -> SurfaceConfig:
    try:
        d = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigParseError(exc.msg, exc.lineno, exc.colno) from None
    return from_dict(d)


def load_config_file(path) -> SurfaceConfig:
    with open(path, encoding="utf-8") as fh:
        return parse_config(fh.read())


_BUILTIN_CACHE: dict[str, SurfaceConfig] = {}
_BUILTIN_LOCK = threading.Lock()


def load_builtin(name: str) -> SurfaceConfig:
    if name not in REFERENCE_TABLE:
        raise KeyError(f"unknown built-in configuration {name!r}; known: {', '.join(BUILTIN_NAMES)}")
    with _BUILTIN_LOCK:
        if name not in _BUILTIN_CACHE:
            text = (resources.files("dp3delta") / "data" / "builtins" / f"{name}.json").read_text("utf-8")
            _BUILTIN_CACHE[name] = parse_config(text)
        return _BUILTIN_CACHE[name]


def builtin_configs() -> list[SurfaceConfig]:
    return [load_builtin(n) for n in BUILTIN_NAMES]
