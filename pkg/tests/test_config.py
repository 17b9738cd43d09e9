from __future__ import annotations

import json
import subprocess
import sys
from fractions import Fraction
from pathlib import Path

import networkx as nx
import pytest
from hypothesis import assume, given
from hypothesis import strategies as st

from dp3delta.config import (
    BUILTIN_NAMES,
    REFERENCE_TABLE,
    ConfigParseError,
    CurveKind,
    NegativeCurve,
    StratumKind,
    ValidationError,
    build_config,
    dual_graph,
    dynkin_graph,
    embed_root_system,
    enumerate_lines,
    load_builtin,
    parse_config,
    parse_singularities,
    serialize_config,
    strata,
    to_dict,
)
from dp3delta.lattice import DivisorClass, intersect, is_negative_definite, positive_roots

DATA = Path(__file__).resolve().parents[1] / "src" / "dp3delta" / "data" / "builtins"

E12 = DivisorClass.of(0, 1, -1, 0, 0, 0, 0)
E23 = DivisorClass.of(0, 0, 1, -1, 0, 0, 0)
E45 = DivisorClass.of(0, 0, 0, 0, 1, -1, 0)


def test_parse_singularities():
    assert parse_singularities("2A2+A1") == [("A", 2), ("A", 2), ("A", 1)]
    assert parse_singularities("") == []
    assert parse_singularities("E6") == [("E", 6)]
    with pytest.raises(ValidationError):
        parse_singularities("B3")


def test_dynkin_graphs():
    assert sorted(d for _, d in dynkin_graph("D4").degree()) == [1, 1, 1, 3]
    e6 = dynkin_graph("E6")
    assert e6.number_of_edges() == 5
    assert sorted(d for _, d in e6.degree()) == [1, 1, 1, 2, 2, 3]
    assert nx.number_connected_components(dynkin_graph("A3+2A1")) == 3
    with pytest.raises(ValidationError):
        dynkin_graph("D3")


def test_embedding_has_the_diagram_shape():
    rs = embed_root_system("A2")
    assert len(rs) == 2 and intersect(rs[0], rs[1]) == 1
    assert len(enumerate_lines(rs)) == 15
    assert len(enumerate_lines([])) == 27


def test_embedding_with_a_line_count():
    assert len(enumerate_lines(embed_root_system("A3", 10))) == 10
    with pytest.raises(ValidationError):
        embed_root_system("A3", 11)


def test_build_config_defaults():
    c = build_config("custom", [E12])
    assert c.singularities == "A1"
    assert [k.id for k in c.minus_two] == ["E1"]
    assert len(c.lines) == 21
    assert c.expected is None
    # every unit of intersection gets its own transverse point
    for a in c.curves:
        for b in c.curves:
            if a.id < b.id:
                shared = sum(p.multiplicity(a.id) * p.multiplicity(b.id) for p in c.points)
                assert shared == intersect(a.cls, b.cls)


def test_builtin_name_fills_expected_data():
    c = build_config("A1", [E12])
    assert c.expected.lines == 21 and c.expected.delta == Fraction(6, 5)


def test_validation_rejects_bad_input():
    with pytest.raises(ValidationError, match="not a \\(-2\\)-class"):
        build_config("x", [DivisorClass.of(1, 0, 0, 0, 0, 0, 0)])
    with pytest.raises(ValidationError, match="positive root"):
        build_config("x", [-E12])
    with pytest.raises(ValidationError, match="Dynkin"):
        build_config("x", [E12, E45], singularities="A2")
    with pytest.raises(ValidationError, match="meets a \\(-2\\)-curve negatively"):
        build_config("x", [E12], [DivisorClass.of(0, 1, 0, 0, 0, 0, 0)])
    twice = [(pid, (("E1", 1), ("E2", 1))) for pid in ("p", "q")]
    with pytest.raises(ValidationError, match="add up to"):
        build_config("x", [E12, E23], incidences=twice)
    with pytest.raises(ValidationError, match="line\\(s\\) missing"):
        build_config("x", [E12], [DivisorClass.of(0, 0, 0, 0, 0, 0, 1)])
    with pytest.raises(ValidationError, match="unknown curve"):
        build_config("x", [E12, E23], incidences=[("p", (("E1", 1), ("Q", 1)))])


def test_unlisted_intersections_become_transverse_points():
    full = build_config("x", [E12, E23])
    empty = build_config("x", [E12, E23], incidences=[])
    assert empty.points == full.points
    c = build_config("x", [E12, E23], incidences=[("node", (("E1", 1), ("E2", 1)))])
    assert c.point("node").curve_ids == ("E1", "E2")
    assert len(c.points) == len(full.points)
    assert sum(1 for p in c.points if {"E1", "E2"} <= set(p.curve_ids)) == 1


def test_negative_curve_kind_is_checked():
    with pytest.raises(ValidationError):
        NegativeCurve("E", E12, CurveKind.MINUS_ONE)
    assert NegativeCurve.classify("L", DivisorClass.of(0, 1, 0, 0, 0, 0, 0)).kind is CurveKind.MINUS_ONE


@pytest.mark.parametrize("name", BUILTIN_NAMES)
def test_builtin_files_round_trip(name):
    c = load_builtin(name)
    text = (DATA / f"{name}.json").read_text("utf-8")
    assert serialize_config(c) == text
    assert parse_config(text) == c
    assert c.singularities == REFERENCE_TABLE[name][0]
    assert len(c.lines) == REFERENCE_TABLE[name][1]


def test_builtins_are_cached_and_unknown_names_fail():
    assert load_builtin("E6") is load_builtin("E6")
    with pytest.raises(KeyError):
        load_builtin("A7")


def test_parse_errors_carry_a_position():
    with pytest.raises(ConfigParseError) as info:
        parse_config('{\n  "name": "x",\n  "roots": [,]\n}')
    assert info.value.line == 3
    with pytest.raises(ValidationError, match="missing field"):
        parse_config('{"name": "x"}')


def test_plain_arrays_are_accepted():
    c = parse_config(json.dumps({"name": "x", "roots": [[0, 1, -1, 0, 0, 0, 0]]}))
    assert c.curve_ids[0] == "E1"
    assert to_dict(c)["roots"][0]["class"] == [0, 1, -1, 0, 0, 0, 0]


def test_strata_and_dual_graph():
    c = load_builtin("E6")
    ss = strata(c)
    assert len(ss) == len(c.points) + len(c.curves) + 1
    assert ss[-1].kind is StratumKind.SURFACE_GENERIC
    g = dual_graph(c)
    assert g.number_of_nodes() == 7
    # E6 diagram plus the single line meeting one end
    assert g.number_of_edges() == 6
    assert nx.is_tree(g)


def test_memo_returns_first_value():
    c = build_config("memo", [E12])
    assert c.memo("k", lambda: 1) == 1
    assert c.memo("k", lambda: 2) == 1


@st.composite
def root_sets(draw):
    pool = list(positive_roots())
    chosen = []
    for idx in draw(st.lists(st.integers(0, len(pool) - 1), min_size=1, max_size=5, unique=True)):
        r = pool[idx]
        if all(intersect(r, s) in (0, 1) for s in chosen) and is_negative_definite(chosen + [r]):
            chosen.append(r)
    return chosen


@given(root_sets())
def test_random_root_sets_build_valid_configs(rs):
    assume(rs)
    c = build_config("random", rs)
    assert parse_config(serialize_config(c)) == c
    assert len(c.lines) == len(enumerate_lines(rs))
    assert nx.is_isomorphic(
        dual_graph(c).subgraph(r.id for r in c.minus_two), dynkin_graph(c.singularities)
    )
    for line in c.lines:
        assert all(intersect(line.cls, r) >= 0 for r in rs)


def test_builtin_files_are_regenerated_identically():
    tool = Path(__file__).resolve().parents[1] / "tools" / "make_builtins.py"
    done = subprocess.run([sys.executable, str(tool), "--check"], capture_output=True, text=True)
    assert done.returncode == 0, done.stderr
