"""Exact delta-invariants of Du Val cubic surfaces."""
from .config import (
    BUILTIN_NAMES,
    REFERENCE_TABLE,
    NegativeCurve,
    PointIncidence,
    PointStratum,
    SurfaceConfig,
    ValidationError,
    build_config,
    dual_graph,
    enumerate_lines,
    load_builtin,
    parse_config,
    serialize_config,
    strata,
)
from .corpus import check_lemma, check_stratum_table, load_lemmas, stratum_tables
from .delta import DeltaBound, DeltaCertificate, delta_bounds, global_delta, verify_lemma
from .lattice import DivisorClass, canonical_class, intersect, is_negative_definite
from .zariski import ParamDecomp, param_zariski, tau, zariski_at

__all__ = [
    "BUILTIN_NAMES",
    "REFERENCE_TABLE",
    "DeltaBound",
    "DeltaCertificate",
    "DivisorClass",
    "NegativeCurve",
    "ParamDecomp",
    "PointIncidence",
    "PointStratum",
    "SurfaceConfig",
    "ValidationError",
    "build_config",
    "canonical_class",
    "check_lemma",
    "check_stratum_table",
    "delta_bounds",
    "dual_graph",
    "enumerate_lines",
    "global_delta",
    "intersect",
    "is_negative_definite",
    "load_builtin",
    "load_lemmas",
    "param_zariski",
    "parse_config",
    "serialize_config",
    "strata",
    "stratum_tables",
    "tau",
    "verify_lemma",
    "zariski_at",
]
