"""``delta-dp3``: list surfaces, certify delta, dump decompositions, run checks.

Exit codes: 0 success, 1 a check failed, 2 usage error or unknown name,
3 only an interval is certified, 4 the configuration does not validate.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
from fractions import Fraction
from typing import Sequence

from . import corpus
from .checks import random_agreement, zariski_suite
from .config import (
    BUILTIN_NAMES,
    REFERENCE_TABLE,
    ConfigParseError,
    CurveKind,
    SurfaceConfig,
    ValidationError,
    builtin_configs,
    enumerate_lines,
    load_builtin,
    load_config_file,
)
from .delta import global_delta, s_curve, s_flag
from .lattice import intersect
from .piecewise import format_poly
from .zariski import DecompositionError, NotPseudoEffective, param_zariski

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_INTERVAL, EXIT_INVALID = 0, 1, 2, 3, 4
QUADRATURE_TOL = 1e-9


class CliError(Exception):
    def __init__(self, message: str, code: int):
        super().__init__(message)
        self.code = code


# --- rendering ------------------------------------------------------------


def frac(x, digits: int | None = None) -> str:
    if isinstance(x, float) and math.isinf(x):
        return "inf"
    x = Fraction(x)
    text = str(x)
    if digits is not None and x.denominator != 1:
        text += f" ({float(x):.{digits}f})"
    return text


def _plain(x) -> str | int:
    if isinstance(x, float) and math.isinf(x):
        return "inf"
    x = Fraction(x)
    return int(x) if x.denominator == 1 else str(x)


def markdown_table(header: Sequence[str], rows: Sequence[Sequence]) -> str:
    lines = ["| " + " | ".join(header) + " |", "|" + "|".join("---" for _ in header) + "|"]
    lines += ["| " + " | ".join(str(c) for c in row) + " |" for row in rows]
    return "\n".join(lines)


def csv_table(header: Sequence[str], rows: Sequence[Sequence]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
    return buf.getvalue().rstrip("\n")


def emit(args, header, rows, records, preamble: Sequence[str] = ()) -> None:
    """Print one table in the requested format (json gets ``records``)."""
    if args.format == "json":
        print(json.dumps(records, indent=2, ensure_ascii=False))
    elif args.format == "csv":
        print(csv_table(header, rows))
    else:
        for line in preamble:
            print(line)
        if preamble:
            print()
        print(markdown_table(header, rows))


def _poly_text(coeffs) -> str:
    return format_poly(tuple(Fraction(c) for c in coeffs))


def _combination(terms: dict) -> str:
    parts = []
    for cid, a in terms.items():
        text = str(a) if isinstance(a, Fraction) else f"({a})"
        parts.append(f"{text}*{cid}")
    return " + ".join(parts) if parts else "0"


def _count(n: int, noun: str) -> str:
    return f"{n} {noun}" if n == 1 else f"{n} {noun}s"


def _abbreviate(items: Sequence[str], keep: int = 12) -> str:
    if len(items) <= keep:
        return ", ".join(items)
    return ", ".join(items[:keep]) + f", ... ({len(items) - keep} more)"


# --- target resolution ----------------------------------------------------


def resolve(target: str) -> SurfaceConfig:
    if os.path.exists(target) or target.endswith(".json"):
        try:
            return load_config_file(target)
        except OSError as exc:
            raise CliError(f"cannot read {target}: {exc.strerror}", EXIT_USAGE) from None
        except ConfigParseError as exc:
            raise CliError(f"{target}: parse error: {exc}", EXIT_INVALID) from None
        except ValidationError as exc:
            raise CliError(f"{target}: invalid configuration: {exc}", EXIT_INVALID) from None
    if target not in REFERENCE_TABLE:
        raise CliError(f"unknown configuration {target!r}; known: {', '.join(BUILTIN_NAMES)}", EXIT_USAGE)
    return load_builtin(target)


# --- commands -------------------------------------------------------------


def cmd_list(args) -> int:
    header = ["name", "singularities", "lines", "delta"]
    rows = [[n, lab, k, frac(d, args.digits)] for n, (lab, k, d) in REFERENCE_TABLE.items()]
    records = [{"name": n, "singularities": lab, "lines": k, "delta": _plain(d)} for n, (lab, k, d) in REFERENCE_TABLE.items()]
    emit(args, header, rows, records)
    return EXIT_OK


def _reference_rows(config: SurfaceConfig):
    rows = corpus.stratum_tables().get(config.name)
    if rows is None or config is not load_builtin(config.name):
        return None
    return corpus.check_stratum_table(config, rows)


def cmd_delta(args) -> int:
    config = resolve(args.target)
    try:
        cert = global_delta(config)
    except (NotPseudoEffective, DecompositionError) as exc:
        raise CliError(f"{config.name}: {exc}", EXIT_FAIL) from None
    d = args.digits
    header = ["stratum", "lower", "upper", "status", "witness", "lower bound from"]
    rows = [
        [
            b.stratum.label,
            frac(b.lower, d),
            frac(b.upper, d),
            "exact" if b.exact else "interval",
            b.witness_curve or "-",
            b.lower_source,
        ]
        for b in cert.bounds
    ]
    reference = _reference_rows(config)
    records = {
        "name": config.name,
        "singularities": config.singularities,
        "lower": _plain(cert.lower),
        "upper": _plain(cert.upper),
        "exact": cert.exact,
        "witness_curve": cert.witness_curve,
        "attaining_strata": [s.label for s in cert.attaining_strata],
        "strata": [
            {
                "stratum": b.stratum.label,
                "lower": _plain(b.lower),
                "upper": _plain(b.upper),
                "exact": b.exact,
                "witness_curve": b.witness_curve,
                "lower_source": b.lower_source,
            }
            for b in cert.bounds
        ],
    }
    if reference is not None:
        records["reference_table"] = [
            {"row": r.row.label, "value": _plain(r.row.value), "exact": r.row.exact, "ok": r.ok, "failures": list(r.failures)}
            for r in reference
        ]
    value = frac(cert.lower, d) if cert.exact else f"[{frac(cert.lower, d)}, {frac(cert.upper, d)}]"
    preamble = [
        f"# {config.name} ({config.singularities or 'smooth'})",
        "",
        f"delta = {value} ({'exact' if cert.exact else 'interval only'})",
        f"attained at: {_abbreviate([s.label for s in cert.attaining_strata])}",
        f"witness curve: {cert.witness_curve or '-'}",
    ]
    mismatch = False
    if config.expected is not None:
        want = config.expected.delta
        mismatch = not (cert.lower <= want <= cert.upper) or (cert.exact and cert.lower != want)
        preamble.append(f"expected delta: {frac(want, d)} ({'MISMATCH' if mismatch else 'consistent'})")
        records["expected_delta"] = _plain(want)
        records["expected_ok"] = not mismatch
    emit(args, header, rows, records, preamble)
    if reference is not None and args.format == "md":
        print()
        print("reference table:")
        print()
        print(
            markdown_table(
                ["points", "delta", "strata", "check"],
                [
                    [r.row.label, ("" if r.row.exact else ">= ") + frac(r.row.value, d), len(r.strata), "PASS" if r.ok else "FAIL"]
                    for r in reference
                ],
            )
        )
    if mismatch:
        return EXIT_FAIL
    return EXIT_OK if cert.exact else EXIT_INTERVAL


def cmd_decompose(args) -> int:
    config = resolve(args.target)
    if args.curve not in config.curve_ids:
        raise CliError(f"no curve {args.curve!r} in {config.name}; curves: {', '.join(config.curve_ids)}", EXIT_USAGE)
    try:
        pz = param_zariski(config, args.curve)
    except (NotPseudoEffective, DecompositionError) as exc:
        raise CliError(f"{config.name}/{args.curve}: {exc}", EXIT_FAIL) from None
    a = config.curve(args.curve)
    d = args.digits
    s = s_curve(args.curve, config)
    header = ["v", "support", "N(v)", "P(v)^2", "P(v).A"]
    rows, records = [], []
    for iv in pz.intervals:
        p0, p1 = iv.p_const, iv.p_slope
        vol = (intersect(p0, p0), 2 * intersect(p0, p1), intersect(p1, p1))
        deg = (intersect(p0, a.cls), intersect(p1, a.cls))
        neg = {cid: str(f) for cid, f in iv.coeffs.items()}
        rows.append(
            [f"[{frac(iv.lo, d)}, {frac(iv.hi, d)}]", ", ".join(iv.active) or "-", _combination(neg), _poly_text(vol), _poly_text(deg)]
        )
        records.append(
            {
                "lo": _plain(iv.lo),
                "hi": _plain(iv.hi),
                "support": list(iv.active),
                "negative": {cid: [_plain(f.const), _plain(f.slope)] for cid, f in iv.coeffs.items()},
                "volume": [_plain(c) for c in vol],
                "degree": [_plain(c) for c in deg],
            }
        )
    kind = "(-1)-curve" if a.kind is CurveKind.MINUS_ONE else "(-2)-curve"
    preamble = [
        f"# -K - vA on {config.name}, A = {a.id} ({kind} {a.cls})",
        "",
        f"tau = {frac(pz.tau, d)}",
        f"S(A) = {frac(s, d)}",
        f"1/S(A) = {frac(1 / s, d)}",
    ]
    if pz.monotonicity_violations:
        preamble += [f"warning: {m}" for m in pz.monotonicity_violations]
    if args.format == "json":
        print(
            json.dumps(
                {"name": config.name, "curve": a.id, "tau": _plain(pz.tau), "s_value": _plain(s), "intervals": records},
                indent=2,
                ensure_ascii=False,
            )
        )
    else:
        emit(args, header, rows, records, preamble)
    return EXIT_OK


def table_rows(configs: dict[str, SurfaceConfig | Exception]) -> list[dict]:
    """One row per built-in name comparing computed and expected data."""
    out = []
    for name in BUILTIN_NAMES:
        label, n_lines, delta = REFERENCE_TABLE[name]
        row = {"name": name, "K2": 3, "singularities": label, "lines": None, "delta": None,
               "expected_lines": n_lines, "expected_delta": delta, "status": "FAIL", "note": ""}
        config = configs[name]
        if isinstance(config, Exception):
            row["note"] = str(config)
            out.append(row)
            continue
        try:
            row["singularities"] = config.singularities
            row["lines"] = len(enumerate_lines([c.cls for c in config.minus_two]))
            cert = global_delta(config)
            row["delta"] = cert.lower if cert.exact else (cert.lower, cert.upper)
            good = cert.exact and cert.lower == delta and row["lines"] == n_lines and config.singularities == label
            row["status"] = "PASS" if good else "FAIL"
        except (NotPseudoEffective, DecompositionError) as exc:
            row["note"] = str(exc)
        out.append(row)
    return out


def cmd_table(args) -> int:
    configs: dict[str, SurfaceConfig | Exception] = {}
    for name in BUILTIN_NAMES:
        configs[name] = load_builtin(name)
    for path in args.override or ():
        try:
            cfg = load_config_file(path)
        except OSError as exc:
            raise CliError(f"cannot read {path}: {exc.strerror}", EXIT_USAGE) from None
        except (ConfigParseError, ValidationError) as exc:
            name = os.path.splitext(os.path.basename(path))[0]
            if name not in REFERENCE_TABLE:
                raise CliError(f"{path}: {exc}", EXIT_INVALID) from None
            configs[name] = exc
            continue
        if cfg.name not in REFERENCE_TABLE:
            raise CliError(f"{path}: {cfg.name!r} is not a built-in name", EXIT_USAGE)
        configs[cfg.name] = cfg
    rows = table_rows(configs)
    d = args.digits

    def show(x):
        if x is None:
            return "-"
        if isinstance(x, tuple):
            return f"[{frac(x[0], d)}, {frac(x[1], d)}]"
        return frac(x, d)

    header = ["name", "K^2", "lines", "singularities", "delta", "expected", "status"]
    body = [
        [r["name"], r["K2"], r["lines"] if r["lines"] is not None else "-", r["singularities"], show(r["delta"]),
         f"{r['expected_lines']} lines, {frac(r['expected_delta'], d)}", r["status"] + (f" ({r['note']})" if r["note"] else "")]
        for r in rows
    ]
    records = [
        {
            **{k: r[k] for k in ("name", "K2", "singularities", "lines", "expected_lines", "status", "note")},
            "delta": None if r["delta"] is None else ([_plain(x) for x in r["delta"]] if isinstance(r["delta"], tuple) else _plain(r["delta"])),
            "expected_delta": _plain(r["expected_delta"]),
        }
        for r in rows
    ]
    passed = sum(r["status"] == "PASS" for r in rows)
    emit(args, header, body, records)
    if args.format == "md":
        print()
        print(f"{passed}/{len(rows)} PASS")
    return EXIT_OK if passed == len(rows) else EXIT_FAIL


def _verify_lemmas(configs) -> list[list]:
    rows = []
    for rec in corpus.load_lemmas():
        reports = corpus.check_lemma(rec, configs)
        bad = [f"{r.config}/{r.curve}: " + "; ".join(m.field for m in r.mismatches) for r in reports if not r.ok]
        status = "all-match" if reports and not bad else "MISMATCH"
        rows.append(["lemmas", rec.key, f"{rec.caption}; {_count(len(reports), 'curve')}", status, " | ".join(bad)])
    return rows


def _verify_zariski(configs, seed: int) -> list[list]:
    rows = []
    for config in configs.values():
        results = [zariski_suite(config, c.id, seed=seed) for c in config.curves]
        bad = [f"{r.curve}: {v}" for r in results for v in r.violations]
        detail = f"{_count(len(results), 'curve')}, {sum(r.samples for r in results)} samples"
        rows.append(["zariski", config.name, detail, "PASS" if not bad else "FAIL", " | ".join(bad[:5])])
    trials, bad = random_agreement(list(configs.values()), seed=seed)
    rows.append(["zariski", "pointwise vs parametric", f"{trials} trials", "PASS" if not bad else "FAIL", " | ".join(bad[:5])])
    return rows


def _verify_tables() -> list[list]:
    rows = []
    for name, table in corpus.stratum_tables().items():
        checks = corpus.check_stratum_table(load_builtin(name), table)
        for r in checks:
            value = ("" if r.row.exact else ">= ") + str(r.row.value)
            rows.append(["tables", f"{name}: {r.row.label}", f"{value}, {len(r.strata)} {'stratum' if len(r.strata) == 1 else 'strata'}", "PASS" if r.ok else "FAIL", " | ".join(r.failures)])
    return rows


def _verify_quadrature(configs, nodes: int) -> list[list]:
    rows = []
    for rec in corpus.load_lemmas():
        worst_s = worst_f = 0.0
        for cname, cid in rec.instances:
            config = configs[cname]
            exact = s_curve(cid, config)
            worst_s = max(worst_s, abs(corpus.numeric_s(config, cid, nodes) - float(exact)) / float(exact))
            for st in corpus.curve_strata(config, cid):
                exact = s_flag(cid, st, config)
                got = corpus.numeric_s_flag(config, cid, st, nodes)
                worst_f = max(worst_f, abs(got - float(exact)) / float(exact))
        ok = worst_s <= QUADRATURE_TOL and worst_f <= QUADRATURE_TOL
        detail = f"{nodes} nodes; max rel err S {worst_s:.2e}, flag {worst_f:.2e}"
        rows.append(["quadrature", rec.key, detail, "PASS" if ok else "FAIL", ""])
    return rows


def cmd_verify(args) -> int:
    configs = {c.name: c for c in builtin_configs()}
    only = args.only
    rows: list[list] = []
    if only in (None, "lemmas"):
        rows += _verify_lemmas(configs)
    if only in (None, "zariski"):
        rows += _verify_zariski(configs, args.seed)
    if only in (None, "tables"):
        rows += _verify_tables()
    if only == "quadrature" or (args.grid is not None and only is None):
        rows += _verify_quadrature(configs, args.grid or 10_000)
    header = ["suite", "item", "detail", "status", "problems"]
    failed = [r for r in rows if r[3] not in ("PASS", "all-match")]
    records = [dict(zip(header, r)) for r in rows]
    emit(args, header, rows, records)
    if args.format == "md":
        print()
        print("clean" if not failed else f"{len(failed)} of {len(rows)} checks failed")
    return EXIT_OK if not failed else EXIT_FAIL


# --- entry point ----------------------------------------------------------


def _positive_int(text: str) -> int:
    try:
        n = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
    if n < 2:
        raise argparse.ArgumentTypeError("must be at least 2")
    return n


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("md", "csv", "json"), default="md", help="output format (default md)")
    common.add_argument("--digits", type=int, default=None, metavar="N", help="append N-digit decimals to fractions")

    ap = argparse.ArgumentParser(prog="delta-dp3", description="Exact delta-invariants of Du Val cubic surfaces.")
    sub = ap.add_subparsers(dest="command", required=True, metavar="<list|delta|decompose|table|verify>")

    p = sub.add_parser("list", parents=[common], help="built-in configurations")
    p.set_defaults(func=cmd_list)

    p = sub.add_parser("delta", parents=[common], help="certify the delta-invariant")
    p.add_argument("target", help="built-in name or configuration file")
    p.set_defaults(func=cmd_delta)

    p = sub.add_parser("decompose", parents=[common], help="Zariski decomposition of -K - vA")
    p.add_argument("target", help="built-in name or configuration file")
    p.add_argument("curve", help="curve id, e.g. E or L1")
    p.set_defaults(func=cmd_decompose)

    p = sub.add_parser("table", parents=[common], help="recompute lines and delta for all built-ins")
    p.add_argument("--override", action="append", metavar="FILE", help="replace a built-in by this file (repeatable)")
    p.set_defaults(func=cmd_table)

    p = sub.add_parser("verify", parents=[common], help="run the reference data and property checks")
    p.add_argument("--only", choices=("lemmas", "zariski", "tables", "quadrature"))
    p.add_argument("--grid", type=_positive_int, metavar="N", help="also run the trapezoid oracle with N nodes")
    p.add_argument("--seed", type=int, default=0, help="seed for the random samples (default 0)")
    p.set_defaults(func=cmd_verify)
    return ap


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    if args.digits is not None and not 0 <= args.digits <= 50:
        print("delta-dp3: --digits must be between 0 and 50", file=sys.stderr)
        return EXIT_USAGE
    try:
        return args.func(args)
    except CliError as exc:
        print(f"delta-dp3: {exc}", file=sys.stderr)
        return exc.code


if __name__ == "__main__":
    sys.exit(main())
