"""Regenerate the built-in configuration files.

Each file holds explicit root and line classes plus the transverse incidence
points, so loading a built-in never reruns the embedding search.  Curves get
systematic names: ``E1..En`` for the (-2)-curves, ``Li_k`` for the k-th line
meeting only ``Ei``, ``Lij`` for a line meeting ``Ei`` and ``Ej`` and ``Mk``
for lines meeting no (-2)-curve.  A few surfaces use hand-picked names that
follow the usual pictures of their dual graphs.

    python3 tools/make_builtins.py [--check]
"""
from __future__ import annotations

import argparse
import sys
from pathlib import Path

from dp3delta.config import (
    REFERENCE_TABLE,
    build_config,
    embed_root_system,
    serialize_config,
)
from dp3delta.lattice import intersect

OUT = Path(__file__).resolve().parents[1] / "src" / "dp3delta" / "data" / "builtins"

# Keys are the default ids of build_config on the embedding found by
# embed_root_system (roots E1.. in diagram order, lines L1.. by class).
RENAMES: dict[str, dict[str, str]] = {
    "A1": {
        "E1": "E",
        **{f"L{k}": f"L{i}" for i, k in enumerate((1, 9, 12, 14, 15, 17), start=1)},
        **{f"L{k}": f"M{i}" for i, k in enumerate((2, 3, 4, 5, 6, 7, 8, 10, 11, 13, 16, 18, 19, 20, 21), start=1)},
    },
    # A3 chain E1 - E2 - E1', A1 = E3
    "A3A1": {
        "E1": "E1'", "E2": "E2", "E3": "E1", "E4": "E3",
        "L1": "L1_1", "L6": "L1_1'", "L2": "L3_1", "L7": "L3_1'",
        "L4": "L13", "L5": "L2_1", "L3": "M1",
    },
    # chain E4 - E2 - E1 - E3
    "A4": {
        "E1": "E4", "E2": "E2", "E3": "E1", "E4": "E3",
        "L4": "L1_1", "L3": "L3_1", "L1": "L4_1", "L5": "L4_2", "L2": "M1", "L6": "M2",
    },
    # chain E1 - ... - E5
    "A5": {
        "E1": "E5", "E2": "E4", "E3": "E3", "E4": "E2", "E5": "E1",
        "L2": "L2_1", "L1": "L5_1", "L3": "L5_2",
    },
    # E in the middle
    "D4": {
        "E1": "E1", "E2": "E", "E3": "E2", "E4": "E3",
        "L1": "L1_1", "L5": "L2_1", "L3": "L3_1", "L2": "M1", "L4": "M2", "L6": "M3",
    },
    # chain E1 - E2 - E3 - E4 with E on E2
    "D5": {
        "E1": "E4", "E2": "E3", "E3": "E2", "E4": "E1", "E5": "E",
        "L1": "L4_1", "L2": "L", "L3": "M1",
    },
    # chain E1 - ... - E5 with E on E3
    "E6": {
        "E1": "E5", "E2": "E4", "E3": "E3", "E4": "E2", "E5": "E1", "E6": "E",
        "L1": "L5_1",
    },
}


def systematic_names(config) -> dict[str, str]:
    roots = config.minus_two
    names = {r.id: r.id for r in roots}
    taken: set[str] = set()
    counters: dict[int, int] = {}
    free = 0
    for line in config.lines:
        meets = [i for i, r in enumerate(roots, start=1) if intersect(line.cls, r.cls) > 0]
        if not meets:
            free += 1
            name = f"M{free}"
        elif len(meets) == 1:
            counters[meets[0]] = counters.get(meets[0], 0) + 1
            name = f"L{meets[0]}_{counters[meets[0]]}"
        else:
            name = "L" + "".join(str(i) for i in meets)
            while name in taken:
                name += "'"
        taken.add(name)
        names[line.id] = name
    return names


def generate(name: str):
    label, n_lines, _ = REFERENCE_TABLE[name]
    draft = build_config(name, embed_root_system(label, n_lines))
    rename = RENAMES.get(name) or systematic_names(draft)
    if sorted(rename) != sorted(draft.curve_ids) or len(set(rename.values())) != len(rename):
        raise SystemExit(f"{name}: rename table does not cover the curves bijectively")
    key = lambda c: c.cls.coeffs  # noqa: E731
    roots = [(rename[c.id], c.cls) for c in sorted(draft.minus_two, key=key)]
    lines = [(rename[c.id], c.cls) for c in sorted(draft.lines, key=key)]
    notes = ["incidences: every pair of curves meets transversally at its own point"]
    return build_config(name, roots, lines, singularities=label, notes=notes)


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--check", action="store_true", help="fail if a file is missing or differs")
    args = ap.parse_args(argv)
    OUT.mkdir(parents=True, exist_ok=True)
    stale = []
    for name in REFERENCE_TABLE:
        text = serialize_config(generate(name))
        path = OUT / f"{name}.json"
        if args.check:
            if not path.exists() or path.read_text("utf-8") != text:
                stale.append(name)
        else:
            path.write_text(text, "utf-8")
    if stale:
        print("stale built-ins:", ", ".join(stale), file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
