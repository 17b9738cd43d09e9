"""Check the stored decomposition records and watch the quadrature converge."""
from dp3delta.config import load_builtin
from dp3delta.corpus import check_lemma, check_stratum_table, load_lemmas, numeric_s, stratum_tables
from dp3delta.delta import s_curve

records = load_lemmas()
for rec in records:
    reports = check_lemma(rec)
    status = "ok" if all(r.ok for r in reports) else "MISMATCH"
    print(f"{rec.key:12} {rec.caption:60} {len(reports):3} curves  {status}")

for name, rows in stratum_tables().items():
    checks = check_stratum_table(load_builtin(name), rows)
    print(name, " ".join(("" if r.row.exact else ">=") + str(r.row.value) for r in checks),
          "ok" if all(r.ok for r in checks) else "FAIL")

# trapezoid error shrinks like h^2: ten times more nodes, a hundred times smaller
surface = load_builtin("A3A1")
exact = float(s_curve("L1_1", surface))
for nodes in (1_000, 10_000, 100_000):
    err = abs(numeric_s(surface, "L1_1", nodes) - exact) / exact
    print(f"{nodes:>7} nodes  relative error {err:.2e}")
