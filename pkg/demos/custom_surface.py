"""Build a surface from root classes, save it, and certify it.

The (-2)-classes below form an A2 chain in the blow-up basis.  Line classes
and the intersection points are filled in automatically.
"""
import json
import tempfile
from pathlib import Path

from dp3delta import DivisorClass, build_config, global_delta, serialize_config
from dp3delta.cli import main
from dp3delta.config import load_config_file

roots = [
    ("N1", DivisorClass.of(0, 1, -1, 0, 0, 0, 0)),
    ("N2", DivisorClass.of(0, 0, 1, -1, 0, 0, 0)),
]
surface = build_config("my-a2", roots)
print(surface.singularities, "with", len(surface.lines), "lines")

cert = global_delta(surface)
print("delta =", cert.value, "attained at", [s.label for s in cert.attaining_strata][:4], "...")

with tempfile.TemporaryDirectory() as tmp:
    path = Path(tmp) / "my-a2.json"
    path.write_text(serialize_config(surface))
    again = load_config_file(path)
    print("round trip ok:", again == surface)

    # the same file through the command line
    code = main(["decompose", str(path), "N1"])
    print("exit code", code)

    # a broken class is rejected with exit code 4
    data = json.loads(path.read_text())
    data["roots"][0]["class"] = [1, 0, 0, 0, 0, 0, 0]
    path.write_text(json.dumps(data))
    print("exit code for a broken file:", main(["delta", str(path)]))
