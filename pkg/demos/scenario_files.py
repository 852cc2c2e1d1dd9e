"""Drive the simulator from a JSON scenario file.

Scenarios bundle the dynamics, the physical family, named predicates,
and grid labels. The built-in "reference" scenario round-trips through
text, and the same file feeds the command line.
"""

import io
import tempfile
from pathlib import Path

from physborn.cli import main
from physborn.scenario_io import dump_builtin, loads

text = dump_builtin("reference")
print("serialized reference scenario:", len(text), "bytes")

sc = loads(text, "reference")
print("predicates:", ", ".join(sorted(sc.predicates)))
print("grid labels:", ", ".join(sc.grid_names))
print()

with tempfile.TemporaryDirectory() as tmp:
    path = Path(tmp) / "reference.json"
    path.write_text(text)

    for argv in (
        ["validate", str(path)],
        ["prob", "--scenario", str(path), "--rule", "forward",
         "--cond", "I@t0", "--outcome", "Fup@t1"],
        ["verify", "--scenario", str(path),
         "--cond", "Fup@t1", "--outcomes", "I,notI@t0"],
    ):
        out, err = io.StringIO(), io.StringIO()
        code = main(argv, out, err)
        print("$ physborn " + " ".join(argv).replace(str(path), "reference.json"))
        print(out.getvalue(), end="")
        if err.getvalue():
            print(err.getvalue(), end="")
        print("(exit", str(code) + ")")
        print()
