"""Command-line behavior: determinism, formats, and exit codes."""

import io
import json

import pytest

from physborn.cli import main
from physborn.scenario_io import dump_builtin


def run(argv):
    out, err = io.StringIO(), io.StringIO()
    code = main(argv, out, err)
    return code, out.getvalue(), err.getvalue()


def test_prob_forward_value():
    code, out, err = run([
        "prob", "--scenario", "reference", "--rule", "forward",
        "--cond", "I@t0", "--outcome", "Fup@t1",
    ])
    assert code == 0 and err == ""
    assert "value" in out and "0.5" in out


def test_prob_approx_retrodiction():
    code, out, _ = run([
        "prob", "--scenario", "reference", "--rule", "approx",
        "--cond", "Fup@t1", "--outcome", "I@t0",
    ])
    assert code == 0
    assert any(line.split()[-1] == "1" for line in out.splitlines()
               if line.startswith("value"))


def test_verify_verdict():
    code, out, _ = run([
        "verify", "--scenario", "reference",
        "--cond", "Fup@t1", "--outcomes", "I,notI@t0",
    ])
    assert code == 0
    assert "verdict" in out and "true" in out


def test_byte_determinism_across_runs():
    commands = [
        ["demo", "intro"],
        ["prob", "--scenario", "reference", "--rule", "forward",
         "--cond", "I@t0", "--outcome", "Fup@t1"],
        ["verify", "--scenario", "reference",
         "--cond", "I@t0", "--outcomes", "Fup,Fdown,blocked@t1"],
    ]
    for argv in commands:
        first = run(argv)
        second = run(argv)
        assert first == second
        assert first[0] == 0


def test_json_and_csv_formats():
    base = ["prob", "--scenario", "reference", "--rule", "forward",
            "--cond", "I@t0", "--outcome", "Fup@t1"]
    code, out, _ = run(["--json"] + base)
    assert code == 0
    doc = json.loads(out)
    assert abs(doc["value"] - 0.5) <= 1e-9
    code, out, _ = run(["--csv"] + base)
    assert code == 0
    assert "value,0.5" in out


def test_scenario_list_and_dump(tmp_path):
    code, out, _ = run(["scenario", "list"])
    assert code == 0 and out.splitlines() == ["reference", "sg-observers"]
    code, out, _ = run(["scenario", "dump", "reference"])
    assert code == 0 and out.strip() == dump_builtin("reference")


def test_validate_round_trip(tmp_path):
    path = tmp_path / "ref.json"
    path.write_text(dump_builtin("reference"))
    code, out, _ = run(["validate", str(path)])
    assert code == 0 and "passed" in out


def test_exit_code_usage_errors():
    code, _, err = run(["prob", "--scenario", "no-such", "--rule", "forward",
                        "--cond", "I@t0", "--outcome", "Fup@t1"])
    assert code == 1 and "usage error" in err
    code, _, err = run(["prob", "--scenario", "reference", "--rule", "forward",
                        "--cond", "mystery@t0", "--outcome", "Fup@t1"])
    assert code == 1
    code, _, err = run(["prob", "--scenario", "reference", "--rule", "forward",
                        "--cond", "I@t9", "--outcome", "Fup@t1"])
    assert code == 1
    code, _, err = run(["scenario", "dump"])
    assert code == 1
    code, _, err = run(["demo", "outro"])
    assert code == 1
    # argparse-level failure (missing required option)
    code, _, err = run(["prob", "--rule", "forward"])
    assert code == 1


def test_exit_code_validation_errors(tmp_path):
    doc = json.loads(dump_builtin("reference"))
    doc["steps"][0][0][0] = [9.0, 0.0]
    path = tmp_path / "broken.json"
    path.write_text(json.dumps(doc))
    code, _, err = run(["validate", str(path)])
    assert code == 2 and "step 0" in err
    # wrong regime for the indices is also a validation failure
    code, _, err = run(["prob", "--scenario", "reference", "--rule", "forward",
                        "--cond", "I@t0", "--outcome", "Fup@ts"])
    assert code == 2


def test_exit_code_mathematical_refusal(tmp_path):
    # blocked at the source time has no overlap with the physical family
    code, _, err = run(["prob", "--scenario", "reference", "--rule", "forward",
                        "--cond", "blocked@ts", "--outcome", "Fup@t1"])
    assert code == 3 and "refused" in err


def _no_record_scenario(tmp_path):
    import numpy as np

    from physborn.model import Model, PhysicalFamily, TimeGrid
    from physborn.scenario_io import serialize

    h = np.array([[1, 1], [1, -1]], dtype=complex) / np.sqrt(2)
    m = Model(2, 1, TimeGrid((0.0, 1.0, 2.0)), (h, h))
    fam = PhysicalFamily((np.eye(2, dtype=complex),) * 3)
    preds = {"A": np.diag([1.0, 0]).astype(complex),
             "B": np.diag([0, 1.0]).astype(complex)}
    path = tmp_path / "norecord.json"
    path.write_text(serialize("no-record", m, fam, preds, ("t0", "t1", "t2")))
    return path


def test_sequence_refusal_exits_three(tmp_path):
    path = _no_record_scenario(tmp_path)
    code, _, err = run(["prob", "--scenario", str(path), "--rule", "sequence",
                        "--cond", "A@t0", "--outcome", "B@t1",
                        "--outcome2", "A@t2"])
    assert code == 3 and "refused" in err


def test_measure_table(tmp_path):
    code, out, _ = run(["measure", "--scenario", "reference",
                        "--start", "I@t0", "--outcomes", "Fup,Fdown@t1"])
    assert code == 0
    assert "P[Fup]" in out and "is_measurement" in out
    assert "total" in out
