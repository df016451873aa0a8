import json
import subprocess
import sys
from pathlib import Path

import pytest

from plclab import experiments as ex
from plclab.cli import main

SPECS = Path(__file__).resolve().parent.parent / "specs"

PERIODIC_SPEC = """
[experiment]
name = golden_small
checkers = th_main

[source]
kind = periodic
period = 1

[params]
p = 11
k = {k}
points = 1:5
"""


def write(tmp_path, text, name="spec.ini"):
    path = tmp_path / name
    path.write_text(text)
    return str(path)


def test_empty_checker_list_is_a_validation_error(tmp_path):
    text = "[experiment]\nname = x\ncheckers =\n[source]\nkind = periodic\nperiod = 1\n"
    with pytest.raises(ex.SpecError, match="checkers"):
        ex.load_spec(write(tmp_path, text))
    assert main(["run", write(tmp_path, text), "--out", str(tmp_path)]) == ex.EXIT_ERROR


def test_unknown_checker_and_missing_field(tmp_path):
    bad = "[experiment]\nname = x\ncheckers = nope\n[source]\nkind = periodic\nperiod = 1\n"
    with pytest.raises(ex.SpecError, match="unknown checker"):
        ex.load_spec(write(tmp_path, bad))
    missing = "[experiment]\nname = x\ncheckers = th_main\n[source]\nkind = periodic\nperiod = 1\n"
    spec = ex.load_spec(write(tmp_path, missing))
    with pytest.raises(ex.SpecError, match="'p'"):
        ex.run(spec)


def test_bad_source_is_reported_with_section(tmp_path):
    text = "[experiment]\nname = x\ncheckers = complexity\n[source]\nkind = periodic\n"
    with pytest.raises(ex.SpecError, match=r"\[source\]"):
        ex.load_spec(write(tmp_path, text))


def test_thue_morse_sweep_writes_component_table(tmp_path):
    assert main(["run", str(SPECS / "thue_morse_graphs.ini"), "--out", str(tmp_path)]) == 0
    rows = (tmp_path / "thue_morse_graphs.factor_graph.csv").read_text().splitlines()
    assert rows[0].startswith("n,components,edges,P_2n,edge_law")
    assert len(rows) == 9
    assert all(",true,true," in r for r in rows[1:])


def test_periodic_certificate_bundle(tmp_path):
    assert main(["run", str(SPECS / "periodic_one_p11.ini"), "--out", str(tmp_path)]) == 0
    data = json.loads((tmp_path / "periodic_one_p11.json").read_text())
    checkers = {v["checker"] for v in data["verdicts"]}
    assert checkers == {"lmad_periodic", "th_main"}
    assert data["schema"] == ex.SCHEMA_VERSION and len(data["spec_hash"]) == 16


def test_reruns_are_byte_identical(tmp_path):
    a, b = tmp_path / "a", tmp_path / "b"
    spec = str(SPECS / "fibonacci_concat_p2.ini")
    main(["run", spec, "--out", str(a)])
    main(["run", spec, "--out", str(b)])
    names = sorted(p.name for p in a.iterdir())
    assert names == sorted(p.name for p in b.iterdir())
    for n in names:
        assert (a / n).read_bytes() == (b / n).read_bytes()


def test_compare_identical_and_monotonicity(tmp_path, capsys):
    s4 = write(tmp_path, PERIODIC_SPEC.format(k=4), "k4.ini")
    s8 = write(tmp_path, PERIODIC_SPEC.format(k=8), "k8.ini")
    main(["run", s4, "--out", str(tmp_path / "r4")])
    main(["run", s4, "--out", str(tmp_path / "r4b")])
    main(["run", s8, "--out", str(tmp_path / "r8")])
    capsys.readouterr()
    j4, j4b, j8 = (str(tmp_path / d / "golden_small.json") for d in ("r4", "r4b", "r8"))
    assert main(["compare", j4, j4b]) == 0
    report = json.loads(capsys.readouterr().out)
    assert report["identical"] and report["differences"] == []
    assert main(["compare", j4, j8]) == ex.EXIT_HYPOTHESIS
    report = json.loads(capsys.readouterr().out)
    mono = report["epsilon_monotonicity"]
    assert mono and all(r["non_increasing"] for r in mono)


def test_corrupted_record_is_a_schema_error(tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    with pytest.raises(ex.SchemaError):
        ex.load_record(str(bad))
    wrong = tmp_path / "wrong.json"
    wrong.write_text(json.dumps({"schema": 99}))
    assert main(["compare", str(wrong), str(wrong)]) == ex.EXIT_ERROR


def test_exit_code_priority():
    spec = ex.parse_spec(PERIODIC_SPEC.format(k=4))
    rec = ex.ResultRecord(spec, [{"status": "hypothesis_failed"}, {"status": "precision_limited"}], {}, [], [])
    assert rec.exit_code() == ex.EXIT_PRECISION
    rec.errors.append({"checker": "x", "message": "boom"})
    assert rec.exit_code() == ex.EXIT_ERROR
    rec = ex.ResultRecord(spec, [{"status": "hypothesis_failed"}, {"status": "applies"}], {}, [], [])
    assert rec.exit_code() == ex.EXIT_HYPOTHESIS


def test_hypothesis_failure_sets_exit_code(tmp_path):
    text = PERIODIC_SPEC.format(k=4).replace("points = 1:5", "points = 1:5\nm = 10000000000000")
    assert main(["run", write(tmp_path, text), "--out", str(tmp_path)]) == ex.EXIT_HYPOTHESIS


def test_cli_overrides_k(tmp_path):
    spec = write(tmp_path, PERIODIC_SPEC.format(k=4))
    main(["run", spec, "--out", str(tmp_path), "--k", "8"])
    data = json.loads((tmp_path / "golden_small.json").read_text())
    assert data["spec"]["params"]["k"] == "8"
    assert {v["data"]["k"] for v in data["verdicts"]} == {8}


def test_list_and_describe(capsys):
    assert main(["list-sources"]) == 0
    assert "thue-morse" in capsys.readouterr().out
    assert main(["describe-checker", "factor_graph"]) == 0
    assert "G_n" in capsys.readouterr().out
    assert main(["describe-checker", "nope"]) == ex.EXIT_ERROR


def test_console_entry_point_runs(tmp_path):
    proc = subprocess.run([sys.executable, "-m", "plclab", "describe-checker", "th_da"], capture_output=True,
                          text=True, check=False)
    assert proc.returncode == 0 and "unipotent" in proc.stdout


@pytest.mark.parametrize("spec", sorted(p.name for p in SPECS.glob("*.ini")))
def test_every_sample_spec_runs_cleanly(spec, tmp_path):
    assert main(["run", str(SPECS / spec), "--out", str(tmp_path)]) == 0
