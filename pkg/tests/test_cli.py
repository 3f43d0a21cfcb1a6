import json

import pytest

from lamrun.cli import main

DEFS = "I = \\z.z;\n"


@pytest.fixture
def defs_file(tmp_path):
    path = tmp_path / "defs.lam"
    path.write_text(DEFS, encoding="utf-8")
    return str(path)


def test_parse_command(capsys, defs_file):
    assert main(["parse", "(\\y.\\x.x y) I I", "--defs", defs_file]) == 0
    out = capsys.readouterr().out
    assert "size: 11" in out and "closed: True" in out


def test_parse_unbound_is_input_error(capsys):
    assert main(["parse", "x"]) == 3


def test_run_with_jsonl_trace(capsys, defs_file):
    code = main(["run", "(\\y.\\x.x y) I I", "--machine", "iam",
                 "--trace", "jsonl", "--defs", defs_file, "--fuel", "100"])
    assert code == 0
    lines = capsys.readouterr().out.strip().splitlines()
    events = [json.loads(line) for line in lines[:-1]]
    assert len(events) == 19  # initial row plus 18 transitions
    report = json.loads(lines[-1])
    assert report["length"] == 18


def test_run_table_trace(capsys, defs_file):
    assert main(["run", "I I", "--machine", "kam", "--trace", "table",
                 "--defs", defs_file, "--fuel", "50"]) == 0
    out = capsys.readouterr().out
    assert "label" in out and "abs" in out


def test_run_fuel_exit_code(capsys):
    assert main(["run", "(\\x.x x) (\\x.x x)", "--machine", "kam", "--fuel", "20"]) == 2


def test_run_siam(capsys, defs_file):
    assert main(["run", "(\\y.\\x.x y) I I", "--machine", "siam",
                 "--defs", defs_file, "--fuel", "100"]) == 0
    report = json.loads(capsys.readouterr().out.strip().splitlines()[-1])
    assert report["length"] == 18


def test_compare_json(capsys, defs_file):
    assert main(["compare", "(\\y.\\x.x y) I I", "--defs", defs_file,
                 "--format", "json", "--fuel", "1000"]) == 0
    row = json.loads(capsys.readouterr().out)
    assert row["machines"]["kam"]["length"] == 9


def test_types_weights(capsys, defs_file):
    assert main(["types", "(\\y.\\x.x y) I I", "--weights", "--defs", defs_file]) == 0
    out = capsys.readouterr().out
    assert "w_kam: 9" in out and "w_iam: 18" in out


def test_types_divergent_exit(capsys):
    assert main(["types", "(\\x.x x) (\\x.x x)", "--fuel", "100"]) == 2


def test_check_single_term(capsys, defs_file):
    assert main(["check", "iam-jam", "(\\y.\\x.x y) I I",
                 "--defs", defs_file, "--fuel", "1000"]) == 0
    doc = json.loads(capsys.readouterr().out.strip())
    assert doc["passed"] is True


def test_check_corpus(capsys):
    assert main(["check", "quadratic", "--corpus", "5,20,25", "--fuel", "100000"]) == 0


def test_check_requires_input(capsys):
    assert main(["check", "weights"]) == 3


def test_bench_family(capsys):
    assert main(["bench", "--family", "tn", "--range", "1..4",
                 "--format", "csv", "--fuel", "10000"]) == 0
    out = capsys.readouterr().out
    assert out.startswith("family,machine,length")
    assert "t_4,iam,28" in out


def test_env_fuel(monkeypatch, capsys):
    monkeypatch.setenv("LAMRUN_FUEL", "25")
    assert main(["run", "(\\x.x x) (\\x.x x)", "--machine", "kam"]) == 2


def test_term_from_file(tmp_path, capsys):
    path = tmp_path / "term.lam"
    path.write_text("(\\x.x x) (\\y.y)", encoding="utf-8")
    assert main(["parse", f"@{path}"]) == 0
    assert "size: 7" in capsys.readouterr().out


def test_compare_machine_selection(capsys, defs_file):
    assert main(["compare", "I I", "--machines", "kam,ham-k", "--defs", defs_file,
                 "--format", "json", "--fuel", "100"]) == 0
    row = json.loads(capsys.readouterr().out)
    assert set(row["machines"]) == {"kam", "ham-k"}


def test_check_inconclusive_is_fuel_exit(capsys):
    assert main(["check", "iam-jam", "(\\x.x x) (\\x.x x)", "--fuel", "100"]) == 2


def test_run_writes_out_file(tmp_path, capsys, defs_file):
    out = tmp_path / "trace.jsonl"
    assert main(["run", "I I", "--machine", "iam", "--trace", "jsonl",
                 "--defs", defs_file, "--fuel", "100", "--out", str(out)]) == 0
    lines = out.read_text(encoding="utf-8").strip().splitlines()
    assert len(lines) == 6  # init + 4 transitions + report
