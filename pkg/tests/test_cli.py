import json
import subprocess
import sys

import pytest

from qcdclab.cli import main
from qcdclab.families import generate
from qcdclab.core import write_qdimacs


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_gen_stdout_and_file(capsys, tmp_path):
    code, out, _ = run(capsys, "gen", "php:1")
    assert code == 0 and out == write_qdimacs(generate("php", 1))
    p = tmp_path / "f.qdimacs"
    code, _, _ = run(capsys, "gen", "--gen", "double_long_eq:2", "--out", str(p))
    assert code == 0 and p.read_text() == write_qdimacs(generate("double_long_eq", 2))


def test_solve_and_check(capsys, tmp_path):
    trace = tmp_path / "t.trace"
    code, out, _ = run(capsys, "solve", "--gen", "std_dep_trap:2", "--clause-dep", "std",
                       "--pick", "shortest", "--trace-out", str(trace), "--validate",
                       "--expect", "FALSE")
    assert code == 0
    assert out.splitlines()[0].startswith("s FALSE triples=2 ")
    assert "Valid" in out
    code, out, _ = run(capsys, "check", "--gen", "std_dep_trap:2", "--trace", str(trace))
    assert code == 0 and out.startswith("Valid FALSE triples=2")


def test_check_reports_invalid(capsys, tmp_path):
    trace = tmp_path / "t.trace"
    run(capsys, "solve", "--gen", "std_dep_trap:2", "--clause-dep", "std", "--pick", "shortest",
        "--trace-out", str(trace))
    code, out, _ = run(capsys, "check", "--gen", "std_dep_trap:2", "--trace", str(trace),
                       "--config", "ord=lev clause_dep=trv pick=shortest")
    assert code == 1 and out.startswith("Invalid triple ")


def test_expect_mismatch(capsys):
    code, _, _ = run(capsys, "solve", "--gen", "php:1", "--expect", "TRUE")
    assert code == 1


def test_script_replay(capsys, tmp_path):
    code, out, _ = run(capsys, "corpus", "--dle", "2", "--write", str(tmp_path))
    assert code == 0 and out.count("ok   ") == 5
    script = tmp_path / "std_dep_trap_2_std.script.json"
    qd = tmp_path / "std_dep_trap_2_std.qdimacs"
    assert script.exists() and qd.exists()
    code, out, _ = run(capsys, "solve", str(qd), "--script", str(script), "--validate")
    assert code == 0 and out.startswith("s FALSE triples=2")
    code, out, _ = run(capsys, "check", str(qd), "--trace", str(tmp_path / "std_dep_trap_2_std.trace"))
    assert code == 0


def test_bad_script_fails(capsys, tmp_path):
    s = tmp_path / "s.json"
    s.write_text(json.dumps({"config": "ord=lev clause_dep=std pick=scripted",
                             "script": [{"trail": "d 1 : 0", "learn": None}]}))
    code, _, err = run(capsys, "solve", "--gen", "std_dep_trap:2", "--script", str(s))
    assert code == 1 and "script error" in err


def test_deps(capsys):
    code, out, _ = run(capsys, "deps", "--gen", "two_php_and_ct:2", "--scheme", "rrs", "--universal")
    assert code == 0 and out == ""
    code, out, _ = run(capsys, "deps", "--gen", "std_dep_trap:1", "--scheme", "std", "--universal")
    assert len(out.splitlines()) == 3


def test_gauge(capsys):
    code, out, _ = run(capsys, "gauge", "--gen", "double_long_eq:2", "--expect", "2")
    assert code == 0 and out.strip() == "2"
    code, _, err = run(capsys, "gauge", "--gen", "php:2")
    assert code == 1 and "gauge error" in err


def test_oracle(capsys):
    code, out, _ = run(capsys, "oracle", "--gen", "php:2", "--expect", "FALSE")
    assert code == 0 and out.strip() == "FALSE"
    code, out, _ = run(capsys, "oracle", "--random", "3", "--compare", "--cube", "ld")
    assert code == 0 and "solver" in out


def test_suite_csv(capsys, tmp_path):
    out = tmp_path / "s.csv"
    code, msg, _ = run(capsys, "suite", "--grid", "std_dep_trap", "--ns", "2,3", "--out", str(out))
    assert code == 0 and "4 rows" in msg
    lines = out.read_text().splitlines()
    assert lines[0].startswith("family,n,ord") and len(lines) == 5


@pytest.mark.parametrize("argv", [
    ["solve"], ["gen"], ["gen", "nope:2"], ["solve", "/nonexistent.qdimacs"],
    ["suite", "--grid", "bogus"]])
def test_usage_errors(capsys, argv):
    code, _, _ = run(capsys, *argv)
    assert code == 2


def test_argparse_usage_exit():
    with pytest.raises(SystemExit) as e:
        main(["solve", "--ord", "sideways"])
    assert e.value.code == 2


def test_parse_error_exit(capsys, tmp_path):
    p = tmp_path / "bad.qdimacs"
    p.write_text("p cnf 1 1\ne 1 0\n1 -1 0\n")
    code, _, err = run(capsys, "solve", str(p))
    assert code == 2 and "tautological" in err


def test_console_script():
    r = subprocess.run([sys.executable, "-m", "qcdclab.cli", "gen", "php:1"],
                       capture_output=True, text=True)
    assert r.returncode == 0 and r.stdout.startswith("p cnf 2 3")
