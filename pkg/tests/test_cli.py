import io
import subprocess
import sys

import pytest

from veltman import data_path
from veltman.cli import ERROR, FAIL, OK, run
from veltman.formula import parse
from veltman.semantics import forces, frame_valid, load

TWO = str(data_path("two.model"))
WCYCLE = str(data_path("wcycle.frame"))
SAMPLE = str(data_path("sample_il.proof"))
PIC3 = str(data_path("picture3.sketch"))
M_SCHEMA = "p |> q -> (p & []r) |> (q & []r)"


def cli(*argv):
    out, err = io.StringIO(), io.StringIO()
    code = run(list(argv), out, err)
    return code, out.getvalue(), err.getvalue()


def write(tmp_path, name, text):
    path = tmp_path / name
    path.write_text(text, encoding="utf-8")
    return str(path)


# --- examples -------------------------------------------------------------------

def test_eval_example():
    assert cli("eval", TWO, "w", "p |> p") == (OK, "true\n", "")


def test_prove_example():
    assert cli("prove", SAMPLE) == (OK, "accepted: p |> (p & []~p)\n", "")


def test_search_example_reverifies():
    code, out, _ = cli("search", M_SCHEMA, "--max-worlds", "3")
    assert code == FAIL
    head, body = out.split("\n", 1)
    assert head.startswith("countermodel:")
    world = head.rsplit(" ", 1)[1]
    m = load(body)
    assert not forces(m, world, parse(M_SCHEMA))
    assert not frame_valid(m.frame, parse(M_SCHEMA))[0]


# --- one test per subcommand, both exit senses ----------------------------------

def test_parse():
    assert cli("parse", "p->q->r") == (OK, "p -> q -> r\n", "")
    code, out, err = cli("parse", "p |> q |> r")
    assert code == ERROR and out == "" and "associate" in err


def test_validate(tmp_path):
    code, out, _ = cli("validate", TWO)
    assert code == OK and out.startswith("ok")
    bad = write(tmp_path, "bad.frame", "frame\nworld a\nworld b\nr a b\nend\n")
    code, out, _ = cli("validate", bad)
    assert code == FAIL and "s-reflexive" in out


def test_eval_false_and_unknown_world():
    assert cli("eval", TWO, "w", "p")[0] == FAIL
    assert cli("eval", TWO, "nowhere", "p")[0] == ERROR
    assert cli("eval", WCYCLE, "x", "#t")[0] == OK


def test_valid():
    assert cli("valid", TWO, "p |> p") == (OK, "valid\n", "")
    code, out, _ = cli("valid", WCYCLE, "p |> q -> p |> (q & []~p)")
    assert code == FAIL and out.startswith("not valid: fails at world x")


def test_class():
    code, out, _ = cli("class", WCYCLE, "ILW")
    assert code == FAIL and out.startswith("ILW: fails, witness x")
    assert cli("class", TWO, "ilw*")[0] == OK
    assert cli("class", TWO, "ILX")[0] == ERROR


def test_enumerate():
    assert cli("enumerate", "2", "--count-only") == (OK, "3\n", "")
    assert cli("enumerate", "3", "--count-only") == (OK, "34\n", "")
    code, out, _ = cli("enumerate", "2")
    assert code == OK and out.count("# frame") == 3
    assert cli("enumerate", "3", "--filter", "ILM0", "--count-only")[0] == OK
    assert cli("enumerate", "5")[0] == ERROR
    assert cli("enumerate", "-1")[0] == ERROR


def test_sweep():
    code, out, _ = cli("sweep", "2", "ILM")
    assert code == OK and out.rstrip().endswith("result: PASS")
    code, out, _ = cli("sweep", "2", "ILP0", "--direction", "sound", "--lines")
    assert code == OK and out.splitlines()[-1].endswith("pass=yes")


def test_search_none_found():
    code, out, _ = cli("search", "p |> p", "--max-worlds", "2")
    assert code == OK and "not a validity proof" in out
    code, out, _ = cli("search", M_SCHEMA, "--max-worlds", "3", "--class", "ILM")
    assert code == OK and "class ILM" in out


def test_prove_rejected(tmp_path):
    bad = write(tmp_path, "bad.proof", "proof il\n1 taut : p -> q\nqed p -> q\n")
    code, out, _ = cli("prove", bad)
    assert code == FAIL and out.startswith("rejected at line 1")
    garbled = write(tmp_path, "garbled.proof", "proof il\n1 taut p\n")
    assert cli("prove", garbled)[0] == ERROR


def test_close():
    assert cli("close", PIC3, "--rules", "m", "--query", "r y v") == (OK, "true\n", "")
    assert cli("close", PIC3, "--rules", "none", "--query", "r y v") == (FAIL, "false\n", "")
    assert cli("close", PIC3, "--rules", "p", "--query", "exists-mid y v") == (OK, "true (via u)\n", "")
    code, out, _ = cli("close", PIC3, "--rules", "mp")
    assert code == OK and out.startswith("frame\n")
    code, out, _ = cli("close", PIC3, "--dot")
    assert code == OK and out.startswith("digraph")
    assert cli("close", PIC3, "--query", "q y v")[0] == ERROR
    assert cli("close", PIC3, "--rules", "x")[0] == ERROR


def test_close_cycle(tmp_path):
    sk = write(tmp_path, "c.sketch", "sketch\nworld a\nworld b\nr a b\nr b a\nend\n")
    code, out, _ = cli("close", sk)
    assert code == FAIL and out.startswith("not completable")


def test_export():
    code, out, _ = cli("export", TWO, "--dot")
    assert code == OK and "style=dashed" in out and 'label="u\\np"' in out
    assert cli("export", TWO)[0] == ERROR


def test_arith_commands():
    assert cli("gn", "ab", "ab") == (OK, "4\n", "")
    assert cli("ungn", "ab", "7") == (OK, "aaa\n", "")
    assert cli("numeral", "5") == (OK, "S(SS0·(SS0·(S(SS0·0))))\n", "")
    assert cli("omega1", "8") == (OK, "512\n", "")
    assert cli("gn", "ab", "abc")[0] == ERROR


def test_growth(tmp_path):
    csv = tmp_path / "g.csv"
    code, out, _ = cli("growth", "1024", "--csv", str(csv))
    assert code == OK and "length bound" in out
    assert csv.read_text().startswith("n,length")
    assert cli("growth", "1")[0] == ERROR


def test_usage_errors():
    assert cli()[0] == ERROR
    assert cli("frobnicate")[0] == ERROR
    assert cli("parse", "p", "--bogus")[0] == ERROR
    code, _, err = cli("validate", "/nonexistent/file")
    assert code == ERROR and err.startswith("error:")


def test_help_documents_exit_sense():
    out = io.StringIO()
    code = run(["search", "--help"], out, io.StringIO())
    assert code == OK


def test_budget_env(monkeypatch):
    monkeypatch.setenv("IL_BUDGET", "2")
    assert cli("valid", TWO, "p & q -> p")[0] == ERROR


def test_output_is_deterministic():
    assert cli("search", M_SCHEMA) == cli("search", M_SCHEMA)


def test_console_script():
    proc = subprocess.run(
        [sys.executable, "-m", "veltman.cli", "prove", SAMPLE],
        capture_output=True, text=True,
    )
    assert proc.returncode == 0
    assert proc.stdout == "accepted: p |> (p & []~p)\n"
