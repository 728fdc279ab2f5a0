import io
import json
import subprocess
import sys

import pytest

from metaplectic import cli, quotient_oracle
from metaplectic.cli import dumps, render_md, run
from metaplectic.cyclo import OracleDisagreement


def call(argv):
    buf = io.StringIO()
    code = run(argv, out=buf)
    return code, buf.getvalue()


@pytest.fixture
def char_file(tmp_path):
    def make(d, name="chi.json"):
        f = tmp_path / name
        f.write_text(json.dumps(d))
        return str(f)
    return make


def test_hilbert_report_shape():
    code, out = call(["hilbert", "--p", "5", "--n", "2", "--a", "0,2", "--b", "1,1"])
    assert code == 0
    rep = json.loads(out)
    assert rep["schema"] == "ktype-report/1" and rep["command"] == "hilbert"
    assert rep["report"]["exp"] == 1 and rep["ok"]
    man = rep["manifest"]
    assert man["field"] == {"p": 5, "n": 2, "precision": 4}
    assert "wall_clock_seconds" not in man


def test_timing_flag_adds_wall_clock():
    _, out = call(["hilbert", "--p", "5", "--n", "2", "--a", "1,1", "--b", "1,1", "--timing"])
    assert "wall_clock_seconds" in json.loads(out)["manifest"]


def test_output_is_deterministic(char_file):
    f = char_file({"teich_exp": 1})
    argv = ["hecke", "--p", "5", "--n", "2", "--l", "2", "--char", f]
    a, b = call(argv), call(argv)
    assert a == b and a[0] == 0
    dims = json.loads(a[1])["report"]
    assert "3" in a[1] and dims


def test_hecke_dims_from_all_routes(char_file):
    f = char_file({"teich_exp": 0})
    code, out = call(["hecke", "--p", "5", "--n", "2", "--l", "2", "--char", f])
    assert code == 0
    text = json.dumps(json.loads(out)["report"])
    for col in ("closed-form", "brute-force", "oracle"):
        assert col in text


def test_markdown_is_a_function_of_the_json():
    code, out = call(["verify-splitting", "--p", "13", "--n", "4", "--subgroup", "T1_full"])
    rep = json.loads(out)
    md = render_md(rep)
    assert md == render_md(json.loads(dumps(rep)))
    _, md_out = call(["verify-splitting", "--p", "13", "--n", "4", "--subgroup", "T1_full",
                      "--format", "md"])
    assert md_out == md
    assert md.startswith("# verify-splitting")


@pytest.mark.parametrize("argv", [
    ["hecke", "--p", "5", "--n", "2", "--l", "0"],
    ["hilbert", "--p", "6", "--n", "2", "--a", "0,1", "--b", "0,1"],
    ["hilbert", "--p", "5", "--n", "2", "--bogus"],
    ["char", "validate", "--p", "5", "--n", "2", "--char", "/nonexistent.json"],
    ["nonsense"],
])
def test_usage_errors_exit_2(argv):
    assert call(argv)[0] == 2


def test_bad_epsilon_is_a_usage_error(char_file):
    f = char_file({"teich_exp": 1, "epsilon_exp": 2})
    assert call(["char", "validate", "--p", "5", "--n", "2", "--char", f])[0] == 2


def test_budget_exhaustion_exits_3():
    code, _ = call(["oracle", "hom-dim", "--p", "13", "--n", "4", "--l", "3"])
    assert code == 3


def test_mismatch_exits_4(monkeypatch):
    monkeypatch.setitem(cli.COMMANDS, "verify-cocycle", lambda args, ctx: (None, {"ok": False}))
    assert call(["verify-cocycle"])[0] == 4


def test_oracle_disagreement_exits_5(monkeypatch):
    def boom(values, what):
        raise OracleDisagreement(what)
    monkeypatch.setattr(quotient_oracle, "agree", boom)
    code, _ = call(["oracle", "hom-dim", "--p", "5", "--n", "2", "--l", "1"])
    assert code == 5


def test_gl_hecke_command(char_file):
    f = char_file({"slots": [{"teich_exp": 0}, {"teich_exp": 0}]}, "gl.json")
    code, out = call(["gl-hecke", "--p", "5", "--n", "2", "--l", "1", "--char2", f])
    assert code == 0
    assert json.loads(out)["ok"]


def test_validate_beta_prime_command():
    code, out = call(["validate-beta-prime", "--p", "5", "--n", "2", "--samples", "60"])
    assert code == 0
    assert json.loads(out)["report"]["adopted"] == "transcribed"


def test_console_script_entry_point():
    r = subprocess.run([sys.executable, "-m", "metaplectic.cli", "hilbert", "--p", "5", "--n", "2",
                        "--a", "1,1", "--b", "1,1"], capture_output=True, text=True)
    assert r.returncode == 0 and json.loads(r.stdout)["report"]["exp"] == 0


def test_acceptance_subset_command():
    r = subprocess.run([sys.executable, "-m", "metaplectic.cli", "acceptance", "--criterion", "1",
                        "--criterion", "10"], capture_output=True, text=True)
    assert r.returncode == 0
    lines = [x for x in r.stderr.splitlines() if x.startswith("criterion")]
    assert len(lines) == 2 and all(" PASS " in x for x in lines)
