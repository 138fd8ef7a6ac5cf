import json
import subprocess
import sys

import pytest

from halo.cli import main, tagged


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr().out
    return code, out


def test_word_example(capsys):
    code, out = run(capsys, "word", "--slope", "5/3", "--l1", "1")
    data = json.loads(out)
    assert code == 0 and data["blocks"] == [2, 2, 1] and data["blocks_tag"] == "exact"


def test_admissible_example(capsys):
    code, out = run(capsys, "admissible", "--slope", "sqrt2", "--blocks", "2,2")
    assert code == 0 and json.loads(out)["admissible"] is False


def test_cf_check(capsys):
    code, out = run(capsys, "cf", "--rule", "paper", "--check-C", "1,5,10")
    data = json.loads(out)
    assert code == 0 and data["well_approximated"]["verdict"] == "well-approximated"
    assert data["cf"]["log_domain"] is True


def test_log_domain_tag(capsys):
    _, out = run(capsys, "cf", "--rule", "desk", "--convergents", "6")
    data = json.loads(out)
    big = [c for c in data["convergents"] if c["exactness"] == "log-domain"]
    assert big and big[0]["q_tag"] == "log-domain"


def test_precondition_exit_code(capsys):
    assert main(["word", "--slope", "3/5"]) == 2
    assert main(["word", "--slope", "sqrt2"]) == 2  # needs --k
    assert main(["cf", "--slope", "sqrt2", "--rule", "desk"]) == 2


def test_inconclusive_exit_code(capsys):
    assert main(["roof", "--rule", "desk", "--steps", "5", "--budget", "0"]) == 3


def test_roof_csv(capsys):
    code, out = run(capsys, "roof", "--constant", "0.5,1,0.5", "--no-selector", "--steps", "10", "--format", "csv")
    assert code == 0 and out.splitlines()[0] == "k,n,r,bound,beta"


def test_output_dir(tmp_path, monkeypatch, capsys):
    monkeypatch.setenv("HALO_OUTPUT_DIR", str(tmp_path))
    assert main(["render", "cutting", "--slope", "sqrt2", "--n", "12", "--out", "cut.svg"]) == 0
    text = (tmp_path / "cut.svg").read_text()
    assert text.startswith("<svg") and text.count("<line") == 12


def test_deterministic_sweep(capsys):
    _, a = run(capsys, "growth", "--rays", "500", "--seed", "4")
    _, b = run(capsys, "growth", "--rays", "500", "--seed", "4")
    assert a == b


def test_tags_helper():
    out = tagged({"x": 1, "y": 0.5, "z": "√2", "w": {"ln_lower": 1.0, "ln_upper": 2.0}, "s": "text"})
    assert out["x_tag"] == "exact" and out["y_tag"].startswith("float±")
    assert out["z_tag"] == "exact" and out["w_tag"] == "log-domain"
    assert out["w"]["ln_lower_tag"] == "log-domain" and "s_tag" not in out


def test_console_entry_point():
    res = subprocess.run([sys.executable, "-m", "halo.cli", "inadmissible", "--slope", "sqrt2", "--k", "2"],
                         capture_output=True, text=True)
    assert res.returncode == 0 and json.loads(res.stdout)["k"] == 2
