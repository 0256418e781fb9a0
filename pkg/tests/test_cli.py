import json
import subprocess
import sys

import jsonschema
import pytest

from cftk.cli import run
from cftk.report import RunConfig, load_config, load_schema

SCHEMA = load_schema()

COMMANDS = [
    "virasoro gram --c 1/2 --h 0 --level 2",
    "virasoro irrep --c 1/2 --h 1/16 --cutoff 5",
    "virasoro norm-bound --t 1 --z 0.3 --r 0.4",
    "semigroup evolve --koenigs mobius:a=1/2 --t 0.5 --samples 8",
    "semigroup check --koenigs mobius:a=1/2 --t 0.5",
    "annulus exact --cutoff 4",
    "annulus trotter --cutoff 4 --ns 8,16",
    "annulus covariance --cutoff 10 --compare-levels 6 --N 8 --j 0",
    "fermion basis --cutoff 3/2",
    "fermion borcherds --samples 20",
    "fermion invariance --state nu --cutoff 2",
    "fermion char --cutoff 2",
    "fermion segal --r 1/3 --k 2",
    "intertwiner descend --cutoff 2",
    "intertwiner check --cutoff 2 --samples 10",
    "code predicates --builtin hamming8",
    "code lattice --builtin hamming8",
    "code theta --builtin repetition(4) --norm-cutoff 3",
    "code cocycle --builtin repetition(4) --eps i",
    "code braid --p 1100 --q 1110 --kind fermionic",
]


def _run(cmd, *extra):
    return run(cmd.split() + list(extra))


@pytest.mark.parametrize("cmd", COMMANDS)
def test_reports_validate_and_are_deterministic(cmd):
    code, text = _run(cmd)
    assert code == 0, text
    jsonschema.validate(json.loads(text), SCHEMA)
    assert _run(cmd)[1] == text


def test_region_svg_and_json(tmp_path):
    a, b = tmp_path / "a", tmp_path / "b"
    args = "annulus region --koenigs identity --t 0.6931471805599453 --points 0.75 0.25"
    code, text = _run(args, "--out", str(a))
    assert code == 0
    rep = json.loads(text)
    jsonschema.validate(rep, SCHEMA)
    assert rep["metrics"]["membership"] == {"0.75+0i": "inside", "0.25+0i": "outside"}
    _run(args, "--out", str(b))
    assert (a / "annulus-region.svg").read_bytes() == (b / "annulus-region.svg").read_bytes()
    assert (a / "annulus-region.json").read_text() == text


def test_documented_cli_examples():
    rep = json.loads(_run("virasoro gram --c 1/2 --h 0 --level 2")[1])
    assert rep["metrics"]["gram"] == [["1/4", "0"], ["0", "0"]] and rep["status"] == "pass"
    rep = json.loads(_run("code lattice --builtin hamming8 --report roots")[1])
    assert rep["metrics"] == {"root_count": 240, "even": True, "det": "1"}
    rep = json.loads(_run("semigroup check --koenigs mobius:a=1/2 --t 0.5")[1])
    assert rep["metrics"]["max_residual"] < 1e-8 and rep["status"] == "pass"


def test_failure_exit_code():
    code, text = _run("code cocycle --builtin repetition(2) --eps i")
    assert code == 1
    rep = json.loads(text)
    assert rep["status"] == "fail" and rep["metrics"]["result"] == "obstructed"
    code, _ = _run("intertwiner check --cutoff 2 --samples 10 --mutate")
    assert code == 1


@pytest.mark.parametrize("argv", [[], ["nope"], ["virasoro", "gram", "--c", "1/2"],
                                  ["code", "braid", "--p", "12", "--q", "11", "--kind", "bosonic"],
                                  ["code", "lattice"],
                                  ["virasoro", "norm-bound", "--t", "1", "--z", "0.8", "--r", "0.5"]])
def test_usage_errors(argv):
    code, text = run(argv)
    assert code == 2
    rep = json.loads(text)
    jsonschema.validate(rep, SCHEMA)
    assert rep["check"] == "error" and rep["metrics"]["message"]


def test_csv_format():
    code, text = _run("code lattice --builtin hamming8 --format csv")
    assert code == 0
    assert text.splitlines()[0] == "key,value"
    assert "metrics.root_count,240" in text


def test_config_precedence(tmp_path, monkeypatch):
    ini = tmp_path / "c.ini"
    ini.write_text("[cftk]\nseed = 5\nfermion_cutoff = 2\ntrotter_ns = 4, 8\n")
    monkeypatch.delenv("CFTK_SEED", raising=False)
    assert load_config(ini).seed == 5
    assert load_config(ini).trotter_ns == (4, 8)
    assert load_config(ini, env={"CFTK_SEED": "9"}).seed == 9
    assert load_config(ini, seed=3, env={"CFTK_SEED": "9"}).seed == 3
    empty = tmp_path / "e.ini"
    empty.write_text("")
    assert load_config(empty, env={}) == RunConfig()
    bad = tmp_path / "b.ini"
    bad.write_text("[cftk]\nwhat = 1\n")
    with pytest.raises(ValueError):
        load_config(bad)


def test_seed_changes_sampled_report(monkeypatch):
    monkeypatch.delenv("CFTK_SEED", raising=False)
    a = json.loads(_run("semigroup evolve --koenigs identity --t 0.1 --samples 3")[1])
    b = json.loads(_run("semigroup evolve --koenigs identity --t 0.1 --samples 3", "--seed", "4")[1])
    assert a["metrics"]["z"] != b["metrics"]["z"]
    monkeypatch.setenv("CFTK_SEED", "4")
    c = json.loads(_run("semigroup evolve --koenigs identity --t 0.1 --samples 3")[1])
    assert c["metrics"]["z"] == b["metrics"]["z"]


def test_empty_config_matches_defaults(tmp_path, monkeypatch):
    monkeypatch.delenv("CFTK_SEED", raising=False)
    empty = tmp_path / "e.ini"
    empty.write_text("")
    cmd = "fermion borcherds --samples 10"
    assert _run(cmd, "--config", str(empty))[1] == _run(cmd)[1]


def test_out_dir_writes_report(tmp_path):
    code, text = _run("fermion char", "--out", str(tmp_path))
    assert (tmp_path / "fermion-char.json").read_text() == text


def test_suite_fast_passes_and_mutation_names_check(monkeypatch):
    monkeypatch.delenv("CFTK_SEED", raising=False)
    code, text = run(["suite", "--profile", "fast"])
    rep = json.loads(text)
    jsonschema.validate(rep, SCHEMA)
    assert code == 0 and rep["status"] == "pass"
    assert run(["suite", "--profile", "fast"])[1] == text
    code, text = run(["suite", "--profile", "fast", "--mutate"])
    rep = json.loads(text)
    assert code == 1 and rep["metrics"]["failing"] == ["intertwiner-descent"]


def test_console_script_entry_point():
    out = subprocess.run([sys.executable, "-m", "cftk.cli", "code", "braid", "--p", "11",
                          "--q", "11", "--kind", "semionic"], capture_output=True, text=True)
    assert out.returncode == 0
    assert json.loads(out.stdout)["metrics"]["sign"] == ["-1", "0"]


def test_suite_full_profile_and_timings_stay_out_of_json():
    from cftk.suite import CRITERIA, run_suite
    timings = {}
    rep = run_suite("full", RunConfig(), timings=timings)
    assert rep.status == "pass"
    assert set(timings) == {name for name, _, _ in CRITERIA.values()}
    assert "time" not in rep.dumps()
