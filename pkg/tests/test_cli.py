import json
from pathlib import Path

import pytest
from click.testing import CliRunner

from shiftspec.cli import main

CONFIGS = Path(__file__).resolve().parent.parent / "configs"


def run(*args):
    return CliRunner().invoke(main, list(args))


def test_analyze_builtins_text():
    res = run("analyze", "builtin:C3")
    assert res.exit_code == 0
    assert "spec           yes" in res.output
    res = run("analyze", "builtin:C1")
    assert "weak_spec      yes" in res.output and "strobo         no" in res.output


def test_analyze_d1_flags_discrepancy():
    res = run("analyze", "builtin:D1")
    assert res.exit_code == 0
    assert "DISCREPANCY weak_spec" in res.output


def test_analyze_json_is_deterministic():
    a = run("--seed", "5", "analyze", "builtin:D3", "--json").output
    b = run("--seed", "5", "analyze", "builtin:D3", "--json").output
    assert a == b
    doc = json.loads(a)
    assert doc["verdicts"]["strobo"]["value"] == "yes"
    assert doc["verdicts"]["weak_spec"]["value"] == "no"


@pytest.mark.parametrize("path", sorted(CONFIGS.glob("*.toml")), ids=lambda p: p.stem)
def test_analyze_shipped_configs(path):
    assert run("analyze", str(path)).exit_code == 0


def test_input_errors(tmp_path):
    assert run("analyze", "builtin:NOPE").exit_code == 2
    assert run("analyze", str(tmp_path / "missing.toml")).exit_code == 2
    bad = tmp_path / "bad.toml"
    bad.write_text('kind = "generalized_shift"\n[map]\nrule = "affine"\n')
    res = run("analyze", str(bad))
    assert res.exit_code == 2
    bad.write_text("kind = = 1\n")
    assert run("analyze", str(bad)).exit_code == 2


def test_unknown_verdict_exit_code(tmp_path):
    # evens go to 3n + 1 and odds step up; five steps find neither a cycle nor an escape
    cfg = tmp_path / "wander.toml"
    cfg.write_text(
        'kind = "generalized_shift"\n[index_set]\nkind = "integers"\n'
        '[map]\nrule = "piecewise"\n'
        'branches = [{guard = "residue", residue = 0, modulus = 2, rule = "affine", a = 3, b = 1}]\n'
        'default = {rule = "affine", a = 1, b = 1}\n'
        "[budget]\nmagnitude = 50\nsteps = 5\n"
    )
    res = run("analyze", str(cfg))
    assert res.exit_code == 3
    assert "weak_spec      unknown" in res.output
    assert run("witness", str(cfg), "--kind", "trace", "--instance", "builtin:C3").exit_code == 3


def test_witness_trace_c3(tmp_path):
    out = tmp_path / "w.json"
    res = run("witness", "builtin:C3", "--kind", "trace", "--out", str(out))
    assert res.exit_code == 0, res.output
    doc = json.loads(out.read_text())
    assert doc["verified"] and all(c["ok"] for c in doc["checks"])
    assert doc["tracer"]["overrides"] == [[0, 1], [1, 1]]


def test_witness_trace_config_instance():
    res = run("witness", str(CONFIGS / "shift_by_two.toml"), "--kind", "trace")
    assert res.exit_code == 0, res.output
    assert json.loads(res.output)["verified"]


def test_witness_rho_c2():
    res = run("witness", "builtin:C2", "--kind", "rho", "--sequence", "naturals:500")
    assert res.exit_code == 0, res.output
    doc = json.loads(res.output)
    assert doc["rho_kind"] == "all_periodic" and doc["convergence_verified"]


def test_witness_refusals():
    res = run("witness", "builtin:C1", "--kind", "rho")
    assert res.exit_code == 2
    assert "InjectivityCollision(first=1, second=-1)" in res.output
    assert run("witness", "builtin:D3", "--kind", "trace").exit_code == 2
    assert run("witness", "builtin:C2", "--kind", "trace").exit_code == 2


def test_witness_fort():
    res = run("witness", "builtin:D3", "--kind", "rho")
    assert res.exit_code == 0 and json.loads(res.output)["verified"]
    res = run("witness", str(CONFIGS / "fort_swap.toml"), "--kind", "rho", "--sequence", "arithmetic:1:2:300")
    assert res.exit_code == 0 and json.loads(res.output)["verified"]


def test_witness_bad_sequence():
    assert run("witness", "builtin:C2", "--kind", "rho", "--sequence", "primes").exit_code == 2


def test_table_a():
    res = run("table-a")
    assert res.exit_code == 0
    rows = [line for line in res.output.splitlines() if line[:2] in ("C1", "C2", "C3", "D1", "D2", "D3")]
    assert len(rows) == 6
    assert "DISCREPANCY" in next(r for r in rows if r.startswith("D1"))
    assert not any("DISCREPANCY" in r for r in rows if not r.startswith("D1"))


def test_table_a_json_and_header_only():
    doc = json.loads(run("table-a", "--json").output)
    assert set(doc["builtins"]) == {"C1", "C2", "C3", "D1", "D2", "D3"}
    assert doc["builtins"]["D1"]["discrepancy"] and not doc["builtins"]["D3"]["discrepancy"]
    res = run("table-a", "--no-builtins")
    assert res.exit_code == 0
    assert "exhibited by" not in res.output and "D1" not in res.output


def test_crosscheck_small():
    res = run("--seed", "3", "crosscheck", "--atoms", "2", "--json")
    assert res.exit_code == 0
    doc = json.loads(res.output)
    assert doc["disagreements"] == [] and doc["checked"] > 0


def test_budget_option_applies():
    res = run("--budget", "100", "analyze", "builtin:C1", "--json")
    assert res.exit_code == 0
    assert json.loads(res.output)["verdicts"]["weak_spec"]["value"] == "yes"
    assert run("--budget", "0", "analyze", "builtin:C1").exit_code == 2
