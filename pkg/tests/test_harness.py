import json
import subprocess
import sys
from fractions import Fraction

import pytest

from riexact import cli, harness
from riexact.exactfun import StepFunction, dumps

F = Fraction
chi = StepFunction.indicator(0, 1)


def test_gn_check_lan_invariance():
    rep = harness.cmd_gn_check(2, 2, 6, 2, "lan:1", [F(1, 8), 1, 8])
    assert rep["ok"] and all(rep["checks"]["invariance_exact"])
    ratios = {json.dumps(r["ratio"], sort_keys=True) for r in rep["rows"]}
    assert len(ratios) == 1


def test_gn_check_mount_filip_finite():
    rep = harness.cmd_gn_check(2, 1, 2, "inf", "mount_filip:10", [1, 2])
    assert rep["target"] == {"P": "2/1", "p": "2/1"}
    assert rep["ok"]
    assert all(F(r["ratio"]["hi"]) < 100 for r in rep["rows"])


def test_gn_check_rejects_bad_input():
    with pytest.raises(ValueError):
        harness.cmd_gn_check(1, 1, 2, 2)
    with pytest.raises(ValueError):
        harness.resolve_witness("nope:3")


def test_counterexample_rows():
    rep = harness.cmd_counterexample([4, 10, 256])
    assert rep["ok"]
    rows = {r["n"]: r for r in rep["rows"]}
    assert rows[4]["u1_double_star"] == "3/4" and rows[4]["lower_bound"] == "1/2"
    assert rows[256]["u1_double_star"] == "255/256" and rows[256]["lower_bound"] == "127/128"
    assert rows[256]["bound_2_over_sqrt_n"] == {"lo": "1/8", "hi": "1/8"}
    with pytest.raises(ValueError):
        harness.cmd_counterexample([3])


def test_optimality_bounded_at_derived_target():
    rep = harness.cmd_optimality(2, 2, 2, 2, Pprime=2, pprime=2, n_list=[2, 4, 8], g=chi, h=chi)
    assert rep["witness_ok"]
    ratios = [F(r["ratio"]["hi"]) for r in rep["rows"]]
    assert max(ratios) < 2 * min(F(r["ratio"]["lo"]) for r in rep["rows"])


def test_optimality_n1_matches_bounded():
    assert harness.n1_consistency(chi, chi)
    g = StepFunction.from_values([0, 1], [4])
    assert harness.n1_consistency(g, chi)


def test_complex_domination_seed_2():
    rep = harness.cmd_property_suite(seed=2, count=200)
    assert rep["invariants"]["complex_domination"]["fail"] == 0
    assert rep["invariants"]["equimeasurability"]["fail"] == 0


def test_property_failures_are_reported_verbatim():
    rep = harness.cmd_property_suite(seed=1, count=10)
    for name, tally in rep["invariants"].items():
        assert tally["pass"] + tally["fail"] == 10
        for doc in tally["failures"]:
            assert "pieces" in doc


def _run(*args):
    return subprocess.run([sys.executable, "-m", "riexact", *args], capture_output=True, text=True)


def test_cli_exit_codes(tmp_path):
    ok = _run("counterexample", "--n-list", "4,10")
    assert ok.returncode == 0
    assert json.loads(ok.stdout)["ok"]
    assert _run("counterexample", "--n-list", "2").returncode == 2
    assert _run("bogus").returncode == 2
    assert _run("gn-check", "--Q", "x").returncode == 2
    # the property suite reports the Riesz-Herz lower-constant violation
    assert _run("properties", "--seed", "1", "--count", "3").returncode == 1


def test_cli_csv_and_out(tmp_path):
    out = tmp_path / "table.csv"
    assert cli.main(["counterexample", "--n-list", "4,10", "--format", "csv", "--out", str(out)]) == 0
    lines = out.read_text().splitlines()
    assert len(lines) == 3 and "u1_double_star" in lines[0]


def test_cli_profile_file(tmp_path):
    prof = tmp_path / "profile.json"
    prof.write_text(json.dumps({"g": json.loads(dumps(chi)), "h": json.loads(dumps(chi))}))
    code = cli.main(["optimality", "--n-list", "1,2", "--pprime", "2", "--profile", str(prof),
                     "--out", str(tmp_path / "o.json")])
    assert code == 0


def test_tolerance_environment(monkeypatch):
    from riexact.enclosure import default_tol

    monkeypatch.setenv("RIEXACT_TOL", "1/1000")
    assert default_tol() == F(1, 1000)
