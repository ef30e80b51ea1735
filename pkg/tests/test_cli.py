import json

import pytest

from basilica.acceptance import same_artifacts
from basilica.cli import main


def _run(tmp_path, *argv, name="out"):
    d = tmp_path / name
    code = main(list(argv) + ["--out", str(d), "--workers", "1"])
    return code, d


def test_fixed_point_k2(tmp_path):
    code, d = _run(tmp_path, "fixed-point", "--k-example", "2")
    assert code == 0
    doc = json.loads((d / "fixed_point.json").read_text())
    assert doc["mu"]["a"] == pytest.approx(0.414214, abs=1e-6)
    assert doc["mu"]["b"] == pytest.approx(0.585786, abs=1e-6)
    assert doc["alpha"] == pytest.approx(0.666667, abs=1e-6)
    man = json.loads((d / "manifest.json").read_text())
    assert set(man) == {"seed", "config", "version", "wall_time"}
    assert man["config"]["k_example"] == 2


def test_relations(tmp_path):
    code, d = _run(tmp_path, "relations", "--max-n", "6")
    assert code == 0
    doc = json.loads((d / "relations.json").read_text())
    assert doc["all_pass"] and len(doc["relators"]) == 7


def test_csv_outputs(tmp_path):
    code, d = _run(tmp_path, "ball", "--n", "2")
    assert code == 0
    lines = (d / "ball.csv").read_text().splitlines()
    assert lines[0] == "word,norm" and len(lines) == 1 + 17
    code, d = _run(tmp_path, "schreier", "--n", "2", name="s")
    assert (d / "schreier.dot").read_text().startswith("digraph")
    code, d = _run(tmp_path, "heat-kernel", "--n-cap", "2", name="h")
    assert (d / "heat_kernel.csv").read_text().splitlines()[1] == "2,0.25,0.25"


def test_exact_dist_json(tmp_path):
    code, d = _run(tmp_path, "exact-dist", "--n", "2")
    doc = json.loads((d / "exact_dist.json").read_text())
    assert code == 0 and doc["1"] == 0.25
    assert list(doc) == sorted(doc)


def test_env_override(tmp_path, monkeypatch):
    monkeypatch.setenv("BASILICA_OUT", str(tmp_path / "env"))
    assert main(["nu", "--word", "bb", "--workers", "1"]) == 0
    assert json.loads((tmp_path / "env" / "nu.json").read_text())["value"] == 2


def test_definition_file(tmp_path):
    p = tmp_path / "g.txt"
    p.write_text("a: perm=[0, 1]; sections=[1, b]\nb: perm=[1, 0]; sections=[1, a]\n")
    code, d = _run(tmp_path, "cycles", "--definition", str(p))
    assert code == 0
    assert json.loads((d / "cycles.json").read_text())["cycle_condition_up_to_cap"]
    p.write_text("a: perm=[0, 0]; sections=[1, b]\n")
    assert _run(tmp_path, "cycles", "--definition", str(p), name="bad")[0] == 1


@pytest.mark.parametrize("argv,code", [
    (["nu", "--word", "ab", "--bogus"], 1),
    (["frobnicate"], 1),
    (["nu", "--word", "xyz"], 1),
    (["simulate", "--r", "-1", "--n", "16", "--trials", "1"], 1),
    (["simulate", "--preset", "odometer", "--n", "16"], 1),
    (["ball", "--n", "30"], 2),
    (["exact-dist", "--n", "13"], 2),
    (["refine", "--base", "0"], 2),
    (["nu", "--word", "abababababababab", "--radius-cap", "3"], 2),
])
def test_exit_codes(tmp_path, argv, code):
    assert main(argv + ["--out", str(tmp_path / "x"), "--workers", "1"]) == code


def test_simulate_is_reproducible(tmp_path):
    argv = ["simulate", "--n", "256,512", "--trials", "4", "--seed", "7", "--what", "both"]
    assert _run(tmp_path, *argv, name="a")[0] == 0
    d = tmp_path / "b"
    assert main(argv + ["--out", str(d), "--workers", "4"]) == 0
    assert same_artifacts(tmp_path / "a", d)
    assert (d / "speed.csv").read_text().splitlines()[0] == "n,mean_nu_rate,sem_nu_rate,mean_free_rate"
