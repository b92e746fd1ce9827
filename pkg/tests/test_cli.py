import json
import math

import pytest
from click.testing import CliRunner

from rm_theta import __version__
from rm_theta.cli import cli, parse_primes
from rm_theta.concordance import dataset_from_curve
from rm_theta.curves import HyperellipticCurve

X5P1 = HyperellipticCurve((1, 0, 0, 0, 0, 1), 5, "x^5+1")


def write(path, obj):
    path.write_text(json.dumps(obj))
    return str(path)


def invoke(*args):
    return CliRunner().invoke(cli, list(args))


@pytest.fixture
def zeta_job(tmp_path):
    return write(tmp_path / "zeta.json",
                 {"command": "zeta", "field": {"p": 3}, "char": "quadratic", "s": 2.0})


def run_ok(tmp_path, *args):
    out = tmp_path / "out.json"
    res = invoke(*args, "--out", str(out))
    assert res.exit_code == 0, res.output
    return json.loads(out.read_text()), out


def test_parse_primes():
    assert parse_primes("3..13") == [3, 5, 7, 11, 13]
    assert parse_primes([13, 4, 7, 7]) == [7, 13]


def test_zeta_job(tmp_path, zeta_job):
    doc, _ = run_ok(tmp_path, "zeta", "--job", zeta_job)
    assert doc["command"] == "zeta" and doc["version"] == __version__
    assert doc["config"]["terms"] == 200 and doc["config"]["seed"] == 0
    r = doc["result"]
    closed = 1 / (1 - 3 ** -1.5)
    assert abs(r["partial_sum"]["re"] - closed) <= r["tail_bound"] + 1e-15
    assert abs(r["l_factor_at_s"]["re"] - 1 / (1 - 3 ** -2)) < 1e-14
    assert abs(r["epsilon"]["im"] + 1 / 3) < 1e-12 and abs(r["epsilon"]["re"]) < 1e-12


def test_flag_overrides_job(tmp_path, zeta_job):
    doc, _ = run_ok(tmp_path, "zeta", "--job", zeta_job, "--terms", "50",
                    "--normalization", "unshifted")
    assert doc["config"]["terms"] == 50
    assert doc["result"]["normalization"] == "unshifted"


def test_output_is_deterministic(tmp_path, zeta_job):
    _, out = run_ok(tmp_path, "zeta", "--job", zeta_job, "--seed", "4")
    first = out.read_bytes()
    _, out = run_ok(tmp_path, "zeta", "--job", zeta_job, "--seed", "4")
    assert out.read_bytes() == first
    assert (tmp_path / "out.json.timing.json").exists()


def test_malformed_json(tmp_path):
    job = tmp_path / "bad.json"
    job.write_text("{not json")
    out = tmp_path / "out.json"
    res = invoke("zeta", "--job", str(job), "--out", str(out))
    assert res.exit_code == 2
    assert not out.exists()


def test_unknown_key_rejected(tmp_path):
    job = write(tmp_path / "j.json", {"field": {"p": 3}, "char": "quadratic", "s": 2,
                                       "colour": "blue"})
    out = tmp_path / "out.json"
    res = invoke("zeta", "--job", job, "--out", str(out))
    assert res.exit_code == 2 and not out.exists()


def test_math_error_exit_code(tmp_path, zeta_job):
    res = invoke("zeta", "--job", zeta_job, "--s", "0.2")
    assert res.exit_code == 3
    assert "DivergentParameters" in res.output


def test_euler_factors_bad_prime_is_skipped(tmp_path):
    curve = write(tmp_path / "c.json", X5P1.to_json())
    doc, _ = run_ok(tmp_path, "euler-factors", "--curve", curve, "--primes", "3..13")
    rows = {r["p"]: r for r in doc["result"]["factors"]}
    assert rows[5] == {"p": 5, "skipped": "BadReduction"}
    assert rows[7]["coeffs"][4] == 49 and rows[7]["witness"] is not None


def test_match_via_files(tmp_path):
    curve = write(tmp_path / "c.json", X5P1.to_json())
    hecke = write(tmp_path / "h.json", dataset_from_curve(X5P1, range(3, 60)).to_json())
    job = write(tmp_path / "m.json", {"curve": "c.json", "hecke": "h.json", "primes": "3..59"})
    doc, _ = run_ok(tmp_path, "match", "--job", job)
    assert doc["result"]["all_equal"] and doc["result"]["compared"] >= 10
    # the same through flags
    doc2, _ = run_ok(tmp_path, "match", "--curve", curve, "--hecke", hecke, "--primes", "3..59")
    assert doc2["result"] == doc["result"]


def test_theta_table_format(tmp_path):
    job = write(tmp_path / "t.json", {"lattice": {"standard": 4}, "trace_bound": 2,
                                       "weight": "one", "report": True})
    doc, _ = run_ok(tmp_path, "theta-coeffs", "--job", job)
    table = doc["result"]["table"]
    assert table["bound"] == 2 and table["weight"] == "one"
    vals = {(e["a"], e["b"], e["c"]): e["value"] for e in table["entries"]}
    assert vals[(0, 0, 0)] == 1 and vals[(1, 0, 0)] == 24
    assert "classes" in doc["result"]["report"]


def test_theta_budget_error(tmp_path):
    job = write(tmp_path / "t.json", {"lattice": {"standard": 4}, "trace_bound": 6,
                                       "budget": 100})
    res = invoke("theta-coeffs", "--job", job)
    assert res.exit_code == 3 and "BoundTooLarge" in res.output


def test_character_and_local_field(tmp_path):
    job = write(tmp_path / "c.json", {"field": {"p": 5}, "char": "quadratic"})
    doc, _ = run_ok(tmp_path, "character", "--job", job)
    r = doc["result"]
    assert r["conductor"] == 1 and abs(r["gauss_abs2"] - 5) < 1e-12
    job = write(tmp_path / "f.json", {"field": {"p": 3}, "elements": [18, "1/3"],
                                       "unit_group_levels": [1, 2], "self_check": 10})
    doc, _ = run_ok(tmp_path, "local-field", "--job", job, "--seed", "1")
    r = doc["result"]
    assert [e["valuation"] for e in r["elements"]] == [2, -1]
    assert [g["order"] for g in r["unit_groups"]] == [2, 6]
    assert r["self_check"] == {"samples": 10, "passed": 10}


def test_test_vector_command(tmp_path):
    job = write(tmp_path / "v.json", {
        "field": {"p": 2, "kind": "ram2", "d": 2}, "shape": [0, 2],
        "vectors": [[1, [0, 1]], [[0, 1], 2]],
        "matrices": [[[1, 0], [0, 1]], [[1, 0], [2, 1]], [[1, 1], [0, 1]]],
    })
    doc, _ = run_ok(tmp_path, "test-vector", "--job", job)
    assert doc["result"]["members"] == [False, True]
    assert doc["result"]["stabilizes"] == [True, True, False]


def test_complexity_probe_sidecar(tmp_path):
    doc, out = run_ok(tmp_path, "complexity-probe", "--target", "zeta", "--sizes", "100,200,400")
    assert "seconds" not in json.dumps(doc)
    timing = json.loads((tmp_path / "out.json.timing.json").read_text())
    assert [r["size"] for r in timing["probe"]] == [100, 200, 400]
    assert timing["loglog_slope"] is None or math.isfinite(timing["loglog_slope"])
    res = invoke("complexity-probe", "--target", "zeta", "--sizes", "4,2")
    assert res.exit_code == 2


def test_version_flag():
    res = invoke("--version")
    assert res.exit_code == 0 and __version__ in res.output
