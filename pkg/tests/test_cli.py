import io
import json
import shutil
import subprocess

import pytest

from kgraph_kms import cli, fixtures
from kgraph_kms.kgraph import graph_hash, graph_to_spec


def call(*argv):
    out, err = io.StringIO(), io.StringIO()
    code = cli.run(list(argv), stdout=out, stderr=err)
    return code, out.getvalue(), err.getvalue()


def as_json(*argv):
    code, out, err = call(*argv, "--format", "json")
    assert code == 0, err
    return json.loads(out)


def test_validate_gamma_summary():
    code, out, _ = call("validate", "gamma")
    assert code == 0
    assert out.splitlines()[0] == "k=2, 1 vertex, 4 edges, 4 squares, cube: n/a"


def test_validate_file(tmp_path):
    p = tmp_path / "g.json"
    p.write_text(json.dumps(graph_to_spec(fixtures.two_vertex())))
    code, out, _ = call("validate", str(p))
    assert code == 0 and "2 vertices" in out


def test_validation_errors_exit_1(tmp_path):
    spec = graph_to_spec(fixtures.gamma())
    spec["squares"].pop()
    p = tmp_path / "bad.json"
    p.write_text(json.dumps(spec))
    code, _, err = call("validate", str(p))
    assert code == 1 and "MissingSquare" in err and str(p) in err
    p.write_text("{not json")
    code, _, err = call("validate", str(p))
    assert code == 1 and "MalformedSpec" in err and ":1:" in err
    assert call("validate", "no_such_graph")[0] == 1


def test_kms_below_critical_exit_2():
    code, _, err = call("kms", "two_vertex", "--beta", "0.5", "--r", "preferred")
    assert code == 2
    assert "SpectralPreconditionViolated" in err and "[1, 2]" in err


def test_kms_report():
    rep = as_json("kms", "two_vertex", "--beta", "2", "--eps", "vertex:u", "--depth", "1")
    st = rep["state"]
    assert st["kind"] == "ToeplitzKMS"
    assert abs(sum(st["m"]) - 1) < 1e-10
    assert st["residuals"]["kms"] < 1e-10 and st["residuals"]["round_trip"] < 1e-10
    assert rep["temperature"]["regime"] == "Subcritical"


def test_kms_explicit_eps_must_be_normalised():
    code, _, err = call("kms", "two_vertex", "--beta", "2", "--eps", "0.5,0.5")
    assert code == 2 and "NotNormalized" in err
    code, _, _ = call("kms", "two_vertex", "--beta", "2", "--eps", "0.5,0.5", "--rescale")
    assert code == 0


def test_critical_single_2_3():
    rep = as_json("critical", "single_2_3")
    assert rep["beta_c"] == 1.0
    assert rep["state"]["independence"]["status"] == "Independent"
    assert rep["unique"] is True and rep["uniqueness"] == "unique"


def test_critical_gamma():
    rep = as_json("critical", "gamma")
    assert rep["state"]["independence"]["witness"] == [1, 1]
    assert rep["unique"] is False and rep["uniqueness"] == "existence only"


def test_critical_rejects_unequal_beta_c():
    code, _, err = call("critical", "single_2_3", "--r", "1,1")
    assert code == 2 and "critical temperatures differ" in err


def test_spectra_formats():
    rep = as_json("spectra", "two_vertex")
    assert rep["rho"] == [2.0, 3.0]
    code, out, _ = call("spectra", "two_vertex", "--format", "csv")
    assert code == 0 and out.splitlines()[:3] == ["A1,u,w", "u,1,2", "w,1,0"]


def test_spectra_reducible(tmp_path):
    g = fixtures.from_matrices([[[1, 0], [0, 1]], [[1, 1], [1, 1]]])
    p = tmp_path / "red.json"
    p.write_text(json.dumps(graph_to_spec(g)))
    rep = as_json("spectra", str(p))
    assert rep["coordinatewise_irreducible"] is False and rep["x"] is None
    code, _, err = call("critical", str(p))
    assert code == 2 and "NotCoordinatewiseIrreducible" in err


def test_simplex_and_ground():
    rep = as_json("simplex", "two_vertex", "--beta", "2", "--depth", "1")
    assert rep["dimension"] == 1 and len(rep["extreme_points"]) == 2
    assert all(p["kms_residual"] < 1e-10 for p in rep["extreme_points"])
    rep = as_json("ground", "two_vertex", "--eps", "uniform", "--depth", "1")
    assert rep["ground_check"]["passes"] and rep["limit"]["converged"]
    assert rep["state"]["kind"] == "KMSInfinity"


def test_ground_bad_eps():
    code, _, err = call("ground", "two_vertex", "--eps", "0.3,0.3")
    assert code == 2 and "NotAProbability" in err


def test_verify():
    rep = as_json("verify", "gamma", "--beta", "2")
    assert rep["relations"]["T5"] == 0 and rep["relations"]["CK_holds"] is False
    assert all(v["deviation"] == 0 for v in rep["inclusion_exclusion"].values())
    assert rep["kms"]["ok"] and rep["kms"]["closed_form_residual"] < 1e-10


def test_bad_dynamics_exit_2():
    assert call("kms", "gamma", "--beta", "2", "--r", "1,-1")[0] == 2
    assert call("kms", "gamma", "--beta", "2", "--r", "1")[0] == 2


def test_json_is_deterministic_and_tagged():
    a = call("report", "two_vertex", "--format", "json")
    b = call("report", "two_vertex", "--format", "json")
    assert a[0] == 0 and a[1] == b[1]
    rep = json.loads(a[1])
    assert rep["graph_hash"] == graph_hash(fixtures.two_vertex())
    assert rep["tolerances"]["structural"] == 1e-10
    assert rep["subcommand"] == "report"
    assert {"validate", "spectra", "simplex", "kms", "ground", "critical", "verify"} <= set(rep)


def test_floats_rounded_to_12_digits():
    rep = as_json("spectra", "single_2_3")
    assert rep["log_rho"] == [0.69314718056, 1.09861228867]


def test_tolerance_override(monkeypatch):
    monkeypatch.setenv("KGK_TOL", "1e-6")
    assert as_json("validate", "gamma")["tolerances"]["structural"] == 1e-6
    monkeypatch.setenv("KGK_TOL", "zero")
    assert call("validate", "gamma")[0] == 2


def test_report_without_preferred_dynamics():
    rep = as_json("report", "single_1_1")
    assert "note" in rep and "critical" not in rep and "verify" in rep


@pytest.mark.skipif(shutil.which("kgraph-kms") is None, reason="console script not installed")
def test_console_script():
    proc = subprocess.run(["kgraph-kms", "validate", "gamma"], capture_output=True, text=True)
    assert proc.returncode == 0 and proc.stdout.startswith("k=2")
