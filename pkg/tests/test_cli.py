import json

import numpy as np
import pytest

from povm_coarse import document as dm
from povm_coarse import fixtures
from povm_coarse.cli import main
from povm_coarse.scenarios import SCENARIOS


def run(capsys, *argv):
    status = main([str(a) for a in argv])
    return status, capsys.readouterr().out


def run_json(capsys, *argv):
    status, out = run(capsys, *argv, "--json")
    return status, json.loads(out)


def fx(name):
    return fixtures.path(name + ".json")


@pytest.mark.parametrize("name", fixtures.names())
def test_validate_fixtures(capsys, name):
    status, out = run(capsys, "validate", "-f", fixtures.path(name))
    assert status == 0 and "FAIL" not in out


def _write(tmp_path, entities, dim=2):
    p = tmp_path / "doc.json"
    p.write_text(json.dumps({"dim": dim, "entities": entities}))
    return p


def test_validate_reports_bad_observable(capsys, tmp_path):
    effects = [dm.encode_matrix(np.eye(2) / 2), dm.encode_matrix(np.eye(2) / 3)]
    p = _write(tmp_path, {"B": {"type": "observable", "outcomes": ["0", "1"], "effects": effects}})
    status, out = run(capsys, "validate", "-f", p)
    assert status == 1
    assert "FAIL observable B" in out and f"{np.sqrt(2) / 6:.3e}" in out


def test_validate_reports_non_psd_state(capsys, tmp_path):
    p = _write(tmp_path, {"s": {"type": "state", "matrix": dm.encode_matrix(np.diag([1.5, -0.5]))}})
    status, out = run(capsys, "validate", "-f", p)
    assert status == 1 and "minimum eigenvalue -5.000e-01" in out


def test_usage_errors_exit_2(capsys, tmp_path):
    assert run(capsys, "validate")[0] == 2
    assert run(capsys, "validate", "-f", tmp_path / "missing.json")[0] == 2
    bad = tmp_path / "bad.json"
    bad.write_text("{")
    assert run(capsys, "validate", "-f", bad)[0] == 2
    assert run(capsys, "scenario", "no-such-scenario")[0] == 2
    assert run(capsys, "validate", "-f", fx("tetrahedron"), "--tol-eq", "0.5")[0] == 2
    with pytest.raises(SystemExit) as exc:
        main(["seqprod"])
    assert exc.value.code == 2


def test_domain_errors_exit_1(capsys):
    assert run(capsys, "seqprod", "-f", fx("example4_d2"), "--first", "Q", "--second", "nope")[0] == 1
    assert run(capsys, "seqprod", "-f", fx("example4_d2"), "--first", "Q", "--second", "rho")[0] == 1
    assert run(capsys, "postprocess", "-f", fx("kernels_d3"), "--kernel", "collapse", "--observable", "Q")[0] == 0
    assert run(capsys, "instrument", "update", "-f", fx("instruments"), "--instrument", "luders_Q",
               "--state", "rho", "--outcomes", "nope")[0] == 1


def test_seqprod_position_momentum(capsys, tmp_path):
    out_file = tmp_path / "qp.json"
    status, rep = run_json(capsys, "seqprod", "-f", fx("example4_d2"), "--first", "Q", "--second", "P", "-o", out_file)
    assert status == 0
    assert rep["data"]["max_deviation_from_A_x/n"] < 1e-10
    qp = dm.load(out_file).get("QoP")
    q = dm.load(fx("example4_d2")).get("Q")
    np.testing.assert_allclose(qp.effects, np.repeat(q.effects, 2, axis=0) / 2, atol=1e-10)


def test_condition_is_trivial(capsys):
    status, rep = run_json(capsys, "condition", "-f", fx("example4_d3"), "--observable", "P", "--given", "Q")
    assert status == 0 and rep["data"]["max_deviation_from_I/n"] < 1e-10


def test_distribution_and_discretize(capsys):
    status, rep = run_json(capsys, "distribution", "-f", fx("example4_d2"), "--observable", "Q", "--state", "phi0")
    assert status == 0 and rep["data"]["distribution"] == {"0": 1.0, "1": 0.0}
    status, rep = run_json(capsys, "discretize", "-f", fx("example4_d3"), "--observable", "Q", "--blocks", "0,1;2")
    assert status == 0 and rep["data"]["blocks"] == ["{0,1}", "{2}"]


def test_check_sic_tetrahedron(capsys):
    status, out = run(capsys, "check-sic", "-f", fx("tetrahedron"), "--observable", "T")
    assert status == 0
    assert "NO " not in out and "YES  SIC" in out


def test_check_ic_qubit_c(capsys):
    status, rep = run_json(capsys, "check-ic", "-f", fx("qubit_c"), "--observable", "C")
    assert status == 0
    ic = next(c for c in rep["checks"] if c["name"] == "informationally complete")
    assert ic["passed"] is False and ic["value"] == 3
    assert rep["data"]["null_space_dimension"] == 1
    assert "rho2" in rep["data"]["document"]["entities"]


def test_instrument_actions(capsys):
    f = fx("instruments")
    status, rep = run_json(capsys, "instrument", "apply", "-f", f, "--instrument", "luders_Q", "--state", "rho", "--outcomes", "0")
    assert status == 0 and abs(rep["data"]["probability"] - 0.7) < 1e-12
    status, rep = run_json(capsys, "instrument", "hat", "-f", f, "--instrument", "prepare_Q")
    assert status == 0
    status, rep = run_json(capsys, "instrument", "coarse", "-f", f, "--instrument", "luders_Q", "--kernel", "flip")
    assert status == 0 and rep["passed"]
    assert run(capsys, "instrument", "coarse", "-f", f, "--instrument", "luders_Q")[0] == 2


def test_dyn_kernel_mub_build_c_scan(capsys):
    status, rep = run_json(capsys, "dyn-kernel", "-f", fx("dynamics"), "--system", "spin", "--observable", "Q")
    assert status == 0 and rep["passed"]
    status, rep = run_json(capsys, "mub", "-f", fx("example4_d3"), "--left", "standard", "--right", "fourier")
    assert status == 0 and rep["checks"][0]["passed"]
    status, rep = run_json(capsys, "build-c", "--a", "0.3")
    assert status == 0 and all(abs(t - 0.5) < 1e-12 for t in rep["data"]["traces"].values())
    status, rep = run_json(capsys, "build-c", "-f", fx("qubit_c"), "--kernel", "nu", "--left", "standard", "--right", "fourier")
    assert status == 0
    status, rep = run_json(capsys, "scan-bases", "--steps", "3")
    assert status == 0 and len(rep["data"]["grid"]) == 9


@pytest.mark.parametrize("name", sorted(SCENARIOS))
def test_every_scenario_exits_zero(capsys, name):
    status, out = run(capsys, "scenario", name)
    assert status == 0, out
    assert "FAIL" not in out


def test_scenario_list(capsys):
    status, rep = run_json(capsys, "scenario", "list")
    assert status == 0 and rep["data"]["scenarios"] == sorted(SCENARIOS)
