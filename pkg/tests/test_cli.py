import json
import subprocess
import sys

import pytest

from ellsvp import cli


@pytest.fixture
def files(tmp_path):
    docs = {
        "cube2": {"kind": "L_P_BALL", "dim": 2, "parameters": {"p": "inf", "radius": 1}},
        "cube3": {"kind": "L_P_BALL", "dim": 3, "parameters": {"p": "inf", "radius": 1}},
        "l1": {"kind": "L_P_BALL", "dim": 2, "parameters": {"p": 1, "radius": 1}},
        "z2": {"dim": 2, "basis": [[1, 0], [0, 1]]},
        "z3": {"dim": 3, "basis": [[1, 0, 0], [0, 1, 0], [0, 0, 1]]},
        "skew": {"dim": 2, "basis": [[2, 0], [1, 2]]},
        "disk": {"shape": [[1, 0], [0, 1]], "radius": 1.5},
        "unitdisk": {"shape": [[1, 0], [0, 1]], "radius": 1.0},
        "center": {"center": [0.5, 0.0]},
        "stretch": {"matrix": [[2, 0], [0, 0.5]]},
    }
    out = {}
    for name, doc in docs.items():
        p = tmp_path / f"{name}.json"
        p.write_text(json.dumps(doc))
        out[name] = str(p)
    (tmp_path / "broken.json").write_text("{ not json")
    out["broken"] = str(tmp_path / "broken.json")
    return out


def run(*argv):
    status, text = cli.run(list(argv))
    return status, (json.loads(text) if text else None)


def test_grid():
    status, doc = run("grid", "--dim", "4")
    assert status == 0
    assert doc["size"] == 89 and doc["mode"] == "THEOREM_SET"
    assert doc["s"] == pytest.approx(0.38266, abs=1e-5)
    _, ball3 = run("grid", "--dim", "4", "--mode", "BALL3_SET", "--dump")
    assert ball3["size"] == 137 == len(ball3["points"]) == len(ball3["weights"])


def test_grid_dimension_cap():
    status, _ = run("grid", "--dim", "12", "--dim-cap", "10")
    assert status == cli.EXIT_CAP


def test_l_estimate(files):
    status, doc = run("l-estimate", "--body", files["cube2"])
    assert status == 0 and doc["l_tilde"] > 0
    _, st = run("l-estimate", "--body", files["cube2"], "--matrix", files["stretch"])
    assert st["f_tilde"] > 0


def test_ell_solve(files):
    status, doc = run("ell-solve", "--body", files["l1"], "--epsilon", "0.5")
    assert status == 0
    assert doc["status"] == "OPTIMAL_WITHIN_EPS" and doc["certified_gap"] <= 0.5
    assert set(doc["ellipsoid"]) == {"shape", "radius"}
    assert doc["rounded_body"]["kind"] in ("LINEAR_IMAGE", "L_P_BALL")


def test_diag_covering(files):
    status, doc = run("diag-covering", "--body", files["cube2"], "--ellipsoid", files["unitdisk"],
                      "--half-volume")
    assert status == 0
    assert doc["bound_N_K_E"] == pytest.approx(11.46, abs=0.15)
    assert doc["half_volume"]["radius"] == pytest.approx(1.5958, rel=3e-3)


def test_enumerate_ellipsoid_and_body(files):
    _, doc = run("enumerate", "--basis", files["z2"], "--ellipsoid", files["disk"])
    assert doc["count"] == 9
    _, doc = run("enumerate", "--basis", files["z2"], "--ellipsoid", files["unitdisk"], "--center", files["center"])
    assert doc["points"] == [[0, 0], [1, 0]]
    for extra in ([], ["--fallback-ball"]):
        _, doc = run("enumerate", "--basis", files["z2"], "--body", files["l1"], "--scale", "1.5", *extra)
        assert doc["count"] == 5


def test_enumerate_argument_errors(files):
    assert run("enumerate", "--basis", files["z2"])[0] == cli.EXIT_PARSE
    assert run("enumerate", "--basis", files["z2"], "--body", files["l1"])[0] == cli.EXIT_PARSE
    assert run("enumerate", "--basis", files["z2"], "--body", files["l1"], "--ellipsoid", files["disk"])[0] == 2
    assert run("enumerate", "--basis", files["z2"], "--ellipsoid", files["disk"], "--node-cap", "3")[0] == 3


def test_svp_l2(files):
    _, doc = run("svp-l2", "--basis", files["skew"])
    assert doc == {"vector": [2, 0], "norm": 2.0}


def test_svp(files):
    status, doc = run("svp", "--basis", files["z3"], "--body", files["cube3"])
    assert status == 0
    assert doc["norm_value"] == 1.0 and doc["vector"] == [1, 0, 0]
    assert doc["path"] == "ellipsoid_cover"
    _, fb = run("svp", "--basis", files["z3"], "--body", files["cube3"], "--fallback-ball")
    assert fb["path"] == "single_ball" and fb["norm_value"] == 1.0


def test_svp_dimension_mismatch(files):
    assert run("svp", "--basis", files["z2"], "--body", files["cube3"])[0] == cli.EXIT_PARSE


def test_parse_errors(files, capsys):
    assert run("svp", "--basis", files["broken"], "--body", files["cube2"])[0] == cli.EXIT_PARSE
    assert "broken.json:1:" in capsys.readouterr().err
    assert cli.main(["grid"]) == cli.EXIT_PARSE
    assert cli.main(["grid", "--dim", "0"]) == cli.EXIT_PARSE
    assert cli.main(["ell-solve", "--body", files["l1"], "--epsilon", "2"]) == cli.EXIT_PARSE
    assert cli.main(["nonsense"]) == cli.EXIT_PARSE


def test_fixture_and_output(files, tmp_path):
    out = tmp_path / "res.json"
    assert cli.main(["svp", "--basis", files["skew"], "--body", files["l1"], "--fixture", "-o", str(out)]) == 0
    doc = json.loads(out.read_text())
    assert doc["norm_value"] == 2.0 and doc["fixture"]["mode"] == "THEOREM_SET"


def test_outputs_identical_across_threads(files):
    argv = ["svp", "--basis", files["skew"], "--body", files["l1"]]
    texts = {cli.run(argv + ["--threads", t])[1] for t in ("1", "1", "4")}
    assert len(texts) == 1


def test_verify_subset():
    status, doc = run("verify", "--quick", "--only", "2,3")
    assert status == 0 and doc["passed"]
    assert [c["number"] for c in doc["criteria"]] == [2, 3]
    assert run("verify", "--only", "x")[0] == cli.EXIT_PARSE


def test_module_entry_point(files):
    proc = subprocess.run([sys.executable, "-m", "ellsvp", "svp-l2", "--basis", files["z2"]],
                          capture_output=True, text=True, check=False)
    assert proc.returncode == 0
    assert json.loads(proc.stdout)["vector"] == [1, 0]
