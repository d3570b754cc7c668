import json
import os
import subprocess
from pathlib import Path

import pytest

CLI = os.environ.get("REEBFOL_CLI", "reebfol")


def run(*args, check=None):
    p = subprocess.run([CLI, *map(str, args)], capture_output=True, text=True)
    if check is not None:
        assert p.returncode == check, p.stderr
    return p


def report(*args, check=None):
    p = run(*args, check=check)
    return p.returncode, json.loads(p.stdout)


def test_instances_list():
    out = run("instances", "list", check=0).stdout
    names = [line.split("\t")[0] for line in out.splitlines()]
    assert names == ["product-torus", "example1-quotient", "example2-halfplane", "example3-pants"]


def test_export_is_stable_and_loadable(tmp_path):
    run("instances", "export", "example3-pants", "product-torus", "--out", tmp_path, check=0)
    first = (tmp_path / "example3-pants.json").read_bytes()
    again = run("instances", "export", "example3-pants", check=0).stdout.encode()
    assert first == again
    _, rep = report("check-obstruction", "--instance", tmp_path / "example3-pants.json", check=0)
    assert rep["complex"]["source"] == "instance"
    assert rep["outcome"]["outcome"] == "FeasibleBeta"


def test_example1_not_transverse():
    code, rep = report("check-contact", "--instance", "example1-quotient")
    assert code == 1
    assert rep["contact"]["positive"]
    assert rep["transverse"]["verdict"] == "FAIL"
    assert abs(rep["transverse"]["min_dalpha_sigma"]) < 1e-8


def test_example2_contact_passes():
    code, rep = report("check-contact", "--instance", "example2-halfplane", "--eps", "0.01")
    assert code == 0
    assert rep["eps"] == 0.01 and rep["eps_source"] == "fixed"


def test_product_torus_obstruction():
    code, rep = report("check-obstruction", "--instance", "product-torus")
    assert code == 1
    assert rep["outcome"]["outcome"] == "Obstruction"
    assert rep["verified"]
    assert all(w == "1/1" for w in rep["outcome"]["weights"])


def test_complex_file(tmp_path):
    inst = json.loads(run("instances", "export", "example3-pants", check=0).stdout)
    path = tmp_path / "pants.json"
    path.write_text(json.dumps(inst["complex"]))
    code, rep = report("check-obstruction", "--complex", path)
    assert code == 0 and rep["complex"]["source"] == "file"
    inst["complex"]["faces"][0]["area"] = "0/1"
    path.write_text(json.dumps(inst["complex"]))
    assert run("check-obstruction", "--complex", path).returncode == 3


@pytest.mark.parametrize(
    "args",
    [
        ["diffuse", "--instance", "example3-pants"],
        ["simulate", "--instance", "product-torus"],
        ["pipeline", "--instance", "example3-pants"],
        ["check-contact", "--instance", "example7"],
        ["check-contact"],
        ["frobnicate"],
        ["check-contact", "--instance", "example2-halfplane", "--eps", "0.1", "--auto-eps"],
    ],
)
def test_usage_errors(args):
    assert run(*args).returncode == 3


def test_simulate_moments():
    _, rep = report("simulate", "--instance", "example2-halfplane", "--seed", 4, "--quantity", "moments",
                    "--start", 0.5, 1.5, "-T", 0.05, "--paths", 2000, check=0)
    m = rep["squared_displacement"]
    assert abs(m["estimate"] - 0.1) < 3 * m["se"] + 0.005
    assert rep["seed"] == 4


def test_diffuse_artifacts(tmp_path):
    code, rep = report("diffuse", "--instance", "example2-halfplane", "--seed", 2, "--paths", 100,
                       "--out", tmp_path, "--format", "json,csv,svg")
    assert code in (0, 1, 2)
    for name in ["diffuse.json", "diffuse.meta.json", "measure.json", "diffuse_nodes.csv", "laplacian.svg"]:
        assert (tmp_path / name).exists(), name
    assert json.loads((tmp_path / "diffuse.json").read_text()) == rep
    meta = json.loads((tmp_path / "diffuse.meta.json").read_text())
    assert meta["config_hash"] == rep["config_hash"] and "timestamp" in meta
    assert "timestamp" not in rep
    code, rep2 = report("check-contact", "--instance", "example2-halfplane", "--measure", tmp_path / "measure.json")
    assert "measure_file" in rep2["config"]["inputs"]


def test_config_hash_tracks_config():
    _, a = report("simulate", "--instance", "product-torus", "--seed", 1, "--paths", 20, "-T", 0.1)
    _, b = report("simulate", "--instance", "product-torus", "--seed", 2, "--paths", 20, "-T", 0.1)
    _, c = report("--threads", 4, "simulate", "--instance", "product-torus", "--seed", 1, "--paths", 20, "-T", 0.1)
    assert a["config_hash"] != b["config_hash"]
    assert a == c


def test_pipeline_deterministic():
    args = ["pipeline", "--instance", "example3-pants", "--seed", 11, "--paths", 200]
    a = run(*args).stdout
    b = run(*args, "--threads", 3).stdout
    assert a == b and a


def test_pipeline_example3_fixture(tmp_path):
    code, rep = report("pipeline", "--instance", "example3-pants", "--seed", 7, "--out", tmp_path)
    assert code == 0
    assert rep["chain"] == {"superharmonic": "PASS", "contact": "PASS", "transverse": "PASS", "lp": "FeasibleBeta"}
    assert rep["config"]["params"]["paths"] == 3000
    assert (tmp_path / "pipeline.json").exists()
