import json
import math

import numpy as np
import pytest

import reebfol


def test_instances():
    assert reebfol.instance_names() == ["product-torus", "example1-quotient", "example2-halfplane", "example3-pants"]
    inst = reebfol.make_instance("example2-halfplane")
    nz, ny, nx = inst.shape
    assert inst.log_f.shape == (nz * ny * nx,)
    with pytest.raises(reebfol.InstanceError):
        reebfol.make_instance("nope")


def test_round_trip():
    inst = reebfol.make_instance("example3-pants")
    text = inst.to_json()
    back = reebfol.Instance.from_json(text)
    assert back.to_json() == text
    assert np.array_equal(back.log_f, inst.log_f)
    with pytest.raises(reebfol.FormatError):
        reebfol.Instance.from_json(json.dumps({"name": "x"}))


def test_verdicts():
    ex1 = reebfol.make_instance("example1-quotient")
    r = reebfol.check_contact(ex1)
    assert r["positive"] and r["transverse"] == "FAIL"
    ex2 = reebfol.make_instance("example2-halfplane")
    assert reebfol.check_contact(ex2, 0.01)["transverse"] == "PASS"
    assert reebfol.check_superharmonic(ex2)["verdict"] == "PASS"


def test_lp():
    torus = reebfol.make_instance("product-torus")
    assert reebfol.solve_lp(torus.complex_json(0))["outcome"] == "Obstruction"
    pants = reebfol.make_instance("example3-pants")
    r = reebfol.solve_lp(pants.complex_json())
    assert r["outcome"] == "FeasibleBeta" and r["verified"]


def test_stochastic_paths():
    torus = reebfol.make_instance("product-torus")
    assert reebfol.contraction_rate(torus, 0.5, 1e-3, 50, 1)["kappa"] == 0.0
    ex2 = reebfol.make_instance("example2-halfplane")
    a = reebfol.log_diffuse(ex2, 0.05, 1e-3, 50, 9)
    b = reebfol.log_diffuse(ex2, 0.05, 1e-3, 50, 9)
    assert np.array_equal(a.log_f, b.log_f)
    assert np.all(np.isfinite(a.log_f))
    assert math.isfinite(reebfol.check_superharmonic(a)["worst_laplacian"])
