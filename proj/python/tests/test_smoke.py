import math

import pytest

import hyplateau as hp


def test_symmetric_functions():
    assert hp.normalized_Hk([3.0, 1.0], 1) == pytest.approx(2.0)
    assert hp.elementary_symmetric([1.0, 2.0, 3.0], 2) == pytest.approx(11.0)
    assert hp.cone_contains([3.0, -1.0], 1)
    assert not hp.cone_contains([3.0, -1.0], 2)
    spec = hp.CurvatureSpec.kth_root(3, 2)
    assert spec.cone_index == 3
    assert hp.eval_f(spec, [1.0, 1.0, 1.0]) == pytest.approx(1.0)
    assert sum(hp.grad_f(spec, [1.0, 1.0, 1.0])) == pytest.approx(1.0)
    with pytest.raises(hp.AdmissibilityError):
        hp.eval_f(hp.CurvatureSpec.consecutive_quotient(2, 2), [1.0, -2.0])


def test_conditions_report():
    rep = hp.check_conditions(hp.CurvatureSpec.consecutive_quotient(3, 2), samples=500, seed=3)
    assert rep["pass"]
    ids = {r["id"] for r in rep["records"]}
    assert {"2.1", "2.2", "2.3", "2.4", "2.5", "2.6"} <= ids


def test_cap_and_curvatures():
    cap = hp.make_cap(1.0, 0.5)
    assert cap["u0"] == pytest.approx(math.sqrt(1 / 3))
    k = hp.hyperbolic_curvatures(0.7, [0.0, 0.0], [[0.0, 0.0], [0.0, 0.0]])
    assert list(k) == pytest.approx([1.0, 1.0])


def test_solve():
    out = hp.solve({"sigma": 0.5, "grid": 256})
    stats = out["statistics"]
    assert stats["converged"]
    assert stats["u_center_extrapolated"] == pytest.approx(math.sqrt(1 / 3), abs=1e-4)
    assert len(out["u"]) == len(out["positions"])
    assert out["gradient_estimate"]["pass"]
    with pytest.raises(hp.ConfigError):
        hp.solve({"grid": 256})
    with pytest.raises(hp.ConfigError):
        hp.solve({"sigma": 0.5, "colour": "red"})


def test_algebra():
    assert hp.eta(0.25) == pytest.approx(8.898979, rel=1e-7)
    rep = hp.algebraic_subinequalities(samples=2000, seed=1)
    by_id = {r["id"]: r for r in rep["records"]}
    assert by_id["eta.root"]["pass"]
    assert by_id["i"]["pass"]
