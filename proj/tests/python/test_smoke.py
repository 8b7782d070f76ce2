import math

import pytest

import elastic_lab as el


def test_version():
    assert el.__version__


def test_root_trace_and_products():
    a2, b2, theta, xi = 1.0, 4.0, 0.25, 0.3
    roots = el.exact_roots(a2, b2, theta, xi)
    assert len(roots) == 6
    assert math.isclose(sum(r.real for r in roots), 3 * xi ** (2 * theta), rel_tol=1e-12)
    assert all(r.real >= 0 for r in roots)


def test_critical_exponent():
    assert el.critical_exponent(1.0, 0.5) == 2.0


def test_classify_case_ii():
    rep = el.classify([1.8, 3.0, 3.0], m=1.0, theta=0.5)
    assert rep["case"] == "ii"
    assert rep["g"][0] == pytest.approx(0.4, abs=1e-12)
    assert rep["g"][1:] == [0.0, 0.0]


def test_invalid_input_raises_value_error():
    with pytest.raises(ValueError):
        el.critical_exponent(1.0, 0.25)
    with pytest.raises(ValueError):
        el.exact_roots(4.0, 1.0, 0.5, 1.0)


def test_small_simulation():
    rec = el.simulate([2.5, 2.5, 2.5], N=16, T=1.0, dt=0.1, delta=1e-3)
    assert rec["verdict"] in ("bounded", "growing")
    assert rec["max_masked_energy"] == 0.0
    assert not any(math.isnan(x) for x in rec["g"])
