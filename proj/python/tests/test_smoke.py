import json
import math

import pytest

import bergman_zeros as bz


def test_plateau_and_sup():
    assert abs(bz.plateau_deviation(60, 0.5)) < 1e-3
    space = bz.DiscSpace.for_radius(100, 0.5)
    s = bz.sup_kernel(space)
    assert abs(s["value"] * (2 * math.pi / 100) ** 1.5 - 1) < 0.25
    assert math.log(s["r_star"]) == pytest.approx(-50, rel=0.1)


def test_coefficients():
    assert bz.log_coefficient(3, 2) == pytest.approx(math.log(2 / math.pi))
    with pytest.raises(bz.InvalidParameter):
        bz.DiscSpace(1, 10)
    with pytest.raises(bz.InvalidParameter):
        bz.Annulus(0.7, 0.2)


def test_zeros_cross_check():
    p = 60
    space = bz.DiscSpace(p, bz.truncation_length(p, 0.7, 1e-8))
    region = bz.Annulus(0.2, 0.7)
    for i in range(5):
        eta = bz.sample_coefficients(space, 1, [i])
        assert eta == bz.sample_coefficients(space, 1, [i])
        zeros = bz.find_zeros(space, eta, region)
        assert len(zeros) == bz.count_zeros_argument_principle(space, eta, region)
        assert all(0.2 <= abs(z) <= 0.7 for z in zeros)


def test_model_kernel():
    for c in (0.5, 1.0, 2.0):
        assert bz.constant_curvature_kernel_at_zero(c) == pytest.approx(c / (2 * math.pi), rel=1e-9)
    assert bz.model_kernel_at_zero(4, [(0, 2, 1.0)], "form") > 0


def test_variance():
    space = bz.DiscSpace.for_radius(40, 0.7)
    v = bz.variance_bipotential(space, 0.2, 0.7)
    assert v > 0
    assert bz.variance_leading_term(80, 0.2, 0.7) == pytest.approx(bz.variance_leading_term(40, 0.2, 0.7) / 2)


def test_run_experiment():
    assert "kernel-decay" in bz.list_experiments()
    rows, checks = bz.run_experiment(json.dumps({"experiment": "plateau"}))
    assert all(checks.values())
    assert {r["p"] for r in rows} == {20, 40, 60}
    with pytest.raises(bz.ConfigError, match="p_lists"):
        bz.run_experiment(json.dumps({"experiment": "plateau", "p_lists": [20]}))
