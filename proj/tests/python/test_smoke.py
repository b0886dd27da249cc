"""Smoke tests for the Python bindings and the command-line tool."""

import json
import os
import subprocess

import numpy as np
import pytest

import anisogauge as ag

EUCLID_GAUGE_JSON = json.dumps(
    {
        "phi": {"family": "euclidean", "dim": 2},
        "psi": {"family": "euclidean", "dim": 1},
        "alpha": 1.0,
    }
)


def euclid_gauge():
    return ag.ProductGauge(ag.MinkowskiNorm.euclidean(2), ag.MinkowskiNorm.euclidean(1), 1.0)


# ---------------------------------------------------------------------------
# norms
# ---------------------------------------------------------------------------


def test_norm_values_and_gradients():
    n = ag.MinkowskiNorm.euclidean(2)
    assert n.value(np.array([3.0, 4.0])) == pytest.approx(5.0)
    assert n.gradient(np.array([3.0, 4.0])) == pytest.approx([0.6, 0.8])

    p4 = ag.MinkowskiNorm.power(2, 4.0)
    assert p4.value(np.ones(2)) == pytest.approx(2.0 ** 0.25)
    assert p4.dual().value(np.ones(2)) == pytest.approx(2.0 ** 0.75)

    quad = ag.MinkowskiNorm.quadratic(np.diag([4.0, 1.0]))
    assert quad.value(np.array([1.0, 0.0])) == pytest.approx(2.0)


def test_norm_validation_errors():
    with pytest.raises(ValueError):
        ag.MinkowskiNorm.power(2, 1.0)
    with pytest.raises(ValueError):
        ag.MinkowskiNorm.euclidean(2).gradient(np.zeros(2))


def test_duality_suite_and_variational_dual():
    rep = ag.verify_duality_suite(ag.MinkowskiNorm.power(2, 4.0), 50, 7)
    assert rep.worst_identity_residual() <= 1e-9
    assert rep.double_dual <= 1e-6

    res = ag.DualResolution(mode="variational", tolerance=1e-10)
    p3 = ag.MinkowskiNorm.power(3, 3.0)
    x = np.array([1.0, 2.0, -1.0])
    assert ag.dual_value(p3, x, res) == pytest.approx(p3.dual().value(x), abs=1e-7)


def test_custom_norm_with_python_callables():
    base = ag.MinkowskiNorm.power(2, 4.0)
    dual = base.dual()
    custom = ag.MinkowskiNorm.custom(
        2,
        lambda x: base.value(x),
        lambda x: base.gradient(x),
        lambda x: dual.value(x),
        lambda x: dual.gradient(x),
    )
    assert custom.value(np.ones(2)) == pytest.approx(2.0 ** 0.25)
    rep = ag.verify_duality_suite(custom, 10, 3)
    assert rep.worst_identity_residual() <= 1e-9


# ---------------------------------------------------------------------------
# gauge and operators
# ---------------------------------------------------------------------------


def test_gauge_closed_form_and_certificate():
    g = euclid_gauge()
    x = ag.Point(np.array([1.0, 1.0]), np.array([1.0]))
    assert g.theta0(x) == pytest.approx(20.0 ** 0.25)
    assert ag.theta0_variational(g, x) == pytest.approx(g.theta0(x), abs=1e-6)
    assert g.homogeneous_dimension == pytest.approx(4.0)

    d = g.dilate(2.0, x)
    assert g.theta0(d) == pytest.approx(2.0 * g.theta0(x))
    assert abs(g.eikonal_residual(ag.Point(np.array([1.0, 1.0]), np.array([0.5])))) <= 1e-10


def test_gauge_json_round_trip():
    g = ag.ProductGauge.from_json(EUCLID_GAUGE_JSON)
    back = ag.ProductGauge.from_json(g.to_json())
    x = ag.Point(np.array([0.3, -0.7]), np.array([0.2]))
    assert back.theta0(x) == pytest.approx(g.theta0(x))


def test_operator_radial_action():
    g = euclid_gauge()
    params = ag.OperatorParams(1.0, 2.0)
    prof = ag.make_profile("square")
    field = ag.make_radial_field(g, prof)
    x = ag.Point(np.array([0.8, 0.4]), np.array([0.25]))
    lhs = ag.apply_Lp(g, params, field, x)
    rhs = ag.radial_rhs(g, params, prof, x)
    assert lhs == pytest.approx(rhs, abs=1e-6)

    rep = ag.radial_consistency_report(g, params, prof, 10, 5)
    assert rep.max_rel_deviation <= 1e-5
    assert rep.convergence_ratio >= 3.5


def test_scalar_field_from_python_callable():
    g = euclid_gauge()
    field = ag.ScalarField(
        lambda x: x[2],
        lambda x: np.array([0.0, 0.0, 1.0]),
    )
    x = ag.Point(np.array([0.9, 0.5]), np.array([0.3]))
    assert ag.apply_Lp(g, ag.OperatorParams(1.0, 2.0), field, x) == pytest.approx(0.0, abs=1e-9)


# ---------------------------------------------------------------------------
# constants and the fundamental solution
# ---------------------------------------------------------------------------


def test_fundsol_constants_and_covariance():
    g = euclid_gauge()
    params = ag.OperatorParams(1.0, 2.0)
    cfg = ag.QuadratureConfig(budget=500_000, seed=11)
    sol = ag.build_fundamental_solution(g, params, cfg)
    assert sol.branch == "power"
    assert sol.exponent() == pytest.approx(-2.0)
    # sigma = Q omega and C = (p-1)/(Q-p) sigma^(-1/(p-1))
    assert sol.sigma.value == pytest.approx(4.0 * sol.omega.value, rel=0.05)
    assert sol.constant == pytest.approx(1.0 / (2.0 * np.pi), rel=0.02)

    x = ag.Point(np.array([1.0, 0.0]), np.array([0.0]))
    assert ag.evaluate(sol, x) == pytest.approx(sol.constant)
    d = g.dilate(3.0, x)
    assert ag.evaluate(sol, d) == pytest.approx(3.0 ** sol.exponent() * ag.evaluate(sol, x))

    moved = ag.translated(sol, np.array([0.25]))
    y = ag.Point(np.array([0.5, 0.1]), np.array([0.45]))
    y_shift = ag.Point(np.array([0.5, 0.1]), np.array([0.20]))
    assert ag.evaluate(moved, y) == pytest.approx(ag.evaluate(sol, y_shift))


def test_integrate_determinism():
    g = euclid_gauge()
    cfg = ag.QuadratureConfig(budget=100_000, seed=42)
    region = ag.Region.gauge_ball(1.0)
    a = ag.integrate(lambda x: 1.0, region, g, cfg)
    b = ag.integrate(lambda x: 1.0, region, g, cfg)
    assert a.value == b.value
    assert a.value == pytest.approx(np.pi ** 2 / 8.0, abs=5 * a.error)


# ---------------------------------------------------------------------------
# command-line tool
# ---------------------------------------------------------------------------


def cli():
    path = os.environ.get("ANISOGAUGE_CLI")
    if not path or not os.path.exists(path):
        pytest.skip("ANISOGAUGE_CLI not set")
    return path


def run_cli(*args):
    return subprocess.run([cli(), *args], capture_output=True, text=True)


def test_cli_norms_verify_pass_and_usage_error():
    ok = run_cli("norms-verify", "--norm", '{"family":"euclidean","dim":3}', "--samples", "30")
    assert ok.returncode == 0
    report = json.loads(ok.stdout)
    assert report["pass"] is True
    assert report["seed"] == 20240901

    bad = run_cli("norms-verify", "--norm", '{"family":"power","q":1,"dim":2}')
    assert bad.returncode == 2
    assert "q must exceed 1" in bad.stderr


def test_cli_gauge_check_and_validation():
    ok = run_cli("gauge-check", "--gauge", EUCLID_GAUGE_JSON, "--samples", "20")
    assert ok.returncode == 0

    bad_gauge = EUCLID_GAUGE_JSON.replace('"alpha": 1.0', '"alpha": -2.0')
    bad = run_cli("gauge-check", "--gauge", bad_gauge)
    assert bad.returncode == 2


def test_cli_fundsol_reproducible_and_weak_test_refusal():
    args = (
        "fundsol",
        "--gauge",
        EUCLID_GAUGE_JSON,
        "--budget",
        "200000",
        "--seed",
        "5",
    )
    first = run_cli(*args)
    second = run_cli(*args)
    assert first.returncode == 0
    # identical manifest -> bitwise identical numeric output
    assert first.stdout == second.stdout
    payload = json.loads(first.stdout)
    assert payload["results"][0]["sigma"] == pytest.approx(np.pi, rel=0.05)

    refused = run_cli("fundsol", "--gauge", EUCLID_GAUGE_JSON, "--p", "5", "--weak-test")
    assert refused.returncode == 2
    assert "Q <= p" in refused.stderr


def test_cli_op_radial_check_and_csv_format():
    ok = run_cli(
        "op-radial-check",
        "--gauge",
        EUCLID_GAUGE_JSON,
        "--p",
        "2",
        "--profile",
        "candidate",
        "--samples",
        "5",
    )
    assert ok.returncode == 0
    assert json.loads(ok.stdout)["pass"] is True

    csv_out = run_cli(
        "gauge-check", "--gauge", EUCLID_GAUGE_JSON, "--samples", "10", "--format", "csv"
    )
    assert csv_out.returncode == 0
    assert csv_out.stdout.startswith("key,value")
    assert "residuals.eikonal" in csv_out.stdout


def test_cli_suite_subset_and_unknown():
    ok = run_cli("suite", "--only", "exponents")
    assert ok.returncode == 0
    assert "exponents" in ok.stdout

    unknown = run_cli("suite", "--only", "not-a-criterion")
    assert unknown.returncode == 2
