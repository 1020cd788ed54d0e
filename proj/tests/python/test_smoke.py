import math
import os
from pathlib import Path

import numpy as np
import pytest

import fracocp

CONFIGS = Path(os.environ.get("FRACOCP_CONFIGS", Path(__file__).resolve().parents[2] / "configs"))


def small_config(**overrides):
    cfg = {
        "schema": 1,
        "domain": {"dim": 1, "n": 31},
        "s": 0.5,
        "bounds": {"alpha": -1, "beta": 1},
        "F": {"family": "F1", "params": {"c": 0}, "f0": "1 + sin(pi*x1)"},
        "L": {"family": "L1", "params": {"nu": 0.05}, "y_d": "0.5*sin(pi*x1)"},
        "optimizer": {"u0": 0},
        "verify": {"n_dirs": 40, "n_trials": 100, "integral_trials": 20},
        "seed": 1,
    }
    cfg.update(overrides)
    return cfg


def test_eigenvalues_match_closed_form():
    n = 31
    h = 1.0 / (n + 1)
    k = np.arange(1, n + 1)
    exact = 4.0 / h**2 * np.sin(k * math.pi * h / 2) ** 2
    lam = fracocp.eigenvalues(n)
    assert np.max(np.abs(lam - exact) / exact) < 1e-12


def test_eval_expr():
    v = fracocp.eval_expr("x1*(1-x1)", 3)
    assert v[1] == pytest.approx(0.25)
    assert fracocp.eval_expr("2^3^2", 2)[0] == 512.0
    with pytest.raises(ValueError):
        fracocp.eval_expr("x2", 3)


def test_solve_and_certify_round_trip():
    report, fields = fracocp.solve(small_config())
    assert report["verdict"] == "PASS"
    assert report["optimizer"]["status"] == "converged"
    u = fields["u"]
    assert u.shape == (31,)
    assert np.all((u >= -1) & (u <= 1))

    again = fracocp.certify(small_config(), u)
    assert again["verdict"] == "PASS"

    bad = fracocp.certify(small_config(), np.clip(u + 0.1, -1, 1))
    assert bad["verdict"] == "FAIL"
    assert bad["kkt"]["stationarity"]["residual"] > 0

    assert fracocp.certify(small_config(), u + 5)["verdict"] == "INFEASIBLE"


def test_gradient_matches_finite_differences():
    cfg = fracocp.parse_config(__import__("json").dumps(small_config()))
    x = cfg.nodes()[:, 0]
    u = 0.3 * np.sin(2 * math.pi * x)
    J, f = fracocp.gradient(cfg, u)
    v = np.cos(math.pi * x)
    eps = 1e-5
    Jp, _ = fracocp.gradient(cfg, u + eps * v)
    Jm, _ = fracocp.gradient(cfg, u - eps * v)
    w = 1.0 / 32
    assert (Jp - Jm) / (2 * eps) == pytest.approx(w * np.dot(f["d"], v), rel=1e-6)
    y = fracocp.state_solve(cfg, u)
    assert np.max(np.abs(y - f["y"])) == 0.0


def test_config_errors_are_value_errors():
    with pytest.raises(fracocp.ConfigError, match="/bounds/alpha"):
        fracocp.solve(small_config(F={"family": "F3", "params": {"c": 0.1, "d": 1}, "f0": 1}))
    with pytest.raises(ValueError):
        fracocp.parse_config("{ not json")


def test_shipped_bangbang_demo():
    report, _ = fracocp.solve(CONFIGS / "bangbang_1d.json")
    assert report["verdict"] == "PASS"
    assert report["kkt"]["structural"]["gamma"] == "inf"
    assert report["kkt"]["growth"]["kappa"] == 0.5


def test_convergence_and_family():
    table = fracocp.converge(small_config(), [15, 31, 63])
    assert table["errors_decreasing"]
    assert table["lambda1_monotone_below"]
    fam = fracocp.validate_family(small_config())
    assert fam["family"]["accepted"]
