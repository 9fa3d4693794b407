import json
import math

import numpy as np
import pytest

import fracdiff


def eigenmode(k=64, Nx=32):
    return {
        "a": 0.0, "T": 1.0, "k": k, "L": 8.0, "Nx": Nx, "alpha": 0.5, "sigma": 1.0,
        "kernel": {"mode": "full"}, "forcing": {"name": "zero"},
        "w0": {"name": "cosine", "amplitude": 1.0, "mode": 1},
    }


def test_mittag_leffler_closed_forms():
    # E_1(z) = exp(z), E_{1/2}(-x) = exp(x^2) erfc(x)
    x = 1.3
    value, terms, bound = fracdiff.mittag_leffler(0.5, -x)
    assert value == pytest.approx(math.exp(x * x) * math.erfc(x), rel=1e-10)
    assert terms > 0 and bound >= 0.0
    assert fracdiff.mittag_leffler(0.5, 0.0)[0] == 1.0
    with pytest.raises(fracdiff.RegimeError):
        fracdiff.mittag_leffler(0.5, -31.0)
    with pytest.raises(fracdiff.DomainError):
        fracdiff.mittag_leffler(1.5, -1.0)


def test_discrete_caputo_of_constants_and_lines():
    assert fracdiff.discrete_caputo(np.full(33, 2.5), 0.0, 1.0, 0.4, 32) == pytest.approx(0.0, abs=1e-12)
    t = np.linspace(0.0, 1.0, 1025)
    # rescaled derivative of t at t = 1 is Gamma(1/2) Gamma(2) / Gamma(3/2) = 2
    assert fracdiff.discrete_caputo(t, 0.0, 1.0, 0.5, 1024) == pytest.approx(2.0, abs=0.05)
    assert fracdiff.caputo_quadrature(lambda s: s, 0.5, 0.0, 1.0, 4000) == pytest.approx(2.0, abs=1e-3)
    with pytest.raises(fracdiff.DomainError):
        fracdiff.discrete_caputo(t, 0.0, 1.0, 0.5, 0)
    with pytest.raises(fracdiff.DomainError):
        fracdiff.discrete_caputo(t, 0.0, 1.0, 0.5, 1, extension="sideways")


def test_interpolation_exponent():
    p, beta = fracdiff.interpolation_exponent(1, 0.5, 1.0)
    assert p == pytest.approx(3.0)
    assert beta == pytest.approx(2.0 / 3.0)


def test_energy_gap_nonnegative_for_random_series():
    rng = np.random.default_rng(3)
    u = np.concatenate([[0.0], rng.uniform(-1, 1, 40)])
    g = fracdiff.energy_gap(u, 0.0, 1.0, 0.5)
    assert g["slack"] >= -1e-10 * g["scale"]


def test_solve_respects_maximum_principle():
    out = fracdiff.solve(eigenmode())
    w = out["w"]
    assert w.shape == (65, 32)
    assert out["t"][-1] == 1.0
    assert np.all(np.abs(w) <= 1.0 + 1e-10)
    assert np.max(out["residuals"]) <= 1e-10 * (1.0 + np.max(np.abs(w)))
    assert np.array_equal(w, fracdiff.solve(json.dumps(eigenmode()))["w"])


def test_eigenmode_comparison_and_errors():
    cmp = fracdiff.eigenmode_comparison(json.dumps(eigenmode(256, 64)))
    assert cmp["mu"] > 0.0
    assert cmp["max_rel_error"] < 0.05
    bad = eigenmode()
    bad["alpha"] = 2.0
    with pytest.raises(fracdiff.FormatError, match="alpha"):
        fracdiff.solve(bad)


def test_shipped_configs_match_schema():
    jsonschema = pytest.importorskip("jsonschema")
    import pathlib

    root = pathlib.Path(__file__).resolve().parents[2]
    schema = json.loads((root / "schema" / "run_config.schema.json").read_text())
    configs = sorted((root / "configs").glob("*.json"))
    assert configs
    for path in configs:
        jsonschema.validate(json.loads(path.read_text()), schema)
    with pytest.raises(jsonschema.ValidationError):
        jsonschema.validate({"bogus": 1}, schema)
