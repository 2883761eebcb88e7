import pytest

from dataecon import (BASELINE, ModelParams, ParameterError, baseline_params,
                      regime, validate_params)


def test_baseline_values():
    p = baseline_params()
    assert (p.alpha, p.beta, p.w, p.delta, p.rho) == (0.6, 0.2, 1.0, 0.08, 0.07)
    assert (p.sigma, p.a) == (2.0, 2.0)


def test_baseline_regime_sign_negative():
    p = validate_params({"eta": 0.2, "theta": 0.5})
    r = regime(p)
    assert r.k_exponent_sign == -1
    assert not r.singular


@pytest.mark.parametrize("field,value", [
    ("alpha", 1.2), ("alpha", 0.0), ("beta", 1.0), ("eta", 1.0),
    ("eta", -0.1), ("theta", 1.5), ("w", 0.0), ("delta", -0.01),
    ("rho", 0.0), ("sigma", 1.0), ("a", 0.0),
])
def test_out_of_range_rejected_naming_field(field, value):
    with pytest.raises(ParameterError) as exc:
        validate_params({field: value})
    assert field in str(exc.value)


def test_alpha_plus_beta_bound():
    with pytest.raises(ParameterError) as exc:
        validate_params({"alpha": 0.7, "beta": 0.5})
    assert "alpha + beta" in str(exc.value)


def test_all_violations_reported_together():
    with pytest.raises(ParameterError) as exc:
        validate_params({"alpha": 1.2, "w": -1.0, "sigma": 0.5})
    msg = str(exc.value)
    assert "alpha" in msg and "w" in msg and "sigma" in msg
    assert len(exc.value.violations) == 3


def test_unknown_field_rejected():
    with pytest.raises(ParameterError) as exc:
        validate_params({"gamma": 0.5})
    assert "gamma" in str(exc.value)


def test_singular_at_band_center():
    # alpha+beta+alpha*eta-1 = 0 exactly at eta = (1-alpha-beta)/alpha
    p = ModelParams(alpha=0.6, beta=0.2, eta=1.0 / 3.0, theta=0.5)
    r = regime(p)
    assert r.singular
    assert r.k_exponent_sign == 0 or abs(p.k_exponent) < 1e-15


def test_band_is_configurable():
    p = ModelParams(alpha=0.6, beta=0.2, eta=0.31, theta=0.5)
    assert regime(p).singular          # default band 0.02; exponent -0.014
    assert not regime(p, band=0.005).singular
    q = p.replace(singular_band=0.005)
    assert not regime(q).singular


def test_edges_admitted_for_reductions():
    validate_params({"eta": 0.0, "theta": 0.0})
    validate_params({"eta": 0.0, "theta": 1.0})
    validate_params({"alpha": 0.5, "beta": 0.5})


def test_composite_positivity_invariants():
    for record in ({"eta": 0.9}, {"alpha": 0.9, "beta": 0.1, "eta": 0.85}):
        p = validate_params(record)
        assert 1.0 - p.alpha * p.eta > 0.0
        assert 1.0 - p.beta - p.alpha * p.eta > 0.0


def test_defaults_cover_all_baseline_keys():
    assert set(BASELINE) == {"alpha", "beta", "eta", "theta", "w", "delta",
                             "rho", "sigma", "a"}
