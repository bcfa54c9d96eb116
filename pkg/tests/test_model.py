import numpy as np
import pytest

from diffzoom.model import (
    BUILTIN_MODELS,
    DiffusionModel,
    ModelError,
    builtin_model,
    validate,
)


def test_builtin_catalog_names():
    assert set(BUILTIN_MODELS) == {"bm", "bm_drift", "ou", "gbm"}


def test_bm_coefficients():
    m = builtin_model("bm", {"sigma0": 2.0})
    x = np.array([-1.0, 0.0, 3.0])
    assert np.all(m.mu_at(x) == 0.0)
    assert np.all(m.sigma_at(x) == 2.0)
    assert m.initial_value == 0.0
    assert m.constant_coefficients


def test_bm_drift_coefficients():
    m = builtin_model("bm_drift", {"mu0": -1.5, "sigma0": 0.5, "x0": 2.0})
    x = np.linspace(-3, 3, 7)
    assert np.all(m.mu_at(x) == -1.5)
    assert np.all(m.sigma_at(x) == 0.5)
    assert m.initial_value == 2.0
    assert m.constant_coefficients


def test_ou_coefficients():
    m = builtin_model("ou", {"theta": 2.0, "sigma0": 1.0})
    x = np.array([-1.0, 0.5])
    assert np.allclose(m.mu_at(x), [2.0, -1.0])
    assert np.all(m.sigma_at(x) == 1.0)
    assert not m.constant_coefficients


def test_gbm_coefficients_and_range():
    m = builtin_model("gbm", {"sigma0": 0.5, "x0": 1.0})
    x = np.array([0.5, 2.0])
    assert np.allclose(m.sigma_at(x), [0.25, 1.0])
    assert np.all(m.mu_at(x) == 0.0)
    assert m.known_range == (0.0, np.inf)


def test_vectorization_accepts_scalars():
    m = builtin_model("ou", {"theta": 1.0, "sigma0": 1.0})
    assert float(m.mu_at(2.0)) == -2.0
    assert float(m.sigma_at(2.0)) == 1.0


@pytest.mark.parametrize("name,params", [
    ("bm", {}),
    ("bm_drift", {"sigma0": 1.0}),
    ("ou", {"theta": 1.0}),
    ("gbm", {"sigma0": 1.0}),
])
def test_missing_parameters_raise(name, params):
    with pytest.raises(ModelError):
        builtin_model(name, params)


def test_bad_parameters_raise():
    with pytest.raises(ModelError):
        builtin_model("bm", {"sigma0": 0.0})
    with pytest.raises(ModelError):
        builtin_model("gbm", {"sigma0": 1.0, "x0": -1.0})
    with pytest.raises(ModelError):
        builtin_model("nope", {"sigma0": 1.0})


def test_validate_passes_for_bm():
    rep = validate(builtin_model("bm", {"sigma0": 1.0}), (-2.0, 2.0))
    assert rep.passed
    assert rep.min_diffusion == 1.0
    assert rep.max_abs_drift == 0.0
    assert rep.messages == []


def test_validate_flags_vanishing_diffusion():
    # sigma(x) = x vanishes at 0, so a grid spanning 0 must fail
    bad = DiffusionModel(
        name="linear_sigma",
        drift=lambda x: 0.0 * x,
        diffusion=lambda x: x,
        initial_value=1.0,
    )
    rep = validate(bad, (-1.0, 1.0))
    assert not rep.passed
    assert rep.min_diffusion <= 0
    assert any("positive" in msg for msg in rep.messages)


def test_validate_rejects_bad_interval():
    m = builtin_model("bm", {"sigma0": 1.0})
    with pytest.raises(ModelError):
        validate(m, (1.0, -1.0))
    with pytest.raises(ModelError):
        validate(m, (0.0, np.inf))
