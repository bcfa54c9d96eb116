"""One-dimensional diffusion models dX = mu(X) dt + sigma(X) dW.

A model is a pair of state-dependent coefficients plus a starting point.
Coefficients must accept numpy arrays (broadcasting scalars is fine) so the
simulation engine can evaluate them on whole batches of paths at once.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

__all__ = [
    "DiffusionModel",
    "ModelError",
    "ValidationReport",
    "builtin_model",
    "validate",
    "BUILTIN_MODELS",
]


class ModelError(ValueError):
    """Bad model definition or parameters."""


@dataclass(frozen=True)
class DiffusionModel:
    """Drift/diffusion pair with domain metadata.

    Parameters
    ----------
    name : str
        Identifier used in configs and reports.
    drift : callable
        mu(x), units of state per unit time. Must be vectorized.
    diffusion : callable
        sigma(x), units of state per sqrt(time). Must be vectorized and
        strictly positive on ``known_range``.
    initial_value : float
        Starting state x0.
    known_range : (float, float)
        Interval of state space on which the coefficients are declared
        valid. Evaluation outside it is permitted but unchecked.
    constant_coefficients : bool
        Set when both coefficients are state-independent; lets the engine
        take a vectorized fast path. Only set this if it is actually true.
    """

    name: str
    drift: Callable[[np.ndarray], np.ndarray]
    diffusion: Callable[[np.ndarray], np.ndarray]
    initial_value: float
    known_range: tuple[float, float] = (-np.inf, np.inf)
    constant_coefficients: bool = False

    def sigma_at(self, x):
        return np.asarray(self.diffusion(np.asarray(x, dtype=float)), dtype=float)

    def mu_at(self, x):
        return np.asarray(self.drift(np.asarray(x, dtype=float)), dtype=float)


@dataclass
class ValidationReport:
    model_name: str
    interval: tuple[float, float]
    grid_points: int
    min_diffusion: float
    max_abs_drift: float
    passed: bool
    messages: list[str] = field(default_factory=list)


def _require(params: dict, key: str, name: str) -> float:
    if key not in params:
        raise ModelError(f"model '{name}' requires parameter '{key}'")
    return float(params[key])


def _bm(params):
    s0 = _require(params, "sigma0", "bm")
    if s0 <= 0:
        raise ModelError("sigma0 must be > 0")
    x0 = float(params.get("x0", 0.0))
    return DiffusionModel(
        name="bm",
        drift=lambda x: 0.0 * x,
        diffusion=lambda x: s0 + 0.0 * x,
        initial_value=x0,
        constant_coefficients=True,
    )


def _bm_drift(params):
    m0 = _require(params, "mu0", "bm_drift")
    s0 = _require(params, "sigma0", "bm_drift")
    if s0 <= 0:
        raise ModelError("sigma0 must be > 0")
    x0 = float(params.get("x0", 0.0))
    return DiffusionModel(
        name="bm_drift",
        drift=lambda x: m0 + 0.0 * x,
        diffusion=lambda x: s0 + 0.0 * x,
        initial_value=x0,
        constant_coefficients=True,
    )


def _ou(params):
    theta = _require(params, "theta", "ou")
    s0 = _require(params, "sigma0", "ou")
    if s0 <= 0:
        raise ModelError("sigma0 must be > 0")
    x0 = float(params.get("x0", 0.0))
    return DiffusionModel(
        name="ou",
        drift=lambda x: -theta * x,
        diffusion=lambda x: s0 + 0.0 * x,
        initial_value=x0,
    )


def _gbm(params):
    s0 = _require(params, "sigma0", "gbm")
    x0 = _require(params, "x0", "gbm")
    if s0 <= 0:
        raise ModelError("sigma0 must be > 0")
    if x0 <= 0:
        raise ModelError("gbm requires x0 > 0 (sigma(x) = sigma0*x must stay positive)")
    return DiffusionModel(
        name="gbm",
        drift=lambda x: 0.0 * x,
        diffusion=lambda x: s0 * x,
        initial_value=x0,
        known_range=(0.0, np.inf),
    )


BUILTIN_MODELS = {
    "bm": _bm,
    "bm_drift": _bm_drift,
    "ou": _ou,
    "gbm": _gbm,
}


def builtin_model(name: str, params: dict | None = None) -> DiffusionModel:
    """Construct one of the built-in models.

    Known names and their parameters:

    ==========  =========================  ==================================
    name        parameters                 coefficients
    ==========  =========================  ==================================
    bm          sigma0 (>0), x0=0          mu = 0, sigma = sigma0
    bm_drift    mu0, sigma0 (>0), x0=0     mu = mu0, sigma = sigma0
    ou          theta, sigma0 (>0), x0=0   mu(x) = -theta*x, sigma = sigma0
    gbm         sigma0 (>0), x0 (>0)       mu = 0, sigma(x) = sigma0*x
    ==========  =========================  ==================================
    """
    if name not in BUILTIN_MODELS:
        raise ModelError(
            f"unknown model '{name}'; choose one of {sorted(BUILTIN_MODELS)}"
        )
    return BUILTIN_MODELS[name](dict(params or {}))


def validate(model: DiffusionModel, interval: tuple[float, float],
             grid_points: int = 100) -> ValidationReport:
    """Check coefficient regularity on a bounded interval.

    Samples a dense grid, reports the minimum of sigma and the maximum of
    |mu|, and flags failure when sigma is not strictly positive somewhere
    on the grid. Does not raise: the report carries the flags.
    """
    a, b = float(interval[0]), float(interval[1])
    if not (np.isfinite(a) and np.isfinite(b) and a < b):
        raise ModelError("validation interval must be bounded with a < b")
    if grid_points < 2:
        raise ModelError("grid_points must be >= 2")
    xs = np.linspace(a, b, grid_points)
    sig = model.sigma_at(xs)
    mu = model.mu_at(xs)
    messages = []
    min_sig = float(np.min(sig))
    max_mu = float(np.max(np.abs(mu)))
    ok = True
    if not np.all(np.isfinite(sig)) or not np.all(np.isfinite(mu)):
        ok = False
        messages.append("nonfinite coefficient value on the grid")
    if min_sig <= 0:
        ok = False
        messages.append(f"diffusion not strictly positive (min {min_sig:g})")
    return ValidationReport(
        model_name=model.name,
        interval=(a, b),
        grid_points=grid_points,
        min_diffusion=min_sig,
        max_abs_drift=max_mu,
        passed=ok,
        messages=messages,
    )
