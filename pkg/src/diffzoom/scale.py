"""Scale-function transform removing the drift of a diffusion.

For a model with drift mu and diffusion sigma started at x0, the scale
function p solves

    p'(x) = exp(-2 * integral_{x0}^{x} mu(u)/sigma(u)^2 du),   p(x0) = 0.

It is strictly increasing, and Y = p(X) is a driftless diffusion started
at 0 with diffusion coefficient sigma_tilde = (sigma * p') o p^{-1}.

p is built once on a dense grid (monotone cubic interpolation between
knots, refined until the requested tolerance) because transforming paths
evaluates it once per grid point per path.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.interpolate import PchipInterpolator

from .model import DiffusionModel, ModelError
from .simulate import Path

__all__ = ["ScaleFunction", "build_scale", "transform_model", "transform_path"]

_MAX_NODES = 1 << 16


@dataclass
class ScaleFunction:
    source_model: DiffusionModel
    valid_interval: tuple[float, float]
    tol: float
    _p: PchipInterpolator
    _h: PchipInterpolator  # H(x) = integral_{x0}^x mu/sigma^2, so p' = exp(-2H)
    _inv: PchipInterpolator

    def value(self, x):
        x = np.asarray(x, dtype=float)
        self._check_domain(x)
        return self._p(x)

    __call__ = value

    def derivative(self, x):
        x = np.asarray(x, dtype=float)
        self._check_domain(x)
        return np.exp(-2.0 * self._h(x))

    def inverse(self, y):
        y = np.asarray(y, dtype=float)
        a, b = self.valid_interval
        lo, hi = float(self._p(a)), float(self._p(b))
        if np.any(y < lo - self.tol) or np.any(y > hi + self.tol):
            raise ModelError("value outside the image of the valid interval")
        x = self._inv(np.clip(y, lo, hi))
        # two Newton corrections; p' is available in closed form
        for _ in range(2):
            x = x - (self._p(x) - y) / np.exp(-2.0 * self._h(x))
        return np.clip(x, a, b)

    def _check_domain(self, x):
        a, b = self.valid_interval
        if np.any(x < a - self.tol) or np.any(x > b + self.tol):
            raise ModelError(
                f"state outside the scale function's valid interval [{a}, {b}]"
            )


def _build_tables(model, a, b, n):
    nodes = np.linspace(a, b, n)
    g = model.mu_at(nodes) / model.sigma_at(nodes) ** 2
    if not np.all(np.isfinite(g)):
        raise ModelError("mu/sigma^2 is not finite on the interval")
    G = PchipInterpolator(nodes, g).antiderivative()
    h = G(nodes) - G(model.initial_value)
    pprime = np.exp(-2.0 * h)
    P = PchipInterpolator(nodes, pprime).antiderivative()
    p = P(nodes) - P(model.initial_value)
    return nodes, h, p


def build_scale(model: DiffusionModel, interval: tuple[float, float],
                tol: float = 1e-10) -> ScaleFunction:
    """Construct the scale function of a model on a bounded interval.

    The interval must contain the starting point and stay inside the
    model's declared range (so mu/sigma^2 is bounded there). The grid is
    refined until successive p tables agree within ``tol``.
    """
    a, b = float(interval[0]), float(interval[1])
    if not (np.isfinite(a) and np.isfinite(b) and a < b):
        raise ModelError("interval must be bounded with a < b")
    if not a <= model.initial_value <= b:
        raise ModelError("interval must contain the model's starting point")
    ra, rb = model.known_range
    if a < ra or b > rb:
        raise ModelError("interval escapes the model's known range")

    n = 1025
    nodes, h, p = _build_tables(model, a, b, n)
    while n < _MAX_NODES:
        n2 = 2 * n - 1
        nodes2, h2, p2 = _build_tables(model, a, b, n2)
        err = np.max(np.abs(p2[::2] - p))
        nodes, h, p = nodes2, h2, p2
        if err < tol:
            break
        n = n2

    if np.any(np.diff(p) <= 0):
        raise ModelError("scale function table is not strictly increasing")

    return ScaleFunction(
        source_model=model,
        valid_interval=(a, b),
        tol=tol,
        _p=PchipInterpolator(nodes, p),
        _h=PchipInterpolator(nodes, h),
        _inv=PchipInterpolator(p, nodes),
    )


def transform_model(scale: ScaleFunction, table_nodes: int = 1 << 16) -> DiffusionModel:
    """Driftless model for Y = p(X): Y0 = 0, sigma_tilde = (sigma*p') o p^-1.

    The coefficient is tabulated on a dense grid and evaluated by linear
    interpolation: the simulation engine calls it once per step per path,
    and inverting p through the interpolant there would dominate the run
    time. Outside the tabulated interval the nearest edge value is used.
    """
    src = scale.source_model
    a, b = scale.valid_interval
    xs = np.linspace(a, b, table_nodes + 1)
    ys = np.asarray(scale.value(xs), dtype=float)
    sig = src.sigma_at(xs) * scale.derivative(xs)

    def sigma_tilde(y):
        return np.interp(y, ys, sig)

    return DiffusionModel(
        name=f"{src.name}_scaled",
        drift=lambda y: 0.0 * y,
        diffusion=sigma_tilde,
        initial_value=0.0,
        known_range=(float(ys[0]), float(ys[-1])),
    )


def transform_path(scale: ScaleFunction, path: Path) -> Path:
    """Apply p pointwise; same grid. Raises if the path leaves the interval."""
    return Path(
        step=path.step,
        values=np.asarray(scale.value(path.values), dtype=float),
        model_name=f"{path.model_name}_scaled",
        seed=path.seed,
        stream_index=path.stream_index,
    )
