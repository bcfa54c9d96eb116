"""Reference laws for the limiting distributions used by the experiments.

The Bessel-3 process is realized as the Euclidean norm of 3-dimensional
Brownian motion. This avoids the singular 1/x drift of its SDE and is
exact at the origin, which is where everything of interest happens.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy.special import erf, ndtr

from .pathops import KilledPath
from .simulate import Path, SeedPlan

__all__ = [
    "ReferenceLaw",
    "bessel3_cdf",
    "bessel3_path_sampler",
    "besselU_cdf",
    "xi_hat_sampler",
    "limit_sup_over_shifted_grid",
    "arcsine_cdf",
    "normal_law",
    "arcsine_law",
    "bessel3_law",
    "besselU_law",
    "make_law",
    "LAW_NAMES",
]

_SQRT_2_OVER_PI = np.sqrt(2.0 / np.pi)


@dataclass
class ReferenceLaw:
    """A named distribution: exact cdf plus an exact seeded sampler."""

    name: str
    cdf: Callable[[np.ndarray], np.ndarray]
    sampler: Callable[[int, SeedPlan], np.ndarray]
    support: tuple[float, float]


def bessel3_cdf(t: float, x) -> np.ndarray:
    """Marginal cdf of a Bessel-3 process at time t (started at 0).

    F_t(x) = F_1(x/sqrt(t)) with
    F_1(x) = erf(x/sqrt(2)) - sqrt(2/pi) * x * exp(-x^2/2) for x >= 0.
    """
    if t <= 0:
        raise ValueError("t must be positive")
    x = np.asarray(x, dtype=float)
    y = x / np.sqrt(t)
    out = erf(y / np.sqrt(2.0)) - _SQRT_2_OVER_PI * y * np.exp(-0.5 * y * y)
    return np.where(y > 0, out, 0.0)


def _bessel3_marginal_samples(t, n, rng):
    z = rng.standard_normal((n, 3))
    return np.sqrt(t) * np.linalg.norm(z, axis=1)


def bessel3_path_sampler(horizon: float, n_steps: int, seeds: SeedPlan) -> Path:
    """Discrete Bessel-3 path: norm of a 3-dimensional Brownian path."""
    if n_steps < 1:
        raise ValueError("n_steps must be >= 1")
    dt = horizon / n_steps
    rng = seeds.generator()
    z = rng.standard_normal((3, n_steps))
    w = np.zeros((3, n_steps + 1))
    np.cumsum(np.sqrt(dt) * z, axis=1, out=w[:, 1:])
    return Path(
        step=dt,
        values=np.linalg.norm(w, axis=0),
        model_name="bessel3",
        seed=seeds.master_seed,
        stream_index=seeds.stream_index,
    )


def besselU_cdf(x, quadrature_nodes: int = 256) -> np.ndarray:
    """cdf of B_U: a Bessel-3 marginal at an independent uniform time.

    Computed as the fixed-node Gauss-Legendre quadrature of
    u -> F_u(x) over (0, 1).
    """
    x = np.asarray(x, dtype=float)
    if quadrature_nodes < 2:
        raise ValueError("need at least 2 quadrature nodes")
    nodes, weights = np.polynomial.legendre.leggauss(quadrature_nodes)
    u = 0.5 * (nodes + 1.0)
    w = 0.5 * weights
    vals = np.stack([bessel3_cdf(float(ui), x) for ui in u])
    return np.tensordot(w, vals, axes=(0, 0))


def xi_hat_sampler(sigma_at_sup: float, window: float, n_steps: int,
                   seeds: SeedPlan) -> tuple[KilledPath, KilledPath]:
    """One draw of the two-sided limit process at the supremum.

    Two independent Bessel-3 paths on [0, window], each negated and scaled
    by sigma_at_sup; the first is the backward branch, the second the
    forward branch. No killing: kill_time equals the window.
    """
    if sigma_at_sup <= 0:
        raise ValueError("sigma_at_sup must be positive")
    back = bessel3_path_sampler(window, n_steps, seeds)
    fwd = bessel3_path_sampler(
        window, n_steps, SeedPlan(seeds.master_seed, seeds.stream_index + 1)
    )
    mk = lambda p: KilledPath(step=p.step, values=-sigma_at_sup * p.values,
                              kill_time=window)
    return mk(back), mk(fwd)


def limit_sup_over_shifted_grid(sigma_at_sup: float, truncation: int,
                                seeds: SeedPlan, n_samples: int = 1) -> np.ndarray:
    """Samples of the limit of the scaled supremum-estimation error.

    For each sample: draw U uniform, evaluate the two-sided limit process
    at the shifted integers i + U for |i| <= truncation, return the max.
    The omitted |i| > truncation terms are dominated by the included i = 0
    term with probability -> 1 as the truncation grows, since both
    branches drift to -infinity like a negated Bessel-3.

    Evaluation at the exact times i + U uses Gaussian increments of a
    3-dimensional Brownian motion, so there is no grid discretization.
    """
    if truncation < 1:
        raise ValueError("truncation must be >= 1")
    if sigma_at_sup <= 0:
        raise ValueError("sigma_at_sup must be positive")
    k = truncation
    rng = seeds.generator()
    u = rng.random(n_samples)

    def branch_min_norm(first_dt, count):
        # 3-dim BM observed at cumulative times first_dt, first_dt+1, ...
        dts = np.empty((n_samples, count))
        dts[:, 0] = first_dt
        dts[:, 1:] = 1.0
        z = rng.standard_normal((n_samples, 3, count))
        w = np.cumsum(np.sqrt(dts)[:, None, :] * z, axis=2)
        return np.linalg.norm(w, axis=1).min(axis=1)

    # forward times U, 1+U, ..., k+U (i = 0..k); backward 1-U, ..., k-U
    fwd = branch_min_norm(u, k + 1)
    back = branch_min_norm(1.0 - u, k)
    return -sigma_at_sup * np.minimum(fwd, back)


def arcsine_cdf(x) -> np.ndarray:
    """Classical law of the argmax of Brownian motion on [0, 1]."""
    x = np.asarray(x, dtype=float)
    if np.any(x < -1e-12) or np.any(x > 1 + 1e-12):
        raise ValueError("arcsine_cdf is defined on [0, 1]")
    return (2.0 / np.pi) * np.arcsin(np.sqrt(np.clip(x, 0.0, 1.0)))


def normal_law() -> ReferenceLaw:
    return ReferenceLaw(
        name="normal",
        cdf=lambda x: ndtr(np.asarray(x, dtype=float)),
        sampler=lambda n, seeds: seeds.generator().standard_normal(n),
        support=(-np.inf, np.inf),
    )


def arcsine_law() -> ReferenceLaw:
    return ReferenceLaw(
        name="arcsine",
        cdf=arcsine_cdf,
        sampler=lambda n, seeds: np.sin(
            0.5 * np.pi * seeds.generator().random(n)) ** 2,
        support=(0.0, 1.0),
    )


def bessel3_law(t: float = 1.0) -> ReferenceLaw:
    return ReferenceLaw(
        name=f"bessel3(t={t:g})",
        cdf=lambda x: bessel3_cdf(t, x),
        sampler=lambda n, seeds: _bessel3_marginal_samples(
            t, n, seeds.generator()),
        support=(0.0, np.inf),
    )


def _besselU_samples(n, seeds):
    rng = seeds.generator()
    u = rng.random(n)
    return _bessel3_marginal_samples(1.0, n, rng) * np.sqrt(u)


def besselU_law(quadrature_nodes: int = 256) -> ReferenceLaw:
    return ReferenceLaw(
        name="besselU",
        cdf=lambda x: besselU_cdf(x, quadrature_nodes),
        sampler=_besselU_samples,
        support=(0.0, np.inf),
    )


LAW_NAMES = ("normal", "arcsine", "bessel3", "besselU")


def make_law(name: str, t: float = 1.0) -> ReferenceLaw:
    """Look up a named reference law (``t`` applies to bessel3 only)."""
    if name == "normal":
        return normal_law()
    if name == "arcsine":
        return arcsine_law()
    if name == "bessel3":
        return bessel3_law(t)
    if name == "besselU":
        return besselU_law()
    raise ValueError(f"unknown law '{name}'; choose one of {LAW_NAMES}")
