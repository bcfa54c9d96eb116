"""Path functionals: supremum, pre/post-supremum views, zoom operators,
quadratic variation and its inverse time change.

Conventions used throughout:

* the argmax is the LAST grid index attaining the supremum;
* pre/post-supremum views include the grid point at the supremum itself,
  so both start at exactly 0 and are <= 0 everywhere;
* zoom operators keep every fine-grid point inside the window and only
  relabel time (compress by epsilon) and rescale values by epsilon**-0.5,
  which keeps all inequalities between grid suprema exact.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .model import DiffusionModel
from .simulate import Path

__all__ = [
    "SupremumRecord",
    "KilledPath",
    "ZoomedPair",
    "PiecewiseLinear",
    "supremum",
    "pre_post_supremum",
    "zoom_fixed",
    "zoom_supremum",
    "quadratic_variation",
    "time_change_inverse",
]


@dataclass(frozen=True)
class SupremumRecord:
    sup_value: float
    argmax_time: float
    argmax_index: int


@dataclass
class KilledPath:
    """Values on a uniform grid, alive on [0, kill_time]; may be degenerate
    (a single point) when the supremum sits on the interval boundary."""

    step: float
    values: np.ndarray
    kill_time: float

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=float)

    @property
    def degenerate(self) -> bool:
        return self.values.size <= 1

    def value_at(self, t: float) -> float:
        """Value at grid time t (must land on a grid point)."""
        k = t / self.step
        ki = int(round(k))
        if abs(k - ki) > 1e-9 or not 0 <= ki < self.values.size:
            raise ValueError(f"time {t} is not on the killed path's grid")
        return float(self.values[ki])


@dataclass
class ZoomedPair:
    pre: KilledPath
    post: KilledPath
    epsilon: float

    @property
    def scale_factor(self) -> float:
        return self.epsilon ** -0.5


def supremum(path: Path) -> SupremumRecord:
    """Grid supremum with ties broken by the last attaining index."""
    v = path.values
    idx = len(v) - 1 - int(np.argmax(v[::-1]))
    return SupremumRecord(
        sup_value=float(v[idx]),
        argmax_time=idx * path.step,
        argmax_index=idx,
    )


def pre_post_supremum(path: Path) -> ZoomedPair:
    """Path seen backward/forward from its supremum, shifted to 0 at the top.

    ``pre.values[k] = X(m - k*step) - sup`` down to time 0 and
    ``post.values[k] = X(m + k*step) - sup`` up to the horizon; both
    sequences start at exactly 0. A side is degenerate (single point)
    when the argmax sits on the corresponding boundary.
    """
    rec = supremum(path)
    v = path.values
    i = rec.argmax_index
    pre = KilledPath(
        step=path.step,
        values=v[i::-1] - rec.sup_value,
        kill_time=rec.argmax_time,
    )
    post = KilledPath(
        step=path.step,
        values=v[i:] - rec.sup_value,
        kill_time=path.horizon - rec.argmax_time,
    )
    return ZoomedPair(pre=pre, post=post, epsilon=1.0)


def _grid_index(path: Path, t: float, what: str) -> int:
    k = t / path.step
    ki = int(round(k))
    if abs(k - ki) > 1e-6 * max(1.0, abs(k)):
        raise ValueError(f"{what} {t} does not land on the fine grid")
    return ki


def _check_stride(path: Path, epsilon: float, min_resolution: int) -> int:
    stride = epsilon / path.step
    s = int(round(stride))
    if s < 1 or abs(stride - s) > 1e-6 * max(1.0, stride):
        raise ValueError(
            f"epsilon {epsilon} is not an integer multiple of the fine step"
        )
    if s < min_resolution:
        raise ValueError(
            f"epsilon/step = {s} is below the required resolution "
            f"{min_resolution}"
        )
    return s


def zoom_fixed(path: Path, at_time: float, epsilon: float, window: float,
               min_resolution: int = 1) -> ZoomedPair:
    """Rescaled increments around a fixed interior time.

    Forward view ``post.values[k] = eps**-0.5 * (X(at + eps*t_k) - X(at))``
    and the mirrored backward view, with ``t_k = k * step/eps`` covering
    rescaled times up to ``window``. Both killed at ``window``.
    """
    _check_stride(path, epsilon, min_resolution)
    i0 = _grid_index(path, at_time, "at_time")
    half = epsilon * window
    if half > at_time + 1e-12 or half > path.horizon - at_time + 1e-12:
        raise ValueError("epsilon*window exceeds the data on one side")
    n = _grid_index(path, half, "epsilon*window")
    scale = epsilon ** -0.5
    zstep = path.step / epsilon
    base = path.values[i0]
    post = KilledPath(
        step=zstep,
        values=scale * (path.values[i0:i0 + n + 1] - base),
        kill_time=window,
    )
    pre = KilledPath(
        step=zstep,
        values=scale * (path.values[i0 - n:i0 + 1][::-1] - base),
        kill_time=window,
    )
    return ZoomedPair(pre=pre, post=post, epsilon=epsilon)


def zoom_supremum(path: Path, epsilon: float,
                  min_resolution: int = 1) -> ZoomedPair:
    """Pre/post-supremum views rescaled by eps**-0.5 in space, 1/eps in time.

    Kill times become m/eps and (horizon - m)/eps. With epsilon = 1 this
    reduces exactly to :func:`pre_post_supremum`.
    """
    _check_stride(path, epsilon, min_resolution)
    pair = pre_post_supremum(path)
    scale = epsilon ** -0.5
    zstep = path.step / epsilon
    pre = KilledPath(step=zstep, values=scale * pair.pre.values,
                     kill_time=pair.pre.kill_time / epsilon)
    post = KilledPath(step=zstep, values=scale * pair.post.values,
                      kill_time=pair.post.kill_time / epsilon)
    return ZoomedPair(pre=pre, post=post, epsilon=epsilon)


@dataclass
class PiecewiseLinear:
    """Monotone function table with linear interpolation between knots."""

    xs: np.ndarray
    ys: np.ndarray

    def __call__(self, x):
        return np.interp(x, self.xs, self.ys)


def quadratic_variation(path: Path, model: DiffusionModel) -> PiecewiseLinear:
    """Internal clock t -> integral of sigma(X_s)^2 ds, trapezoidal rule."""
    s2 = model.sigma_at(path.values) ** 2
    cum = np.concatenate(
        ([0.0], np.cumsum(0.5 * (s2[1:] + s2[:-1]) * path.step))
    )
    return PiecewiseLinear(xs=path.times, ys=cum)


def time_change_inverse(qv_table: PiecewiseLinear) -> PiecewiseLinear:
    """Inverse of a strictly increasing function table (swap the axes)."""
    if np.any(np.diff(qv_table.ys) <= 0):
        raise ValueError("table is not strictly increasing")
    return PiecewiseLinear(xs=qv_table.ys.copy(), ys=qv_table.xs.copy())
