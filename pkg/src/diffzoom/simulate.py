"""Euler-Maruyama path generation with reproducible, splittable randomness.

Randomness is counter-based: each path owns a Philox stream keyed by
``(master_seed, stream_index)``, so an ensemble simulated with streams
0..N-1 is the same multiset of paths no matter how the work is split
across threads or batches.

The engine works in fixed-size step chunks. For models flagged as having
constant coefficients the chunk update is a vectorized cumulative sum;
the chunk size is part of the floating-point association order there, so
it is a fixed constant rather than something derived from the workload.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .model import DiffusionModel

__all__ = [
    "SeedPlan",
    "Path",
    "SubgridSpec",
    "EnsembleResult",
    "SimulationError",
    "simulate_path",
    "simulate_ensemble",
    "restrict_to_subgrid",
    "aux_stream_index",
]

#: step-chunk size; fixed because it enters the summation order (see module docstring)
CHUNK_STEPS = 8192

#: default number of paths advanced together in one block
BLOCK_PATHS = 1024

_MASK64 = (1 << 64) - 1

# Auxiliary draws (sampling offsets, reference samplers, ...) live in stream
# indices far above any plausible path count so they never collide with paths.
_AUX_BASE = 1 << 62


class SimulationError(RuntimeError):
    """Simulation produced a nonfinite value (coefficient blow-up)."""


def aux_stream_index(channel: int, index: int = 0) -> int:
    """Stream index for non-path randomness, disjoint from path streams."""
    if not 0 <= channel < 1 << 8:
        raise ValueError("channel out of range")
    return _AUX_BASE + (channel << 48) + index


@dataclass(frozen=True)
class SeedPlan:
    """Identifies one random stream: a pure function of both fields."""

    master_seed: int
    stream_index: int = 0

    def generator(self) -> np.random.Generator:
        key = np.array(
            [self.master_seed & _MASK64, self.stream_index & _MASK64],
            dtype=np.uint64,
        )
        return np.random.Generator(np.random.Philox(key=key))


@dataclass
class Path:
    """A trajectory on the uniform grid k*step, k = 0..len(values)-1."""

    step: float
    values: np.ndarray
    model_name: str = ""
    seed: int = 0
    stream_index: int = 0

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=float)
        if self.values.ndim != 1 or self.values.size < 2:
            raise ValueError("a path needs at least two values")
        if self.step <= 0:
            raise ValueError("step must be positive")

    @property
    def horizon(self) -> float:
        return self.step * (len(self.values) - 1)

    @property
    def times(self) -> np.ndarray:
        return self.step * np.arange(len(self.values))


@dataclass(frozen=True)
class SubgridSpec:
    """Observation scheme: value indices offsets[k] + j*stride for path k."""

    stride: int
    offsets: np.ndarray  # shape (n_paths,), each in [0, stride)


@dataclass
class EnsembleResult:
    step: float
    n_steps: int
    sup: np.ndarray
    argmax_index: np.ndarray
    terminal: np.ndarray
    full: np.ndarray | None = None
    kept: np.ndarray | None = None
    keep_indices: np.ndarray | None = None
    subgrid_values: list[np.ndarray] = field(default_factory=list)


def _fill_normals(gens, out):
    for r, g in enumerate(gens):
        out[r] = g.standard_normal(out.shape[1])


def _run_block(model, dt, n_steps, master_seed, streams, store_full,
               keep_indices, subgrids):
    b = len(streams)
    sqdt = np.sqrt(dt)
    x0 = float(model.initial_value)
    gens = [SeedPlan(master_seed, s).generator() for s in streams]

    x = np.full(b, x0)
    sup = np.full(b, x0)
    amax = np.zeros(b, dtype=np.int64)

    full = None
    if store_full:
        full = np.empty((b, n_steps + 1))
        full[:, 0] = x0

    kept = None
    if keep_indices is not None:
        kept = np.empty((b, len(keep_indices)))
        for pos in np.flatnonzero(keep_indices == 0):
            kept[:, pos] = x0

    sub_out = []
    for spec in subgrids:
        width = n_steps // spec.stride + 1
        arr = np.full((b, width), np.nan)
        zero_off = spec.offsets == 0
        arr[zero_off, 0] = x0
        sub_out.append(arr)

    const = model.constant_coefficients
    if const:
        mu0 = float(model.mu_at(x0))
        sig0 = float(model.sigma_at(x0))

    z = np.empty((b, CHUNK_STEPS))
    start = 0
    while start < n_steps:
        cs = min(CHUNK_STEPS, n_steps - start)
        zc = z[:, :cs]
        _fill_normals(gens, zc)

        if const:
            incr = sig0 * sqdt * zc
            incr += mu0 * dt
            np.cumsum(incr, axis=1, out=incr)
            xchunk = incr
            xchunk += x[:, None]
            x = xchunk[:, -1].copy()
        else:
            xchunk = np.empty((b, cs))
            for j in range(cs):
                x = x + model.mu_at(x) * dt + model.sigma_at(x) * (sqdt * zc[:, j])
                xchunk[:, j] = x

        if not np.all(np.isfinite(xchunk)):
            bad = np.argwhere(~np.isfinite(xchunk))
            r, c = bad[0]
            raise SimulationError(
                f"nonfinite value for model '{model.name}' at step "
                f"{start + 1 + c} (stream {streams[r]})"
            )

        cmax = xchunk.max(axis=1)
        clast = cs - 1 - np.argmax(xchunk[:, ::-1], axis=1)
        upd = cmax >= sup  # >= keeps the LAST attaining index across chunks
        sup[upd] = cmax[upd]
        amax[upd] = start + 1 + clast[upd]

        if full is not None:
            full[:, start + 1:start + 1 + cs] = xchunk

        if kept is not None:
            lo = np.searchsorted(keep_indices, start + 1)
            hi = np.searchsorted(keep_indices, start + cs, side="right")
            for pos in range(lo, hi):
                kept[:, pos] = xchunk[:, keep_indices[pos] - start - 1]

        for spec, arr in zip(subgrids, sub_out):
            st = spec.stride
            for r in range(b):
                off = int(spec.offsets[r])
                g0 = off + st * (-((start + 1 - off) // -st))  # ceil division
                if g0 > start + cs:
                    continue
                vals = xchunk[r, g0 - start - 1::st]
                c0 = (g0 - off) // st
                arr[r, c0:c0 + len(vals)] = vals

        start += cs

    return EnsembleResult(
        step=dt,
        n_steps=n_steps,
        sup=sup,
        argmax_index=amax,
        terminal=x.copy(),
        full=full,
        kept=kept,
        keep_indices=None if keep_indices is None else keep_indices.copy(),
        subgrid_values=sub_out,
    )


def simulate_ensemble(model: DiffusionModel, horizon: float, n_steps: int,
                      master_seed: int, streams, *, store_full: bool = False,
                      keep_indices=None, subgrids: tuple = (),
                      threads: int = 1,
                      block: int = BLOCK_PATHS) -> EnsembleResult:
    """Simulate one path per stream index and reduce on the fly.

    Always tracks the running supremum and its last-attaining grid index.
    Optionally stores the full value matrix, values at a shared set of
    grid indices (``keep_indices``), and values on per-path shifted
    subgrids (``subgrids``, a sequence of :class:`SubgridSpec`).

    The result is identical for any ``threads``/``block`` choice.
    """
    if n_steps < 1:
        raise ValueError("n_steps must be >= 1")
    if horizon <= 0:
        raise ValueError("horizon must be positive")
    streams = list(streams)
    n = len(streams)
    if n == 0:
        raise ValueError("need at least one stream")
    dt = horizon / n_steps

    if keep_indices is not None:
        keep_indices = np.asarray(sorted(set(int(i) for i in keep_indices)),
                                  dtype=np.int64)
        if keep_indices.size and (keep_indices[0] < 0 or keep_indices[-1] > n_steps):
            raise ValueError("keep index outside the grid")
    for spec in subgrids:
        if spec.stride < 1:
            raise ValueError("subgrid stride must be >= 1")
        offs = np.asarray(spec.offsets)
        if offs.shape != (n,):
            raise ValueError("subgrid offsets must have one entry per stream")
        if np.any((offs < 0) | (offs >= spec.stride)):
            raise ValueError("subgrid offsets must lie in [0, stride)")

    blocks = [slice(i, min(i + block, n)) for i in range(0, n, block)]

    def work(sl):
        sub = tuple(
            SubgridSpec(spec.stride, np.asarray(spec.offsets)[sl])
            for spec in subgrids
        )
        return _run_block(model, dt, n_steps, master_seed, streams[sl],
                          store_full, keep_indices, sub)

    if threads > 1 and len(blocks) > 1:
        with ThreadPoolExecutor(max_workers=threads) as ex:
            parts = list(ex.map(work, blocks))
    else:
        parts = [work(sl) for sl in blocks]

    def cat(attr):
        vals = [getattr(p, attr) for p in parts]
        return None if vals[0] is None else np.concatenate(vals, axis=0)

    return EnsembleResult(
        step=dt,
        n_steps=n_steps,
        sup=cat("sup"),
        argmax_index=cat("argmax_index"),
        terminal=cat("terminal"),
        full=cat("full"),
        kept=cat("kept"),
        keep_indices=keep_indices,
        subgrid_values=[
            np.concatenate([p.subgrid_values[k] for p in parts], axis=0)
            for k in range(len(subgrids))
        ],
    )


def simulate_path(model: DiffusionModel, horizon: float, n_steps: int,
                  seeds: SeedPlan) -> Path:
    """Single Euler-Maruyama path; deterministic given all arguments."""
    res = simulate_ensemble(model, horizon, n_steps, seeds.master_seed,
                            [seeds.stream_index], store_full=True)
    return Path(
        step=res.step,
        values=res.full[0],
        model_name=model.name,
        seed=seeds.master_seed,
        stream_index=seeds.stream_index,
    )


def restrict_to_subgrid(path: Path, stride: int, offset: int = 0) -> Path:
    """Observe a path at indices offset, offset+stride, ... (nested grid)."""
    if stride < 1:
        raise ValueError("stride must be >= 1")
    if not 0 <= offset < len(path.values):
        raise ValueError("offset outside the path")
    values = path.values[offset::stride]
    if values.size == 0:
        raise ValueError("empty subgrid")
    return Path(
        step=path.step * stride,
        values=values.copy(),
        model_name=path.model_name,
        seed=path.seed,
        stream_index=path.stream_index,
    )
