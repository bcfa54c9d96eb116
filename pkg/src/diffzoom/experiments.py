"""The four end-to-end experiments and their structured reports.

Each ``run_*`` function simulates an ensemble, computes the relevant
rescaled statistics, tests them against the reference laws, and returns
an :class:`ExperimentReport`. Reports are bit-reproducible given the
configuration and master seed; wall-clock numbers are isolated in the
``timing`` block so the rest of the JSON can be compared byte for byte.
"""

from __future__ import annotations

import csv
import json
import time
from dataclasses import dataclass, field, asdict

import numpy as np

from .model import DiffusionModel, builtin_model
from .scale import build_scale, transform_model
from .simulate import SeedPlan, SubgridSpec, aux_stream_index, simulate_ensemble
from .reference import (
    ReferenceLaw,
    arcsine_law,
    bessel3_law,
    besselU_law,
    limit_sup_over_shifted_grid,
    normal_law,
)
from .stats import (
    EmpiricalDistribution,
    ks_one_sample,
    ks_two_sample,
    mixing_diagnostic,
    rate_fit,
)

__all__ = [
    "ConfigError",
    "ExperimentConfig",
    "ExperimentReport",
    "CriterionCheck",
    "run_zoom_at_fixed_time",
    "run_argmax_boundary",
    "run_zoom_at_supremum",
    "run_sup_estimation",
    "estimate_from_path",
    "write_samples_csv",
    "CSV_SCHEMA_VERSION",
]

CSV_SCHEMA_VERSION = 1

# auxiliary randomness channels (disjoint Philox streams, see simulate)
_CH_SAMPLE_OFFSETS = 1
_CH_CONJECTURE = 2
_CH_PILOT = 3

#: default batch budget for full-path storage, in stored values
_FULL_VALUE_BUDGET = 1 << 25


class ConfigError(ValueError):
    """Invalid experiment configuration."""


@dataclass
class ExperimentConfig:
    """Shared configuration of all experiments.

    ``epsilons`` must be integer multiples of ``delta``, divide the fine
    grid evenly, and satisfy eps/delta >= ``resolution``.
    """

    model: str = "bm"
    params: dict = field(default_factory=lambda: {"sigma0": 1.0})
    delta: float = 1e-4
    horizon: float = 1.0
    epsilons: tuple = (1e-2,)
    n_paths: int = 1000
    master_seed: int = 0xD1FF
    resolution: int = 100
    truncation_k: int = 8
    zoom_time: float | None = None
    window: float = 1.0
    threads: int = 1
    ks_threshold: float = 0.05
    alpha: float = 0.001
    n_slices: int = 4
    boundary_tol: float = 0.01
    uniform_ks_threshold: float = 0.03
    conjecture_ks_threshold: float = 0.07
    conjecture_samples: int = 100_000
    max_excluded_fraction: float = 0.20
    scale_interval: tuple | None = None

    def make_model(self) -> DiffusionModel:
        return builtin_model(self.model, self.params)

    @property
    def n_steps(self) -> int:
        n = self.horizon / self.delta
        ni = int(round(n))
        if ni < 1 or abs(n - ni) > 1e-6 * max(1.0, n):
            raise ConfigError("horizon must be an integer number of fine steps")
        return ni

    def stride(self, eps: float) -> int:
        s = eps / self.delta
        si = int(round(s))
        if si < 1 or abs(s - si) > 1e-6 * max(1.0, s):
            raise ConfigError(
                f"epsilon {eps} is not an integer multiple of delta {self.delta}"
            )
        return si

    def validate(self):
        if self.n_paths < 1:
            raise ConfigError("n_paths must be >= 1")
        if self.threads < 1:
            raise ConfigError("threads must be >= 1")
        n = self.n_steps
        for eps in self.epsilons:
            s = self.stride(eps)
            if s < self.resolution:
                raise ConfigError(
                    f"epsilon {eps}: eps/delta = {s} is below the resolution "
                    f"requirement {self.resolution}"
                )
            if n % s != 0:
                raise ConfigError(
                    f"epsilon {eps} does not divide the fine grid evenly"
                )

    def echo(self) -> dict:
        d = asdict(self)
        d["epsilons"] = list(self.epsilons)
        # worker count is an execution detail, like wall time: reports must
        # not depend on it, so it stays out of the echoed config
        del d["threads"]
        return d


@dataclass
class CriterionCheck:
    id: str
    description: str
    value: float | None
    threshold: float | None
    comparator: str
    passed: bool | None  # None = informational only

    def to_dict(self) -> dict:
        return asdict(self)


@dataclass
class ExperimentReport:
    experiment: str
    config: dict
    per_epsilon: list = field(default_factory=list)
    checks: list = field(default_factory=list)
    counts: dict = field(default_factory=dict)
    timing: dict = field(default_factory=dict)
    samples: dict = field(default_factory=dict)  # not serialized

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks if c.passed is not None)

    def to_dict(self) -> dict:
        return {
            "experiment": self.experiment,
            "config": self.config,
            "per_epsilon": self.per_epsilon,
            "checks": [c.to_dict() for c in self.checks],
            "counts": self.counts,
            "passed": self.passed,
            "timing": self.timing,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)


def _timed(report: ExperimentReport, t0: float, n_paths: int):
    wall = time.perf_counter() - t0
    report.timing = {
        "wall_seconds": wall,
        "paths_per_second": n_paths / wall if wall > 0 else None,
    }
    return report


def _sigma_at(model: DiffusionModel, x: np.ndarray) -> np.ndarray:
    sig = model.sigma_at(x)
    return np.broadcast_to(np.asarray(sig, dtype=float), np.shape(x)).copy()


# ---------------------------------------------------------------------------
# zooming in at a fixed time


def run_zoom_at_fixed_time(config: ExperimentConfig,
                           model: DiffusionModel | None = None) -> ExperimentReport:
    """Rescaled forward/backward increments at an interior time.

    For each epsilon the marginal at rescaled time 1 is taken in both
    directions, normalized per path by sigma at the anchor value, and
    compared to N(0, 1). Independence from the anchor value and between
    the two directions is checked with the quantile-slice diagnostic.
    """
    t0 = time.perf_counter()
    config.validate()
    model = model or config.make_model()
    n = config.n_steps
    at = config.zoom_time if config.zoom_time is not None else config.horizon / 2
    i0 = int(round(at / config.delta))
    if not 0 < i0 < n:
        raise ConfigError("zoom time must be an interior grid point")

    strides = [config.stride(e) for e in config.epsilons]
    for e, s in zip(config.epsilons, strides):
        if i0 - s < 0 or i0 + s > n:
            raise ConfigError(f"epsilon {e}: zoom window exceeds the data")

    keep = sorted({i0} | {i0 + s for s in strides} | {i0 - s for s in strides})
    res = simulate_ensemble(model, config.horizon, n, config.master_seed,
                            range(config.n_paths), keep_indices=keep,
                            threads=config.threads)
    pos = {k: i for i, k in enumerate(res.keep_indices)}
    anchor = res.kept[:, pos[i0]]
    sig = _sigma_at(model, anchor)

    normal = normal_law()
    report = ExperimentReport("zoom_at_fixed_time", config.echo())
    for e, s in zip(config.epsilons, strides):
        scale = 1.0 / (np.sqrt(e) * sig)
        fwd = (res.kept[:, pos[i0 + s]] - anchor) * scale
        back = (res.kept[:, pos[i0 - s]] - anchor) * scale
        ks_f = ks_one_sample(EmpiricalDistribution.from_samples(fwd), normal)
        ks_b = ks_one_sample(EmpiricalDistribution.from_samples(back), normal)
        mix_anchor = mixing_diagnostic(fwd, anchor, config.n_slices)
        mix_dirs = mixing_diagnostic(fwd, back, config.n_slices)
        report.per_epsilon.append({
            "epsilon": e,
            "ks_forward_vs_normal": ks_f.summary(),
            "ks_backward_vs_normal": ks_b.summary(),
            "mixing_vs_anchor": mix_anchor.summary(),
            "mixing_forward_vs_backward": mix_dirs.summary(),
        })
        report.checks.append(CriterionCheck(
            id=f"zoom_fixed.forward_normal[eps={e:g}]",
            description="forward marginal (normalized) close to N(0,1)",
            value=ks_f.statistic, threshold=config.ks_threshold,
            comparator="<", passed=ks_f.statistic < config.ks_threshold))
        report.checks.append(CriterionCheck(
            id=f"zoom_fixed.backward_normal[eps={e:g}]",
            description="backward marginal (normalized) close to N(0,1)",
            value=ks_b.statistic, threshold=config.ks_threshold,
            comparator="<", passed=ks_b.statistic < config.ks_threshold))
        report.checks.append(CriterionCheck(
            id=f"zoom_fixed.mixing_anchor[eps={e:g}]",
            description="normalized marginal independent of the anchor value",
            value=mix_anchor.max_statistic, threshold=None,
            comparator=f"no rejection at alpha={config.alpha}",
            passed=not mix_anchor.reject_at[config.alpha]))
        report.checks.append(CriterionCheck(
            id=f"zoom_fixed.mixing_directions[eps={e:g}]",
            description="forward marginal independent of the backward one",
            value=mix_dirs.max_statistic, threshold=None,
            comparator=f"no rejection at alpha={config.alpha}",
            passed=not mix_dirs.reject_at[config.alpha]))
        report.samples[f"forward_normalized[eps={e:g}]"] = fwd
        report.samples[f"backward_normalized[eps={e:g}]"] = back
    report.samples["anchor_value"] = anchor
    report.counts = {"n_paths": config.n_paths}
    return _timed(report, t0, config.n_paths)


# ---------------------------------------------------------------------------
# argmax distribution / boundary behavior


def run_argmax_boundary(config: ExperimentConfig,
                        model: DiffusionModel | None = None) -> ExperimentReport:
    """Distribution of the supremum time; arcsine comparison for bm.

    The arcsine KS check is asserted only for the driftless bm model;
    for other models the statistic is recorded as informational since
    drift changes the law.
    """
    t0 = time.perf_counter()
    config.validate()
    model = model or config.make_model()
    n = config.n_steps
    res = simulate_ensemble(model, config.horizon, n, config.master_seed,
                            range(config.n_paths), threads=config.threads)
    m = res.argmax_index * config.delta / config.horizon
    ks = ks_one_sample(EmpiricalDistribution.from_samples(m), arcsine_law())
    frac_boundary = float(np.mean(res.argmax_index == n))

    is_bm = model.name == "bm"
    report = ExperimentReport("argmax_boundary", config.echo())
    report.per_epsilon.append({
        "ks_vs_arcsine": ks.summary(),
        "fraction_argmax_at_horizon": frac_boundary,
    })
    report.checks.append(CriterionCheck(
        id="argmax.arcsine",
        description="argmax time distribution close to the arcsine law",
        value=ks.statistic, threshold=0.02 if is_bm else None,
        comparator="<", passed=(ks.statistic < 0.02) if is_bm else None))
    report.checks.append(CriterionCheck(
        id="argmax.boundary_fraction",
        description="fraction of paths peaking at the final grid point",
        value=frac_boundary, threshold=config.boundary_tol,
        comparator="<=",
        passed=(frac_boundary <= config.boundary_tol) if is_bm else None))
    report.samples["argmax_time"] = m
    report.counts = {"n_paths": config.n_paths,
                     "argmax_at_horizon": int(np.sum(res.argmax_index == n))}
    return _timed(report, t0, config.n_paths)


# ---------------------------------------------------------------------------
# zooming in at the supremum


def _pilot_interval(model: DiffusionModel, config: ExperimentConfig):
    """Data-driven interval for the scale transform: pilot path range,
    widened by half its length, clipped to the model's known range."""
    res = simulate_ensemble(model, config.horizon,
                            max(1000, config.resolution * 10),
                            config.master_seed,
                            [aux_stream_index(_CH_PILOT, k) for k in range(64)],
                            store_full=True)
    lo = float(res.full.min())
    hi = float(res.full.max())
    pad = 0.5 * (hi - lo) + 1e-6
    ra, rb = model.known_range
    eps_clip = 1e-9 * max(1.0, abs(hi) + abs(lo))
    return (max(lo - pad, ra + eps_clip), min(hi + pad, rb))


def run_zoom_at_supremum(config: ExperimentConfig,
                         model: DiffusionModel | None = None,
                         via_scale: bool = False,
                         stream_base: int = 0) -> ExperimentReport:
    """Rescaled pre/post-supremum marginals against Bessel-3 laws.

    For each epsilon, paths whose zoom window crosses the time boundary
    are excluded (and counted); the surviving marginals at rescaled times
    1/4 and 1, normalized per path by -sigma(sup), are compared to the
    Bessel-3 cdf at the matching times.

    With ``via_scale`` the model is first transformed to its driftless
    version through the scale function and the transformed model is
    simulated directly (the supremum statistics then refer to it).
    """
    t0 = time.perf_counter()
    config.validate()
    model = model or config.make_model()
    if via_scale:
        interval = config.scale_interval or _pilot_interval(model, config)
        model = transform_model(build_scale(model, interval))
    n = config.n_steps
    strides = [config.stride(e) for e in config.epsilons]
    for e, s in zip(config.epsilons, strides):
        if s % 4 != 0:
            raise ConfigError(
                f"epsilon {e}: eps/delta must be divisible by 4 for the "
                "rescaled time 1/4 marginal")

    sup = np.empty(config.n_paths)
    amax = np.empty(config.n_paths, dtype=np.int64)
    marg = {(e, t): np.full(config.n_paths, np.nan)
            for e in config.epsilons for t in ("pre_q", "pre_1", "post_q", "post_1")}
    streams = range(stream_base, stream_base + config.n_paths)
    if model.constant_coefficients:
        # storing the whole value matrix is cheap relative to the fast
        # cumulative-sum stepping, so work in full-storage batches
        batch = max(1, min(config.n_paths, _FULL_VALUE_BUDGET // (n + 1)))
        for lo in range(0, config.n_paths, batch):
            hi = min(lo + batch, config.n_paths)
            res = simulate_ensemble(model, config.horizon, n, config.master_seed,
                                    range(stream_base + lo, stream_base + hi),
                                    store_full=True, threads=config.threads)
            sup[lo:hi] = res.sup
            amax[lo:hi] = res.argmax_index
            rows = np.arange(hi - lo)
            for e, s in zip(config.epsilons, strides):
                ok = (res.argmax_index >= s) & (res.argmax_index <= n - s)
                r = rows[ok]
                a = res.argmax_index[ok]
                scale = e ** -0.5
                marg[(e, "post_1")][lo:hi][ok] = scale * (
                    res.full[r, a + s] - res.sup[ok])
                marg[(e, "pre_1")][lo:hi][ok] = scale * (
                    res.full[r, a - s] - res.sup[ok])
                marg[(e, "post_q")][lo:hi][ok] = scale * (
                    res.full[r, a + s // 4] - res.sup[ok])
                marg[(e, "pre_q")][lo:hi][ok] = scale * (
                    res.full[r, a - s // 4] - res.sup[ok])
    else:
        # state-dependent coefficients step slowly: find each argmax with
        # a reducer-only pass, then re-run the identical streams probing
        # only the four needed indices per path (a width-1 subgrid each)
        res = simulate_ensemble(model, config.horizon, n, config.master_seed,
                                streams, threads=config.threads)
        sup[:] = res.sup
        amax[:] = res.argmax_index
        probes = []
        for e, s in zip(config.epsilons, strides):
            for t, d in (("post_1", s), ("pre_1", -s),
                         ("post_q", s // 4), ("pre_q", -s // 4)):
                idx = np.clip(amax + d, 0, n)
                probes.append(((e, t), SubgridSpec(stride=n + 1, offsets=idx)))
        res2 = simulate_ensemble(model, config.horizon, n, config.master_seed,
                                 streams, threads=config.threads,
                                 subgrids=tuple(spec for _, spec in probes))
        for ((e, t), _), vals in zip(probes, res2.subgrid_values):
            s = config.stride(e)
            ok = (amax >= s) & (amax <= n - s)
            marg[(e, t)][ok] = e ** -0.5 * (vals[ok, 0] - sup[ok])

    sig = _sigma_at(model, sup)
    b1 = bessel3_law(1.0)
    bq = bessel3_law(0.25)
    report = ExperimentReport("zoom_at_supremum", config.echo())
    report.counts = {"n_paths": config.n_paths, "excluded": {}}
    for e, s in zip(config.epsilons, strides):
        ok = ~np.isnan(marg[(e, "post_1")])
        excluded = int(config.n_paths - ok.sum())
        report.counts["excluded"][f"{e:g}"] = excluded
        if excluded > config.max_excluded_fraction * config.n_paths:
            raise ConfigError(
                f"epsilon {e}: {excluded}/{config.n_paths} paths have their "
                "zoom window crossing the time boundary; use a smaller epsilon")
        norm = {t: -marg[(e, t)][ok] / sig[ok]
                for t in ("pre_q", "pre_1", "post_q", "post_1")}
        ks = {t: ks_one_sample(EmpiricalDistribution.from_samples(norm[t]),
                               b1 if t.endswith("1") else bq)
              for t in norm}
        mix_sup = mixing_diagnostic(norm["post_1"], sup[ok], config.n_slices)
        mix_sides = mixing_diagnostic(norm["post_1"], norm["pre_1"],
                                      config.n_slices)
        report.per_epsilon.append({
            "epsilon": e,
            "excluded": excluded,
            "ks_post_t1_vs_bessel3": ks["post_1"].summary(),
            "ks_pre_t1_vs_bessel3": ks["pre_1"].summary(),
            "ks_post_tq_vs_bessel3": ks["post_q"].summary(),
            "ks_pre_tq_vs_bessel3": ks["pre_q"].summary(),
            "mixing_vs_sup": mix_sup.summary(),
            "mixing_post_vs_pre": mix_sides.summary(),
        })
        for t, label in (("post_1", "post marginal at rescaled time 1"),
                         ("pre_1", "pre marginal at rescaled time 1")):
            report.checks.append(CriterionCheck(
                id=f"zoom_sup.{t}_bessel3[eps={e:g}]",
                description=f"{label} close to the Bessel-3 law",
                value=ks[t].statistic, threshold=config.ks_threshold,
                comparator="<",
                passed=ks[t].statistic < config.ks_threshold))
        report.checks.append(CriterionCheck(
            id=f"zoom_sup.mixing_sup[eps={e:g}]",
            description="normalized post marginal independent of the supremum",
            value=mix_sup.max_statistic, threshold=None,
            comparator=f"no rejection at alpha={config.alpha}",
            passed=not mix_sup.reject_at[config.alpha]))
        report.checks.append(CriterionCheck(
            id=f"zoom_sup.mixing_sides[eps={e:g}]",
            description="post marginal independent of the pre marginal",
            value=mix_sides.max_statistic, threshold=None,
            comparator=f"no rejection at alpha={config.alpha}",
            passed=not mix_sides.reject_at[config.alpha]))
        for t in norm:
            report.samples[f"{t}_normalized[eps={e:g}]"] = norm[t]
    report.samples["sup_value"] = sup
    report.samples["argmax_time"] = amax * config.delta
    return _timed(report, t0, config.n_paths)


# ---------------------------------------------------------------------------
# supremum estimation from equidistant samples


def estimate_from_path(path, epsilon: float, offset_index: int) -> dict:
    """Grid estimator of the supremum for a single path, step by step.

    Reference (scalar) implementation of what :func:`run_sup_estimation`
    computes in bulk: sample the path at fine-grid indices
    ``offset_index, offset_index + s, ...`` with ``s = epsilon/step``,
    take the sample maximum, and record the scaled error together with
    the scaled lower-bound term (the value at the first sample time at or
    after the argmax). Returns a dict with keys ``sup``, ``argmax_time``,
    ``m_est``, ``scaled_error``, ``scaled_lower_bound`` (nan when no
    sample time at or after the argmax exists).
    """
    from .pathops import supremum
    from .simulate import restrict_to_subgrid

    s = epsilon / path.step
    si = int(round(s))
    if si < 1 or abs(s - si) > 1e-6 * max(1.0, s):
        raise ConfigError(
            f"epsilon {epsilon} is not an integer multiple of the path step")
    if not 0 <= offset_index < si:
        raise ConfigError("offset_index must lie in [0, epsilon/step)")
    rec = supremum(path)
    sub = restrict_to_subgrid(path, si, offset_index)
    m_est = float(np.max(sub.values))
    scaled_error = (m_est - rec.sup_value) / np.sqrt(epsilon)
    j = max(-((offset_index - rec.argmax_index) // si), 0)  # ceil division
    if offset_index + j * si < len(path.values):
        x_first = float(path.values[offset_index + j * si])
        scaled_lb = (x_first - rec.sup_value) / np.sqrt(epsilon)
    else:
        scaled_lb = float("nan")
    return {
        "sup": rec.sup_value,
        "argmax_time": rec.argmax_time,
        "m_est": m_est,
        "scaled_error": scaled_error,
        "scaled_lower_bound": scaled_lb,
    }


def run_sup_estimation(config: ExperimentConfig,
                       model: DiffusionModel | None = None) -> ExperimentReport:
    """High-frequency estimation of the supremum on shifted grids.

    For each epsilon and path, a uniform grid offset U (discrete uniform
    on the eps/delta fine-grid offsets) defines the sample times; the
    estimator is the sample maximum. Because the sample grid is nested in
    the fine grid, the sandwich

        0 >= eps**-0.5 (M - sup) >= eps**-0.5 (X(first sample after m) - sup)

    holds exactly, path by path. The scaled lower bound is compared to
    the Bessel-at-uniform-time law, the full scaled error to the
    truncated shifted-grid limit (a conjecture, labeled as such), the
    rms error to the sqrt(eps) rate, and the deterministic-grid
    fractional offsets to the uniform law.
    """
    t0 = time.perf_counter()
    config.validate()
    model = model or config.make_model()
    n = config.n_steps
    strides = [config.stride(e) for e in config.epsilons]

    specs = []
    for k, (e, s) in enumerate(zip(config.epsilons, strides)):
        rng = SeedPlan(config.master_seed,
                       aux_stream_index(_CH_SAMPLE_OFFSETS, k)).generator()
        specs.append(SubgridSpec(stride=s,
                                 offsets=rng.integers(0, s, config.n_paths)))

    res = simulate_ensemble(model, config.horizon, n, config.master_seed,
                            range(config.n_paths), subgrids=tuple(specs),
                            threads=config.threads)
    sup = res.sup
    amax = res.argmax_index
    sig = _sigma_at(model, sup)

    bU = besselU_law()
    uniform_cdf_law = ReferenceLaw(
        name="uniform", cdf=lambda x: np.clip(np.asarray(x, float), 0.0, 1.0),
        sampler=lambda m, seeds: seeds.generator().random(m),
        support=(0.0, 1.0))
    conjecture = None

    report = ExperimentReport("sup_estimation", config.echo())
    report.counts = {"n_paths": config.n_paths, "sandwich_violations": 0,
                     "lower_bound_excluded": {}}
    rms_points = []
    smallest = min(config.epsilons)
    for k, (e, s) in enumerate(zip(config.epsilons, strides)):
        spec = specs[k]
        sub = res.subgrid_values[k]
        off = spec.offsets.astype(np.int64)
        m_est = np.nanmax(sub, axis=1)
        err = m_est - sup
        scaled_err = err / np.sqrt(e)

        n_cols = n // s + 1
        valid_count = np.where(off == 0, n_cols, n_cols - 1)
        s_col = np.maximum(-((off - amax) // s), 0)
        included = s_col < valid_count
        x_first = np.full(config.n_paths, np.nan)
        x_first[included] = sub[np.flatnonzero(included), s_col[included]]
        lb = (x_first - sup) / np.sqrt(e)

        violations = int(np.sum(err > 0))
        violations += int(np.sum(x_first[included] > m_est[included]))
        report.counts["sandwich_violations"] += violations
        excluded = int(np.sum(~included))
        report.counts["lower_bound_excluded"][f"{e:g}"] = excluded

        lb_pos = -lb[included] / sig[included]
        ks_lb = ks_one_sample(EmpiricalDistribution.from_samples(lb_pos), bU)
        frac = ((-amax) % s) / s
        ks_unif = ks_one_sample(EmpiricalDistribution.from_samples(frac),
                                uniform_cdf_law)
        rms = float(np.sqrt(np.mean(err ** 2)))
        rms_points.append((e, rms))

        entry = {
            "epsilon": e,
            "rms_error": rms,
            "sandwich_violations": violations,
            "lower_bound_excluded": excluded,
            "ks_lower_bound_vs_besselU": ks_lb.summary(),
            "ks_fractional_offset_vs_uniform": ks_unif.summary(),
        }
        report.checks.append(CriterionCheck(
            id=f"estimate.sandwich[eps={e:g}]",
            description="sandwich inequality holds for every path",
            value=float(violations), threshold=0.0, comparator="==",
            passed=violations == 0))
        report.checks.append(CriterionCheck(
            id=f"estimate.uniform_offset[eps={e:g}]",
            description="deterministic-grid fractional offsets look uniform",
            value=ks_unif.statistic, threshold=config.uniform_ks_threshold,
            comparator="<",
            passed=ks_unif.statistic < config.uniform_ks_threshold))
        if e == smallest:
            report.checks.append(CriterionCheck(
                id=f"estimate.lower_bound_law[eps={e:g}]",
                description="scaled lower bound close to the Bessel-at-"
                            "uniform-time law",
                value=ks_lb.statistic, threshold=config.ks_threshold,
                comparator="<",
                passed=ks_lb.statistic < config.ks_threshold))
            if conjecture is None:
                conjecture = limit_sup_over_shifted_grid(
                    1.0, config.truncation_k,
                    SeedPlan(config.master_seed,
                             aux_stream_index(_CH_CONJECTURE)),
                    config.conjecture_samples)
            err_n = scaled_err / sig
            ks_conj = ks_two_sample(
                EmpiricalDistribution.from_samples(err_n),
                EmpiricalDistribution.from_samples(conjecture))
            entry["ks_full_error_vs_conjectured_limit"] = ks_conj.summary()
            report.checks.append(CriterionCheck(
                id=f"estimate.conjectured_limit[eps={e:g}]",
                description="full scaled error agrees with the truncated "
                            "shifted-grid limit (conjecture, not a proved "
                            "limit; reported as agreement only)",
                value=ks_conj.statistic,
                threshold=config.conjecture_ks_threshold,
                comparator="<",
                passed=ks_conj.statistic < config.conjecture_ks_threshold))
            report.samples["scaled_error_normalized"] = err_n
            report.samples["conjecture_reference"] = conjecture
        report.per_epsilon.append(entry)
        report.samples[f"scaled_error[eps={e:g}]"] = scaled_err
        report.samples[f"scaled_lower_bound[eps={e:g}]"] = lb[included]
        report.samples[f"fractional_offset[eps={e:g}]"] = frac

    if len(rms_points) >= 4:
        fit = rate_fit(rms_points)
        report.per_epsilon.append({"rate_fit": fit.summary()})
        report.checks.append(CriterionCheck(
            id="estimate.rate",
            description="log-log slope of rms error vs epsilon near 1/2",
            value=fit.slope, threshold=None,
            comparator="in [0.45, 0.55]",
            passed=0.45 <= fit.slope <= 0.55))
    return _timed(report, t0, config.n_paths)


# ---------------------------------------------------------------------------
# CSV output


def write_samples_csv(report: ExperimentReport, path):
    """Per-path sample dump: columns (path_id, epsilon, statistic_name, value).

    The header row carries the schema version for external plotting
    stability.
    """
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow([f"schema_v{CSV_SCHEMA_VERSION}", "path_id", "epsilon",
                    "statistic_name", "value"])
        for name, arr in report.samples.items():
            if "[eps=" in name:
                stat, eps = name.split("[eps=")
                eps = eps.rstrip("]")
            else:
                stat, eps = name, ""
            for i, v in enumerate(np.asarray(arr).ravel()):
                w.writerow(["", i, eps, stat, repr(float(v))])
