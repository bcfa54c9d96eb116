"""Empirical distributions, Kolmogorov-Smirnov machinery, a quantile-slice
independence diagnostic, and log-log rate fitting."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.special import kolmogorov

from .reference import ReferenceLaw

__all__ = [
    "EmpiricalDistribution",
    "KSResult",
    "MixingReport",
    "RateFit",
    "ks_one_sample",
    "ks_two_sample",
    "mixing_diagnostic",
    "rate_fit",
    "ks_critical_value",
    "ALPHA_LEVELS",
]

ALPHA_LEVELS = (0.05, 0.01, 0.001)


@dataclass
class EmpiricalDistribution:
    sorted_samples: np.ndarray
    n: int

    @classmethod
    def from_samples(cls, samples) -> "EmpiricalDistribution":
        s = np.sort(np.asarray(samples, dtype=float))
        if s.size < 1:
            raise ValueError("need at least one sample")
        if not np.all(np.isfinite(s)):
            raise ValueError("samples must be finite")
        return cls(sorted_samples=s, n=s.size)

    def cdf(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        return np.searchsorted(self.sorted_samples, x, side="right") / self.n


@dataclass
class KSResult:
    statistic: float
    n_effective: float
    p_value_bound: float
    reject_at: dict = field(default_factory=dict)

    def summary(self) -> dict:
        return {
            "statistic": self.statistic,
            "n_effective": self.n_effective,
            "p_value_bound": self.p_value_bound,
            "reject_at": {str(a): bool(r) for a, r in self.reject_at.items()},
        }


def ks_critical_value(alpha: float, n_effective: float) -> float:
    """Asymptotic Kolmogorov critical value sqrt(-ln(alpha/2)/2)/sqrt(n)."""
    return np.sqrt(-0.5 * np.log(alpha / 2.0)) / np.sqrt(n_effective)


def _result(stat: float, n_eff: float) -> KSResult:
    p = float(kolmogorov(np.sqrt(n_eff) * stat))
    return KSResult(
        statistic=float(stat),
        n_effective=float(n_eff),
        p_value_bound=p,
        reject_at={a: stat > ks_critical_value(a, n_eff) for a in ALPHA_LEVELS},
    )


def ks_one_sample(emp: EmpiricalDistribution, law: ReferenceLaw) -> KSResult:
    """Sup distance between an empirical cdf and a reference cdf."""
    if emp.n < 10:
        raise ValueError("need at least 10 samples")
    f = np.asarray(law.cdf(emp.sorted_samples), dtype=float)
    k = np.arange(1, emp.n + 1) / emp.n
    d_plus = np.max(k - f)
    d_minus = np.max(f - (k - 1.0 / emp.n))
    return _result(max(d_plus, d_minus), emp.n)


def ks_two_sample(a: EmpiricalDistribution, b: EmpiricalDistribution) -> KSResult:
    """Two-sample statistic with effective size n_a n_b / (n_a + n_b)."""
    if a.n < 10 or b.n < 10:
        raise ValueError("need at least 10 samples on each side")
    allv = np.concatenate([a.sorted_samples, b.sorted_samples])
    allv.sort(kind="mergesort")
    fa = a.cdf(allv)
    fb = b.cdf(allv)
    stat = np.max(np.abs(fa - fb))
    n_eff = a.n * b.n / (a.n + b.n)
    return _result(stat, n_eff)


@dataclass
class MixingReport:
    max_statistic: float
    n_slices: int
    slice_sizes: list[int]
    pairwise: list[tuple[int, int, float]]
    reject_at: dict

    def summary(self) -> dict:
        return {
            "max_statistic": self.max_statistic,
            "n_slices": self.n_slices,
            "slice_sizes": self.slice_sizes,
            "reject_at": {str(a): bool(r) for a, r in self.reject_at.items()},
        }


def mixing_diagnostic(values, conditioners, n_slices: int = 4) -> MixingReport:
    """Test independence of ``values`` from ``conditioners``.

    Partitions the pairs into quantile slices of the conditioner and
    compares the slice distributions of the value pairwise by two-sample
    KS. Rejection at level alpha uses a Bonferroni split of alpha across
    the slice pairs, so the decision is conservative.
    """
    v = np.asarray(values, dtype=float)
    c = np.asarray(conditioners, dtype=float)
    if v.shape != c.shape or v.ndim != 1:
        raise ValueError("values and conditioners must be 1-d of equal length")
    if n_slices < 2:
        raise ValueError("need at least 2 slices")
    if v.size < 50 * n_slices:
        raise ValueError("need at least 50 pairs per slice")
    order = np.argsort(c, kind="mergesort")
    groups = np.array_split(v[order], n_slices)
    emps = [EmpiricalDistribution.from_samples(g) for g in groups]
    n_pairs = n_slices * (n_slices - 1) // 2
    pairwise = []
    reject = {a: False for a in ALPHA_LEVELS}
    max_stat = 0.0
    for i in range(n_slices):
        for j in range(i + 1, n_slices):
            r = ks_two_sample(emps[i], emps[j])
            pairwise.append((i, j, r.statistic))
            max_stat = max(max_stat, r.statistic)
            for a in ALPHA_LEVELS:
                if r.statistic > ks_critical_value(a / n_pairs, r.n_effective):
                    reject[a] = True
    return MixingReport(
        max_statistic=max_stat,
        n_slices=n_slices,
        slice_sizes=[e.n for e in emps],
        pairwise=pairwise,
        reject_at=reject,
    )


@dataclass
class RateFit:
    slope: float
    intercept: float
    half_width: float
    n_points: int

    def summary(self) -> dict:
        return {
            "slope": self.slope,
            "intercept": self.intercept,
            "half_width": self.half_width,
            "n_points": self.n_points,
        }


def rate_fit(points) -> RateFit:
    """Least-squares line through (log eps, log rms).

    The half-width is twice the standard error of the slope estimated
    from the fit residuals (roughly a 95% band).
    """
    pts = np.asarray(points, dtype=float)
    if pts.ndim != 2 or pts.shape[1] != 2 or pts.shape[0] < 4:
        raise ValueError("need at least 4 (epsilon, rms) points")
    if np.any(pts <= 0):
        raise ValueError("epsilon and rms values must be positive")
    x = np.log(pts[:, 0])
    y = np.log(pts[:, 1])
    n = len(x)
    xm = x - x.mean()
    sxx = np.dot(xm, xm)
    slope = np.dot(xm, y) / sxx
    intercept = y.mean() - slope * x.mean()
    resid = y - (intercept + slope * x)
    s2 = np.dot(resid, resid) / max(n - 2, 1)
    se = np.sqrt(s2 / sxx)
    return RateFit(slope=float(slope), intercept=float(intercept),
                   half_width=float(2.0 * se), n_points=n)
