"""Empirical distributions and the tests that tie simulation to theory.

Kolmogorov-Smirnov statistics are computed from scratch (the acceptance
tolerances bake in the asymptotic Kolmogorov quantiles; no p-value
machinery).  The normal CDF is evaluated through the C library's erf,
which is far inside the 1e-7 absolute-error contract.

Every check emits a ``TestReport`` so that harnesses only ever consume
reports, never ad-hoc tuples.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Mapping

import numpy as np
from scipy.special import ndtr


@dataclass
class EmpiricalDist:
    """Sorted sample array."""

    samples: np.ndarray

    @classmethod
    def from_samples(cls, x) -> "EmpiricalDist":
        x = np.sort(np.asarray(x, dtype=np.float64))
        if x.size == 0:
            raise ValueError("need at least one sample")
        if not np.all(np.isfinite(x)):
            raise ValueError("samples must be finite")
        return cls(samples=x)

    @property
    def n(self) -> int:
        return self.samples.size


@dataclass
class TestReport:
    name: str
    observed: float
    target: float
    tolerance: float
    passed: bool
    n_samples: int
    metadata: dict[str, str] = field(default_factory=dict)

    def to_json_dict(self) -> dict:
        return {
            "name": self.name,
            "observed": self.observed,
            "target": self.target,
            "tolerance": self.tolerance,
            "pass": self.passed,
            "n_samples": self.n_samples,
            "metadata": dict(sorted(self.metadata.items())),
        }


def report_two_sided(name: str, observed: float, target: float, tolerance: float,
                     n_samples: int, **metadata: str) -> TestReport:
    """pass iff |observed - target| <= tolerance."""
    return TestReport(name, float(observed), float(target), float(tolerance),
                      bool(abs(observed - target) <= tolerance), int(n_samples),
                      {str(k): str(v) for k, v in metadata.items()})


def report_bound(name: str, observed: float, bound: float, n_samples: int,
                 **metadata: str) -> TestReport:
    """One-sided: pass iff observed <= bound (target holds the bound)."""
    md = {str(k): str(v) for k, v in metadata.items()}
    md["one_sided"] = "true"
    return TestReport(name, float(observed), float(bound), 0.0,
                      bool(observed <= bound), int(n_samples), md)


def normal_cdf(x, sigma2: float, mean: float = 0.0):
    """Phi((x - mean) / sqrt(sigma2)); scalar or array."""
    if not sigma2 > 0.0:
        raise ValueError("sigma2 must be positive")
    out = ndtr((np.asarray(x, dtype=np.float64) - mean) / math.sqrt(sigma2))
    return float(out) if out.ndim == 0 else out


def ks_vs_normal(dist: EmpiricalDist, sigma2: float, mean: float = 0.0) -> float:
    """sup_x |F_hat - Phi|, evaluated at both sides of every sample point."""
    n = dist.n
    cdf = normal_cdf(dist.samples, sigma2, mean)
    i = np.arange(1, n + 1)
    d_hi = np.max(i / n - cdf)
    d_lo = np.max(cdf - (i - 1) / n)
    return float(max(d_hi, d_lo))


def ks_two_sample(a: EmpiricalDist, b: EmpiricalDist) -> float:
    """Two-sample Kolmogorov-Smirnov statistic."""
    both = np.concatenate([a.samples, b.samples])
    fa = np.searchsorted(a.samples, both, side="right") / a.n
    fb = np.searchsorted(b.samples, both, side="right") / b.n
    return float(np.max(np.abs(fa - fb)))


def moments(dist: EmpiricalDist) -> tuple[float, float, float]:
    """(mean, unbiased variance, fourth central moment)."""
    x = dist.samples
    m = float(np.mean(x))
    if dist.n < 2:
        raise ValueError("variance needs n >= 2")
    var = float(np.var(x, ddof=1))
    fourth = float(np.mean((x - m) ** 4))
    return m, var, fourth


def covariance(xs, ys) -> float:
    """Unbiased sample covariance."""
    xs = np.asarray(xs, dtype=np.float64)
    ys = np.asarray(ys, dtype=np.float64)
    if xs.shape != ys.shape or xs.size < 2:
        raise ValueError("need two equal-length arrays with n >= 2")
    return float(np.sum((xs - xs.mean()) * (ys - ys.mean())) / (xs.size - 1))


def correlation(xs, ys) -> float:
    """Pearson correlation; raises on zero-variance input."""
    xs = np.asarray(xs, dtype=np.float64)
    ys = np.asarray(ys, dtype=np.float64)
    sx = float(np.std(xs))
    sy = float(np.std(ys))
    if sx == 0.0 or sy == 0.0:
        raise ValueError("correlation undefined for zero-variance input")
    return float(np.mean((xs - xs.mean()) * (ys - ys.mean())) / (sx * sy))


def tv_distance(pmf_a: Mapping[int, float], pmf_b: Mapping[int, float]) -> float:
    """Half the L1 distance between two pmfs on a common lattice."""
    keys = set(pmf_a) | set(pmf_b)
    return 0.5 * math.fsum(abs(pmf_a.get(k, 0.0) - pmf_b.get(k, 0.0)) for k in keys)


def empirical_pmf(samples) -> dict[int, float]:
    """Lattice pmf of integer-valued samples."""
    samples = np.asarray(samples)
    vals, counts = np.unique(samples, return_counts=True)
    n = samples.size
    return {int(v): c / n for v, c in zip(vals, counts)}


def _quadrant_chi2(xs: np.ndarray, ys: np.ndarray) -> float:
    """2x2 sign-quadrant chi-square against independence of signs."""
    px = xs > 0.0
    py = ys > 0.0
    n = xs.size
    chi2 = 0.0
    for bx in (True, False):
        for by in (True, False):
            obs = np.count_nonzero((px == bx) & (py == by))
            exp = np.count_nonzero(px == bx) * np.count_nonzero(py == by) / n
            if exp > 0.0:
                chi2 += (obs - exp) ** 2 / exp
    return chi2


def distance_correlation(xs, ys, max_n: int = 2000) -> float:
    """Distance correlation (biased V-statistic) on at most ``max_n`` pairs.

    O(n^2) memory, so long inputs are truncated deterministically to the
    first ``max_n`` entries.  Diagnostic only; never part of acceptance.
    """
    xs = np.asarray(xs, dtype=np.float64)[:max_n]
    ys = np.asarray(ys, dtype=np.float64)[:max_n]
    if xs.shape != ys.shape or xs.size < 2:
        raise ValueError("need two equal-length arrays with n >= 2")

    def centered(v):
        d = np.abs(v[:, None] - v[None, :])
        return d - d.mean(axis=0) - d.mean(axis=1)[:, None] + d.mean()

    a, b = centered(xs), centered(ys)
    dcov2 = float(np.mean(a * b))
    dvar = float(np.mean(a * a)) * float(np.mean(b * b))
    if dvar <= 0.0:
        raise ValueError("distance correlation undefined for constant input")
    return math.sqrt(max(dcov2, 0.0)) / dvar**0.25


def stable_independence_check(fluct, l_hat, name: str = "stable_independence",
                              slack: float = 0.01,
                              with_distance_corr: bool = False) -> TestReport:
    """Vanishing-correlation check between the fluctuation field and the
    almost-sure limit of S_n / n^{2p-1}, paired per path.

    The limit theorem implies asymptotic independence; at these sample
    sizes the assertable consequence is |Pearson corr| below the normal
    99% band 2.58/sqrt(N) plus a finite-n slack.  A 2x2 sign-quadrant
    chi-square rides along in the metadata as secondary evidence, and a
    distance correlation can be requested on top (metadata only).
    """
    fluct = np.asarray(fluct, dtype=np.float64)
    l_hat = np.asarray(l_hat, dtype=np.float64)
    if fluct.shape != l_hat.shape:
        raise ValueError("paired samples must have equal length")
    n = fluct.size
    corr = correlation(fluct, l_hat)
    bound = 2.58 / math.sqrt(n) + slack
    rep = report_bound(name, abs(corr), bound, n,
                       corr=f"{corr:.6g}",
                       quadrant_chi2=f"{_quadrant_chi2(fluct, l_hat):.6g}")
    if with_distance_corr:
        rep.metadata["distance_corr"] = f"{distance_correlation(fluct, l_hat):.6g}"
    return rep
