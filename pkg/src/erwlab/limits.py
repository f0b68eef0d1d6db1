"""Sampling and covariance kernels of the limiting Gaussian processes.

Every limit here is ``multiplier(t) * W(clock(t))`` for a standard
Brownian motion W:

    kind                clock(t)              multiplier(t)
    diffusive           t^{3-4p}              t^{2p-1} / sqrt(3-4p)
    superdiffusive      1 - (1+t)^{3-4p}      1 / sqrt(4p-3)
    critical            t                     1
    diffusive_shifted   (1+t)^{3-4p} - 1      1 / sqrt(3-4p)
    critical_shifted    (1 v t) - 1           1

The covariance kernels below were derived by hand from
Cov(W(a), W(b)) = min(a, b) before the sampler was written; the sampler
cross-validates them by Monte Carlo (see tests), so an algebra slip on
either side is caught by the other.

Sampling is by independent Gaussian increments along the clock, with
Box-Muller normals on the same counter-based streams as the walk
(stream id separates them), so limit samples are reproducible by
``(seed, path_index)`` as well.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import rng
from .scaling import ScaledGrid, _check_grid

KINDS = ("diffusive", "superdiffusive", "critical", "diffusive_shifted", "critical_shifted")


@dataclass(frozen=True)
class LimitSpec:
    kind: str
    p: float = 0.75  # ignored by the critical kinds

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown limit kind {self.kind!r}")
        if self.kind in ("diffusive", "diffusive_shifted") and not 0.0 <= self.p < 0.75:
            raise ValueError(f"{self.kind} limit needs 0 <= p < 3/4")
        if self.kind == "superdiffusive" and not 0.75 < self.p < 1.0:
            raise ValueError("superdiffusive limit needs 3/4 < p < 1")


def time_change(spec: LimitSpec, t):
    """The inner clock of the limit process at time t (scalar or array)."""
    t = np.asarray(t, dtype=np.float64)
    if np.any(t < 0.0):
        raise ValueError("t must be >= 0")
    e = 3.0 - 4.0 * spec.p
    if spec.kind == "diffusive":
        out = t**e
    elif spec.kind == "superdiffusive":
        out = 1.0 - (1.0 + t) ** e
    elif spec.kind == "critical":
        out = t.copy()
    elif spec.kind == "diffusive_shifted":
        out = (1.0 + t) ** e - 1.0
    else:  # critical_shifted
        out = np.maximum(1.0, t) - 1.0
    return float(out) if out.ndim == 0 else out


def _multiplier(spec: LimitSpec, t: float) -> float:
    if spec.kind == "diffusive":
        return t ** (2.0 * spec.p - 1.0) / math.sqrt(3.0 - 4.0 * spec.p)
    if spec.kind == "superdiffusive":
        return 1.0 / math.sqrt(4.0 * spec.p - 3.0)
    if spec.kind == "diffusive_shifted":
        return 1.0 / math.sqrt(3.0 - 4.0 * spec.p)
    return 1.0


def kernel(spec: LimitSpec, s: float, t: float) -> float:
    """Covariance of the limit process at times (s, t)."""
    if s < 0.0 or t < 0.0:
        raise ValueError("s, t must be >= 0")
    lo = min(s, t)
    p, e = spec.p, 3.0 - 4.0 * spec.p
    if spec.kind == "diffusive":
        if lo == 0.0:
            return 0.0
        return lo ** (2.0 - 2.0 * p) * max(s, t) ** (2.0 * p - 1.0) / e
    if spec.kind == "superdiffusive":
        return (1.0 - (1.0 + lo) ** e) / (4.0 * p - 3.0)
    if spec.kind == "critical":
        return lo
    if spec.kind == "diffusive_shifted":
        return ((1.0 + lo) ** e - 1.0) / e
    return max(1.0, lo) - 1.0


def cross_kernel_joint1(p: float, s: float, t: float) -> float:
    """Covariance between the two diffusive joint components at (s, t),
    reading both components off one shared Brownian motion:
    s^{2p-1} min(s^{3-4p}, (1+t)^{3-4p} - 1) / (3-4p)."""
    if not 0.0 <= p < 0.75:
        raise ValueError("needed: 0 <= p < 3/4")
    if s < 0.0 or t < 0.0:
        raise ValueError("s, t must be >= 0")
    if s == 0.0:
        return 0.0
    e = 3.0 - 4.0 * p
    return s ** (2.0 * p - 1.0) * min(s**e, (1.0 + t) ** e - 1.0) / e


def _normals(keys: np.ndarray, counter_pair: int) -> np.ndarray:
    """One standard normal per key via Box-Muller on counters (2j, 2j+1)."""
    u1 = rng.uniforms(keys, 2 * counter_pair)
    u2 = rng.uniforms(keys, 2 * counter_pair + 1)
    u1 = u1 + 2.0**-53  # move to (0, 1] so the log is finite
    return np.sqrt(-2.0 * np.log(u1)) * np.cos(2.0 * math.pi * u2)


def _brownian_on(clocks: np.ndarray, keys: np.ndarray) -> np.ndarray:
    """W at the given nondecreasing clock times, per path (keys)."""
    if np.any(np.diff(clocks) < -1e-15):
        raise AssertionError("clock must be nondecreasing along the grid")
    w = np.zeros((keys.size, clocks.size))
    prev = 0.0
    acc = np.zeros(keys.size)
    for j, c in enumerate(clocks):
        dphi = c - prev
        if dphi > 0.0:
            acc = acc + math.sqrt(dphi) * _normals(keys, j)
        prev = c
        w[:, j] = acc
    return w


def sample_limit(spec: LimitSpec, grid, n_paths: int, seed: int,
                 start_index: int = 0) -> ScaledGrid:
    """Sample the limit process on the grid by Gaussian clock increments."""
    grid = _check_grid(grid)
    if n_paths < 1:
        raise ValueError("n_paths must be >= 1")
    clocks = np.asarray(time_change(spec, grid), dtype=np.float64).reshape(-1)
    keys = rng.path_keys(seed, start_index, n_paths, stream=rng.STREAM_LIMIT)
    w = _brownian_on(clocks, keys)
    values = np.empty_like(w)
    for j, t in enumerate(grid):
        values[:, j] = 0.0 if t == 0.0 else _multiplier(spec, float(t)) * w[:, j]
    return ScaledGrid(f"limit_{spec.kind}", 0, grid, values)


def sample_joint_diffusive(p: float, grid, n_paths: int, seed: int) -> tuple[ScaledGrid, ScaledGrid]:
    """Joint sample of the two diffusive components from ONE shared W.

    Component one is t^{2p-1} W(t^{3-4p}) / sqrt(3-4p), component two is
    W((1+t)^{3-4p} - 1) / sqrt(3-4p), with the same W; this is the
    coupling under which ``cross_kernel_joint1`` is the cross-covariance.
    """
    grid = _check_grid(grid)
    spec1 = LimitSpec("diffusive", p)
    spec2 = LimitSpec("diffusive_shifted", p)
    c1 = np.asarray(time_change(spec1, grid)).reshape(-1)
    c2 = np.asarray(time_change(spec2, grid)).reshape(-1)
    merged = np.unique(np.concatenate([c1, c2]))
    keys = rng.path_keys(seed, 0, n_paths, stream=rng.STREAM_JOINT)
    w = _brownian_on(merged, keys)
    col = {float(c): j for j, c in enumerate(merged)}
    v1 = np.empty((n_paths, grid.size))
    v2 = np.empty((n_paths, grid.size))
    for j, t in enumerate(grid):
        v1[:, j] = 0.0 if t == 0.0 else _multiplier(spec1, float(t)) * w[:, col[float(c1[j])]]
        v2[:, j] = _multiplier(spec2, float(t)) * w[:, col[float(c2[j])]]
    return (ScaledGrid("limit_joint_first", 0, grid, v1),
            ScaledGrid("limit_joint_second", 0, grid, v2))
