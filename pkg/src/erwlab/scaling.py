"""Scaled views of raw trajectories on a time grid.

Each transform turns a batch of walks into the process whose
distributional limit is a (time-changed) Brownian motion:

    diffusive           S_[nt] / sqrt(n)                      0 <= p < 3/4
    superdiffusive      ((1+t)^{1-2p} S_{n+[nt]} - S_n) / sqrt(n)   3/4 < p < 1
    critical            S_[n^t] / sqrt(n^t log n)             p = 3/4
    diffusive_shifted   same formula as superdiffusive        0 <= p < 3/4
    critical_shifted    (sqrt(n/(n+[n^t])) S_{n+[n^t]} - S_n) / sqrt(n log n)
                                                              p = 3/4

log is natural throughout.  The transforms are pure functions of the
recorded positions; a batch only needs the time indices returned by
``required_times`` to have been recorded.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .coeff import floor_power
from .walk import PathBatch

REGIMES = ("diffusive", "superdiffusive", "critical", "diffusive_shifted", "critical_shifted")

CRITICAL_P = 0.75


class RegimeError(ValueError):
    """Parameters outside the regime a transform is valid for."""


class HorizonError(ValueError):
    """Batch horizon too short for the requested grid."""


@dataclass
class ScaledGrid:
    regime: str
    n: int
    grid: np.ndarray
    values: np.ndarray  # (n_paths, grid.size)

    @property
    def n_paths(self) -> int:
        return self.values.shape[0]

    def at(self, t: float) -> np.ndarray:
        """Column of values at grid point t."""
        j = np.nonzero(np.isclose(self.grid, t, rtol=0.0, atol=1e-12))[0]
        if j.size != 1:
            raise KeyError(f"t={t} is not a grid point")
        return self.values[:, j[0]]

    def write_csv(self, path) -> None:
        """One row per (path, t): columns path_id, t, value."""
        with open(path, "w") as fh:
            fh.write("path_id,t,value\n")
            for i in range(self.values.shape[0]):
                for j, t in enumerate(self.grid):
                    fh.write(f"{i},{float(t)!r},{float(self.values[i, j])!r}\n")


def default_grid() -> np.ndarray:
    return np.linspace(0.0, 2.0, 21)


def _check_grid(grid) -> np.ndarray:
    grid = np.asarray(grid, dtype=np.float64)
    if grid.ndim != 1 or grid.size == 0:
        raise ValueError("grid must be a nonempty 1-d array")
    if np.any(grid < 0.0):
        raise ValueError("grid times must be >= 0")
    if np.any(np.diff(grid) <= 0.0):
        raise ValueError("grid must be strictly increasing")
    return grid


def _gate(regime: str, p: float) -> None:
    ok = {
        "diffusive": 0.0 <= p < 0.75,
        "diffusive_shifted": 0.0 <= p < 0.75,
        "superdiffusive": 0.75 < p < 1.0,
        "critical": p == CRITICAL_P,
        "critical_shifted": p == CRITICAL_P,
    }[regime]
    if not ok:
        raise RegimeError(f"regime {regime!r} does not admit p={p}")


def required_times(regime: str, n: int, grid) -> np.ndarray:
    """Sorted time indices a batch must record for this transform."""
    grid = _check_grid(grid)
    if regime == "diffusive":
        ks = [int(n * t) for t in grid]
    elif regime in ("superdiffusive", "diffusive_shifted"):
        ks = [n] + [n + int(n * t) for t in grid]
    elif regime == "critical":
        ks = [floor_power(n, t) for t in grid]
    elif regime == "critical_shifted":
        ks = [n] + [n + floor_power(n, t) for t in grid]
    else:
        raise ValueError(f"unknown regime {regime!r}")
    return np.unique(np.asarray(ks, dtype=np.int64))


def _columns(batch: PathBatch, regime: str, n: int, grid: np.ndarray):
    """(columns, time->column index) for the times this transform needs."""
    needed = required_times(regime, n, grid)
    if needed[-1] > batch.params.horizon:
        raise HorizonError(
            f"horizon {batch.params.horizon} < required {int(needed[-1])} for {regime}"
        )
    return [batch.position_at(int(k)) for k in needed], {int(k): i for i, k in enumerate(needed)}


def scale_diffusive(batch: PathBatch, n: int, grid) -> ScaledGrid:
    grid = _check_grid(grid)
    _gate("diffusive", batch.params.p)
    cols, where = _columns(batch, "diffusive", n, grid)
    root_n = math.sqrt(n)
    values = np.empty((batch.n_paths, grid.size))
    for j, t in enumerate(grid):
        values[:, j] = cols[where[int(n * t)]] / root_n
    return ScaledGrid("diffusive", n, grid, values)


def _scale_shifted_power(batch: PathBatch, regime: str, n: int, grid: np.ndarray) -> ScaledGrid:
    p = batch.params.p
    cols, where = _columns(batch, regime, n, grid)
    s_n = cols[where[n]].astype(np.float64)
    root_n = math.sqrt(n)
    values = np.empty((batch.n_paths, grid.size))
    for j, t in enumerate(grid):
        coef = (1.0 + t) ** (1.0 - 2.0 * p)
        values[:, j] = (coef * cols[where[n + int(n * t)]] - s_n) / root_n
    return ScaledGrid(regime, n, grid, values)


def scale_superdiffusive(batch: PathBatch, n: int, grid) -> ScaledGrid:
    grid = _check_grid(grid)
    _gate("superdiffusive", batch.params.p)
    return _scale_shifted_power(batch, "superdiffusive", n, grid)


def scale_diffusive_shifted(batch: PathBatch, n: int, grid) -> ScaledGrid:
    """Same formula as the superdiffusive transform, gated to p < 3/4."""
    grid = _check_grid(grid)
    _gate("diffusive_shifted", batch.params.p)
    return _scale_shifted_power(batch, "diffusive_shifted", n, grid)


def scale_critical(batch: PathBatch, n: int, grid) -> ScaledGrid:
    grid = _check_grid(grid)
    _gate("critical", batch.params.p)
    cols, where = _columns(batch, "critical", n, grid)
    log_n = math.log(n)
    values = np.empty((batch.n_paths, grid.size))
    for j, t in enumerate(grid):
        values[:, j] = cols[where[floor_power(n, t)]] / math.sqrt(float(n) ** t * log_n)
    return ScaledGrid("critical", n, grid, values)


def scale_critical_shifted(batch: PathBatch, n: int, grid) -> ScaledGrid:
    grid = _check_grid(grid)
    _gate("critical_shifted", batch.params.p)
    cols, where = _columns(batch, "critical_shifted", n, grid)
    s_n = cols[where[n]].astype(np.float64)
    denom = math.sqrt(n * math.log(n))
    values = np.empty((batch.n_paths, grid.size))
    for j, t in enumerate(grid):
        m = floor_power(n, t)
        values[:, j] = (math.sqrt(n / (n + m)) * cols[where[n + m]] - s_n) / denom
    return ScaledGrid("critical_shifted", n, grid, values)


SCALERS = {
    "diffusive": scale_diffusive,
    "superdiffusive": scale_superdiffusive,
    "critical": scale_critical,
    "diffusive_shifted": scale_diffusive_shifted,
    "critical_shifted": scale_critical_shifted,
}
