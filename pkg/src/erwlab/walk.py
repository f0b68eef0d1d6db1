"""Trajectory generation for the elephant random walk.

The walk starts at S_0 = 0.  The first increment is +1 with probability
``q``; afterwards step n+1 copies a uniformly chosen earlier increment
with probability ``p`` and flips it otherwise.  Two distributionally
equivalent samplers are provided:

* ``simulate_history`` implements that definition directly, keeping the
  increment record so a past step can be resampled.  It exists as an
  oracle for the second sampler and is meant for modest horizons.
* ``simulate_markov`` uses the conditional law of the next increment,
  P(up | past) = 1/2 + (p - 1/2) S_n / n, and needs O(1) memory per
  step.  All large-scale experiments use this mode.

Randomness is counter-based (see ``rng``): path ``i`` of a batch is a
pure function of ``(master_seed, start_index + i)``, so results do not
depend on batch splitting or thread schedule.  In Markov mode increment
k consumes counter k; in history mode increment 1 consumes counter 1
and increment k+1 consumes counters (2k, 2k+1) for the memory index and
the copy/flip decision.  Memory indices are sampled rejection-free by
the Lemire multiply-high method on the full 64-bit draw.

Positions may be recorded either at every step or only at a sparse set
of times (``record=...``); sparse recording is what makes desk-scale
batches (10^5 paths times 10^4 steps) fit in memory.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numba as nb
import numpy as np

from . import rng

_GOLDEN = rng.GOLDEN

MODE_HISTORY = "history"
MODE_MARKOV = "markov"


@dataclass(frozen=True)
class WalkParams:
    p: float
    q: float
    horizon: int
    master_seed: int = 0
    mode: str = MODE_MARKOV

    def __post_init__(self):
        if not 0.0 <= self.p <= 1.0:
            raise ValueError("p must lie in [0, 1]")
        if not 0.0 <= self.q <= 1.0:
            raise ValueError("q must lie in [0, 1]")
        if self.horizon < 1:
            raise ValueError("horizon must be >= 1")
        if not 0 <= self.master_seed <= rng.MASK64:
            raise ValueError("master_seed must fit in 64 bits")
        if self.mode not in (MODE_HISTORY, MODE_MARKOV):
            raise ValueError(f"unknown mode {self.mode!r}")


@dataclass
class PathBatch:
    """Positions of ``n_paths`` independent walks at the recorded times.

    ``positions[i, j]`` is S at time ``times[j]`` of path
    ``start_index + i``.  When every time 0..horizon is recorded the
    batch also gives increment access.
    """

    params: WalkParams
    n_paths: int
    times: np.ndarray
    positions: np.ndarray
    start_index: int = 0
    _time_col: dict = field(default_factory=dict, repr=False)

    def __post_init__(self):
        self._time_col = {int(t): j for j, t in enumerate(self.times)}

    @property
    def is_full(self) -> bool:
        return self.times.size == self.params.horizon + 1

    def position_at(self, k: int) -> np.ndarray:
        """Column S_k across paths; the time must have been recorded."""
        try:
            return self.positions[:, self._time_col[int(k)]]
        except KeyError:
            raise KeyError(f"time {k} was not recorded in this batch") from None

    def increments(self) -> np.ndarray:
        """X_1..X_m per path (requires full recording)."""
        if not self.is_full:
            raise ValueError("increments need a fully recorded batch")
        return np.diff(self.positions, axis=1)

    def validate(self) -> None:
        """Check the structural path invariants; raises on violation."""
        t = self.times.astype(np.int64)
        if np.any(np.abs(self.positions) > t[None, :]):
            raise AssertionError("|S_k| <= k violated")
        if np.any((self.positions - t[None, :]) % 2 != 0):
            raise AssertionError("parity S_k = k (mod 2) violated")
        if self._time_col.get(0) is not None and np.any(self.position_at(0) != 0):
            raise AssertionError("S_0 != 0")
        if self.is_full and np.any(np.abs(np.diff(self.positions, axis=1)) != 1):
            raise AssertionError("non-unit increment")


@nb.njit(nb.void(nb.uint64[:], nb.float64, nb.float64, nb.int64, nb.int64[:], nb.int64[:, :]),
         parallel=True, cache=True)
def _markov_kernel(keys, p, q, horizon, rec_times, out):
    n_rec = rec_times.size
    for i in nb.prange(keys.size):
        key = keys[i]
        j = 0
        while j < n_rec and rec_times[j] == 0:
            out[i, j] = 0
            j += 1
        u = (rng.mix64_nb(key + np.uint64(_GOLDEN)) >> 11) * 2.0**-53
        s = np.int64(1) if u < q else np.int64(-1)
        if j < n_rec and rec_times[j] == 1:
            out[i, j] = s
            j += 1
        for k in range(1, horizon):
            ctr = np.uint64(k + 1) * np.uint64(_GOLDEN)
            u = (rng.mix64_nb(key + ctr) >> 11) * 2.0**-53
            up = 0.5 + (p - 0.5) * (s / k)
            s += np.int64(1) if u < up else np.int64(-1)
            if j < n_rec and rec_times[j] == k + 1:
                out[i, j] = s
                j += 1


@nb.njit(nb.void(nb.uint64[:], nb.float64, nb.float64, nb.int64, nb.int64[:], nb.int64[:, :]),
         parallel=True, cache=True)
def _history_kernel(keys, p, q, horizon, rec_times, out):
    n_rec = rec_times.size
    for i in nb.prange(keys.size):
        key = keys[i]
        inc = np.empty(horizon + 1, dtype=np.int8)
        j = 0
        while j < n_rec and rec_times[j] == 0:
            out[i, j] = 0
            j += 1
        u = (rng.mix64_nb(key + np.uint64(_GOLDEN)) >> 11) * 2.0**-53
        x = np.int8(1) if u < q else np.int8(-1)
        inc[1] = x
        s = np.int64(x)
        if j < n_rec and rec_times[j] == 1:
            out[i, j] = s
            j += 1
        for k in range(1, horizon):
            r = rng.mix64_nb(key + np.uint64(2 * k) * np.uint64(_GOLDEN))
            # memory index in {1..k}: exact multiply-high of r * k / 2^64
            lo = (r & np.uint64(0xFFFFFFFF)) * np.uint64(k)
            hi = (r >> 32) * np.uint64(k) + (lo >> 32)
            mem = np.int64(hi >> 32) + 1
            u = (rng.mix64_nb(key + np.uint64(2 * k + 1) * np.uint64(_GOLDEN)) >> 11) * 2.0**-53
            x = inc[mem] if u < p else np.int8(-inc[mem])
            inc[k + 1] = x
            s += np.int64(x)
            if j < n_rec and rec_times[j] == k + 1:
                out[i, j] = s
                j += 1


def _record_times(params: WalkParams, record) -> np.ndarray:
    if record is None:
        return np.arange(params.horizon + 1, dtype=np.int64)
    times = np.unique(np.asarray(record, dtype=np.int64))
    if times.size == 0:
        raise ValueError("record set must be nonempty")
    if times[0] < 0 or times[-1] > params.horizon:
        raise ValueError("record times must lie in 0..horizon")
    return times


def _run(kernel, params: WalkParams, n_paths: int, record, start_index: int) -> PathBatch:
    if n_paths < 1:
        raise ValueError("n_paths must be >= 1")
    times = _record_times(params, record)
    keys = rng.path_keys(params.master_seed, start_index, n_paths, stream=rng.STREAM_WALK)
    out = np.empty((n_paths, times.size), dtype=np.int64)
    kernel(keys, params.p, params.q, params.horizon, times, out)
    batch = PathBatch(params=params, n_paths=n_paths, times=times,
                      positions=out, start_index=start_index)
    if __debug__ and batch.positions.size <= 1_000_000:
        batch.validate()
    return batch


def simulate_history(params: WalkParams, n_paths: int, record=None, start_index: int = 0) -> PathBatch:
    """Full-memory sampler: resamples a uniformly chosen past increment."""
    if params.mode != MODE_HISTORY:
        raise ValueError("params.mode must be 'history'")
    return _run(_history_kernel, params, n_paths, record, start_index)


def simulate_markov(params: WalkParams, n_paths: int, record=None, start_index: int = 0) -> PathBatch:
    """O(1)-memory sampler driven by the conditional up-probability."""
    if params.mode != MODE_MARKOV:
        raise ValueError("params.mode must be 'markov'")
    return _run(_markov_kernel, params, n_paths, record, start_index)


def simulate(params: WalkParams, n_paths: int, record=None, start_index: int = 0) -> PathBatch:
    """Dispatch on ``params.mode``."""
    if params.mode == MODE_HISTORY:
        return simulate_history(params, n_paths, record, start_index)
    return simulate_markov(params, n_paths, record, start_index)


def conditional_drift(path: np.ndarray, k: int, p: float) -> float:
    """(2p-1) S_k / k, the conditional mean of the next increment."""
    if not 1 <= k < len(path):
        raise IndexError(f"k must lie in 1..{len(path) - 1}")
    return (2.0 * p - 1.0) * float(path[k]) / float(k)
