"""Coefficient sequence of the reinforced walk and its normalizers.

The walk with memory parameter ``p`` becomes a martingale after
multiplication by

    a_1 = 1,   a_{k+1} = a_k / (1 + (2p-1)/k),

equivalently ``a_k = Gamma(2p) Gamma(k) / Gamma(k + 2p - 1)``, with
``a_k ~ Gamma(2p) / k^{2p-1}`` for large ``k``.  The table is built by
the recurrence in log space; the Gamma-ratio form is used only as a
cross-check (see tests) because it cancels badly for large ``k``.

Also here: the superdiffusive normalizer ``s_n``, and deterministic gap
measurements for the two uniform-convergence facts the scaled-process
analysis rests on (the ``a``-ratio against ``(1+t)^{1-2p}``, and the
logarithmic clock ``log_n(n + [n^t])`` against ``1 v t``).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

# Lanczos approximation, g = 7, nine coefficients.  Relative error is
# below 1e-13 on the range used here; the documented contract is 1e-10
# on (0, 4].
_LANCZOS_G = 7.0
_LANCZOS_COEFFS = (
    0.99999999999980993,
    676.5203681218851,
    -1259.1392167224028,
    771.32342877765313,
    -176.61502916214059,
    12.507343278686905,
    -0.13857109526572012,
    9.9843695780195716e-6,
    1.5056327351493116e-7,
)


def gamma(x: float) -> float:
    """Gamma function via the Lanczos approximation.

    Intended range is (0, 4] (everything this package needs lies there);
    values up to the float overflow threshold are returned on a
    best-effort basis.  Raises ValueError for x <= 0.
    """
    if not x > 0.0:
        raise ValueError(f"gamma requires x > 0, got {x!r}")
    if x < 0.5:
        # reflection keeps the series argument away from 0
        return math.pi / (math.sin(math.pi * x) * gamma(1.0 - x))
    z = x - 1.0
    series = _LANCZOS_COEFFS[0]
    for i, c in enumerate(_LANCZOS_COEFFS[1:], start=1):
        series += c / (z + i)
    t = z + _LANCZOS_G + 0.5
    return math.sqrt(2.0 * math.pi) * t ** (z + 0.5) * math.exp(-t) * series


@dataclass
class CoeffTable:
    """log a_k for k = 1..m; index 0 of ``log_a`` is unused (NaN)."""

    p: float
    log_a: np.ndarray

    @property
    def m(self) -> int:
        return self.log_a.size - 1

    def a(self, k):
        """a_k for a scalar or array of indices in 1..m."""
        k = np.asarray(k)
        if np.any((k < 1) | (k > self.m)):
            raise IndexError(f"index out of table range 1..{self.m}")
        return np.exp(self.log_a[k])

    def inv_a(self, k):
        """1 / a_k, finite for every p in [0, 1] (including p = 0)."""
        k = np.asarray(k)
        if np.any((k < 1) | (k > self.m)):
            raise IndexError(f"index out of table range 1..{self.m}")
        return np.exp(-self.log_a[k])


def build_coeffs(p: float, m: int) -> CoeffTable:
    """Coefficient table up to index m, built by the log-space recurrence."""
    if not 0.0 <= p <= 1.0:
        raise ValueError("p must lie in [0, 1]")
    if m < 1:
        raise ValueError("m must be >= 1")
    log_a = np.empty(m + 1)
    log_a[0] = np.nan
    log_a[1] = 0.0
    if m > 1:
        k = np.arange(1, m, dtype=np.float64)
        with np.errstate(divide="ignore"):
            # p = 0 makes the k = 1 factor vanish, so log_a becomes +inf
            # from index 2 on; downstream code uses inv_a there.
            steps = np.log1p((2.0 * p - 1.0) / k)
        log_a[2:] = -np.cumsum(steps)
    return CoeffTable(p=p, log_a=log_a)


def s_norm(p: float, n: int) -> float:
    """Superdiffusive normalizer Gamma(2p) n^{3/2-2p} / sqrt(4p-3).

    Defined for 3/4 < p <= 1; p = 1 is a boundary admitted for testing
    only (the scaled-process theorems themselves need p < 1).
    """
    if not 0.75 < p <= 1.0:
        raise ValueError("s_norm requires 3/4 < p <= 1")
    if n < 1:
        raise ValueError("n must be >= 1")
    return gamma(2.0 * p) * float(n) ** (1.5 - 2.0 * p) / math.sqrt(4.0 * p - 3.0)


def ratio_gap(p: float, n: int, T: float, grid_step: float | None = None) -> float:
    """sup over t in [0, T] of |a_{n+[nt]} / a_n - (1+t)^{1-2p}|.

    With the default ``grid_step=None`` the supremum is computed exactly:
    t -> [nt] is constant on [j/n, (j+1)/n) while (1+t)^{1-2p} is monotone
    there, so it suffices to compare the ratio against the power at both
    interval endpoints.  A positive ``grid_step`` evaluates on the uniform
    grid {0, step, 2 step, ..., T} instead.
    """
    if not 0.0 <= p <= 1.0:
        raise ValueError("p must lie in [0, 1]")
    if n < 1 or T < 0.0:
        raise ValueError("need n >= 1 and T >= 0")
    J = math.floor(n * T)
    expo = 1.0 - 2.0 * p
    # a_{n+j}/a_n = exp(-sum_{k=n}^{n+j-1} log1p((2p-1)/k)); the partial
    # sums stay finite for every p once n >= 2 (and for p > 0 at n = 1).
    k = np.arange(n, n + J, dtype=np.float64)
    with np.errstate(divide="ignore"):
        steps = np.log1p((2.0 * p - 1.0) / k)
    ratios = np.empty(J + 1)
    ratios[0] = 1.0
    ratios[1:] = np.exp(-np.cumsum(steps))

    if grid_step is not None:
        if grid_step <= 0.0:
            raise ValueError("grid_step must be positive")
        ts = np.arange(0.0, T + 0.5 * grid_step, grid_step)
        ts = ts[ts <= T]
        js = np.minimum(np.floor(n * ts).astype(np.int64), J)
        return float(np.max(np.abs(ratios[js] - (1.0 + ts) ** expo)))

    j = np.arange(J + 1, dtype=np.float64)
    left = (1.0 + j / n) ** expo
    right = (1.0 + np.minimum((j + 1.0) / n, T)) ** expo
    gap = np.maximum(np.abs(ratios - left), np.abs(ratios - right))
    return float(np.max(gap))


def floor_power(n: int, t: float) -> int:
    """[n^t], the floor of n**t, robust to floating-point boundary error.

    Candidates within a relative half-ulp-style guard of an integer are
    snapped to it; integer exponents are cross-checked with exact integer
    arithmetic while n**t <= 2**53.
    """
    if n < 1 or t < 0.0:
        raise ValueError("need n >= 1 and t >= 0")
    if float(t).is_integer():
        exact = n ** int(t)
        if exact <= 2**53:
            return exact
    v = float(n) ** t
    c = round(v)
    if abs(v - c) <= 1e-9 * max(1.0, abs(c)):
        return int(c)
    return int(math.floor(v))


def log_clock_gap(n: int, T: float, grid: np.ndarray | None = None) -> float:
    """max over the grid of |log_n(n + [n^t]) - (1 v t)|.

    The default grid is a fine uniform grid on [0, T] with t = 1 added,
    where the gap attains its maximum log 2 / log n.  For T >= 1 the
    explicit bound max(log 2 / log n, |log(1 - n^-T)| / log n) is
    verified and a violation raises ArithmeticError, as does a breach of
    the crude bound sup tau_n <= (1 v T) + 1.
    """
    if n < 2:
        raise ValueError("n must be >= 2")
    if T < 0.0:
        raise ValueError("T must be >= 0")
    if grid is None:
        grid = np.union1d(np.linspace(0.0, T, 401), [min(1.0, T)])
    else:
        grid = np.asarray(grid, dtype=np.float64)
        if grid.size == 0 or np.any(grid < 0.0) or np.any(grid > T):
            raise ValueError("grid must be nonempty and lie within [0, T]")
    log_n = math.log(n)
    tau = np.array([math.log(n + floor_power(n, t)) / log_n for t in grid])
    gap = float(np.max(np.abs(tau - np.maximum(1.0, grid))))
    if float(np.max(tau)) > max(1.0, T) + 1.0 + 1e-12:
        raise ArithmeticError("clock exceeded the crude bound (1 v T) + 1")
    if T >= 1.0:
        bound = max(math.log(2.0) / log_n, abs(math.log(1.0 - float(n) ** -T)) / log_n)
        if gap > bound + 1e-12:
            raise ArithmeticError(
                f"clock gap {gap} exceeded its explicit bound {bound} at n={n}, T={T}"
            )
    return gap
