"""Martingale view of a trajectory and the two FCLT conditions.

M_k = a_k S_k is a martingale; its increments satisfy
Delta M_k = a_k (X_k - drift_{k-1}) with drift_{k-1} = (2p-1) S_{k-1}/(k-1),
and |Delta M_k| <= 2 a_k.  Because X_k is a sign, the conditional
variance of Delta M_k is exactly a_k^2 (1 - drift_{k-1}^2); the
conditional-variance sums below therefore use that closed form, never
sample squares.

``cond_var_sum_*`` are the conditional-variance clocks of the scaled
martingale difference arrays in the three regimes; their path averages
should approach the deterministic limit clock.  The Lindeberg
negligibility condition is bounded deterministically through fourth
powers of the coefficients.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .coeff import CoeffTable, floor_power, gamma, s_norm
from .scaling import RegimeError, HorizonError


@dataclass
class MartingaleView:
    """Per-path arrays M_k and Delta M_k (index k; entry 0 unused in increments)."""

    coeffs: CoeffTable
    positions: np.ndarray
    m_values: np.ndarray
    increments: np.ndarray
    first_step_mean: float = 0.0

    @property
    def horizon(self) -> int:
        return self.positions.size - 1


def build_view(positions: np.ndarray, coeffs: CoeffTable,
               first_step_mean: float = 0.0) -> MartingaleView:
    """Martingale view of one fully recorded path.

    ``first_step_mean`` is E[X_1] = 2q - 1; it only enters the k = 1 term
    of the diffusive/critical conditional-variance sums.
    """
    positions = np.asarray(positions)
    m = positions.size - 1
    if m < 1:
        raise ValueError("path must contain S_0..S_m with m >= 1")
    if m > coeffs.m:
        raise ValueError(f"coefficient table covers 1..{coeffs.m} < horizon {m}")
    if coeffs.p == 0.0:
        raise ValueError("a_k is infinite from k = 2 at p = 0; no martingale view exists")
    a = np.empty(m + 1)
    a[0] = 0.0  # so that M_0 = 0
    a[1:] = coeffs.a(np.arange(1, m + 1))
    m_values = a * positions
    increments = np.empty(m + 1)
    increments[0] = 0.0
    increments[1:] = np.diff(m_values)
    return MartingaleView(coeffs=coeffs, positions=positions, m_values=m_values,
                          increments=increments, first_step_mean=first_step_mean)


def _drift_sq(view: MartingaleView, k_lo: int, k_hi: int) -> np.ndarray:
    """drift_{k-1}^2 for k in [k_lo, k_hi], with the k = 1 convention."""
    p = view.coeffs.p
    out = np.empty(k_hi - k_lo + 1)
    ks = np.arange(k_lo, k_hi + 1)
    if k_lo == 1:
        out[0] = view.first_step_mean**2
        tail = ks[1:]
        out[1:] = ((2.0 * p - 1.0) * view.positions[tail - 1] / (tail - 1)) ** 2
    else:
        out[:] = ((2.0 * p - 1.0) * view.positions[ks - 1] / (ks - 1)) ** 2
    return out


def _cond_var_block(view: MartingaleView, k_lo: int, k_hi: int) -> float:
    """sum over k of a_k^2 (1 - drift_{k-1}^2)."""
    if k_hi < k_lo:
        return 0.0
    a = view.coeffs.a(np.arange(k_lo, k_hi + 1))
    return float(np.sum(a * a * (1.0 - _drift_sq(view, k_lo, k_hi))))


def cond_var_sum_superdiffusive(view: MartingaleView, n: int, t: float) -> float:
    """s_n^{-2} sum_{k=n+1}^{n+[nt]} a_k^2 (1 - drift_{k-1}^2)."""
    p = view.coeffs.p
    if not 0.75 < p < 1.0:
        raise RegimeError("superdiffusive condition sum needs 3/4 < p < 1")
    hi = n + math.floor(n * t)
    if hi > view.horizon:
        raise HorizonError(f"path horizon {view.horizon} < {hi}")
    return _cond_var_block(view, n + 1, hi) / s_norm(p, n) ** 2


def cond_var_sum_diffusive(view: MartingaleView, n: int, t: float) -> float:
    """(Gamma(2p) n^{3/2-2p})^{-2} sum_{k=1}^{[nt]} a_k^2 (1 - drift_{k-1}^2)."""
    p = view.coeffs.p
    if not 0.0 <= p < 0.75:
        raise RegimeError("diffusive condition sum needs 0 <= p < 3/4")
    hi = math.floor(n * t)
    if hi > view.horizon:
        raise HorizonError(f"path horizon {view.horizon} < {hi}")
    norm = gamma(2.0 * p) * float(n) ** (1.5 - 2.0 * p)
    return _cond_var_block(view, 1, hi) / norm**2


def cond_var_sum_critical(view: MartingaleView, n: int, t: float) -> float:
    """(Gamma(3/2) sqrt(log n))^{-2} sum_{k=1}^{[n^t]} a_k^2 (1 - drift_{k-1}^2)."""
    p = view.coeffs.p
    if p != 0.75:
        raise RegimeError("critical condition sum needs p = 3/4")
    hi = floor_power(n, t)
    if hi > view.horizon:
        raise HorizonError(f"path horizon {view.horizon} < {hi}")
    norm = gamma(1.5) * math.sqrt(math.log(n))
    return _cond_var_block(view, 1, hi) / norm**2


def increment_bound_excess(view: MartingaleView) -> float:
    """max_k (|Delta M_k| - 2 a_k); must be <= 0 for every path."""
    m = view.horizon
    a = view.coeffs.a(np.arange(1, m + 1))
    return float(np.max(np.abs(view.increments[1:]) - 2.0 * a))


def increment_formula_error(view: MartingaleView) -> float:
    """max_{k>=2} |Delta M_k - a_k (X_k - drift_{k-1})|."""
    m = view.horizon
    if m < 2:
        return 0.0
    p = view.coeffs.p
    ks = np.arange(2, m + 1)
    a = view.coeffs.a(ks)
    x = np.diff(view.positions)[1:]  # X_2..X_m
    drift = (2.0 * p - 1.0) * view.positions[ks - 1] / (ks - 1)
    return float(np.max(np.abs(view.increments[2:] - a * (x - drift))))


def lindeberg_bound_superdiffusive(coeffs: CoeffTable, n: int, eps: float,
                                   tail_horizon: int) -> float:
    """Deterministic bound (16 / (eps^2 s_n^4)) sum_{k>n} a_k^4.

    The sum is truncated at ``tail_horizon``; the remainder is bounded by
    comparison with the integral of x^{4(1-2p)}, i.e. by
    a_K^4 K / (8p - 5) at K = tail_horizon.  The bound decays like
    16 (4p-3)^2 / (eps^2 (8p-5)) / n.
    """
    p = coeffs.p
    if not 0.75 < p < 1.0:
        raise RegimeError("the Lindeberg bound is for 3/4 < p < 1")
    if eps <= 0.0:
        raise ValueError("eps must be positive")
    if not n < tail_horizon <= coeffs.m:
        raise ValueError("need n < tail_horizon <= table size")
    a4 = np.exp(4.0 * coeffs.log_a[n + 1: tail_horizon + 1])
    tail = float(np.exp(4.0 * coeffs.log_a[tail_horizon])) * tail_horizon / (8.0 * p - 5.0)
    return 16.0 / (eps**2 * s_norm(p, n) ** 4) * (float(np.sum(a4)) + tail)


def cond_var_profile(batch_positions: np.ndarray, coeffs: CoeffTable, regime: str,
                     n: int, ts, first_step_mean: float = 0.0) -> np.ndarray:
    """Conditional-variance clock per path and grid time.

    ``batch_positions`` holds fully recorded paths, one per row; the
    result has shape (n_paths, len(ts)).
    """
    fns = {
        "superdiffusive": cond_var_sum_superdiffusive,
        "diffusive": cond_var_sum_diffusive,
        "critical": cond_var_sum_critical,
    }
    fn = fns[regime]
    ts = np.asarray(ts, dtype=np.float64)
    out = np.empty((batch_positions.shape[0], ts.size))
    for i in range(batch_positions.shape[0]):
        view = build_view(batch_positions[i], coeffs, first_step_mean)
        for j, t in enumerate(ts):
            out[i, j] = fn(view, n, float(t))
    return out
