"""Exact law of the walk position by dynamic programming.

The walk is a time-inhomogeneous Markov chain on the integers, so the
distribution of S_n follows from forward propagation with the
state-dependent up-probability 1/2 + (p - 1/2) s/k.  This is the ground
truth against which both samplers, the moment asymptotics, and the
martingale identity are checked.  O(n^2) time, O(n) memory.

The DP is deliberately not renormalized: the drift of the total mass
away from 1 is itself a health metric and must stay below 1e-12 per
10^4 steps, otherwise the transition probabilities are wrong.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .coeff import CoeffTable


@dataclass
class ExactLaw:
    """pmf of S_n on the lattice {-n, -n+2, ..., n}, indexed by (s+n)/2."""

    p: float
    q: float
    n: int
    probs: np.ndarray

    @property
    def support(self) -> np.ndarray:
        return np.arange(-self.n, self.n + 1, 2, dtype=np.int64)

    def pmf(self, s: int) -> float:
        if abs(s) > self.n or (s - self.n) % 2 != 0:
            return 0.0
        return float(self.probs[(s + self.n) // 2])

    def as_dict(self) -> dict[int, float]:
        return {int(s): float(pr) for s, pr in zip(self.support, self.probs)}

    def mass_defect(self) -> float:
        return abs(1.0 - math.fsum(self.probs.tolist()))


def exact_law(p: float, q: float, n: int) -> ExactLaw:
    """Distribution of S_n, computed by forward DP from the n = 1 law."""
    if not 0.0 <= p <= 1.0 or not 0.0 <= q <= 1.0:
        raise ValueError("p and q must lie in [0, 1]")
    if n < 1:
        raise ValueError("n must be >= 1")
    probs = np.array([1.0 - q, q])
    for k in range(1, n):
        s = np.arange(-k, k + 1, 2, dtype=np.float64)
        up = 0.5 + (p - 0.5) * (s / k)
        nxt = np.zeros(k + 2)
        nxt[1:] = probs * up
        nxt[:-1] += probs * (1.0 - up)
        probs = nxt
    law = ExactLaw(p=p, q=q, n=n, probs=probs)
    budget = 1e-12 * max(1.0, n / 1e4)
    if law.mass_defect() > budget:
        raise ArithmeticError(
            f"DP mass defect {law.mass_defect():.3e} exceeds {budget:.3e}; "
            "transition probabilities are suspect"
        )
    return law


def exact_moment(law: ExactLaw, order: int) -> float:
    """E[S_n^order] by compensated summation over the pmf."""
    if order < 1:
        raise ValueError("order must be a positive integer")
    s = law.support.astype(np.float64)
    return math.fsum((s**order * law.probs).tolist())


def martingale_identity_error(p: float, q: float, n: int, coeffs: CoeffTable) -> float:
    """|a_n E[S_n] - (2q - 1)|, using the exact E[S_n].

    Since a_1 = 1 and a_n S_n is a martingale, this must vanish to
    rounding for every n.  At p = 0 the coefficient a_n is +inf for
    n >= 2, so the identity is checked in its inverted form
    |E[S_n] - (2q - 1) / a_n| instead (1 / a_n = 0 there).
    """
    if n > coeffs.m:
        raise ValueError("coefficient table too short for this n")
    if abs(p - coeffs.p) > 1e-15:
        raise ValueError("coefficient table was built for a different p")
    mean = exact_moment(exact_law(p, q, n), 1)
    log_a = float(coeffs.log_a[n])
    if math.isfinite(log_a):
        return abs(math.exp(log_a) * mean - (2.0 * q - 1.0))
    return abs(mean - (2.0 * q - 1.0) * float(coeffs.inv_a(n)))
