"""Independent small-scale oracles used by the test suite.

Everything here is computed by a different route than the library code
under test: exhaustive path enumeration under the definitional
(memory-resampling) mechanism, scalar moment recursions, and closed
binomial forms.  Deliberately slow and simple.
"""

from __future__ import annotations

import math
from itertools import product


def enum_history_law(p: float, q: float, n: int) -> dict[int, float]:
    """Exact law of S_n by enumerating all 2^n increment sequences.

    Probabilities follow the definitional mechanism: the next increment
    copies a uniformly chosen past one with probability p, flips it
    otherwise, so P(next = +1 | k ups out of j) = (k p + (j-k)(1-p))/j.
    """
    law: dict[int, float] = {}
    for signs in product((1, -1), repeat=n):
        prob = q if signs[0] == 1 else 1.0 - q
        ups = 1 if signs[0] == 1 else 0
        for j in range(1, n):
            p_up = (ups * p + (j - ups) * (1.0 - p)) / j
            prob *= p_up if signs[j] == 1 else 1.0 - p_up
            ups += signs[j] == 1
        s = sum(signs)
        law[s] = law.get(s, 0.0) + prob
    return {s: pr for s, pr in law.items() if pr > 0.0}


def moment_recursion(p: float, q: float, n: int) -> tuple[float, float]:
    """(E S_n, E S_n^2) from the scalar recursions
    m_{k+1} = (1 + (2p-1)/k) m_k and h_{k+1} = (1 + 2(2p-1)/k) h_k + 1."""
    m = 2.0 * q - 1.0
    h = 1.0
    for k in range(1, n):
        m *= 1.0 + (2.0 * p - 1.0) / k
        h = h * (1.0 + 2.0 * (2.0 * p - 1.0) / k) + 1.0
    return m, h


def srw_pmf(n: int) -> dict[int, float]:
    """Simple symmetric random walk: P(S_n = 2k - n) = C(n, k) / 2^n."""
    return {2 * k - n: math.comb(n, k) / 2.0**n for k in range(n + 1)}


def harmonic(n: int) -> float:
    return math.fsum(1.0 / k for k in range(1, n + 1))
