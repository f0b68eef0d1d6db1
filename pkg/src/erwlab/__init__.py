"""Simulation and statistical verification lab for elephant random walk scaling limits."""

import os

# Must happen before numba is first imported anywhere in the package:
# the sandboxed TBB probe is noisy, and 2-core runs gain nothing from it.
os.environ.setdefault("NUMBA_THREADING_LAYER", "workqueue")

__version__ = "0.1.0"
