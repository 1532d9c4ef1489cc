"""Seeded random streams.

Every trial gets its own counter-based stream derived from ``(seed, trial)``
so results do not depend on execution order.
"""
from __future__ import annotations

import numpy as np


def make_rng(seed, trial=0):
    """``numpy`` generator on a Philox stream keyed by ``(seed, trial)``."""
    return np.random.Generator(np.random.Philox(np.random.SeedSequence([int(seed), int(trial)])))
