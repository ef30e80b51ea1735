"""Reproducible random streams: one counter-based substream per trial."""

from __future__ import annotations

import numpy as np


def stream(seed: int, trial: int = 0, purpose: int = 0) -> np.random.Generator:
    """Philox generator keyed by ``(seed, trial, purpose)``.

    The output of a trial depends only on these three integers, so trials
    can be farmed out to any number of workers in any order.
    """
    if seed < 0 or trial < 0:
        raise ValueError("seed and trial index must be non-negative")
    ss = np.random.SeedSequence([seed & 0xFFFFFFFFFFFFFFFF, trial, purpose])
    return np.random.Generator(np.random.Philox(ss))


def sample_letters(rng: np.random.Generator, probs, size: int) -> np.ndarray:
    """``size`` iid indices drawn from the probability vector ``probs``."""
    cum = np.cumsum(np.asarray(probs, dtype=float))
    cum[-1] = 1.0
    return np.searchsorted(cum, rng.random(size), side="right").astype(np.int8)
