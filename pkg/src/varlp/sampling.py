"""Random test sequences with per-sample seeds."""
from __future__ import annotations

import numpy as np

FAMILIES = ("gauss", "sparse", "flat", "cauchy", "decay", "spike")


def sample_sequence(rng: np.random.Generator, D: int) -> np.ndarray:
    """One random sequence of length D drawn from a mix of shapes and scales."""
    kind = FAMILIES[rng.integers(len(FAMILIES))]
    if kind == "gauss":
        x = rng.standard_normal(D)
    elif kind == "sparse":
        x = np.zeros(D)
        k = rng.integers(1, D + 1)
        idx = rng.choice(D, size=k, replace=False)
        x[idx] = rng.standard_normal(k)
    elif kind == "flat":
        x = np.zeros(D)
        k = rng.integers(1, D + 1)
        idx = rng.choice(D, size=k, replace=False)
        x[idx] = rng.choice([-1.0, 1.0], size=k)
    elif kind == "cauchy":
        x = rng.standard_cauchy(D)
    elif kind == "decay":
        x = rng.uniform(0.2, 1.0) ** np.arange(D) * rng.choice([-1.0, 1.0], size=D)
    else:
        x = np.zeros(D)
        x[rng.integers(D)] = 1.0
        x += 1e-3 * rng.standard_normal(D)
    if not np.any(x):
        x[0] = 1.0
    return x * 10.0 ** rng.uniform(-3, 3)


def sample_sequences(seed: int, count: int, D: int) -> np.ndarray:
    """count x D array; row i depends only on (seed, i)."""
    children = np.random.SeedSequence(seed).spawn(count)
    return np.stack([sample_sequence(np.random.default_rng(s), D) for s in children])
