"""Variation operators on genomes (shares followed by premium genes).

Outputs are unrepaired; callers pass them through ``DecisionSpace.repair``.
"""

from __future__ import annotations

import numpy as np


def blend_crossover(a: np.ndarray, b: np.ndarray, n_share: int,
                    rng: np.random.Generator) -> np.ndarray:
    """Arithmetic blend of the share genes, uniform pick of premium genes."""
    alpha = rng.random()
    child = np.empty_like(a)
    child[:n_share] = alpha * a[:n_share] + (1.0 - alpha) * b[:n_share]
    pick = rng.random(a.shape[0] - n_share) < 0.5
    child[n_share:] = np.where(pick, a[n_share:], b[n_share:])
    return child


def gaussian_mutation(x: np.ndarray, lower: np.ndarray, upper: np.ndarray,
                      rng: np.random.Generator, rate: float | None = None,
                      sigma: float = 0.1) -> np.ndarray:
    """Perturb each gene with probability ``rate`` by N(0, sigma * gene range).

    ``rate`` defaults to one gene per genome on average. Genes with an empty
    range are left alone.
    """
    n = x.shape[0]
    if rate is None:
        rate = 1.0 / n
    width = upper - lower
    mask = (rng.random(n) < rate) & (width > 0)
    out = x.copy()
    if np.any(mask):
        out[mask] += rng.normal(0.0, 1.0, int(mask.sum())) * sigma * width[mask]
    return out
