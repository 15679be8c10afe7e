"""Quantile binning shared by the tree learners.

Split thresholds are always bin upper edges, so routing a raw value left
(``x <= threshold``) agrees exactly with routing its bin index
(``bin <= threshold_bin``).
"""

from __future__ import annotations

import numpy as np


def quantile_bin_edges(values: np.ndarray, n_bins: int) -> list:
    """Interior quantile edges per feature column; ties collapse bins."""
    qs = np.linspace(0.0, 1.0, n_bins + 1)[1:-1]
    return [np.unique(np.quantile(values[:, j], qs)) for j in range(values.shape[1])]


def apply_bins(values: np.ndarray, edges: list) -> np.ndarray:
    """Map raw values to bin indices: bin b holds x <= edges[b] (last bin open)."""
    binned = np.empty(values.shape, dtype=np.uint8)
    for j, e in enumerate(edges):
        binned[:, j] = np.searchsorted(e, values[:, j], side="left")
    return binned
