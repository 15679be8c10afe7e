"""SMOTE oversampling for minority classes."""

from __future__ import annotations

import numpy as np

from .matrix import FeatureMatrix


def smote(matrix: FeatureMatrix, k: int = 5, seed: int = 0, target: dict | None = None) -> FeatureMatrix:
    """Oversample minority classes by interpolating nearest neighbors.

    Each synthetic row is ``x + u * (z - x)`` where ``x`` is a uniformly
    drawn minority row, ``z`` one of its ``k`` nearest same-class neighbors
    (Euclidean; ``k`` capped at class size - 1), and ``u ~ Uniform(0, 1)``.
    Original rows stay first and untouched; synthetic rows are flagged.
    ``target`` maps class -> desired count, defaulting to the majority size.
    """
    if k < 1:
        raise ValueError("k must be >= 1")
    counts = matrix.class_counts()
    if target is None:
        majority = max(counts.values())
        target = {c: majority for c in counts}

    rng = np.random.default_rng(seed)
    new_rows, new_labels, new_ids = [], [], []
    for cls in sorted(target):
        have = counts.get(cls, 0)
        need = target[cls] - have
        if need <= 0:
            continue
        if have < 2:
            raise ValueError(f"class {cls!r} has {have} row(s); SMOTE needs at least 2")
        cls_idx = np.flatnonzero(matrix.labels.astype(str) == cls)
        pts = matrix.values[cls_idx]
        k_eff = min(k, have - 1)
        # pairwise distances once per class; classes here are small
        diff = pts[:, None, :] - pts[None, :, :]
        dist = np.sqrt((diff**2).sum(axis=2))
        np.fill_diagonal(dist, np.inf)
        neighbors = np.argsort(dist, axis=1, kind="stable")[:, :k_eff]

        for j in range(need):
            i = rng.integers(0, have)
            z = neighbors[i][rng.integers(0, k_eff)]
            u = rng.random()
            new_rows.append(pts[i] + u * (pts[z] - pts[i]))
            new_labels.append(cls)
            new_ids.append(f"smote-{cls}-{j}")

    if not new_rows:
        return matrix
    values = np.vstack([matrix.values, np.asarray(new_rows)])
    labels = np.concatenate([matrix.labels, np.array(new_labels, dtype=object)])
    ids = np.concatenate([matrix.ids, np.array(new_ids, dtype=object)])
    synthetic = np.concatenate([matrix.synthetic, np.ones(len(new_rows), dtype=bool)])
    return FeatureMatrix(values, labels, list(matrix.names), ids, synthetic)
