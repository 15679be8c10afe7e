"""Flat tree storage and vectorized inference, shared by GBDT and forest."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

LEAF = -1


@dataclass
class Tree:
    """Array-of-nodes binary tree.

    ``feature[i] == LEAF`` marks a leaf. Internal nodes route
    ``x[feature] <= threshold`` to ``left``. ``value`` holds the leaf output:
    a scalar (GBDT) or a class distribution (forest). ``gain`` and
    ``n_samples`` back feature-importance accounting.
    """

    feature: list = field(default_factory=list)
    threshold: list = field(default_factory=list)
    left: list = field(default_factory=list)
    right: list = field(default_factory=list)
    value: list = field(default_factory=list)
    gain: list = field(default_factory=list)
    n_samples: list = field(default_factory=list)

    def add_node(self, value, n_samples) -> int:
        self.feature.append(LEAF)
        self.threshold.append(0.0)
        self.left.append(LEAF)
        self.right.append(LEAF)
        self.value.append(value)
        self.gain.append(0.0)
        self.n_samples.append(int(n_samples))
        return len(self.feature) - 1

    def set_split(self, node, feature, threshold, left, right, gain):
        self.feature[node] = int(feature)
        self.threshold[node] = float(threshold)
        self.left[node] = int(left)
        self.right[node] = int(right)
        self.gain[node] = float(gain)

    @property
    def n_nodes(self) -> int:
        return len(self.feature)

    def apply(self, X: np.ndarray) -> np.ndarray:
        """Leaf index for each row of raw feature values."""
        feature = np.asarray(self.feature)
        threshold = np.asarray(self.threshold)
        left = np.asarray(self.left)
        right = np.asarray(self.right)
        node = np.zeros(X.shape[0], dtype=np.int64)
        while True:
            f = feature[node]
            at_internal = f >= 0
            if not at_internal.any():
                return node
            rows = np.flatnonzero(at_internal)
            go_left = X[rows, f[rows]] <= threshold[node[rows]]
            node[rows] = np.where(go_left, left[node[rows]], right[node[rows]])

    def leaf_values(self, X: np.ndarray) -> np.ndarray:
        """Leaf output per row: scalars for GBDT trees, distributions for forest."""
        return np.asarray(self.value, dtype=float)[self.apply(X)]

    def to_json(self) -> dict:
        return {
            "feature": [int(v) for v in self.feature],
            "threshold": [float(v) for v in self.threshold],
            "left": [int(v) for v in self.left],
            "right": [int(v) for v in self.right],
            "value": [v if np.isscalar(v) else [float(x) for x in v] for v in self.value],
            "gain": [float(v) for v in self.gain],
            "n_samples": [int(v) for v in self.n_samples],
        }

    @classmethod
    def from_json(cls, payload: dict) -> "Tree":
        return cls(
            feature=list(payload["feature"]),
            threshold=list(payload["threshold"]),
            left=list(payload["left"]),
            right=list(payload["right"]),
            value=list(payload["value"]),
            gain=list(payload["gain"]),
            n_samples=list(payload["n_samples"]),
        )


def accumulate_importance(tree: Tree, weights: np.ndarray, mode: str, n_total: int):
    """Add this tree's split contributions into ``weights`` (indexed by feature)."""
    for i in range(tree.n_nodes):
        f = tree.feature[i]
        if f == LEAF:
            continue
        if mode == "gain":
            weights[f] += tree.gain[i]
        else:  # size-weighted impurity decrease
            weights[f] += tree.gain[i] * tree.n_samples[i] / n_total
