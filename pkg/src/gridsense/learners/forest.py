"""Bagged Gini decision trees over the shared binned representation."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..matrix import FeatureMatrix
from .binning import apply_bins, quantile_bin_edges
from .tree import Tree


@dataclass(frozen=True)
class ForestParams:
    n_trees: int = 300
    max_depth: int = 0  # 0 = unbounded
    min_samples_leaf: int = 1
    n_bins: int = 64
    bootstrap: bool = True
    max_features: str = "sqrt"  # "sqrt" or "all"
    compute_oob: bool = True


@dataclass
class RfModel:
    params: ForestParams
    feature_names: list
    classes: list
    bin_edges: list
    trees: list
    tree_seeds: list
    seed: int
    oob_score: float | None = None

    @property
    def n_classes(self) -> int:
        return len(self.classes)

    def predict_proba(self, X: np.ndarray) -> np.ndarray:
        single = np.asarray(X).ndim == 1
        X = np.atleast_2d(np.asarray(X, dtype=float))
        if X.shape[1] != len(self.feature_names):
            raise ValueError(
                f"expected {len(self.feature_names)} features, got {X.shape[1]}"
            )
        acc = np.zeros((X.shape[0], self.n_classes))
        for tree in self.trees:
            acc += tree.leaf_values(X)
        acc /= len(self.trees)
        return acc[0] if single else acc

    def predict(self, X: np.ndarray) -> np.ndarray:
        p = np.atleast_2d(self.predict_proba(X))
        return np.asarray(self.classes, dtype=object)[np.argmax(p, axis=1)]


def _gini(counts: np.ndarray) -> float:
    n = counts.sum()
    if n == 0:
        return 0.0
    p = counts / n
    return float(1.0 - (p**2).sum())


class _GiniGrower:
    """Grows one classification tree on binned features."""

    def __init__(self, binned, n_edges, edges, n_classes, params, rng):
        self.binned = binned
        self.edges = edges
        self.n_edges = n_edges
        self.K = n_classes
        self.p = binned.shape[1]
        self.params = params
        self.rng = rng
        if params.max_features == "sqrt":
            self.m_feats = int(np.ceil(np.sqrt(self.p)))
        else:
            self.m_feats = self.p

    def _class_hists(self, rows, y, feats):
        stride = self.params.n_bins
        sub = self.binned[rows][:, feats].astype(np.int64)
        sub += np.arange(len(feats)) * stride
        flat = sub.ravel()
        size = len(feats) * stride
        hists = np.empty((self.K, len(feats), stride))
        for c in range(self.K):
            w = (y[rows] == c).astype(float)
            hists[c] = np.bincount(flat, weights=np.repeat(w, len(feats)),
                                   minlength=size).reshape(len(feats), stride)
        return hists

    def _best_split(self, rows, y):
        prm = self.params
        stride = prm.n_bins
        if self.m_feats < self.p:
            feats = np.sort(self.rng.choice(self.p, size=self.m_feats, replace=False))
        else:
            feats = np.arange(self.p)
        hists = self._class_hists(rows, y, feats)

        left = hists.cumsum(axis=2)  # (K, m, bins)
        total = left[:, :, -1:]
        right = total - left
        nl = left.sum(axis=0)
        nr = right.sum(axis=0)
        n = rows.size

        with np.errstate(divide="ignore", invalid="ignore"):
            gini_l = 1.0 - (left**2).sum(axis=0) / np.where(nl > 0, nl**2, 1.0)
            gini_r = 1.0 - (right**2).sum(axis=0) / np.where(nr > 0, nr**2, 1.0)
        child_imp = (nl * gini_l + nr * gini_r) / n
        parent_counts = hists.sum(axis=2)[:, 0]
        decrease = _gini(parent_counts) - child_imp

        valid = (
            (np.arange(stride)[None, :] < self.n_edges[feats][:, None])
            & (nl >= prm.min_samples_leaf)
            & (nr >= prm.min_samples_leaf)
        )
        decrease = np.where(valid, decrease, -np.inf)
        best = int(np.argmax(decrease))
        fi, b = divmod(best, stride)
        if not np.isfinite(decrease[fi, b]) or decrease[fi, b] <= 1e-12:
            return None
        return int(feats[fi]), b, float(decrease[fi, b])

    def _distribution(self, rows, y):
        return (np.bincount(y[rows], minlength=self.K) / rows.size).tolist()

    def grow(self, rows, y) -> Tree:
        prm = self.params
        tree = Tree()
        root = tree.add_node(self._distribution(rows, y), rows.size)
        stack = [(root, rows, 0)]
        while stack:
            node, node_rows, depth = stack.pop()
            if prm.max_depth and depth >= prm.max_depth:
                continue
            if node_rows.size < 2 * prm.min_samples_leaf:
                continue
            if len(np.unique(y[node_rows])) == 1:
                continue
            cand = self._best_split(node_rows, y)
            if cand is None:
                continue
            f, b, dec = cand
            mask = self.binned[node_rows, f] <= b
            left_rows, right_rows = node_rows[mask], node_rows[~mask]
            left = tree.add_node(self._distribution(left_rows, y), left_rows.size)
            right = tree.add_node(self._distribution(right_rows, y), right_rows.size)
            tree.set_split(node, f, self.edges[f][b], left, right, dec)
            # right pushed first so left expands first (stable node numbering)
            stack.append((right, right_rows, depth + 1))
            stack.append((left, left_rows, depth + 1))
        return tree


def fit_random_forest(matrix: FeatureMatrix, params: ForestParams | dict | None = None,
                      seed: int = 0) -> RfModel:
    """Train a random forest of Gini trees on seeded bootstraps.

    Per-tree randomness comes from independent child seeds of the master
    seed, so results do not depend on evaluation order or thread count.
    """
    if params is None:
        params = ForestParams()
    elif isinstance(params, dict):
        params = ForestParams(**params)

    classes, y_idx = np.unique(matrix.labels.astype(str), return_inverse=True)
    if classes.size < 2:
        raise ValueError("need at least 2 classes to train")
    X = matrix.values
    n, p = X.shape
    K = classes.size

    edges = quantile_bin_edges(X, params.n_bins)
    binned = apply_bins(X, edges)
    n_edges = np.array([len(e) for e in edges])

    seed_seq = np.random.SeedSequence(seed)
    children = seed_seq.spawn(params.n_trees)
    tree_seeds = [int(c.generate_state(1)[0]) for c in children]

    trees = []
    oob_votes = np.zeros((n, K))
    oob_count = np.zeros(n, dtype=int)
    all_rows = np.arange(n)
    for t in range(params.n_trees):
        rng = np.random.default_rng(tree_seeds[t])
        if params.bootstrap:
            rows = np.sort(rng.integers(0, n, size=n))
        else:
            rows = all_rows
        grower = _GiniGrower(binned, n_edges, edges, K, params, rng)
        tree = grower.grow(rows, y_idx)
        trees.append(tree)
        if params.compute_oob and params.bootstrap:
            oob = np.setdiff1d(all_rows, rows, assume_unique=False)
            if oob.size:
                oob_votes[oob] += tree.leaf_values(X[oob])
                oob_count[oob] += 1

    oob_score = None
    if params.compute_oob and params.bootstrap:
        scored = oob_count > 0
        if scored.any():
            pred = np.argmax(oob_votes[scored], axis=1)
            oob_score = float(np.mean(pred == y_idx[scored]))

    return RfModel(
        params=params,
        feature_names=list(matrix.names),
        classes=classes.tolist(),
        bin_edges=[e.tolist() for e in edges],
        trees=trees,
        tree_seeds=tree_seeds,
        seed=seed,
        oob_score=oob_score,
    )
