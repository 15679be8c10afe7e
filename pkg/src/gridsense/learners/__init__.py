"""Tree-ensemble learners: boosted trees (two growth policies) and a forest."""

from __future__ import annotations

import numpy as np

from ..matrix import FeatureMatrix
from .forest import ForestParams, RfModel, fit_random_forest
from .gbdt import GbdtModel, GbdtParams, fit_gbdt, log_loss, softmax, softmax_gradients
from .io import deserialize, load_model, save_model, serialize
from .tree import Tree, accumulate_importance

#: Learner kinds accepted in pipeline configuration.
LEARNER_KINDS = ("gbdt_leafwise", "gbdt_levelwise", "random_forest")


def fit_learner(matrix: FeatureMatrix, config: dict, seed: int = 0):
    """Train the learner described by ``{"kind": ..., "params": {...}}``."""
    kind = config.get("kind", "gbdt_leafwise")
    params = dict(config.get("params") or {})
    if kind == "gbdt_leafwise":
        params.setdefault("growth", "leaf_wise")
        return fit_gbdt(matrix, params, seed=seed)
    if kind == "gbdt_levelwise":
        params.setdefault("growth", "level_wise")
        return fit_gbdt(matrix, params, seed=seed)
    if kind == "random_forest":
        return fit_random_forest(matrix, params, seed=seed)
    raise ValueError(f"unknown learner kind {kind!r}; expected one of {LEARNER_KINDS}")


def predict_proba(model, X):
    return model.predict_proba(X)


def feature_importance(model) -> dict:
    """Per-feature scores: split gain for GBDT, size-weighted impurity
    decrease for forests; normalized to sum 1 when any split exists."""
    p = len(model.feature_names)
    weights = np.zeros(p)
    if isinstance(model, GbdtModel):
        for tree in model.trees:
            accumulate_importance(tree, weights, "gain", 0)
    else:
        for tree in model.trees:
            accumulate_importance(tree, weights, "weighted", tree.n_samples[0])
    total = weights.sum()
    if total > 0:
        weights = weights / total
    return dict(zip(model.feature_names, weights.tolist()))


__all__ = [
    "LEARNER_KINDS",
    "GbdtParams",
    "GbdtModel",
    "ForestParams",
    "RfModel",
    "Tree",
    "fit_gbdt",
    "fit_random_forest",
    "fit_learner",
    "predict_proba",
    "feature_importance",
    "serialize",
    "deserialize",
    "save_model",
    "load_model",
    "softmax",
    "softmax_gradients",
    "log_loss",
]
