"""Stratified cross-validation, confusion matrices, and macro metrics."""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from .balance import smote
from .learners import fit_learner
from .matrix import CLASS_ORDER, FeatureMatrix, apply_minmax, minmax_scale_columns


@dataclass
class FoldPlan:
    """Assignment of every row to exactly one of ``k`` folds."""

    k: int
    fold_of: np.ndarray
    seed: int

    def test_rows(self, fold: int) -> np.ndarray:
        return np.flatnonzero(self.fold_of == fold)

    def train_rows(self, fold: int) -> np.ndarray:
        return np.flatnonzero(self.fold_of != fold)

    def class_counts(self, labels) -> list:
        labels = np.asarray(labels).astype(str)
        out = []
        for f in range(self.k):
            rows = self.test_rows(f)
            uniq, counts = np.unique(labels[rows], return_counts=True)
            out.append(dict(zip(uniq.tolist(), counts.tolist())))
        return out


def stratified_kfold(labels, k: int = 10, seed: int = 0) -> FoldPlan:
    """Shuffle each class (seeded) and deal its rows round-robin to folds.

    Per-class fold sizes differ by at most one. A class with fewer than
    ``k`` members is an error naming the class.
    """
    labels = np.asarray(labels).astype(str)
    rng = np.random.default_rng(seed)
    fold_of = np.full(labels.size, -1, dtype=int)
    for cls in sorted(set(labels.tolist())):
        rows = np.flatnonzero(labels == cls)
        if rows.size < k:
            raise ValueError(f"class {cls!r} has {rows.size} rows, fewer than k={k}")
        rows = rng.permutation(rows)
        fold_of[rows] = np.arange(rows.size) % k
    return FoldPlan(k=k, fold_of=fold_of, seed=seed)


def confusion_matrix(y_true, y_pred, classes=CLASS_ORDER):
    """Counts[i][j] = #(true class i predicted as class j), plus row shares.

    Returns ``(counts, row_normalized, empty_row_flags)``; rows with no
    observations normalize to zeros and are flagged.
    """
    y_true = np.asarray(y_true).astype(str)
    y_pred = np.asarray(y_pred).astype(str)
    if y_true.size != y_pred.size:
        raise ValueError("y_true and y_pred lengths differ")
    index = {c: i for i, c in enumerate(classes)}
    unknown = set(y_true.tolist()) | set(y_pred.tolist())
    unknown -= set(index)
    if unknown:
        raise ValueError(f"labels outside {list(classes)}: {sorted(unknown)}")
    n = len(classes)
    counts = np.zeros((n, n))
    for t, p in zip(y_true, y_pred):
        counts[index[t], index[p]] += 1
    row_sums = counts.sum(axis=1)
    empty = row_sums == 0
    norm = np.zeros_like(counts)
    norm[~empty] = counts[~empty] / row_sums[~empty, None]
    return counts, norm, empty


def metrics_from_confusion(counts) -> dict:
    """Accuracy plus macro precision/recall/F1 from a square counts matrix.

    Zero denominators yield zero for the affected class metric; macro
    averages are unweighted over classes.
    """
    counts = np.asarray(counts, dtype=float)
    if counts.ndim != 2 or counts.shape[0] != counts.shape[1] or counts.size == 0:
        raise ValueError("confusion matrix must be square and non-empty")
    tp = np.diag(counts)
    fp = counts.sum(axis=0) - tp
    fn = counts.sum(axis=1) - tp
    with np.errstate(divide="ignore", invalid="ignore"):
        precision = np.where(tp + fp > 0, tp / (tp + fp), 0.0)
        recall = np.where(tp + fn > 0, tp / (tp + fn), 0.0)
        f1 = np.where(precision + recall > 0,
                      2 * precision * recall / (precision + recall), 0.0)
    return {
        "accuracy": float(tp.sum() / counts.sum()) if counts.sum() > 0 else 0.0,
        "precision": float(precision.mean()),
        "recall": float(recall.mean()),
        "f1": float(f1.mean()),
    }


@dataclass
class EvalReport:
    """Per-fold metrics, their mean/std, and the aggregate confusion matrix."""

    config: dict
    seed: int
    folds: list
    confusion_counts: np.ndarray
    classes: tuple = CLASS_ORDER

    METRICS = ("accuracy", "precision", "recall", "f1")

    @property
    def mean(self) -> dict:
        return {m: float(np.mean([f[m] for f in self.folds])) for m in self.METRICS}

    @property
    def std(self) -> dict:
        # sample std (n-1), reported as 0 for a single fold
        return {
            m: float(np.std([f[m] for f in self.folds], ddof=1)) if len(self.folds) > 1 else 0.0
            for m in self.METRICS
        }

    @property
    def row_normalized(self) -> np.ndarray:
        counts = np.asarray(self.confusion_counts, dtype=float)
        sums = counts.sum(axis=1, keepdims=True)
        return np.divide(counts, sums, out=np.zeros_like(counts), where=sums > 0)

    def to_json(self) -> dict:
        return {
            "config": self.config,
            "seed": self.seed,
            "classes": list(self.classes),
            "folds": [dict(f) for f in self.folds],
            "mean": self.mean,
            "std": self.std,
            "confusion": {
                "counts": np.asarray(self.confusion_counts).tolist(),
                "row_normalized": self.row_normalized.tolist(),
            },
        }

    @classmethod
    def from_json(cls, payload: dict) -> "EvalReport":
        return cls(
            config=payload["config"],
            seed=payload["seed"],
            folds=payload["folds"],
            confusion_counts=np.asarray(payload["confusion"]["counts"]),
            classes=tuple(payload["classes"]),
        )

    def save(self, path):
        with open(path, "w") as fh:
            json.dump(self.to_json(), fh, indent=2, sort_keys=True)

    @classmethod
    def load(cls, path) -> "EvalReport":
        with open(path) as fh:
            return cls.from_json(json.load(fh))


def _default_eval_config() -> dict:
    return {
        "learner": {"kind": "gbdt_leafwise", "params": {}},
        "balance": {"enabled": True, "smote_k": 5, "mode": "per-fold"},
        "scaling": {"enabled": True},
        "eval": {"k": 10},
    }


def _merge(base: dict, override: dict) -> dict:
    out = dict(base)
    for key, val in (override or {}).items():
        if isinstance(val, dict) and isinstance(out.get(key), dict):
            out[key] = _merge(out[key], val)
        else:
            out[key] = val
    return out


def cross_validate(matrix: FeatureMatrix, config: dict | None = None,
                   seed: int = 0) -> EvalReport:
    """Stratified k-fold evaluation of the configured pipeline.

    Default mode fits scaling and applies SMOTE inside each training fold
    only, so no synthetic row or scaling statistic ever sees test data.
    ``balance.mode == "global"`` (the paper-compatible order) instead scales
    and oversamples the whole matrix before folding.
    """
    cfg = _merge(_default_eval_config(), config or {})
    k = cfg["eval"]["k"]
    balance = cfg["balance"]
    scaling_on = cfg["scaling"]["enabled"]
    smote_global = balance["enabled"] and balance.get("mode") == "global"

    work = matrix
    if smote_global:
        if scaling_on:
            work, _ = minmax_scale_columns(work)
        work = smote(work, k=balance["smote_k"], seed=seed)

    plan = stratified_kfold(work.labels, k=k, seed=seed)
    classes = tuple(c for c in CLASS_ORDER if c in set(work.labels.astype(str))) or CLASS_ORDER

    folds = []
    total_counts = np.zeros((len(classes), len(classes)))
    for f in range(k):
        train = work.select_rows(plan.train_rows(f))
        test = work.select_rows(plan.test_rows(f))
        if not smote_global:
            if scaling_on:
                train, params = minmax_scale_columns(train)
                test = apply_minmax(test, params)
            if balance["enabled"]:
                train = smote(train, k=balance["smote_k"], seed=seed * 1000 + f)
        model = fit_learner(train, cfg["learner"], seed=seed)
        y_pred = model.predict(test.values)
        counts, _, _ = confusion_matrix(test.labels, y_pred, classes)
        total_counts += counts
        folds.append({"fold": f, **metrics_from_confusion(counts)})

    return EvalReport(config=cfg, seed=seed, folds=folds,
                      confusion_counts=total_counts, classes=classes)


def holdout_validate(matrix: FeatureMatrix, config: dict | None = None,
                     seed: int = 0, test_frac: float = 0.1) -> EvalReport:
    """Single stratified train/test split (the 90:10 protocol)."""
    cfg = _merge(_default_eval_config(), config or {})
    k = max(2, int(round(1.0 / test_frac)))
    plan = stratified_kfold(matrix.labels, k=k, seed=seed)
    classes = tuple(c for c in CLASS_ORDER if c in set(matrix.labels.astype(str))) or CLASS_ORDER

    train = matrix.select_rows(plan.train_rows(0))
    test = matrix.select_rows(plan.test_rows(0))
    if cfg["scaling"]["enabled"]:
        train, params = minmax_scale_columns(train)
        test = apply_minmax(test, params)
    if cfg["balance"]["enabled"]:
        train = smote(train, k=cfg["balance"]["smote_k"], seed=seed)
    model = fit_learner(train, cfg["learner"], seed=seed)
    y_pred = model.predict(test.values)
    counts, _, _ = confusion_matrix(test.labels, y_pred, classes)
    folds = [{"fold": 0, **metrics_from_confusion(counts)}]
    cfg = dict(cfg, holdout=test_frac)
    return EvalReport(config=cfg, seed=seed, folds=folds,
                      confusion_counts=counts, classes=classes)
