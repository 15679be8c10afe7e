"""Recursive feature elimination driven by learner importances."""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from .matrix import FeatureMatrix


@dataclass
class SelectionResult:
    """Surviving features ranked by importance, plus the elimination trail.

    Scores are normalized over the selected set (sum to 1); ``history``
    records ``(name, iteration_dropped)`` for every eliminated feature.
    """

    selected: list
    scores: dict
    history: list
    seed: int
    learner_config: dict

    def ranked(self) -> list:
        return sorted(self.selected, key=lambda n: (-self.scores[n], n))

    def to_json(self) -> dict:
        return {
            "selected": [{"name": n, "score": self.scores[n]} for n in self.ranked()],
            "history": [{"name": n, "dropped_at_iter": it} for n, it in self.history],
            "seed": self.seed,
            "learner_config": self.learner_config,
        }

    @classmethod
    def from_json(cls, payload: dict) -> "SelectionResult":
        scores = {e["name"]: e["score"] for e in payload["selected"]}
        return cls(
            selected=list(scores),
            scores=scores,
            history=[(e["name"], e["dropped_at_iter"]) for e in payload["history"]],
            seed=payload["seed"],
            learner_config=payload["learner_config"],
        )

    def save(self, path):
        with open(path, "w") as fh:
            json.dump(self.to_json(), fh, indent=2, sort_keys=True)

    @classmethod
    def load(cls, path) -> "SelectionResult":
        with open(path) as fh:
            return cls.from_json(json.load(fh))


def _importances(matrix: FeatureMatrix, learner_config: dict, seed: int) -> np.ndarray:
    from .learners import feature_importance, fit_learner

    model = fit_learner(matrix, learner_config, seed=seed)
    imp = feature_importance(model)
    return np.array([imp.get(n, 0.0) for n in matrix.names])


def rfe(
    matrix: FeatureMatrix,
    learner_config: dict,
    target_k: int,
    step_frac: float = 0.1,
    seed: int = 0,
) -> SelectionResult:
    """Iteratively drop the lowest-importance features until ``target_k`` remain.

    Each round retrains the learner on the survivors and removes
    ``max(1, floor(surviving * step_frac))`` features, never crossing
    ``target_k``. The final model's importances, renormalized over the
    survivors, become the selection scores.
    """
    if not 1 <= target_k <= matrix.n_cols:
        raise ValueError(f"target_k must be in [1, {matrix.n_cols}]")

    surviving = matrix
    history = []
    iteration = 0
    while surviving.n_cols > target_k:
        imp = _importances(surviving, learner_config, seed)
        n_drop = min(max(1, int(surviving.n_cols * step_frac)),
                     surviving.n_cols - target_k)
        order = np.argsort(imp, kind="stable")  # ties: earlier column drops first
        drop_idx = set(order[:n_drop].tolist())
        history.extend((surviving.names[i], iteration) for i in sorted(drop_idx))
        keep = [n for i, n in enumerate(surviving.names) if i not in drop_idx]
        surviving = surviving.select_columns(keep)
        iteration += 1

    final_imp = _importances(surviving, learner_config, seed)
    total = final_imp.sum()
    scores = final_imp / total if total > 0 else np.full(final_imp.size, 1.0 / final_imp.size)
    return SelectionResult(
        selected=list(surviving.names),
        scores=dict(zip(surviving.names, scores.tolist())),
        history=history,
        seed=seed,
        learner_config=learner_config,
    )


def report_top_features(result: SelectionResult, k: int) -> list:
    """Top-k ``(name, score)`` rows, score descending, ties lexicographic."""
    if k > len(result.selected):
        raise ValueError(f"k={k} exceeds the {len(result.selected)} selected features")
    return [(n, result.scores[n]) for n in result.ranked()[:k]]


def format_top_features(result: SelectionResult, k: int) -> str:
    rows = report_top_features(result, k)
    width = max(len(n) for n, _ in rows)
    lines = [f"{'Name':<{width}}  Score"]
    lines += [f"{n:<{width}}  {s:.3f}" for n, s in rows]
    return "\n".join(lines)
