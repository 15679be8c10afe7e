"""Feature matrix container, min-max scaling, and the CSV interchange format."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import pandas as pd

CLASS_ORDER = ("Nor", "Pre", "Post")


@dataclass
class FeatureMatrix:
    """Rows of named features with class labels and synthetic-row flags."""

    values: np.ndarray
    labels: np.ndarray
    names: list
    ids: np.ndarray | None = None
    synthetic: np.ndarray | None = None

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=float)
        if self.values.ndim != 2:
            raise ValueError("values must be 2-D")
        self.labels = np.asarray(self.labels, dtype=object)
        if self.labels.size != self.values.shape[0]:
            raise ValueError("labels length must match row count")
        if len(self.names) != self.values.shape[1]:
            raise ValueError("names length must match column count")
        if self.ids is None:
            self.ids = np.array([f"row{i}" for i in range(self.n_rows)], dtype=object)
        else:
            self.ids = np.asarray(self.ids, dtype=object)
        if self.synthetic is None:
            self.synthetic = np.zeros(self.n_rows, dtype=bool)
        else:
            self.synthetic = np.asarray(self.synthetic, dtype=bool)
        if not np.all(np.isfinite(self.values)):
            raise ValueError("feature matrix contains non-finite values")

    @property
    def n_rows(self) -> int:
        return self.values.shape[0]

    @property
    def n_cols(self) -> int:
        return self.values.shape[1]

    def class_counts(self) -> dict:
        labels, counts = np.unique(self.labels.astype(str), return_counts=True)
        return dict(zip(labels.tolist(), counts.tolist()))

    def select_rows(self, idx) -> "FeatureMatrix":
        idx = np.asarray(idx)
        return FeatureMatrix(self.values[idx], self.labels[idx], list(self.names),
                             self.ids[idx], self.synthetic[idx])

    def select_columns(self, names) -> "FeatureMatrix":
        pos = {n: i for i, n in enumerate(self.names)}
        missing = [n for n in names if n not in pos]
        if missing:
            raise KeyError(f"unknown feature columns: {missing[:5]}")
        cols = [pos[n] for n in names]
        return FeatureMatrix(self.values[:, cols], self.labels, list(names),
                             self.ids, self.synthetic)

    @classmethod
    def from_vectors(cls, vectors) -> "FeatureMatrix":
        vectors = list(vectors)
        if not vectors:
            raise ValueError("no feature vectors")
        names = list(vectors[0].names)
        for v in vectors[1:]:
            if list(v.names) != names:
                raise ValueError("feature vectors disagree on column names")
        return cls(
            values=np.vstack([v.values for v in vectors]),
            labels=np.array([v.label for v in vectors], dtype=object),
            names=names,
            ids=np.array([v.segment_id for v in vectors], dtype=object),
        )

    def to_csv(self, path) -> None:
        """Write ``segment_id,label,<features...>`` in schema column order."""
        df = pd.DataFrame(self.values, columns=self.names)
        df.insert(0, "label", self.labels.astype(str))
        df.insert(0, "segment_id", self.ids.astype(str))
        df.to_csv(path, index=False)

    @classmethod
    def from_csv(cls, path) -> "FeatureMatrix":
        df = pd.read_csv(path)
        for col in ("segment_id", "label"):
            if col not in df.columns:
                raise ValueError(f"feature CSV missing column {col!r}")
        names = [c for c in df.columns if c not in ("segment_id", "label")]
        return cls(
            values=df[names].to_numpy(dtype=float),
            labels=df["label"].astype(str).to_numpy(dtype=object),
            names=names,
            ids=df["segment_id"].astype(str).to_numpy(dtype=object),
        )


@dataclass
class MinMaxParams:
    """Per-column fit minima/maxima; constant columns map to 0."""

    col_min: np.ndarray
    col_max: np.ndarray

    CONST_EPS = 1e-12

    def transform(self, values: np.ndarray) -> np.ndarray:
        span = self.col_max - self.col_min
        out = np.zeros_like(values, dtype=float)
        live = span >= self.CONST_EPS
        out[:, live] = (values[:, live] - self.col_min[live]) / span[live]
        return out


def minmax_scale_columns(matrix: FeatureMatrix, fit_rows=None):
    """Scale each column by (x - min) / (max - min) fit on ``fit_rows``.

    All rows are transformed with the fit-row parameters, so held-out rows
    may fall outside [0, 1]. Returns ``(scaled_matrix, params)``.
    """
    if matrix.n_rows == 0 or matrix.n_cols == 0:
        raise ValueError("cannot scale an empty matrix")
    if fit_rows is None:
        fit_rows = np.arange(matrix.n_rows)
    fit_rows = np.asarray(sorted(fit_rows), dtype=int)
    if fit_rows.size == 0:
        raise ValueError("fit_rows must be non-empty")
    fit = matrix.values[fit_rows]
    params = MinMaxParams(fit.min(axis=0), fit.max(axis=0))
    scaled = FeatureMatrix(params.transform(matrix.values), matrix.labels,
                           list(matrix.names), matrix.ids, matrix.synthetic)
    return scaled, params


def apply_minmax(matrix: FeatureMatrix, params: MinMaxParams) -> FeatureMatrix:
    """Reuse previously fit parameters on new rows."""
    return FeatureMatrix(params.transform(matrix.values), matrix.labels,
                         list(matrix.names), matrix.ids, matrix.synthetic)
