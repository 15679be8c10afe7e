"""Self-describing JSON model files with exact float round-trips."""

from __future__ import annotations

import json
from dataclasses import asdict

from ..errors import ModelFormatError
from .forest import ForestParams, RfModel
from .gbdt import GbdtModel, GbdtParams
from .tree import Tree

SCHEMA_VERSION = 1


def serialize(model) -> bytes:
    if isinstance(model, GbdtModel):
        kind = "gbdt"
        extra = {"train_loss": list(model.train_loss)}
    elif isinstance(model, RfModel):
        kind = "random_forest"
        extra = {"tree_seeds": list(model.tree_seeds), "oob_score": model.oob_score}
    else:
        raise TypeError(f"cannot serialize {type(model).__name__}")
    payload = {
        "schema_version": SCHEMA_VERSION,
        "kind": kind,
        "params": asdict(model.params),
        "feature_names": list(model.feature_names),
        "classes": list(model.classes),
        "bin_edges": model.bin_edges,
        "trees": [t.to_json() for t in model.trees],
        "seed": model.seed,
        **extra,
    }
    return json.dumps(payload, sort_keys=True).encode()


def deserialize(blob: bytes):
    try:
        payload = json.loads(blob)
    except (json.JSONDecodeError, UnicodeDecodeError) as exc:
        raise ModelFormatError(f"model payload is not valid JSON: {exc}") from exc
    if not isinstance(payload, dict):
        raise ModelFormatError("model payload must be a JSON object")
    version = payload.get("schema_version")
    if version != SCHEMA_VERSION:
        raise ModelFormatError(f"unsupported schema_version {version!r}")
    try:
        kind = payload["kind"]
        trees = [Tree.from_json(t) for t in payload["trees"]]
        if kind == "gbdt":
            model = GbdtModel(
                params=GbdtParams(**payload["params"]),
                feature_names=payload["feature_names"],
                classes=payload["classes"],
                bin_edges=payload["bin_edges"],
                trees=trees,
                seed=payload["seed"],
                train_loss=payload.get("train_loss", []),
            )
        elif kind == "random_forest":
            model = RfModel(
                params=ForestParams(**payload["params"]),
                feature_names=payload["feature_names"],
                classes=payload["classes"],
                bin_edges=payload["bin_edges"],
                trees=trees,
                tree_seeds=payload["tree_seeds"],
                seed=payload["seed"],
                oob_score=payload.get("oob_score"),
            )
        else:
            raise ModelFormatError(f"unknown model kind {kind!r}")
    except (KeyError, TypeError) as exc:
        raise ModelFormatError(f"malformed model payload: {exc}") from exc
    return model


def save_model(model, path) -> None:
    with open(path, "wb") as fh:
        fh.write(serialize(model))


def load_model(path):
    with open(path, "rb") as fh:
        return deserialize(fh.read())
