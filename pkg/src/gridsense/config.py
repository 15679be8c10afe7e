"""Pipeline configuration: defaults, validation, JSON-pointer violations."""

from __future__ import annotations

import dataclasses
import json
from dataclasses import dataclass

from .learners import LEARNER_KINDS
from .learners.forest import ForestParams
from .learners.gbdt import GbdtParams
from .synth import ScenarioConfig

STRICT_TARGET_K = (10, 15, 20)


@dataclass(frozen=True)
class Violation:
    path: str
    message: str

    def __str__(self):
        return f"{self.path}: {self.message}"


def default_config() -> dict:
    return {
        "paths": {"data": "data", "log": "data/events.csv", "workdir": "."},
        "window": {"sizes_s": [30, 60, 180]},
        "features": {
            "families": None,
            "fft_coeffs": 10,
            "hist_bins": 16,
            "perm_order": 3,
            "perm_delay": 1,
            "sampen_m": 2,
            "sampen_r": 0.2,
            "blocks": 4,
            "dfa_scales": 10,
        },
        "selection": {"method": "rfe", "target_k": 20, "step_frac": 0.1},
        "balance": {"smote_k": 5, "mode": "per-fold"},
        "learner": {"kind": "gbdt_leafwise", "params": {}},
        "eval": {"k": 10, "seed": 7},
        "compat": {"paper_compat": False, "lenient_k": False},
        "scenario": {"seed": 7},
    }


_LEARNER_PARAM_FIELDS = {
    "gbdt_leafwise": {f.name for f in dataclasses.fields(GbdtParams)},
    "gbdt_levelwise": {f.name for f in dataclasses.fields(GbdtParams)},
    "random_forest": {f.name for f in dataclasses.fields(ForestParams)},
}
_SCENARIO_FIELDS = {f.name for f in dataclasses.fields(ScenarioConfig)}

_INT_KEYS = {
    "/features/fft_coeffs", "/features/hist_bins", "/features/perm_order",
    "/features/perm_delay", "/features/sampen_m", "/features/blocks",
    "/features/dfa_scales", "/selection/target_k", "/balance/smote_k",
    "/eval/k", "/eval/seed",
}


def _check_section(cfg, defaults, path, out):
    for key in cfg:
        if key not in defaults:
            out.append(Violation(f"{path}/{key}", "unknown key"))
    for key, val in cfg.items():
        if key not in defaults:
            continue
        sub_path = f"{path}/{key}"
        ref = defaults[key]
        if isinstance(ref, dict) and sub_path not in ("/learner/params", "/scenario"):
            if not isinstance(val, dict):
                out.append(Violation(sub_path, "must be an object"))
            else:
                _check_section(val, ref, sub_path, out)
        elif sub_path in _INT_KEYS:
            if not isinstance(val, int) or isinstance(val, bool):
                out.append(Violation(sub_path, "must be an integer"))


def validate_config(config: dict, lenient: bool | None = None) -> list:
    """All invariant checks; returns a list of :class:`Violation` (empty = ok)."""
    out: list[Violation] = []
    if not isinstance(config, dict):
        return [Violation("", "configuration must be a JSON object")]
    defaults = default_config()
    _check_section(config, defaults, "", out)

    merged = _deep_merge(defaults, config)
    if lenient is None:
        lenient = bool(merged["compat"].get("lenient_k"))

    sizes = merged["window"]["sizes_s"]
    if (not isinstance(sizes, list) or not sizes
            or any(not isinstance(s, (int, float)) or s <= 0 for s in sizes)):
        out.append(Violation("/window/sizes_s", "must be a non-empty list of positive numbers"))
    elif sorted(set(sizes)) != list(sizes):
        out.append(Violation("/window/sizes_s", "must be ascending and unique"))

    method = merged["selection"]["method"]
    if method != "rfe":
        out.append(Violation("/selection/method", f"unknown method {method!r}"))
    target_k = merged["selection"]["target_k"]
    if isinstance(target_k, int) and target_k < 1:
        out.append(Violation("/selection/target_k", "must be >= 1"))
    elif isinstance(target_k, int) and not lenient and target_k not in STRICT_TARGET_K:
        out.append(Violation(
            "/selection/target_k",
            f"must be one of {list(STRICT_TARGET_K)} in strict mode (got {target_k})",
        ))

    mode = merged["balance"]["mode"]
    if mode not in ("per-fold", "global"):
        out.append(Violation("/balance/mode", f"must be 'per-fold' or 'global' (got {mode!r})"))

    kind = merged["learner"]["kind"]
    if kind not in LEARNER_KINDS:
        out.append(Violation("/learner/kind", f"must be one of {list(LEARNER_KINDS)}"))
    else:
        params = merged["learner"].get("params") or {}
        if not isinstance(params, dict):
            out.append(Violation("/learner/params", "must be an object"))
        else:
            for key in params:
                if key not in _LEARNER_PARAM_FIELDS[kind]:
                    out.append(Violation(f"/learner/params/{key}", "unknown learner parameter"))

    k = merged["eval"]["k"]
    if isinstance(k, int) and k < 2:
        out.append(Violation("/eval/k", "must be >= 2"))

    scenario = merged.get("scenario") or {}
    if not isinstance(scenario, dict):
        out.append(Violation("/scenario", "must be an object"))
    else:
        for key in scenario:
            if key not in _SCENARIO_FIELDS:
                out.append(Violation(f"/scenario/{key}", "unknown scenario parameter"))

    families = merged["features"]["families"]
    if families is not None:
        from .features.schema import FAMILIES

        if not isinstance(families, list):
            out.append(Violation("/features/families", "must be a list or null"))
        else:
            for fam in families:
                if fam not in FAMILIES:
                    out.append(Violation("/features/families", f"unknown family {fam!r}"))
    return out


def _deep_merge(base: dict, override: dict) -> dict:
    out = {}
    for key, val in base.items():
        if key in override:
            o = override[key]
            out[key] = _deep_merge(val, o) if isinstance(val, dict) and isinstance(o, dict) else o
        else:
            out[key] = val
    for key, val in override.items():
        if key not in base:
            out[key] = val
    return out


def load_config(path, overrides: dict | None = None) -> dict:
    """Read, merge over defaults, and validate; raises on violations."""
    from .errors import ConfigError

    if path is None:
        cfg = {}
    else:
        try:
            with open(path) as fh:
                cfg = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"syntax: {path} is not valid JSON ({exc})") from exc
    if overrides:
        cfg = _deep_merge(cfg, overrides)
    violations = validate_config(cfg)
    if violations:
        raise ConfigError("; ".join(str(v) for v in violations))
    return _deep_merge(default_config(), cfg)
