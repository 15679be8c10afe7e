"""Stage orchestration: artifacts, locking, and the synth-to-report chain.

Each stage reads its declared upstream artifacts from the workdir and
writes its own atomically (write-temp-rename), so reruns are restartable
and never leave partial files. One stage runs per workdir at a time,
enforced by a lockfile.
"""

from __future__ import annotations

import json
import os
from contextlib import contextmanager
from pathlib import Path

import numpy as np
import pandas as pd

from .balance import smote
from .config import default_config
from .errors import StageError
from .evaluation import cross_validate, holdout_validate
from .features.extract import ExtractorParams, extract_multiscale
from .features.schema import ALL_FAMILIES, FeatureSchema
from .learners import fit_learner, save_model
from .matrix import FeatureMatrix, minmax_scale_columns
from .report_svg import render_report_svg
from .selection import SelectionResult, rfe
from .signal import (
    CURRENT_CHANNEL,
    VOLTAGE_CHANNEL,
    ClassLabel,
    DisturbanceLog,
    Origin,
    Segment,
    SegmentLabel,
    WindowSpec,
    dropped_report,
    epoch_to_iso,
    ingest_csv,
    read_disturbance_log,
    reject_outlier_segments,
    segment_by_events,
)
from .synth import ScenarioConfig, generate

STAGES = ("synth", "ingest", "extract", "select", "train", "evaluate",
          "compare-scales", "report")

ARTIFACTS = {
    "channels": "data/channels.csv",
    "events": "data/events.csv",
    "truth": "truth.json",
    "segments": "segments.npz",
    "dropped": "dropped_segments.json",
    "features": "features.csv",
    "selection": "selection.json",
    "model": "model.json",
    "scaling": "scaling.json",
    "report": "report.json",
    "svg": "report.svg",
    "comparison": "comparison.json",
}


@contextmanager
def workdir_lock(workdir: Path):
    lock = Path(workdir) / ".gridsense.lock"
    try:
        fd = os.open(lock, os.O_CREAT | os.O_EXCL | os.O_WRONLY)
    except FileExistsError:
        raise StageError(f"workdir is locked by another stage ({lock})") from None
    try:
        os.write(fd, str(os.getpid()).encode())
        os.close(fd)
        yield
    finally:
        lock.unlink(missing_ok=True)


def atomic_write_text(path: Path, text: str):
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    tmp = path.parent / f".tmp-{path.name}"
    tmp.write_text(text)
    os.replace(tmp, path)


def write_json(path: Path, payload: dict):
    atomic_write_text(path, json.dumps(payload, indent=2, sort_keys=True))


def _require(workdir: Path, *names) -> list:
    paths = []
    for name in names:
        p = Path(workdir) / ARTIFACTS[name]
        if not p.exists():
            raise StageError(f"missing upstream artifact: {p}", missing_path=str(p))
        paths.append(p)
    return paths


def _timestamps_iso(t0: float, n: int, rate: float) -> np.ndarray:
    micros = np.round(t0 * 1e6).astype(np.int64) + np.round(np.arange(n) * 1e6 / rate).astype(np.int64)
    stamps = np.datetime_as_string(micros.astype("datetime64[us]"), unit="us")
    return np.char.add(stamps, "Z")


def stage_synth(config: dict, workdir: Path) -> dict:
    scenario = ScenarioConfig.from_json(config["scenario"])
    channels, log, truth = generate(scenario)

    frames = []
    for ch in channels:
        frames.append(pd.DataFrame({
            "timestamp": _timestamps_iso(ch.t0, ch.samples.size, ch.rate_hz),
            "terminal": ch.terminal_id,
            "channel": ch.channel_name,
            "value": ch.samples,
        }))
    df = pd.concat(frames, ignore_index=True)

    data_path = Path(workdir) / ARTIFACTS["channels"]
    data_path.parent.mkdir(parents=True, exist_ok=True)
    tmp = data_path.parent / f".tmp-{data_path.name}"
    df.to_csv(tmp, index=False)
    os.replace(tmp, data_path)

    events = pd.DataFrame({"event_time": [epoch_to_iso(t) for t in log.events]})
    ev_path = Path(workdir) / ARTIFACTS["events"]
    tmp = ev_path.parent / f".tmp-{ev_path.name}"
    events.to_csv(tmp, index=False)
    os.replace(tmp, ev_path)

    write_json(Path(workdir) / ARTIFACTS["truth"],
               {"scenario": scenario.to_json(), "segments": truth})
    return {"channels": str(data_path), "events": str(ev_path),
            "n_events": len(log), "n_samples": int(channels[0].samples.size)}


def stage_ingest(config: dict, workdir: Path) -> dict:
    data_path, ev_path = _require(workdir, "channels", "events")
    channels = ingest_csv(data_path)
    log = read_disturbance_log(ev_path)
    segments = segment_by_events(channels, log)
    kept, dropped = reject_outlier_segments(segments) if len(segments) >= 2 else (segments, [])

    out = Path(workdir) / ARTIFACTS["segments"]
    out.parent.mkdir(parents=True, exist_ok=True)
    tmp = out.parent / f".tmp-{out.name}"
    np.savez_compressed(
        tmp,
        va=np.stack([s.channels[VOLTAGE_CHANNEL] for s in kept]),
        ia=np.stack([s.channels[CURRENT_CHANNEL] for s in kept]),
        label=np.array([s.label.clazz.value for s in kept]),
        origin=np.array([s.label.origin.value for s in kept]),
        event_index=np.array([s.event_index for s in kept]),
        start=np.array([s.start for s in kept]),
        end=np.array([s.end for s in kept]),
        terminal=np.array([s.terminal_id for s in kept]),
        rate_hz=np.array(kept[0].rate_hz if kept else 30.0),
    )
    os.replace(tmp, out)  # tmp already carries the .npz suffix
    write_json(Path(workdir) / ARTIFACTS["dropped"], dropped_report(dropped))
    return {"segments": len(kept), "dropped": len(dropped)}


def load_segments(path) -> list:
    data = np.load(path, allow_pickle=False)
    rate = float(data["rate_hz"])
    segments = []
    for i in range(data["va"].shape[0]):
        label = SegmentLabel(ClassLabel(str(data["label"][i])), Origin(str(data["origin"][i])))
        segments.append(Segment(
            terminal_id=str(data["terminal"][i]),
            label=label,
            channels={VOLTAGE_CHANNEL: data["va"][i], CURRENT_CHANNEL: data["ia"][i]},
            start=float(data["start"][i]),
            end=float(data["end"][i]),
            event_index=int(data["event_index"][i]),
            rate_hz=rate,
        ))
    return segments


def _extractor_params(config: dict) -> ExtractorParams:
    f = config["features"]
    return ExtractorParams(
        n_fft=f["fft_coeffs"], hist_bins=f["hist_bins"], perm_order=f["perm_order"],
        perm_delay=f["perm_delay"], sampen_m=f["sampen_m"], sampen_r=f["sampen_r"],
        n_blocks=f["blocks"], dfa_n_scales=f["dfa_scales"],
    )


def _schema(config: dict) -> FeatureSchema:
    families = config["features"]["families"]
    return FeatureSchema(families=tuple(families) if families else ALL_FAMILIES)


def extract_matrix(segments, config: dict, threads: int = 1) -> FeatureMatrix:
    spec = WindowSpec(sizes_s=tuple(float(s) for s in config["window"]["sizes_s"]))
    schema = _schema(config)
    params = _extractor_params(config)

    def one(seg):
        return extract_multiscale(seg, spec, schema=schema, params=params)

    if threads > 1:
        from concurrent.futures import ThreadPoolExecutor

        with ThreadPoolExecutor(max_workers=threads) as pool:
            vectors = list(pool.map(one, segments))
    else:
        vectors = [one(seg) for seg in segments]
    return FeatureMatrix.from_vectors(vectors)


def stage_extract(config: dict, workdir: Path, threads: int = 1) -> dict:
    (seg_path,) = _require(workdir, "segments")
    segments = load_segments(seg_path)
    matrix = extract_matrix(segments, config, threads)

    out = Path(workdir) / ARTIFACTS["features"]
    tmp = out.parent / f".tmp-{out.name}"
    matrix.to_csv(tmp)
    os.replace(tmp, out)
    return {"rows": matrix.n_rows, "columns": matrix.n_cols}


def stage_select(config: dict, workdir: Path) -> dict:
    (feat_path,) = _require(workdir, "features")
    matrix = FeatureMatrix.from_csv(feat_path)
    scaled, _ = minmax_scale_columns(matrix)
    result = rfe(
        scaled,
        config["learner"],
        target_k=config["selection"]["target_k"],
        step_frac=config["selection"]["step_frac"],
        seed=config["eval"]["seed"],
    )
    sel_path = Path(workdir) / ARTIFACTS["selection"]
    payload = result.to_json()
    write_json(sel_path, payload)
    return {"selected": len(result.selected)}


def stage_train(config: dict, workdir: Path) -> dict:
    feat_path, sel_path = _require(workdir, "features", "selection")
    matrix = FeatureMatrix.from_csv(feat_path)
    selection = SelectionResult.load(sel_path)
    matrix = matrix.select_columns(selection.ranked())
    seed = config["eval"]["seed"]

    scaled, params = minmax_scale_columns(matrix)
    balanced = smote(scaled, k=config["balance"]["smote_k"], seed=seed)
    model = fit_learner(balanced, config["learner"], seed=seed)

    model_path = Path(workdir) / ARTIFACTS["model"]
    tmp = model_path.parent / f".tmp-{model_path.name}"
    save_model(model, tmp)
    os.replace(tmp, model_path)
    write_json(Path(workdir) / ARTIFACTS["scaling"], {
        "col_min": params.col_min.tolist(),
        "col_max": params.col_max.tolist(),
        "columns": list(matrix.names),
    })
    return {"trees": len(model.trees)}


def _eval_config(config: dict) -> dict:
    paper_compat = config["compat"]["paper_compat"]
    mode = "global" if paper_compat else config["balance"]["mode"]
    return {
        "learner": config["learner"],
        "balance": {"enabled": True, "smote_k": config["balance"]["smote_k"], "mode": mode},
        "scaling": {"enabled": True},
        "eval": {"k": config["eval"]["k"]},
        "pipeline": config,
    }


def stage_evaluate(config: dict, workdir: Path, holdout: float | None = None) -> dict:
    feat_path, sel_path = _require(workdir, "features", "selection")
    matrix = FeatureMatrix.from_csv(feat_path)
    selection = SelectionResult.load(sel_path)
    matrix = matrix.select_columns(selection.ranked())
    seed = config["eval"]["seed"]

    if holdout:
        report = holdout_validate(matrix, _eval_config(config), seed=seed, test_frac=holdout)
    else:
        report = cross_validate(matrix, _eval_config(config), seed=seed)
    write_json(Path(workdir) / ARTIFACTS["report"], report.to_json())
    return {"folds": len(report.folds), "mean": report.mean}


def stage_report(config: dict, workdir: Path) -> dict:
    rep_path, sel_path = _require(workdir, "report", "selection")
    with open(rep_path) as fh:
        report = json.load(fh)
    selection = SelectionResult.load(sel_path)
    k = min(20, len(selection.selected))
    bars = [(n, selection.scores[n]) for n in selection.ranked()[:k]]
    svg = render_report_svg(
        report["confusion"]["row_normalized"], report["classes"], bars
    )
    atomic_write_text(Path(workdir) / ARTIFACTS["svg"], svg)
    return {"svg": str(Path(workdir) / ARTIFACTS["svg"])}


def scale_cases(sizes_s) -> dict:
    """The per-scale column filters compared by compare-scales."""
    cases = {f"{s:g}": [f"__w{s:g}"] for s in sizes_s}
    cases["multi"] = [f"__w{s:g}" for s in sizes_s]
    return cases


def compare_scales(matrix: FeatureMatrix, config: dict, seed: int) -> dict:
    """Evaluate each single scale and the combined set under identical seeds."""
    sizes = [float(s) for s in config["window"]["sizes_s"]]
    out = {"seed": seed, "cases": {}}
    for case, suffixes in scale_cases(sizes).items():
        cols = [n for n in matrix.names if any(n.endswith(sfx) for sfx in suffixes)]
        sub = matrix.select_columns(cols)
        scaled, _ = minmax_scale_columns(sub)
        selection = rfe(scaled, config["learner"],
                        target_k=min(config["selection"]["target_k"], sub.n_cols),
                        step_frac=config["selection"]["step_frac"], seed=seed)
        chosen = sub.select_columns(selection.ranked())
        report = cross_validate(chosen, _eval_config(config), seed=seed)
        out["cases"][case] = {
            "selected": selection.ranked(),
            "mean": report.mean,
            "std": report.std,
            "confusion": report.to_json()["confusion"],
            "seed": seed,
        }
    out["seeds_identical"] = len({c["seed"] for c in out["cases"].values()}) == 1
    return out


def stage_compare_scales(config: dict, workdir: Path) -> dict:
    (feat_path,) = _require(workdir, "features")
    matrix = FeatureMatrix.from_csv(feat_path)
    result = compare_scales(matrix, config, seed=config["eval"]["seed"])
    write_json(Path(workdir) / ARTIFACTS["comparison"], result)
    return {"cases": list(result["cases"])}


def run_stage(stage: str, config: dict, workdir, threads: int = 1,
              holdout: float | None = None) -> dict:
    """Dispatch one named stage inside the workdir lock."""
    workdir = Path(workdir)
    workdir.mkdir(parents=True, exist_ok=True)
    if stage not in STAGES:
        raise ValueError(f"unknown stage {stage!r}; expected one of {STAGES}")
    with workdir_lock(workdir):
        if stage == "synth":
            return stage_synth(config, workdir)
        if stage == "ingest":
            return stage_ingest(config, workdir)
        if stage == "extract":
            return stage_extract(config, workdir, threads)
        if stage == "select":
            return stage_select(config, workdir)
        if stage == "train":
            return stage_train(config, workdir)
        if stage == "evaluate":
            return stage_evaluate(config, workdir, holdout)
        if stage == "compare-scales":
            return stage_compare_scales(config, workdir)
        return stage_report(config, workdir)
