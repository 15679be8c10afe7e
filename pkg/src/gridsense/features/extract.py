"""Assembles per-segment feature vectors across window scales."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..errors import FeatureError
from ..signal import Segment, WindowSpec, slice_windows
from . import extractors as ex
from .schema import DEFAULT_SCHEMA, FAMILIES, FeatureSchema, feature_name, scale_suffix


@dataclass(frozen=True)
class ExtractorParams:
    """Knobs for the individual extractors; defaults match the schema."""

    n_fft: int = 10
    hist_bins: int = 16
    perm_order: int = 3
    perm_delay: int = 1
    sampen_m: int = 2
    sampen_r: float = 0.2
    n_blocks: int = 4
    dfa_n_scales: int = 10
    autocov_lags: tuple = (1, 2, 3, 4)


@dataclass
class FeatureVector:
    """Named finite features for one segment at one or more scales."""

    names: list
    values: np.ndarray
    scales_s: tuple
    terminal_id: str
    label: str
    origin: str
    event_index: int

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=float)
        if len(self.names) != self.values.size:
            raise ValueError("names and values length mismatch")
        if not np.all(np.isfinite(self.values)):
            bad = [n for n, v in zip(self.names, self.values) if not np.isfinite(v)]
            raise FeatureError(f"non-finite feature values: {bad[:5]}")

    def as_dict(self) -> dict:
        return dict(zip(self.names, self.values.tolist()))

    @property
    def segment_id(self) -> str:
        return f"{self.terminal_id}-e{self.event_index}-{self.origin}"


def _channel_features(window, rate_hz, families, params: ExtractorParams) -> dict:
    out = {}
    for fam in families:
        if fam == "time":
            out.update(ex.stats_basic(window))
        elif fam == "blocks":
            out.update(ex.stats_blocks(window, params.n_blocks))
        elif fam == "fft":
            out.update(ex.fft_coeffs(window, params.n_fft))
        elif fam == "spectral":
            out.update(ex.spectral_shape(window, rate_hz))
        elif fam == "information":
            out["sh_entropy"] = ex.shannon_entropy(window, params.hist_bins)
            out["p_entropy"] = ex.permutation_entropy(window, params.perm_order,
                                                      params.perm_delay)
            out["samp_entropy"] = ex.sample_entropy(window, params.sampen_m,
                                                    params.sampen_r)
            out["w_entropy"] = ex.wavelet_entropy(window)
        elif fam == "energy":
            out.update(ex.energy_features(window))
        elif fam == "dynamics":
            out["dfa"] = ex.dfa_exponent(window, params.dfa_n_scales)
        elif fam == "autocov":
            out.update(ex.autocov(window, params.autocov_lags))
    return out


def extract_single_scale(
    segment: Segment,
    size_s: float,
    rate_hz: float | None = None,
    schema: FeatureSchema = DEFAULT_SCHEMA,
    params: ExtractorParams = ExtractorParams(),
) -> FeatureVector:
    """All schema features of both channels over one trailing window."""
    rate = segment.rate_hz if rate_hz is None else rate_hz
    windows = slice_windows(segment, WindowSpec(sizes_s=(float(size_s),)), rate)[float(size_s)]
    names, values = [], []
    for ch in schema.channels:
        try:
            feats = _channel_features(windows[ch], rate, schema.families, params)
        except ValueError as exc:
            raise FeatureError(f"channel {ch}, scale {size_s:g}s: {exc}") from exc
        for fam in schema.families:
            for base, idx in FAMILIES[fam]:
                key = base if idx is None else f"{base}_{idx}"
                names.append(feature_name(base, ch, idx))
                values.append(feats[key])
    return FeatureVector(
        names=names,
        values=np.asarray(values),
        scales_s=(float(size_s),),
        terminal_id=segment.terminal_id,
        label=segment.label.clazz.value,
        origin=segment.label.origin.value,
        event_index=segment.event_index,
    )


def extract_multiscale(
    segment: Segment,
    spec: WindowSpec,
    rate_hz: float | None = None,
    schema: FeatureSchema = DEFAULT_SCHEMA,
    params: ExtractorParams = ExtractorParams(),
) -> FeatureVector:
    """Concatenated single-scale vectors with ``__w{size}`` name suffixes."""
    names, values = [], []
    for size in spec.sizes_s:
        single = extract_single_scale(segment, size, rate_hz, schema, params)
        names.extend(n + scale_suffix(size) for n in single.names)
        values.append(single.values)
    return FeatureVector(
        names=names,
        values=np.concatenate(values),
        scales_s=spec.sizes_s,
        terminal_id=segment.terminal_id,
        label=segment.label.clazz.value,
        origin=segment.label.origin.value,
        event_index=segment.event_index,
    )
