"""Raw-signal domain types, CSV ingestion, segmentation, and window slicing.

Channels are uniformly sampled magnitude series (voltage ``VA_M``, current
``IA_M``) at a nominal 30 Hz. Segmentation walks a disturbance log and cuts
trailing-aligned slices at fixed offsets before/after each event; windows of
30/60/180 s are then taken as nested suffixes of each segment.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from datetime import datetime, timezone
from enum import Enum

import numpy as np
import pandas as pd

from .errors import IngestError, SchemaError

VOLTAGE_CHANNEL = "VA_M"
CURRENT_CHANNEL = "IA_M"
REQUIRED_CHANNELS = (VOLTAGE_CHANNEL, CURRENT_CHANNEL)

#: Minutes before an event at which normal-state segments are anchored.
NORMAL_OFFSETS_MIN = (50, 40, 30, 20, 10)


class ClassLabel(str, Enum):
    """Operational state of a segment."""

    NOR = "Nor"
    PRE = "Pre"
    POST = "Post"


class Origin(str, Enum):
    """Where in the event timeline a segment was cut from."""

    N50 = "N50"
    N40 = "N40"
    N30 = "N30"
    N20 = "N20"
    N10 = "N10"
    PRE = "PRE"
    POST = "POST"

    @property
    def class_label(self) -> ClassLabel:
        if self is Origin.PRE:
            return ClassLabel.PRE
        if self is Origin.POST:
            return ClassLabel.POST
        return ClassLabel.NOR


@dataclass(frozen=True)
class SegmentLabel:
    clazz: ClassLabel
    origin: Origin

    def __post_init__(self):
        if self.origin.class_label is not self.clazz:
            raise ValueError(
                f"origin {self.origin.value} maps to {self.origin.class_label.value}, "
                f"not {self.clazz.value}"
            )

    @classmethod
    def from_origin(cls, origin: Origin) -> "SegmentLabel":
        return cls(origin.class_label, origin)


@dataclass
class PmuChannel:
    """A uniformly sampled scalar series with rate metadata.

    ``t0`` is the epoch timestamp (UTC seconds) of the first sample; sample
    ``i`` sits at ``t0 + i / rate_hz``.
    """

    terminal_id: str
    channel_name: str
    rate_hz: float
    t0: float
    samples: np.ndarray

    def __post_init__(self):
        self.samples = np.asarray(self.samples, dtype=float)
        if self.samples.size == 0:
            raise ValueError("channel has no samples")
        if not self.rate_hz > 0:
            raise ValueError("rate_hz must be positive")
        if not np.all(np.isfinite(self.samples)):
            raise ValueError("channel samples must be finite")

    @property
    def duration_s(self) -> float:
        return (self.samples.size - 1) / self.rate_hz

    def index_at(self, t: float) -> int:
        """Nearest sample index for epoch time ``t``."""
        return int(round((t - self.t0) * self.rate_hz))


@dataclass
class DisturbanceLog:
    """Ordered disturbance timestamps (epoch seconds, strictly increasing)."""

    events: np.ndarray

    def __post_init__(self):
        self.events = np.asarray(self.events, dtype=float)
        if self.events.size and np.any(np.diff(self.events) <= 0):
            raise ValueError("disturbance events must be strictly increasing")

    def __len__(self):
        return int(self.events.size)


@dataclass
class Segment:
    """A labeled slice of both channels of one terminal.

    Both channel slices are aligned and of equal length; ``start``/``end``
    are epoch seconds of the covered span.
    """

    terminal_id: str
    label: SegmentLabel
    channels: dict[str, np.ndarray]
    start: float
    end: float
    event_index: int
    rate_hz: float

    def __post_init__(self):
        missing = [c for c in REQUIRED_CHANNELS if c not in self.channels]
        if missing:
            raise ValueError(f"segment missing channels: {missing}")
        lengths = {len(v) for v in self.channels.values()}
        if len(lengths) != 1:
            raise ValueError(f"channel slices have unequal lengths: {lengths}")

    @property
    def n_samples(self) -> int:
        return len(self.channels[VOLTAGE_CHANNEL])

    @property
    def segment_id(self) -> str:
        return f"{self.terminal_id}-e{self.event_index}-{self.label.origin.value}"


@dataclass(frozen=True)
class WindowSpec:
    """Trailing-aligned analysis windows, smallest to largest."""

    sizes_s: tuple = (30.0, 60.0, 180.0)
    alignment: str = "trailing"

    def __post_init__(self):
        sizes = tuple(float(s) for s in self.sizes_s)
        if sizes != tuple(sorted(set(sizes))):
            raise ValueError("window sizes must be ascending and unique")
        if self.alignment != "trailing":
            raise ValueError("only trailing alignment is supported")
        object.__setattr__(self, "sizes_s", sizes)

    def lengths(self, rate_hz: float) -> dict[float, int]:
        """Sample count per window size; each must be an integer >= 64."""
        out = {}
        for s in self.sizes_s:
            n = s * rate_hz
            if abs(n - round(n)) > 1e-9:
                raise ValueError(f"window {s}s x {rate_hz}Hz is not an integer sample count")
            n = int(round(n))
            if n < 64:
                raise ValueError(f"window {s}s holds {n} samples; at least 64 required")
            out[s] = n
        return out


DEFAULT_SCHEMA = {
    "timestamp": "timestamp",
    "terminal": "terminal",
    "channel": "channel",
    "value": "value",
}


def _parse_times(series: pd.Series) -> np.ndarray:
    try:
        ts = pd.to_datetime(series, utc=True, format="ISO8601")
    except (ValueError, TypeError) as exc:
        raise IngestError(f"unparseable timestamp: {exc}") from exc
    return ts.astype("int64").to_numpy() / 1e9


def epoch_to_iso(t: float) -> str:
    """Epoch seconds to an RFC 3339 string (UTC, microsecond resolution)."""
    dt = datetime.fromtimestamp(round(t * 1e6) / 1e6, tz=timezone.utc)
    return dt.strftime("%Y-%m-%dT%H:%M:%S.%f") + "Z"


def ingest_csv(path, schema: dict | None = None) -> list[PmuChannel]:
    """Read a ``timestamp,terminal,channel,value`` CSV into PMU channels.

    One channel is produced per (terminal, channel) pair, sorted by that key.
    The sample rate is inferred from the covered span. Gaps wider than twice
    the sample period are reported as warnings, not errors.

    Raises SchemaError when a mapped column is absent, IngestError on NaN
    values (with row number) or non-monotonic timestamps within a channel.
    """
    schema = dict(DEFAULT_SCHEMA, **(schema or {}))
    df = pd.read_csv(path)
    for canonical in ("timestamp", "terminal", "channel", "value"):
        col = schema[canonical]
        if col not in df.columns:
            raise SchemaError(f"missing column {canonical!r} (mapped to {col!r}) in {path}")

    values = pd.to_numeric(df[schema["value"]], errors="coerce").to_numpy(dtype=float)
    bad = np.flatnonzero(~np.isfinite(values))
    if bad.size:
        # +2: header line plus 1-based numbering
        raise IngestError(f"non-finite value at row {int(bad[0]) + 2} of {path}")

    times = _parse_times(df[schema["timestamp"]])
    terminals = df[schema["terminal"]].astype(str).to_numpy()
    names = df[schema["channel"]].astype(str).to_numpy()

    channels = []
    keys = sorted(set(zip(terminals, names)))
    for terminal, name in keys:
        mask = (terminals == terminal) & (names == name)
        t = times[mask]
        v = values[mask]
        if t.size > 1:
            dt = np.diff(t)
            if np.any(dt <= 0):
                raise IngestError(
                    f"non-monotonic timestamps in channel {terminal}/{name} of {path}"
                )
            rate = round((t.size - 1) / (t[-1] - t[0]), 3)
            gaps = np.flatnonzero(dt > 2.0 / rate)
            if gaps.size:
                warnings.warn(
                    f"{terminal}/{name}: {gaps.size} gap(s) wider than 2/rate "
                    f"(first at t={t[gaps[0]]:.3f})",
                    stacklevel=2,
                )
        else:
            rate = 30.0
        channels.append(PmuChannel(terminal, name, float(rate), float(t[0]), v))
    return channels


def read_disturbance_log(path) -> DisturbanceLog:
    """Read an ``event_time`` CSV of RFC 3339 timestamps."""
    df = pd.read_csv(path)
    if "event_time" not in df.columns:
        raise SchemaError(f"missing column 'event_time' in {path}")
    return DisturbanceLog(_parse_times(df["event_time"]))


def _channel_map(channels) -> dict[str, dict[str, PmuChannel]]:
    by_terminal: dict[str, dict[str, PmuChannel]] = {}
    for ch in channels:
        by_terminal.setdefault(ch.terminal_id, {})[ch.channel_name] = ch
    return by_terminal


def segment_by_events(
    channels,
    log: DisturbanceLog,
    seg_len_s: float = 180.0,
    offsets_min=NORMAL_OFFSETS_MIN,
) -> list[Segment]:
    """Cut labeled segments around each disturbance event.

    Per event and terminal: one normal segment ending at each
    ``event - offset`` (N50..N10), one Pre segment ending at the event, one
    Post segment starting at the event. Segments not fully covered by the
    data are skipped with a warning.
    """
    if len(log) == 0:
        raise ValueError("disturbance log is empty")
    by_terminal = _channel_map(channels)
    segments = []
    for terminal in sorted(by_terminal):
        chans = by_terminal[terminal]
        if any(c not in chans for c in REQUIRED_CHANNELS):
            warnings.warn(f"terminal {terminal} lacks both channels; skipped", stacklevel=2)
            continue
        va = chans[VOLTAGE_CHANNEL]
        ia = chans[CURRENT_CHANNEL]
        rate = va.rate_hz
        n_len = seg_len_s * rate
        if abs(n_len - round(n_len)) > 1e-9:
            raise ValueError("seg_len_s x rate_hz must be an integer sample count")
        n_len = int(round(n_len))
        n_total = min(va.samples.size, ia.samples.size)

        for ev_idx, t_event in enumerate(log.events):
            plan = [(Origin[f"N{m}"], t_event - m * 60.0, "trailing") for m in offsets_min]
            plan.append((Origin.PRE, t_event, "trailing"))
            plan.append((Origin.POST, t_event, "leading"))
            for origin, t_anchor, side in plan:
                anchor = va.index_at(t_anchor)
                if side == "trailing":
                    lo, hi = anchor - n_len, anchor
                else:
                    lo, hi = anchor, anchor + n_len
                if lo < 0 or hi > n_total:
                    warnings.warn(
                        f"{terminal} event {ev_idx}: {origin.value} segment outside "
                        f"data coverage; skipped",
                        stacklevel=2,
                    )
                    continue
                segments.append(
                    Segment(
                        terminal_id=terminal,
                        label=SegmentLabel.from_origin(origin),
                        channels={
                            VOLTAGE_CHANNEL: va.samples[lo:hi],
                            CURRENT_CHANNEL: ia.samples[lo:hi],
                        },
                        start=va.t0 + lo / rate,
                        end=va.t0 + hi / rate,
                        event_index=ev_idx,
                        rate_hz=rate,
                    )
                )
    return segments


def reject_outlier_segments(segments, k: float = 3.0):
    """Drop segments whose per-channel RMS is extreme for the population.

    For each channel the RMS of every segment forms a population; a segment
    is dropped when any of its channel RMS values reaches
    ``mean + k * std`` of that population (population std; values exactly at
    the threshold are rejected, but a zero-spread population keeps all).

    Returns ``(kept, dropped)`` where each dropped entry is
    ``(segment, reason)``; input order is preserved in both lists.
    """
    segments = list(segments)
    if len(segments) < 2:
        raise ValueError("need at least 2 segments for population statistics")
    if not k > 0:
        raise ValueError("k must be positive")

    rms = {
        ch: np.array([np.sqrt(np.mean(s.channels[ch] ** 2)) for s in segments])
        for ch in REQUIRED_CHANNELS
    }
    kept, dropped = [], []
    for i, seg in enumerate(segments):
        reason = None
        for ch in REQUIRED_CHANNELS:
            mean = rms[ch].mean()
            std = rms[ch].std()
            if std <= 0.0:
                continue
            thr = mean + k * std
            if rms[ch][i] >= thr - 1e-9 * max(1.0, abs(thr)):
                reason = f"{ch} rms {rms[ch][i]:.6g} at or above mean+{k:g}*std ({thr:.6g})"
                break
        if reason is None:
            kept.append(seg)
        else:
            dropped.append((seg, reason))
    return kept, dropped


def dropped_report(dropped) -> list[dict]:
    """JSON-ready report rows for dropped segments."""
    return [
        {"terminal": seg.terminal_id, "start": epoch_to_iso(seg.start), "reason": reason}
        for seg, reason in dropped
    ]


def slice_windows(segment: Segment, spec: WindowSpec, rate_hz: float | None = None):
    """Trailing-aligned windows per size per channel.

    Returns ``{size_s: {channel: view}}``; smaller windows are suffixes of
    larger ones (views into the same arrays).
    """
    rate = segment.rate_hz if rate_hz is None else rate_hz
    lengths = spec.lengths(rate)
    n_max = max(lengths.values())
    if segment.n_samples < n_max:
        raise ValueError(
            f"segment has {segment.n_samples} samples; largest window needs {n_max} "
            f"({n_max - segment.n_samples} short)"
        )
    return {
        size: {ch: arr[len(arr) - n:] for ch, arr in segment.channels.items()}
        for size, n in lengths.items()
    }
