"""The per-channel feature naming schema.

41 features per channel, 82 per window scale over the two magnitude
channels. Names follow ``{feature}_{channel}[_{index}]`` (``dfa_VA_M``,
``cov_IA_M_2``, ``std_VA_M_3``); multi-scale vectors suffix each name with
``__w{size}``.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from ..signal import REQUIRED_CHANNELS

#: Family name -> ordered list of (base, index-or-None) entries.
FAMILIES = {
    "time": [("mean", None), ("var", None), ("skewness", None), ("kurtosis", None),
             ("min", None), ("max", None), ("median", None)],
    "blocks": [("mean", 0), ("mean", 1), ("mean", 2), ("mean", 3),
               ("std", 0), ("std", 1), ("std", 2), ("std", 3)],
    "fft": [("fft", i) for i in range(10)],
    "spectral": [("s_entropy", None), ("s_centroid", None), ("s_bandw", None),
                 ("m_sp_std", None)],
    "information": [("sh_entropy", None), ("p_entropy", None), ("samp_entropy", None),
                    ("w_entropy", None)],
    "energy": [("energy", None), ("rms", None), ("ptp", None)],
    "dynamics": [("dfa", None)],
    "autocov": [("cov", 1), ("cov", 2), ("cov", 3), ("cov", 4)],
}

ALL_FAMILIES = tuple(FAMILIES)


def feature_name(base: str, channel: str, index=None) -> str:
    return f"{base}_{channel}" if index is None else f"{base}_{channel}_{index}"


def scale_suffix(size_s: float) -> str:
    return f"__w{size_s:g}"


@dataclass(frozen=True)
class FeatureSchema:
    """Ordered feature names for one window scale.

    The default composition yields exactly 82 names (41 per channel);
    families may be subset through configuration, which changes the count.
    """

    channels: tuple = REQUIRED_CHANNELS
    families: tuple = ALL_FAMILIES

    def __post_init__(self):
        unknown = [f for f in self.families if f not in FAMILIES]
        if unknown:
            raise ValueError(f"unknown feature families: {unknown}")

    def channel_names(self, channel: str) -> list[str]:
        return [
            feature_name(base, channel, idx)
            for fam in self.families
            for base, idx in FAMILIES[fam]
        ]

    @property
    def names(self) -> list[str]:
        return [n for ch in self.channels for n in self.channel_names(ch)]

    @property
    def size(self) -> int:
        return len(self.names)

    def multiscale_names(self, sizes_s) -> list[str]:
        return [n + scale_suffix(s) for s in sizes_s for n in self.names]

    def to_json(self) -> dict:
        return {
            "channels": list(self.channels),
            "families": {f: [feature_name(b, "{ch}", i) for b, i in FAMILIES[f]]
                         for f in self.families},
            "per_channel": len(self.channel_names(self.channels[0])),
            "total_per_scale": self.size,
        }


DEFAULT_SCHEMA = FeatureSchema()
