"""Per-window feature extractors.

Every extractor is a pure function of the window (plus fixed parameters),
returns finite floats, and applies an explicit degenerate-input convention
(constant windows yield zero entropies, zero skew/kurtosis, zero
autocorrelation) so downstream vectors never contain NaN.
"""

from __future__ import annotations

import math

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view
from scipy.spatial import cKDTree

_VAR_EPS = 1e-12
_POWER_EPS = 1e-24


def _as_window(x, min_len: int, what: str) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    if x.ndim != 1:
        raise ValueError(f"{what}: window must be 1-D")
    if x.size < min_len:
        raise ValueError(f"{what}: window length {x.size} < required {min_len}")
    return x


def stats_basic(window) -> dict:
    """Population moments plus order statistics.

    Central moments use the 1/N convention; skewness is m3/m2^1.5 and
    kurtosis is excess (m4/m2^2 - 3). Windows with variance below 1e-12
    report zero skewness and kurtosis.
    """
    x = _as_window(window, 4, "stats_basic")
    mean = x.mean()
    d = x - mean
    m2 = np.mean(d**2)
    if m2 < _VAR_EPS:
        skew = kurt = 0.0
    else:
        skew = np.mean(d**3) / m2**1.5
        kurt = np.mean(d**4) / m2**2 - 3.0
    return {
        "mean": float(mean),
        "var": float(m2),
        "skewness": float(skew),
        "kurtosis": float(kurt),
        "min": float(x.min()),
        "max": float(x.max()),
        "median": float(np.median(x)),
    }


def stats_blocks(window, n_blocks: int = 4) -> dict:
    """Population mean/std over contiguous equal blocks, earliest first.

    The window is split into ``n_blocks`` blocks of ``len // n_blocks``
    samples; any remainder is appended to the last block.
    """
    x = _as_window(window, n_blocks, "stats_blocks")
    base = x.size // n_blocks
    out = {}
    for i in range(n_blocks):
        lo = i * base
        hi = (i + 1) * base if i < n_blocks - 1 else x.size
        block = x[lo:hi]
        out[f"mean_{i}"] = float(block.mean())
        out[f"std_{i}"] = float(block.std())
    return out


def fft_coeffs(window, n: int = 10) -> dict:
    """First ``n`` single-sided DFT magnitudes, DC excluded.

    ``fft_i`` is ``2 |X_{i+1}| / N`` so an on-bin sinusoid of amplitude A
    reports A at its bin.
    """
    x = _as_window(window, 2 * (n + 1), "fft_coeffs")
    spec = np.abs(np.fft.rfft(x))
    return {f"fft_{i}": float(2.0 * spec[i + 1] / x.size) for i in range(n)}


def spectral_shape(window, rate_hz: float) -> dict:
    """Normalized spectral entropy, centroid/bandwidth in Hz, magnitude std.

    Uses the power spectrum over bins 1..floor(N/2) (DC excluded). Entropy
    is natural-log based and normalized by ln(floor(N/2)) into [0, 1].
    Windows with total power below 1e-24 report zeros.
    """
    x = _as_window(window, 64, "spectral_shape")
    n = x.size
    mags = np.abs(np.fft.rfft(x))[1 : n // 2 + 1]
    power = mags**2
    total = power.sum()
    if total < _POWER_EPS:
        return {"s_entropy": 0.0, "s_centroid": 0.0, "s_bandw": 0.0, "m_sp_std": 0.0}
    p = power / total
    nz = p[p > 0]
    entropy = float(-(nz * np.log(nz)).sum() / np.log(len(power)))
    freqs = np.arange(1, len(power) + 1) * rate_hz / n
    centroid = float((freqs * p).sum())
    bandw = float(np.sqrt(((freqs - centroid) ** 2 * p).sum()))
    return {
        "s_entropy": entropy,
        "s_centroid": centroid,
        "s_bandw": bandw,
        "m_sp_std": float(mags.std()),
    }


def shannon_entropy(window, n_bins: int = 16) -> float:
    """Histogram entropy in bits over ``n_bins`` equal-width bins."""
    x = _as_window(window, n_bins, "shannon_entropy")
    lo, hi = x.min(), x.max()
    if hi - lo < _VAR_EPS:
        return 0.0
    counts, _ = np.histogram(x, bins=n_bins, range=(lo, hi))
    p = counts[counts > 0] / x.size
    return float(-(p * np.log2(p)).sum())


def permutation_entropy(window, order: int = 3, delay: int = 1) -> float:
    """Normalized ordinal-pattern entropy in [0, 1].

    Embeds the window with the given order/delay, ranks each vector with
    ties broken by position (earlier sample ranks lower), and returns the
    Shannon entropy of the pattern distribution normalized by ln(order!).
    """
    x = _as_window(window, (order - 1) * delay + 2, "permutation_entropy")
    emb = sliding_window_view(x, (order - 1) * delay + 1)[:, ::delay]
    patterns = np.argsort(emb, axis=1, kind="stable")
    codes = patterns @ (order ** np.arange(order - 1, -1, -1))
    counts = np.bincount(codes)
    p = counts[counts > 0] / codes.size
    h = -(p * np.log(p)).sum()
    norm = np.log(float(math.factorial(order)))
    return float(h / norm)


def _chebyshev_pair_count(templates: np.ndarray, r: float) -> int:
    """Number of unordered template pairs within Chebyshev distance r."""
    tree = cKDTree(templates)
    total = tree.count_neighbors(tree, r, p=np.inf)
    return int(total - len(templates)) // 2


def sample_entropy(window, m: int = 2, r_mult: float = 0.2) -> float:
    """Sample entropy with tolerance ``r_mult`` times the population std.

    Counts unordered template pairs of lengths m and m+1 within Chebyshev
    distance r (non-strict, self-matches excluded) and returns -ln(A/B).
    B = 0 yields 0; A = 0 yields the cap ln of the total pair count.
    """
    x = _as_window(window, 16, "sample_entropy")
    n = x.size
    r = r_mult * x.std()
    n_templates = n - m
    emb_m = sliding_window_view(x, m)[:n_templates]
    emb_m1 = sliding_window_view(x, m + 1)
    b = _chebyshev_pair_count(np.ascontiguousarray(emb_m), r)
    if b == 0:
        return 0.0
    a = _chebyshev_pair_count(np.ascontiguousarray(emb_m1), r)
    if a == 0:
        return float(np.log(n_templates * (n_templates - 1) / 2))
    return float(-np.log(a / b))


def haar_detail_energies(window, max_levels: int = 6) -> np.ndarray:
    """Detail-coefficient energy per Haar level (level 1 first).

    The window is truncated to its largest power-of-two prefix and
    decomposed to ``min(max_levels, log2(n) - 1)`` levels.
    """
    x = np.asarray(window, dtype=float)
    p2 = 1 << int(np.log2(x.size))
    x = x[:p2]
    levels = min(max_levels, int(np.log2(p2)) - 1)
    energies = np.empty(levels)
    approx = x
    for j in range(levels):
        even, odd = approx[0::2], approx[1::2]
        detail = (even - odd) / np.sqrt(2.0)
        approx = (even + odd) / np.sqrt(2.0)
        energies[j] = np.sum(detail**2)
    return energies


def wavelet_entropy(window) -> float:
    """Shannon entropy (natural log) of the Haar detail-energy distribution."""
    x = _as_window(window, 64, "wavelet_entropy")
    energies = haar_detail_energies(x)
    total = energies.sum()
    if total < _POWER_EPS:
        return 0.0
    p = energies / total
    p = p[p > 0]
    return float(-(p * np.log(p)).sum())


def energy_features(window) -> dict:
    """Signal energy, RMS, and peak-to-peak amplitude."""
    x = _as_window(window, 1, "energy_features")
    sq = x**2
    return {
        "energy": float(sq.sum()),
        "rms": float(np.sqrt(sq.mean())),
        "ptp": float(x.max() - x.min()),
    }


def dfa_scales(n: int, n_scales: int = 10) -> np.ndarray:
    """Log-spaced integer box sizes in [4, n // 4], deduplicated."""
    hi = n // 4
    if hi < 4:
        return np.array([], dtype=int)
    raw = np.geomspace(4, hi, n_scales)
    return np.unique(np.round(raw).astype(int))


def dfa_exponent(window, n_scales: int = 10) -> float:
    """Detrended fluctuation scaling exponent.

    Integrates the mean-removed window, linearly detrends non-overlapping
    boxes at each scale, and fits ln F(n) against ln n by least squares.
    F(n) is floored at 1e-12, so perfectly detrendable inputs still yield a
    finite slope. White noise scales near 0.5, integrated noise near 1.5.
    """
    x = _as_window(window, 64, "dfa_exponent")
    scales = dfa_scales(x.size, n_scales)
    if scales.size < 3:
        raise ValueError(f"dfa_exponent: only {scales.size} usable scales for n={x.size}")
    profile = np.cumsum(x - x.mean())
    fluct = np.empty(scales.size)
    for i, n in enumerate(scales):
        n_boxes = profile.size // n
        boxes = profile[: n_boxes * n].reshape(n_boxes, n)
        t = np.arange(n, dtype=float)
        t_mean = t.mean()
        t_var = np.mean(t**2) - t_mean**2
        y_mean = boxes.mean(axis=1)
        slope = (boxes @ t / n - y_mean * t_mean) / t_var
        intercept = y_mean - slope * t_mean
        resid = boxes - (slope[:, None] * t + intercept[:, None])
        fluct[i] = max(np.sqrt(np.mean(resid**2)), 1e-12)
    alpha, _ = np.polyfit(np.log(scales), np.log(fluct), 1)
    return float(alpha)


def autocov(window, lags=(1, 2, 3, 4)) -> dict:
    """Autocorrelation at the given lags (biased 1/N estimator).

    Normalized by the population variance; constant windows report zero at
    every lag.
    """
    x = _as_window(window, max(lags) + 2, "autocov")
    n = x.size
    d = x - x.mean()
    m2 = np.mean(d**2)
    out = {}
    for k in lags:
        if m2 < _VAR_EPS:
            out[f"cov_{k}"] = 0.0
        else:
            out[f"cov_{k}"] = float((d[:-k] @ d[k:]) / n / m2)
    return out
