"""Independent naive reference implementations used only by tests.

Deliberately slow and literal: direct O(N^2) DFT summation, explicit pair
counting, recursive Haar, hand-rolled moments. These never share code with
the library so that agreement is meaningful.
"""

import math

import numpy as np


def naive_dft(x):
    x = np.asarray(x, dtype=float)
    n = len(x)
    out = np.empty(n, dtype=complex)
    t = np.arange(n)
    for k in range(n):
        out[k] = np.sum(x * np.exp(-2j * np.pi * k * t / n))
    return out


def naive_fft_coeffs(x, n_coeffs=10):
    spec = naive_dft(x)
    n = len(x)
    return {f"fft_{i}": 2.0 * abs(spec[i + 1]) / n for i in range(n_coeffs)}


def naive_spectral_shape(x, rate_hz):
    x = np.asarray(x, dtype=float)
    n = len(x)
    spec = naive_dft(x)
    mags = np.array([abs(spec[k]) for k in range(1, n // 2 + 1)])
    power = mags**2
    total = power.sum()
    if total < 1e-24:
        return {"s_entropy": 0.0, "s_centroid": 0.0, "s_bandw": 0.0, "m_sp_std": 0.0}
    p = power / total
    ent = 0.0
    for pk in p:
        if pk > 0:
            ent -= pk * math.log(pk)
    ent /= math.log(len(power))
    freqs = np.array([k * rate_hz / n for k in range(1, n // 2 + 1)])
    centroid = float(np.sum(freqs * p))
    bandw = math.sqrt(float(np.sum((freqs - centroid) ** 2 * p)))
    mean_mag = mags.mean()
    m_sp_std = math.sqrt(float(np.mean((mags - mean_mag) ** 2)))
    return {"s_entropy": float(ent), "s_centroid": centroid, "s_bandw": bandw,
            "m_sp_std": m_sp_std}


def naive_moments(x):
    x = np.asarray(x, dtype=float)
    n = len(x)
    mean = sum(x) / n
    m2 = sum((v - mean) ** 2 for v in x) / n
    m3 = sum((v - mean) ** 3 for v in x) / n
    m4 = sum((v - mean) ** 4 for v in x) / n
    if m2 < 1e-12:
        skew = kurt = 0.0
    else:
        skew = m3 / m2**1.5
        kurt = m4 / m2**2 - 3.0
    s = sorted(x)
    median = s[n // 2] if n % 2 else 0.5 * (s[n // 2 - 1] + s[n // 2])
    return {"mean": mean, "var": m2, "skewness": skew, "kurtosis": kurt,
            "min": min(x), "max": max(x), "median": median}


def naive_blocks(x, n_blocks=4):
    x = np.asarray(x, dtype=float)
    base = len(x) // n_blocks
    out = {}
    for i in range(n_blocks):
        lo = i * base
        hi = (i + 1) * base if i < n_blocks - 1 else len(x)
        block = x[lo:hi]
        mean = sum(block) / len(block)
        var = sum((v - mean) ** 2 for v in block) / len(block)
        out[f"mean_{i}"] = mean
        out[f"std_{i}"] = math.sqrt(var)
    return out


def naive_shannon_entropy(x, n_bins=16):
    x = np.asarray(x, dtype=float)
    lo, hi = min(x), max(x)
    if hi - lo < 1e-12:
        return 0.0
    counts = [0] * n_bins
    width = (hi - lo) / n_bins
    for v in x:
        b = int((v - lo) / width)
        if b == n_bins:  # right edge belongs to the last bin
            b -= 1
        counts[b] += 1
    h = 0.0
    for c in counts:
        if c:
            p = c / len(x)
            h -= p * math.log2(p)
    return h


def _pattern(vec):
    # rank by value, ties broken by earlier index ranking lower
    order = sorted(range(len(vec)), key=lambda i: (vec[i], i))
    return tuple(order)


def brute_permutation_entropy(x, order=3, delay=1):
    x = np.asarray(x, dtype=float)
    n_vec = len(x) - (order - 1) * delay
    counts = {}
    for i in range(n_vec):
        vec = [x[i + j * delay] for j in range(order)]
        pat = _pattern(vec)
        counts[pat] = counts.get(pat, 0) + 1
    h = 0.0
    for c in counts.values():
        p = c / n_vec
        h -= p * math.log(p)
    return h / math.log(math.factorial(order))


def brute_sample_entropy(x, m=2, r_mult=0.2):
    """Direct pair counting over explicit embeddings (no spatial index)."""
    x = np.asarray(x, dtype=float)
    n = len(x)
    mean = x.mean()
    r = r_mult * math.sqrt(float(np.mean((x - mean) ** 2)))
    n_t = n - m

    def count_pairs(length):
        emb = np.stack([x[i : i + length] for i in range(n_t)])
        total = 0
        for i in range(n_t - 1):
            d = np.max(np.abs(emb[i + 1 :] - emb[i]), axis=1)
            total += int(np.sum(d <= r))
        return total

    b = count_pairs(m)
    if b == 0:
        return 0.0
    a = count_pairs(m + 1)
    if a == 0:
        return math.log(n_t * (n_t - 1) / 2)
    return -math.log(a / b)


def recursive_haar(x, levels):
    """Full Haar transform: [approx_L, detail_L, ..., detail_1] layout."""
    x = np.asarray(x, dtype=float)
    if levels == 0:
        return x
    s = (x[0::2] + x[1::2]) / math.sqrt(2)
    d = (x[0::2] - x[1::2]) / math.sqrt(2)
    return np.concatenate([recursive_haar(s, levels - 1), d])


def recursive_ihaar(w, levels):
    w = np.asarray(w, dtype=float)
    if levels == 0:
        return w
    half = len(w) // 2
    s = recursive_ihaar(w[:half], levels - 1)
    d = w[half:]
    x = np.empty(len(w))
    x[0::2] = (s + d) / math.sqrt(2)
    x[1::2] = (s - d) / math.sqrt(2)
    return x


def haar_energies_recursive(x, max_levels=6):
    """Detail energy per level (level 1 first) via the recursive transform."""
    x = np.asarray(x, dtype=float)
    p2 = 1 << int(math.log2(len(x)))
    x = x[:p2]
    levels = min(max_levels, int(math.log2(p2)) - 1)
    w = recursive_haar(x, levels)
    energies = []
    pos = len(w)
    size = p2 // 2
    for _ in range(levels):  # detail_1 is the trailing block
        energies.append(float(np.sum(w[pos - size:pos] ** 2)))
        pos -= size
        size //= 2
    return np.array(energies)


def naive_wavelet_entropy(x):
    e = haar_energies_recursive(x)
    total = e.sum()
    if total < 1e-24:
        return 0.0
    h = 0.0
    for ej in e:
        if ej > 0:
            p = ej / total
            h -= p * math.log(p)
    return h


def naive_energy(x):
    x = np.asarray(x, dtype=float)
    return {
        "energy": float(sum(v * v for v in x)),
        "rms": math.sqrt(sum(v * v for v in x) / len(x)),
        "ptp": float(max(x) - min(x)),
    }


def naive_autocov(x, lags=(1, 2, 3, 4)):
    x = np.asarray(x, dtype=float)
    n = len(x)
    mean = sum(x) / n
    m2 = sum((v - mean) ** 2 for v in x) / n
    out = {}
    for k in lags:
        if m2 < 1e-12:
            out[f"cov_{k}"] = 0.0
            continue
        acc = 0.0
        for t in range(n - k):
            acc += (x[t] - mean) * (x[t + k] - mean)
        out[f"cov_{k}"] = acc / n / m2
    return out


def reference_dfa(x, n_scales=10):
    """Independent DFA path: same definition, explicit loops and polyfit."""
    x = np.asarray(x, dtype=float)
    n = len(x)
    hi = n // 4
    raw = np.geomspace(4, hi, n_scales)
    scales = sorted(set(int(round(s)) for s in raw))
    profile = np.cumsum(x - x.mean())
    fs = []
    for scale in scales:
        n_boxes = n // scale
        residuals = []
        for b in range(n_boxes):
            seg = profile[b * scale:(b + 1) * scale]
            t = np.arange(scale, dtype=float)
            coef = np.polyfit(t, seg, 1)
            residuals.extend(seg - np.polyval(coef, t))
        f = math.sqrt(float(np.mean(np.array(residuals) ** 2)))
        fs.append(max(f, 1e-12))
    slope, _ = np.polyfit(np.log(scales), np.log(fs), 1)
    return float(slope)
