import math

import numpy as np
import pytest

from gridsense.features import extractors as ex

import oracles


def rel_close(a, b, tol=1e-9):
    return abs(a - b) <= tol * max(1.0, abs(a), abs(b))


class TestStatsBasic:
    def test_constant_window(self):
        s = ex.stats_basic([5.0] * 900)
        assert s["mean"] == 5.0
        assert s["var"] == 0.0
        assert s["skewness"] == 0.0
        assert s["kurtosis"] == 0.0
        assert s["min"] == s["max"] == s["median"] == 5.0

    def test_small_window_hand_values(self):
        s = ex.stats_basic([1, 2, 3, 4])
        assert s["mean"] == 2.5
        assert s["var"] == 1.25
        assert s["skewness"] == 0.0
        assert s["median"] == 2.5
        # m4 = 2.5625, m2^2 = 1.5625 -> excess kurtosis 1.64 - 3
        assert abs(s["kurtosis"] - (2.5625 / 1.5625 - 3.0)) < 1e-12

    def test_gaussian_moments(self):
        # skew/kurt of a standard normal vanish; Monte Carlo over seeds
        skews, kurts = [], []
        for seed in range(20):
            x = np.random.default_rng(seed).normal(0, 1, 100_000)
            s = ex.stats_basic(x)
            skews.append(s["skewness"])
            kurts.append(s["kurtosis"])
        assert abs(np.mean(skews)) < 0.05
        assert abs(np.mean(kurts)) < 0.1

    def test_too_short(self):
        with pytest.raises(ValueError):
            ex.stats_basic([1, 2, 3])


class TestStatsBlocks:
    def test_constant_blocks(self):
        s = ex.stats_blocks([1, 1, 2, 2, 3, 3, 4, 4])
        assert [s[f"mean_{i}"] for i in range(4)] == [1, 2, 3, 4]
        assert [s[f"std_{i}"] for i in range(4)] == [0, 0, 0, 0]

    def test_ascending(self):
        s = ex.stats_blocks(np.arange(8.0))
        assert [s[f"mean_{i}"] for i in range(4)] == [0.5, 2.5, 4.5, 6.5]

    def test_block_length_900(self):
        # 900 samples split 4 ways -> 225 each; verify via constant blocks
        x = np.repeat([1.0, 2.0, 3.0, 4.0], 225)
        s = ex.stats_blocks(x)
        assert [s[f"mean_{i}"] for i in range(4)] == [1, 2, 3, 4]

    def test_remainder_goes_to_last_block(self):
        s = ex.stats_blocks(np.arange(10.0))  # blocks 2,2,2,4
        assert s["mean_0"] == 0.5
        assert s["mean_3"] == np.mean([6, 7, 8, 9])

    def test_too_short(self):
        with pytest.raises(ValueError):
            ex.stats_blocks([1, 2, 3])


class TestFftCoeffs:
    def test_on_bin_cosine(self):
        n, amp = 900, 2.5
        t = np.arange(n)
        x = amp * np.cos(2 * np.pi * 3 * t / n)  # exactly on bin 3
        c = ex.fft_coeffs(x)
        assert abs(c["fft_2"] - amp) < 1e-9
        assert all(abs(v) < 1e-9 for k, v in c.items() if k != "fft_2")

    def test_constant_window(self):
        c = ex.fft_coeffs(np.full(64, 3.0))
        assert all(abs(v) < 1e-12 for v in c.values())

    def test_matches_naive_dft(self):
        x = np.random.default_rng(3).normal(0, 1, 128)
        ours = ex.fft_coeffs(x)
        naive = oracles.naive_fft_coeffs(x)
        for k in ours:
            assert rel_close(ours[k], naive[k])

    def test_too_short(self):
        with pytest.raises(ValueError):
            ex.fft_coeffs(np.ones(21))


class TestSpectralShape:
    def test_on_bin_sinusoid(self):
        rate, n = 30.0, 900
        t = np.arange(n) / rate
        x = np.sin(2 * np.pi * 5.0 * t)  # 5 Hz = bin 150, exactly on-bin
        s = ex.spectral_shape(x, rate)
        bin_width = rate / n
        assert s["s_entropy"] < 0.01
        assert abs(s["s_centroid"] - 5.0) <= bin_width
        assert s["s_bandw"] < bin_width

    def test_white_noise_entropy(self):
        vals = []
        for seed in range(20):
            x = np.random.default_rng(seed).normal(0, 1, 5400)
            vals.append(ex.spectral_shape(x, 30.0)["s_entropy"])
        assert np.mean(vals) > 0.9

    def test_constant_window(self):
        s = ex.spectral_shape(np.full(128, 7.0), 30.0)
        assert all(v == 0.0 for v in s.values())

    def test_matches_naive(self):
        x = np.random.default_rng(11).normal(0, 1, 100)
        ours = ex.spectral_shape(x, 30.0)
        naive = oracles.naive_spectral_shape(x, 30.0)
        for k in ours:
            assert rel_close(ours[k], naive[k])


class TestShannonEntropy:
    def test_uniform_16_bins(self):
        # exactly one sample per bin midpoint -> 4 bits
        x = np.arange(16) + 0.5
        assert ex.shannon_entropy(x) == 4.0

    def test_constant(self):
        assert ex.shannon_entropy(np.full(32, 2.0)) == 0.0

    def test_two_level_split(self):
        x = np.array([0.0] * 8 + [1.0] * 8)
        assert abs(ex.shannon_entropy(x) - 1.0) < 1e-12

    def test_matches_naive(self):
        x = np.random.default_rng(5).normal(0, 1, 256)
        assert rel_close(ex.shannon_entropy(x), oracles.naive_shannon_entropy(x))


class TestPermutationEntropy:
    def test_monotone_sequence(self):
        assert ex.permutation_entropy(np.arange(100.0)) == 0.0

    def test_iid_uniform(self):
        x = np.random.default_rng(1).random(5400)
        assert ex.permutation_entropy(x) > 0.99

    def test_periodic_matches_bruteforce(self):
        x = np.array([1.0, 3.0, 2.0] * 40)
        ours = ex.permutation_entropy(x)
        assert rel_close(ours, oracles.brute_permutation_entropy(x))
        # exactly the entropy of its 3-pattern distribution: the 118
        # embedded vectors split 40/39/39 over the three patterns
        p = np.array([40, 39, 39]) / 118.0
        expected = -np.sum(p * np.log(p)) / math.log(6)
        assert abs(ours - expected) < 1e-12

    def test_tie_rule_matches_bruteforce(self):
        x = np.array([1.0, 1.0, 2.0, 2.0, 1.0, 2.0, 1.0, 1.0, 1.0, 3.0])
        assert rel_close(ex.permutation_entropy(x), oracles.brute_permutation_entropy(x))


class TestSampleEntropy:
    def test_constant_window(self):
        assert ex.sample_entropy(np.full(100, 4.0)) == 0.0

    @pytest.mark.parametrize("seed", [0, 1, 2, 3, 4])
    def test_matches_bruteforce(self, seed):
        rng = np.random.default_rng(seed)
        x = rng.normal(0, 1, rng.integers(30, 200))
        assert rel_close(ex.sample_entropy(x), oracles.brute_sample_entropy(x))

    def test_noise_above_sine(self):
        noisier = 0
        for seed in range(20):
            rng = np.random.default_rng(seed)
            noise = rng.random(1800)
            sine = np.sin(2 * np.pi * np.arange(1800) / 60.0)
            if ex.sample_entropy(noise) > ex.sample_entropy(sine):
                noisier += 1
        assert noisier == 20


class TestWaveletEntropy:
    def test_constant(self):
        assert ex.wavelet_entropy(np.full(128, 3.0)) == 0.0

    def test_alternating_signal_single_level(self):
        x = np.tile([1.0, -1.0], 128)
        assert ex.wavelet_entropy(x) < 0.05

    def test_equal_two_level_energy(self):
        # build coefficients with equal detail energy at levels 1 and 2
        # and invert; layout of the recursive transform: [approx, d2, d1]
        n, levels = 256, 2
        w = np.zeros(n)
        w[n // 2:] = np.sqrt(1.0 / (n // 2))       # level-1 details, energy 1
        w[n // 4: n // 2] = np.sqrt(1.0 / (n // 4))  # level-2 details, energy 1
        x = oracles.recursive_ihaar(w, levels)
        assert abs(ex.wavelet_entropy(x) - math.log(2)) < 1e-9

    def test_matches_recursive_oracle(self):
        x = np.random.default_rng(8).normal(0, 1, 200)
        ours = ex.haar_detail_energies(x)
        ref = oracles.haar_energies_recursive(x)
        assert np.allclose(ours, ref, rtol=1e-12, atol=1e-12)
        assert rel_close(ex.wavelet_entropy(x), oracles.naive_wavelet_entropy(x))


class TestEnergyFeatures:
    def test_constant(self):
        e = ex.energy_features(np.full(50, -2.0))
        assert e["energy"] == 50 * 4.0
        assert e["rms"] == 2.0
        assert e["ptp"] == 0.0

    def test_sine_identities(self):
        amp, n = 3.0, 3000
        x = amp * np.sin(2 * np.pi * 5 * np.arange(n) / n)  # integer periods
        e = ex.energy_features(x)
        assert abs(e["rms"] - amp / np.sqrt(2)) < 1e-6
        assert abs(e["ptp"] - 2 * amp) < 1e-3

    def test_hand_values(self):
        e = ex.energy_features([3.0, -4.0])
        assert e["energy"] == 25.0
        assert abs(e["rms"] - math.sqrt(12.5)) < 1e-12
        assert e["ptp"] == 7.0


class TestDfa:
    def test_white_noise_scaling(self):
        alphas = [ex.dfa_exponent(np.random.default_rng(s).normal(0, 1, 5400))
                  for s in range(20)]
        assert abs(np.mean(alphas) - 0.5) < 0.05

    def test_integrated_noise_scaling(self):
        alphas = [ex.dfa_exponent(np.cumsum(np.random.default_rng(s).normal(0, 1, 5400)))
                  for s in range(20)]
        assert abs(np.mean(alphas) - 1.5) < 0.1

    def test_floor_path_on_degenerate_input(self):
        # constant window: zero profile, every F(n) floored -> slope 0
        alpha = ex.dfa_exponent(np.zeros(256))
        assert alpha == 0.0
        # linear ramp: degenerate-path coverage only, result must be finite
        assert np.isfinite(ex.dfa_exponent(np.arange(256.0)))

    def test_matches_reference_implementation(self):
        for seed in range(5):
            x = np.random.default_rng(seed).normal(0, 1, 240)
            assert rel_close(ex.dfa_exponent(x), oracles.reference_dfa(x))

    def test_too_short(self):
        with pytest.raises(ValueError):
            ex.dfa_exponent(np.ones(32))


class TestAutocov:
    def test_constant(self):
        c = ex.autocov(np.full(100, 3.3))
        assert all(v == 0.0 for v in c.values())

    def test_slow_sinusoid(self):
        x = np.sin(2 * np.pi * np.arange(900) / 900.0)
        assert ex.autocov(x)["cov_1"] > 0.99

    @pytest.mark.parametrize("seed", [0, 1, 2])
    def test_matches_direct_summation(self, seed):
        rng = np.random.default_rng(seed)
        x = rng.normal(0, 1, rng.integers(50, 500))
        ours = ex.autocov(x)
        ref = oracles.naive_autocov(x)
        for k in ours:
            assert abs(ours[k] - ref[k]) < 1e-12


class TestInvarianceProperties:
    """Scale/shift invariances and range contracts from the feature spec."""

    def test_permutation_entropy_affine_invariance(self):
        x = np.random.default_rng(2).normal(0, 1, 400)
        base = ex.permutation_entropy(x)
        assert ex.permutation_entropy(3.5 * x + 11.0) == base

    def test_spectral_entropy_scale_invariance(self):
        x = np.random.default_rng(4).normal(0, 1, 256)
        x -= x.mean()
        a = ex.spectral_shape(x, 30.0)["s_entropy"]
        b = ex.spectral_shape(-2.0 * x, 30.0)["s_entropy"]
        assert abs(a - b) < 1e-12

    def test_autocov_affine_invariance(self):
        x = np.random.default_rng(6).normal(0, 1, 300)
        base = ex.autocov(x)
        shifted = ex.autocov(4.0 * x - 2.0)
        for k in base:
            assert abs(base[k] - shifted[k]) < 1e-9

    def test_ranges(self):
        for seed in range(10):
            x = np.random.default_rng(seed).normal(0, 3, 256)
            assert 0.0 <= ex.spectral_shape(x, 30.0)["s_entropy"] <= 1.0
            assert 0.0 <= ex.permutation_entropy(x) <= 1.0
            assert 0.0 <= ex.shannon_entropy(x) <= 4.0
            assert ex.sample_entropy(x) >= 0.0
            assert ex.stats_basic(x)["var"] >= 0.0
            e = ex.energy_features(x)
            assert e["energy"] >= 0.0 and e["rms"] >= 0.0

    def test_determinism(self):
        x = np.random.default_rng(9).normal(0, 1, 256)
        first = ex.sample_entropy(x), ex.dfa_exponent(x), ex.wavelet_entropy(x)
        second = ex.sample_entropy(x), ex.dfa_exponent(x), ex.wavelet_entropy(x)
        assert first == second
