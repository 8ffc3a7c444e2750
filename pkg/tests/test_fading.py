import numpy as np
import pytest

from risfd import (
    ConfigurationError,
    RicianParams,
    cfr,
    cfr_at_subcarrier,
    draw_rician_taps,
)


def params(k_factor=6.0, n_taps=6, distance=1000.0):
    return RicianParams(
        k_factor=k_factor,
        pathloss_ref_db=-30.0,
        pathloss_exponent=2.0,
        distance=distance,
        n_taps=n_taps,
    )


def brute_dft(taps, m):
    """Independent oracle: explicit DFT sum, one term per tap."""
    total = 0.0 + 0.0j
    length = len(taps)
    for l, tap in enumerate(taps):
        total += tap * np.exp(-2j * np.pi * m * l / length)
    return total


class TestRicianParams:
    def test_reference_pathloss(self):
        # -30 dB at 1 m with exponent 2 over 1000 m
        assert params().pathloss == pytest.approx(1e-9, rel=1e-12)

    def test_invalid_fields(self):
        with pytest.raises(ConfigurationError):
            params(k_factor=-1.0)
        with pytest.raises(ConfigurationError):
            params(n_taps=0)
        with pytest.raises(ConfigurationError):
            params(distance=0.0)


class TestDrawRicianTaps:
    def test_pure_los_limit(self, rng):
        ch = draw_rician_taps(params(k_factor=1e12), 16, rng)
        assert abs(ch.taps[0]) ** 2 == pytest.approx(1e-9, rel=1e-5)
        assert np.max(np.abs(ch.taps[1:])) < 1e-9

    def test_pure_scatter_energy(self, rng):
        total = 0.0
        draws = 4000
        for _ in range(draws):
            ch = draw_rician_taps(params(k_factor=0.0), 8, rng)
            total += np.sum(np.abs(ch.taps) ** 2)
        mean = total / draws
        # Var of the per-draw energy is L^2/n_taps; allow 3 standard errors.
        se = 1e-9 / np.sqrt(6 * draws)
        assert abs(mean - 1e-9) < 3 * se

    def test_zero_padding_beyond_active_taps(self, rng):
        ch = draw_rician_taps(params(n_taps=4), 32, rng)
        assert np.all(ch.taps[4:] == 0)
        assert np.all(ch.taps[:4] != 0)

    def test_los_tap_has_unit_magnitude_before_pathloss(self, rng):
        ch = draw_rician_taps(params(k_factor=1e12), 8, rng)
        assert abs(ch.taps[0]) == pytest.approx(np.sqrt(1e-9), rel=1e-5)

    def test_vector_link_shape_and_independence(self, rng):
        ch = draw_rician_taps(params(), 16, rng, n_elements=5)
        assert ch.taps.shape == (5, 16)
        # elements are distinct draws
        assert not np.allclose(ch.taps[0], ch.taps[1])

    def test_determinism(self):
        a = draw_rician_taps(params(), 16, np.random.default_rng(7), n_elements=3)
        b = draw_rician_taps(params(), 16, np.random.default_rng(7), n_elements=3)
        np.testing.assert_array_equal(a.taps, b.taps)

    def test_too_many_taps_rejected(self, rng):
        with pytest.raises(ConfigurationError):
            draw_rician_taps(params(n_taps=20), 16, rng)


class TestCfr:
    def test_impulse_is_flat(self):
        from risfd.fading import TapChannel

        taps = np.zeros(8, dtype=complex)
        taps[0] = 1.0
        ch = TapChannel(taps=taps, n_taps=1)
        for m in range(8):
            assert cfr_at_subcarrier(ch, m) == pytest.approx(1.0)

    def test_dft_basis_vector_hits_single_bin(self):
        from risfd.fading import TapChannel

        length = 8
        k = 3
        taps = np.exp(2j * np.pi * k * np.arange(length) / length) / length
        ch = TapChannel(taps=taps, n_taps=length)
        spectrum = cfr(ch)
        assert abs(spectrum[k]) == pytest.approx(1.0)
        others = np.delete(np.abs(spectrum), k)
        assert np.max(others) < 1e-12

    def test_matches_brute_force_dft(self, rng):
        ch = draw_rician_taps(params(), 64, rng)
        for m in (0, 1, 17, 63):
            expected = brute_dft(ch.taps, m)
            got = cfr_at_subcarrier(ch, m)
            assert abs(got - expected) <= 1e-12 * max(abs(expected), 1e-30)

    def test_full_spectrum_consistent_with_single_bins(self, rng):
        ch = draw_rician_taps(params(), 32, rng, n_elements=2)
        spectrum = cfr(ch)
        for m in (0, 5, 31):
            np.testing.assert_allclose(
                spectrum[:, m], cfr_at_subcarrier(ch, m), rtol=1e-12
            )

    def test_parseval(self, rng):
        for _ in range(10):
            ch = draw_rician_taps(params(), 128, rng)
            lhs = np.sum(np.abs(cfr(ch)) ** 2)
            rhs = 128 * np.sum(np.abs(ch.taps) ** 2)
            assert lhs == pytest.approx(rhs, rel=1e-10)

    def test_subcarrier_out_of_range(self, rng):
        ch = draw_rician_taps(params(), 16, rng)
        with pytest.raises(IndexError):
            cfr_at_subcarrier(ch, 16)
