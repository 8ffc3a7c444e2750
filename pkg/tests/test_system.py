import numpy as np
import pytest

from risfd import (
    ChannelSet,
    ConfigurationError,
    FeasibleSet,
    PowerAllocation,
    RcVector,
    assemble_cascades,
    fd_capacity,
    fd_capacity_sic_coefficient,
    hd_capacity,
    phase_error_bound,
    residual_si_gains,
    sic_capability,
)
from conftest import synthetic_channels


def cascade_inputs(rng, m=6, n=3):
    def cplx(*shape):
        return rng.standard_normal(shape) + 1j * rng.standard_normal(shape)

    return {
        "si_direct": cplx(m),
        "rx_to_surface": cplx(m, n),
        "tx_to_surface": cplx(m, n),
        "remote_tx_to_surface": cplx(m, n),
        "remote_surface_to_rx": cplx(m, n),
        "remote_tx_to_remote_surface": cplx(m, n),
        "desired_direct": cplx(m),
    }


class TestAssembleCascades:
    def test_zero_local_efficiency_kills_reflected_si(self, rng):
        ch = assemble_cascades(
            **cascade_inputs(rng),
            reflect_efficiency_local=0.0,
            reflect_efficiency_remote=0.8,
        )
        assert np.all(ch.reflect_si == 0)
        assert np.all(ch.reflect_desired_local == 0)

    def test_all_ones_constituents(self):
        m, n = 4, 3
        ones = np.ones((m, n), dtype=complex)
        ch = assemble_cascades(
            si_direct=np.ones(m, dtype=complex),
            rx_to_surface=ones,
            tx_to_surface=ones,
            remote_tx_to_surface=ones,
            remote_surface_to_rx=ones,
            remote_tx_to_remote_surface=ones,
            desired_direct=np.ones(m, dtype=complex),
            reflect_efficiency_local=0.8,
            reflect_efficiency_remote=0.8,
        )
        np.testing.assert_allclose(ch.reflect_si, np.sqrt(0.8) * ones, rtol=1e-15)

    def test_elementwise_products_against_scalar_loop(self, rng):
        inputs = cascade_inputs(rng)
        ch = assemble_cascades(
            **inputs, reflect_efficiency_local=0.7, reflect_efficiency_remote=0.5
        )
        m, n = inputs["rx_to_surface"].shape
        for i in range(m):
            for j in range(n):
                assert ch.reflect_si[i, j] == pytest.approx(
                    np.sqrt(0.7)
                    * inputs["rx_to_surface"][i, j]
                    * np.conj(inputs["tx_to_surface"][i, j])
                )
                assert ch.reflect_desired_local[i, j] == pytest.approx(
                    np.sqrt(0.7)
                    * inputs["rx_to_surface"][i, j]
                    * np.conj(inputs["remote_tx_to_surface"][i, j])
                )
                assert ch.reflect_desired_remote[i, j] == pytest.approx(
                    np.sqrt(0.5)
                    * inputs["remote_surface_to_rx"][i, j]
                    * np.conj(inputs["remote_tx_to_remote_surface"][i, j])
                )

    def test_dimension_mismatch_rejected(self, rng):
        inputs = cascade_inputs(rng)
        inputs["rx_to_surface"] = inputs["rx_to_surface"][:, :2]
        with pytest.raises(ConfigurationError):
            assemble_cascades(
                **inputs, reflect_efficiency_local=0.8, reflect_efficiency_remote=0.8
            )


class TestSicCapability:
    def test_zero_rc_single_subcarrier_gives_zero_db(self, rng):
        ch = synthetic_channels(rng, n_subcarriers=1, n_cells=3)
        p = PowerAllocation(values=np.array([1e-3]), budget=1e-3)
        assert sic_capability(ch, np.zeros(3), p, 1e-14) == pytest.approx(0.0, abs=1e-12)

    def test_zero_rc_gives_subcarrier_count_floor(self, rng):
        ch = synthetic_channels(rng, n_subcarriers=128, n_cells=4)
        p = PowerAllocation(values=np.full(128, 1e-3 / 128), budget=1e-3)
        expected = 10.0 * np.log10(128.0)
        assert sic_capability(ch, np.zeros(4), p, 1e-14) == expected

    def test_depends_only_on_residual_magnitudes(self, rng):
        ch = synthetic_channels(rng)
        m, n = ch.n_subcarriers, ch.n_cells
        phi = np.exp(1j * rng.uniform(0, 2 * np.pi, n))
        p = rng.uniform(0, 1e-4, m)
        theta = rng.uniform(0, 2 * np.pi, m)
        rotated = ChannelSet(
            si_gain=ch.si_gain * np.exp(1j * theta),
            reflect_si=ch.reflect_si * np.exp(-1j * theta)[:, None],
            reflect_desired_local=ch.reflect_desired_local,
            reflect_desired_remote=ch.reflect_desired_remote,
            direct_desired=ch.direct_desired,
        )
        assert sic_capability(rotated, phi, p, 1e-14) == pytest.approx(
            sic_capability(ch, phi, p, 1e-14), rel=1e-12
        )


class TestCapacities:
    def test_no_remote_power_means_no_capacity(self, rng):
        ch = synthetic_channels(rng)
        m, n = ch.n_subcarriers, ch.n_cells
        zeros = np.zeros(m)
        phi = np.zeros(n)
        assert fd_capacity(ch, phi, phi, zeros, zeros, 1e-14, 5) == 0.0
        assert hd_capacity(ch, zeros, 1e-14, 5) == 0.0

    def test_unit_snr_with_perfect_cancellation(self):
        m, cp = 128, 5
        noise = 1e-14
        ch = ChannelSet(
            si_gain=np.zeros(m, dtype=complex),
            reflect_si=np.zeros((m, 2), dtype=complex),
            reflect_desired_local=np.zeros((m, 2), dtype=complex),
            reflect_desired_remote=np.zeros((m, 2), dtype=complex),
            direct_desired=np.ones(m, dtype=complex),
        )
        p2 = np.full(m, noise)  # |desired|^2 p2 / noise = 1 on every subcarrier
        c = fd_capacity(ch, np.zeros(2), np.zeros(2), np.zeros(m), p2, noise, cp)
        assert c == pytest.approx(m / (m + cp), rel=1e-12)
        assert hd_capacity(ch, p2, noise, cp) == pytest.approx(
            0.5 * m / (m + cp), rel=1e-12
        )

    def test_hd_is_half_of_interference_free_fd(self, rng):
        ch = synthetic_channels(rng)
        m, n = ch.n_subcarriers, ch.n_cells
        p2 = rng.uniform(0, 1e-3, m)
        fd = fd_capacity(
            ch, np.zeros(n), np.zeros(n), np.zeros(m), p2, 1e-14, 5
        )
        assert hd_capacity(ch, p2, 1e-14, 5) == pytest.approx(0.5 * fd, rel=1e-12)

    def test_monotone_in_residual_interference(self, rng):
        ch = synthetic_channels(rng)
        m, n = ch.n_subcarriers, ch.n_cells
        p1 = np.full(m, 1e-4)
        p2 = np.full(m, 1e-4)
        psi = np.zeros(n)
        base = fd_capacity(ch, np.zeros(n), psi, p1, p2, 1e-14, 5)
        # a reflection vector that strictly amplifies every residual
        phi = 0.5 * np.ones(n)
        v0 = residual_si_gains(ch, np.zeros(n))
        v1 = residual_si_gains(ch, phi)
        if np.all(v1 >= v0) and np.any(v1 > v0):
            assert fd_capacity(ch, phi, psi, p1, p2, 1e-14, 5) < base
        # scaling up the direct leakage always hurts
        worse = ChannelSet(
            si_gain=3.0 * ch.si_gain,
            reflect_si=ch.reflect_si,
            reflect_desired_local=ch.reflect_desired_local,
            reflect_desired_remote=ch.reflect_desired_remote,
            direct_desired=ch.direct_desired,
        )
        assert fd_capacity(worse, np.zeros(n), psi, p1, p2, 1e-14, 5) < base


class TestSicCoefficientBaseline:
    def test_zero_coefficient_is_interference_free(self, rng):
        ch = synthetic_channels(rng)
        m, n = ch.n_subcarriers, ch.n_cells
        p1 = np.full(m, 1e-4)
        p2 = np.full(m, 1e-4)
        expected = fd_capacity(ch, np.zeros(n), np.zeros(n), np.zeros(m), p2, 1e-14, 5)
        assert fd_capacity_sic_coefficient(ch, 0.0, p1, p2, 1e-14, 5) == pytest.approx(
            expected, rel=1e-12
        )

    def test_full_interference(self, rng):
        ch = synthetic_channels(rng)
        m = ch.n_subcarriers
        p1 = np.full(m, 1e-4)
        p2 = np.full(m, 1e-4)
        residual = np.abs(ch.si_gain) ** 2 * p1 + 1e-14
        snr = np.abs(ch.direct_desired) ** 2 * p2 / residual
        expected = np.sum(np.log2(1 + snr)) / (m + 5)
        assert fd_capacity_sic_coefficient(ch, 1.0, p1, p2, 1e-14, 5) == pytest.approx(
            expected, rel=1e-12
        )

    def test_kappa_out_of_range(self, rng):
        ch = synthetic_channels(rng)
        m = ch.n_subcarriers
        with pytest.raises(ConfigurationError):
            fd_capacity_sic_coefficient(ch, 1.5, np.zeros(m), np.zeros(m), 1e-14, 5)


class TestPhaseErrorBound:
    def test_values(self):
        assert phase_error_bound(4) == 90.0
        assert phase_error_bound(128) == 2.8125
        assert phase_error_bound(512) == pytest.approx(0.703125)

    def test_invalid(self):
        with pytest.raises(ConfigurationError):
            phase_error_bound(0)


class TestDomainTypes:
    def test_rc_vector_ideal_allows_interior(self):
        RcVector(values=np.array([0.5, -0.2j]), case=FeasibleSet.IDEAL)
        with pytest.raises(ConfigurationError):
            RcVector(values=np.array([1.5, 0.0]), case=FeasibleSet.IDEAL)

    def test_rc_vector_continuous_requires_unit_modulus(self):
        RcVector(values=np.exp(1j * np.array([0.3, 2.0])), case=FeasibleSet.CONTINUOUS)
        with pytest.raises(ConfigurationError):
            RcVector(values=np.array([0.5, 1.0]), case=FeasibleSet.CONTINUOUS)

    def test_rc_vector_discrete_requires_grid(self):
        values = np.exp(2j * np.pi * np.array([0, 1, 3]) / 4)
        RcVector(values=values, case=FeasibleSet.DISCRETE, tau=4)
        with pytest.raises(ConfigurationError):
            RcVector(
                values=np.exp(1j * np.array([0.1])), case=FeasibleSet.DISCRETE, tau=4
            )
        with pytest.raises(ConfigurationError):
            RcVector(values=values, case=FeasibleSet.DISCRETE)

    def test_power_allocation_invariants(self):
        PowerAllocation(values=np.array([0.4, 0.6]), budget=1.0)
        with pytest.raises(ConfigurationError):
            PowerAllocation(values=np.array([-0.1, 0.5]), budget=1.0)
        with pytest.raises(ConfigurationError):
            PowerAllocation(values=np.array([0.7, 0.7]), budget=1.0)

    def test_channel_set_shape_checks(self, rng):
        with pytest.raises(ConfigurationError):
            ChannelSet(
                si_gain=np.ones(4, dtype=complex),
                reflect_si=np.ones((3, 2), dtype=complex),
                reflect_desired_local=np.ones((4, 2), dtype=complex),
                reflect_desired_remote=np.ones((4, 2), dtype=complex),
                direct_desired=np.ones(4, dtype=complex),
            )
