import numpy as np
import pytest

from risfd import ChannelSet


def synthetic_channels(rng, n_subcarriers=8, n_cells=4, si_scale=1.0, cascade_scale=0.6):
    """Random small ChannelSet for optimizer-level tests.

    The cascade magnitudes are scaled so cancellation is feasible
    (sum of element magnitudes comparable to the direct leakage).
    """

    def cplx(*shape):
        return (rng.standard_normal(shape) + 1j * rng.standard_normal(shape)) / np.sqrt(2)

    m, n = n_subcarriers, n_cells
    si = si_scale * cplx(m)
    reflect_si = (cascade_scale * si_scale / n) * cplx(m, n) * np.sqrt(n)
    return ChannelSet(
        si_gain=si,
        reflect_si=reflect_si,
        reflect_desired_local=1e-3 * cplx(m, n),
        reflect_desired_remote=1e-3 * cplx(m, n),
        direct_desired=1e-2 * cplx(m),
    )


@pytest.fixture
def rng():
    return np.random.default_rng(1234)
