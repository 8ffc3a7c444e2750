"""Rician tap-delay-line channels for the inter-device links.

Each link is drawn in the tap domain and converted to per-subcarrier
frequency responses with an unnormalized forward DFT, so Parseval reads
sum_m |cfr_m|^2 = M * sum_l |tap_l|^2.

Modeling choices (the references only fix the K-factor split and the
pathloss): the line-of-sight component sits entirely in tap 0 with unit
magnitude and a uniformly random phase, and the scattered taps are i.i.d.
circular Gaussian with a uniform power delay profile normalized to unit
total expected power over the nonzero taps.
"""

from dataclasses import dataclass

import numpy as np

from .exceptions import ConfigurationError
from .validation import check_positive


@dataclass(frozen=True)
class RicianParams:
    """Statistical description of one inter-device link.

    k_factor: LOS-to-scatter power ratio (linear, >= 0).
    pathloss_ref_db: pathloss in dB at the 1 m reference distance.
    pathloss_exponent: distance exponent of the pathloss law.
    distance: link distance in meters.
    n_taps: number of nonzero delay taps (must fit inside the cyclic prefix).
    """

    k_factor: float
    pathloss_ref_db: float
    pathloss_exponent: float
    distance: float
    n_taps: int

    def __post_init__(self):
        if self.k_factor < 0:
            raise ConfigurationError("k_factor must be >= 0")
        check_positive(self.distance, "distance")
        if self.n_taps < 1:
            raise ConfigurationError("n_taps must be >= 1")

    @property
    def pathloss(self):
        """Linear pathloss: reference loss times distance^(-exponent)."""
        return 10.0 ** (self.pathloss_ref_db / 10.0) * self.distance ** (
            -self.pathloss_exponent
        )


@dataclass(frozen=True)
class TapChannel:
    """Tap-domain channel, zero-padded to the DFT length.

    ``taps`` has shape (dft_len,) for a scalar link or (n_elements, dft_len)
    for an antenna-to-surface link; entries at delay >= n_taps are zero.
    """

    taps: np.ndarray
    n_taps: int


def draw_rician_taps(params, dft_len, rng, n_elements=None):
    """Draw one Rician tap-domain realization.

    Args:
        params: RicianParams for the link.
        dft_len: DFT length M (the tap vector is zero-padded to this length).
        rng: seeded numpy Generator; consumed deterministically.
        n_elements: draw this many i.i.d. element channels (vector link);
            None gives a scalar link.

    Returns:
        TapChannel with taps scaled so the total expected tap energy equals
        the linear pathloss.
    """
    if params.n_taps > dft_len:
        raise ConfigurationError("n_taps cannot exceed the DFT length")
    shape = (dft_len,) if n_elements is None else (int(n_elements), dft_len)
    los = np.zeros(shape, dtype=complex)
    los[..., 0] = np.exp(2j * np.pi * rng.random(shape[:-1]))
    nlos = np.zeros(shape, dtype=complex)
    active = shape[:-1] + (params.n_taps,)
    nlos[..., : params.n_taps] = (
        rng.standard_normal(active) + 1j * rng.standard_normal(active)
    ) / np.sqrt(2.0 * params.n_taps)
    k = params.k_factor
    taps = np.sqrt(params.pathloss) * (
        np.sqrt(k / (1.0 + k)) * los + np.sqrt(1.0 / (1.0 + k)) * nlos
    )
    return TapChannel(taps=taps, n_taps=params.n_taps)


def cfr(ch):
    """Frequency response on all subcarriers: forward DFT over the tap axis."""
    return np.fft.fft(ch.taps, axis=-1)


def cfr_at_subcarrier(ch, m):
    """Frequency response on subcarrier ``m`` (scalar, or vector per element)."""
    dft_len = ch.taps.shape[-1]
    if not 0 <= m < dft_len:
        raise IndexError(f"subcarrier index {m} out of range 0..{dft_len - 1}")
    grid = np.exp(-2j * np.pi * m * np.arange(dft_len) / dft_len)
    return ch.taps @ grid
