"""Cascaded channel assembly and the scalar figures of merit.

The cancellation metric is the dB ratio summed per subcarrier inside one
logarithm:

    Lambda = 10*log10( sum_m (|si_m|^2 p_m + noise) / (|si_m + r_m|^2 p_m + noise) )

with r_m the surface-reflected self-interference contribution. Capacities
are per-subcarrier Shannon sums normalized by the OFDM symbol length
including the cyclic prefix; the half-duplex baseline carries a factor 1/2.
"""

import enum
from dataclasses import dataclass

import numpy as np

from .exceptions import ConfigurationError
from .validation import as_complex_vector, as_float_vector, check_positive


class FeasibleSet(str, enum.Enum):
    """Constraint regime for the reflection coefficients."""

    IDEAL = "ideal"  # |phi_n| <= 1, amplitude and phase free
    CONTINUOUS = "continuous"  # |phi_n| = 1, phase free
    DISCRETE = "discrete"  # phases on an equispaced grid of tau points


# Tolerance on Sum(p) <= budget, relative to the budget.
BUDGET_RTOL = 1e-9


@dataclass(frozen=True)
class ChannelSet:
    """Per-subcarrier channels seen by one device's receiver.

    si_gain: direct transmit-to-receive leakage, shape (M,).
    reflect_si: local-surface cascade of the leakage path, shape (M, N);
        combined with a reflection vector phi as reflect_si[m].conj() @ phi.
    reflect_desired_local: remote-transmitter -> local-surface -> receiver
        cascade, shape (M, N).
    reflect_desired_remote: remote-transmitter -> remote-surface -> receiver
        cascade, shape (M, N).
    direct_desired: remote transmit antenna to local receiver, shape (M,).
    """

    si_gain: np.ndarray
    reflect_si: np.ndarray
    reflect_desired_local: np.ndarray
    reflect_desired_remote: np.ndarray
    direct_desired: np.ndarray

    def __post_init__(self):
        si = as_complex_vector(self.si_gain, name="si_gain")
        m = si.shape[0]
        direct = as_complex_vector(self.direct_desired, n=m, name="direct_desired")
        mats = {}
        n = None
        for name in ("reflect_si", "reflect_desired_local", "reflect_desired_remote"):
            arr = np.asarray(getattr(self, name), dtype=complex)
            if arr.ndim != 2 or arr.shape[0] != m:
                raise ConfigurationError(
                    f"{name} must have shape ({m}, N), got {arr.shape}"
                )
            if n is None:
                n = arr.shape[1]
            elif arr.shape[1] != n:
                raise ConfigurationError("cascade matrices disagree on N")
            if not np.all(np.isfinite(arr)):
                raise ConfigurationError(f"{name} contains non-finite entries")
            mats[name] = arr
        object.__setattr__(self, "si_gain", si)
        object.__setattr__(self, "direct_desired", direct)
        for name, arr in mats.items():
            object.__setattr__(self, name, arr)

    @property
    def n_subcarriers(self):
        return self.si_gain.shape[0]

    @property
    def n_cells(self):
        return self.reflect_si.shape[1]


@dataclass(frozen=True)
class RcVector:
    """Reflection-coefficient vector tagged with its feasible set."""

    values: np.ndarray
    case: FeasibleSet
    tau: int | None = None

    def __post_init__(self):
        values = as_complex_vector(self.values, name="rc values")
        case = FeasibleSet(self.case)
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "case", case)
        mags = np.abs(values)
        if case is FeasibleSet.IDEAL:
            if np.any(mags > 1.0 + 1e-9):
                raise ConfigurationError("ideal-case RC must satisfy |phi_n| <= 1")
        elif case is FeasibleSet.CONTINUOUS:
            if np.any(np.abs(mags - 1.0) > 1e-12):
                raise ConfigurationError("continuous-case RC must be unit modulus")
        else:
            if self.tau is None or int(self.tau) < 1:
                raise ConfigurationError("discrete-case RC requires tau >= 1")
            object.__setattr__(self, "tau", int(self.tau))
            if np.any(np.abs(mags - 1.0) > 1e-12):
                raise ConfigurationError("discrete-case RC must be unit modulus")
            step = 2.0 * np.pi / self.tau
            k = np.angle(values) / step
            if np.any(np.abs(k - np.round(k)) > 1e-9):
                raise ConfigurationError(
                    f"discrete-case RC phases must sit on the {self.tau}-point grid"
                )

    def __len__(self):
        return self.values.shape[0]


@dataclass(frozen=True)
class PowerAllocation:
    """Nonnegative per-subcarrier transmit powers under a total budget (watts)."""

    values: np.ndarray
    budget: float

    def __post_init__(self):
        p = as_float_vector(self.values, name="power values", nonnegative=True)
        if self.budget < 0:
            raise ConfigurationError("budget must be >= 0")
        if p.sum() > self.budget * (1.0 + BUDGET_RTOL) + 1e-300:
            raise ConfigurationError(
                f"allocation sum {p.sum():.6e} exceeds budget {self.budget:.6e}"
            )
        object.__setattr__(self, "values", p)
        object.__setattr__(self, "budget", float(self.budget))

    @property
    def total(self):
        return float(self.values.sum())


def assemble_cascades(
    si_direct,
    rx_to_surface,
    tx_to_surface,
    remote_tx_to_surface,
    remote_surface_to_rx,
    remote_tx_to_remote_surface,
    desired_direct,
    reflect_efficiency_local,
    reflect_efficiency_remote,
):
    """Combine constituent links into the cascaded channel set.

    All surface link arguments have shape (M, N); scalar links have shape
    (M,). The reflected self-interference cascade pairs the receiver-side and
    transmitter-side links of the local surface; the desired-signal cascades
    pair one local/remote surface link with the corresponding remote link.
    Efficiencies scale amplitudes by their square roots.
    """
    eta = float(reflect_efficiency_local)
    beta = float(reflect_efficiency_remote)
    if not (0.0 <= eta <= 1.0 and 0.0 <= beta <= 1.0):
        raise ConfigurationError("reflection efficiencies must lie in [0, 1]")
    shapes = {
        np.shape(rx_to_surface),
        np.shape(tx_to_surface),
        np.shape(remote_tx_to_surface),
        np.shape(remote_surface_to_rx),
        np.shape(remote_tx_to_remote_surface),
    }
    if len(shapes) != 1:
        raise ConfigurationError(f"surface link shapes disagree: {shapes}")
    reflect_si = np.sqrt(eta) * (rx_to_surface * np.conj(tx_to_surface))
    reflect_desired_local = np.sqrt(eta) * (
        rx_to_surface * np.conj(remote_tx_to_surface)
    )
    reflect_desired_remote = np.sqrt(beta) * (
        remote_surface_to_rx * np.conj(remote_tx_to_remote_surface)
    )
    return ChannelSet(
        si_gain=si_direct,
        reflect_si=reflect_si,
        reflect_desired_local=reflect_desired_local,
        reflect_desired_remote=reflect_desired_remote,
        direct_desired=desired_direct,
    )


def residual_si_gains(channels, phi):
    """|si_m + reflect_si_m^H phi|^2 per subcarrier."""
    phi = np.asarray(phi, dtype=complex)
    combined = channels.si_gain + channels.reflect_si.conj() @ phi
    return np.abs(combined) ** 2


def sic_objective(channels, phi, power, noise_power):
    """Sum over subcarriers of (pre-cancellation)/(post-cancellation) power
    ratios; the cancellation metric is 10*log10 of this value."""
    p = power.values if isinstance(power, PowerAllocation) else np.asarray(power)
    b = np.abs(channels.si_gain) ** 2
    v = residual_si_gains(channels, phi)
    return float(np.sum((b * p + noise_power) / (v * p + noise_power)))


def sic_capability(channels, phi, power, noise_power):
    """Self-interference cancellation capability in dB."""
    phi_values = phi.values if isinstance(phi, RcVector) else phi
    return 10.0 * np.log10(sic_objective(channels, phi_values, power, noise_power))


def fd_capacity(channels, phi, psi, p1, p2, noise_power, cp_len):
    """Full-duplex spectral efficiency (bits/s/Hz) after cancellation.

    ``phi`` steers the local surface (shared by the residual-interference and
    desired paths), ``psi`` the remote surface; ``p1`` is the local transmit
    allocation creating the interference and ``p2`` the remote allocation
    carrying the desired signal.
    """
    phi = phi.values if isinstance(phi, RcVector) else np.asarray(phi, dtype=complex)
    psi = psi.values if isinstance(psi, RcVector) else np.asarray(psi, dtype=complex)
    p1 = p1.values if isinstance(p1, PowerAllocation) else np.asarray(p1)
    p2 = p2.values if isinstance(p2, PowerAllocation) else np.asarray(p2)
    desired = (
        channels.direct_desired
        + channels.reflect_desired_local.conj() @ phi
        + channels.reflect_desired_remote.conj() @ psi
    )
    residual = residual_si_gains(channels, phi) * p1 + noise_power
    snr = np.abs(desired) ** 2 * p2 / residual
    m = channels.n_subcarriers
    return float(np.sum(np.log2(1.0 + snr)) / (m + cp_len))


def hd_capacity(channels, p2, noise_power, cp_len):
    """Half-duplex baseline spectral efficiency (bits/s/Hz), no surfaces."""
    p2 = p2.values if isinstance(p2, PowerAllocation) else np.asarray(p2)
    snr = np.abs(channels.direct_desired) ** 2 * p2 / noise_power
    m = channels.n_subcarriers
    return float(0.5 * np.sum(np.log2(1.0 + snr)) / (m + cp_len))


def fd_capacity_sic_coefficient(channels, kappa, p1, p2, noise_power, cp_len):
    """Full-duplex spectral efficiency of a surface-free device whose canceller
    leaves a fraction ``kappa`` of the self-interference power."""
    if not 0.0 <= kappa <= 1.0:
        raise ConfigurationError(f"kappa must lie in [0, 1], got {kappa}")
    p1 = p1.values if isinstance(p1, PowerAllocation) else np.asarray(p1)
    p2 = p2.values if isinstance(p2, PowerAllocation) else np.asarray(p2)
    residual = kappa * np.abs(channels.si_gain) ** 2 * p1 + noise_power
    snr = np.abs(channels.direct_desired) ** 2 * p2 / residual
    m = channels.n_subcarriers
    return float(np.sum(np.log2(1.0 + snr)) / (m + cp_len))


def phase_error_bound(tau):
    """Worst-case phase error (degrees) of a tau-level phase quantizer."""
    if tau < 1:
        raise ConfigurationError("tau must be >= 1")
    return 360.0 / tau
