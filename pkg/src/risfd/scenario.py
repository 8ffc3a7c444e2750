"""Experiment configuration and channel-set construction.

A scenario bundles every physical and algorithmic parameter of one
experiment. Defaults follow the reference deployment: a 5.8 GHz, 20 MHz,
128-subcarrier link between two devices 1000 m apart, each device holding
its transmit antenna at (-0.02, 0, 0.04) m and receive antenna at
(0.02, 0, 0.04) m above the center of its internal reflecting surface,
cell side one fifth of the per-subcarrier wavelength, reflection
efficiency 0.8, noise -110 dBm and a 0 dBm power budget per transmitter.

Configs load from a flat ``key = value`` text file (units are in the field
names: _hz, _dbm, _m, _db); command-line flags override file values.
"""

import logging
import math
from dataclasses import dataclass, field, fields, replace

import numpy as np

from .exceptions import ConfigurationError
from .fading import RicianParams, cfr, draw_rician_taps
from .nearfield import (
    SPEED_OF_LIGHT,
    CarrierPlan,
    Point3,
    SurfaceGeometry,
    antenna_to_surface_cfr,
    si_cfr,
)
from .system import assemble_cascades

logger = logging.getLogger(__name__)

CASES = ("ideal", "continuous", "discrete", "random")


def dbm_to_watts(dbm):
    return 10.0 ** (dbm / 10.0) * 1e-3


def watts_to_dbm(watts):
    if watts <= 0:
        raise ConfigurationError("power must be positive to express in dBm")
    return 10.0 * math.log10(watts * 1e3)


def snap_to_square(n):
    """Nearest perfect square to ``n`` (the surface grid must be square)."""
    if n < 1:
        raise ConfigurationError(f"n_cells must be >= 1, got {n}")
    side = max(1, round(math.sqrt(n)))
    snapped = side * side
    if snapped != n:
        logger.info("snapping n_cells from %d to the perfect square %d", n, snapped)
    return snapped


@dataclass(frozen=True)
class ScenarioConfig:
    """All parameters of one experiment; see the module docstring for units."""

    center_freq_hz: float = 5.8e9
    bandwidth_hz: float = 20e6
    n_subcarriers: int = 128
    cp_len: int = 5
    max_delay_taps: int = 5
    n_cells: int = 36
    tx_power_dbm: float = 0.0
    remote_tx_power_dbm: float = 0.0
    noise_dbm: float = -110.0
    reflect_efficiency_local: float = 0.8
    reflect_efficiency_remote: float = 0.8
    tx_antenna_m: tuple = (-0.02, 0.0, 0.04)
    rx_antenna_m: tuple = (0.02, 0.0, 0.04)
    device_distance_m: float = 1000.0
    k_factor_direct: float = 6.0
    k_factor_surface: float = 9.0
    pathloss_ref_db: float = -30.0
    pathloss_exponent: float = 2.0
    cell_side_wavelengths: float = 0.2
    case: str = "ideal"
    tau: int | None = None
    grad_tol: float = 1e-7
    ao_tol: float = 1e-6
    ao_max_iter: int = 50
    rcg_max_iter: int = 1000
    seed: int = 1
    trials: int = 1

    def validated(self):
        """Return a copy with the cell count snapped, or raise naming the
        offending field."""
        positives = (
            "center_freq_hz",
            "bandwidth_hz",
            "device_distance_m",
            "cell_side_wavelengths",
            "pathloss_exponent",
            "grad_tol",
            "ao_tol",
        )
        for name in positives:
            value = getattr(self, name)
            if not (np.isfinite(value) and value > 0):
                raise ConfigurationError(f"{name} must be positive, got {value!r}")
        for name in ("n_subcarriers", "ao_max_iter", "rcg_max_iter", "trials"):
            if int(getattr(self, name)) < 1:
                raise ConfigurationError(f"{name} must be >= 1")
        if self.cp_len < 0:
            raise ConfigurationError("cp_len must be >= 0")
        if not 0 <= self.max_delay_taps <= self.cp_len:
            raise ConfigurationError(
                "max_delay_taps must lie in [0, cp_len] to avoid intersymbol "
                "interference"
            )
        for name in ("reflect_efficiency_local", "reflect_efficiency_remote"):
            value = getattr(self, name)
            if not 0 < value <= 1:
                raise ConfigurationError(f"{name} must lie in (0, 1], got {value!r}")
        for name in ("k_factor_direct", "k_factor_surface"):
            if getattr(self, name) < 0:
                raise ConfigurationError(f"{name} must be >= 0")
        for name in ("tx_antenna_m", "rx_antenna_m"):
            coords = getattr(self, name)
            if len(coords) != 3 or not all(np.isfinite(c) for c in coords):
                raise ConfigurationError(f"{name} must be three finite coordinates")
            if coords[2] <= 0:
                raise ConfigurationError(f"{name} must sit above the surface (z > 0)")
        if self.case not in CASES:
            raise ConfigurationError(
                f"case must be one of {CASES}, got {self.case!r}"
            )
        if self.case == "discrete" and (self.tau is None or int(self.tau) < 2):
            raise ConfigurationError("tau must be >= 2 for the discrete case")
        if self.center_freq_hz - self.bandwidth_hz / 2.0 <= 0:
            raise ConfigurationError(
                "bandwidth_hz too large: lowest subcarrier frequency must be positive"
            )
        return replace(self, n_cells=snap_to_square(int(self.n_cells)))

    @property
    def noise_power(self):
        return dbm_to_watts(self.noise_dbm)

    @property
    def budget_watts(self):
        return dbm_to_watts(self.tx_power_dbm)

    @property
    def remote_budget_watts(self):
        return dbm_to_watts(self.remote_tx_power_dbm)

    def carrier_plan(self):
        return CarrierPlan(
            center_freq=self.center_freq_hz,
            bandwidth=self.bandwidth_hz,
            n_subcarriers=int(self.n_subcarriers),
            cp_len=int(self.cp_len),
        )

    def surface_geometry(self):
        plan = self.carrier_plan()
        wavelengths = SPEED_OF_LIGHT / plan.frequencies()
        areas = (wavelengths * self.cell_side_wavelengths) ** 2
        return SurfaceGeometry(n_cells=int(self.n_cells), cell_areas=areas)


def config_from_file(path):
    """Load a ScenarioConfig from a flat key = value text file.

    Blank lines and ``#`` comments are ignored. Values parse as int, float,
    comma-separated float tuple, or bare string, in that order. Unknown keys
    raise a ConfigurationError naming the key.
    """
    known = {f.name: f for f in fields(ScenarioConfig)}
    overrides = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ConfigurationError(
                    f"{path}:{lineno}: expected 'key = value', got {raw.strip()!r}"
                )
            key, _, value = line.partition("=")
            key = key.strip()
            if key not in known:
                raise ConfigurationError(f"{path}:{lineno}: unknown field {key!r}")
            overrides[key] = _parse_value(value.strip())
    return replace(ScenarioConfig(), **overrides)


def _parse_value(text):
    for caster in (int, float):
        try:
            return caster(text)
        except ValueError:
            pass
    if "," in text:
        try:
            return tuple(float(part) for part in text.split(","))
        except ValueError:
            pass
    return text


def build_channel_set(config, rng):
    """Construct one channel realization for the local device's receiver.

    The in-device links (direct leakage and both antenna-to-surface links)
    are deterministic near-field channels; the remote device mirrors the
    local geometry, so its transmit-antenna-to-surface link reuses the local
    one. The inter-device links are drawn from ``rng`` in a fixed order:
    direct desired link first, then the remote-transmitter-to-local-surface
    link, then the remote-surface-to-receiver link.
    """
    plan = config.carrier_plan()
    geom = config.surface_geometry()
    tx = Point3(*config.tx_antenna_m)
    rx = Point3(*config.rx_antenna_m)
    m_count = plan.n_subcarriers

    si = np.array([si_cfr(tx, rx, m, plan) for m in range(m_count)])
    rx_to_surface = np.stack(
        [antenna_to_surface_cfr(rx, m, geom, plan) for m in range(m_count)]
    )
    tx_to_surface = np.stack(
        [antenna_to_surface_cfr(tx, m, geom, plan) for m in range(m_count)]
    )

    n_taps = int(config.max_delay_taps) + 1
    direct_params = RicianParams(
        k_factor=config.k_factor_direct,
        pathloss_ref_db=config.pathloss_ref_db,
        pathloss_exponent=config.pathloss_exponent,
        distance=config.device_distance_m,
        n_taps=n_taps,
    )
    surface_params = replace(direct_params, k_factor=config.k_factor_surface)
    direct = cfr(draw_rician_taps(direct_params, m_count, rng))
    remote_tx_to_surface = cfr(
        draw_rician_taps(surface_params, m_count, rng, n_elements=geom.n_cells)
    ).T
    remote_surface_to_rx = cfr(
        draw_rician_taps(surface_params, m_count, rng, n_elements=geom.n_cells)
    ).T

    return assemble_cascades(
        si_direct=si,
        rx_to_surface=rx_to_surface,
        tx_to_surface=tx_to_surface,
        remote_tx_to_surface=remote_tx_to_surface,
        remote_surface_to_rx=remote_surface_to_rx,
        remote_tx_to_remote_surface=tx_to_surface,
        desired_direct=direct,
        reflect_efficiency_local=config.reflect_efficiency_local,
        reflect_efficiency_remote=config.reflect_efficiency_remote,
    )
