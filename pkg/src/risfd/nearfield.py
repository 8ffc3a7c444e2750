"""Radiating near-field channel model between antennas and a reflecting surface.

Geometry convention: the surface lies in the z = 0 plane with its center at
the origin, cells tiled edge to edge on a square grid and numbered left to
right, row by row, starting at the top-left cell.  Antennas sit at z > 0.
The transmit antenna is lossless isotropic with in-plane (Y) polarization,
and the power gain of a rectangular cell is the closed-form corner
decomposition of the received power-density integral.  Per-subcarrier cell
areas are allowed, so the grid coordinates may shift slightly with the
subcarrier index.

Channel phases follow the e^{-j*theta} sign convention with theta the
propagation phase 2*pi*(distance/wavelength mod 1).
"""

import math
import warnings
from dataclasses import dataclass, field

import numpy as np

from .exceptions import ConfigurationError, GeometryError
from .validation import as_float_vector, check_positive

SPEED_OF_LIGHT = 299_792_458.0

# Radiating near-field window, in wavelengths, inside which the gain model
# is accurate. Outside it we warn but still evaluate (the far-field limit
# of the formula is exact, which the validation suite relies on).
NEAR_FIELD_MIN_WAVELENGTHS = 0.16
NEAR_FIELD_MAX_WAVELENGTHS = 5.0


@dataclass(frozen=True)
class Point3:
    """A point in the device-local right-angle coordinate system, meters."""

    x: float
    y: float
    z: float

    def __post_init__(self):
        if not all(math.isfinite(v) for v in (self.x, self.y, self.z)):
            raise GeometryError("Point3 coordinates must be finite")

    def as_array(self):
        return np.array([self.x, self.y, self.z])

    def distance_to(self, other):
        return math.dist((self.x, self.y, self.z), (other.x, other.y, other.z))


@dataclass(frozen=True)
class SurfaceGeometry:
    """Square surface with ``n_cells`` unit cells and per-subcarrier cell areas.

    ``cell_areas[m]`` is the area (m^2) of one unit cell on subcarrier m; the
    grid side length is sqrt(n_cells) cells.
    """

    n_cells: int
    cell_areas: np.ndarray

    def __post_init__(self):
        side = math.isqrt(int(self.n_cells))
        if self.n_cells <= 0 or side * side != self.n_cells:
            raise ConfigurationError(
                f"n_cells must be a positive perfect square, got {self.n_cells}"
            )
        areas = as_float_vector(self.cell_areas, name="cell_areas")
        if np.any(areas <= 0):
            raise ConfigurationError("cell_areas must be positive")
        object.__setattr__(self, "cell_areas", areas)

    @property
    def side(self):
        return math.isqrt(int(self.n_cells))


@dataclass(frozen=True)
class CarrierPlan:
    """OFDM carrier layout: center frequency, bandwidth and subcarrier count."""

    center_freq: float
    bandwidth: float
    n_subcarriers: int
    cp_len: int = 0

    def __post_init__(self):
        check_positive(self.center_freq, "center_freq")
        check_positive(self.bandwidth, "bandwidth")
        if self.n_subcarriers < 1:
            raise ConfigurationError("n_subcarriers must be >= 1")
        if self.cp_len < 0:
            raise ConfigurationError("cp_len must be >= 0")
        if self.center_freq - self.bandwidth / 2.0 <= 0:
            raise ConfigurationError("lowest subcarrier frequency must be positive")

    @property
    def subcarrier_spacing(self):
        return self.bandwidth / self.n_subcarriers

    def frequencies(self):
        """All subcarrier frequencies in Hz, index 0 at the lower band edge."""
        m = np.arange(self.n_subcarriers)
        return self.center_freq - self.bandwidth / 2.0 + m * self.subcarrier_spacing

    def wavelength(self, m):
        return SPEED_OF_LIGHT / subcarrier_frequency(m, self)


def subcarrier_frequency(m, plan):
    """Frequency of subcarrier ``m``: band edge plus m spacings."""
    if not 0 <= m <= plan.n_subcarriers - 1:
        raise IndexError(f"subcarrier index {m} out of range 0..{plan.n_subcarriers - 1}")
    return plan.center_freq - plan.bandwidth / 2.0 + m * plan.subcarrier_spacing


def unit_cell_center(n, m, geom):
    """Center of cell ``n`` (1-based, row-major from top-left) on subcarrier ``m``."""
    if not 1 <= n <= geom.n_cells:
        raise ConfigurationError(f"cell index {n} out of range 1..{geom.n_cells}")
    side = geom.side
    step = math.sqrt(geom.cell_areas[m])
    half_span = (side - 1) * step / 2.0
    col = (n - 1) % side
    row = (n - 1) // side
    return Point3(-half_span + step * col, half_span - step * row, 0.0)


def _cell_centers(m, geom):
    """Vectorized cell-center coordinates, shape (n_cells,) each."""
    side = geom.side
    step = math.sqrt(geom.cell_areas[m])
    half_span = (side - 1) * step / 2.0
    idx = np.arange(geom.n_cells)
    x = -half_span + step * (idx % side)
    y = half_span - step * (idx // side)
    return x, y


def _corner_term(x, y, d):
    # One corner of the closed-form power-density integral; x, y are signed
    # in-plane distances from the antenna projection to the cell edges.
    xn = x / d
    yn = y / d
    root = np.sqrt(xn * xn + yn * yn + 1.0)
    return (
        xn * yn / (3.0 * (yn * yn + 1.0) * root)
        + (2.0 / 3.0) * np.arctan(xn * yn / root)
    ) / (4.0 * np.pi)


def _patch_gain_grid(x_off, y_off, d, area):
    """Power gain of cells centered at in-plane offsets (x_off, y_off) from the
    antenna projection, antenna height d, cell area ``area``. Broadcasts."""
    half = np.sqrt(area) / 2.0
    gain = (
        _corner_term(half + x_off, half + y_off, d)
        + _corner_term(half + x_off, half - y_off, d)
        + _corner_term(half - x_off, half + y_off, d)
        + _corner_term(half - x_off, half - y_off, d)
    )
    return gain


def patch_gain(t, p, cell_area):
    """Dimensionless power gain collected by a square cell of area ``cell_area``
    centered at ``p`` (in the z = 0 plane) from an antenna at ``t``.

    The four corner terms split the cell at the antenna's in-plane projection;
    corners behind the projection enter with negative sign, so the result is
    the exact integral of the power density over the cell.
    """
    d = t.z - p.z
    if d <= 0:
        raise GeometryError(f"antenna must be above the surface plane (d={d})")
    check_positive(cell_area, "cell_area")
    return float(_patch_gain_grid(p.x - t.x, p.y - t.y, d, cell_area))


def link_phase(t, p, wavelength):
    """Propagation phase 2*pi*mod(distance/wavelength, 1), in [0, 2*pi)."""
    check_positive(wavelength, "wavelength")
    return 2.0 * np.pi * math.fmod(t.distance_to(p) / wavelength, 1.0)


def _warn_if_outside_near_field(distances, wavelength, context):
    lo = NEAR_FIELD_MIN_WAVELENGTHS * wavelength
    hi = NEAR_FIELD_MAX_WAVELENGTHS * wavelength
    dmin = np.min(distances)
    dmax = np.max(distances)
    if dmin <= lo or dmax >= hi:
        warnings.warn(
            f"{context}: distance range [{dmin:.4g}, {dmax:.4g}] m is outside the "
            f"radiating near-field window ({lo:.4g}, {hi:.4g}) m; the gain model "
            "may be inaccurate",
            stacklevel=3,
        )


def antenna_to_surface_cfr(t, m, geom, plan):
    """Complex channel vector (length n_cells) between antenna ``t`` and every
    unit cell of the surface on subcarrier ``m``.

    Element n has squared magnitude equal to the cell's power gain and phase
    -link_phase(t, cell center).
    """
    if t.z <= 0:
        raise GeometryError("antenna must be above the surface plane")
    lam = plan.wavelength(m)
    cx, cy = _cell_centers(m, geom)
    dist = np.sqrt((cx - t.x) ** 2 + (cy - t.y) ** 2 + t.z**2)
    _warn_if_outside_near_field(dist, lam, "antenna_to_surface_cfr")
    gain = _patch_gain_grid(cx - t.x, cy - t.y, t.z, geom.cell_areas[m])
    theta = 2.0 * np.pi * np.mod(dist / lam, 1.0)
    return np.sqrt(gain) * np.exp(-1j * theta)


def si_cfr(t, r, m, plan, aperture=None):
    """Self-interference channel between co-located transmit antenna ``t`` and
    receive antenna ``r`` on subcarrier ``m``.

    The receive antenna is treated as a single boresight cell at the antenna
    separation distance, with a fixed effective aperture (default: a square of
    side one fifth of the center-frequency wavelength), so the magnitude is
    the same on every subcarrier while the phase tracks the per-subcarrier
    wavelength.
    """
    if aperture is None:
        lam_c = SPEED_OF_LIGHT / plan.center_freq
        aperture = (lam_c / 5.0) ** 2
    separation = t.distance_to(r)
    if separation <= 0:
        raise GeometryError("transmit and receive antennas must not coincide")
    lam = plan.wavelength(m)
    _warn_if_outside_near_field(np.array([separation]), lam, "si_cfr")
    gain = _patch_gain_grid(0.0, 0.0, separation, aperture)
    theta = 2.0 * np.pi * math.fmod(separation / lam, 1.0)
    return complex(np.sqrt(gain) * np.exp(-1j * theta))
