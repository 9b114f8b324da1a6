"""Walker-style shell generation and ideal circular-orbit propagation.

Satellites are propagated on circular orbits in an Earth-centered
inertial frame; ground geometry (sub-satellite points, ground-entity
positions) applies the sidereal rotation so ground tracks drift. All
positions are kilometers, times are simulation seconds.
"""

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .constants import EARTH_RADIUS_KM, MU_KM3_S2, SIDEREAL_RATE_RAD_S

DIRECTION_STEP_S = 1.0


class Direction(Enum):
    NEBound = "NE"
    SEBound = "SE"


@dataclass(frozen=True, order=True)
class SatCoord:
    """Logical satellite coordinate: orbital plane p, in-orbit index n."""

    p: int
    n: int

    def __str__(self):
        return f"({self.p},{self.n})"


@dataclass(frozen=True)
class ShellConfig:
    """One constellation shell.

    phase_offset is the fraction of the in-orbit spacing by which each
    successive plane is shifted; None selects the Walker-delta default
    of 1/orbit_count.
    """

    orbit_count: int
    sats_per_orbit: int
    inclination_deg: float
    altitude_km: float
    phase_offset: float | None = None
    epoch: float = 0.0

    def __post_init__(self):
        if self.orbit_count < 1:
            raise ValueError("orbit_count must be >= 1")
        if self.sats_per_orbit < 1:
            raise ValueError("sats_per_orbit must be >= 1")
        if not 0.0 < self.inclination_deg <= 180.0:
            raise ValueError("inclination must be in (0, 180] degrees")
        if self.altitude_km <= 0.0:
            raise ValueError("altitude must be positive")

    @property
    def size(self) -> int:
        return self.orbit_count * self.sats_per_orbit

    @property
    def semi_major_axis_km(self) -> float:
        return EARTH_RADIUS_KM + self.altitude_km

    @property
    def period_s(self) -> float:
        a = self.semi_major_axis_km
        return 2.0 * math.pi * math.sqrt(a ** 3 / MU_KM3_S2)

    @property
    def phase_fraction(self) -> float:
        if self.phase_offset is None:
            return 1.0 / self.orbit_count
        return self.phase_offset


# Real-constellation presets used throughout the scenario configs.
STARLINK_SHELL1 = ShellConfig(72, 22, 53.0, 550.0)
KUIPER_SHELL1 = ShellConfig(34, 34, 51.9, 630.0)


@dataclass(frozen=True)
class SatState:
    """Instantaneous state of one satellite."""

    coord: SatCoord
    position: tuple[float, float, float]
    subpoint: tuple[float, float]
    direction: Direction


class StateBlock:
    """Vectorized state of a whole shell at one instant.

    Bulk consumers (topology, risk mapping) read the arrays directly;
    `states()` materializes the per-satellite dataclasses on demand.
    """

    __slots__ = ("config", "t", "position", "lat_deg", "lon_deg", "ne_bound")

    def __init__(self, config, t, position, lat_deg, lon_deg, ne_bound):
        self.config = config
        self.t = t
        self.position = position
        self.lat_deg = lat_deg
        self.lon_deg = lon_deg
        self.ne_bound = ne_bound
        for arr in (position, lat_deg, lon_deg, ne_bound):
            arr.setflags(write=False)

    def __len__(self):
        return self.position.shape[0]

    def coord_of(self, idx: int) -> SatCoord:
        h = self.config.sats_per_orbit
        return SatCoord(idx // h, idx % h)

    def index_of(self, coord: SatCoord) -> int:
        return coord.p * self.config.sats_per_orbit + coord.n

    def state_of(self, idx: int) -> SatState:
        d = Direction.NEBound if self.ne_bound[idx] else Direction.SEBound
        return SatState(
            coord=self.coord_of(idx),
            position=tuple(float(x) for x in self.position[idx]),
            subpoint=(float(self.lat_deg[idx]), float(self.lon_deg[idx])),
            direction=d,
        )

    def states(self) -> list[SatState]:
        return [self.state_of(i) for i in range(len(self))]


def _anomalies(config: ShellConfig, t: float):
    """Argument of latitude (rad) per satellite, plane-major order."""
    p_count, h = config.orbit_count, config.sats_per_orbit
    p_idx = np.repeat(np.arange(p_count), h)
    n_idx = np.tile(np.arange(h), p_count)
    spacing = 2.0 * math.pi / h
    u0 = (n_idx + config.phase_fraction * p_idx) * spacing
    a = config.semi_major_axis_km
    rate = math.sqrt(MU_KM3_S2 / a ** 3)
    return u0 + rate * (t - config.epoch), p_idx, rate


def propagate_block(config: ShellConfig, t: float) -> StateBlock:
    """Propagate the full shell to time t (vectorized)."""
    if t < 0:
        raise ValueError("t must be >= 0")
    a = config.semi_major_axis_km
    inc = math.radians(config.inclination_deg)
    u, p_idx, rate = _anomalies(config, t)
    raan = 2.0 * math.pi * p_idx / config.orbit_count

    cu, su = np.cos(u), np.sin(u)
    cr, sr = np.cos(raan), np.sin(raan)
    ci, si = math.cos(inc), math.sin(inc)
    x = a * (cu * cr - su * ci * sr)
    y = a * (cu * sr + su * ci * cr)
    z = a * (su * si)
    position = np.stack([x, y, z], axis=1)

    # Sub-satellite point on the rotating Earth (spherical model).
    theta_g = SIDEREAL_RATE_RAD_S * t
    lat = np.degrees(np.arcsin(np.clip(z / a, -1.0, 1.0)))
    lon = np.degrees(np.arctan2(y, x) - theta_g)
    lon = (lon + 180.0) % 360.0 - 180.0
    lon = np.where(lon == -180.0, 180.0, lon)

    # NE-bound iff latitude increases over one propagation step; the
    # finite difference matches the 1 s snapshot quantization.
    ne = np.sin(u + rate * DIRECTION_STEP_S) > su
    return StateBlock(config, t, position, lat, lon, ne)


def propagate(config: ShellConfig, t: float) -> list[SatState]:
    """Per-satellite states at time t, ordered by (p, n)."""
    return propagate_block(config, t).states()


def direction_of(state: SatState) -> Direction:
    return state.direction


def ground_position_eci(lat_deg: float, lon_deg: float, t: float) -> np.ndarray:
    """Inertial position of a point fixed to the rotating Earth surface."""
    lat = math.radians(lat_deg)
    lon = math.radians(lon_deg) + SIDEREAL_RATE_RAD_S * t
    r = EARTH_RADIUS_KM
    return np.array(
        [r * math.cos(lat) * math.cos(lon),
         r * math.cos(lat) * math.sin(lon),
         r * math.sin(lat)]
    )
