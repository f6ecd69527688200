"""Circular-orbit pass geometry for a LEO satellite and its ground stations.

Distances are kilometres, angles radians. Degrees are accepted only at the
command-line boundary. The ground track is modelled on a non-rotating Earth;
the satellite moves on a circular orbit whose period follows from Kepler's
third law.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

__all__ = [
    "OrbitalConfig",
    "PassGeometry",
    "slant_range",
    "elevation",
    "pass_geometry",
    "slant_range_from_elevation",
    "elevation_from_slant_range",
    "ground_track_separation",
    "orbital_period",
    "buffer_time",
]

_ASIN_TOL = 1e-12


@dataclass(frozen=True)
class OrbitalConfig:
    """Circular-orbit parameters.

    earth_radius and altitude are in km, gravitational_parameter in km^3/s^2.
    altitude = 0 is allowed (surface-grazing orbit, useful for scaling checks).
    """

    earth_radius: float = 6371.0
    altitude: float = 500.0
    gravitational_parameter: float = 398600.0

    def __post_init__(self):
        if self.earth_radius <= 0.0:
            raise ValueError("earth_radius must be positive")
        if self.altitude < 0.0:
            raise ValueError("altitude must be non-negative")
        if self.gravitational_parameter <= 0.0:
            raise ValueError("gravitational_parameter must be positive")

    @property
    def orbit_radius(self) -> float:
        """Distance of the satellite from the Earth centre (km)."""
        return self.earth_radius + self.altitude


@dataclass(frozen=True)
class PassGeometry:
    """Instantaneous geometry of one satellite/ground-station line of sight."""

    ground_track_separation: float  # km, arc from the sub-satellite point
    slant_range: float              # km, line-of-sight distance
    elevation: float                # rad above the local horizon


def slant_range(ground_track: float, orbit: OrbitalConfig) -> float:
    """Line-of-sight distance (km) for a ground-track separation (km).

    Law of cosines in the Earth-centre / station / satellite triangle, with
    central angle ground_track / earth_radius.
    """
    r_e = orbit.earth_radius
    r_s = orbit.orbit_radius
    if ground_track < 0.0:
        raise ValueError("ground_track must be non-negative")
    central = ground_track / r_e
    if central >= math.pi:
        raise ValueError("ground_track exceeds half the Earth circumference")
    l_sq = r_e * r_e + r_s * r_s - 2.0 * r_e * r_s * math.cos(central)
    if l_sq <= 0.0:
        raise ValueError("degenerate geometry: non-positive squared range")
    return math.sqrt(l_sq)


def elevation(ground_track: float, orbit: OrbitalConfig) -> float:
    """Elevation angle (rad) of the satellite seen from the station.

    pi/2 at zenith (ground_track = 0), negative once the satellite drops
    below the station's horizon.
    """
    central = ground_track / orbit.earth_radius
    if ground_track == 0.0:
        return math.pi / 2.0
    l = slant_range(ground_track, orbit)
    arg = orbit.earth_radius / l * math.sin(central)
    if arg > 1.0:
        if arg > 1.0 + _ASIN_TOL:
            raise ValueError(f"arcsin argument {arg} outside [-1, 1]")
        arg = 1.0
    return math.pi / 2.0 - central - math.asin(arg)


def pass_geometry(ground_track: float, orbit: OrbitalConfig) -> PassGeometry:
    """Bundle slant range and elevation for one ground-track separation."""
    return PassGeometry(
        ground_track_separation=ground_track,
        slant_range=slant_range(ground_track, orbit),
        elevation=elevation(ground_track, orbit),
    )


def slant_range_from_elevation(theta: float, orbit: OrbitalConfig) -> float:
    """Closed-form inverse: slant range (km) at elevation theta (rad).

    Valid for 0 < theta <= pi/2; returns altitude exactly at zenith.
    """
    if not 0.0 < theta <= math.pi / 2.0:
        raise ValueError("elevation must lie in (0, pi/2]")
    r_e = orbit.earth_radius
    h = orbit.altitude
    s = r_e * math.sin(theta)
    return math.sqrt(s * s + 2.0 * r_e * h + h * h) - s


def elevation_from_slant_range(l: float, orbit: OrbitalConfig) -> float:
    """Elevation angle (rad) at which the slant range equals l (km).

    Defined for l between the altitude (zenith) and the horizon range
    sqrt(orbit_radius^2 - earth_radius^2).
    """
    if l <= 0.0:
        raise ValueError("slant range must be positive")
    r_e = orbit.earth_radius
    r_s = orbit.orbit_radius
    arg = (r_s * r_s - r_e * r_e - l * l) / (2.0 * l * r_e)
    if arg > 1.0 + _ASIN_TOL or arg < -_ASIN_TOL:
        raise ValueError(f"slant range {l} km is outside the visible pass")
    arg = max(0.0, min(1.0, arg))
    return math.asin(arg)


def ground_track_separation(l: float, orbit: OrbitalConfig) -> float:
    """Ground-track separation (km) that produces slant range l (km)."""
    r_e = orbit.earth_radius
    r_s = orbit.orbit_radius
    arg = (r_e * r_e + r_s * r_s - l * l) / (2.0 * r_e * r_s)
    if not -1.0 <= arg <= 1.0:
        if abs(arg) > 1.0 + _ASIN_TOL:
            raise ValueError(f"slant range {l} km is geometrically unreachable")
        arg = max(-1.0, min(1.0, arg))
    return r_e * math.acos(arg)


def orbital_period(orbit: OrbitalConfig) -> float:
    """Circular-orbit period (s) from Kepler's third law."""
    a = orbit.orbit_radius
    return 2.0 * math.pi * math.sqrt(a ** 3 / orbit.gravitational_parameter)


def buffer_time(ogs_separation: float, orbit: OrbitalConfig) -> float:
    """Storage interval (s) between overhead passes of two stations.

    Arc distance between the stations divided by the ground-track speed
    2*pi*earth_radius / period.
    """
    if ogs_separation < 0.0:
        raise ValueError("ogs_separation must be non-negative")
    ground_speed = 2.0 * math.pi * orbit.earth_radius / orbital_period(orbit)
    return ogs_separation / ground_speed
