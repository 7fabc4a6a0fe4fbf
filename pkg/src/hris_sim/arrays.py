"""Planar array geometry, steering vectors and far-field array factors.

The surface is a rectangular lattice of elements in the x-y plane with its
broadside along +z.  Directions are given as (elevation, azimuth), where
elevation is measured from broadside (+z) and azimuth rotates the projection
of the direction in the x-y plane, counted from +x towards +y.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

TWO_PI = 2.0 * np.pi


@dataclass(frozen=True)
class PlanarArray:
    """Rectangular lattice of n_h x n_v elements with uniform spacing."""

    n_h: int
    n_v: int
    spacing_m: float
    wavelength_m: float

    def __post_init__(self):
        if self.n_h < 1 or self.n_v < 1:
            raise ValueError("element counts must be at least 1")
        if self.spacing_m <= 0.0:
            raise ValueError("element spacing must be positive")
        if self.wavelength_m <= 0.0:
            raise ValueError("wavelength must be positive")

    @property
    def n_elements(self) -> int:
        return self.n_h * self.n_v

    @property
    def wavenumber(self) -> float:
        """Free-space wavenumber 2*pi/lambda in rad/m."""
        return TWO_PI / self.wavelength_m


@dataclass(frozen=True)
class Direction:
    """Propagation direction; elevation in [0, pi/2), azimuth wrapped to [0, 2*pi)."""

    elevation_rad: float
    azimuth_rad: float = 0.0

    def __post_init__(self):
        if not 0.0 <= self.elevation_rad < np.pi / 2.0:
            raise ValueError(
                f"elevation {self.elevation_rad!r} rad outside [0, pi/2)")
        object.__setattr__(self, "azimuth_rad", float(np.mod(self.azimuth_rad, TWO_PI)))


def unit_vector(direction: Direction) -> np.ndarray:
    """Cartesian unit vector for a direction (broadside -> (0, 0, 1))."""
    el, az = direction.elevation_rad, direction.azimuth_rad
    se = np.sin(el)
    return np.array([se * np.cos(az), se * np.sin(az), np.cos(el)])


@lru_cache(maxsize=32)
def element_positions(arr: PlanarArray) -> np.ndarray:
    """(N, 3) element coordinates in metres, lattice centred on the origin.

    Elements are ordered row-major: index n = iv * n_h + ih, with ih moving
    along x and iv along y.
    """
    ih = np.arange(arr.n_h) - (arr.n_h - 1) / 2.0
    iv = np.arange(arr.n_v) - (arr.n_v - 1) / 2.0
    xx, yy = np.meshgrid(ih * arr.spacing_m, iv * arr.spacing_m)
    pos = np.zeros((arr.n_elements, 3))
    pos[:, 0] = xx.ravel()
    pos[:, 1] = yy.ravel()
    return pos


def steering_vector(arr: PlanarArray, direction: Direction) -> np.ndarray:
    """Unit-modulus phase ramp a_n = exp(j * k * <p_n, u>) across the lattice."""
    phases = arr.wavenumber * element_positions(arr) @ unit_vector(direction)
    return np.exp(1j * phases)


def steering_elevation_gradient(arr: PlanarArray, direction: Direction) -> np.ndarray:
    """Derivative of the steering vector with respect to elevation.

    The elements sit at z = 0, so only the in-plane coordinates contribute:
    da_n/d(el) = j * k * cos(el) * (x_n cos(az) + y_n sin(az)) * a_n.
    """
    el, az = direction.elevation_rad, direction.azimuth_rad
    pos = element_positions(arr)
    radial = pos[:, 0] * np.cos(az) + pos[:, 1] * np.sin(az)
    return 1j * arr.wavenumber * np.cos(el) * radial * steering_vector(arr, direction)


def steering_grid(arr: PlanarArray, elevations_rad: np.ndarray, azimuth_rad: float = 0.0) -> np.ndarray:
    """Stack steering vectors for many elevations at one azimuth, shape (N, len(grid))."""
    elevations_rad = np.asarray(elevations_rad, dtype=float)
    pos = element_positions(arr)
    se = np.sin(elevations_rad)
    u = np.stack([se * np.cos(azimuth_rad), se * np.sin(azimuth_rad), np.cos(elevations_rad)])
    return np.exp(1j * arr.wavenumber * pos @ u)


def array_factor(arr: PlanarArray, weights: np.ndarray, direction: Direction) -> complex:
    """Far-field pattern value sum_n w_n * a_n(direction).

    With ``weights = conj(steering_vector(arr, d0))`` the magnitude peaks at
    ``d0`` with value N (matched phase profile).
    """
    weights = np.asarray(weights)
    if weights.shape != (arr.n_elements,):
        raise ValueError(
            f"weights length {weights.shape} does not match {arr.n_elements} elements")
    return complex(np.dot(weights, steering_vector(arr, direction)))


def steered_weights(arr: PlanarArray, direction: Direction) -> np.ndarray:
    """Phase-only profile that points the main lobe towards ``direction``."""
    return np.conj(steering_vector(arr, direction))


def plane_direction(angle_rad: float, azimuth_rad: float = 0.0) -> Direction:
    """Map a signed elevation-plane angle onto a Direction.

    Positive angles keep the given azimuth; negative angles flip to the
    opposite half-plane (azimuth + pi), which is how a symmetric pattern cut
    across broadside is parameterised.
    """
    if angle_rad >= 0.0:
        return Direction(angle_rad, azimuth_rad)
    return Direction(-angle_rad, azimuth_rad + np.pi)
