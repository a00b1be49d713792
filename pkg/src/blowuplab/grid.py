"""Uniform spatial grids: a symmetric 1-D interval or a radial ray.

The 1-D grid spans [-R, R]; the radial grid spans [0, R] with r = 0 as its
first node (the on-axis Laplacian limit is handled by the solver stencil).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import InvalidGrid


@dataclass(frozen=True, eq=False)
class SpatialGrid:
    dim: int
    radius: float
    nx: int
    dx: float
    coordinates: np.ndarray = field(repr=False)

    def __post_init__(self):
        c = self.coordinates
        if c.shape != (self.nx,):
            raise InvalidGrid(f"coordinate count {c.shape} does not match nx={self.nx}")
        spacings = np.diff(c)
        if np.any(spacings <= 0.0):
            raise InvalidGrid("coordinates must be strictly increasing")
        if np.max(np.abs(spacings - self.dx)) > 1e-12 * max(self.dx, 1.0):
            raise InvalidGrid("grid spacing is not uniform")
        c.flags.writeable = False

    def same_layout(self, other: "SpatialGrid") -> bool:
        return (
            self.dim == other.dim
            and self.nx == other.nx
            and abs(self.radius - other.radius) <= 1e-12 * max(1.0, self.radius)
        )


def interval_grid(radius: float, nx: int) -> SpatialGrid:
    """1-D grid on [-radius, radius] with nx points."""
    if nx < 8:
        raise InvalidGrid(f"nx must be at least 8, got {nx}")
    coords = np.linspace(-radius, radius, nx)
    return SpatialGrid(dim=1, radius=radius, nx=nx, dx=2.0 * radius / (nx - 1), coordinates=coords)


def radial_grid(radius: float, nx: int, dim: int) -> SpatialGrid:
    """Radial grid on [0, radius] with nx points, r = 0 first."""
    if nx < 8:
        raise InvalidGrid(f"nx must be at least 8, got {nx}")
    if dim < 2:
        raise InvalidGrid("radial grids require dim >= 2")
    coords = np.linspace(0.0, radius, nx)
    return SpatialGrid(dim=dim, radius=radius, nx=nx, dx=radius / (nx - 1), coordinates=coords)


def make_grid(params) -> SpatialGrid:
    """Grid matching a SimParams: interval for N = 1, radial ray otherwise."""
    if params.N == 1:
        return interval_grid(params.domain_radius, params.nx)
    return radial_grid(params.domain_radius, params.nx, params.N)
