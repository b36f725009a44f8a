"""Cartesian meshes in one and two dimensions."""

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class Mesh1D:
    xmin: float
    xmax: float
    n_elements: int

    def __post_init__(self):
        if self.n_elements < 1:
            raise ValueError("mesh needs at least one element")
        if not self.xmax > self.xmin:
            raise ValueError("empty or inverted domain")

    @property
    def dx(self):
        return (self.xmax - self.xmin) / self.n_elements

    @property
    def faces(self):
        return np.linspace(self.xmin, self.xmax, self.n_elements + 1)

    def node_coords(self, basis):
        """Physical solution-point coordinates, shape (n_elements, n_nodes)."""
        left = self.faces[:-1]
        return left[:, None] + basis.points[None, :] * self.dx


@dataclass(frozen=True)
class Mesh2D:
    xmin: float
    xmax: float
    ymin: float
    ymax: float
    nx: int
    ny: int

    def __post_init__(self):
        if self.nx < 1 or self.ny < 1:
            raise ValueError("mesh needs at least one element per direction")
        if not (self.xmax > self.xmin and self.ymax > self.ymin):
            raise ValueError("empty or inverted domain")

    @property
    def dx(self):
        return (self.xmax - self.xmin) / self.nx

    @property
    def dy(self):
        return (self.ymax - self.ymin) / self.ny

    @property
    def xfaces(self):
        return np.linspace(self.xmin, self.xmax, self.nx + 1)

    @property
    def yfaces(self):
        return np.linspace(self.ymin, self.ymax, self.ny + 1)

    def node_coords(self, basis):
        """Coordinates (x, y), each shaped (nx, ny, n_nodes, n_nodes)."""
        xs = self.xfaces[:-1][:, None] + basis.points[None, :] * self.dx
        ys = self.yfaces[:-1][:, None] + basis.points[None, :] * self.dy
        x = xs[:, None, :, None]
        y = ys[None, :, None, :]
        shape = (self.nx, self.ny, basis.n_nodes, basis.n_nodes)
        return np.broadcast_to(x, shape).copy(), np.broadcast_to(y, shape).copy()
