"""Nodal solution container tying values to mesh, basis and variable names."""

from dataclasses import dataclass

import numpy as np


@dataclass
class SolutionField:
    values: np.ndarray       # (E, P, M) in 1-D, (nx, ny, P, Q, M) in 2-D
    time: float
    mesh: object
    basis: object
    equation_name: str
    variable_names: tuple

    @property
    def dim(self):
        return 1 if self.values.ndim == 3 else 2

    @property
    def n_vars(self):
        return self.values.shape[-1]

    def copy(self):
        return SolutionField(
            self.values.copy(), self.time, self.mesh, self.basis,
            self.equation_name, self.variable_names,
        )


def project_initial(u0, mesh, basis, dim):
    """Collocation projection: sample the initial condition at solution points."""
    if dim == 1:
        x = mesh.node_coords(basis)
        vals = np.asarray(u0(x), dtype=float)
    else:
        x, y = mesh.node_coords(basis)
        vals = np.asarray(u0(x, y), dtype=float)
    if not np.isfinite(vals).all():
        raise ValueError("initial condition produced non-finite values")
    return vals
