"""Common interface for the physics plug-ins.

An equation system provides fluxes, wave-speed estimates, admissibility
constraints and optional sources as vectorized functions over state arrays
with the conserved variables on the last axis.  All methods are pure; the
objects carry only fixed parameters and are safe to share between threads.
"""

import numpy as np

# strict-positivity threshold for every admissibility constraint
EPS_POS = 1e-13


class EquationSystem:
    """Base class; subclasses fill in fluxes, speeds and constraints."""

    name = "equation"
    dim = 1
    n_vars = 1
    has_source = False
    variable_names = ("u",)
    constraint_names = ()

    # --- fluxes -------------------------------------------------------
    def flux_x(self, u, x=None, y=None):
        raise NotImplementedError

    def flux_y(self, u, x=None, y=None):
        raise NotImplementedError

    # --- wave speeds ----------------------------------------------------
    def max_abs_speed_x(self, u, x=None, y=None):
        raise NotImplementedError

    def max_abs_speed_y(self, u, x=None, y=None):
        raise NotImplementedError

    # --- admissibility --------------------------------------------------
    @property
    def n_constraints(self):
        return len(self.constraint_names)

    def constraints(self, u):
        """Values of the admissibility constraints, stacked on a new last axis."""
        return np.zeros(u.shape[:-1] + (0,))

    def admissible(self, u, eps=EPS_POS):
        if self.n_constraints == 0:
            return np.isfinite(u).all(axis=-1)
        p = self.constraints(u)
        return np.isfinite(u).all(axis=-1) & (p >= eps).all(axis=-1)

    def flux_domain_ok(self, u):
        """Where the flux may be evaluated at all (weaker than admissible)."""
        return np.isfinite(u).all(axis=-1)

    # --- sources --------------------------------------------------------
    def source(self, u, x=None, y=None, t=0.0):
        raise NotImplementedError

    # --- wall reflection --------------------------------------------------
    def momentum_index(self, axis):
        raise NotImplementedError(f"{self.name} has no wall boundary support")

    def reflect(self, u, axis=0):
        """Mirror a state across a wall with normal along the given axis."""
        raise NotImplementedError(f"{self.name} has no wall boundary support")

    def max_abs_speed(self, u, axis, x=None, y=None):
        return self.max_abs_speed_x(u, x, y) if axis == 0 else self.max_abs_speed_y(u, x, y)

    def flux(self, u, axis, x=None, y=None):
        return self.flux_x(u, x, y) if axis == 0 else self.flux_y(u, x, y)


def rusanov_speed(equation, u_left, u_right, axis=0, x=None, y=None):
    """Local wave-speed bound: the larger spectral radius of the two states."""
    sl = equation.max_abs_speed(u_left, axis, x, y)
    sr = equation.max_abs_speed(u_right, axis, x, y)
    return np.maximum(sl, sr)


def rusanov_flux(equation, u_left, u_right, axis=0, x=None, y=None):
    """Plain Rusanov numerical flux of two states at the same position."""
    lam = rusanov_speed(equation, u_left, u_right, axis, x, y)
    fl = equation.flux(u_left, axis, x, y)
    fr = equation.flux(u_right, axis, x, y)
    return 0.5 * (fl + fr) - 0.5 * lam[..., None] * (u_right - u_left)
