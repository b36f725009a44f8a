"""Scalar conservation laws: constant/variable-coefficient advection, Burgers."""

import numpy as np

from crkfr.equations.base import EquationSystem


class LinearAdvection(EquationSystem):
    name = "linear_advection"
    dim = 1
    n_vars = 1

    def __init__(self, speed=1.0):
        self.speed = float(speed)

    def flux_x(self, u, x=None, y=None):
        return self.speed * u

    def max_abs_speed_x(self, u, x=None, y=None):
        return np.full(u.shape[:-1], abs(self.speed))


class VariableAdvection1D(EquationSystem):
    """u_t + (a(x) u)_x = 0 with a spatially varying coefficient."""

    name = "variable_advection"
    dim = 1
    n_vars = 1

    def __init__(self, coefficient):
        self.coefficient = coefficient

    def flux_x(self, u, x=None, y=None):
        if x is None:
            raise ValueError("variable advection flux needs coordinates")
        return np.asarray(self.coefficient(x))[..., None] * u

    def max_abs_speed_x(self, u, x=None, y=None):
        if x is None:
            raise ValueError("variable advection speed needs coordinates")
        a = np.abs(np.asarray(self.coefficient(x), dtype=float))
        return np.broadcast_to(a, u.shape[:-1]).copy()


class VariableAdvection2D(EquationSystem):
    """u_t + (a1(x,y) u)_x + (a2(x,y) u)_y = 0, e.g. solid-body rotation."""

    name = "variable_advection_2d"
    dim = 2
    n_vars = 1

    def __init__(self, coeff_x, coeff_y):
        self.coeff_x = coeff_x
        self.coeff_y = coeff_y

    def flux_x(self, u, x=None, y=None):
        return np.asarray(self.coeff_x(x, y))[..., None] * u

    def flux_y(self, u, x=None, y=None):
        return np.asarray(self.coeff_y(x, y))[..., None] * u

    def max_abs_speed_x(self, u, x=None, y=None):
        a = np.abs(np.asarray(self.coeff_x(x, y), dtype=float))
        return np.broadcast_to(a, u.shape[:-1]).copy()

    def max_abs_speed_y(self, u, x=None, y=None):
        a = np.abs(np.asarray(self.coeff_y(x, y), dtype=float))
        return np.broadcast_to(a, u.shape[:-1]).copy()


class Burgers(EquationSystem):
    name = "burgers"
    dim = 1
    n_vars = 1

    def flux_x(self, u, x=None, y=None):
        return 0.5 * u * u

    def max_abs_speed_x(self, u, x=None, y=None):
        return np.abs(u[..., 0])
