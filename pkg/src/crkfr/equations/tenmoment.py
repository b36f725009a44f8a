"""Ten-moment Gaussian-closure equations with quiver-energy source terms.

The state is (rho, rho*v1, rho*v2, E11, E12, E22) with a symmetric pressure
tensor p = 2E - rho v (x) v.  A state is admissible when the density is
positive and p is positive definite; the constraint set used by the limiters
is (rho, p11, p22 - p12^2/p11).  The Schur complement replaces det(p) as the
third constraint because it is concave on {rho > 0, p11 > 0} while the raw
determinant is not; both describe the same admissible set.
"""

from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from crkfr.equations.base import EquationSystem


@dataclass
class QuiverEnergy:
    """Electron quiver-energy potential W(x, y, t) with analytic gradients."""

    w: Callable
    dwdx: Callable
    dwdy: Optional[Callable] = None
    absorption: float = 0.0
    x_component_only: bool = False


class TenMoment(EquationSystem):
    name = "tenmoment"
    dim = 2
    n_vars = 6
    variable_names = ("rho", "mom_x", "mom_y", "E11", "E12", "E22")
    constraint_names = ("density", "p11", "p_schur")

    def __init__(self, quiver=None):
        self.quiver = quiver
        self.has_source = quiver is not None

    # --- pressure tensor -------------------------------------------------
    def pressure_tensor(self, u):
        rho = u[..., 0]
        v1 = u[..., 1] / rho
        v2 = u[..., 2] / rho
        p11 = 2.0 * u[..., 3] - rho * v1 * v1
        p12 = 2.0 * u[..., 4] - rho * v1 * v2
        p22 = 2.0 * u[..., 5] - rho * v2 * v2
        return p11, p12, p22

    def det_p(self, u):
        p11, p12, p22 = self.pressure_tensor(u)
        return p11 * p22 - p12 * p12

    def constraints(self, u):
        u = np.asarray(u, dtype=float)
        rho = u[..., 0]
        with np.errstate(divide="ignore", invalid="ignore"):
            p11, p12, p22 = self.pressure_tensor(u)
            schur = p22 - p12 * p12 / p11
        bad = ~(rho > 0.0)
        p11 = np.where(bad, -np.inf, p11)
        schur = np.where(bad | ~(p11 > 0.0), -np.inf, schur)
        return np.stack([rho, p11, schur], axis=-1)

    def flux_domain_ok(self, u):
        return np.isfinite(u).all(axis=-1) & (u[..., 0] > 0.0)

    # --- fluxes -----------------------------------------------------------
    def flux_x(self, u, x=None, y=None):
        rho = u[..., 0]
        v1 = u[..., 1] / rho
        v2 = u[..., 2] / rho
        p11, p12, p22 = self.pressure_tensor(u)
        return np.stack(
            [
                u[..., 1],
                p11 + rho * v1 * v1,
                p12 + rho * v1 * v2,
                (u[..., 3] + p11) * v1,
                u[..., 4] * v1 + 0.5 * (p11 * v2 + p12 * v1),
                u[..., 5] * v1 + p12 * v2,
            ],
            axis=-1,
        )

    def flux_y(self, u, x=None, y=None):
        rho = u[..., 0]
        v1 = u[..., 1] / rho
        v2 = u[..., 2] / rho
        p11, p12, p22 = self.pressure_tensor(u)
        return np.stack(
            [
                u[..., 2],
                p12 + rho * v1 * v2,
                p22 + rho * v2 * v2,
                u[..., 3] * v2 + p12 * v1,
                u[..., 4] * v2 + 0.5 * (p12 * v2 + p22 * v1),
                (u[..., 5] + p22) * v2,
            ],
            axis=-1,
        )

    # --- wave speeds --------------------------------------------------------
    def _speed(self, u, mom, press):
        rho = u[..., 0]
        with np.errstate(divide="ignore", invalid="ignore"):
            c = np.sqrt(3.0 * press / rho)
            speed = np.abs(u[..., mom] / rho) + c
        valid = np.isfinite(speed) & (rho > 0.0) & (press > 0.0)
        return np.where(valid, speed, 0.0)

    def max_abs_speed_x(self, u, x=None, y=None):
        with np.errstate(divide="ignore", invalid="ignore"):
            p11, _, _ = self.pressure_tensor(u)
        return self._speed(u, 1, p11)

    def max_abs_speed_y(self, u, x=None, y=None):
        with np.errstate(divide="ignore", invalid="ignore"):
            _, _, p22 = self.pressure_tensor(u)
        return self._speed(u, 2, p22)

    # --- sources ---------------------------------------------------------
    def source(self, u, x=None, y=None, t=0.0):
        """Quiver-energy source: gradient terms plus optional absorption."""
        if self.quiver is None:
            raise ValueError("ten-moment source requested without a quiver potential")
        q = self.quiver
        if y is None:
            y = np.zeros_like(np.asarray(x, dtype=float))
        rho = u[..., 0]
        v1 = u[..., 1] / rho
        v2 = u[..., 2] / rho
        out = np.zeros_like(u)

        wx = np.asarray(q.dwdx(x, y, t), dtype=float)
        out[..., 1] = -0.5 * rho * wx
        out[..., 3] = -0.5 * rho * v1 * wx
        out[..., 4] += -0.25 * rho * v2 * wx

        if not q.x_component_only:
            if q.dwdy is None:
                raise ValueError("quiver potential lacks a y-gradient")
            wy = np.asarray(q.dwdy(x, y, t), dtype=float)
            out[..., 2] = -0.5 * rho * wy
            out[..., 4] += -0.25 * rho * v1 * wy
            out[..., 5] = -0.5 * rho * v2 * wy

        if q.absorption != 0.0:
            out[..., 3] += q.absorption * rho * np.asarray(q.w(x, y, t), dtype=float)
        return out

    # --- wall reflection ------------------------------------------------
    def momentum_index(self, axis):
        return 1 + axis

    def reflect(self, u, axis=0):
        out = np.array(u, dtype=float, copy=True)
        out[..., 1 + axis] *= -1.0
        out[..., 4] *= -1.0  # shear components flip with the normal velocity
        return out
