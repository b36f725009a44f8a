"""Compressible Euler equations in one and two space dimensions.

Conserved variables are (rho, rho*v1, E) and (rho, rho*v1, rho*v2, E); a
polytropic equation of state closes the system.  Admissibility requires
positive density and pressure; pressure is a concave function of the
conserved state wherever the density is positive, which the limiters rely
on.
"""

import numpy as np

from crkfr.equations.base import EquationSystem


def _pressure(u, gamma, n_mom):
    kinetic = 0.5 * np.sum(u[..., 1 : 1 + n_mom] ** 2, axis=-1) / u[..., 0]
    return (gamma - 1.0) * (u[..., -1] - kinetic)


class _EulerBase(EquationSystem):
    constraint_names = ("density", "pressure")

    def __init__(self, gamma=1.4):
        if not gamma > 1.0:
            raise ValueError("adiabatic constant must exceed 1")
        self.gamma = float(gamma)

    @property
    def _n_mom(self):
        return self.dim

    def pressure(self, u):
        """Pressure from conserved variables; rho <= 0 is a domain error."""
        u = np.asarray(u, dtype=float)
        if np.any(u[..., 0] <= 0.0):
            raise ValueError("pressure undefined for non-positive density")
        return _pressure(u, self.gamma, self._n_mom)

    def sound_speed(self, u):
        p = self.pressure(u)
        if np.any(p <= 0.0):
            raise ValueError("sound speed undefined for non-positive pressure")
        return np.sqrt(self.gamma * p / u[..., 0])

    def constraints(self, u):
        u = np.asarray(u, dtype=float)
        rho = u[..., 0]
        with np.errstate(divide="ignore", invalid="ignore"):
            p = _pressure(u, self.gamma, self._n_mom)
        p = np.where(rho > 0.0, p, -np.inf)
        return np.stack([rho, p], axis=-1)

    def flux_domain_ok(self, u):
        return np.isfinite(u).all(axis=-1) & (u[..., 0] > 0.0)

    def momentum_index(self, axis):
        return 1 + axis

    def reflect(self, u, axis=0):
        out = np.array(u, dtype=float, copy=True)
        out[..., 1 + axis] *= -1.0
        return out

    def _speed(self, u, axis):
        # invalid states (possible in extrapolated traces near shocks) get
        # speed 0; the flux limiter discards the affected interface flux
        u = np.asarray(u, dtype=float)
        rho = u[..., 0]
        with np.errstate(divide="ignore", invalid="ignore"):
            v = np.abs(u[..., 1 + axis] / rho)
            p = _pressure(u, self.gamma, self._n_mom)
            c = np.sqrt(self.gamma * p / rho)
            speed = v + c
        valid = np.isfinite(speed) & (rho > 0.0) & (p > 0.0)
        return np.where(valid, speed, 0.0)


class Euler1D(_EulerBase):
    name = "euler1d"
    dim = 1
    n_vars = 3
    variable_names = ("rho", "mom", "energy")

    def flux_x(self, u, x=None, y=None):
        rho = u[..., 0]
        v = u[..., 1] / rho
        p = _pressure(u, self.gamma, 1)
        return np.stack([u[..., 1], p + u[..., 1] * v, (u[..., 2] + p) * v], axis=-1)

    def max_abs_speed_x(self, u, x=None, y=None):
        return self._speed(u, 0)

    def prim_to_cons(self, rho, v1, p):
        rho = np.asarray(rho, dtype=float)
        energy = p / (self.gamma - 1.0) + 0.5 * rho * np.asarray(v1) ** 2
        return np.stack(np.broadcast_arrays(rho, rho * v1, energy), axis=-1).astype(float)


class Euler2D(_EulerBase):
    name = "euler2d"
    dim = 2
    n_vars = 4
    variable_names = ("rho", "mom_x", "mom_y", "energy")

    def __init__(self, gamma=1.4, gravity=0.0):
        super().__init__(gamma)
        # constant acceleration along +y; adds (0, 0, g*rho, g*rho*v2)
        self.gravity = float(gravity)
        self.has_source = self.gravity != 0.0

    def source(self, u, x=None, y=None, t=0.0):
        if self.gravity == 0.0:
            raise ValueError("gravity source requested but gravity is zero")
        out = np.zeros_like(u)
        out[..., 2] = self.gravity * u[..., 0]
        out[..., 3] = self.gravity * u[..., 2]
        return out

    def flux_x(self, u, x=None, y=None):
        rho = u[..., 0]
        v1 = u[..., 1] / rho
        p = _pressure(u, self.gamma, 2)
        return np.stack(
            [u[..., 1], p + u[..., 1] * v1, u[..., 2] * v1, (u[..., 3] + p) * v1], axis=-1
        )

    def flux_y(self, u, x=None, y=None):
        rho = u[..., 0]
        v2 = u[..., 2] / rho
        p = _pressure(u, self.gamma, 2)
        return np.stack(
            [u[..., 2], u[..., 1] * v2, p + u[..., 2] * v2, (u[..., 3] + p) * v2], axis=-1
        )

    def max_abs_speed_x(self, u, x=None, y=None):
        return self._speed(u, 0)

    def max_abs_speed_y(self, u, x=None, y=None):
        return self._speed(u, 1)

    def prim_to_cons(self, rho, v1, v2, p):
        rho = np.asarray(rho, dtype=float)
        energy = p / (self.gamma - 1.0) + 0.5 * rho * (np.asarray(v1) ** 2 + np.asarray(v2) ** 2)
        return np.stack(np.broadcast_arrays(rho, rho * v1, rho * v2, energy), axis=-1).astype(float)


def _batten_speeds(eq, ul, ur, axis):
    """Left/right wave-speed bounds from Roe-averaged states."""
    g = eq.gamma
    rl, rr = ul[..., 0], ur[..., 0]
    vl = ul[..., 1 + axis] / rl
    vr = ur[..., 1 + axis] / rr
    pl = eq.pressure(ul)
    pr = eq.pressure(ur)
    cl = np.sqrt(g * pl / rl)
    cr = np.sqrt(g * pr / rr)
    sql, sqr = np.sqrt(rl), np.sqrt(rr)
    hl = (ul[..., -1] + pl) / rl
    hr = (ur[..., -1] + pr) / rr
    h_roe = (sql * hl + sqr * hr) / (sql + sqr)
    ke_roe = 0.0
    v_roe_n = None
    for ax in range(eq.dim):
        va = (sql * ul[..., 1 + ax] / rl + sqr * ur[..., 1 + ax] / rr) / (sql + sqr)
        ke_roe = ke_roe + 0.5 * va * va
        if ax == axis:
            v_roe_n = va
    c_roe = np.sqrt((g - 1.0) * np.maximum(h_roe - ke_roe, 1e-300))
    s_left = np.minimum(vl - cl, v_roe_n - c_roe)
    s_right = np.maximum(vr + cr, v_roe_n + c_roe)
    return s_left, s_right


def hllc_flux(eq, u_left, u_right, f_left, f_right, ua_left, ua_right, axis=0):
    """HLLC interface flux assembled from trace data.

    Wave speeds come from the current-time traces (u_left, u_right); the flux
    and state payloads (f_*, ua_*) may be time averages, in which case the
    result approximates the time-averaged upwind flux.
    """
    s_left, s_right = _batten_speeds(eq, u_left, u_right, axis)

    rl = ua_left[..., 0]
    rr = ua_right[..., 0]
    vl = ua_left[..., 1 + axis] / rl
    vr = ua_right[..., 1 + axis] / rr
    pl = _pressure(ua_left, eq.gamma, eq.dim)
    pr = _pressure(ua_right, eq.gamma, eq.dim)

    num = rr * vr * (s_right - vr) - rl * vl * (s_left - vl) + pl - pr
    den = rr * (s_right - vr) - rl * (s_left - vl)
    s_star = num / den

    def star_state(ua, rho, v, p, s_k):
        factor = rho * (s_k - v) / (s_k - s_star)
        out = np.empty_like(ua)
        out[..., 0] = factor
        for ax in range(eq.dim):
            out[..., 1 + ax] = factor * (s_star if ax == axis else ua[..., 1 + ax] / rho)
        e_term = ua[..., -1] / rho + (s_star - v) * (s_star + p / (rho * (s_k - v)))
        out[..., -1] = factor * e_term
        return out

    fl_star = f_left + s_left[..., None] * (star_state(ua_left, rl, vl, pl, s_left) - ua_left)
    fr_star = f_right + s_right[..., None] * (star_state(ua_right, rr, vr, pr, s_right) - ua_right)

    out = np.where((s_left >= 0.0)[..., None], f_left, fl_star)
    out = np.where((s_star < 0.0)[..., None], fr_star, out)
    out = np.where((s_right <= 0.0)[..., None], f_right, out)
    return out
