"""Boundary conditions for the four face families of a 2-D Cartesian mesh."""

from dataclasses import dataclass

import numpy as np

from crkfr.boundary import (
    INFLOW,
    MIXED_HLLC,
    OUTFLOW,
    PERIODIC,
    WALL,
    BoundaryCondition,
)
from crkfr.equations.euler import hllc_flux


@dataclass
class BoundarySpec2D:
    xlo: BoundaryCondition
    xhi: BoundaryCondition
    ylo: BoundaryCondition
    yhi: BoundaryCondition

    def __post_init__(self):
        if (self.xlo.kind == PERIODIC) != (self.xhi.kind == PERIODIC):
            raise ValueError("periodic x boundaries must be declared on both sides")
        if (self.ylo.kind == PERIODIC) != (self.yhi.kind == PERIODIC):
            raise ValueError("periodic y boundaries must be declared on both sides")

    @classmethod
    def uniform(cls, kind, inflow=None):
        make = lambda: BoundaryCondition(kind, inflow=inflow)
        return cls(make(), make(), make(), make())

    @property
    def periodic_x(self):
        return self.xlo.kind == PERIODIC

    @property
    def periodic_y(self):
        return self.ylo.kind == PERIODIC


def _inflow_time_averages(bc, x, y, t, dt, tab, equation, axis):
    """Ghost traces along one boundary face family from prescribed data."""
    u_ghost = np.asarray(bc.inflow(x, y, t), dtype=float)
    favg = np.zeros_like(u_ghost)
    uavg = np.zeros_like(u_ghost)
    stages = []
    for i in range(tab.stages):
        gi = np.asarray(bc.inflow(x, y, t + tab.c[i] * dt), dtype=float)
        stages.append(gi)
        if tab.b[i] != 0.0:
            favg += tab.b[i] * equation.flux(gi, axis, x=x, y=y)
            uavg += tab.b[i] * gi
    return u_ghost, favg, uavg, np.asarray(stages)


def _wall_ghost(equation, u, favg, uavg, stages, axis):
    g_u = equation.reflect(u, axis)
    g_f = -equation.reflect(favg, axis)
    g_ua = equation.reflect(uavg, axis)
    g_st = None if stages is None else equation.reflect(stages, axis)
    return g_u, g_f, g_ua, g_st


def fill_face_ghosts_2d(face, bc_lo, bc_hi, equation, tab, t, dt, axis):
    """Fill ghost slots of the first/last face of one family in place.

    ``face`` carries arrays shaped (n_faces, n_lines, q, m) plus the face
    node coordinates x, y of shape (n_faces, n_lines, q).
    """

    def minus_of(idx):
        st = None if face.stage_minus is None else face.stage_minus[:, idx]
        return face.u_minus[idx], face.favg_minus[idx], face.uavg_minus[idx], st

    def plus_of(idx):
        st = None if face.stage_plus is None else face.stage_plus[:, idx]
        return face.u_plus[idx], face.favg_plus[idx], face.uavg_plus[idx], st

    def set_minus(idx, u, favg, uavg, st):
        face.u_minus[idx] = u
        face.favg_minus[idx] = favg
        face.uavg_minus[idx] = uavg
        if face.stage_minus is not None and st is not None:
            face.stage_minus[:, idx] = st

    def set_plus(idx, u, favg, uavg, st):
        face.u_plus[idx] = u
        face.favg_plus[idx] = favg
        face.uavg_plus[idx] = uavg
        if face.stage_plus is not None and st is not None:
            face.stage_plus[:, idx] = st

    # low side: ghost is minus; high side: ghost is plus
    if bc_lo.kind == PERIODIC:
        set_minus(0, *minus_of(-1))
    elif bc_lo.kind in (INFLOW, MIXED_HLLC):
        set_minus(0, *_inflow_time_averages(
            bc_lo, face.x[0], face.y[0], t, dt, tab, equation, axis
        ))
    elif bc_lo.kind == WALL:
        set_minus(0, *_wall_ghost(equation, *plus_of(0), axis))

    if bc_hi.kind == PERIODIC:
        set_plus(-1, *plus_of(0))
    elif bc_hi.kind in (INFLOW, MIXED_HLLC):
        set_plus(-1, *_inflow_time_averages(
            bc_hi, face.x[-1], face.y[-1], t, dt, tab, equation, axis
        ))
    elif bc_hi.kind == WALL:
        set_plus(-1, *_wall_ghost(equation, *minus_of(-1), axis))


def override_boundary_fluxes_2d(face_flux, face, bc_lo, bc_hi, equation, axis):
    def hllc_at(idx):
        return hllc_flux(
            equation,
            face.u_minus[idx], face.u_plus[idx],
            face.favg_minus[idx], face.favg_plus[idx],
            face.uavg_minus[idx], face.uavg_plus[idx],
            axis=axis,
        )

    if bc_lo.kind == INFLOW:
        face_flux[0] = face.favg_minus[0]
    elif bc_lo.kind == OUTFLOW:
        face_flux[0] = face.favg_plus[0]
    elif bc_lo.kind == MIXED_HLLC:
        face_flux[0] = hllc_at(0)

    if bc_hi.kind == INFLOW:
        face_flux[-1] = face.favg_plus[-1]
    elif bc_hi.kind == OUTFLOW:
        face_flux[-1] = face.favg_minus[-1]
    elif bc_hi.kind == MIXED_HLLC:
        face_flux[-1] = hllc_at(-1)
