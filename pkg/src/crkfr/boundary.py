"""Weak boundary conditions through boundary numerical fluxes.

The default treatment works only with interface ghost values: each boundary
face gets ghost-side traces (u, time-averaged flux and solution, optionally
per-stage traces) filled from the boundary kind, after which the standard
numerical flux applies.  Fully one-sided faces override the flux with the
appropriate one-sided time average.  An alternate treatment runs the local
compact stages inside a ghost element and extracts the traces from there;
both are exposed so they can be cross-validated.
"""

from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from crkfr import core1d
from crkfr.equations.euler import hllc_flux

PERIODIC = "periodic"
INFLOW = "inflow"
OUTFLOW = "outflow"
WALL = "wall"
MIXED_HLLC = "mixed_hllc"

KINDS = (PERIODIC, INFLOW, OUTFLOW, WALL, MIXED_HLLC)

FACE_TREATMENT = "face"
GHOST_ELEMENT_TREATMENT = "ghost_element"


@dataclass
class BoundaryCondition:
    kind: str
    # inflow data g(x, t) -> states, vectorized over x; required for inflow/mixed
    inflow: Optional[Callable] = None

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown boundary kind {self.kind!r}")
        if self.kind in (INFLOW, MIXED_HLLC) and self.inflow is None:
            raise ValueError(f"{self.kind} boundary requires inflow data")


@dataclass
class BoundarySpec1D:
    left: BoundaryCondition
    right: BoundaryCondition

    def __post_init__(self):
        if (self.left.kind == PERIODIC) != (self.right.kind == PERIODIC):
            raise ValueError("periodic boundaries must be declared on both sides")

    @property
    def periodic(self):
        return self.left.kind == PERIODIC


def periodic_1d():
    return BoundarySpec1D(BoundaryCondition(PERIODIC), BoundaryCondition(PERIODIC))


def _inflow_time_averages(bc, x, t, dt, tab, equation):
    """Ghost traces for prescribed inflow: sample g at the stage times."""
    xs = np.asarray([x], dtype=float)
    u_ghost = np.asarray(bc.inflow(xs, t), dtype=float).reshape(-1)
    favg = np.zeros_like(u_ghost)
    uavg = np.zeros_like(u_ghost)
    stages = []
    for i in range(tab.stages):
        gi = np.asarray(bc.inflow(xs, t + tab.c[i] * dt), dtype=float).reshape(1, -1)
        stages.append(gi[0])
        if tab.b[i] != 0.0:
            favg += tab.b[i] * equation.flux_x(gi, x=xs)[0]
            uavg += tab.b[i] * gi[0]
    return u_ghost, favg, uavg, np.asarray(stages)


def _wall_ghost(equation, u, favg, uavg, stages, axis=0):
    """Reflected ghost traces: the state mirrors, the flux flips oddly."""
    g_u = equation.reflect(u, axis)
    g_f = -equation.reflect(favg, axis)
    g_ua = equation.reflect(uavg, axis)
    g_st = None if stages is None else equation.reflect(stages, axis)
    return g_u, g_f, g_ua, g_st


def _set_minus(face, idx, u, favg, uavg, stages):
    face.u_minus[idx] = u
    face.favg_minus[idx] = favg
    face.uavg_minus[idx] = uavg
    if face.stage_minus is not None and stages is not None:
        face.stage_minus[:, idx] = stages


def _set_plus(face, idx, u, favg, uavg, stages):
    face.u_plus[idx] = u
    face.favg_plus[idx] = favg
    face.uavg_plus[idx] = uavg
    if face.stage_plus is not None and stages is not None:
        face.stage_plus[:, idx] = stages


def fill_face_ghosts_1d(face, bspec, equation, tab, t, dt):
    """Fill the ghost-side slots of the first and last face in place.

    Outflow needs no fill: the interior copy left by the face assembly makes
    the central formula collapse to the interior trace, and the flux is
    overridden anyway.
    """
    bc = bspec.left
    if bc.kind == PERIODIC:
        st = None if face.stage_minus is None else face.stage_minus[:, -1]
        _set_minus(face, 0, face.u_minus[-1], face.favg_minus[-1], face.uavg_minus[-1], st)
    elif bc.kind in (INFLOW, MIXED_HLLC):
        _set_minus(face, 0, *_inflow_time_averages(bc, face.x[0], t, dt, tab, equation))
    elif bc.kind == WALL:
        st = None if face.stage_plus is None else face.stage_plus[:, 0]
        _set_minus(
            face, 0, *_wall_ghost(equation, face.u_plus[0], face.favg_plus[0], face.uavg_plus[0], st)
        )

    bc = bspec.right
    if bc.kind == PERIODIC:
        st = None if face.stage_plus is None else face.stage_plus[:, 0]
        _set_plus(face, -1, face.u_plus[0], face.favg_plus[0], face.uavg_plus[0], st)
    elif bc.kind in (INFLOW, MIXED_HLLC):
        _set_plus(face, -1, *_inflow_time_averages(bc, face.x[-1], t, dt, tab, equation))
    elif bc.kind == WALL:
        st = None if face.stage_minus is None else face.stage_minus[:, -1]
        _set_plus(
            face,
            -1,
            *_wall_ghost(equation, face.u_minus[-1], face.favg_minus[-1], face.uavg_minus[-1], st),
        )


def override_boundary_fluxes_1d(face_flux, face, bspec, equation):
    """One-sided and upwind boundary fluxes replace the central formula."""

    def hllc_at(idx):
        return hllc_flux(
            equation,
            face.u_minus[idx][None], face.u_plus[idx][None],
            face.favg_minus[idx][None], face.favg_plus[idx][None],
            face.uavg_minus[idx][None], face.uavg_plus[idx][None],
        )[0]

    if bspec.left.kind == INFLOW:
        face_flux[0] = face.favg_minus[0]
    elif bspec.left.kind == OUTFLOW:
        face_flux[0] = face.favg_plus[0]
    elif bspec.left.kind == MIXED_HLLC:
        face_flux[0] = hllc_at(0)

    if bspec.right.kind == INFLOW:
        face_flux[-1] = face.favg_plus[-1]
    elif bspec.right.kind == OUTFLOW:
        face_flux[-1] = face.favg_minus[-1]
    elif bspec.right.kind == MIXED_HLLC:
        face_flux[-1] = hllc_at(-1)


def ghost_element_fill_1d(u, bspec, equation, basis, faces, side, t):
    """Nodal values and coordinates of the ghost element beyond one boundary.

    The ghost element mirrors the width of the adjacent interior element and
    carries data per the boundary kind: a periodic copy, sampled inflow data,
    the mirror-reflected interior solution for walls, or a plain symmetric
    extension for outflow.
    """
    if side == "left":
        bc = bspec.left
        dx_adj = faces[1] - faces[0]
        x_ghost = (faces[0] - dx_adj) + basis.points * dx_adj
        adjacent, wrap = u[0], u[-1]
    else:
        bc = bspec.right
        dx_adj = faces[-1] - faces[-2]
        x_ghost = faces[-1] + basis.points * dx_adj
        adjacent, wrap = u[-1], u[0]

    if bc.kind == PERIODIC:
        vals = wrap.copy()
    elif bc.kind in (INFLOW, MIXED_HLLC):
        vals = np.asarray(bc.inflow(x_ghost, t), dtype=float)
    elif bc.kind == WALL:
        vals = equation.reflect(adjacent[::-1], axis=0)
    else:
        vals = adjacent[::-1].copy()
    return vals[None, :, :], x_ghost[None, :], dx_adj


def ghost_element_traces_1d(u, bspec, equation, basis, tab, faces, dt, side, t, mode, model):
    """Run the local compact stages in a ghost element and trace the result."""
    vals, x_ghost, dx_adj = ghost_element_fill_1d(u, bspec, equation, basis, faces, side, t)
    inv_dx = np.asarray([1.0 / dx_adj])
    tavg = core1d.crk_stages(vals, equation, basis, tab, dt, x_ghost, inv_dx, t=t)
    if side == "left":
        ghost_faces = np.asarray([faces[0] - dx_adj, faces[0]])
        idx = 1  # the left ghost contributes its right-side trace
    else:
        ghost_faces = np.asarray([faces[-1], faces[-1] + dx_adj])
        idx = 0
    traces = core1d.element_traces(vals, tavg, basis, tab, equation, ghost_faces, mode, model)
    stages = None if traces.stages is None else traces.stages[idx][:, 0]
    return traces.u[idx][0], traces.favg[idx][0], traces.uavg[idx][0], stages


def fill_face_ghosts_1d_ghost_element(face, u, bspec, equation, basis, tab, faces, dt, t, mode, model):
    """Alternate boundary path: ghost traces from stages run in ghost elements."""
    _set_minus(
        face, 0, *ghost_element_traces_1d(u, bspec, equation, basis, tab, faces, dt, "left", t, mode, model)
    )
    _set_plus(
        face, -1, *ghost_element_traces_1d(u, bspec, equation, basis, tab, faces, dt, "right", t, mode, model)
    )


def ghost_nodes_1d(u, x_nodes, faces, bspec, equation, t, depth=2):
    """Ghost nodal values and positions outside each boundary.

    Feeds the subcell stencils.  Returns ((vals, xs) left, (vals, xs) right)
    with vals (depth, M) ordered outward from the boundary face.
    """
    n_nodes = u.shape[1]
    depth = min(depth, n_nodes)
    length = faces[-1] - faces[0]

    def one_side(side):
        if side == "left":
            bc = bspec.left
            x_mirror = 2.0 * faces[0] - x_nodes[0, :depth]
        else:
            bc = bspec.right
            x_mirror = 2.0 * faces[-1] - x_nodes[-1, n_nodes - depth:][::-1]
        if bc.kind == PERIODIC:
            if side == "left":
                xs = x_nodes[-1, n_nodes - depth:][::-1] - length
                vals = u[-1, n_nodes - depth:][::-1]
            else:
                xs = x_nodes[0, :depth] + length
                vals = u[0, :depth]
        elif bc.kind in (INFLOW, MIXED_HLLC):
            xs = x_mirror
            vals = np.asarray(bc.inflow(xs, t), dtype=float)
        elif bc.kind == WALL:
            xs = x_mirror
            inner = u[0, :depth] if side == "left" else u[-1, n_nodes - depth:][::-1]
            vals = equation.reflect(inner, axis=0)
        else:
            xs = x_mirror
            edge = u[0, 0] if side == "left" else u[-1, -1]
            vals = np.repeat(edge[None, :], depth, axis=0)
        return np.ascontiguousarray(vals, dtype=float), np.ascontiguousarray(xs, dtype=float)

    return one_side("left"), one_side("right")
