"""One full time step of the 1-D scheme, with blending and limiting wired in.

Phase order per step: smoothness indicator on the current solution, local
compact stages, interface traces and the single time-averaged numerical flux,
low-order subcell fluxes, face-flux blending and admissibility limiting, the
high- and low-order updates sharing the final flux, the nodal blend, and the
scaling limiter.
"""

from dataclasses import dataclass, field as dc_field

import numpy as np

from crkfr import boundary, core1d, limiters, loworder1d
from crkfr.equations.euler import hllc_flux


@dataclass
class Workspace1D:
    equation: object
    basis: object
    tab: object
    bspec: object
    mesh: object
    faces: np.ndarray = dc_field(init=False)
    x_nodes: np.ndarray = dc_field(init=False)
    dx: np.ndarray = dc_field(init=False)
    inv_dx: np.ndarray = dc_field(init=False)

    def __post_init__(self):
        self.faces = self.mesh.faces
        self.x_nodes = self.mesh.node_coords(self.basis)
        self.dx = np.diff(self.faces)
        self.inv_dx = 1.0 / self.dx


def high_order_face_flux(u, tavg, ws, cfg, t, dt):
    """Trace assembly, boundary fill and the single interface flux array."""
    traces = core1d.element_traces(
        u, tavg, ws.basis, ws.tab, ws.equation, ws.faces, cfg.trace, cfg.dissipation
    )
    face = core1d.interior_face_data(traces, ws.faces)
    if cfg.boundary_treatment == boundary.GHOST_ELEMENT_TREATMENT:
        boundary.fill_face_ghosts_1d_ghost_element(
            face, u, ws.bspec, ws.equation, ws.basis, ws.tab, ws.faces, dt, t,
            cfg.trace, cfg.dissipation,
        )
    else:
        boundary.fill_face_ghosts_1d(face, ws.bspec, ws.equation, ws.tab, t, dt)
    if cfg.interface_flux == "hllc":
        flux = hllc_flux(
            ws.equation,
            face.u_minus, face.u_plus,
            face.favg_minus, face.favg_plus,
            face.uavg_minus, face.uavg_plus,
        )
    else:
        flux = core1d.numerical_flux(face, cfg.dissipation, ws.equation, ws.tab)
    boundary.override_boundary_fluxes_1d(flux, face, ws.bspec, ws.equation)
    return flux, face, traces


def step_1d(u, t, dt, ws, cfg, diagnostics=None):
    """Advance the nodal solution by one step of size dt."""
    diag = diagnostics if diagnostics is not None else {}
    eq, basis, w = ws.equation, ws.basis, ws.basis.weights
    blending = cfg.blending

    if blending != limiters.NO_BLENDING:
        alpha, alpha_face = limiters.smoothness_alpha_1d(
            u, eq, basis, cfg.indicator, ws.bspec.periodic
        )
        diag["alpha_max"] = max(diag.get("alpha_max", 0.0), float(alpha.max(initial=0.0)))
        diag["alpha_mean"] = float(alpha.mean()) if alpha.size else 0.0

    tavg = core1d.crk_stages(u, eq, basis, ws.tab, dt, ws.x_nodes, ws.inv_dx, t=t)
    face_flux, face, traces = high_order_face_flux(u, tavg, ws, cfg, t, dt)

    if blending == limiters.NO_BLENDING:
        out = core1d.fr_update(u, tavg, face_flux, traces, basis, ws.inv_dx, dt)
    else:
        ghosts = boundary.ghost_nodes_1d(u, ws.x_nodes, ws.faces, ws.bspec, eq, t)
        lo = loworder1d.low_order_fluxes(
            u, ws.x_nodes, ws.faces, w, eq, dt, blending, ghosts, diag
        )
        # a high-order flux that degenerated (extrapolated traces left the
        # domain of the flux) is discarded in favour of the low-order one
        bad = ~np.isfinite(face_flux).all(axis=-1)
        if bad.any():
            face_flux[bad] = lo.face[bad]
            diag["ho_flux_fallback"] = diag.get("ho_flux_fallback", 0) + int(bad.sum())
        flux = limiters.blend_interface_flux(face_flux, lo.face, alpha_face)
        if cfg.flux_limiter:
            flux, _ = loworder1d.flux_limit_1d(u, flux, lo, dt, w, ws.dx, eq, diagnostics=diag)
        u_high = core1d.fr_update(u, tavg, flux, traces, basis, ws.inv_dx, dt)
        u_low = loworder1d.low_order_update(u, lo, flux, dt, w, ws.dx, tavg.source)
        out = limiters.blend(u_high, u_low, alpha)

    if cfg.scaling_limiter and eq.n_constraints:
        out = limiters.scaling_limit(out, eq, w, diagnostics=diag)
    return out
