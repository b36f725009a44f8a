"""Two-dimensional stepping (tensor-product elements, Cartesian mesh)."""

from dataclasses import dataclass, field as dc_field

import numpy as np

from crkfr import boundary, core2d, limiters, loworder2d
from crkfr.limiters import NO_BLENDING


@dataclass
class Workspace2D:
    equation: object
    basis: object
    tab: object
    bspec: object
    mesh: object
    x_nodes: np.ndarray = dc_field(init=False)
    y_nodes: np.ndarray = dc_field(init=False)

    def __post_init__(self):
        self.x_nodes, self.y_nodes = self.mesh.node_coords(self.basis)
        self.inv_dx = 1.0 / self.mesh.dx
        self.inv_dy = 1.0 / self.mesh.dy
        mesh, basis = self.mesh, self.basis
        self.x_line = mesh.xfaces[:-1][:, None] + basis.points[None, :] * mesh.dx
        self.y_line = mesh.yfaces[:-1][:, None] + basis.points[None, :] * mesh.dy
        n = basis.n_nodes
        self.scale_x = np.full(mesh.nx * mesh.ny, self.inv_dx)
        self.scale_y = np.full(mesh.nx * mesh.ny * n, self.inv_dy)


def directional_speeds(u, ws, sampling):
    """Per-element spectral radii along x and y for the step-size formula."""
    eq = ws.equation
    if sampling == "nodal_max":
        sx = eq.max_abs_speed_x(u, x=ws.x_nodes, y=ws.y_nodes).max(axis=(2, 3))
        sy = eq.max_abs_speed_y(u, x=ws.x_nodes, y=ws.y_nodes).max(axis=(2, 3))
        return sx, sy
    mean = limiters.element_means(u, ws.basis.weights)
    nodes = np.broadcast_to(mean[:, :, None, None, :], u.shape)
    sx = eq.max_abs_speed_x(nodes, x=ws.x_nodes, y=ws.y_nodes).max(axis=(2, 3))
    sy = eq.max_abs_speed_y(nodes, x=ws.x_nodes, y=ws.y_nodes).max(axis=(2, 3))
    return sx, sy


def ghost_rates_2d(ws, t):
    """Wave-speed rates of inflow boundary states, for the optional dt guard."""
    rates = []
    eq, mesh, basis = ws.equation, ws.mesh, ws.basis
    for side, bc in (("xlo", ws.bspec.xlo), ("xhi", ws.bspec.xhi),
                     ("ylo", ws.bspec.ylo), ("yhi", ws.bspec.yhi)):
        if bc.kind not in (boundary.INFLOW, boundary.MIXED_HLLC):
            continue
        if side.startswith("x"):
            x = np.full(mesh.ny, mesh.xmin if side == "xlo" else mesh.xmax)
            y = mesh.yfaces[:-1] + 0.5 * mesh.dy
            g = np.asarray(bc.inflow(x, y, t), dtype=float)
            s = eq.max_abs_speed_x(g, x=x, y=y)
            rates.append(s / mesh.dx)
        else:
            x = mesh.xfaces[:-1] + 0.5 * mesh.dx
            y = np.full(mesh.nx, mesh.ymin if side == "ylo" else mesh.ymax)
            g = np.asarray(bc.inflow(x, y, t), dtype=float)
            s = eq.max_abs_speed_y(g, x=x, y=y)
            rates.append(s / mesh.dy)
    return np.concatenate(rates) if rates else np.empty(0)


def step_2d(u, t, dt, ws, cfg, diagnostics=None):
    """Advance the 2-D nodal solution by one step of size dt."""
    diag = diagnostics if diagnostics is not None else {}
    eq, basis, w = ws.equation, ws.basis, ws.basis.weights
    blending = cfg.blending

    if blending != NO_BLENDING:
        alpha, alpha_fx, alpha_fy = limiters.smoothness_alpha_2d(
            u, eq, basis, cfg.indicator, ws.bspec.periodic_x, ws.bspec.periodic_y
        )
        diag["alpha_max"] = max(diag.get("alpha_max", 0.0), float(alpha.max(initial=0.0)))
        diag["alpha_mean"] = float(alpha.mean()) if alpha.size else 0.0

    tavg = core2d.crk_stages_2d(u, eq, basis, ws.tab, dt, ws, t=t)
    flux_x, face_x, flux_y, face_y, traces = core2d.high_order_face_fluxes(
        u, tavg, ws, cfg, t, dt
    )

    if blending == NO_BLENDING:
        out = core2d.fr_update_2d(u, tavg, flux_x, flux_y, traces, ws, dt)
    else:
        lo = loworder2d.low_order_fluxes_2d(u, ws, dt, blending, t, diag)
        bad = ~np.isfinite(flux_x).all(axis=-1)
        if bad.any():
            flux_x[bad] = lo.face_x[bad]
            diag["ho_flux_fallback"] = diag.get("ho_flux_fallback", 0) + int(bad.sum())
        bad = ~np.isfinite(flux_y).all(axis=-1)
        if bad.any():
            flux_y[bad] = lo.face_y[bad]
            diag["ho_flux_fallback"] = diag.get("ho_flux_fallback", 0) + int(bad.sum())
        fx = limiters.blend_interface_flux(flux_x, lo.face_x, alpha_fx[:, :, None])
        # the y-face family is stored transposed (face index leading)
        fy = limiters.blend_interface_flux(flux_y, lo.face_y, np.swapaxes(alpha_fy, 0, 1)[:, :, None])
        if cfg.flux_limiter:
            fx, fy = loworder2d.flux_limit_2d(u, fx, fy, lo, dt, ws, cfg, diag)
        u_high = core2d.fr_update_2d(u, tavg, fx, fy, traces, ws, dt)
        u_low = loworder2d.low_order_update_2d(u, lo, fx, fy, dt, ws, tavg.source)
        out = limiters.blend(u_high, u_low, alpha)

    if cfg.scaling_limiter and eq.n_constraints:
        out = limiters.scaling_limit(out, eq, w, diagnostics=diag)
    return out
