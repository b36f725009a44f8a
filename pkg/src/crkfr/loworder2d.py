"""Two-dimensional subcell machinery: per-direction chains of subcells.

Each tensor-product element splits into (N+1)^2 subcells.  The low-order
update combines finite-volume flux differences per direction; the
admissibility flux limiter splits the update into directional parts weighted
like the time-step formula, so each face family can be limited with the 1-D
argument.
"""

from dataclasses import dataclass

import numpy as np

from crkfr import boundary as bnd
from crkfr import limiters
from crkfr.equations.base import EPS_POS
from crkfr.loworder1d import SubcellChain, chain_fluxes, chain_indices, solve_theta, subcell_faces


def _ghost_lines_x(u, ws, t, depth=2):
    """Ghost nodal values beyond the x boundaries for every (ey, q) line.

    Returns (vals_lo, vals_hi) shaped (ny, q, depth, m), ordered outward.
    """
    nx, ny, p, q, m = u.shape
    bspec, eq, mesh = ws.bspec, ws.equation, ws.mesh
    out = []
    for side, bc in (("lo", bspec.xlo), ("hi", bspec.xhi)):
        if bc.kind == bnd.PERIODIC:
            if side == "lo":
                vals = u[-1, :, p - depth:][:, ::-1]     # (ny, depth, q, m)
            else:
                vals = u[0, :, :depth]
            vals = np.moveaxis(vals, 1, 2)               # (ny, q, depth, m)
        elif bc.kind in (bnd.INFLOW, bnd.MIXED_HLLC):
            xb = mesh.xmin if side == "lo" else mesh.xmax
            inner = ws.x_line[0, :depth] if side == "lo" else ws.x_line[-1, p - depth:][::-1]
            xg = 2.0 * xb - inner                          # (depth,)
            yk = ws.y_line[:, :, None]                     # (ny, q, 1)
            xk = np.broadcast_to(xg[None, None, :], (ny, q, depth))
            vals = np.asarray(bc.inflow(xk, np.broadcast_to(yk, xk.shape), t), dtype=float)
        elif bc.kind == bnd.WALL:
            inner = u[0, :, :depth] if side == "lo" else u[-1, :, p - depth:][:, ::-1]
            vals = eq.reflect(np.moveaxis(inner, 1, 2), axis=0)
        else:  # outflow: copy the edge node outward
            edge = u[0, :, 0] if side == "lo" else u[-1, :, -1]   # (ny, q, m)
            vals = np.repeat(edge[:, :, None, :], depth, axis=2)
        out.append(np.ascontiguousarray(vals))
    return out


def _ghost_lines_y(u, ws, t, depth=2):
    """Same as _ghost_lines_x for the y boundaries: (nx, p, depth, m)."""
    nx, ny, p, q, m = u.shape
    bspec, eq, mesh = ws.bspec, ws.equation, ws.mesh
    out = []
    for side, bc in (("lo", bspec.ylo), ("hi", bspec.yhi)):
        if bc.kind == bnd.PERIODIC:
            if side == "lo":
                vals = u[:, -1, :, q - depth:][..., ::-1, :]   # (nx, p, depth, m)
            else:
                vals = u[:, 0, :, :depth]
        elif bc.kind in (bnd.INFLOW, bnd.MIXED_HLLC):
            yb = mesh.ymin if side == "lo" else mesh.ymax
            inner = ws.y_line[0, :depth] if side == "lo" else ws.y_line[-1, q - depth:][::-1]
            yg = 2.0 * yb - inner
            xk = ws.x_line[:, :, None]
            yk = np.broadcast_to(yg[None, None, :], (nx, p, depth))
            vals = np.asarray(bc.inflow(np.broadcast_to(xk, yk.shape), yk, t), dtype=float)
        elif bc.kind == bnd.WALL:
            inner = u[:, 0, :, :depth] if side == "lo" else u[:, -1, :, q - depth:][..., ::-1, :]
            vals = eq.reflect(inner, axis=1)
        else:
            edge = u[:, 0, :, 0] if side == "lo" else u[:, -1, :, -1]
            vals = np.repeat(edge[:, :, None, :], depth, axis=2)
        out.append(np.ascontiguousarray(vals))
    return out


def _chain_geometry(faces, nodes_1d, weights, n_el, n_nodes):
    """Chain coordinate arrays (along, face_left, face_right), each (G,)."""
    sf = subcell_faces(faces, weights)
    g = n_el * n_nodes + 4
    cx = np.empty(g)
    fl = np.empty(g)
    fr = np.empty(g)
    cx[2:-2] = nodes_1d.reshape(-1)
    fl[2:-2] = sf[:, :-1].reshape(-1)
    fr[2:-2] = sf[:, 1:].reshape(-1)
    xb = faces[0]
    cx[1], cx[0] = 2.0 * xb - nodes_1d[0, 0], 2.0 * xb - nodes_1d[0, 1]
    fr[1] = xb
    fl[1] = 2.0 * xb - sf[0, 1]
    fr[0] = fl[1]
    fl[0] = 2.0 * xb - sf[0, 2] if n_nodes > 2 else 2.0 * xb - sf[0, -1]
    xb = faces[-1]
    cx[-2], cx[-1] = 2.0 * xb - nodes_1d[-1, -1], 2.0 * xb - nodes_1d[-1, -2]
    fl[-2] = xb
    fr[-2] = 2.0 * xb - sf[-1, -2]
    fl[-1] = fr[-2]
    fr[-1] = 2.0 * xb - sf[-1, -3] if n_nodes > 2 else 2.0 * xb - sf[-1, 0]
    return cx, fl, fr


@dataclass
class LowOrderFluxes2D:
    interior_x: np.ndarray       # (nx, ny, p-1, q, m)
    interior_y: np.ndarray       # (nx, ny, p, q-1, m)
    face_x: np.ndarray           # (nx+1, ny, q, m)
    face_y: np.ndarray           # (ny+1, nx, p, m)
    right_adj_x: np.ndarray      # (nx+1, ny, q, m) interior flux beside each x-face
    left_adj_x: np.ndarray
    right_adj_y: np.ndarray      # (ny+1, nx, p, m)
    left_adj_y: np.ndarray


def low_order_fluxes_2d(u, ws, dt, scheme, t, diagnostics=None):
    nx, ny, p, q, m = u.shape
    eq, w = ws.equation, ws.basis.weights
    mesh = ws.mesh

    # x-direction chains: one per (ey, q) line
    gl, gr = _ghost_lines_x(u, ws, t)
    lines = np.moveaxis(u, (1, 3), (0, 1)).reshape(ny, q, nx * p, m)
    g = nx * p + 4
    cu = np.empty((ny, q, g, m))
    cu[:, :, 2:-2] = lines
    cu[:, :, 1] = gl[..., 0, :]
    cu[:, :, 0] = gl[..., 1, :]
    cu[:, :, -2] = gr[..., 0, :]
    cu[:, :, -1] = gr[..., 1, :]
    cx, fl, fr = _chain_geometry(mesh.xfaces, ws.x_line, w, nx, p)
    transverse = ws.y_line[:, :, None]  # (ny, q, 1) broadcastable over the chain
    chain = SubcellChain(cu, cx, fl, fr, nx, p, axis=0, transverse=transverse)
    flux_chain = chain_fluxes(chain, eq, dt, scheme, diagnostics)

    face_idx, inner_idx = chain_indices(nx, p)
    face_x = np.moveaxis(flux_chain[:, :, face_idx], 2, 0)            # (nx+1, ny, q, m)
    interior_x = np.moveaxis(flux_chain[:, :, inner_idx], (2, 3), (0, 2))  # (nx, ny, p-1, q, m)
    right_adj_x = np.zeros_like(face_x)
    left_adj_x = np.zeros_like(face_x)
    right_adj_x[:-1] = np.moveaxis(flux_chain[:, :, face_idx[:-1] + 1], 2, 0)
    left_adj_x[1:] = np.moveaxis(flux_chain[:, :, face_idx[1:] - 1], 2, 0)

    # y-direction chains: one per (ex, p) line
    gl, gr = _ghost_lines_y(u, ws, t)
    lines = np.moveaxis(u, 1, 2).reshape(nx, p, ny * q, m)
    g = ny * q + 4
    cu = np.empty((nx, p, g, m))
    cu[:, :, 2:-2] = lines
    cu[:, :, 1] = gl[..., 0, :]
    cu[:, :, 0] = gl[..., 1, :]
    cu[:, :, -2] = gr[..., 0, :]
    cu[:, :, -1] = gr[..., 1, :]
    cy, fl, fr = _chain_geometry(mesh.yfaces, ws.y_line, w, ny, q)
    transverse = ws.x_line[:, :, None]
    chain = SubcellChain(cu, cy, fl, fr, ny, q, axis=1, transverse=transverse)
    flux_chain = chain_fluxes(chain, eq, dt, scheme, diagnostics)

    face_idx, inner_idx = chain_indices(ny, q)
    face_y = np.moveaxis(flux_chain[:, :, face_idx], 2, 0)            # (ny+1, nx, p, m)
    interior_y = np.moveaxis(flux_chain[:, :, inner_idx], (2, 3), (1, 3))  # (nx, ny, p, q-1, m)
    right_adj_y = np.zeros_like(face_y)
    left_adj_y = np.zeros_like(face_y)
    right_adj_y[:-1] = np.moveaxis(flux_chain[:, :, face_idx[:-1] + 1], 2, 0)
    left_adj_y[1:] = np.moveaxis(flux_chain[:, :, face_idx[1:] - 1], 2, 0)

    return LowOrderFluxes2D(
        interior_x, interior_y, face_x, face_y,
        right_adj_x, left_adj_x, right_adj_y, left_adj_y,
    )


def low_order_update_2d(u, lo, face_x, face_y, dt, ws, source_avg=None):
    """Subcell finite-volume update combining both directions."""
    nx, ny, p, q, m = u.shape
    w = ws.basis.weights

    fx = np.empty((nx, ny, p + 1, q, m))
    fx[:, :, 0] = face_x[:-1]
    fx[:, :, -1] = face_x[1:]
    fx[:, :, 1:-1] = lo.interior_x
    nu_x = dt / (w * ws.mesh.dx)
    out = u - nu_x[None, None, :, None, None] * (fx[:, :, 1:] - fx[:, :, :-1])

    fy_faces = np.swapaxes(face_y, 0, 1)  # (nx, ny+1, p, m)
    fy = np.empty((nx, ny, p, q + 1, m))
    fy[:, :, :, 0] = fy_faces[:, :-1]
    fy[:, :, :, -1] = fy_faces[:, 1:]
    fy[:, :, :, 1:-1] = lo.interior_y
    nu_y = dt / (w * ws.mesh.dy)
    out -= nu_y[None, None, None, :, None] * (fy[:, :, :, 1:] - fy[:, :, :, :-1])

    if source_avg is not None:
        out = out + dt * source_avg
    return out


def directional_weights(u, ws, cfg):
    """Convex split of the update between directions, matching the dt formula."""
    from crkfr import solver2d

    sx, sy = solver2d.directional_speeds(u, ws, cfg.speed_sampling)
    rx = sx / ws.mesh.dx
    ry = sy / ws.mesh.dy
    total = np.maximum(rx + ry, 1e-300)
    # floored so a quiescent direction cannot blow up the effective step
    kx = np.clip(rx / total, 1e-12, 1.0)
    ky = np.clip(ry / total, 1e-12, 1.0)
    return kx, ky


def flux_limit_2d(u, flux_x, flux_y, lo, dt, ws, cfg, diagnostics=None, eps=EPS_POS):
    """Limit both face families so directional subcell updates stay admissible.

    The low-order update splits as kx * (x-part) + ky * (y-part) with
    kx + ky = 1 per element; each part is a 1-D subcell update with the
    enlarged step dt/k, so the 1-D limiter logic applies per family.
    """
    eq = ws.equation
    if eq.n_constraints == 0:
        return flux_x, flux_y
    nx, ny, p, q, m = u.shape
    w = ws.basis.weights
    kx, ky = directional_weights(u, ws, cfg)

    limited = 0

    # x family: faces (nx+1, ny, q, m); adjacent subcells on either side
    diff = flux_x - lo.face_x
    active_r = np.zeros((nx + 1, ny, q), dtype=bool)
    active_l = np.zeros_like(active_r)
    active_r[:-1] = True
    active_l[1:] = True
    base_r = np.zeros_like(diff)
    slope_r = np.zeros_like(diff)
    nu_r = (dt / kx) / (w[0] * ws.mesh.dx)             # (nx, ny)
    first = u[:, :, 0]                                  # (nx, ny, q, m)
    base_r[:-1] = first - nu_r[:, :, None, None] * (lo.right_adj_x[:-1] - lo.face_x[:-1])
    slope_r[:-1] = nu_r[:, :, None, None] * diff[:-1]
    base_l = np.zeros_like(diff)
    slope_l = np.zeros_like(diff)
    nu_l = (dt / kx) / (w[-1] * ws.mesh.dx)
    last = u[:, :, -1]
    base_l[1:] = last - nu_l[:, :, None, None] * (lo.face_x[1:] - lo.left_adj_x[1:])
    slope_l[1:] = -nu_l[:, :, None, None] * diff[1:]
    theta = solve_theta(
        [(base_r, slope_r, active_r), (base_l, slope_l, active_l)], eq, eps
    )
    limited += int((theta < 1.0).sum())
    flux_x = lo.face_x + theta[..., None] * diff

    # y family: faces (ny+1, nx, p, m)
    diff = flux_y - lo.face_y
    active_r = np.zeros((ny + 1, nx, p), dtype=bool)
    active_l = np.zeros_like(active_r)
    active_r[:-1] = True
    active_l[1:] = True
    base_r = np.zeros_like(diff)
    slope_r = np.zeros_like(diff)
    nu_r = (dt / ky) / (w[0] * ws.mesh.dy)             # (nx, ny)
    first = np.swapaxes(u[:, :, :, 0], 0, 1)            # (ny, nx, p, m)
    nu_r_t = np.swapaxes(nu_r, 0, 1)                    # (ny, nx)
    base_r[:-1] = first - nu_r_t[:, :, None, None] * (lo.right_adj_y[:-1] - lo.face_y[:-1])
    slope_r[:-1] = nu_r_t[:, :, None, None] * diff[:-1]
    base_l = np.zeros_like(diff)
    slope_l = np.zeros_like(diff)
    nu_l = (dt / ky) / (w[-1] * ws.mesh.dy)
    last = np.swapaxes(u[:, :, :, -1], 0, 1)
    nu_l_t = np.swapaxes(nu_l, 0, 1)
    base_l[1:] = last - nu_l_t[:, :, None, None] * (lo.face_y[1:] - lo.left_adj_y[1:])
    slope_l[1:] = -nu_l_t[:, :, None, None] * diff[1:]
    theta = solve_theta(
        [(base_r, slope_r, active_r), (base_l, slope_l, active_l)], eq, eps
    )
    limited += int((theta < 1.0).sum())
    flux_y = lo.face_y + theta[..., None] * diff

    if diagnostics is not None and limited:
        diagnostics["limited_faces"] = diagnostics.get("limited_faces", 0) + limited
    return flux_x, flux_y
