"""Two-dimensional core on tensor-product elements.

The scheme applies the 1-D construction direction by direction: local
stages fuse the x and y flux derivatives in a single pass per stage, the
interface flux exists on both face families, and the corrected update adds
the per-direction boundary corrections with their own element-width
scalings.
"""

from dataclasses import dataclass
from typing import Optional

import numpy as np

from crkfr import kernels
from crkfr.boundary2d import fill_face_ghosts_2d, override_boundary_fluxes_2d
from crkfr.core1d import DISSIPATION_MODELS, DCSX, EA, TRACE_MODES, StageFailureError
from crkfr.equations.base import rusanov_speed
from crkfr.equations.euler import hllc_flux


@dataclass
class TimeAverages2D:
    flux_x: np.ndarray
    flux_y: np.ndarray
    solution: np.ndarray
    source: Optional[np.ndarray]
    stage_solutions: list


@dataclass
class FaceData2D:
    """One face family, with the face index leading.

    For the x family arrays are (nx+1, ny, q, m); the y family is stored
    transposed as (ny+1, nx, p, m) so both families share the same layout.
    """

    x: np.ndarray
    y: np.ndarray
    u_minus: np.ndarray
    u_plus: np.ndarray
    favg_minus: np.ndarray
    favg_plus: np.ndarray
    uavg_minus: np.ndarray
    uavg_plus: np.ndarray
    stage_minus: Optional[np.ndarray]
    stage_plus: Optional[np.ndarray]


def deriv_x(vals, ws):
    nx, ny, p, q, m = vals.shape
    flat = vals.reshape(nx * ny, p, q * m)
    out = kernels.batched_diff(ws.basis.diff_matrix, flat, ws.scale_x)
    return out.reshape(vals.shape)


def deriv_y(vals, ws):
    nx, ny, p, q, m = vals.shape
    flat = vals.reshape(nx * ny * p, q, m)
    out = kernels.batched_diff(ws.basis.diff_matrix, flat, ws.scale_y)
    return out.reshape(vals.shape)


def crk_stages_2d(u, equation, basis, tab, dt, ws, t=0.0, with_source=None):
    """Local stages with fused x/y flux derivatives; nodal time averages."""
    if with_source is None:
        with_source = equation.has_source
    a, b, c = tab.a, tab.b, tab.c
    s = tab.stages
    x, y = ws.x_nodes, ws.y_nodes

    stage_sols = [u]
    stage_fx = [equation.flux_x(u, x=x, y=y)]
    stage_fy = [equation.flux_y(u, x=x, y=y)]
    stage_src = [equation.source(u, x=x, y=y, t=t) if with_source else None]
    derivs = [deriv_x(stage_fx[0], ws) + deriv_y(stage_fy[0], ws)]

    for i in range(1, s):
        du = np.zeros_like(u)
        for j in range(i):
            if a[i, j] != 0.0:
                du += a[i, j] * derivs[j]
                if with_source:
                    du -= a[i, j] * stage_src[j]
        ui = u - dt * du
        ok = equation.flux_domain_ok(ui)
        if not ok.all():
            raise StageFailureError(i + 1, np.unique(np.argwhere(~ok)[:, :2], axis=0))
        stage_sols.append(ui)
        stage_fx.append(equation.flux_x(ui, x=x, y=y))
        stage_fy.append(equation.flux_y(ui, x=x, y=y))
        stage_src.append(equation.source(ui, x=x, y=y, t=t + c[i] * dt) if with_source else None)
        if i < s - 1:
            derivs.append(deriv_x(stage_fx[i], ws) + deriv_y(stage_fy[i], ws))

    favg_x = sum(b[i] * stage_fx[i] for i in range(s) if b[i] != 0.0)
    favg_y = sum(b[i] * stage_fy[i] for i in range(s) if b[i] != 0.0)
    uavg = sum(b[i] * stage_sols[i] for i in range(s) if b[i] != 0.0)
    savg = sum(b[i] * stage_src[i] for i in range(s) if b[i] != 0.0) if with_source else None
    return TimeAverages2D(favg_x, favg_y, uavg, savg, stage_sols)


def _trace_x(vec, arr):
    return np.einsum("p,xypqm->xyqm", vec, arr)


def _trace_y(vec, arr):
    return np.einsum("q,xypqm->xypm", vec, arr)


@dataclass
class ElementTraces2D:
    # each entry is (low-side, high-side) per direction
    u_x: tuple
    u_y: tuple
    uavg_x: tuple
    uavg_y: tuple
    fd_x: tuple
    fd_y: tuple
    favg_x: tuple
    favg_y: tuple
    stages_x: Optional[tuple]
    stages_y: Optional[tuple]


def element_traces_2d(u, tavg, ws, mode, model):
    """Element-boundary traces on all four sides."""
    if mode not in TRACE_MODES:
        raise ValueError(f"unknown trace mode {mode!r}")
    if model not in DISSIPATION_MODELS:
        raise ValueError(f"unknown dissipation model {model!r}")
    basis, tab, eq = ws.basis, ws.tab, ws.equation
    l0, l1 = basis.l_at_0, basis.l_at_1

    fd_x = (_trace_x(l0, tavg.flux_x), _trace_x(l1, tavg.flux_x))
    fd_y = (_trace_y(l0, tavg.flux_y), _trace_y(l1, tavg.flux_y))
    traces = ElementTraces2D(
        u_x=(_trace_x(l0, u), _trace_x(l1, u)),
        u_y=(_trace_y(l0, u), _trace_y(l1, u)),
        uavg_x=(_trace_x(l0, tavg.solution), _trace_x(l1, tavg.solution)),
        uavg_y=(_trace_y(l0, tavg.solution), _trace_y(l1, tavg.solution)),
        fd_x=fd_x,
        fd_y=fd_y,
        favg_x=fd_x,
        favg_y=fd_y,
        stages_x=None,
        stages_y=None,
    )

    need_stages = mode == EA or model == DCSX
    if need_stages:
        st_xl = np.stack([_trace_x(l0, us) for us in tavg.stage_solutions])
        st_xr = np.stack([_trace_x(l1, us) for us in tavg.stage_solutions])
        st_yl = np.stack([_trace_y(l0, us) for us in tavg.stage_solutions])
        st_yr = np.stack([_trace_y(l1, us) for us in tavg.stage_solutions])
        if model == DCSX:
            traces.stages_x = (st_xl, st_xr)
            traces.stages_y = (st_yl, st_yr)
        if mode == EA:
            b = tab.b
            xl = ws.mesh.xfaces[:-1][:, None, None]
            xr = ws.mesh.xfaces[1:][:, None, None]
            y_line = ws.y_line[None, :, :]
            favg_xl = sum(
                b[i] * eq.flux_x(st_xl[i], x=xl, y=y_line) for i in range(tab.stages) if b[i]
            )
            favg_xr = sum(
                b[i] * eq.flux_x(st_xr[i], x=xr, y=y_line) for i in range(tab.stages) if b[i]
            )
            yl = ws.mesh.yfaces[:-1][None, :, None]
            yr = ws.mesh.yfaces[1:][None, :, None]
            x_line = ws.x_line[:, None, :]
            favg_yl = sum(
                b[i] * eq.flux_y(st_yl[i], x=x_line, y=yl) for i in range(tab.stages) if b[i]
            )
            favg_yr = sum(
                b[i] * eq.flux_y(st_yr[i], x=x_line, y=yr) for i in range(tab.stages) if b[i]
            )
            traces.favg_x = (favg_xl, favg_xr)
            traces.favg_y = (favg_yl, favg_yr)
    return traces


def _face_pair(low, high):
    """(minus, plus) face arrays along the leading element axis."""
    n_faces = low.shape[0] + 1
    minus = np.empty((n_faces,) + low.shape[1:])
    plus = np.empty_like(minus)
    minus[1:] = high
    plus[:-1] = low
    minus[0] = plus[0]
    plus[-1] = minus[-1]
    return minus, plus


def _stage_face_pair(low, high):
    s = low.shape[0]
    n_faces = low.shape[1] + 1
    minus = np.empty((s, n_faces) + low.shape[2:])
    plus = np.empty_like(minus)
    minus[:, 1:] = high
    plus[:, :-1] = low
    minus[:, 0] = plus[:, 0]
    plus[:, -1] = minus[:, -1]
    return minus, plus


def face_data_2d(traces, ws, axis):
    """Face arrays of one family, leading axis normalized to that family."""
    if axis == 0:
        u_lo, u_hi = traces.u_x
        ua_lo, ua_hi = traces.uavg_x
        fa_lo, fa_hi = traces.favg_x
        stages = traces.stages_x
        x = np.broadcast_to(
            ws.mesh.xfaces[:, None, None], (ws.mesh.nx + 1, ws.mesh.ny, ws.basis.n_nodes)
        )
        y = np.broadcast_to(ws.y_line[None, :, :], x.shape)
    else:
        tr = lambda a: np.ascontiguousarray(np.swapaxes(a, 0, 1))
        u_lo, u_hi = map(tr, traces.u_y)
        ua_lo, ua_hi = map(tr, traces.uavg_y)
        fa_lo, fa_hi = map(tr, traces.favg_y)
        stages = traces.stages_y
        if stages is not None:
            stages = (
                np.ascontiguousarray(np.swapaxes(stages[0], 1, 2)),
                np.ascontiguousarray(np.swapaxes(stages[1], 1, 2)),
            )
        y = np.broadcast_to(
            ws.mesh.yfaces[:, None, None], (ws.mesh.ny + 1, ws.mesh.nx, ws.basis.n_nodes)
        )
        x = np.broadcast_to(ws.x_line[None, :, :], y.shape)

    u_m, u_p = _face_pair(u_lo, u_hi)
    ua_m, ua_p = _face_pair(ua_lo, ua_hi)
    fa_m, fa_p = _face_pair(fa_lo, fa_hi)
    if stages is not None:
        st_m, st_p = _stage_face_pair(stages[0], stages[1])
    else:
        st_m = st_p = None
    return FaceData2D(x, y, u_m, u_p, fa_m, fa_p, ua_m, ua_p, st_m, st_p)


def numerical_flux_2d(face, model, equation, tab, axis):
    if model == "d1":
        lam = rusanov_speed(equation, face.u_minus, face.u_plus, axis, face.x, face.y)
        diss = 0.5 * lam[..., None] * (face.u_plus - face.u_minus)
    elif model == "d2":
        lam = rusanov_speed(equation, face.u_minus, face.u_plus, axis, face.x, face.y)
        diss = 0.5 * lam[..., None] * (face.uavg_plus - face.uavg_minus)
    elif model == DCSX:
        diss = np.zeros_like(face.u_minus)
        for i in range(tab.stages):
            if tab.b[i] == 0.0:
                continue
            lam = rusanov_speed(
                equation, face.stage_minus[i], face.stage_plus[i], axis, face.x, face.y
            )
            diss += tab.b[i] * 0.5 * lam[..., None] * (face.stage_plus[i] - face.stage_minus[i])
    else:
        raise ValueError(f"unknown dissipation model {model!r}")
    return 0.5 * (face.favg_minus + face.favg_plus) - diss


def high_order_face_fluxes(u, tavg, ws, cfg, t, dt):
    """Both face families: traces, ghost fill, flux, boundary overrides."""
    traces = element_traces_2d(u, tavg, ws, cfg.trace, cfg.dissipation)

    face_x = face_data_2d(traces, ws, axis=0)
    fill_face_ghosts_2d(face_x, ws.bspec.xlo, ws.bspec.xhi, ws.equation, ws.tab, t, dt, axis=0)
    face_y = face_data_2d(traces, ws, axis=1)
    fill_face_ghosts_2d(face_y, ws.bspec.ylo, ws.bspec.yhi, ws.equation, ws.tab, t, dt, axis=1)

    if cfg.interface_flux == "hllc":
        flux_x = hllc_flux(
            ws.equation, face_x.u_minus, face_x.u_plus, face_x.favg_minus, face_x.favg_plus,
            face_x.uavg_minus, face_x.uavg_plus, axis=0,
        )
        flux_y = hllc_flux(
            ws.equation, face_y.u_minus, face_y.u_plus, face_y.favg_minus, face_y.favg_plus,
            face_y.uavg_minus, face_y.uavg_plus, axis=1,
        )
    else:
        flux_x = numerical_flux_2d(face_x, cfg.dissipation, ws.equation, ws.tab, axis=0)
        flux_y = numerical_flux_2d(face_y, cfg.dissipation, ws.equation, ws.tab, axis=1)
    override_boundary_fluxes_2d(flux_x, face_x, ws.bspec.xlo, ws.bspec.xhi, ws.equation, axis=0)
    override_boundary_fluxes_2d(flux_y, face_y, ws.bspec.ylo, ws.bspec.yhi, ws.equation, axis=1)
    return flux_x, face_x, flux_y, face_y, traces


def fr_update_2d(u, tavg, flux_x, flux_y, traces, ws, dt):
    """Corrected update: per-direction derivatives plus boundary corrections.

    flux_x is (nx+1, ny, q, m); flux_y is (ny+1, nx, p, m) in the normalized
    face layout.
    """
    nx, ny, p, q, m = u.shape
    basis = ws.basis

    dfx = deriv_x(tavg.flux_x, ws)
    jump_left = flux_x[:-1] - traces.fd_x[0]
    jump_right = flux_x[1:] - traces.fd_x[1]
    res_x = kernels.fr_residual(
        dfx.reshape(nx * ny, p, q * m),
        np.ascontiguousarray(jump_left).reshape(nx * ny, q * m),
        np.ascontiguousarray(jump_right).reshape(nx * ny, q * m),
        basis.gl_prime,
        basis.gr_prime,
        ws.scale_x,
    ).reshape(u.shape)

    dfy = deriv_y(tavg.flux_y, ws)
    fy = np.swapaxes(flux_y, 0, 1)  # back to (nx, ny+1, p, m)
    jump_lo = fy[:, :-1] - traces.fd_y[0]
    jump_hi = fy[:, 1:] - traces.fd_y[1]
    res_y = kernels.fr_residual(
        dfy.reshape(nx * ny * p, q, m),
        np.ascontiguousarray(jump_lo).reshape(nx * ny * p, m),
        np.ascontiguousarray(jump_hi).reshape(nx * ny * p, m),
        basis.gl_prime,
        basis.gr_prime,
        ws.scale_y,
    ).reshape(u.shape)

    out = u - dt * (res_x + res_y)
    if tavg.source is not None:
        out += dt * tavg.source
    return out
