"""One-dimensional core of the solver.

A time step evolves nodal data u[e, p, m] through three phases:

1. local compact Runge-Kutta stages per element, using only in-element flux
   derivatives, which yield nodal time averages of flux, solution and source;
2. a single numerical flux per interface, built from a central part (trace
   mode EA or AE) and a dissipative part (model D1, D2 or DCSX);
3. the flux-reconstruction update, which corrects the local flux derivative
   with the interface mismatch distributed through the correction-function
   boundary derivatives.
"""

from dataclasses import dataclass
from typing import Optional

import numpy as np

from crkfr import kernels
from crkfr.equations.base import rusanov_speed

AE = "ae"
EA = "ea"
D1 = "d1"
D2 = "d2"
DCSX = "dcsx"

TRACE_MODES = (EA, AE)
DISSIPATION_MODELS = (D1, D2, DCSX)


class StageFailureError(RuntimeError):
    """A compact stage left the domain of the flux function."""

    def __init__(self, stage, elements):
        self.stage = stage
        self.elements = np.atleast_1d(elements)
        super().__init__(
            f"stage {stage} produced invalid states in elements {self.elements[:8].tolist()}"
        )


@dataclass
class TimeAverages1D:
    flux: np.ndarray                 # (E, P, M) nodal time-averaged flux
    solution: np.ndarray             # (E, P, M) nodal time-averaged solution
    source: Optional[np.ndarray]     # (E, P, M) nodal time-averaged source
    stage_solutions: list            # s arrays (E, P, M); first entry is u^n


@dataclass
class ElementTraces1D:
    """Element-boundary values, each a pair (at xi=0, at xi=1) of (E, M)."""

    u: tuple
    uavg: tuple
    fd: tuple                  # extrapolation of the discontinuous averaged flux
    favg: tuple                # central flux traces per the trace mode
    stages: Optional[tuple]    # per-stage solution traces (s, E, M), DCSX only


@dataclass
class FaceData1D:
    """Per-interface traces; index f runs over the E+1 element faces."""

    x: np.ndarray                      # (F,) face coordinates
    u_minus: np.ndarray                # (F, M) solution traces at t^n
    u_plus: np.ndarray
    favg_minus: np.ndarray             # (F, M) central time-averaged flux traces
    favg_plus: np.ndarray
    uavg_minus: np.ndarray             # (F, M) time-averaged solution traces
    uavg_plus: np.ndarray
    stage_minus: Optional[np.ndarray]  # (s, F, M), only for the DCSX model
    stage_plus: Optional[np.ndarray]


def local_derivative(flux_nodal, basis, inv_dx):
    """Per-element derivative of nodal flux data, in physical coordinates.

    No interelement terms: this is the local operator used by the inner
    stages.
    """
    return kernels.batched_diff(basis.diff_matrix, flux_nodal, inv_dx)


def crk_stages(u, equation, basis, tab, dt, x_nodes, inv_dx, t=0.0, with_source=None):
    """Run the local stages and assemble nodal time averages.

    x_nodes are the physical solution-point coordinates (E, P); inv_dx is
    1/dx per element.  Sources, when active, enter every stage and get their
    own time average.
    """
    if with_source is None:
        with_source = equation.has_source
    a, b, c = tab.a, tab.b, tab.c
    s = tab.stages

    stage_sols = [u]
    stage_flux = [equation.flux_x(u, x=x_nodes)]
    stage_src = [equation.source(u, x=x_nodes, t=t) if with_source else None]
    derivs = [local_derivative(stage_flux[0], basis, inv_dx)]

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
            raise StageFailureError(i + 1, np.unique(np.argwhere(~ok)[:, 0]))
        stage_sols.append(ui)
        stage_flux.append(equation.flux_x(ui, x=x_nodes))
        stage_src.append(equation.source(ui, x=x_nodes, t=t + c[i] * dt) if with_source else None)
        if i < s - 1:
            derivs.append(local_derivative(stage_flux[i], basis, inv_dx))

    favg = sum(b[i] * stage_flux[i] for i in range(s) if b[i] != 0.0)
    uavg = sum(b[i] * stage_sols[i] for i in range(s) if b[i] != 0.0)
    savg = sum(b[i] * stage_src[i] for i in range(s) if b[i] != 0.0) if with_source else None
    return TimeAverages1D(favg, uavg, savg, stage_sols)


def _trace0(basis, arr):
    return np.einsum("p,epm->em", basis.l_at_0, arr)


def _trace1(basis, arr):
    return np.einsum("p,epm->em", basis.l_at_1, arr)


def element_traces(u, tavg, basis, tab, equation, faces, mode=EA, model=D2):
    """Element-boundary traces of everything the numerical flux needs.

    In EA mode the central flux trace is the stage-weighted average of fluxes
    of the stage-solution traces, evaluated at the face coordinate; in AE
    mode it is the extrapolation of the nodal time-averaged flux.  The two
    coincide for bases that collocate the element endpoints.
    """
    if mode not in TRACE_MODES:
        raise ValueError(f"unknown trace mode {mode!r}")
    if model not in DISSIPATION_MODELS:
        raise ValueError(f"unknown dissipation model {model!r}")

    fd = (_trace0(basis, tavg.flux), _trace1(basis, tavg.flux))
    traces = ElementTraces1D(
        u=(_trace0(basis, u), _trace1(basis, u)),
        uavg=(_trace0(basis, tavg.solution), _trace1(basis, tavg.solution)),
        fd=fd,
        favg=fd,
        stages=None,
    )

    need_stages = mode == EA or model == DCSX
    if need_stages:
        st_l = np.stack([_trace0(basis, us) for us in tavg.stage_solutions])
        st_r = np.stack([_trace1(basis, us) for us in tavg.stage_solutions])
        if model == DCSX:
            traces.stages = (st_l, st_r)
        if mode == EA:
            b = tab.b
            xl, xr = faces[:-1], faces[1:]
            favg_l = sum(
                b[i] * equation.flux_x(st_l[i], x=xl) for i in range(tab.stages) if b[i] != 0.0
            )
            favg_r = sum(
                b[i] * equation.flux_x(st_r[i], x=xr) for i in range(tab.stages) if b[i] != 0.0
            )
            traces.favg = (favg_l, favg_r)
    return traces


def interior_face_data(traces, faces):
    """Assemble face arrays from element traces; ghost slots stay unfilled.

    Face f sits between elements f-1 (minus side) and f (plus side).  The
    first and last faces get their missing side filled by the boundary
    treatment; until then they carry a copy of the interior side.
    """
    def pair(left_of_elem, right_of_elem):
        n_faces = left_of_elem.shape[0] + 1
        minus = np.empty((n_faces,) + left_of_elem.shape[1:])
        plus = np.empty_like(minus)
        minus[1:] = right_of_elem
        plus[:-1] = left_of_elem
        minus[0] = plus[0]
        plus[-1] = minus[-1]
        return minus, plus

    u_m, u_p = pair(*traces.u)
    ua_m, ua_p = pair(*traces.uavg)
    fa_m, fa_p = pair(*traces.favg)
    if traces.stages is not None:
        st_l, st_r = traces.stages
        n_faces = st_l.shape[1] + 1
        st_m = np.empty((st_l.shape[0], n_faces, st_l.shape[2]))
        st_p = np.empty_like(st_m)
        st_m[:, 1:] = st_r
        st_p[:, :-1] = st_l
        st_m[:, 0] = st_p[:, 0]
        st_p[:, -1] = st_m[:, -1]
    else:
        st_m = st_p = None
    return FaceData1D(faces.copy(), u_m, u_p, fa_m, fa_p, ua_m, ua_p, st_m, st_p)


def dissipation(face, model, equation, tab):
    """Dissipative part of the time-averaged numerical flux, per interface."""
    if model == D1:
        lam = rusanov_speed(equation, face.u_minus, face.u_plus, x=face.x)
        return 0.5 * lam[:, None] * (face.u_plus - face.u_minus)
    if model == D2:
        lam = rusanov_speed(equation, face.u_minus, face.u_plus, x=face.x)
        return 0.5 * lam[:, None] * (face.uavg_plus - face.uavg_minus)
    if model == DCSX:
        if face.stage_minus is None:
            raise ValueError("DCSX dissipation needs per-stage traces")
        out = np.zeros_like(face.u_minus)
        for i in range(tab.stages):
            if tab.b[i] == 0.0:
                continue
            lam = rusanov_speed(equation, face.stage_minus[i], face.stage_plus[i], x=face.x)
            out += tab.b[i] * 0.5 * lam[:, None] * (face.stage_plus[i] - face.stage_minus[i])
        return out
    raise ValueError(f"unknown dissipation model {model!r}")


def numerical_flux(face, model, equation, tab):
    """Central part minus dissipation; one flux per interface per step."""
    return 0.5 * (face.favg_minus + face.favg_plus) - dissipation(face, model, equation, tab)


def fr_update(u, tavg, face_flux, traces, basis, inv_dx, dt):
    """Nodal update with the corrected time-averaged flux derivative.

    Element means evolve by the plain flux difference of the interface
    fluxes, which the quadrature exactness of the point sets makes exact.
    """
    dflux = local_derivative(tavg.flux, basis, inv_dx)
    jump_left = face_flux[:-1] - traces.fd[0]
    jump_right = face_flux[1:] - traces.fd[1]
    residual = kernels.fr_residual(
        dflux, jump_left, jump_right, basis.gl_prime, basis.gr_prime, inv_dx
    )
    out = u - dt * residual
    if tavg.source is not None:
        out += dt * tavg.source
    return out
