"""Subcell finite-volume machinery in one dimension.

Each element splits into N+1 subcells whose widths are the quadrature
weights times the element width, so the subcell averages coincide with the
nodal degrees of freedom.  The low-order scheme updates these subcells with
either first-order Rusanov fluxes or a MUSCL-Hancock reconstruction on the
non-uniform, non-centred subcell grid.  The interface flux of the
high-order scheme feeds the outermost subcells, which is what makes the flux
limiter able to enforce admissibility of the means.

The reconstruction and limiting cores carry arbitrary leading batch axes so
the 2-D module can run them line by line.
"""

from dataclasses import dataclass
from typing import Optional

import numpy as np

from crkfr.equations.base import EPS_POS, rusanov_flux
from crkfr.limiters import FIRST_ORDER

_MAX_SLOPE_SHRINKS = 10
_MAX_THETA_HALVINGS = 60


class FluxLimiterError(RuntimeError):
    """Even the pure low-order flux update is inadmissible; dt too large."""


def subcell_faces(faces, weights):
    """Subface positions per element, shape (E, P+1); widths sum to dx."""
    dx = np.diff(faces)
    cum = np.concatenate([[0.0], np.cumsum(weights)])
    return faces[:-1, None] + dx[:, None] * cum[None, :]


@dataclass
class SubcellChain:
    """A run of subcells along one coordinate axis, plus two ghosts per side.

    Arrays have shape (..., G, M) / (..., G); ``along`` holds the coordinate
    in the chain direction, ``transverse`` the other coordinate (or None in
    1-D).  ``axis`` picks the flux component.
    """

    u: np.ndarray
    along: np.ndarray
    face_left: np.ndarray
    face_right: np.ndarray
    n_elements: int
    n_nodes: int
    axis: int = 0
    transverse: Optional[np.ndarray] = None

    @property
    def widths(self):
        return self.face_right - self.face_left

    def coords(self, along):
        if self.axis == 0:
            return {"x": along, "y": self.transverse}
        return {"x": self.transverse, "y": along}


def build_chain(u, x_nodes, faces, weights, ghosts):
    """Assemble the 1-D global subcell chain with mirrored ghost geometry."""
    n_el, n_nodes, n_vars = u.shape
    if n_nodes < 2:
        raise ValueError("subcell blending needs polynomial degree >= 1")
    (gl_vals, gl_x), (gr_vals, gr_x) = ghosts
    sf = subcell_faces(faces, weights)

    g = n_el * n_nodes + 4
    cu = np.empty((g, n_vars))
    cx = np.empty(g)
    fl = np.empty(g)
    fr = np.empty(g)

    cu[2:-2] = u.reshape(-1, n_vars)
    cx[2:-2] = x_nodes.reshape(-1)
    fl[2:-2] = sf[:, :-1].reshape(-1)
    fr[2:-2] = sf[:, 1:].reshape(-1)

    # ghost values arrive ordered outward from the boundary face
    cu[1], cu[0] = gl_vals[0], gl_vals[1]
    cx[1], cx[0] = gl_x[0], gl_x[1]
    xb = faces[0]
    fr[1] = xb
    fl[1] = 2.0 * xb - sf[0, 1]
    fr[0] = fl[1]
    fl[0] = 2.0 * xb - sf[0, 2] if n_nodes > 2 else 2.0 * xb - sf[0, -1]

    cu[-2], cu[-1] = gr_vals[0], gr_vals[1]
    cx[-2], cx[-1] = gr_x[0], gr_x[1]
    xb = faces[-1]
    fl[-2] = xb
    fr[-2] = 2.0 * xb - sf[-1, -2]
    fl[-1] = fr[-2]
    fr[-1] = 2.0 * xb - sf[-1, -3] if n_nodes > 2 else 2.0 * xb - sf[-1, 0]

    return SubcellChain(cu, cx, fl, fr, n_el, n_nodes)


def _minmod(a, b):
    return 0.5 * (np.sign(a) + np.sign(b)) * np.minimum(np.abs(a), np.abs(b))


def reconstruct_states(chain, equation, dt, scheme, diagnostics=None):
    """Per-subcell interface states (left, right) along the chain.

    First order: the cell value itself.  MUSCL-Hancock: slope-limited linear
    reconstruction advanced by a half step with the local flux difference;
    slopes shrink by halves (at most 10 times, then drop to first order)
    until the face and predictor states are admissible.
    """
    u, x = chain.u, chain.along
    if scheme == FIRST_ORDER:
        return u, u

    slope = np.zeros_like(u)
    d_left = (u[..., 1:-1, :] - u[..., :-2, :]) / (x[..., 1:-1] - x[..., :-2])[..., None]
    d_right = (u[..., 2:, :] - u[..., 1:-1, :]) / (x[..., 2:] - x[..., 1:-1])[..., None]
    slope[..., 1:-1, :] = _minmod(d_left, d_right)

    off_l = (chain.face_left - x)[..., None]
    off_r = (chain.face_right - x)[..., None]
    half_nu = (0.5 * dt / chain.widths)[..., None]

    def states(sl):
        ul = u + sl * off_l
        ur = u + sl * off_r
        fr = equation.flux(ur, chain.axis, **chain.coords(chain.face_right))
        fl = equation.flux(ul, chain.axis, **chain.coords(chain.face_left))
        df = half_nu * (fr - fl)
        return ul - df, ur - df, ul, ur

    if equation.n_constraints == 0:
        pl, pr, _, _ = states(slope)
        return pl, pr

    fallbacks = 0
    for attempt in range(_MAX_SLOPE_SHRINKS + 1):
        pl, pr, ul, ur = states(slope)
        ok = (
            equation.admissible(ul)
            & equation.admissible(ur)
            & equation.admissible(pl)
            & equation.admissible(pr)
        )
        if ok.all():
            break
        if attempt == _MAX_SLOPE_SHRINKS:
            slope[~ok] = 0.0
            fallbacks += int((~ok).sum())
            pl, pr, _, _ = states(slope)
            break
        slope[~ok] *= 0.5
    if diagnostics is not None and fallbacks:
        diagnostics["mh_fallbacks"] = diagnostics.get("mh_fallbacks", 0) + fallbacks
    return pl, pr


def chain_fluxes(chain, equation, dt, scheme, diagnostics=None):
    """Rusanov fluxes between consecutive chain cells, shape (..., G-1, M)."""
    left_states, right_states = reconstruct_states(chain, equation, dt, scheme, diagnostics)
    xf = chain.face_right[..., :-1]
    coords = chain.coords(xf)
    return rusanov_flux(
        equation,
        right_states[..., :-1, :],
        left_states[..., 1:, :],
        axis=chain.axis,
        x=coords["x"],
        y=coords["y"],
    )


@dataclass
class LowOrderFluxes1D:
    interior: np.ndarray        # (E, P-1, M) subface fluxes inside elements
    face: np.ndarray            # (E+1, M) low-order flux at element faces
    right_adjacent: np.ndarray  # (E+1, M) interior flux next to each face, right element
    left_adjacent: np.ndarray   # (E+1, M) interior flux next to each face, left element


def chain_indices(n_el, n_nodes):
    """Positions of element faces and in-element subfaces in chain-face numbering."""
    face_idx = 2 + n_nodes * np.arange(n_el + 1) - 1
    inner_idx = 2 + n_nodes * np.arange(n_el)[:, None] + np.arange(n_nodes - 1)[None, :]
    return face_idx, inner_idx


def low_order_fluxes(u, x_nodes, faces, weights, equation, dt, scheme, ghosts, diagnostics=None):
    """All subcell fluxes: in-element subfaces and the element-face candidates."""
    chain = build_chain(u, x_nodes, faces, weights, ghosts)
    flux_chain = chain_fluxes(chain, equation, dt, scheme, diagnostics)

    n_el, n_nodes = chain.n_elements, chain.n_nodes
    face_idx, inner_idx = chain_indices(n_el, n_nodes)
    face = flux_chain[face_idx]
    interior = flux_chain[inner_idx]

    right_adjacent = np.zeros_like(face)
    left_adjacent = np.zeros_like(face)
    right_adjacent[:-1] = flux_chain[face_idx[:-1] + 1]
    left_adjacent[1:] = flux_chain[face_idx[1:] - 1]
    return LowOrderFluxes1D(interior, face, right_adjacent, left_adjacent)


def low_order_update(u, lo, face_flux, dt, weights, dx, source_avg=None):
    """Subcell finite-volume update; element means evolve by the face fluxes."""
    n_el, n_nodes, n_vars = u.shape
    flux = np.empty((n_el, n_nodes + 1, n_vars))
    flux[:, 0] = face_flux[:-1]
    flux[:, -1] = face_flux[1:]
    if n_nodes > 1:
        flux[:, 1:-1] = lo.interior
    nu = dt / (weights[None, :] * dx[:, None])
    out = u - nu[:, :, None] * (flux[:, 1:] - flux[:, :-1])
    if source_avg is not None:
        out = out + dt * source_avg
    return out


def solve_theta(sides, equation, eps):
    """Largest blending factor keeping the listed affine side-updates admissible.

    Each side is (base, slope, active) with base/slope shaped (..., M) and
    active a boolean mask over the leading shape.  The density constraint is
    affine and solved exactly; the rest backtrack by halves.  Raises when
    even theta = 0 fails, which means the low-order precondition is broken.
    """
    lead_shape = sides[0][0].shape[:-1]
    theta = np.ones(lead_shape)

    for base, slope, active in sides:
        rho0 = base[..., 0]
        rho1 = rho0 + slope[..., 0]
        with np.errstate(divide="ignore", invalid="ignore"):
            # shaved by 1e-12 so the recomputed affine density cannot round
            # below the threshold
            cand = (rho0 - eps) / (rho0 - rho1) * (1.0 - 1e-12)
        need = active & (rho1 < eps)
        theta = np.where(need, np.minimum(theta, np.clip(np.nan_to_num(cand), 0.0, 1.0)), theta)

    def admissible_updates(th):
        ok = np.ones(lead_shape, dtype=bool)
        for base, slope, active in sides:
            state = base + th[..., None] * slope
            ok &= np.where(active, equation.admissible(state, eps), True)
        return ok

    ok = admissible_updates(theta)
    for _ in range(_MAX_THETA_HALVINGS):
        if ok.all():
            break
        theta = np.where(ok, theta, 0.5 * theta)
        ok = admissible_updates(theta)
    if not ok.all():
        theta = np.where(ok, theta, 0.0)
        still_bad = ~admissible_updates(theta)
        if still_bad.any():
            raise FluxLimiterError(
                f"low-order flux yields inadmissible subcell updates at faces "
                f"{np.argwhere(still_bad)[:5].tolist()}"
            )
    return theta


def flux_limit_1d(u, flux_cand, lo, dt, weights, dx, equation, eps=EPS_POS, diagnostics=None):
    """Blend each face flux toward the low-order flux until the adjacent
    first/last subcell updates are admissible."""
    if equation.n_constraints == 0:
        return flux_cand, 0
    n_el = u.shape[0]
    n_faces = n_el + 1
    diff = flux_cand - lo.face

    nu_r = dt / (weights[0] * dx)                      # element right of the face
    nu_l = dt / (weights[-1] * dx)                     # element left of the face
    right_active = np.zeros(n_faces, dtype=bool)
    left_active = np.zeros(n_faces, dtype=bool)
    right_active[:-1] = True
    left_active[1:] = True

    base_r = np.zeros_like(diff)
    slope_r = np.zeros_like(diff)
    base_r[:-1] = u[:, 0] - nu_r[:, None] * (lo.right_adjacent[:-1] - lo.face[:-1])
    slope_r[:-1] = nu_r[:, None] * diff[:-1]

    base_l = np.zeros_like(diff)
    slope_l = np.zeros_like(diff)
    base_l[1:] = u[:, -1] - nu_l[:, None] * (lo.face[1:] - lo.left_adjacent[1:])
    slope_l[1:] = -nu_l[:, None] * diff[1:]

    theta = solve_theta(
        [(base_r, slope_r, right_active), (base_l, slope_l, left_active)], equation, eps
    )
    limited = int((theta < 1.0).sum())
    if diagnostics is not None and limited:
        diagnostics["limited_faces"] = diagnostics.get("limited_faces", 0) + limited
    return lo.face + theta[:, None] * diff, limited
