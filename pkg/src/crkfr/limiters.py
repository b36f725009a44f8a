"""Blending machinery shared between dimensions.

Covers the modal smoothness indicator that produces the blending
coefficients, the convex nodal blend of high- and low-order candidates, and
the positivity scaling limiter that pulls nodal values toward the (already
admissible) element mean.
"""

from dataclasses import dataclass

import numpy as np

from crkfr.equations.base import EPS_POS

FIRST_ORDER = "fo"
MUSCL_HANCOCK = "mh"
NO_BLENDING = "none"

BLENDING_SCHEMES = (NO_BLENDING, FIRST_ORDER, MUSCL_HANCOCK)


class InadmissibleMeanError(RuntimeError):
    """An element mean left the admissible set; upstream contract violated."""


@dataclass
class IndicatorConfig:
    variable: str = "auto"          # auto -> rho*p, rho*p11 or u itself
    alpha_max: float = 1.0
    alpha_min: float = 1e-3
    sharpness: float = 9.21024
    smooth_neighbors: bool = True

    def __post_init__(self):
        if not 0.0 < self.alpha_max <= 1.0:
            raise ValueError("alpha_max must lie in (0, 1]")


def indicator_threshold(degree):
    """Resolution-dependent cutoff for the top-mode energy ratio."""
    return 0.5 * 10.0 ** (-1.8 * (degree + 1) ** 0.25)


def indicator_variable(u, equation, which="auto"):
    """Scalar field fed to the modal indicator."""
    if which == "auto":
        name = equation.name
        if name.startswith("euler"):
            rho = u[..., 0]
            ke = 0.5 * np.sum(u[..., 1:-1] ** 2, axis=-1) / rho
            p = (equation.gamma - 1.0) * (u[..., -1] - ke)
            return rho * p
        if name == "tenmoment":
            p11 = 2.0 * u[..., 3] - u[..., 1] ** 2 / u[..., 0]
            return u[..., 0] * p11
        return u[..., 0]
    if which == "first":
        return u[..., 0]
    raise ValueError(f"unknown indicator variable {which!r}")


def _alpha_from_ratio(ratio, degree, config):
    thr = indicator_threshold(degree)
    arg = np.clip(-config.sharpness / thr * (ratio - thr), -50.0, 50.0)
    alpha = 1.0 / (1.0 + np.exp(arg))
    alpha = np.where(alpha < config.alpha_min, 0.0, alpha)
    return np.minimum(alpha, config.alpha_max)


def smoothness_alpha_1d(u, equation, basis, config, periodic):
    """Per-element and per-face blending coefficients from modal decay.

    The energy ratio compares the top mode against the total and, for
    degree >= 2, the next mode against the truncated total; a sharp logistic
    maps the ratio to [0, alpha_max].
    """
    if not np.isfinite(u).all():
        raise ValueError("smoothness indicator got non-finite data")
    n = basis.degree
    q = indicator_variable(u, equation, config.variable)
    if n == 0:
        alpha = np.zeros(u.shape[0])
    else:
        modal = np.einsum("pq,eq->ep", basis.nodal_to_modal, q)
        energy = modal * modal
        total = energy.sum(axis=1)
        tiny = np.finfo(float).tiny
        ratio = energy[:, n] / np.maximum(total, tiny)
        if n >= 2:
            total2 = total - energy[:, n]
            ratio2 = energy[:, n - 1] / np.maximum(total2, tiny)
            ratio = np.maximum(ratio, ratio2)
        ratio = np.where(total > tiny, ratio, 0.0)
        alpha = _alpha_from_ratio(ratio, n, config)

    if config.smooth_neighbors and alpha.size > 1:
        left = np.roll(alpha, 1)
        right = np.roll(alpha, -1)
        if not periodic:
            left[0] = 0.0
            right[-1] = 0.0
        alpha = np.maximum(alpha, 0.5 * np.maximum(left, right))

    face = np.empty(alpha.size + 1)
    face[1:-1] = np.maximum(alpha[:-1], alpha[1:])
    if periodic:
        face[0] = face[-1] = max(alpha[0], alpha[-1])
    else:
        face[0], face[-1] = alpha[0], alpha[-1]
    return alpha, face


def smoothness_alpha_2d(u, equation, basis, config, periodic_x, periodic_y):
    """Blending coefficients on a 2-D tensor-product element layout."""
    if not np.isfinite(u).all():
        raise ValueError("smoothness indicator got non-finite data")
    n = basis.degree
    nx, ny = u.shape[0], u.shape[1]
    q = indicator_variable(u, equation, config.variable)
    if n == 0:
        alpha = np.zeros((nx, ny))
    else:
        m = basis.nodal_to_modal
        modal = np.einsum("ip,jq,Epq->Eij", m, m, q.reshape(nx * ny, *q.shape[2:]))
        energy = (modal * modal).reshape(nx, ny, n + 1, n + 1)
        total = energy.sum(axis=(2, 3))
        tiny = np.finfo(float).tiny
        deg = np.maximum(np.arange(n + 1)[:, None], np.arange(n + 1)[None, :])
        top = energy[..., deg == n].sum(axis=-1)
        ratio = top / np.maximum(total, tiny)
        if n >= 2:
            next_band = energy[..., deg == n - 1].sum(axis=-1)
            total2 = total - top
            ratio = np.maximum(ratio, next_band / np.maximum(total2, tiny))
        ratio = np.where(total > tiny, ratio, 0.0)
        alpha = _alpha_from_ratio(ratio, n, config)

    if config.smooth_neighbors and alpha.size > 1:
        for axis, per in ((0, periodic_x), (1, periodic_y)):
            fwd = np.roll(alpha, 1, axis=axis)
            bwd = np.roll(alpha, -1, axis=axis)
            if not per:
                sl_first = [slice(None)] * 2
                sl_first[axis] = 0
                fwd[tuple(sl_first)] = 0.0
                sl_last = [slice(None)] * 2
                sl_last[axis] = -1
                bwd[tuple(sl_last)] = 0.0
            alpha = np.maximum(alpha, 0.5 * np.maximum(fwd, bwd))

    face_x = np.empty((nx + 1, ny))
    face_x[1:-1] = np.maximum(alpha[:-1], alpha[1:])
    if periodic_x:
        face_x[0] = face_x[-1] = np.maximum(alpha[0], alpha[-1])
    else:
        face_x[0], face_x[-1] = alpha[0], alpha[-1]
    face_y = np.empty((nx, ny + 1))
    face_y[:, 1:-1] = np.maximum(alpha[:, :-1], alpha[:, 1:])
    if periodic_y:
        face_y[:, 0] = face_y[:, -1] = np.maximum(alpha[:, 0], alpha[:, -1])
    else:
        face_y[:, 0], face_y[:, -1] = alpha[:, 0], alpha[:, -1]
    return alpha, face_x, face_y


def blend(u_high, u_low, alpha):
    """Convex nodal combination; element means do not depend on alpha."""
    alpha = np.asarray(alpha, dtype=float)
    if np.any(alpha < 0.0) or np.any(alpha > 1.0):
        raise ValueError("blending coefficients must lie in [0, 1]")
    extra = u_high.ndim - alpha.ndim
    a = alpha.reshape(alpha.shape + (1,) * extra)
    return (1.0 - a) * u_high + a * u_low


def blend_interface_flux(flux_high, flux_low, alpha_face):
    """Single blended interface flux shared by the high and low order updates."""
    a = np.asarray(alpha_face, dtype=float)[..., None]
    return (1.0 - a) * flux_high + a * flux_low


def element_means(u, weights):
    """Quadrature means over the node axes (one axis in 1-D, two in 2-D)."""
    if u.ndim == 3:
        return np.einsum("p,epm->em", weights, u)
    return np.einsum("p,q,xypqm->xym", weights, weights, u)


def scaling_limit(u, equation, weights, eps=EPS_POS, diagnostics=None):
    """Scale nodal values toward the element mean until all constraints hold.

    Means must already be admissible.  The linear density constraint gets the
    exact scaling factor; for the remaining concave constraints the factor
    from linear interpolation of constraint values is sufficient by
    concavity, and the mean is preserved exactly because scaling is affine
    about it.
    """
    if equation.n_constraints == 0:
        return u
    mean = element_means(u, weights)
    pk_mean = equation.constraints(mean)
    if not (pk_mean >= eps).all():
        bad = np.argwhere(~(pk_mean >= eps).all(axis=-1))
        raise InadmissibleMeanError(
            f"scaling limiter requires admissible means; offending elements {bad[:5].tolist()}"
        )

    node_axes = tuple(range(mean.ndim - 1, u.ndim - 1))
    mean_b = np.expand_dims(mean, tuple(ax for ax in node_axes))
    out = u
    for k in range(equation.n_constraints):
        pk = equation.constraints(out)[..., k]
        pk_min = pk.min(axis=node_axes)
        need = pk_min < eps
        if not need.any():
            continue
        pk_m = equation.constraints(element_means(out, weights))[..., k]
        theta = np.ones_like(pk_m)
        denom = pk_m - pk_min
        with np.errstate(divide="ignore", invalid="ignore"):
            cand = (pk_m - eps) / denom
        theta = np.where(need & (denom > 0.0), np.clip(cand, 0.0, 1.0), theta)
        th = np.expand_dims(theta, tuple(ax for ax in node_axes) + (-1,))
        out = mean_b + th * (out - mean_b)
        if diagnostics is not None:
            diagnostics["scaled_elements"] = diagnostics.get("scaled_elements", 0) + int(need.sum())
    return out
