"""Nodal bases on the reference element [0, 1].

A basis bundles the solution points (Gauss-Legendre or Gauss-Legendre-Lobatto),
their quadrature weights, the Lagrange differentiation matrix
``D[i, j] = l_j'(xi_i)``, the Lagrange values at the element endpoints, and the
boundary derivatives of the flux correction functions.  The correction
functions themselves (right Radau for GL points, g2 for GLL points) are never
materialized: the nodal update only needs their derivatives at the solution
points, which reduce to

    gR'(xi_p) =  l_p(1) / w_p,      gL'(xi_p) = -l_p(0) / w_p.

All quantities are computed, not tabulated; nodes come from Newton iteration
on Legendre polynomials to 1e-15.
"""

from dataclasses import dataclass, field

import numpy as np

MAX_DEGREE = 7
_NEWTON_TOL = 1e-15

GL = "gl"
GLL = "gll"


def _legendre_and_derivative(n, x):
    """Value and derivative of the Legendre polynomial P_n on [-1, 1]."""
    x = np.asarray(x, dtype=float)
    p_prev = np.ones_like(x)
    if n == 0:
        return p_prev, np.zeros_like(x)
    p = x.copy()
    for k in range(2, n + 1):
        p_prev, p = p, ((2 * k - 1) * x * p - (k - 1) * p_prev) / k
    # derivative from the standard identity, valid away from |x| = 1
    with np.errstate(divide="ignore", invalid="ignore"):
        dp = n * (x * p - p_prev) / (x * x - 1.0)
    return p, dp


def _gauss_legendre_nodes(n_pts):
    """Roots of P_{n_pts} and weights on [-1, 1] via Newton iteration."""
    k = np.arange(n_pts)
    x = np.cos(np.pi * (k + 0.75) / (n_pts + 0.5))  # Chebyshev-like initial guess
    for _ in range(100):
        p, dp = _legendre_and_derivative(n_pts, x)
        dx = p / dp
        x -= dx
        if np.max(np.abs(dx)) < _NEWTON_TOL:
            break
    _, dp = _legendre_and_derivative(n_pts, x)
    w = 2.0 / ((1.0 - x * x) * dp * dp)
    return np.sort(x), w[np.argsort(x)]


def _gauss_lobatto_nodes(n_pts):
    """Roots of (1 - x^2) P'_{n-1} and weights on [-1, 1]."""
    n = n_pts - 1
    x = np.cos(np.pi * np.arange(n_pts) / n)[::-1].copy()
    # interior nodes: Newton on P'_n, using the Legendre ODE for P''_n
    for _ in range(100 if n_pts > 2 else 0):
        p, dp = _legendre_and_derivative(n, x[1:-1])
        xi = x[1:-1]
        d2p = (2.0 * xi * dp - n * (n + 1) * p) / (1.0 - xi * xi)
        dx = dp / d2p
        x[1:-1] -= dx
        if np.max(np.abs(dx)) < _NEWTON_TOL:
            break
    x[0], x[-1] = -1.0, 1.0
    p, _ = _legendre_and_derivative(n, x)
    w = 2.0 / (n * (n + 1) * p * p)
    return x, w


def _barycentric_weights(points):
    lam = np.ones(len(points))
    for j in range(len(points)):
        lam[j] = 1.0 / np.prod(points[j] - np.delete(points, j))
    return lam


def _lagrange_values_at(points, lam, x):
    """Values l_p(x) of all Lagrange polynomials at a single point x."""
    diff = x - points
    exact = np.abs(diff) < 1e-14
    if exact.any():
        out = np.zeros(len(points))
        out[np.argmax(exact)] = 1.0
        return out
    terms = lam / diff
    return terms / terms.sum()


@dataclass(frozen=True)
class NodalBasis:
    """Immutable nodal basis of one polynomial degree; safe to share."""

    degree: int
    kind: str
    points: np.ndarray          # solution points, strictly increasing in [0, 1]
    weights: np.ndarray         # quadrature weights, sum to 1
    diff_matrix: np.ndarray     # D[i, j] = l_j'(xi_i)
    l_at_0: np.ndarray          # l_p(0)
    l_at_1: np.ndarray          # l_p(1)
    gl_prime: np.ndarray        # left correction derivative at solution points
    gr_prime: np.ndarray        # right correction derivative at solution points
    nodal_to_modal: np.ndarray = field(repr=False, default=None)

    @property
    def n_nodes(self):
        return self.degree + 1


def lagrange_matrix(basis, xi):
    """Evaluation matrix S[j, p] = l_p(xi_j) for points xi in [0, 1]."""
    lam = _barycentric_weights(basis.points)
    xi = np.atleast_1d(np.asarray(xi, dtype=float))
    out = np.empty((xi.size, basis.n_nodes))
    for j, xj in enumerate(xi):
        out[j] = _lagrange_values_at(basis.points, lam, xj)
    return out


def correction_derivatives(l_at_0, l_at_1, weights):
    """Boundary derivatives of the correction functions at the solution points.

    These identities define the correction exactly for the Radau (GL) and g2
    (GLL) pairings; only the derivatives enter the update.
    """
    gr_prime = l_at_1 / weights
    gl_prime = -l_at_0 / weights
    return gl_prime, gr_prime


def _modal_matrix(points):
    """Map nodal values to coefficients of orthonormal Legendre on [0, 1]."""
    n = len(points)
    v = np.empty((n, n))
    for j in range(n):
        p, _ = _legendre_and_derivative(j, 2.0 * points - 1.0)
        v[:, j] = np.sqrt(2 * j + 1) * p
    return np.linalg.inv(v)


def build_basis(degree, kind=GL):
    """Construct the nodal basis of the given degree on [0, 1].

    Degrees 0..7 are supported; anything else is rejected outright rather
    than silently truncated.
    """
    if not isinstance(degree, (int, np.integer)) or not 0 <= degree <= MAX_DEGREE:
        raise ValueError(f"unsupported polynomial degree {degree!r}; supported range is 0..{MAX_DEGREE}")
    kind = kind.lower()
    if kind == GL:
        x, w = _gauss_legendre_nodes(degree + 1)
    elif kind == GLL:
        if degree < 1:
            raise ValueError("GLL points need degree >= 1")
        x, w = _gauss_lobatto_nodes(degree + 1)
    else:
        raise ValueError(f"unknown point kind {kind!r}; expected 'gl' or 'gll'")

    # map nodes and weights from [-1, 1] to the unit interval
    points = 0.5 * (x + 1.0)
    weights = 0.5 * w
    if kind == GLL:
        points[0], points[-1] = 0.0, 1.0

    lam = _barycentric_weights(points)
    n = degree + 1
    diff = np.zeros((n, n))
    for i in range(n):
        for j in range(n):
            if i != j:
                diff[i, j] = (lam[j] / lam[i]) / (points[i] - points[j])
        diff[i, i] = -diff[i].sum()  # rows annihilate constants exactly

    l0 = _lagrange_values_at(points, lam, 0.0)
    l1 = _lagrange_values_at(points, lam, 1.0)
    gl_prime, gr_prime = correction_derivatives(l0, l1, weights)

    for arr in (points, weights, diff, l0, l1, gl_prime, gr_prime):
        arr.setflags(write=False)
    modal = _modal_matrix(points)
    modal.setflags(write=False)

    return NodalBasis(
        degree=int(degree),
        kind=kind,
        points=points,
        weights=weights,
        diff_matrix=diff,
        l_at_0=l0,
        l_at_1=l1,
        gl_prime=gl_prime,
        gr_prime=gr_prime,
        nodal_to_modal=modal,
    )
