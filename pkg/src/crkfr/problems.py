"""Built-in test problems: initial data, exact solutions, boundary setups.

Each problem bundles the equation factory with its domain, initial
condition, optional exact solution and boundary conditions.  The CLI and the
convergence harness look problems up by name; the exact solutions double as
inflow data where boundaries need it.
"""

import math
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from crkfr.boundary import (
    PERIODIC,
    BoundaryCondition,
    BoundarySpec1D,
)
from crkfr.boundary2d import BoundarySpec2D
from crkfr.equations import (
    Burgers,
    Euler1D,
    Euler2D,
    LinearAdvection,
    QuiverEnergy,
    TenMoment,
    VariableAdvection1D,
    VariableAdvection2D,
)


@dataclass
class Problem:
    name: str
    dim: int
    description: str
    domain: tuple
    make_equation: Callable
    initial: Callable            # (equation, mesh) -> u0(x[, y])
    boundaries: Callable         # (equation, exact) -> BoundarySpec
    exact: Optional[Callable] = None   # (equation) -> u(x[, y], t)
    default_final_time: float = 1.0
    default_gamma: float = 1.4

    def equation(self, cfg=None):
        gamma = getattr(cfg, "gamma", None) if cfg is not None else None
        return self.make_equation(gamma if gamma is not None else self.default_gamma)


_CATALOG = {}


def register(problem):
    _CATALOG[problem.name] = problem
    return problem


def get(name):
    try:
        return _CATALOG[name]
    except KeyError:
        raise KeyError(f"unknown problem {name!r}; known: {sorted(_CATALOG)}") from None


def names():
    return sorted(_CATALOG)


def exact_solution_catalog(problem_id, x, t):
    """Exact solution of a catalog problem at positions x and time t."""
    prob = get(problem_id)
    if prob.exact is None:
        raise ValueError(f"problem {problem_id!r} has no exact solution")
    return prob.exact(prob.make_equation(prob.default_gamma))(np.asarray(x, dtype=float), t)


# --- scalar problems -------------------------------------------------------

def _linadv_exact(equation):
    def fn(x, t):
        return np.sin(2.0 * np.pi * (x - equation.speed * t))[..., None]

    return fn


register(
    Problem(
        name="linadv_sine",
        dim=1,
        description="linear advection of a sine wave, periodic",
        domain=(0.0, 1.0),
        make_equation=lambda gamma: LinearAdvection(1.0),
        initial=lambda eq, mesh: (lambda x: np.sin(2.0 * np.pi * x)[..., None]),
        exact=_linadv_exact,
        boundaries=lambda eq, exact: BoundarySpec1D(
            BoundaryCondition(PERIODIC), BoundaryCondition(PERIODIC)
        ),
        default_final_time=2.0,
    )
)


def _varadv_exact(equation):
    def fn(x, t):
        xi = x / (1.0 + t * x)
        return (np.cos(0.5 * np.pi * xi) / (1.0 + t * x) ** 2)[..., None]

    return fn


register(
    Problem(
        name="varadv_x2",
        dim=1,
        description="variable advection a(x) = x^2 with inflow/outflow",
        domain=(0.1, 1.0),
        make_equation=lambda gamma: VariableAdvection1D(lambda x: np.asarray(x) ** 2),
        initial=lambda eq, mesh: (lambda x: np.cos(0.5 * np.pi * x)[..., None]),
        exact=_varadv_exact,
        boundaries=lambda eq, exact: BoundarySpec1D(
            BoundaryCondition("inflow", inflow=exact),
            BoundaryCondition("outflow"),
        ),
        default_final_time=1.0,
    )
)


def _burgers_exact(equation):
    def fn(x, t):
        # u = 0.2 sin(x - u t) by Newton iteration; breaks down at the shock
        if t >= 5.0:
            raise ValueError("smooth solution exists only for t < 5")
        x = np.asarray(x, dtype=float)
        u = 0.2 * np.sin(x)
        for _ in range(200):
            residual = u - 0.2 * np.sin(x - u * t)
            slope = 1.0 + 0.2 * t * np.cos(x - u * t)
            du = residual / slope
            u -= du
            if np.max(np.abs(du)) < 1e-13:
                return u[..., None]
        raise RuntimeError("characteristic solve did not converge")

    return fn


register(
    Problem(
        name="burgers_sine",
        dim=1,
        description="inviscid Burgers with u0 = 0.2 sin(x), periodic",
        domain=(0.0, 2.0 * np.pi),
        make_equation=lambda gamma: Burgers(),
        initial=lambda eq, mesh: (lambda x: 0.2 * np.sin(x)[..., None]),
        exact=_burgers_exact,
        boundaries=lambda eq, exact: BoundarySpec1D(
            BoundaryCondition(PERIODIC), BoundaryCondition(PERIODIC)
        ),
        default_final_time=2.0,
    )
)


# --- 1-D Euler problems -----------------------------------------------------

def _piecewise_state(eq, x, regions):
    """regions: list of (predicate(x), (rho, v1, p)) evaluated first-match."""
    x = np.asarray(x, dtype=float)
    out = np.empty(x.shape + (3,))
    filled = np.zeros(x.shape, dtype=bool)
    for predicate, (rho, v1, p) in regions:
        mask = predicate(x) & ~filled
        out[mask] = eq.prim_to_cons(rho, v1, p)
        filled |= mask
    return out


register(
    Problem(
        name="blast",
        dim=1,
        description="interacting blast waves between solid walls",
        domain=(0.0, 1.0),
        make_equation=lambda gamma: Euler1D(gamma),
        initial=lambda eq, mesh: (
            lambda x: _piecewise_state(
                eq,
                x,
                [
                    (lambda s: s < 0.1, (1.0, 0.0, 1000.0)),
                    (lambda s: s < 0.9, (1.0, 0.0, 0.01)),
                    (lambda s: s >= 0.9, (1.0, 0.0, 100.0)),
                ],
            )
        ),
        boundaries=lambda eq, exact: BoundarySpec1D(
            BoundaryCondition("wall"), BoundaryCondition("wall")
        ),
        default_final_time=0.038,
    )
)


# both far-field states persist at the boundaries over the run; the
# boundaries are subsonic, so the upwind flux splits the characteristics
def _titarev_boundaries(eq, exact):
    left = eq.prim_to_cons(1.515695, 0.523346, 1.805)
    right = eq.prim_to_cons(1.0, 0.0, 1.0)

    def g_left(x, t):
        return np.broadcast_to(left, np.asarray(x).shape + (3,)).copy()

    def g_right(x, t):
        return np.broadcast_to(right, np.asarray(x).shape + (3,)).copy()

    return BoundarySpec1D(
        BoundaryCondition("mixed_hllc", inflow=g_left),
        BoundaryCondition("mixed_hllc", inflow=g_right),
    )


register(
    Problem(
        name="titarev_toro",
        dim=1,
        description="shock running into high-frequency density oscillations",
        domain=(-5.0, 5.0),
        make_equation=lambda gamma: Euler1D(gamma),
        initial=lambda eq, mesh: (
            lambda x: np.where(
                (x <= -4.5)[..., None],
                eq.prim_to_cons(1.515695, 0.523346, 1.805),
                eq.prim_to_cons(1.0 + 0.1 * np.sin(20.0 * np.pi * x), 0.0, 1.0),
            )
        ),
        boundaries=_titarev_boundaries,
        default_final_time=5.0,
    )
)


def _sedov1d_initial(eq, mesh):
    dx = mesh.dx

    def fn(x):
        out = np.empty(x.shape + (3,))
        out[..., 0] = 1.0
        out[..., 1] = 0.0
        centered = np.abs(x) <= 0.5 * dx
        out[..., 2] = np.where(centered, 3.2e6 / dx, 1e-12)
        return out

    return fn


register(
    Problem(
        name="sedov1d",
        dim=1,
        description="point blast with extreme pressure ratio, solid walls",
        domain=(-1.0, 1.0),
        make_equation=lambda gamma: Euler1D(gamma),
        initial=_sedov1d_initial,
        boundaries=lambda eq, exact: BoundarySpec1D(
            BoundaryCondition("wall"), BoundaryCondition("wall")
        ),
        default_final_time=0.001,
    )
)


# --- ten-moment problems ----------------------------------------------------

def _tenmoment_prim(rho, v1, v2, p11, p12, p22):
    e11 = 0.5 * p11 + 0.5 * rho * v1 * v1
    e12 = 0.5 * p12 + 0.5 * rho * v1 * v2
    e22 = 0.5 * p22 + 0.5 * rho * v2 * v2
    return np.array([rho, rho * v1, rho * v2, e11, e12, e22])


def _two_rarefaction_initial(eq, mesh):
    left = _tenmoment_prim(1.0, -4.0, 0.0, 9.0, 7.0, 9.0)
    right = _tenmoment_prim(1.0, 4.0, 0.0, 9.0, 7.0, 9.0)

    def fn(x):
        return np.where((x < 2.0)[..., None], left, right)

    return fn


def _two_rarefaction_quiver():
    return QuiverEnergy(
        w=lambda x, y, t: 25.0 * np.exp(-200.0 * (np.asarray(x) - 2.0) ** 2),
        dwdx=lambda x, y, t: -400.0 * (np.asarray(x) - 2.0)
        * 25.0 * np.exp(-200.0 * (np.asarray(x) - 2.0) ** 2),
        dwdy=lambda x, y, t: np.zeros_like(np.asarray(x, dtype=float)),
    )


for _suffix, _quiver in (("", _two_rarefaction_quiver()), ("_nosource", None)):
    register(
        Problem(
            name=f"tenmom_two_rarefaction{_suffix}",
            dim=1,
            description="ten-moment double rarefaction"
            + ("" if _suffix else " with quiver-energy source"),
            domain=(0.0, 4.0),
            make_equation=(lambda q: (lambda gamma: TenMoment(quiver=q)))(_quiver),
            initial=_two_rarefaction_initial,
            boundaries=lambda eq, exact: BoundarySpec1D(
                BoundaryCondition("outflow"), BoundaryCondition("outflow")
            ),
            default_final_time=0.1,
        )
    )


def _tenmom_realistic_quiver(absorption=1.0):
    def w(x, y, t):
        return np.exp(-0.01 * ((np.asarray(x) - 50.0) ** 2 + (np.asarray(y) - 50.0) ** 2))

    return QuiverEnergy(
        w=w,
        dwdx=lambda x, y, t: -0.02 * (np.asarray(x) - 50.0) * w(x, y, t),
        dwdy=lambda x, y, t: -0.02 * (np.asarray(y) - 50.0) * w(x, y, t),
        absorption=absorption,
        x_component_only=True,
    )


register(
    Problem(
        name="tenmom_inverse_bremsstrahlung",
        dim=2,
        description="uniform plasma heated by a centred quiver-energy beam",
        domain=(0.0, 100.0, 0.0, 100.0),
        make_equation=lambda gamma: TenMoment(quiver=_tenmom_realistic_quiver()),
        initial=lambda eq, mesh: (
            lambda x, y: np.broadcast_to(
                _tenmoment_prim(0.109885, 0.0, 0.0, 1.0, 0.0, 1.0), x.shape + (6,)
            ).copy()
        ),
        boundaries=lambda eq, exact: BoundarySpec2D.uniform("outflow"),
        default_final_time=0.5,
    )
)


# --- 2-D problems ----------------------------------------------------------

def _vortex_equation(gamma):
    return Euler2D(gamma)


def _vortex_state(eq, x, y):
    beta, mach, alpha = 5.0, 0.5, np.deg2rad(45.0)
    g = eq.gamma
    r2 = x * x + y * y
    gauss = np.exp(0.5 * (1.0 - r2))
    rho = (1.0 - beta**2 * (g - 1.0) / (8.0 * g * np.pi**2) * np.exp(1.0 - r2)) ** (
        1.0 / (g - 1.0)
    )
    v1 = mach * np.cos(alpha) - beta * y / (2.0 * np.pi) * gauss
    v2 = mach * np.sin(alpha) + beta * x / (2.0 * np.pi) * gauss
    p = rho**g
    return eq.prim_to_cons(rho, v1, v2, p)


def _vortex_exact(eq):
    mach, alpha = 0.5, np.deg2rad(45.0)
    u0 = mach * np.cos(alpha)
    v0 = mach * np.sin(alpha)

    def fn(x, y, t):
        xr = (x - u0 * t + 10.0) % 20.0 - 10.0
        yr = (y - v0 * t + 10.0) % 20.0 - 10.0
        return _vortex_state(eq, xr, yr)

    return fn


register(
    Problem(
        name="isentropic_vortex",
        dim=2,
        description="advecting isentropic vortex, periodic, smooth exact solution",
        domain=(-10.0, 10.0, -10.0, 10.0),
        make_equation=_vortex_equation,
        initial=lambda eq, mesh: (lambda x, y: _vortex_state(eq, x, y)),
        exact=_vortex_exact,
        boundaries=lambda eq, exact: BoundarySpec2D.uniform(PERIODIC),
        default_final_time=1.0,
    )
)


def _riemann2d_initial(eq, mesh):
    states = [
        (lambda x, y: (x >= 0.5) & (y >= 0.5), (0.5313, 0.0, 0.0, 0.4)),
        (lambda x, y: (x < 0.5) & (y >= 0.5), (1.0, 0.7276, 0.0, 1.0)),
        (lambda x, y: (x < 0.5) & (y < 0.5), (0.8, 0.0, 0.0, 1.0)),
        (lambda x, y: (x >= 0.5) & (y < 0.5), (1.0, 0.0, 0.7276, 1.0)),
    ]

    def fn(x, y):
        out = np.empty(x.shape + (4,))
        for predicate, (rho, v1, v2, p) in states:
            mask = predicate(x, y)
            out[mask] = eq.prim_to_cons(rho, v1, v2, p)
        return out

    return fn


register(
    Problem(
        name="riemann2d_12",
        dim=2,
        description="four-quadrant Riemann problem: two slip lines, two shocks",
        domain=(0.0, 1.0, 0.0, 1.0),
        make_equation=lambda gamma: Euler2D(gamma),
        initial=_riemann2d_initial,
        boundaries=lambda eq, exact: BoundarySpec2D.uniform("outflow"),
        default_final_time=0.25,
    )
)


def _sedov2d_initial(eq, mesh):
    sigma_rho, sigma_p = 0.25, 0.15

    def fn(x, y):
        r2 = x * x + y * y
        rho = 1.0 + np.exp(-0.5 * r2 / sigma_rho**2) / (4.0 * np.pi * sigma_rho**2)
        p = 1e-5 + (eq.gamma - 1.0) * np.exp(-0.5 * r2 / sigma_p**2) / (4.0 * np.pi * sigma_p**2)
        return eq.prim_to_cons(rho, 0.0, 0.0, p)

    return fn


register(
    Problem(
        name="sedov2d_periodic",
        dim=2,
        description="Gaussian energy deposition on a periodic box",
        domain=(-1.5, 1.5, -1.5, 1.5),
        make_equation=lambda gamma: Euler2D(gamma),
        initial=_sedov2d_initial,
        boundaries=lambda eq, exact: BoundarySpec2D.uniform(PERIODIC),
        default_final_time=2.0,
    )
)


def _composite_initial(eq, mesh):
    r0 = 0.15

    def fn(x, y):
        q = np.minimum(np.hypot(x - 0.25, y - 0.5), r0) / r0
        hump = 0.25 * (1.0 + np.cos(np.pi * q))
        d = np.hypot(x - 0.5, y - 0.25)
        cone = np.where(d <= r0, 1.0 - d / r0, 0.0)
        disc = (np.hypot(x - 0.5, y - 0.75) <= r0) & ~(
            (np.abs(x - 0.5) < 0.25 * r0) & (y < 0.75 + 0.7 * r0)
        )
        return (hump + cone + disc.astype(float))[..., None]

    return fn


register(
    Problem(
        name="composite_rotation",
        dim=2,
        description="slotted disc, cone and hump rotating about the box centre",
        domain=(0.0, 1.0, 0.0, 1.0),
        make_equation=lambda gamma: VariableAdvection2D(
            lambda x, y: 0.5 - np.asarray(y), lambda x, y: np.asarray(x) - 0.5
        ),
        initial=_composite_initial,
        boundaries=lambda eq, exact: BoundarySpec2D.uniform(PERIODIC),
        default_final_time=2.0 * math.pi,
    )
)


def _jet_inflow(eq):
    ambient = eq.prim_to_cons(0.5, 0.0, 0.0, 0.4127)
    jet = eq.prim_to_cons(5.0, 800.0, 0.0, 0.4127)

    def fn(x, y, t):
        y = np.asarray(y, dtype=float)
        inside = np.abs(y) <= 0.05
        return np.where(inside[..., None], jet, ambient)

    return fn


register(
    Problem(
        name="jet2d",
        dim=2,
        description="hypersonic jet entering a quiescent medium (exploratory)",
        domain=(0.0, 1.0, -0.5, 0.5),
        make_equation=lambda gamma: Euler2D(gamma),
        initial=lambda eq, mesh: (
            lambda x, y: np.broadcast_to(eq.prim_to_cons(0.5, 0.0, 0.0, 0.4127), x.shape + (4,)).copy()
        ),
        boundaries=lambda eq, exact: BoundarySpec2D(
            xlo=BoundaryCondition("mixed_hllc", inflow=_jet_inflow(eq)),
            xhi=BoundaryCondition("outflow"),
            ylo=BoundaryCondition("outflow"),
            yhi=BoundaryCondition("outflow"),
        ),
        default_final_time=0.001,
    )
)


def _rt_equation(gamma):
    return Euler2D(gamma if gamma is not None else 5.0 / 3.0, gravity=1.0)


def _rt_initial(eq, mesh):
    g = eq.gamma

    def fn(x, y):
        lower = y <= 0.5
        rho = np.where(lower, 2.0, 1.0)
        p = np.where(lower, 2.0 * y + 1.0, y + 1.5)
        c = np.sqrt(g * p / rho)
        v2 = -0.025 * c * np.cos(8.0 * np.pi * x)
        return eq.prim_to_cons(rho, 0.0, v2, p)

    return fn


register(
    Problem(
        name="rayleigh_taylor",
        dim=2,
        description="heavy-over-light interface under gravity (exploratory)",
        domain=(0.0, 0.25, 0.0, 1.0),
        make_equation=_rt_equation,
        initial=_rt_initial,
        boundaries=lambda eq, exact: BoundarySpec2D(
            xlo=BoundaryCondition("wall"),
            xhi=BoundaryCondition("wall"),
            ylo=BoundaryCondition("mixed_hllc", inflow=lambda x, y, t: np.broadcast_to(
                eq.prim_to_cons(2.0, 0.0, 0.0, 1.0), np.asarray(x).shape + (4,)
            ).copy()),
            yhi=BoundaryCondition("mixed_hllc", inflow=lambda x, y, t: np.broadcast_to(
                eq.prim_to_cons(1.0, 0.0, 0.0, 2.5), np.asarray(x).shape + (4,)
            ).copy()),
        ),
        default_final_time=1.5,
        default_gamma=5.0 / 3.0,
    )
)
