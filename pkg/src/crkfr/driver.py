"""Time loop, step-size control, error measurement and convergence studies."""

import json
import time as _time
from dataclasses import dataclass, field as dc_field
from importlib import resources

import numpy as np

from crkfr import basis as basis_mod
from crkfr import boundary, limiters, problems, solver1d, solver2d
from crkfr.config import ConfigError, RunConfig
from crkfr.core1d import StageFailureError
from crkfr.field import SolutionField, project_initial
from crkfr.limiters import InadmissibleMeanError
from crkfr.loworder1d import FluxLimiterError
from crkfr.mesh import Mesh1D, Mesh2D
from crkfr.tableau import ButcherTableau  # noqa: F401  (re-exported for callers)


class AdmissibilityError(RuntimeError):
    """The run left the admissible set; aborted rather than propagated."""


_ABORT_ERRORS = (StageFailureError, FluxLimiterError, InadmissibleMeanError)


@dataclass
class CflTable:
    """Linear-stability CFL numbers per point kind, dissipation model, degree.

    The committed values come from the in-repo von Neumann scan
    (scripts/cfl_scan.py); they are positive and decrease with the degree.
    """

    values: dict

    @classmethod
    def load(cls):
        with resources.files("crkfr.data").joinpath("cfl_table.json").open("rb") as fh:
            return cls(json.load(fh))

    def cfl(self, points, model, degree):
        try:
            seq = self.values[points][model]
            value = seq[degree]
        except (KeyError, IndexError):
            value = None
        if value is None:
            raise ConfigError(
                f"no stable tabulated CFL for points={points} model={model} degree={degree}; "
                f"set an explicit cfl in the config"
            )
        return float(value)


_CFL_TABLE = None


def cfl_number(cfg):
    """Stability CFL for the configured scheme; explicit cfg.cfl wins."""
    if cfg.cfl > 0.0:
        return cfg.cfl
    global _CFL_TABLE
    if _CFL_TABLE is None:
        _CFL_TABLE = CflTable.load()
    return _CFL_TABLE.cfl(cfg.points, cfg.dissipation, cfg.degree)


def _speeds_1d(u, ws, sampling):
    eq, w = ws.equation, ws.basis.weights
    if sampling == "nodal_max":
        return eq.max_abs_speed_x(u, x=ws.x_nodes).max(axis=1)
    mean = limiters.element_means(u, w)
    nodes = np.broadcast_to(mean[:, None, :], u.shape)
    return eq.max_abs_speed_x(nodes, x=ws.x_nodes).max(axis=1)


def compute_dt(u, ws, cfg, t=0.0):
    """CFL step size from element-mean wave speeds (nodal max optional)."""
    cfl = cfl_number(cfg)
    if ws.mesh.__class__ is Mesh1D:
        sx = _speeds_1d(u, ws, cfg.speed_sampling)
        rate = sx * ws.inv_dx
        if cfg.dt_include_ghost:
            rate = np.concatenate([rate, _ghost_rates_1d(ws, t)])
    else:
        sx, sy = solver2d.directional_speeds(u, ws, cfg.speed_sampling)
        rate = sx / ws.mesh.dx + sy / ws.mesh.dy
        if cfg.dt_include_ghost:
            rate = np.concatenate([rate.ravel(), solver2d.ghost_rates_2d(ws, t)])
    if not np.isfinite(rate).all():
        raise AdmissibilityError("non-finite wave speeds in time-step computation")
    dt = cfg.cfl_safety * cfl / rate.max()
    if not np.isfinite(dt) or dt <= 0.0:
        raise AdmissibilityError("time-step computation degenerated")
    return dt


def _ghost_rates_1d(ws, t):
    rates = []
    for side, bc in (("left", ws.bspec.left), ("right", ws.bspec.right)):
        if bc.kind in (boundary.INFLOW, boundary.MIXED_HLLC):
            x = ws.faces[0] if side == "left" else ws.faces[-1]
            g = np.asarray(bc.inflow(np.asarray([x]), t), dtype=float)
            s = ws.equation.max_abs_speed_x(g, x=np.asarray([x]))[0]
            dx = ws.dx[0] if side == "left" else ws.dx[-1]
            rates.append(s / dx)
    return np.asarray(rates) if rates else np.empty(0)


@dataclass
class RunReport:
    config: dict
    final_time: float
    steps: int
    errors: dict                    # norm -> per-variable list, or {}
    diagnostics: dict
    timings: dict
    field: SolutionField
    snapshots: list = dc_field(default_factory=list)
    log: list = dc_field(default_factory=list)

    def to_json(self, include_timings=False):
        """Deterministic serialization; wall-clock timings are opt-in."""
        payload = {
            "config": self.config,
            "final_time": self.final_time,
            "steps": self.steps,
            "errors": self.errors,
            "diagnostics": self.diagnostics,
        }
        if include_timings:
            payload["timings"] = self.timings
        return json.dumps(payload, indent=2, sort_keys=True)


def setup(cfg):
    """Build (problem, workspace, initial field) for a configuration."""
    prob = problems.get(cfg.problem)
    eq = prob.equation(cfg)
    if len(cfg.mesh) != prob.dim:
        raise ConfigError(
            f"problem {prob.name} is {prob.dim}-D but mesh has {len(cfg.mesh)} extents"
        )
    nodal_basis = basis_mod.build_basis(cfg.degree, cfg.points)
    exact = prob.exact(eq) if prob.exact is not None else None
    bspec = prob.boundaries(eq, exact)
    if prob.dim == 1:
        mesh = Mesh1D(prob.domain[0], prob.domain[1], cfg.mesh[0])
        ws = solver1d.Workspace1D(eq, nodal_basis, cfg.tab, bspec, mesh)
    else:
        if cfg.boundary_treatment == boundary.GHOST_ELEMENT_TREATMENT:
            raise ConfigError("the ghost-element boundary treatment is one-dimensional")
        mesh = Mesh2D(*prob.domain, cfg.mesh[0], cfg.mesh[1])
        ws = solver2d.Workspace2D(eq, nodal_basis, cfg.tab, bspec, mesh)
    values = project_initial(prob.initial(eq, mesh), mesh, nodal_basis, prob.dim)
    fld = SolutionField(values, 0.0, mesh, nodal_basis, eq.name, eq.variable_names)
    return prob, ws, fld, exact


def _check_state(u, ws, step):
    if not np.isfinite(u).all():
        where = np.argwhere(~np.isfinite(u))[:1]
        raise AdmissibilityError(f"non-finite state after step {step} at index {where.tolist()}")
    eq = ws.equation
    if eq.n_constraints:
        means = limiters.element_means(u, ws.basis.weights)
        ok = eq.admissible(means)
        if not ok.all():
            bad = np.argwhere(~ok)[:5]
            raise AdmissibilityError(
                f"inadmissible element means after step {step} at {bad.tolist()}"
            )


def run(cfg):
    """Execute a configuration to its final time and report.

    The step sequence and all reductions are deterministic for a fixed
    configuration; wall-clock timings live outside the deterministic report
    payload.
    """
    prob, ws, fld, exact = setup(cfg)
    final_time = cfg.final_time if cfg.final_time is not None else prob.default_final_time
    step_fn = solver1d.step_1d if prob.dim == 1 else solver2d.step_2d

    diagnostics = {}
    timings = {"dt": 0.0, "step": 0.0, "total": 0.0}
    log = []
    snapshots = []
    next_output = cfg.output_cadence if cfg.output_cadence > 0.0 else np.inf

    u = fld.values
    t = 0.0
    steps = 0
    t_start = _time.perf_counter()
    try:
        while t < final_time - 1e-14 * max(1.0, final_time):
            t0 = _time.perf_counter()
            dt = compute_dt(u, ws, cfg, t)
            clip = min(final_time, next_output)
            if t + dt >= clip - 1e-14 * max(1.0, clip):
                dt = clip - t
            timings["dt"] += _time.perf_counter() - t0

            t1 = _time.perf_counter()
            u = step_fn(u, t, dt, ws, cfg, diagnostics)
            timings["step"] += _time.perf_counter() - t1

            t += dt
            steps += 1
            _check_state(u, ws, steps)
            if t >= next_output - 1e-14 * max(1.0, next_output):
                snapshots.append(
                    SolutionField(u.copy(), t, ws.mesh, ws.basis, ws.equation.name,
                                  ws.equation.variable_names)
                )
                next_output += cfg.output_cadence
            if steps % 200 == 0:
                log.append(f"step {steps}: t = {t:.6e}, dt = {dt:.3e}")
    except _ABORT_ERRORS as exc:
        raise AdmissibilityError(f"aborted at step {steps + 1}, t = {t:.6e}: {exc}") from exc
    timings["total"] = _time.perf_counter() - t_start

    fld = SolutionField(u, t, ws.mesh, ws.basis, ws.equation.name, ws.equation.variable_names)
    errors = error_norms(fld, exact) if exact is not None else {}
    log.append(f"finished: {steps} steps to t = {t:.6e}")
    return RunReport(
        config=cfg.as_dict(),
        final_time=t,
        steps=steps,
        errors=errors,
        diagnostics=diagnostics,
        timings=timings,
        field=fld,
        snapshots=snapshots,
        log=log,
    )


def error_norms(fld, exact, n_oversample=None):
    """L1/L2/Linf distance to the exact solution on an oversampled grid.

    Sampling uses N+3 equispaced cell-interior points per direction per
    element with equal weights.
    """
    nodal_basis = fld.basis
    n = nodal_basis.degree
    k = n_oversample if n_oversample is not None else n + 3
    xi = (np.arange(k) + 0.5) / k
    sample = basis_mod.lagrange_matrix(nodal_basis, xi)

    if fld.dim == 1:
        mesh = fld.mesh
        xs = mesh.faces[:-1][:, None] + xi[None, :] * mesh.dx
        uh = np.einsum("jp,epm->ejm", sample, fld.values)
        ue = np.asarray(exact(xs, fld.time), dtype=float)
        diff = np.abs(uh - ue)
        cell_w = mesh.dx / k
        l1 = diff.sum(axis=(0, 1)) * cell_w
        l2 = np.sqrt((diff**2).sum(axis=(0, 1)) * cell_w)
        linf = diff.max(axis=(0, 1))
    else:
        mesh = fld.mesh
        xs = mesh.xfaces[:-1][:, None] + xi[None, :] * mesh.dx
        ys = mesh.yfaces[:-1][:, None] + xi[None, :] * mesh.dy
        uh = np.einsum("ip,jq,xypqm->xyijm", sample, sample, fld.values)
        xb = xs[:, None, :, None]
        yb = ys[None, :, None, :]
        shape = (mesh.nx, mesh.ny, k, k)
        ue = np.asarray(
            exact(np.broadcast_to(xb, shape), np.broadcast_to(yb, shape), fld.time), dtype=float
        )
        diff = np.abs(uh - ue)
        cell_w = mesh.dx * mesh.dy / (k * k)
        l1 = diff.sum(axis=(0, 1, 2, 3)) * cell_w
        l2 = np.sqrt((diff**2).sum(axis=(0, 1, 2, 3)) * cell_w)
        linf = diff.max(axis=(0, 1, 2, 3))
    return {
        "l1": l1.tolist(),
        "l2": l2.tolist(),
        "linf": linf.tolist(),
    }


def convergence_study(cfg, mesh_list, variable=0):
    """Run a refinement sequence and tabulate errors with observed orders."""
    rows = []
    prev = None
    for extent in mesh_list:
        mesh = (extent,) * len(cfg.mesh)
        report = run(cfg.replace(mesh=mesh))
        if not report.errors:
            raise ConfigError(f"problem {cfg.problem} has no exact solution for a convergence study")
        dim = len(mesh)
        dofs = (extent * (cfg.degree + 1)) ** dim
        row = {
            "degree": cfg.degree,
            "mesh": extent,
            "dofs": dofs,
            "l1": report.errors["l1"][variable],
            "l2": report.errors["l2"][variable],
            "linf": report.errors["linf"][variable],
        }
        for norm in ("l1", "l2", "linf"):
            if prev is None or prev[norm] == 0.0 or row[norm] == 0.0:
                row[f"order_{norm}"] = float("nan")
            else:
                row[f"order_{norm}"] = float(np.log2(prev[norm] / row[norm]))
        rows.append(row)
        prev = row
    return rows


def eoc_table_text(rows):
    """Serialize convergence rows as comma-separated text."""
    cols = ["degree", "mesh", "dofs", "l1", "order_l1", "l2", "order_l2", "linf", "order_linf"]
    lines = [",".join(cols)]
    for row in rows:
        out = []
        for col in cols:
            val = row[col]
            out.append(f"{val:.17g}" if isinstance(val, float) else str(val))
        lines.append(",".join(out))
    return "\n".join(lines) + "\n"
