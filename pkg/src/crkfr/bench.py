"""Benchmark harness: phase timings per step and communication counters.

Timings are reported, never asserted.  The trace-volume counters are exact
integers derived from the dissipation model: they count the values one
element side must hand across a face per step so the models' communication
footprints can be compared.
"""

import time
from dataclasses import dataclass

import numpy as np

from crkfr import boundary, core1d, driver, limiters, loworder1d, solver1d, solver2d
from crkfr.kernels import get_backend


def trace_payload_per_face(model, n_vars, n_stages):
    """Values crossing a face per step, per side, split by payload kind.

    D1 hands over the time-averaged flux trace; D2 adds the time-averaged
    solution trace (twice D1's time-average payload); DCSX hands over every
    stage-solution trace, from which the receiving side can form both the
    central flux and the stagewise jumps, so its whole volume is
    stages * n_vars.  D1/D2 additionally need the current solution trace
    for the wave-speed estimate, counted separately.
    """
    if model == core1d.D1:
        return {"time_avg": n_vars, "solution": n_vars, "stage": 0}
    if model == core1d.D2:
        return {"time_avg": 2 * n_vars, "solution": n_vars, "stage": 0}
    if model == core1d.DCSX:
        return {"time_avg": 0, "solution": 0, "stage": n_stages * n_vars}
    raise ValueError(f"unknown dissipation model {model!r}")


@dataclass
class PhaseTimer:
    clock: object = time.perf_counter

    def __post_init__(self):
        self.samples = {}

    def measure(self, name, fn, *args, **kwargs):
        t0 = self.clock()
        out = fn(*args, **kwargs)
        self.samples.setdefault(name, []).append(self.clock() - t0)
        return out


def _instrumented_step_1d(u, t, dt, ws, cfg, timer):
    eq, basis, w = ws.equation, ws.basis, ws.basis.weights
    blending = cfg.blending
    diag = {}

    if blending != limiters.NO_BLENDING:
        alpha, alpha_face = timer.measure(
            "indicator", limiters.smoothness_alpha_1d, u, eq, basis, cfg.indicator,
            ws.bspec.periodic,
        )
    tavg = timer.measure(
        "stages", core1d.crk_stages, u, eq, basis, ws.tab, dt, ws.x_nodes, ws.inv_dx, t
    )
    face_flux, face, traces = timer.measure(
        "traces_flux", solver1d.high_order_face_flux, u, tavg, ws, cfg, t, dt
    )
    if blending == limiters.NO_BLENDING:
        out = timer.measure("update", core1d.fr_update, u, tavg, face_flux, traces, basis, ws.inv_dx, dt)
    else:
        def low_order():
            ghosts = boundary.ghost_nodes_1d(u, ws.x_nodes, ws.faces, ws.bspec, eq, t)
            return loworder1d.low_order_fluxes(u, ws.x_nodes, ws.faces, w, eq, dt, blending, ghosts, diag)

        lo = timer.measure("low_order", low_order)

        def limit():
            bad = ~np.isfinite(face_flux).all(axis=-1)
            if bad.any():
                face_flux[bad] = lo.face[bad]
            flux = limiters.blend_interface_flux(face_flux, lo.face, alpha_face)
            if cfg.flux_limiter:
                flux, _ = loworder1d.flux_limit_1d(u, flux, lo, dt, w, ws.dx, eq, diagnostics=diag)
            return flux

        flux = timer.measure("limit", limit)

        def update():
            u_high = core1d.fr_update(u, tavg, flux, traces, basis, ws.inv_dx, dt)
            u_low = loworder1d.low_order_update(u, lo, flux, dt, w, ws.dx, tavg.source)
            return limiters.blend(u_high, u_low, alpha)

        out = timer.measure("update", update)
    if cfg.scaling_limiter and eq.n_constraints:
        out = timer.measure("scaling", limiters.scaling_limit, out, eq, w)
    return out


def bench_step(cfg, repetitions=20, warmup=3, backend=None):
    """Time one step phase by phase; returns the report dict.

    Warm-up runs never count.  Counters are exact and independent of timing
    noise; with two face families in 2-D the per-face payloads are identical
    per family.
    """
    if warmup < 3:
        raise ValueError("benchmark needs at least 3 warm-up iterations")
    from crkfr import kernels

    backend_name, _ = get_backend(backend)
    prob, ws, fld, exact = driver.setup(cfg)
    u = fld.values
    dt = driver.compute_dt(u, ws, cfg, 0.0)
    timer = PhaseTimer()

    if prob.dim == 1:
        step = lambda: _instrumented_step_1d(u, 0.0, dt, ws, cfg, timer)
        n_faces = cfg.mesh[0] + 1
    else:
        step = lambda: solver2d.step_2d(u, 0.0, dt, ws, cfg, {})
        n_faces = (cfg.mesh[0] + 1) * cfg.mesh[1] + (cfg.mesh[1] + 1) * cfg.mesh[0]

    with kernels.use_backend(backend_name):
        for _ in range(warmup):
            step()
        timer.samples.clear()
        totals = []
        for _ in range(repetitions):
            t0 = time.perf_counter()
            step()
            totals.append(time.perf_counter() - t0)
        timer.samples["total"] = totals

    phases = {}
    for name, vals in timer.samples.items():
        arr = np.sort(np.asarray(vals))
        phases[name] = {
            "median": float(np.median(arr)),
            "p10": float(arr[max(0, int(0.1 * len(arr)) - 1)] if len(arr) > 1 else arr[0]),
            "p90": float(arr[min(len(arr) - 1, int(np.ceil(0.9 * len(arr))) - 1)]),
        }

    payload = trace_payload_per_face(cfg.dissipation, ws.equation.n_vars, ws.tab.stages)
    counters = {
        "faces": n_faces,
        "per_face_per_side": payload,
        "per_step_time_avg": payload["time_avg"] * n_faces * 2,
        "per_step_solution": payload["solution"] * n_faces * 2,
        "per_step_stage": payload["stage"] * n_faces * 2,
    }
    return {
        "backend": backend_name,
        "config": cfg.as_dict(),
        "phases": phases,
        "counters": counters,
    }


def bench_report_text(report):
    """Delimiter-separated benchmark report."""
    lines = ["section,key,value"]
    lines.append(f"meta,backend,{report['backend']}")
    for name in sorted(report["phases"]):
        stats = report["phases"][name]
        for stat in ("median", "p10", "p90"):
            lines.append(f"phase_{stat},{name},{stats[stat]:.9f}")
    for key, value in report["counters"].items():
        if isinstance(value, dict):
            for sub, v in value.items():
                lines.append(f"counter,{key}.{sub},{v}")
        else:
            lines.append(f"counter,{key},{value}")
    return "\n".join(lines) + "\n"


def compare_backends(cfg, repetitions=20):
    """Run the same step benchmark on the compiled and python kernels."""
    out = {}
    for name in ("python", "ext"):
        try:
            out[name] = bench_step(cfg, repetitions=repetitions, backend=name)
        except ImportError:
            out[name] = None
    return out
