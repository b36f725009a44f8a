"""Acceptance gate: one test per shipped criterion, at pinned tolerances.

Each test prints one PASS/FAIL line (run with ``pytest -s`` to stream them)
and appends it to artifacts/acceptance/summary.txt.  Field dumps and EOC
tables produced here feed the plotting front end.
"""

import math
import pathlib

import numpy as np
import pytest

from crkfr import bench, boundary, core1d, driver, fieldio, limiters, loworder1d, solver1d, tableau
from crkfr.basis import build_basis
from crkfr.config import RunConfig
from crkfr.equations import Euler1D, Euler2D, LinearAdvection, TenMoment

ARTIFACTS = pathlib.Path(__file__).resolve().parents[1] / "artifacts" / "acceptance"
ARTIFACTS.mkdir(parents=True, exist_ok=True)


def record(criterion, ok, detail):
    line = f"ACCEPTANCE {criterion}: {'PASS' if ok else 'FAIL'} - {detail}"
    print(line, flush=True)
    with open(ARTIFACTS / "summary.txt", "a") as fh:
        fh.write(line + "\n")
    assert ok, line


def last_order(errs):
    return math.log2(errs[-2] / errs[-1])


def test_criterion_01_linear_advection_eoc():
    rows_for_plot = []
    results = []
    for kind in ("gl", "gll"):
        for degree in (1, 2, 3):
            cfg = RunConfig("linadv_sine", degree, (32,), points=kind, final_time=2.0)
            rows = driver.convergence_study(cfg, [32, 64, 128, 256])
            order = rows[-1]["order_l2"]
            results.append((kind, degree, order))
            if kind == "gl":
                rows_for_plot.extend(rows)
    (ARTIFACTS / "linadv_eoc.csv").write_text(driver.eoc_table_text(rows_for_plot))
    ok = all(order >= deg + 0.8 for _, deg, order in results)
    detail = "; ".join(f"{k} N={d}: {o:.2f}" for k, d, o in results) + " (bar N+0.8)"
    record(1, ok, detail)


def test_criterion_02_burgers_ea_vs_ae():
    orders = {}
    for trace in ("ea", "ae"):
        errs = [
            driver.run(RunConfig("burgers_sine", 3, (m,), trace=trace, final_time=2.0)).errors["l2"][0]
            for m in (32, 64, 128, 256)
        ]
        orders[trace] = last_order(errs)
    gll = {
        trace: driver.run(
            RunConfig("burgers_sine", 3, (64,), points="gll", trace=trace, final_time=2.0)
        ).errors["l2"][0]
        for trace in ("ea", "ae")
    }
    gll_gap = abs(gll["ea"] - gll["ae"])
    ok = orders["ea"] >= 3.8 and orders["ae"] <= 3.7 and gll_gap <= 1e-12
    record(
        2,
        ok,
        f"EOC(EA)={orders['ea']:.2f} (>=3.8), EOC(AE)={orders['ae']:.2f} (<=3.7), "
        f"GLL |EA-AE| error gap={gll_gap:.1e} (<=1e-12)",
    )


def test_criterion_03_variable_advection():
    orders = {}
    finest = {}
    for degree in (1, 2, 3):
        errs = [
            driver.run(RunConfig("varadv_x2", degree, (m,), trace="ea")).errors["l2"][0]
            for m in (32, 64, 128, 256)
        ]
        orders[degree] = last_order(errs)
        finest[("ea", degree)] = errs[-1]
    for degree in (1, 3):
        finest[("ae", degree)] = driver.run(
            RunConfig("varadv_x2", degree, (256,), trace="ae")
        ).errors["l2"][0]
    ok = all(orders[d] >= d + 0.8 for d in (1, 2, 3))
    ok &= all(finest[("ae", d)] > finest[("ea", d)] for d in (1, 3))
    record(
        3,
        ok,
        "EA EOC "
        + ", ".join(f"N={d}: {orders[d]:.2f}" for d in (1, 2, 3))
        + "; AE/EA finest-error ratios "
        + ", ".join(f"N={d}: {finest[('ae', d)] / finest[('ea', d)]:.1f}x" for d in (1, 3)),
    )


def test_criterion_04_linear_time_average_closed_form():
    rng = np.random.default_rng(2024)
    worst = 0.0
    for degree in (1, 2, 3):
        b = build_basis(degree, "gl")
        tab = tableau.default_for_degree(degree)
        a, dx, dt = 1.3, 0.2, 0.03
        eq = LinearAdvection(a)
        dmat = b.diff_matrix / dx
        for _ in range(200):
            u = rng.normal(size=(4, degree + 1, 1))
            x = np.arange(4)[:, None] * dx + b.points[None, :] * dx
            tavg = core1d.crk_stages(u, eq, b, tab, dt, x, np.full(4, 1.0 / dx))
            acc = np.zeros_like(u)
            term = u.copy()
            fact = 1.0
            for m in range(degree + 1):
                fact *= m + 1
                acc += (-a * dt) ** m / fact * term
                term = np.einsum("pq,eqm->epm", dmat, term)
            closed = a * acc
            worst = max(worst, np.abs(tavg.flux - closed).max() / np.abs(closed).max())
    record(4, worst <= 1e-12, f"max relative deviation {worst:.2e} over 600 random fields (<=1e-12)")


def test_criterion_05_d2_equals_dcsx():
    rng = np.random.default_rng(7)
    from crkfr.mesh import Mesh1D

    eq = LinearAdvection(1.0)
    b = build_basis(2, "gl")
    tab = tableau.CRK33
    mesh = Mesh1D(0.0, 1.0, 12)
    u = rng.normal(size=(12, 3, 1))
    outs = {}
    for model in ("d2", "dcsx"):
        cfg = RunConfig("linadv_sine", 2, (12,), dissipation=model)
        ws = solver1d.Workspace1D(eq, b, tab, boundary.periodic_1d(), mesh)
        outs[model] = solver1d.step_1d(u, 0.0, 2e-3, ws, cfg)
    step_gap = np.abs(outs["d2"] - outs["dcsx"]).max()

    errs = {
        model: driver.run(
            RunConfig("burgers_sine", 2, (128,), dissipation=model, final_time=2.0)
        ).errors["l2"][0]
        for model in ("d2", "dcsx")
    }
    rel_gap = abs(errs["d2"] - errs["dcsx"]) / max(errs.values())
    ok = step_gap <= 1e-12 and rel_gap <= 0.05
    record(
        5,
        ok,
        f"linear one-step gap {step_gap:.2e} (<=1e-12); Burgers L2 gap {100 * rel_gap:.2f}% (<=5%)",
    )


def test_criterion_06_conservation_and_mean_identities():
    rng = np.random.default_rng(11)
    eq = Euler1D()
    degree, n_el = 3, 8
    b = build_basis(degree, "gl")
    tab = tableau.default_for_degree(degree)
    faces = np.linspace(0.0, 1.0, n_el + 1)
    dx = np.diff(faces)
    x = faces[:-1][:, None] + b.points[None, :] * dx[:, None]
    u = eq.prim_to_cons(
        rng.uniform(0.5, 2, (n_el, degree + 1)),
        rng.uniform(-0.5, 0.5, (n_el, degree + 1)),
        rng.uniform(0.5, 2, (n_el, degree + 1)),
    )
    dt = 1e-3
    tavg = core1d.crk_stages(u, eq, b, tab, dt, x, 1.0 / dx)
    traces = core1d.element_traces(u, tavg, b, tab, eq, faces, "ea", "d2")
    face_flux = rng.normal(size=(n_el + 1, 3))
    u_high = core1d.fr_update(u, tavg, face_flux, traces, b, 1.0 / dx, dt)
    ghosts = boundary.ghost_nodes_1d(u, x, faces, boundary.periodic_1d(), eq, 0.0)
    lo = loworder1d.low_order_fluxes(u, x, faces, b.weights, eq, dt, "mh", ghosts)
    u_low = loworder1d.low_order_update(u, lo, face_flux, dt, b.weights, dx)
    alpha = rng.uniform(0, 1, n_el)
    blended = limiters.blend(u_high, u_low, alpha)

    w = b.weights
    expect = limiters.element_means(u, w) - dt / dx[:, None] * (face_flux[1:] - face_flux[:-1])
    gap_h = np.abs(limiters.element_means(u_high, w) - expect).max()
    gap_b = np.abs(limiters.element_means(blended, w) - expect).max()

    cfg = RunConfig("linadv_sine", 2, (20,), final_time=10.0)
    prob, ws, fld, exact = driver.setup(cfg)
    uu = fld.values + 2.0
    total0 = (limiters.element_means(uu, ws.basis.weights) * ws.dx[:, None]).sum()
    t = 0.0
    for _ in range(100):
        step_dt = driver.compute_dt(uu, ws, cfg, t)
        uu = solver1d.step_1d(uu, t, step_dt, ws, cfg)
        t += step_dt
    drift = abs(
        (limiters.element_means(uu, ws.basis.weights) * ws.dx[:, None]).sum() - total0
    ) / abs(total0)
    ok = gap_h <= 1e-13 and gap_b <= 1e-13 and drift <= 1e-12
    record(
        6,
        ok,
        f"high-order mean identity {gap_h:.1e}, blended {gap_b:.1e} (<=1e-13); "
        f"100-step mass drift {drift:.1e} (<=1e-12)",
    )


def test_criterion_07_sedov_admissibility():
    cfg = RunConfig("sedov1d", 3, (201,), blending="mh", final_time=0.001)
    rep = driver.run(cfg)
    eq = Euler1D()
    cons = eq.constraints(rep.field.values)
    completed = bool((cons >= 1e-13).all())

    aborted = False
    try:
        driver.run(cfg.replace(flux_limiter=False, scaling_limiter=False))
    except driver.AdmissibilityError:
        aborted = True
    ok = completed and aborted
    record(
        7,
        ok,
        f"with limiters: min rho {cons[..., 0].min():.2e}, min p {cons[..., 1].min():.2e} "
        f"(>=1e-13); without the admissibility machinery: aborted={aborted}",
    )


def test_criterion_08_blast_and_titarev():
    eq = Euler1D()
    results = {}
    for name, mesh, t_final in (("blast", 400, 0.038), ("titarev_toro", 800, 5.0)):
        cfg = RunConfig(name, 3, (mesh,), blending="mh", final_time=t_final)
        rep = driver.run(cfg)
        u = rep.field.values
        p = eq.pressure(u)
        results[name] = (np.isfinite(u).all(), p.min())
        fieldio.write_field(rep.field, ARTIFACTS / f"{name}_density.txt")
    ref_dir = pathlib.Path(__file__).resolve().parents[1] / "references"
    refs_present = (ref_dir / "blast_density.txt").exists() and (
        ref_dir / "titarev_toro_density.txt"
    ).exists()
    ok = all(finite and pmin > 0 for finite, pmin in results.values()) and refs_present
    record(
        8,
        ok,
        "; ".join(f"{k}: finite={v[0]}, min p={v[1]:.3e}" for k, v in results.items())
        + f"; fine-mesh references checked in: {refs_present}",
    )


@pytest.mark.parametrize("degree", [2, 3])
def test_criterion_09_vortex_eoc(degree):
    errs = []
    for m in (16, 32, 64):
        cfg = RunConfig(
            "isentropic_vortex", degree, (m, m), final_time=1.0,
            blending="none", scaling_limiter=False,
        )
        rep = driver.run(cfg)
        errs.append(rep.errors["l2"][0])
        if m == 64:
            fieldio.write_field(rep.field, ARTIFACTS / f"vortex_n{degree}_64.txt")
    order = last_order(errs)
    record(
        9,
        order >= degree + 0.8,
        f"N={degree} vortex EOC 32->64 = {order:.2f} (bar {degree + 0.8}); "
        f"errors {', '.join(f'{e:.2e}' for e in errs)}",
    )


def test_criterion_09_vortex_limiter_inactive():
    gaps = {}
    for degree in (2, 3):
        on = driver.run(
            RunConfig("isentropic_vortex", degree, (64, 64), final_time=1.0, blending="mh")
        ).errors["l2"][0]
        off = driver.run(
            RunConfig(
                "isentropic_vortex", degree, (64, 64), final_time=1.0,
                blending="none", scaling_limiter=False,
            )
        ).errors["l2"][0]
        gaps[degree] = abs(on - off)
    ok = all(gap <= 1e-12 for gap in gaps.values())
    record(
        9,
        ok,
        "limiter-on vs off error gaps: "
        + ", ".join(f"N={d}: {g:.1e}" for d, g in gaps.items())
        + " (<=1e-12)",
    )


def test_criterion_10_riemann2d():
    cfg = RunConfig("riemann2d_12", 3, (64, 64), blending="mh", final_time=0.25)
    rep = driver.run(cfg)
    eq = Euler2D()
    admissible = bool(eq.admissible(rep.field.values).all())
    record(
        10,
        admissible,
        f"64x64 N=3 completed {rep.steps} steps; all nodal states admissible={admissible}",
    )


def test_criterion_11_tenmoment_two_rarefaction():
    eq = TenMoment()
    mins = {}
    for prob in ("tenmom_two_rarefaction", "tenmom_two_rarefaction_nosource"):
        cfg = RunConfig(prob, 3, (500,), blending="mh", final_time=0.1)
        rep = driver.run(cfg)
        cons = eq.constraints(rep.field.values)
        mins[prob] = (rep.field.values[..., 0].min(), bool((cons >= 1e-13).all()))
    with_src, without = mins["tenmom_two_rarefaction"], mins["tenmom_two_rarefaction_nosource"]
    ok = with_src[1] and without[1] and with_src[0] < without[0]
    record(
        11,
        ok,
        f"min rho with source {with_src[0]:.3e} < without {without[0]:.3e}; "
        f"both admissible: {with_src[1] and without[1]}",
    )


def test_criterion_12_sedov2d_periodic():
    cfg = RunConfig("sedov2d_periodic", 3, (32, 32), blending="mh", final_time=2.0)
    rep = driver.run(cfg)
    eq = Euler2D()
    admissible = bool(eq.admissible(rep.field.values).all())
    fieldio.write_field(rep.field, ARTIFACTS / "sedov2d_density.txt")
    record(
        12,
        admissible,
        f"32x32 N=3 to t=2: {rep.steps} steps, admissible={admissible}; "
        f"dump for log-scale rendering emitted",
    )


def test_criterion_13_boundary_cross_validation():
    cfg = RunConfig("linadv_sine", 2, (24,), final_time=0.5)
    direct = driver.run(cfg).field.values
    ghost = driver.run(cfg.replace(boundary_treatment="ghost_element")).field.values
    gap = np.abs(direct - ghost).max()

    errs = [
        driver.run(
            RunConfig("varadv_x2", 2, (m,), boundary_treatment="ghost_element")
        ).errors["l2"][0]
        for m in (32, 64, 128)
    ]
    order = last_order(errs)
    ok = gap <= 1e-10 and order >= 2.8
    record(
        13,
        ok,
        f"periodic direct-vs-ghost gap {gap:.1e} (<=1e-10); "
        f"ghost-element inflow EOC {order:.2f} (>=2.8)",
    )


def test_criterion_14_communication_counters():
    checks = []
    for model, n_vars, stages, expect in (
        ("dcsx", 3, 3, 9),
        ("dcsx", 4, 4, 16),
        ("d1", 3, 3, 3),
        ("d2", 3, 3, 6),
    ):
        payload = bench.trace_payload_per_face(model, n_vars, stages)
        checks.append(payload["time_avg"] + payload["stage"] == expect)
    d1 = bench.trace_payload_per_face("d1", 5, 4)
    d2 = bench.trace_payload_per_face("d2", 5, 4)
    checks.append(d2["time_avg"] == 2 * d1["time_avg"])
    report = bench.bench_step(RunConfig("burgers_sine", 2, (16,), dissipation="dcsx"), repetitions=3)
    checks.append(report["counters"]["per_face_per_side"]["stage"] == 3)
    ok = all(checks)
    record(14, ok, f"exact integer payload identities hold: {checks}")
