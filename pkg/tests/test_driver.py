import json
import math

import numpy as np
import pytest

from crkfr import driver
from crkfr.config import ConfigError, RunConfig


def test_compute_dt_worked_example():
    # 1-D advection a=2, dx=0.01, CFL(N)=0.2, safety 0.98 -> 9.8e-4
    cfg = RunConfig("linadv_sine", 1, (100,), cfl=0.2, cfl_safety=0.98)
    prob, ws, fld, exact = driver.setup(cfg)
    ws.equation.speed = 2.0
    dt = driver.compute_dt(fld.values, ws, cfg)
    assert dt == pytest.approx(9.8e-4, rel=1e-12)


def test_dt_scales_with_mesh_width():
    cfg = RunConfig("linadv_sine", 2, (32,), cfl=0.2)
    prob, ws, fld, exact = driver.setup(cfg)
    dt_coarse = driver.compute_dt(fld.values, ws, cfg)
    cfg2 = cfg.replace(mesh=(64,))
    prob, ws2, fld2, exact = driver.setup(cfg2)
    dt_fine = driver.compute_dt(fld2.values, ws2, cfg2)
    assert dt_coarse >= 2.0 * dt_fine - 1e-15


def test_cfl_table_positive_monotone():
    table = driver.CflTable.load()
    for kind in ("gl", "gll"):
        for model in ("d1", "d2", "dcsx"):
            vals = [v for v in table.values[kind][model] if v is not None]
            assert all(v > 0 for v in vals)
            assert all(a >= b for a, b in zip(vals, vals[1:]))
    # D1 runs at strictly smaller steps than D2
    for n in (1, 2, 3):
        assert table.cfl("gl", "d1", n) < table.cfl("gl", "d2", n)


def test_missing_cfl_entry_is_config_error():
    with pytest.raises(ConfigError, match="cfl"):
        driver.cfl_number(RunConfig("linadv_sine", 5, (8,)))


def test_zero_final_time_returns_projection():
    cfg = RunConfig("linadv_sine", 3, (12,), cfl=0.1, final_time=0.0)
    rep = driver.run(cfg)
    assert rep.steps == 0
    prob, ws, fld, exact = driver.setup(cfg)
    assert (rep.field.values == fld.values).all()
    assert rep.errors["l2"][0] < 1e-4  # projection error only


def test_projection_of_exact_data_is_machine_epsilon():
    # degenerate convergence case: zero steps against the exact projection
    cfg = RunConfig("linadv_sine", 3, (16,), cfl=0.1, final_time=0.0)
    prob, ws, fld, exact = driver.setup(cfg)
    err = driver.error_norms(fld, lambda x, t: np.sin(2 * np.pi * x)[..., None])
    # the sampled integrand is the interpolation error of degree-3 data
    assert err["linf"][0] < 1e-3
    exact_nodal = np.sin(2 * np.pi * ws.x_nodes)[..., None]
    assert np.abs(fld.values - exact_nodal).max() < 1e-15


def test_linear_advection_order_exceeds_bar():
    errs = []
    for m in (32, 64):
        rep = driver.run(RunConfig("linadv_sine", 2, (m,), cfl=0.15))
        errs.append(rep.errors["l2"][0])
    assert math.log2(errs[0] / errs[1]) >= 2.8


def test_run_determinism_bit_identical():
    cfg = RunConfig("burgers_sine", 2, (24,), cfl=0.12, final_time=0.5, blending="mh")
    rep1 = driver.run(cfg)
    rep2 = driver.run(cfg)
    assert rep1.to_json() == rep2.to_json()
    assert (rep1.field.values == rep2.field.values).all()


def test_report_json_excludes_timings_by_default():
    cfg = RunConfig("linadv_sine", 1, (8,), cfl=0.2, final_time=0.1)
    rep = driver.run(cfg)
    payload = json.loads(rep.to_json())
    assert "timings" not in payload
    assert "timings" in json.loads(rep.to_json(include_timings=True))
    assert rep.timings["total"] > 0.0


def test_convergence_study_table():
    cfg = RunConfig("linadv_sine", 2, (32,), cfl=0.15)
    rows = driver.convergence_study(cfg, [32, 64, 128])
    assert len(rows) == 3
    assert rows[-1]["order_l2"] >= 2.8
    text = driver.eoc_table_text(rows)
    assert text.splitlines()[0].startswith("degree,mesh,dofs")
    assert len(text.splitlines()) == 4


def test_admissibility_abort_carries_context():
    cfg = RunConfig(
        "sedov1d", 3, (201,), cfl=0.1, blending="mh",
        flux_limiter=False, scaling_limiter=False,
    )
    with pytest.raises(driver.AdmissibilityError, match="step"):
        driver.run(cfg)


def test_mesh_dimension_mismatch_rejected():
    with pytest.raises(ConfigError, match="mesh"):
        driver.setup(RunConfig("isentropic_vortex", 2, (16,), cfl=0.1))


def test_ghost_element_2d_rejected():
    with pytest.raises(ConfigError, match="ghost"):
        driver.setup(
            RunConfig("isentropic_vortex", 2, (8, 8), cfl=0.1, boundary_treatment="ghost_element")
        )


def test_snapshots_at_output_cadence():
    cfg = RunConfig("linadv_sine", 1, (16,), cfl=0.2, final_time=0.4, output_cadence=0.1)
    rep = driver.run(cfg)
    times = [s.time for s in rep.snapshots]
    assert len(times) == 4
    assert np.allclose(times, [0.1, 0.2, 0.3, 0.4], atol=1e-12)
