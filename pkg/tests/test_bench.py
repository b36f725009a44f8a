import pytest

from crkfr import bench
from crkfr.config import RunConfig


def test_d2_time_average_payload_is_twice_d1():
    d1 = bench.trace_payload_per_face("d1", 3, 3)
    d2 = bench.trace_payload_per_face("d2", 3, 3)
    assert d2["time_avg"] == 2 * d1["time_avg"]


def test_dcsx_stage_payload_is_stages_times_vars():
    for n_vars, stages in ((3, 3), (4, 4), (6, 2)):
        payload = bench.trace_payload_per_face("dcsx", n_vars, stages)
        assert payload["stage"] == stages * n_vars


def test_counters_exact_on_config():
    cfg = RunConfig("burgers_sine", 2, (16,), cfl=0.1, dissipation="dcsx")
    report = bench.bench_step(cfg, repetitions=3)
    counters = report["counters"]
    assert counters["faces"] == 17
    assert counters["per_face_per_side"]["stage"] == 3 * 1
    assert counters["per_step_stage"] == 3 * 1 * 17 * 2


def test_phase_timings_cover_step():
    cfg = RunConfig("blast", 2, (60,), cfl=0.1, blending="mh")
    report = bench.bench_step(cfg, repetitions=10)
    phases = report["phases"]
    total = phases["total"]["median"]
    parts = sum(stats["median"] for name, stats in phases.items() if name != "total")
    assert parts >= 0.95 * total
    for stats in phases.values():
        assert stats["p10"] <= stats["median"] <= stats["p90"]


def test_warmup_minimum_enforced():
    cfg = RunConfig("linadv_sine", 1, (8,), cfl=0.2)
    with pytest.raises(ValueError, match="warm-up"):
        bench.bench_step(cfg, warmup=1)


def test_report_text_format():
    cfg = RunConfig("linadv_sine", 1, (8,), cfl=0.2)
    report = bench.bench_step(cfg, repetitions=3)
    text = bench.bench_report_text(report)
    assert text.startswith("section,key,value")
    assert "counter,per_step_time_avg" in text
