import numpy as np
import pytest

from gridweave.bench import (
    CSV_HEADER,
    BenchConfig,
    PipelineId,
    gen_synthetic,
    run_matrix,
    run_pipeline,
    write_matrix,
)
from gridweave.measures import Measure, layout_convexity
from gridweave.model import GridSpec, LayoutError, validate_layout


def test_gen_synthetic_single_cluster():
    samples = gen_synthetic(1, 20, 0.03, seed=1)
    assert {s.cluster for s in samples.samples} == {"c0"}


def test_gen_synthetic_zero_spread_collapses_clusters():
    samples = gen_synthetic(3, 30, 0.0, seed=2, label_noise=0.0)
    by_cluster = {}
    for s in samples.samples:
        by_cluster.setdefault(s.cluster, set()).add(s.position)
    assert all(len(v) == 1 for v in by_cluster.values())


def test_gen_synthetic_deterministic():
    a = gen_synthetic(5, 400, 0.05, seed=7)
    b = gen_synthetic(5, 400, 0.05, seed=7)
    assert a.samples == b.samples
    c = gen_synthetic(5, 400, 0.05, seed=8)
    assert a.samples != c.samples


def test_gen_synthetic_counts_and_validation():
    samples = gen_synthetic(4, 101, 0.05, seed=3)
    assert len(samples) == 101
    with pytest.raises(LayoutError):
        gen_synthetic(0, 10, 0.05, seed=0)
    with pytest.raises(LayoutError):
        gen_synthetic(5, 3, 0.05, seed=0)


def test_run_pipeline_baseline_proximity_exactly_one():
    samples = gen_synthetic(3, 36, 0.05, seed=4)
    result = run_pipeline(samples, GridSpec(6, 6), PipelineId.BASELINE, seed=4)
    assert result.report.proximity == 1.0
    assert validate_layout(result.layout).ok


def test_run_pipeline_local_monotone_in_its_measure():
    samples = gen_synthetic(3, 49, 0.05, seed=5)
    spec = GridSpec(7, 7)
    base = run_pipeline(samples, spec, PipelineId.BASELINE, seed=5)
    for pid, measure in ((PipelineId.G_L_T, Measure.TRIPLE), (PipelineId.G_L_P, Measure.PERIMETER)):
        g = run_pipeline(samples, spec, PipelineId.G, seed=5)
        out = run_pipeline(samples, spec, pid, seed=5)
        assert layout_convexity(out.layout, measure) >= layout_convexity(g.layout, measure) - 1e-12
        assert layout_convexity(out.layout, measure) >= 0  # shape sanity
    assert base.lap_solves == 0


def test_run_pipeline_all_variants_valid():
    samples = gen_synthetic(3, 30, 0.05, seed=6)
    spec = GridSpec(6, 6)
    for pid in PipelineId:
        result = run_pipeline(samples, spec, pid, seed=6)
        assert validate_layout(result.layout).ok, pid
        rep = result.report
        for value in (
            rep.proximity,
            rep.compactness,
            rep.area_ratio,
            rep.triple_ratio,
            rep.perimeter_ratio,
            rep.cut_ratio,
        ):
            assert 0.0 < value <= 1.0


def test_run_pipeline_fixed_lambda_counts_alternation_solves():
    samples = gen_synthetic(3, 25, 0.05, seed=9)
    spec = GridSpec(5, 5)
    fixed = run_pipeline(samples, spec, PipelineId.G, seed=9, lambda_mode=0.5)
    assert fixed.adaptive_solves == 0
    assert 1 <= fixed.lap_solves <= 10
    adaptive = run_pipeline(samples, spec, PipelineId.G, seed=9, lambda_mode="adaptive")
    assert adaptive.adaptive_solves >= 1
    assert adaptive.lap_solves > fixed.lap_solves or adaptive.wall_ms >= 0


def test_run_matrix_single_cell():
    cfg = BenchConfig(
        grid_sizes=(5,),
        clusters=3,
        samples=25,
        seeds=(1,),
        pipelines=(PipelineId.BASELINE,),
    )
    result = run_matrix(cfg, workers=1)
    assert len(result.rows) == 1
    row = result.rows[0]
    assert row.pipeline == "baseline"
    assert row.grid == "5x5"
    assert row.valid


def test_run_matrix_repeats_and_means():
    cfg = BenchConfig(
        grid_sizes=(4,),
        clusters=2,
        samples=16,
        seeds=(0,),
        repeats=3,
        pipelines=(PipelineId.BASELINE,),
    )
    result = run_matrix(cfg, workers=1)
    assert len(result.rows) == 3
    tri = [r.report.triple_ratio for r in result.rows]
    assert result.cell_means["baseline|4x4"]["triple_ratio"] == pytest.approx(np.mean(tri))


def test_run_matrix_deterministic_modulo_walltime():
    cfg = BenchConfig(
        grid_sizes=(5,),
        clusters=3,
        samples=20,
        seeds=(0, 1),
        pipelines=(PipelineId.BASELINE, PipelineId.L_T),
    )
    a = run_matrix(cfg, workers=1)
    b = run_matrix(cfg, workers=2)

    def strip(text: str) -> str:
        lines = []
        for line in text.splitlines():
            parts = line.split(",")
            if parts and parts[-3].replace(".", "").isdigit():
                parts[-3] = "WALL"
            lines.append(",".join(parts))
        return "\n".join(lines)

    assert strip(a.csv_text()) == strip(b.csv_text())


def test_csv_shape(tmp_path):
    cfg = BenchConfig(
        grid_sizes=(4,),
        clusters=2,
        samples=12,
        seeds=(2,),
        pipelines=(PipelineId.BASELINE, PipelineId.G),
    )
    result = run_matrix(cfg, workers=1)
    csv_path, json_path = write_matrix(result, tmp_path)
    lines = csv_path.read_text().strip().splitlines()
    assert lines[0] == CSV_HEADER
    assert len(lines) == 3
    assert all(len(line.split(",")) == len(CSV_HEADER.split(",")) for line in lines)
    assert json_path.exists()


def test_config_from_dict():
    cfg = BenchConfig.from_dict(
        {"grid_sizes": [6], "clusters": 2, "samples": 20, "seeds": [0], "pipelines": ["baseline", "g-l-t"]}
    )
    assert cfg.pipelines == (PipelineId.BASELINE, PipelineId.G_L_T)
    with pytest.raises(LayoutError):
        BenchConfig(repeats=0)
