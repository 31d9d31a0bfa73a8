"""Cluster-aware grid layouts: assignment, refinement, measures, hierarchy."""

from .assign import (
    LambdaSchedule,
    baseline_grid_from_projection,
    build_cost_matrix,
    cluster_centers,
    compute_lambda,
    global_assignment,
    solve_lap,
)
from .bench import BenchConfig, PipelineId, gen_synthetic, run_matrix, run_pipeline
from .geometry import (
    Polygon,
    collinear_triple_counts,
    convex_hull,
    halfplane_area_fraction,
    polygon_area,
    polygon_perimeter,
)
from .hierarchy import HierarchyNode, build_root, zoom
from .measures import (
    Measure,
    MeasureReport,
    compactness_raw,
    convexity,
    layout_convexity,
    proximity_raw,
    proximity_similarity,
    report,
)
from .model import (
    Assignment,
    ClusterShape,
    GridLayout,
    GridSpec,
    LayoutError,
    Sample,
    SampleSet,
    extract_cluster_shapes,
    validate_layout,
)
from .refine import SwapCandidate, boundary_cells, evaluate_swap, local_adjust

__all__ = [name for name in dir() if not name.startswith("_")]
__version__ = "0.1.0"
