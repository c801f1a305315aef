"""Quiver Grassmannians of rigid representations: exact linear algebra,
decomposition, degree-one covers, torus fixed points, and rational charts.

The intended entry points are re-exported here; everything else lives in
the submodules (qgl.linalg, qgl.quivers, qgl.reps, qgl.covers, qgl.grass,
qgl.charts, qgl.io, qgl.pipeline).
"""

from .errors import (
    QglError,
    ParseError,
    ValidationError,
    VerificationError,
    LiftError,
    DecompositionError,
    IterationError,
    ReflectionError,
    ChartError,
    OutOfDomainError,
)
from .linalg import (
    GF,
    Field,
    Matrix,
    Subspace,
    rref_rank,
    kernel_basis,
    subspace_algebra,
    quotient_project,
    enumerate_subspaces,
)
from .quivers import (
    Arrow,
    Quiver,
    double_quiver,
    reduced_cycle_girth,
    structure_report,
    is_cover,
    universal_cover_window,
)
from .reps import (
    Representation,
    make_rep,
    simple_rep,
    euler_form,
    hom_ext_dims,
    rigidity_report,
    direct_sum,
    decompose,
    split_summands,
    group_summands,
    reflect,
    delete_leaf,
    reduce_rep,
)
from .covers import (
    GradedRepresentation,
    build_cover_window,
    pushdown,
    shift,
    lift_from_coefficient_quiver,
    iterate_cover_to_tree,
    graded_homext_check,
)
from .grass import (
    enumerate_subreps,
    count_subreps,
    counting_polynomial,
    summand_fixed_components,
    grading_fixed_components,
    summand_action,
    grading_action,
    bb_limit,
    attractor_flow,
)
from .charts import (
    build_chart,
    chart_from_steps,
    eval_chart,
    verify_chart,
    generic_rank_at_leaf,
)
from .io import parse_inputs
from .pipeline import PipelineReport, verify_pipeline

__all__ = [
    "QglError",
    "ParseError",
    "ValidationError",
    "VerificationError",
    "LiftError",
    "DecompositionError",
    "IterationError",
    "ReflectionError",
    "ChartError",
    "OutOfDomainError",
    "GF",
    "Field",
    "Matrix",
    "Subspace",
    "rref_rank",
    "kernel_basis",
    "subspace_algebra",
    "quotient_project",
    "enumerate_subspaces",
    "Arrow",
    "Quiver",
    "double_quiver",
    "reduced_cycle_girth",
    "structure_report",
    "is_cover",
    "universal_cover_window",
    "Representation",
    "make_rep",
    "simple_rep",
    "euler_form",
    "hom_ext_dims",
    "rigidity_report",
    "direct_sum",
    "decompose",
    "split_summands",
    "group_summands",
    "reflect",
    "delete_leaf",
    "reduce_rep",
    "GradedRepresentation",
    "build_cover_window",
    "pushdown",
    "shift",
    "lift_from_coefficient_quiver",
    "iterate_cover_to_tree",
    "graded_homext_check",
    "enumerate_subreps",
    "count_subreps",
    "counting_polynomial",
    "summand_fixed_components",
    "grading_fixed_components",
    "summand_action",
    "grading_action",
    "bb_limit",
    "attractor_flow",
    "build_chart",
    "chart_from_steps",
    "eval_chart",
    "verify_chart",
    "generic_rank_at_leaf",
    "parse_inputs",
    "PipelineReport",
    "verify_pipeline",
]
