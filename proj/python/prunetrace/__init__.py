"""Design-space pruning and Pareto-tracing topology optimization on 2D grids."""

from ._core import (
    BoundaryConditions,
    ConfigError,
    FeaResult,
    Grid,
    IndicatorField,
    InfeasibleTargetError,
    Material,
    MotionSet,
    OrientationSet,
    ParetoPoint,
    PointwiseConstraint,
    PruneResult,
    RunResult,
    Scenario,
    ScalarField,
    SolverError,
    ToolAssembly,
    __version__,
    accessibility_constraint,
    accessible_maximal_set,
    containment_constraint,
    convolve,
    custom_constraint,
    generate_scenario,
    generator_names,
    inaccessibility_measure,
    load_scenario,
    make_orientation_set,
    make_rotation_sweep,
    prune_pointwise,
    regularize,
    run_scenario,
    solve_elasticity,
    unsweep,
    validate_scenario,
    volume_fraction,
)

__all__ = [
    "BoundaryConditions",
    "ConfigError",
    "FeaResult",
    "Grid",
    "IndicatorField",
    "InfeasibleTargetError",
    "Material",
    "MotionSet",
    "OrientationSet",
    "ParetoPoint",
    "PointwiseConstraint",
    "PruneResult",
    "RunResult",
    "Scenario",
    "ScalarField",
    "SolverError",
    "ToolAssembly",
    "__version__",
    "accessibility_constraint",
    "accessible_maximal_set",
    "containment_constraint",
    "convolve",
    "custom_constraint",
    "generate_scenario",
    "generator_names",
    "inaccessibility_measure",
    "load_scenario",
    "make_orientation_set",
    "make_rotation_sweep",
    "prune_pointwise",
    "regularize",
    "run_scenario",
    "solve_elasticity",
    "unsweep",
    "validate_scenario",
    "volume_fraction",
]
