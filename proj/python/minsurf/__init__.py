"""Level-set mean curvature flow toward minimal surfaces.

Thin wrapper over the C++ core: build a background mesh, sample a signed
distance, extract the zero isosurface, or drive a full scenario evolution.
"""

from ._core import (
    LevelSet,
    Mesh,
    Primitive,
    SolverError,
    UsageError,
    build_box_mesh,
    curvature_study,
    extract_surface,
    level_set,
    run_scenario,
    scenario_description,
    scenario_names,
)

__all__ = [
    "LevelSet",
    "Mesh",
    "Primitive",
    "SolverError",
    "UsageError",
    "build_box_mesh",
    "curvature_study",
    "extract_surface",
    "level_set",
    "run_scenario",
    "scenario_description",
    "scenario_names",
]

__version__ = "0.1.0"
