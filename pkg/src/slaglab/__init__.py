"""Calibrated geometry of gradient graphs in pseudo-Euclidean space.

Submodules
----------
metric_planes
    The metric family ``g_t``, tangent planes, calibrations and determinant
    inequalities.
equation_family
    The operators ``F^t`` of the Monge-Ampere / special Lagrangian family
    and the identities relating its members.
graph_geometry
    Finite-difference geometry of sampled graphs: Hessians, volumes,
    residuals, null Lagrangians.
lewy_transforms
    Lewy rotations between family members, injectivity and reconstruction
    of transformed potentials.
solvers
    Poisson, Monge-Ampere and family Dirichlet solvers.
lab
    Named experiments, property sweeps and the ``slag-lab`` CLI.
"""

from . import equation_family, graph_geometry, grids, lewy_transforms, metric_planes, solvers
from .errors import (
    BranchCrossingError,
    ConsistencyError,
    ConvergenceError,
    DomainError,
    LeftAdmissibleRegionError,
    NotSpacelikeError,
    PreconditionError,
    SlagLabError,
)
from .grids import AnnulusMask, GridDomain, ScalarFieldGrid, VectorFieldGrid, read_grid, write_grid
from .metric_planes import MetricConstants, MetricSpec, TangentPlane, metric_constants

__version__ = "0.1.0"

__all__ = [
    "equation_family",
    "graph_geometry",
    "grids",
    "lewy_transforms",
    "metric_planes",
    "solvers",
    "BranchCrossingError",
    "ConsistencyError",
    "ConvergenceError",
    "DomainError",
    "LeftAdmissibleRegionError",
    "NotSpacelikeError",
    "PreconditionError",
    "SlagLabError",
    "AnnulusMask",
    "GridDomain",
    "ScalarFieldGrid",
    "VectorFieldGrid",
    "read_grid",
    "write_grid",
    "MetricConstants",
    "MetricSpec",
    "TangentPlane",
    "metric_constants",
]
