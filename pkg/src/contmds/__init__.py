"""contmds: embed datapoints as smooth curves over a grid of distance functions.

The main entry points are :class:`ContinuousMDS` (scikit-learn style) and
:func:`cmds` (functional).  Distance tensors come from your own data or
from the generators in :mod:`contmds.families`; diagnostics live in
:mod:`contmds.metrics`; file formats, CLI and the explorer service in
:mod:`contmds.fileformats`, :mod:`contmds.cli` and :mod:`contmds.server`.
"""

from .estimator import ContinuousMDS
from .model import (
    DistanceTensor,
    EmbeddingCurves,
    HyperparameterGrid,
    SolverSettings,
    VariantSpec,
    WeightTensor,
    devectorize_curve,
    validate_distance_tensor,
    vectorize_curve,
)
from .penalty import (
    RoughnessOperator,
    UpdateSystem,
    build_update_system,
    composite_roughness_matrix,
    grid_roughness_operator,
    roughness,
    roughness_matrix,
    second_difference_operator,
)
from .solver import SolveResult, build_weights, cmds

__version__ = "0.1.0"

__all__ = [
    "ContinuousMDS",
    "DistanceTensor",
    "EmbeddingCurves",
    "HyperparameterGrid",
    "RoughnessOperator",
    "SolveResult",
    "SolverSettings",
    "UpdateSystem",
    "VariantSpec",
    "WeightTensor",
    "build_update_system",
    "build_weights",
    "cmds",
    "composite_roughness_matrix",
    "devectorize_curve",
    "grid_roughness_operator",
    "roughness",
    "roughness_matrix",
    "second_difference_operator",
    "validate_distance_tensor",
    "vectorize_curve",
]
