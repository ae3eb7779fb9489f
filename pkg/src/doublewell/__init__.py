"""Tunneling dynamics of two interacting bosons in a symmetric 1D double well.

The pipeline: define the physical configuration (:mod:`model`), mesh the
configuration square (:mod:`mesh`), assemble sparse operators in the bosonic
sector (:mod:`assembly`), solve for low eigenpairs (:mod:`eigensolve`), then
either evolve a quenched initial state (:mod:`quench`, :mod:`frequency`) or
sweep the interaction strength (:mod:`scan`). :mod:`cli` ties it together and
serializes results.
"""

from .assembly import (
    BosonicBasis,
    OperatorBundle,
    assemble_1d,
    assemble_2d,
    assemble_region_overlaps,
    interaction_matrix,
)
from .config import RunConfig, load_config, save_config
from .eigensolve import (
    EigenPair,
    count_below,
    fd_oracle,
    fd_oracle_1d,
    solve_lowest,
)
from .errors import (
    ConfigurationError,
    ConvergenceError,
    DomainError,
    MeshResolutionError,
    OracleSizeError,
)
from .frequency import (
    FrequencyComponent,
    constant_term,
    dominant,
    frequency_components,
    reconstruct_nl,
    tunneling_period,
)
from .mesh import Mesh1D, Mesh2D, build_1d_mesh, build_2d_mesh
from .model import (
    InteractionKind,
    InteractionSpec,
    PotentialSpec,
    Region,
    interaction_eval,
    potential_eval,
    region_of,
)
from .quench import (
    InitialState,
    SpectralDecomposition,
    TimeSeries,
    decompose,
    evolve_probabilities,
    initial_state,
    mirror_state,
)
from .scan import (
    AvoidedCrossing,
    ScanResult,
    classify_state,
    detect_avoided_crossings,
    hellmann_feynman_slope,
    scan_levels,
)

__all__ = [
    "AvoidedCrossing", "BosonicBasis", "ConfigurationError", "ConvergenceError",
    "DomainError", "EigenPair", "FrequencyComponent", "InitialState",
    "InteractionKind", "InteractionSpec", "Mesh1D", "Mesh2D",
    "MeshResolutionError", "OperatorBundle", "OracleSizeError", "PotentialSpec",
    "Region", "RunConfig", "ScanResult", "SpectralDecomposition", "TimeSeries",
    "assemble_1d", "assemble_2d", "assemble_region_overlaps", "classify_state",
    "constant_term", "count_below", "decompose", "detect_avoided_crossings",
    "dominant", "evolve_probabilities", "fd_oracle", "fd_oracle_1d",
    "frequency_components", "hellmann_feynman_slope", "initial_state",
    "interaction_eval", "interaction_matrix", "load_config", "mirror_state",
    "potential_eval", "reconstruct_nl", "region_of", "save_config",
    "scan_levels", "solve_lowest", "tunneling_period",
]

__version__ = "0.1.0"
