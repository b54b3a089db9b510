"""cdlab: finite-truncation laboratory for shift, kernel, and block-operator diagnostics.

Submodules:

- ``matrix_core``: Hermitian/PSD certification, Schur splits, block determinants.
- ``shifts``: weighted backward shifts, defect operators, hypercontractivity,
  weight-ratio bounds, Shields similarity diagnostics.
- ``rkhs``: diagonal reproducing kernels, metrics, curvature, covariant
  derivatives, kernel/shift translations.
- ``blockops``: upper-triangular block operators, contraction criteria,
  holomorphic frames, reducibility detectors.
- ``similarity``: det-ratio profiles, boundedness/boundary verdicts, the
  bounded-subharmonic witness check, the commutator coupling example.
- ``cli``: JSON request front door (``cdlab`` console script).
"""

from . import blockops, cli, matrix_core, rkhs, rules, shifts, similarity
from .errors import (
    CdlabError,
    ConfigurationError,
    DimensionError,
    DomainError,
    SingularityError,
    StructureError,
    TruncationError,
)

__all__ = [
    "blockops",
    "cli",
    "matrix_core",
    "rkhs",
    "rules",
    "shifts",
    "similarity",
    "CdlabError",
    "ConfigurationError",
    "DimensionError",
    "DomainError",
    "SingularityError",
    "StructureError",
    "TruncationError",
]

__version__ = "0.1.0"
