"""Approximate l-type ellipsoids of symmetric convex bodies and exact SVP in their norms."""

from .bodies import (
    ConvexBody,
    EllipsoidBody,
    LinearImage,
    LpBall,
    OracleBody,
    SymPolytope,
    inscribed_ellipsoid,
    is_normalized,
    membership,
    norm,
    normalize,
    subgradient,
)
from .covering import (
    CoveringReport,
    HalfVolume,
    VolumeMethod,
    covering_translates,
    half_volume_radius,
    volume_ratio_diag,
)
from .errors import (
    CapExceededError,
    DimensionMismatchError,
    EllSvpError,
    NotNormalizedError,
    OracleInconsistencyError,
    ResolutionError,
    UnsupportedRoundingError,
)
from .estimate import f_tilde, f_tilde_subgradient, l_tilde, mc_f_estimate, uniform_vs_gaussian_check
from .grid import GaussGrid, GridMode, GridParams, enumerate_grid, grid_sigma, weight
from .lattice import (
    LatticeBasis,
    enumerate_in_ellipsoid,
    lll_reduce,
    shortest_vector_l2,
)
from .solver import Ellipsoid, SolveResult, SolverConfig, SolveStatus, build_ellipsoid, solve_ell_program
from .svp import SvpConfig, SvpResult, enumerate_in_body, points_in_body, prepare, svp

__version__ = "0.1.0"
