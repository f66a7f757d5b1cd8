"""Incoherent control of a qubit through a probe qubit sharing a dephasing bath."""

__version__ = "0.1.0"

from .dynamics import (
    AffineMap,
    affine_map_numeric,
    bell_affine_map,
    evolve_bloch,
    evolve_factorized,
    evolve_general,
    simplified_map,
)
from .model import (
    BathSpec,
    Eigenbasis,
    InteractionSpec,
    Mode,
    bose_occupation,
    dephasing_f,
    gamma,
    phase_phi,
    taylor_f,
    taylor_phi,
)
from .oracle import BathState, FockCutoffs, oracle_evolve, oracle_gamma
from .reachability import (
    AccessStatus,
    Ellipsoid,
    SwapSolution,
    accessibility_check,
    design_alpha4,
    detA_sixth_derivative,
    reachable_ellipsoid,
    swap_times,
)
from .series import TruncatedSeries
from .states import QubitState
