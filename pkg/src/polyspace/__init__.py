"""Topology of planar and spatial polygon spaces, exact and random.

Exact invariants come from counting short subsets; random-length limit laws
are estimated through permutation stopping times.  See the README for a tour.
"""
from .asymptotics import compute_c_alpha, run_experiment
from .core import (
    BettiProfile,
    Kind,
    LengthVector,
    Mode,
    PoincarePolynomial,
    SubsetProfile,
    is_generic,
    quantize,
    total_betti,
)
from .errors import PolyspaceError
from .exact import (
    betti,
    equilateral_planar,
    equilateral_planar_total,
    equilateral_spatial,
    equilateral_spatial_total,
    planar_betti,
    planar_poincare,
    poincare,
    short_profile,
    short_profile_planar,
    short_profile_spatial,
    spatial_betti,
    spatial_poincare,
)
from .experiment import ExperimentConfig, ExperimentResult, load_config
from .kernels import BACKEND
from .oracle import oracle_brute_force
from .stochastic import (
    UNIFORM01,
    McEstimate,
    RandomModel,
    mc_mean_betti,
    mc_mean_poincare,
    mc_short_profile,
    sample_length_vector,
    tau,
    tau_tilde,
)

__version__ = "0.1.0"

__all__ = [
    "__version__",
    "BACKEND",
    "betti",
    "BettiProfile",
    "compute_c_alpha",
    "equilateral_planar",
    "equilateral_planar_total",
    "equilateral_spatial",
    "equilateral_spatial_total",
    "ExperimentConfig",
    "ExperimentResult",
    "is_generic",
    "Kind",
    "LengthVector",
    "load_config",
    "mc_mean_betti",
    "mc_mean_poincare",
    "mc_short_profile",
    "McEstimate",
    "Mode",
    "oracle_brute_force",
    "planar_betti",
    "planar_poincare",
    "poincare",
    "PoincarePolynomial",
    "PolyspaceError",
    "quantize",
    "RandomModel",
    "run_experiment",
    "sample_length_vector",
    "short_profile",
    "short_profile_planar",
    "short_profile_spatial",
    "spatial_betti",
    "spatial_poincare",
    "SubsetProfile",
    "tau",
    "tau_tilde",
    "total_betti",
    "UNIFORM01",
]
