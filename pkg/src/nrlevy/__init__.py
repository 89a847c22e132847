"""Simulation and verification toolkit for step-reinforced random walks and
noise-reinforced Levy processes on the unit time interval."""

from .errors import (
    ConfigError,
    DomainError,
    InadmissibleError,
    NrlevyError,
    NumericalError,
    UnsupportedFamilyError,
)
from .rng import RngStream
from .yule_simon import (
    CountingPath,
    MemoryParameter,
    ys_cross_moment,
    ys_mean,
    ys_pmf,
    ys_process_sample,
    ys_sample,
)
from .levy_model import (
    FiniteAtomic,
    IsotropicStable,
    LevyTriplet,
    RadialDensity,
    ZeroJumps,
    bg_index,
    characteristic_exponent,
    increment_sample,
    is_admissible,
    thin,
)
from .step_reinforced import (
    ReinforcedWalk,
    ReinforcementRecord,
    elephant_walk,
    empirical_functional,
    reinforce,
    skeleton_reinforced_walk,
)
from .noise_reinforced import (
    CfQuery,
    MarkedAtom,
    NrlpConfig,
    PathSample,
    check_additivity,
    check_stability,
    nrbm_sample,
    nrlp_sample,
    reinforced_cf,
    reinforced_cf_exact,
    sample_atoms,
    theoretical_cf,
    truncation_budget,
)
from .diagnostics import (
    ConvergenceReport,
    EcfEstimate,
    PathFunctional,
    empirical_cf,
    ks_distance,
    prop8_experiment,
    supercritical_experiment,
    theorem1_experiment,
)

__all__ = [
    "CfQuery",
    "ConfigError",
    "ConvergenceReport",
    "CountingPath",
    "DomainError",
    "EcfEstimate",
    "FiniteAtomic",
    "InadmissibleError",
    "IsotropicStable",
    "LevyTriplet",
    "MarkedAtom",
    "MemoryParameter",
    "NrlevyError",
    "NrlpConfig",
    "NumericalError",
    "PathFunctional",
    "PathSample",
    "RadialDensity",
    "ReinforcedWalk",
    "ReinforcementRecord",
    "RngStream",
    "UnsupportedFamilyError",
    "ZeroJumps",
    "bg_index",
    "characteristic_exponent",
    "check_additivity",
    "check_stability",
    "elephant_walk",
    "empirical_cf",
    "empirical_functional",
    "increment_sample",
    "is_admissible",
    "ks_distance",
    "nrbm_sample",
    "nrlp_sample",
    "prop8_experiment",
    "reinforce",
    "reinforced_cf",
    "reinforced_cf_exact",
    "sample_atoms",
    "skeleton_reinforced_walk",
    "supercritical_experiment",
    "theorem1_experiment",
    "theoretical_cf",
    "thin",
    "truncation_budget",
    "ys_cross_moment",
    "ys_mean",
    "ys_pmf",
    "ys_process_sample",
    "ys_sample",
]

__version__ = "0.1.0"
