"""Quench dynamics of quantum correlations in the infinite anisotropic XY chain."""
from .correlators import (
    CorrelatorSet,
    ModelParams,
    QuadratureSpec,
    correlator_g,
    correlator_s,
    correlator_set,
    dispersion,
    integrate_bz,
    magnetization_z,
)
from .discord import DiscordResult, discord, mutual_information
from .entanglement import log_negativity, negativity
from .errors import (
    ConvergenceFailure,
    InvalidSpectrum,
    NotPositive,
    OptimizerFailure,
    UnstableDerivative,
    XYQuenchError,
)
from .qstate import TwoQubitState, build_state
from .workdeficit import DeficitResult, one_way_deficit

__version__ = "0.1.0"
