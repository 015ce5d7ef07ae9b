"""Period functions and isochronicity certificates for planar piecewise potential systems."""

from .errors import AnalysisError, ConfigInvalid, PwPeriodError
from .exact import ExactNumber
from .expansion import (
    PeriodExpansion,
    branch_time_series,
    center_half_period_series,
    coupled_expansion,
    first_nonzero_constant,
    omega_of,
)
from .potential import PiecewiseSystem, Potential, Side, Topology, classify_side, classify_system
from .quadrature import branch_time_numeric, divergence_probe, period_numeric, period_table
from .series import TruncatedSeries
from .simulate import SimOptions, integrate_return
from .verdict import verdict

__version__ = "0.1.0"

__all__ = [
    "AnalysisError", "ConfigInvalid", "ExactNumber", "PeriodExpansion", "PiecewiseSystem", "Potential",
    "PwPeriodError", "Side", "SimOptions", "Topology", "TruncatedSeries", "branch_time_numeric",
    "branch_time_series", "center_half_period_series", "classify_side", "classify_system",
    "coupled_expansion", "divergence_probe", "first_nonzero_constant", "integrate_return", "omega_of",
    "period_numeric", "period_table", "verdict",
]
