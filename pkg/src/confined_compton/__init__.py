"""Compton profiles, momentum densities and information measures of the
hydrogen-like atom confined in an impenetrable sphere (atomic units)."""
from .errors import (AccuracyError, ContractError, ConvergenceError, DivergenceError, DomainError,
                     EvaluationError, SearchError, WrongRootError)
from .specfun import DEFAULT_QUADRATURE, QuadratureSpec
from .radial import GridPolicy, RadialSolution, StateSpec, solve_energy, solve_state
from .momentum import MomentumDensity, build_emd, closed_form_emd, moment_from_emd
from .compton import ComptonProfile, build_profile, moment_from_profile
from .infotheory import InfoMeasures, info_measures, shannon_of_profile, onicescu_of_profile, entropic_moment
from .scaling import ScaleMap, reference_spec
from .pipeline import ResultRecord, compute

__version__ = "0.1.0"

__all__ = [
    "AccuracyError", "ContractError", "ConvergenceError", "DivergenceError", "DomainError",
    "EvaluationError", "SearchError", "WrongRootError",
    "QuadratureSpec", "DEFAULT_QUADRATURE", "StateSpec", "GridPolicy", "RadialSolution",
    "solve_energy", "solve_state", "MomentumDensity", "build_emd", "closed_form_emd", "moment_from_emd",
    "ComptonProfile", "build_profile", "moment_from_profile", "InfoMeasures", "info_measures",
    "shannon_of_profile", "onicescu_of_profile", "entropic_moment", "ScaleMap", "reference_spec",
    "ResultRecord", "compute",
]
