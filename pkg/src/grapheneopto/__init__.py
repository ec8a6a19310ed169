"""Dissipative optomechanics of a graphene membrane in a Fabry-Perot cavity."""
from .cavity import CavitySpec, CouplingPoint, absorption_rate, beam_waist, coupling_eta, coupling_point
from .config import RunConfig, parse_config
from .errors import (
    ConfigError, ConvergenceError, DomainError, GrapheneOptoError, InstabilityError, SingularityError,
    ValidityWarning, WeakCouplingError,
)
from .langevin import (
    LinearizedSystem, OpticalSpring, PhononResult, SpectrumGrid, SpectrumResult, linearize, optical_spring,
    phonon_number_analytic, spectrum_oracle,
)
from .membrane import MechanicalMode, MembraneSpec, mechanical_mode
from .model import ModelParameters
from .response import DriveSpec, SteadyState, steady_state
from .sweep import AxisSpec, SweepConfig, detuning_scan, optimal_cooling, phonon_map

__all__ = [
    "AxisSpec", "CavitySpec", "ConfigError", "ConvergenceError", "CouplingPoint", "DomainError", "DriveSpec",
    "GrapheneOptoError", "InstabilityError", "LinearizedSystem", "MechanicalMode", "MembraneSpec",
    "ModelParameters", "OpticalSpring", "PhononResult", "RunConfig", "SingularityError", "SpectrumGrid",
    "SpectrumResult", "SteadyState", "SweepConfig", "ValidityWarning", "WeakCouplingError",
    "absorption_rate", "beam_waist", "coupling_eta", "coupling_point", "detuning_scan", "linearize",
    "mechanical_mode", "optical_spring", "optimal_cooling", "parse_config", "phonon_map",
    "phonon_number_analytic", "spectrum_oracle", "steady_state",
]
