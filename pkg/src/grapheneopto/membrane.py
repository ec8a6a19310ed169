"""Fundamental flexural mode of a suspended circular graphene membrane.

The membrane is treated as a tensioned circular drum. Its first radially
symmetric mode sets the mechanical frequency, a fixed fraction of the total
mass sets the effective mass, and the bath temperature sets the thermal
phonon occupancy.
"""
from dataclasses import dataclass

import numpy as np
from scipy.constants import hbar, k as k_B

from .errors import DomainError
from .units import hz

#: First zero of J0 divided by pi; ``omega_m = 2 pi * FIRST_MODE_FACTOR * sqrt(E xi / rho) / D``.
FIRST_MODE_FACTOR = 0.766
#: Effective-to-total mass ratio of the fundamental drum mode.
EFFECTIVE_MASS_FRACTION = 0.27

STIFFNESS_2D = 340.0             # N/m
AREAL_DENSITY = 7.4e-19 / 1e-12  # kg/m^2 (7.4e-19 kg per square micron)
INTRINSIC_DAMPING = hz(10.0)     # rad/s
STRAIN_RANGE = (1e-4, 0.1)


@dataclass(frozen=True)
class MembraneSpec:
    """Geometry, material and environment of the graphene sheet.

    Parameters
    ----------
    diameter : float
        Membrane diameter D in m.
    strain : float
        Built-in strain xi (dimensionless), between 1e-4 and 0.1.
    stiffness2d : float
        Two-dimensional elastic stiffness in N/m.
    areal_density : float
        Mass per unit area in kg/m^2.
    intrinsic_damping : float
        Mechanical amplitude damping rate gamma_m in rad/s.
    temperature : float
        Bath temperature in K.
    """

    diameter: float = 30e-6
    strain: float = 0.01
    stiffness2d: float = STIFFNESS_2D
    areal_density: float = AREAL_DENSITY
    intrinsic_damping: float = INTRINSIC_DAMPING
    temperature: float = 0.26

    def __post_init__(self):
        for name in ("diameter", "stiffness2d", "areal_density"):
            if not getattr(self, name) > 0:
                raise DomainError(f"{name} must be positive, got {getattr(self, name)!r}")
        lo, hi = STRAIN_RANGE
        if not lo <= self.strain <= hi:
            raise DomainError(f"strain must lie in [{lo}, {hi}], got {self.strain!r}")
        if not self.intrinsic_damping >= 0:
            raise DomainError(f"intrinsic_damping must be >= 0, got {self.intrinsic_damping!r}")
        if not self.temperature >= 0:
            raise DomainError(f"temperature must be >= 0, got {self.temperature!r}")

    @property
    def area(self):
        return np.pi * (self.diameter / 2) ** 2


@dataclass(frozen=True)
class MechanicalMode:
    omega_m: float
    m_eff: float
    x_zpf: float
    n_th: float
    gamma_m: float


def fundamental_frequency(spec):
    """Angular frequency (rad/s) of the first radially symmetric drum mode."""
    for name in ("diameter", "stiffness2d", "strain", "areal_density"):
        if not getattr(spec, name) > 0:
            raise DomainError(f"{name} must be positive")
    wave_speed = np.sqrt(spec.stiffness2d * spec.strain / spec.areal_density)
    return 2 * np.pi * FIRST_MODE_FACTOR * wave_speed / spec.diameter


def effective_mass(spec):
    if not (spec.diameter > 0 and spec.areal_density > 0):
        raise DomainError("diameter and areal_density must be positive")
    return EFFECTIVE_MASS_FRACTION * spec.areal_density * spec.area


def zero_point_amplitude(omega, m_eff):
    """RMS ground-state displacement sqrt(hbar / (2 m_eff omega)) in m."""
    if not (omega > 0 and m_eff > 0):
        raise DomainError("omega and m_eff must be positive")
    return np.sqrt(hbar / (2 * m_eff * omega))


def thermal_occupancy(temperature, omega):
    """Bose-Einstein occupancy of a mode at angular frequency ``omega``.

    Returns exactly 0 at zero temperature.
    """
    if not omega > 0:
        raise DomainError(f"omega must be positive, got {omega!r}")
    if not temperature >= 0:
        raise DomainError(f"temperature must be >= 0, got {temperature!r}")
    if temperature == 0:
        return 0.0
    return 1.0 / np.expm1(hbar * omega / (k_B * temperature))


def mechanical_mode(spec):
    """Derive the oscillator parameters of the fundamental mode of ``spec``."""
    omega_m = fundamental_frequency(spec)
    m_eff = effective_mass(spec)
    return MechanicalMode(
        omega_m=omega_m,
        m_eff=m_eff,
        x_zpf=zero_point_amplitude(omega_m, m_eff),
        n_th=thermal_occupancy(spec.temperature, omega_m),
        gamma_m=spec.intrinsic_damping,
    )
