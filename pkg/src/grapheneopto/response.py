"""Pump amplitude, electronic linear response and the intracavity mean field.

The interband polarisation of the sheet, driven by the intracavity field,
acts back on the cavity through the absorption channel. Its mean value
follows from first-order (Kubo) response and depends on the photon number
``|abar|^2``; the mean field ``abar`` in turn depends on it. The two are
solved together by fixed-point iteration.

Phase convention: the pump amplitude ``E`` is real and positive.
"""
import logging
import warnings
from dataclasses import dataclass

import numpy as np
from scipy.constants import hbar

from .errors import ConvergenceError, DomainError, ValidityWarning

log = logging.getLogger(__name__)

FERMI_VELOCITY_RATIO = 1.0 / 300.0
POWER_VALIDITY_LIMIT = 1e-3   # W; linear response is trusted below this
TOLERANCE = 1e-12
MAX_ITERATIONS = 1000


@dataclass(frozen=True)
class DriveSpec:
    """Coherent pump.

    ``amplitude`` is the input-coupled drive E in s^-1 sqrt(photon); it is
    tied to the power by ``|E| = sqrt(2 P kappa_c / (hbar omega_p))``. Build
    instances through :meth:`from_power` to keep that relation.
    """

    power: float
    detuning: float
    pump_frequency: float
    amplitude: complex

    def __post_init__(self):
        if not self.power >= 0:
            raise DomainError(f"pump power must be >= 0, got {self.power!r}")
        if self.power > POWER_VALIDITY_LIMIT:
            warnings.warn(
                f"pump power {self.power:.3g} W exceeds {POWER_VALIDITY_LIMIT} W; "
                "linear response may not hold",
                ValidityWarning,
                stacklevel=3,
            )

    @classmethod
    def from_power(cls, power, detuning, kappa_c, omega_cav):
        omega_p = omega_cav - detuning
        return cls(power=power, detuning=detuning, pump_frequency=omega_p,
                   amplitude=complex(pump_amplitude(power, kappa_c, omega_p)))


@dataclass(frozen=True)
class SteadyState:
    abar: complex
    sigma_bar: complex
    kappa_total: float
    iterations: int
    converged: bool
    residual: float

    @property
    def n_photon(self):
        return abs(self.abar) ** 2


@dataclass(frozen=True)
class EffectiveCouplings:
    G: complex
    G_e: complex
    area_ratio: float
    fermi_velocity_ratio: float


def pump_amplitude(power, kappa_c, omega_p):
    """Drive amplitude |E| = sqrt(2 P kappa_c / (hbar omega_p)) for pump power ``power`` (W)."""
    if np.any(np.asarray(power) < 0):
        raise DomainError("pump power must be >= 0")
    if not (kappa_c > 0 and np.all(np.asarray(omega_p) > 0)):
        raise DomainError("kappa_c and omega_p must be positive")
    return np.sqrt(2 * np.asarray(power) * kappa_c / (hbar * omega_p))


def sigma_response(abar, kappa_e, area_ratio, fermi_velocity_ratio=FERMI_VELOCITY_RATIO):
    """Mean interband polarisation in the pump frame.

    ``-(1/8) sqrt(2 kappa_e) (v_F/c)^2 (A_eff/A) |abar|^2``. The response is
    quadratic in the field modulus and carries no phase of its own.
    """
    if np.any(np.asarray(kappa_e) < 0):
        raise DomainError("kappa_e must be >= 0")
    if np.any(np.asarray(area_ratio) <= 0) or np.any(np.asarray(area_ratio) > 1):
        raise DomainError("area_ratio must lie in (0, 1]")
    return -0.125 * np.sqrt(2 * kappa_e) * fermi_velocity_ratio**2 * area_ratio * np.abs(abar) ** 2


def solve_mean_field(E, detuning, kappa_c, kappa_e, area_ratio,
                     fermi_velocity_ratio=FERMI_VELOCITY_RATIO, tol=TOLERANCE, max_iter=MAX_ITERATIONS):
    """Array version of the self-consistent solve.

    Broadcasts over all inputs. Returns ``(abar, sigma_bar, iterations,
    converged)`` where ``converged`` is elementwise.
    """
    E, detuning, kappa_e = np.broadcast_arrays(
        np.asarray(E, dtype=complex), np.asarray(detuning, dtype=float), np.asarray(kappa_e, dtype=float))
    denom = 1j * detuning + kappa_c + kappa_e
    root = np.sqrt(2 * kappa_e)
    abar = E / denom
    done = np.zeros(abar.shape, dtype=bool)
    it = 0
    while it < max_iter:
        it += 1
        sigma = sigma_response(abar, kappa_e, area_ratio, fermi_velocity_ratio)
        new = (E + root * sigma) / denom
        step = np.abs(new - abar)
        abar = new
        done = step <= tol * np.abs(abar)
        if np.all(done):
            break
    sigma = sigma_response(abar, kappa_e, area_ratio, fermi_velocity_ratio)
    return abar, sigma, it, done


def eq9_residual(abar, sigma_bar, E, detuning, kappa_c, kappa_e):
    """Relative residual |abar (i Delta + kappa) - E - sqrt(2 kappa_e) sigma| / |E|."""
    res = np.abs(abar * (1j * detuning + kappa_c + kappa_e) - E - np.sqrt(2 * kappa_e) * sigma_bar)
    scale = np.abs(E)
    with np.errstate(invalid="ignore", divide="ignore"):
        return np.where(scale > 0, res / np.where(scale > 0, scale, 1.0), res)


def steady_state(drive, kappa_c, kappa_e, area_ratio,
                 fermi_velocity_ratio=FERMI_VELOCITY_RATIO, tol=TOLERANCE, max_iter=MAX_ITERATIONS):
    """Self-consistent intracavity field and electronic response for one drive.

    Raises
    ------
    ConvergenceError
        If the fixed point is not reached in ``max_iter`` iterations, which
        means the drive lies far outside the linear-response regime.
    """
    if not kappa_c > 0:
        raise DomainError("kappa_c must be positive")
    if not kappa_e >= 0:
        raise DomainError("kappa_e must be >= 0")
    abar, sigma, it, done = solve_mean_field(
        drive.amplitude, drive.detuning, kappa_c, kappa_e, area_ratio, fermi_velocity_ratio, tol, max_iter)
    if not bool(done):
        raise ConvergenceError(
            f"mean-field iteration did not converge in {max_iter} iterations "
            f"(P={drive.power:.3g} W); parameters are outside linear response")
    residual = float(eq9_residual(abar, sigma, drive.amplitude, drive.detuning, kappa_c, kappa_e))
    ratio = validity_ratio(drive.amplitude, kappa_e, sigma)
    log.debug("steady state: |abar|^2=%.4g, |E|/(sqrt(2ke)|sigma|)=%.3g", abs(abar) ** 2, ratio)
    return SteadyState(
        abar=complex(abar), sigma_bar=complex(sigma), kappa_total=kappa_c + kappa_e,
        iterations=it, converged=True, residual=residual,
    )


def validity_ratio(E, kappa_e, sigma_bar):
    """|E| / (sqrt(2 kappa_e) |sigma_bar|); infinite when the response vanishes."""
    den = np.sqrt(2 * np.asarray(kappa_e)) * np.abs(sigma_bar)
    with np.errstate(divide="ignore", invalid="ignore"):
        out = np.where(den > 0, np.abs(E) / np.where(den > 0, den, 1.0), np.inf)
    return float(out) if np.ndim(out) == 0 else out


def effective_couplings(ss, eta_kappa, kappa_e, area_ratio=float("nan"),
                        fermi_velocity_ratio=FERMI_VELOCITY_RATIO):
    """Linearised coupling coefficients G and G_e at the steady state ``ss``."""
    if not ss.converged:
        raise ConvergenceError("effective couplings need a converged steady state")
    root = np.sqrt(2 * kappa_e)
    G = (2 * ss.abar * kappa_e - root * ss.sigma_bar) * eta_kappa
    G_e = root * ss.sigma_bar * eta_kappa
    return EffectiveCouplings(G=complex(G), G_e=complex(G_e), area_ratio=area_ratio,
                              fermi_velocity_ratio=fermi_velocity_ratio)
