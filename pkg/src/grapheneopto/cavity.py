"""Gaussian standing-wave cavity mode and the graphene absorption channel.

The graphene sheet sits at a distance ``x0`` from a node of the standing
wave, close to the beam waist. Interband absorption of the undoped sheet
removes a fixed fraction ``pi * alpha`` of the local intensity, which turns
into an amplitude decay rate ``kappa_e(x0)`` of the cavity mode. Moving the
sheet modulates that rate; the logarithmic derivative of its square root
times the zero-point amplitude is the dissipative coupling ``eta_kappa``.

Every decay rate here is an amplitude (half-width) rate: the absorbed power
divided by twice the stored energy.
"""
import csv
import logging
from dataclasses import dataclass

import numpy as np
from scipy.constants import c, hbar, k as k_B, fine_structure, pi
from scipy.optimize import brentq
from scipy.special import expit

from .errors import DomainError, SingularityError

log = logging.getLogger(__name__)

UNIVERSAL_ABSORBANCE = pi * fine_structure
NODE_FLOOR = 1e-12


@dataclass(frozen=True)
class CavitySpec:
    """Fabry-Perot cavity.

    Parameters
    ----------
    length : float
        Effective cavity length L in m.
    wavelength : float
        Resonant wavelength in m.
    kappa_c : float
        Input-coupling amplitude decay rate in rad/s.
    waist : float, optional
        Beam waist in m. ``None`` selects the near-confocal waist.
    """

    length: float = 30e-6
    wavelength: float = 600e-9
    kappa_c: float = 2 * pi * 1e6
    waist: float | None = None

    def __post_init__(self):
        for name in ("length", "wavelength", "kappa_c"):
            if not getattr(self, name) > 0:
                raise DomainError(f"{name} must be positive, got {getattr(self, name)!r}")
        if self.length < 10 * self.wavelength:
            raise DomainError("cavity length must exceed ten wavelengths")
        if self.waist is not None and not self.waist > 0:
            raise DomainError(f"waist must be positive, got {self.waist!r}")

    @property
    def wavenumber(self):
        return 2 * pi / self.wavelength

    @property
    def omega_cav(self):
        return 2 * pi * c / self.wavelength


@dataclass(frozen=True)
class BeamGeometry:
    waist: float
    rayleigh_range: float
    wavenumber: float

    def width(self, x):
        """1/e^2 intensity radius w(x) at distance ``x`` from the waist."""
        return self.waist * np.sqrt(1.0 + (np.asarray(x) / self.rayleigh_range) ** 2)


@dataclass(frozen=True)
class CouplingPoint:
    x0: float
    kappa_e: float
    dkappa_dx: float
    area_eff: float
    eta_kappa: float
    eta_product: float


def beam_waist(spec, min_rayleigh_fraction=0.1):
    """Beam geometry of the fundamental mode of ``spec``.

    Without an explicit waist, the near-confocal value ``sqrt(lambda L / 2 pi)``
    is used, for which the Rayleigh range equals ``L / 2``. A Rayleigh range
    below ``min_rayleigh_fraction * L / 2`` is rejected as geometrically
    inconsistent with a stable cavity of this length.
    """
    if spec.waist is not None:
        w0 = spec.waist
    else:
        w0 = np.sqrt(spec.wavelength * spec.length / (2 * pi))
    z_r = pi * w0**2 / spec.wavelength
    if z_r < min_rayleigh_fraction * spec.length / 2:
        raise DomainError(
            f"Rayleigh range {z_r:.3g} m is far below L/2 = {spec.length / 2:.3g} m; "
            "the waist is inconsistent with the cavity length"
        )
    return BeamGeometry(waist=w0, rayleigh_range=z_r, wavenumber=spec.wavenumber)


def energy_density(geom, x, r):
    """Cycle-averaged energy density relative to the on-axis antinode peak."""
    w = geom.width(x)
    return (
        np.sin(geom.wavenumber * np.asarray(x)) ** 2
        * (geom.waist / w) ** 2
        * np.exp(-2 * np.asarray(r) ** 2 / w**2)
    )


def effective_area(geom, x):
    """Transverse integral of the energy density over its on-axis value: pi w(x)^2 / 2."""
    return pi * geom.width(x) ** 2 / 2


def fermi_factor(temperature, chemical_potential, photon_energy):
    """Occupation difference f(E_v) - f(E_c) of the vertical transition at ``photon_energy``.

    The transition links E_v = -hbar w / 2 and E_c = +hbar w / 2 about the
    Dirac point. ``chemical_potential`` is measured from the Dirac point, in J.
    """
    if not photon_energy > 0:
        raise DomainError(f"photon energy must be positive, got {photon_energy!r}")
    if not temperature >= 0:
        raise DomainError(f"temperature must be >= 0, got {temperature!r}")
    e_c, e_v = photon_energy / 2, -photon_energy / 2
    if temperature == 0:
        def occ(e):
            return 1.0 if e < chemical_potential else (0.5 if e == chemical_potential else 0.0)
    else:
        kt = k_B * temperature

        def occ(e):
            return float(expit(-(e - chemical_potential) / kt))
    return occ(e_v) - occ(e_c)


def undoped_fermi_factor(spec, temperature=0.0):
    return fermi_factor(temperature, 0.0, hbar * spec.omega_cav)


def _check_position(spec, x0):
    if np.any(np.abs(x0) > spec.length / 2):
        raise DomainError(f"x0 must satisfy |x0| <= L/2 = {spec.length / 2!r}")


def _mode_integral(spec):
    # integral of sin^2(kx) over [-L/2, L/2]; equals L/2 when L is a multiple of lambda/2
    k = spec.wavenumber
    return spec.length / 2 - np.sin(k * spec.length) / (2 * k)


def absorption_prefactor(spec, geom, fermi=1.0):
    """Amplitude decay rate of an absorber at the on-axis antinode (rad/s)."""
    # W_max * A_eff = pi alpha c f u_peak sin^2 (w0/w)^2 * pi w^2 / 2; the waist
    # factors cancel against the stored energy (pi w0^2 / 2) u_peak * mode_integral.
    return fermi * UNIVERSAL_ABSORBANCE * c / (2 * _mode_integral(spec))


def absorption_rate(spec, geom, x0, fermi=1.0):
    """Absorptive amplitude decay rate kappa_e(x0) of the cavity mode in rad/s.

    This is the absorbed power ``W_max * A_eff`` divided by twice the stored
    energy. For a cavity whose length is a multiple of half a wavelength it
    reduces to ``fermi * pi * alpha * (c / L) * sin^2(k x0)``.
    """
    _check_position(spec, x0)
    if not 0 <= fermi <= 1:
        raise DomainError(f"fermi factor must lie in [0, 1], got {fermi!r}")
    return absorption_prefactor(spec, geom, fermi) * np.sin(geom.wavenumber * np.asarray(x0)) ** 2


def coupling_eta(spec, geom, x0, x_zpf, fermi=1.0, node_floor=NODE_FLOOR):
    """Dissipative coupling at ``x0``.

    Returns ``(eta_kappa, eta_product)`` where ``eta_product`` is
    ``x_zpf * d sqrt(2 kappa_e)/dx``. The square root is taken with the sign
    of the field amplitude ``sin(k x0)``, which keeps ``eta_product`` smooth
    through the nodes; ``eta_kappa = x_zpf * k * cot(k x0)`` itself diverges
    there and raises :class:`SingularityError` once ``|sin(k x0)|`` falls below
    ``node_floor``.

    The transverse waist growth drops out of ``kappa_e`` (see
    :func:`absorption_rate`), so there is no waist-variation contribution.
    """
    _check_position(spec, x0)
    k = geom.wavenumber
    amp = np.sqrt(2 * absorption_prefactor(spec, geom, fermi))
    eta_product = x_zpf * amp * k * np.cos(k * x0)
    s = np.sin(k * x0)
    if abs(s) < node_floor:
        raise SingularityError(f"eta_kappa is singular at the field node (x0={x0!r})")
    return x_zpf * k * np.cos(k * x0) / s, eta_product


def coupling_point(spec, geom, x0, x_zpf, fermi=1.0, node_floor=NODE_FLOOR):
    kappa_e = absorption_rate(spec, geom, x0, fermi)
    k = geom.wavenumber
    dk_dx = absorption_prefactor(spec, geom, fermi) * k * np.sin(2 * k * x0)
    try:
        eta, product = coupling_eta(spec, geom, x0, x_zpf, fermi, node_floor)
    except SingularityError:
        eta = float("nan")
        product = x_zpf * np.sqrt(2 * absorption_prefactor(spec, geom, fermi)) * k * np.cos(k * x0)
    return CouplingPoint(
        x0=float(x0),
        kappa_e=float(kappa_e),
        dkappa_dx=float(dk_dx),
        area_eff=float(effective_area(geom, x0)),
        eta_kappa=float(eta),
        eta_product=float(product),
    )


def coupling_profile(spec, geom, x_zpf, x_range=None, n_points=201, fermi=1.0):
    """Sample :class:`CouplingPoint` records on a uniform grid of positions.

    ``x_range`` defaults to one node-to-node interval ``[0, lambda/2]``.
    """
    if n_points < 2:
        raise DomainError("n_points must be at least 2")
    lo, hi = x_range if x_range is not None else (0.0, spec.wavelength / 2)
    if not lo < hi:
        raise DomainError("x_range must be increasing")
    return [coupling_point(spec, geom, x, x_zpf, fermi) for x in np.linspace(lo, hi, n_points)]


def position_for_kappa(spec, geom, kappa_e, fermi=1.0):
    """Smallest positive displacement from the node with absorption rate ``kappa_e``."""
    peak = absorption_prefactor(spec, geom, fermi)
    if not 0 < kappa_e <= peak:
        raise DomainError(f"kappa_e must lie in (0, {peak:.4g}] rad/s")
    quarter = spec.wavelength / 4
    return brentq(lambda x: absorption_rate(spec, geom, x, fermi) - kappa_e, 0.0, quarter, xtol=1e-22, rtol=1e-15)


PROFILE_COLUMNS = ("x0_m", "kappa_e_rad_s", "eta_kappa", "eta_sqrt2ke", "A_eff_m2")


def profile_rows(points):
    return [(p.x0, p.kappa_e, p.eta_kappa, p.eta_product, p.area_eff) for p in points]


def write_profile_csv(path, points):
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(PROFILE_COLUMNS)
        writer.writerows(profile_rows(points))
