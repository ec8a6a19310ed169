"""Linearised quantum Langevin dynamics in the frequency domain.

Fluctuations around the mean field obey a linear system in the four
amplitudes ``(a, a+, b, b+)`` driven by six white-noise inputs
``(a_in, a_in+, s_in, s_in+, b_in, b_in+)``; ``+`` marks the conjugate-mode
amplitude ``x+(w) = [x(-w)]^dagger``. Two routes lead to the steady-state
phonon number:

* the closed-form weak-coupling result (optical spring plus a three-term
  occupancy formula), and
* a brute-force route that solves the full 4x4 system on a frequency grid
  and integrates the phonon noise spectrum.

The second route is the independent check of the first.
"""
import logging
import warnings
from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import trapezoid

from .errors import ConvergenceError, DomainError, InstabilityError, SingularityError, ValidityWarning, WeakCouplingError
from .response import DriveSpec, effective_couplings, steady_state, validity_ratio

log = logging.getLogger(__name__)

WEAK_COUPLING_THRESHOLD = 0.01
SPRING_VALIDITY_RATIO = 1e3

#: Column order of the noise inputs in :func:`build_linear_system`.
INPUTS = ("a_in", "a_in+", "s_in", "s_in+", "b_in", "b_in+")
#: Order of the coefficients returned by :func:`weak_coupling_b`.
WEAK_INPUTS = ("b_in", "s_in", "s_in+", "a_in", "a_in+")


@dataclass(frozen=True)
class LinearizedSystem:
    detuning: float
    kappa_c: float
    kappa_e: float
    omega_m: float
    gamma_m: float
    n_th: float
    G: complex
    G_e: complex
    E: complex
    sigma_bar: complex
    abar: complex
    eta_kappa: float
    x_zpf: float = float("nan")
    weak_coupling_threshold: float = WEAK_COUPLING_THRESHOLD

    @property
    def kappa(self):
        return self.kappa_c + self.kappa_e

    @property
    def weak_coupling(self):
        limit = self.weak_coupling_threshold * self.kappa
        return abs(self.G) <= limit and abs(self.G_e) <= limit


@dataclass(frozen=True)
class OpticalSpring:
    omega_o: float
    gamma_o: float
    omega_eff: float
    gamma_eff: float


@dataclass(frozen=True)
class PhononResult:
    n_ss: float
    term_thermal: float
    term_sigma_noise: float
    term_light_noise: float


@dataclass(frozen=True)
class SpectrumGrid:
    """Frequency grid for the spectrum integral.

    A tangent-mapped core of ``core_points`` nodes covers ``+-core_halfwidth``
    effective linewidths around the mechanical resonance; log-spaced tails of
    ``tail_points`` nodes each extend to ``span`` total cavity linewidths
    beyond the cavity and mechanical frequencies. Point counts double on each
    refinement until the integral moves by less than ``rel_tol``.
    """

    core_points: int = 2048
    tail_points: int = 1024
    core_halfwidth: float = 50.0
    span: float = 10.0
    rel_tol: float = 5e-3
    max_refinements: int = 4


@dataclass(frozen=True)
class SpectrumResult:
    omega: np.ndarray
    S_nm: np.ndarray
    integrated_n: float
    previous_n: float
    n_points: int
    refinements: int
    correlators: dict = field(default_factory=dict)


def linearize(params, power, detuning, threshold=WEAK_COUPLING_THRESHOLD):
    """Solve the mean field for one drive and collect the linearised coefficients."""
    drive = DriveSpec.from_power(power, detuning, params.kappa_c, params.omega_cav)
    ss = steady_state(drive, params.kappa_c, params.kappa_e, params.area_ratio, params.fermi_velocity_ratio)
    cp = effective_couplings(ss, params.eta_kappa, params.kappa_e, params.area_ratio, params.fermi_velocity_ratio)
    return LinearizedSystem(
        detuning=detuning, kappa_c=params.kappa_c, kappa_e=params.kappa_e,
        omega_m=params.omega_m, gamma_m=params.gamma_m, n_th=params.n_th,
        G=cp.G, G_e=cp.G_e, E=drive.amplitude, sigma_bar=ss.sigma_bar, abar=ss.abar,
        eta_kappa=params.eta_kappa, x_zpf=params.x_zpf, weak_coupling_threshold=threshold,
    )


def spring_rates(E, sigma_bar, detuning, kappa_e, kappa, eta_kappa, omega):
    """Optically induced frequency shift and damping ``(omega_o, gamma_o)``.

    Valid while ``|E| >> sqrt(2 kappa_e) |sigma_bar|``. Broadcasts over array
    inputs.
    """
    E = np.asarray(E, dtype=complex)
    sigma_bar = np.asarray(sigma_bar, dtype=complex)
    bracket = (E * np.conj(sigma_bar) / ((-1j * omega - 1j * detuning + kappa) * (-1j * detuning + kappa))
               - np.conj(E) * sigma_bar / ((-1j * omega + 1j * detuning + kappa) * (1j * detuning + kappa)))
    pref = (2 * np.asarray(kappa_e)) ** 1.5 * eta_kappa**2
    return pref * bracket.imag, pref * bracket.real


def optical_spring(sys, omega_eval=None):
    """Renormalised mechanical frequency and damping at ``omega_eval`` (default ``omega_m``)."""
    omega = sys.omega_m if omega_eval is None else omega_eval
    if not omega > 0:
        raise DomainError("omega_eval must be positive")
    ratio = validity_ratio(sys.E, sys.kappa_e, sys.sigma_bar)
    if ratio < SPRING_VALIDITY_RATIO:
        warnings.warn(f"|E|/(sqrt(2 kappa_e)|sigma|) = {ratio:.3g} < {SPRING_VALIDITY_RATIO:g}; "
                      "optical spring formula is outside its validity range", ValidityWarning, stacklevel=2)
    omega_o, gamma_o = spring_rates(sys.E, sys.sigma_bar, sys.detuning, sys.kappa_e, sys.kappa,
                                    sys.eta_kappa, omega)
    omega_o, gamma_o = float(omega_o), float(gamma_o)
    return OpticalSpring(omega_o=omega_o, gamma_o=gamma_o,
                         omega_eff=sys.omega_m + omega_o, gamma_eff=sys.gamma_m + gamma_o)


def coupling_square(z, square="modulus"):
    """``|z|^2`` (default) or ``Re(z^2)`` for the sensitivity study of complex couplings."""
    z = np.asarray(z, dtype=complex)
    if square == "modulus":
        return np.abs(z) ** 2
    if square == "complex":
        return (z * z).real
    raise ValueError(f"unknown square mode {square!r}")


def phonon_terms(n_th, gamma_m, gamma_eff, G2, Ge2, kappa_c, kappa_e, detuning, omega_lorentz):
    """The three addends of the weak-coupling occupancy, broadcasting over arrays.

    ``G2`` and ``Ge2`` are the already-squared couplings.
    """
    kappa = kappa_c + kappa_e
    kappa_e = np.asarray(kappa_e, dtype=float)
    thermal = gamma_m * n_th / gamma_eff
    with np.errstate(divide="ignore", invalid="ignore"):
        # G carries a factor kappa_e, so |G|^2 / kappa_e -> 0 as kappa_e -> 0
        sigma = np.where(kappa_e > 0, G2 / (4 * np.where(kappa_e > 0, kappa_e, 1.0) * gamma_eff), 0.0)
    s = gamma_eff + kappa
    light = s * kappa_c * Ge2 / (gamma_eff * kappa * (s**2 + (detuning + omega_lorentz) ** 2))
    return thermal, sigma, light


def phonon_number_analytic(sys, spring, square="modulus", renormalized_lorentzian=True, check=True):
    """Steady-state phonon number in the weak-coupling regime.

    Parameters
    ----------
    sys : LinearizedSystem
    spring : OpticalSpring
    square : {"modulus", "complex"}
        How the complex couplings enter: ``|G|^2`` or ``Re(G^2)``.
    renormalized_lorentzian : bool
        Use ``omega_m + omega_o`` (default) or the bare ``omega_m`` in the
        light-noise Lorentzian.
    check : bool
        Enforce the weak-coupling guard.

    Raises
    ------
    InstabilityError
        If the effective damping is not positive.
    WeakCouplingError
        If ``check`` and the weak-coupling guard fails.
    """
    if not spring.gamma_eff > 0:
        raise InstabilityError(f"effective damping {spring.gamma_eff:.4g} rad/s is not positive")
    if check and not sys.weak_coupling:
        raise WeakCouplingError(
            f"|G|={abs(sys.G):.3g}, |G_e|={abs(sys.G_e):.3g} exceed "
            f"{sys.weak_coupling_threshold:g} * kappa = {sys.weak_coupling_threshold * sys.kappa:.3g}")
    omega_l = spring.omega_eff if renormalized_lorentzian else sys.omega_m
    t1, t2, t3 = (float(t) for t in phonon_terms(
        sys.n_th, sys.gamma_m, spring.gamma_eff, coupling_square(sys.G, square), coupling_square(sys.G_e, square),
        sys.kappa_c, sys.kappa_e, sys.detuning, omega_l))
    return PhononResult(n_ss=t1 + t2 + t3, term_thermal=t1, term_sigma_noise=t2, term_light_noise=t3)


def build_linear_system(sys, omega):
    """Coefficient and input matrices of the linearised equations at ``omega``.

    Returns ``(M, B)`` with shapes ``(..., 4, 4)`` and ``(..., 4, 6)`` such
    that ``M @ (a, a+, b, b+) = B @ inputs`` with inputs ordered as
    :data:`INPUTS`. The mechanical force from the absorption noise carries
    the coupling ``eta_kappa``, as the nonlinear equation of motion implies.
    """
    w = np.asarray(omega, dtype=float)
    shape = w.shape
    G, Ge = sys.G, sys.G_e
    Gc, Gec = np.conj(G), np.conj(Ge)
    M = np.zeros(shape + (4, 4), dtype=complex)
    M[..., 0, 0] = -1j * w + 1j * sys.detuning + sys.kappa
    M[..., 0, 2] = G
    M[..., 0, 3] = G
    M[..., 1, 1] = -1j * w - 1j * sys.detuning + sys.kappa
    M[..., 1, 2] = Gc
    M[..., 1, 3] = Gc
    M[..., 2, 2] = -1j * w + 1j * sys.omega_m + sys.gamma_m
    M[..., 2, 0] = Gec
    M[..., 2, 1] = -Ge
    M[..., 3, 3] = -1j * w - 1j * sys.omega_m + sys.gamma_m
    M[..., 3, 0] = -Gec
    M[..., 3, 1] = Ge

    rc, re, rg = np.sqrt(2 * sys.kappa_c), np.sqrt(2 * sys.kappa_e), np.sqrt(2 * sys.gamma_m)
    force = re * sys.eta_kappa
    abar = sys.abar
    B = np.zeros(shape + (4, 6), dtype=complex)
    B[..., 0, 0] = rc
    B[..., 0, 2] = re
    B[..., 1, 1] = rc
    B[..., 1, 3] = re
    B[..., 2, 2] = force * np.conj(abar)
    B[..., 2, 3] = -force * abar
    B[..., 2, 4] = rg
    B[..., 3, 2] = -force * np.conj(abar)
    B[..., 3, 3] = force * abar
    B[..., 3, 5] = rg
    return M, B


def transfer_matrix(sys, omega):
    """Full solution ``M^-1 B``: response of each amplitude to each input."""
    M, B = build_linear_system(sys, omega)
    try:
        return np.linalg.solve(M, B)
    except np.linalg.LinAlgError as exc:
        raise SingularityError("linear system is singular at the requested frequency") from exc


def weak_coupling_b(sys, spring, omega):
    """Weak-coupling transfer coefficients of ``b(omega)``, ordered as :data:`WEAK_INPUTS`."""
    if not spring.gamma_eff > 0:
        raise InstabilityError(f"effective damping {spring.gamma_eff:.4g} rad/s is not positive")
    if not sys.weak_coupling:
        raise WeakCouplingError("weak-coupling guard failed")
    w = np.asarray(omega, dtype=float)
    chi = 1.0 / (-1j * w + 1j * spring.omega_eff + spring.gamma_eff)
    re = np.sqrt(2 * sys.kappa_e)
    rc = np.sqrt(2 * sys.kappa_c)
    kappa = sys.kappa
    if re > 0:
        s_in, s_in_dag = np.conj(sys.G) / re * chi, -sys.G / re * chi
    else:
        s_in = s_in_dag = np.zeros_like(chi)
    a_in = -np.conj(sys.G_e) * rc * chi / (-1j * w + 1j * sys.detuning + kappa)
    a_in_dag = sys.G_e * rc * chi / (-1j * w - 1j * sys.detuning + kappa)
    b_in = np.sqrt(2 * sys.gamma_m) * chi
    return np.stack(np.broadcast_arrays(b_in, s_in, s_in_dag, a_in, a_in_dag), axis=-1)


def noise_weights(n_th):
    """Normally ordered occupations <x+ x> picked out by <b+ b>, per input in :data:`INPUTS`.

    Optical and absorption inputs are vacuum; the mechanical bath is thermal.
    """
    return np.array([0.0, 1.0, 0.0, 1.0, n_th, n_th + 1.0])


def correlator_table(n_th):
    return {
        "<a_in a_in+>": 1.0, "<a_in+ a_in>": 0.0,
        "<s_in s_in+>": 1.0, "<s_in+ s_in>": 0.0,
        "<b_in b_in+>": n_th + 1.0, "<b_in+ b_in>": float(n_th),
    }


def phonon_spectrum(sys, omega):
    """Phonon noise spectrum S_nm(omega); ``<b+ b> = (1/2 pi) \\int S_nm d omega``."""
    coeff = transfer_matrix(sys, omega)[..., 2, :]
    return np.abs(coeff) ** 2 @ noise_weights(sys.n_th)


def _grid(sys, center, width, cfg, scale):
    n_core = cfg.core_points * scale
    n_tail = cfg.tail_points * scale
    theta_max = np.arctan(cfg.core_halfwidth)
    theta = np.linspace(-theta_max, theta_max, n_core)
    core = (center + width * np.tan(theta), width / np.cos(theta) ** 2, theta)

    u0 = cfg.core_halfwidth * width
    reach = abs(center) + abs(sys.detuning) + cfg.span * sys.kappa
    u1 = max(reach, 10 * u0)
    s = np.linspace(np.log(u0), np.log(u1), n_tail)
    u = np.exp(s)
    upper = (center + u, u, s)
    lower = (center - u, u, s)
    return core, upper, lower


def _integrate(sys, center, width, cfg, scale):
    total = 0.0
    omegas, values = [], []
    for w, jac, var in _grid(sys, center, width, cfg, scale):
        S = phonon_spectrum(sys, w)
        total += trapezoid(S * jac, var)
        omegas.append(w)
        values.append(S)
    omega = np.concatenate(omegas)
    S = np.concatenate(values)
    order = np.argsort(omega, kind="stable")
    return total / (2 * np.pi), omega[order], S[order]


def spectrum_oracle(sys, grid=SpectrumGrid(), spring=None):
    """Integrate the full-system phonon spectrum to the steady-state occupancy.

    The grid is centred on the renormalised resonance taken from ``spring``
    (computed if absent); the integral itself does not depend on that
    estimate beyond grid placement.

    Raises
    ------
    InstabilityError
        If the effective damping is not positive.
    ConvergenceError
        If successive refinements keep moving the integral by more than
        ``grid.rel_tol``.
    """
    if spring is None:
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", ValidityWarning)
            spring = optical_spring(sys)
    if not spring.gamma_eff > 0:
        raise InstabilityError(f"effective damping {spring.gamma_eff:.4g} rad/s is not positive")
    center, width = spring.omega_eff, spring.gamma_eff
    prev, _, _ = _integrate(sys, center, width, grid, 1)
    scale = 1
    for refinement in range(1, grid.max_refinements + 1):
        scale *= 2
        n, omega, S = _integrate(sys, center, width, grid, scale)
        if abs(n - prev) <= grid.rel_tol * abs(n) + 1e-12:
            log.debug("spectrum converged after %d refinements: n=%.6g", refinement, n)
            return SpectrumResult(omega=omega, S_nm=S, integrated_n=float(n), previous_n=float(prev),
                                  n_points=omega.size, refinements=refinement,
                                  correlators=correlator_table(sys.n_th))
        prev = n
    raise ConvergenceError(f"spectrum integral did not stabilise within {grid.max_refinements} refinements")
