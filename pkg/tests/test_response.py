import math
import warnings

import numpy as np
import pytest
from scipy.constants import hbar

from grapheneopto.errors import ConvergenceError, DomainError, ValidityWarning
from grapheneopto.model import ModelParameters
from grapheneopto.response import (
    DriveSpec, effective_couplings, eq9_residual, pump_amplitude, sigma_response, solve_mean_field,
    steady_state, validity_ratio,
)
from grapheneopto.units import hz


def _drive(p, power, delta):
    return DriveSpec.from_power(power, delta, p.kappa_c, p.omega_cav)


def test_pump_amplitude_definition(fig3):
    E = pump_amplitude(5e-6, fig3.kappa_c, fig3.omega_cav)
    assert E == pytest.approx(math.sqrt(2 * 5e-6 * fig3.kappa_c / (hbar * fig3.omega_cav)))
    assert E == pytest.approx(1.4e10, rel=0.05)


def test_pump_zero_power_gives_zero_amplitude(fig3):
    assert pump_amplitude(0.0, fig3.kappa_c, fig3.omega_cav) == 0.0


def test_negative_power_rejected(fig3):
    with pytest.raises(DomainError):
        _drive(fig3, -1.0, 0.0)


def test_high_power_warns(fig3):
    with pytest.warns(ValidityWarning):
        _drive(fig3, 2e-3, 0.0)


def test_drive_pump_frequency_convention(fig3):
    d = _drive(fig3, 1e-6, -fig3.omega_m)
    assert d.pump_frequency == pytest.approx(fig3.omega_cav + fig3.omega_m)


def test_sigma_response_formula():
    s = sigma_response(2.0 + 1j, hz(45e6), 0.1, 1 / 300)
    assert s == pytest.approx(-0.125 * math.sqrt(2 * hz(45e6)) * (1 / 300) ** 2 * 0.1 * 5.0)


def test_sigma_response_domain():
    with pytest.raises(DomainError):
        sigma_response(1.0, -1.0, 0.1)
    with pytest.raises(DomainError):
        sigma_response(1.0, 1.0, 0.0)
    with pytest.raises(DomainError):
        sigma_response(1.0, 1.0, 1.5)


def test_fig3_steady_state(fig3):
    ss = steady_state(_drive(fig3, 5e-6, 0.0), fig3.kappa_c, fig3.kappa_e, fig3.area_ratio)
    assert ss.converged
    assert ss.residual <= 1e-12
    assert ss.sigma_bar.real < 0 and ss.sigma_bar.imag == 0
    assert ss.sigma_bar.real == pytest.approx(-0.75, rel=0.1)


@pytest.mark.parametrize("delta_over_wm", [-2, -1, 0, 0.5, 2])
@pytest.mark.parametrize("power", [1e-9, 1e-6, 1e-4, 1e-3])
def test_residual_tiny(fig4, power, delta_over_wm):
    p = fig4
    ss = steady_state(_drive(p, power, delta_over_wm * p.omega_m), p.kappa_c, p.kappa_e, p.area_ratio)
    assert ss.residual <= 1e-12


def test_zero_kappa_e_reduces_to_empty_cavity(fig3):
    d = _drive(fig3, 1e-6, 0.3 * fig3.omega_m)
    ss = steady_state(d, fig3.kappa_c, 0.0, fig3.area_ratio)
    assert ss.sigma_bar == 0
    assert ss.abar == pytest.approx(d.amplitude / (1j * d.detuning + fig3.kappa_c))


def test_nonconvergence_raises(fig3):
    with pytest.raises(ConvergenceError):
        steady_state(_drive(fig3, 1e-6, 0.0), fig3.kappa_c, fig3.kappa_e, fig3.area_ratio, max_iter=1)


def test_vectorised_solve_matches_scalar(fig4):
    p = fig4
    powers = np.array([1e-9, 1e-6, 1e-3])
    deltas = np.array([-p.omega_m, 0.0, 0.7 * p.omega_m])
    E = pump_amplitude(powers, p.kappa_c, p.omega_cav - deltas)
    abar, sigma, _, done = solve_mean_field(E, deltas, p.kappa_c, p.kappa_e, p.area_ratio)
    assert done.all()
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", ValidityWarning)
        for i in range(3):
            ss = steady_state(_drive(p, powers[i], deltas[i]), p.kappa_c, p.kappa_e, p.area_ratio)
            assert abar[i] == pytest.approx(ss.abar, rel=1e-12)
            assert sigma[i] == pytest.approx(ss.sigma_bar, rel=1e-12)


def test_validity_ratio(fig3):
    d = _drive(fig3, 5e-6, 0.0)
    ss = steady_state(d, fig3.kappa_c, fig3.kappa_e, fig3.area_ratio)
    r = validity_ratio(d.amplitude, fig3.kappa_e, ss.sigma_bar)
    assert r > 1e3
    assert validity_ratio(1.0, 0.0, 0.0) == math.inf


def test_effective_couplings(fig3):
    d = _drive(fig3, 5e-6, 0.0)
    ss = steady_state(d, fig3.kappa_c, fig3.kappa_e, fig3.area_ratio)
    cp = effective_couplings(ss, fig3.eta_kappa, fig3.kappa_e)
    root = math.sqrt(2 * fig3.kappa_e)
    assert cp.G == pytest.approx((2 * ss.abar * fig3.kappa_e - root * ss.sigma_bar) * fig3.eta_kappa)
    assert cp.G_e == pytest.approx(root * ss.sigma_bar * fig3.eta_kappa)


def test_eq9_residual_zero_for_exact_solution():
    E, delta, kc, ke = 3.0 + 0j, 1.0, 2.0, 0.5
    abar = E / (1j * delta + kc + ke)
    assert eq9_residual(abar, 0.0, E, delta, kc, ke) == pytest.approx(0, abs=1e-15)


def test_model_presets():
    assert ModelParameters.figure3().area_ratio == 0.01
    assert ModelParameters.figure4().area_ratio == 0.1
    with pytest.raises(DomainError):
        ModelParameters(area_ratio=0.0)
    with pytest.raises(DomainError):
        ModelParameters(omega_m=-1.0)
