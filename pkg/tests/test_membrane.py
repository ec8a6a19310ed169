import math

import numpy as np
import pytest
from scipy.constants import hbar

from grapheneopto.errors import DomainError
from grapheneopto.membrane import (
    MembraneSpec, effective_mass, fundamental_frequency, mechanical_mode, thermal_occupancy, zero_point_amplitude,
)
from grapheneopto.units import hz


def test_default_frequency_near_55_mhz():
    w = fundamental_frequency(MembraneSpec())
    assert w == pytest.approx(hz(55e6), rel=0.02)


def test_frequency_formula_by_hand():
    s = MembraneSpec()
    expected = 2 * math.pi * 0.766 * math.sqrt(340 * 0.01 / 7.4e-7) / 30e-6
    assert fundamental_frequency(s) == pytest.approx(expected, rel=1e-14)


@pytest.mark.parametrize("factor", [0.5, 2.0, 3.0])
def test_frequency_scales_inverse_with_diameter(factor):
    base = MembraneSpec()
    scaled = MembraneSpec(diameter=base.diameter * factor)
    assert fundamental_frequency(scaled) * factor == pytest.approx(fundamental_frequency(base), rel=1e-14)


def test_ten_micron_is_three_times_thirty():
    assert fundamental_frequency(MembraneSpec(diameter=10e-6)) == pytest.approx(
        3 * fundamental_frequency(MembraneSpec()), rel=1e-14)


def test_effective_mass():
    s = MembraneSpec()
    assert effective_mass(s) == pytest.approx(1.41e-16, rel=0.01)
    assert effective_mass(s) / (s.areal_density * s.area) == pytest.approx(0.27)


def test_zero_point_closes_exactly():
    mode = mechanical_mode(MembraneSpec())
    assert mode.x_zpf == pytest.approx(3.3e-14, rel=0.02)
    assert mode.x_zpf**2 * 2 * mode.m_eff * mode.omega_m == pytest.approx(hbar, rel=1e-14)


def test_thermal_occupancy_anchor():
    assert thermal_occupancy(0.26, hz(55e6)) == pytest.approx(100, rel=0.05)


def test_thermal_occupancy_zero_temperature_is_exact():
    assert thermal_occupancy(0.0, hz(55e6)) == 0.0
    assert mechanical_mode(MembraneSpec(temperature=0.0)).n_th == 0.0


def test_thermal_occupancy_high_temperature_limit():
    from scipy.constants import k as k_B
    T, w = 300.0, hz(55e6)
    assert thermal_occupancy(T, w) == pytest.approx(k_B * T / (hbar * w) - 0.5, rel=1e-6)


@pytest.mark.parametrize("field,value", [
    ("diameter", -1e-6), ("diameter", 0.0), ("stiffness2d", 0.0), ("areal_density", -1.0),
    ("strain", 1e-5), ("strain", 0.2), ("intrinsic_damping", -1.0), ("temperature", -0.1),
])
def test_spec_rejects_out_of_domain(field, value):
    with pytest.raises(DomainError, match=field):
        MembraneSpec(**{field: value})


def test_strain_bounds_inclusive():
    MembraneSpec(strain=1e-4)
    MembraneSpec(strain=0.1)


def test_bad_oscillator_arguments():
    with pytest.raises(DomainError):
        zero_point_amplitude(0.0, 1e-16)
    with pytest.raises(DomainError):
        thermal_occupancy(1.0, -1.0)
    with pytest.raises(DomainError):
        thermal_occupancy(-1.0, 1.0)


def test_mode_fields_positive():
    mode = mechanical_mode(MembraneSpec())
    assert all(v > 0 for v in (mode.omega_m, mode.m_eff, mode.x_zpf, mode.n_th))
    assert np.isfinite(mode.n_th)
