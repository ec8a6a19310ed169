import numpy as np
import pytest

from grapheneopto.cavity import CavitySpec
from grapheneopto.errors import DomainError
from grapheneopto.langevin import linearize, optical_spring, phonon_number_analytic
from grapheneopto.membrane import MembraneSpec
from grapheneopto.model import ModelParameters
from grapheneopto.sweep import (
    FIG3_COLUMNS, AxisSpec, SweepConfig, cooling_peak, coupling_scan, detuning_scan, evaluate, fig3_rows,
    optimal_cooling, phonon_map, write_csv,
)


def test_axis_validation():
    with pytest.raises(DomainError):
        AxisSpec("temperature", 0, 1, 3)
    with pytest.raises(DomainError):
        AxisSpec("power", 1, 0, 3)
    with pytest.raises(DomainError):
        AxisSpec("power", 0, 1, 3, "log")
    assert AxisSpec("power", 1e-9, 1e-3, 7, "log").values()[3] == pytest.approx(1e-6)


def test_vectorised_matches_scalar(fig4):
    d = np.array([-fig4.omega_m, 0.5 * fig4.omega_m])
    out = evaluate(fig4, 1e-9, d)
    for i, delta in enumerate(d):
        sys = linearize(fig4, 1e-9, delta)
        res = phonon_number_analytic(sys, optical_spring(sys))
        assert out["n_ss"][i] == pytest.approx(res.n_ss, rel=1e-12)


def test_detuning_scan_has_both_signs(fig3):
    scan = detuning_scan(SweepConfig(params=fig3))
    assert (scan["gamma_o"] > 0).any() and (scan["gamma_o"] < 0).any()


def test_peak_moves_with_kappa_e(fig3):
    wm = fig3.omega_m
    a = cooling_peak(detuning_scan(SweepConfig(params=fig3.with_(kappa_e=0.5 * wm))))
    b = cooling_peak(detuning_scan(SweepConfig(params=fig3.with_(kappa_e=2 * wm))))
    assert abs(a - b) > 0.1 * wm


def test_scans_are_deterministic(fig3):
    a = detuning_scan(SweepConfig(params=fig3))
    b = detuning_scan(SweepConfig(params=fig3))
    assert np.array_equal(a["gamma_o"], b["gamma_o"])


def test_phonon_map_shape_and_flags(fig4):
    cfg = SweepConfig(params=fig4, power=AxisSpec("power", 1e-9, 1e-3, 8, "log"))
    pm = phonon_map(cfg)
    assert pm.n_ss.shape == (8, 201)
    assert np.all(np.isnan(pm.n_ss[~pm.stable]))
    assert pm.valid.any()


def test_optimal_cooling_threads_identical(fig4):
    ke = np.array([0.5, 1.0]) * fig4.omega_m
    serial = optimal_cooling(SweepConfig(params=fig4, threads=1), ke)
    parallel = optimal_cooling(SweepConfig(params=fig4, threads=2), ke)
    assert serial == parallel


def test_optimum_not_worse_than_coarse(fig4):
    for rec in optimal_cooling(SweepConfig(params=fig4), np.array([0.3, 1.0, 3.0]) * fig4.omega_m):
        assert rec.n_min <= rec.n_coarse
        assert rec.power <= 1e-3 * (1 + 1e-12)
        assert -3 * fig4.omega_m <= rec.detuning <= 0


def test_optimum_is_local_minimum(fig4):
    rec = optimal_cooling(SweepConfig(params=fig4), [fig4.omega_m])[0]
    p = fig4.with_(kappa_e=rec.kappa_e)
    for dd, pp in ((0.01, 1.0), (-0.01, 1.0), (0.0, 1.05), (0.0, 0.95)):
        delta = min(rec.detuning + dd * fig4.omega_m, 0.0)
        power = min(rec.power * pp, 1e-3)
        if not 1e-9 <= power:
            continue
        out = evaluate(p, power, delta)
        if out["weak"] and out["stable"]:
            assert float(out["n_ss"]) >= rec.n_min * (1 - 1e-4)


def test_coupling_scan_rows():
    rows = coupling_scan(MembraneSpec(), CavitySpec(), AxisSpec("x0", 0.0, 300e-9, 11),
                         [10e-6, 30e-6])
    assert len(rows) == 22
    assert rows[0][2] == 0.0


def test_csv_header_stable(tmp_path, fig3):
    scan = detuning_scan(SweepConfig(params=fig3))
    for name in ("a.csv", "b.csv"):
        write_csv(tmp_path / name, FIG3_COLUMNS, fig3_rows(scan), "c")
    assert (tmp_path / "a.csv").read_bytes() == (tmp_path / "b.csv").read_bytes()
    assert (tmp_path / "a.csv").read_text().splitlines()[1] == ",".join(FIG3_COLUMNS)


def test_default_sweep_axes(fig4):
    cfg = SweepConfig(params=fig4)
    assert cfg.detuning_axis().count == 201
    assert cfg.optimal_detuning_axis().maximum == 0.0
    assert cfg.kappa_e_axis().scale == "log"
    assert isinstance(cfg.params, ModelParameters)
