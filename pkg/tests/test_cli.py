import csv
import json

import pytest

from grapheneopto.cli import main


def _rows(path):
    lines = [ln for ln in path.read_text().splitlines() if not ln.startswith("#")]
    return list(csv.reader(lines))


def test_coupling_first_row_at_node(tmp_path):
    assert main(["coupling", "--out", str(tmp_path)]) == 0
    rows = _rows(tmp_path / "fig2.csv")
    assert rows[0][:3] == ["diameter_m", "x0_m", "kappa_e_rad_s"]
    assert float(rows[1][2]) == 0.0
    manifest = json.loads((tmp_path / "fig2_manifest.json").read_text())
    assert manifest["subcommand"] == "coupling"
    assert {"numpy", "scipy", "python"} <= set(manifest["versions"])
    assert manifest["timings_s"]["total"] >= 0


def test_spectrum_at_zero_power(tmp_path):
    cfg = tmp_path / "c.json"
    cfg.write_text(json.dumps({"drive": {"power_w": 0.0}}))
    assert main(["spectrum", "--config", str(cfg), "--out", str(tmp_path)]) == 0
    summary = json.loads((tmp_path / "spectrum_manifest.json").read_text())["summary"]
    assert summary["integrated_n"] == pytest.approx(summary["n_th"], rel=5e-3)
    assert _rows(tmp_path / "spectrum.csv")[0] == ["omega_rad_s", "S_nm"]


def test_json_format(tmp_path):
    assert main(["damping", "--out", str(tmp_path), "--format", "json"]) == 0
    data = json.loads((tmp_path / "fig3.json").read_text())
    assert data["columns"] == ["delta_rad_s", "gamma_o_rad_s", "omega_o_rad_s"]
    assert len(data["rows"]) == 201


def test_manifest_reproduces_run(tmp_path):
    a, b = tmp_path / "a", tmp_path / "b"
    assert main(["damping", "--out", str(a)]) == 0
    cfg = tmp_path / "again.json"
    cfg.write_text(json.dumps(json.loads((a / "fig3_manifest.json").read_text())["config"]))
    assert main(["damping", "--config", str(cfg), "--out", str(b)]) == 0
    assert (a / "fig3.csv").read_bytes() == (b / "fig3.csv").read_bytes()


def test_config_error_exit_code(tmp_path, capsys):
    cfg = tmp_path / "c.json"
    cfg.write_text(json.dumps({"membrane": {"diameter_um": -1}}))
    assert main(["coupling", "--config", str(cfg), "--out", str(tmp_path)]) == 2
    assert "diameter" in capsys.readouterr().err


def test_numeric_error_exit_code(tmp_path):
    cfg = tmp_path / "c.json"
    cfg.write_text(json.dumps({"geometry_coupling": {"x0_nm": 0.0}}))
    assert main(["damping", "--config", str(cfg), "--out", str(tmp_path)]) == 3


def test_bad_threads_flag(tmp_path):
    assert main(["optimal", "--threads", "0", "--out", str(tmp_path)]) == 2


def test_phonon_map_and_optimal_outputs(tmp_path):
    assert main(["phonon-map", "--out", str(tmp_path)]) == 0
    assert main(["optimal", "--threads", "2", "--out", str(tmp_path)]) == 0
    assert len(_rows(tmp_path / "fig4.csv")) == 64 * 201 + 1
    assert len(_rows(tmp_path / "fig5.csv")) == 25 + 1


def test_parser_rejects_unknown_subcommand():
    with pytest.raises(SystemExit):
        main(["plot"])
