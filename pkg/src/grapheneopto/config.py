"""JSON run configuration with unit-suffixed keys.

Every dimensional key carries its unit in the name (``diameter_um``,
``kappa_c_over_2pi_hz``, ``min_over_omega_m`` ...). Frequencies quoted as
"2 pi x f" are entered as ``*_over_2pi_hz`` and converted to rad/s here;
nothing past this module sees ordinary frequencies.

Exactly one coupling source is active per run: ``coupling_override``
(kappa_e, eta_kappa and A_eff/A stated directly, as in the figure
captions) or ``geometry_coupling`` (derived from the membrane position).
With neither present the override block with its defaults is used.
"""
import copy
import json
from dataclasses import dataclass, field
from pathlib import Path

from .cavity import CavitySpec
from .errors import ConfigError, DomainError, SingularityError
from .langevin import SpectrumGrid
from .membrane import MembraneSpec
from .model import ModelParameters
from .sweep import AxisSpec, SweepConfig
from .units import hz

UM, NM = 1e-6, 1e-9

PRESETS = {
    "figure3": {"kappa_e_over_2pi_hz": 45e6, "eta_kappa": 2.2e-3, "area_ratio": 0.01,
                "omega_m_over_2pi_hz": 55e6, "gamma_m_over_2pi_hz": 10.0, "n_th": 100.0},
    "figure4": {"kappa_e_over_2pi_hz": 45e6, "eta_kappa": 2.2e-3, "area_ratio": 0.1,
                "omega_m_over_2pi_hz": 55e6, "gamma_m_over_2pi_hz": 10.0, "n_th": 100.0},
    "figure5": {"kappa_e_over_2pi_hz": 45e6, "eta_kappa": 2.2e-3, "area_ratio": 0.1,
                "omega_m_over_2pi_hz": 55e6, "gamma_m_over_2pi_hz": 10.0, "n_th": 100.0},
}

DEFAULTS = {
    "membrane": {"diameter_um": 30.0, "strain": 0.01, "stiffness2d_n_per_m": 340.0,
                 "areal_density_kg_per_um2": 7.4e-19, "gamma_m_over_2pi_hz": 10.0, "temperature_k": 0.26},
    "cavity": {"length_um": 30.0, "wavelength_nm": 600.0, "kappa_c_over_2pi_hz": 1e6, "waist_um": None},
    "drive": {"power_w": 5e-6, "detuning_over_2pi_hz": 0.0},
    "sweep": {
        "detuning": {"min_over_omega_m": -2.0, "max_over_omega_m": 2.0, "count": 201, "scale": "linear"},
        "power": {"min_w": 1e-9, "max_w": 1e-3, "count": 64, "scale": "log"},
        "optimal_detuning": {"min_over_omega_m": -3.0, "max_over_omega_m": 0.0, "count": 64, "scale": "linear"},
        "kappa_e": {"min_over_omega_m": 0.1, "max_over_omega_m": 5.0, "count": 25, "scale": "log"},
        "x0": {"min_nm": 0.0, "max_nm": 300.0, "count": 201, "scale": "linear"},
        "diameters_um": [30.0],
        "power_cap_w": 1e-3,
        "weak_coupling_threshold": 0.01,
        "tolerance": 1e-4,
        "threads": 1,
        "coupling_square": "modulus",
    },
    "spectrum": {"core_points": 2048, "tail_points": 1024, "core_halfwidth_linewidths": 50.0,
                 "span_kappas": 10.0, "rel_tol": 5e-3, "max_refinements": 4},
    "output": {"directory": "out", "format": "csv"},
}

# key -> unit stem, used to tell a unit mismatch from an unknown key
_STEMS = {
    "diameter_um": "diameter", "strain": "strain", "stiffness2d_n_per_m": "stiffness2d",
    "areal_density_kg_per_um2": "areal_density", "gamma_m_over_2pi_hz": "gamma_m", "temperature_k": "temperature",
    "length_um": "length", "wavelength_nm": "wavelength", "kappa_c_over_2pi_hz": "kappa_c", "waist_um": "waist",
    "power_w": "power", "detuning_over_2pi_hz": "detuning",
    "kappa_e_over_2pi_hz": "kappa_e", "eta_kappa": "eta_kappa", "area_ratio": "area_ratio",
    "omega_m_over_2pi_hz": "omega_m", "n_th": "n_th", "preset": "preset", "x0_nm": "x0",
    "min_over_omega_m": "min", "max_over_omega_m": "max", "min_w": "min", "max_w": "max",
    "min_nm": "min", "max_nm": "max", "count": "count", "scale": "scale",
    "diameters_um": "diameters", "power_cap_w": "power_cap",
    "weak_coupling_threshold": "weak_coupling_threshold", "tolerance": "tolerance", "threads": "threads",
    "coupling_square": "coupling_square",
    "core_points": "core_points", "tail_points": "tail_points",
    "core_halfwidth_linewidths": "core_halfwidth", "span_kappas": "span", "rel_tol": "rel_tol",
    "max_refinements": "max_refinements", "directory": "directory", "format": "format",
}

_OVERRIDE_KEYS = set(PRESETS["figure3"]) | {"preset"}
_GEOMETRY_KEYS = {"x0_nm"}


@dataclass
class RunConfig:
    membrane: MembraneSpec
    cavity: CavitySpec
    power: float
    detuning: float
    coupling_mode: str
    params: ModelParameters
    sweep: SweepConfig
    spectrum: SpectrumGrid
    diameters: list
    x0_axis: AxisSpec
    x0: float | None
    output_dir: Path
    output_format: str
    resolved: dict = field(default_factory=dict)


def _check_keys(block, allowed, where):
    for key in block:
        if key in allowed:
            continue
        stem_hits = [a for a in allowed if key.startswith(_STEMS.get(a, a) + "_") or key == _STEMS.get(a, a)]
        if stem_hits:
            raise ConfigError(f"{where}.{key}: unit mismatch, expected {' or '.join(sorted(stem_hits))}")
        raise ConfigError(f"{where}.{key}: unknown field")


def _merge(base, user, where):
    if not isinstance(user, dict):
        raise ConfigError(f"{where}: expected an object")
    out = copy.deepcopy(base)
    _check_keys(user, base.keys(), where)
    for key, value in user.items():
        if isinstance(base[key], dict):
            out[key] = _merge(base[key], value, f"{where}.{key}")
        else:
            out[key] = value
    return out


def resolve(raw):
    """Fill defaults into ``raw`` and settle the coupling source; returns a new dict."""
    if not isinstance(raw, dict):
        raise ConfigError("config root must be a JSON object")
    raw = dict(raw)
    override = raw.pop("coupling_override", None)
    geometry = raw.pop("geometry_coupling", None)
    if override is not None and geometry is not None:
        raise ConfigError("coupling_override and geometry_coupling are mutually exclusive; give one")
    merged = _merge(DEFAULTS, raw, "config")
    if geometry is not None:
        if not isinstance(geometry, dict):
            raise ConfigError("geometry_coupling: expected an object")
        _check_keys(geometry, _GEOMETRY_KEYS, "geometry_coupling")
        if "x0_nm" not in geometry:
            raise ConfigError("geometry_coupling.x0_nm is required")
        merged["geometry_coupling"] = dict(geometry)
    else:
        override = override or {}
        if not isinstance(override, dict):
            raise ConfigError("coupling_override: expected an object")
        _check_keys(override, _OVERRIDE_KEYS, "coupling_override")
        preset = override.get("preset", "figure3")
        if preset not in PRESETS:
            raise ConfigError(f"coupling_override.preset: unknown preset {preset!r}")
        block = {"preset": preset, **PRESETS[preset]}
        block.update(override)
        merged["coupling_override"] = block
    return merged


def _num(block, key, where, scale=1.0, allow_none=False):
    value = block[key]
    if value is None and allow_none:
        return None
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError(f"{where}.{key}: expected a number, got {value!r}")
    return float(value) * scale


def _axis(name, block, where, omega_m=None, unit=None):
    if "min_over_omega_m" in block:
        lo, hi = _num(block, "min_over_omega_m", where) * omega_m, _num(block, "max_over_omega_m", where) * omega_m
    elif unit == "w":
        lo, hi = _num(block, "min_w", where), _num(block, "max_w", where)
    else:
        lo, hi = _num(block, "min_nm", where, NM), _num(block, "max_nm", where, NM)
    try:
        return AxisSpec(name, lo, hi, int(block["count"]), block.get("scale", "linear"))
    except DomainError as exc:
        raise ConfigError(f"{where}: {exc}") from exc


def build(merged, base_dir="."):
    """Turn a resolved config dict into a :class:`RunConfig`."""
    m, cv, dr, sw, sp, out = (merged[k] for k in ("membrane", "cavity", "drive", "sweep", "spectrum", "output"))
    try:
        membrane = MembraneSpec(
            diameter=_num(m, "diameter_um", "membrane", UM), strain=_num(m, "strain", "membrane"),
            stiffness2d=_num(m, "stiffness2d_n_per_m", "membrane"),
            areal_density=_num(m, "areal_density_kg_per_um2", "membrane", 1e12),
            intrinsic_damping=hz(_num(m, "gamma_m_over_2pi_hz", "membrane")),
            temperature=_num(m, "temperature_k", "membrane"))
    except DomainError as exc:
        raise ConfigError(f"membrane: {exc}") from exc
    try:
        cavity = CavitySpec(
            length=_num(cv, "length_um", "cavity", UM), wavelength=_num(cv, "wavelength_nm", "cavity", NM),
            kappa_c=hz(_num(cv, "kappa_c_over_2pi_hz", "cavity")),
            waist=_num(cv, "waist_um", "cavity", UM, allow_none=True))
    except DomainError as exc:
        raise ConfigError(f"cavity: {exc}") from exc

    x0 = None
    try:
        if "geometry_coupling" in merged:
            mode = "geometry"
            x0 = _num(merged["geometry_coupling"], "x0_nm", "geometry_coupling", NM)
            params = ModelParameters.from_geometry(membrane, cavity, x0)
        else:
            mode = "override"
            ov = merged["coupling_override"]
            params = ModelParameters(
                omega_m=hz(_num(ov, "omega_m_over_2pi_hz", "coupling_override")),
                gamma_m=hz(_num(ov, "gamma_m_over_2pi_hz", "coupling_override")),
                n_th=_num(ov, "n_th", "coupling_override"),
                kappa_c=cavity.kappa_c,
                kappa_e=hz(_num(ov, "kappa_e_over_2pi_hz", "coupling_override")),
                eta_kappa=_num(ov, "eta_kappa", "coupling_override"),
                area_ratio=_num(ov, "area_ratio", "coupling_override"),
                wavelength=cavity.wavelength)
    except SingularityError:
        raise
    except DomainError as exc:
        raise ConfigError(f"coupling: {exc}") from exc

    wm = params.omega_m
    if sw["coupling_square"] not in ("modulus", "complex"):
        raise ConfigError("sweep.coupling_square: expected 'modulus' or 'complex'")
    threads = sw["threads"]
    if not isinstance(threads, int) or threads < 1:
        raise ConfigError("sweep.threads: expected a positive integer")
    sweep = SweepConfig(
        params=params,
        detuning=_axis("detuning", sw["detuning"], "sweep.detuning", wm),
        power=_axis("power", sw["power"], "sweep.power", unit="w"),
        optimal_detuning=_axis("detuning", sw["optimal_detuning"], "sweep.optimal_detuning", wm),
        kappa_e=_axis("kappa_e", sw["kappa_e"], "sweep.kappa_e", wm),
        scan_power=_num(dr, "power_w", "drive"),
        threads=threads,
        weak_coupling_threshold=_num(sw, "weak_coupling_threshold", "sweep"),
        power_cap=_num(sw, "power_cap_w", "sweep"),
        tolerance=_num(sw, "tolerance", "sweep"),
        square=sw["coupling_square"],
    )
    power = _num(dr, "power_w", "drive")
    if power < 0:
        raise ConfigError("drive.power_w: must be >= 0")
    diameters = [float(d) * UM for d in sw["diameters_um"]]
    if any(d <= 0 for d in diameters):
        raise ConfigError("sweep.diameters_um: diameters must be positive")
    fmt = out["format"]
    if fmt not in ("csv", "json"):
        raise ConfigError("output.format: expected 'csv' or 'json'")
    grid = SpectrumGrid(
        core_points=int(sp["core_points"]), tail_points=int(sp["tail_points"]),
        core_halfwidth=_num(sp, "core_halfwidth_linewidths", "spectrum"), span=_num(sp, "span_kappas", "spectrum"),
        rel_tol=_num(sp, "rel_tol", "spectrum"), max_refinements=int(sp["max_refinements"]))
    out_dir = Path(out["directory"])
    if not out_dir.is_absolute():
        out_dir = Path(base_dir) / out_dir
    return RunConfig(
        membrane=membrane, cavity=cavity, power=power, detuning=hz(_num(dr, "detuning_over_2pi_hz", "drive")),
        coupling_mode=mode, params=params, sweep=sweep, spectrum=grid, diameters=diameters,
        x0_axis=_axis("x0", sw["x0"], "sweep.x0"), x0=x0, output_dir=out_dir, output_format=fmt,
        resolved=merged,
    )


def load_config(data, base_dir="."):
    """Build a :class:`RunConfig` from an already-parsed dict."""
    return build(resolve(data), base_dir)


def parse_config(path):
    """Read and validate a JSON config file. ``None`` gives the all-defaults config."""
    if path is None:
        return load_config({})
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ConfigError(f"{path}: {exc.strerror}") from exc
    try:
        data = json.loads(text) if text.strip() else {}
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}:{exc.lineno}:{exc.colno}: {exc.msg}") from exc
    return load_config(data, base_dir=".")
