"""Parameter scans and the optimal-cooling search.

All scans evaluate the mean field, optical spring and weak-coupling
occupancy on numpy arrays, so a whole (detuning, power) map is one
vectorised pass. Nothing here draws random numbers; identical inputs give
bit-identical tables.

Detuning convention: ``delta = omega_cav - omega_p``. Blue detuning (pump
above the cavity resonance) is ``delta < 0``.
"""
import csv
import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace

import numpy as np
from scipy.optimize import minimize_scalar

from .cavity import beam_waist, coupling_point, undoped_fermi_factor
from .errors import DomainError
from .langevin import WEAK_COUPLING_THRESHOLD, SPRING_VALIDITY_RATIO, coupling_square, phonon_terms, spring_rates
from .membrane import MembraneSpec, mechanical_mode
from .model import ModelParameters
from .response import POWER_VALIDITY_LIMIT, pump_amplitude, solve_mean_field, validity_ratio

log = logging.getLogger(__name__)

SWEEPABLE = ("detuning", "power", "kappa_e", "x0", "diameter")
CONVENTION = "delta = omega_cav - omega_p (rad/s); delta < 0 is blue detuning"
_PENALTY = 1e300


@dataclass(frozen=True)
class AxisSpec:
    name: str
    minimum: float
    maximum: float
    count: int
    scale: str = "linear"

    def __post_init__(self):
        if self.name not in SWEEPABLE:
            raise DomainError(f"{self.name!r} is not sweepable; choose from {SWEEPABLE}")
        if self.count < 2:
            raise DomainError(f"axis {self.name!r}: count must be >= 2")
        if not self.minimum < self.maximum:
            raise DomainError(f"axis {self.name!r}: minimum must be below maximum")
        if self.scale not in ("linear", "log"):
            raise DomainError(f"axis {self.name!r}: scale must be 'linear' or 'log'")
        if self.scale == "log" and not self.minimum > 0:
            raise DomainError(f"axis {self.name!r}: log scale needs a positive minimum")

    def values(self):
        if self.scale == "log":
            return np.geomspace(self.minimum, self.maximum, self.count)
        return np.linspace(self.minimum, self.maximum, self.count)


@dataclass(frozen=True)
class SweepConfig:
    """Fixed parameter block plus the axes of every scan.

    Axes left as ``None`` fall back to defaults scaled by ``omega_m``:
    detuning scan over [-2, 2] omega_m, optimisation detuning over
    [-3, 0] omega_m, kappa_e over [0.1, 5] omega_m.
    """

    params: ModelParameters = field(default_factory=ModelParameters.figure4)
    detuning: AxisSpec | None = None
    power: AxisSpec = AxisSpec("power", 1e-9, 1e-3, 64, "log")
    optimal_detuning: AxisSpec | None = None
    kappa_e: AxisSpec | None = None
    scan_power: float = 5e-6
    threads: int = 1
    weak_coupling_threshold: float = WEAK_COUPLING_THRESHOLD
    power_cap: float = POWER_VALIDITY_LIMIT
    tolerance: float = 1e-4
    max_descent: int = 200
    square: str = "modulus"

    def detuning_axis(self):
        wm = self.params.omega_m
        return self.detuning or AxisSpec("detuning", -2 * wm, 2 * wm, 201)

    def optimal_detuning_axis(self):
        wm = self.params.omega_m
        return self.optimal_detuning or AxisSpec("detuning", -3 * wm, 0.0, 64)

    def kappa_e_axis(self):
        wm = self.params.omega_m
        return self.kappa_e or AxisSpec("kappa_e", 0.1 * wm, 5 * wm, 25, "log")


@dataclass(frozen=True)
class OptimumRecord:
    kappa_e: float
    detuning: float
    power: float
    n_min: float
    n_coarse: float
    iterations: int
    converged: bool
    at_power_cap: bool


@dataclass
class PhononMap:
    detuning: np.ndarray
    power: np.ndarray
    n_ss: np.ndarray
    term_thermal: np.ndarray
    term_sigma_noise: np.ndarray
    term_light_noise: np.ndarray
    weak: np.ndarray
    stable: np.ndarray

    @property
    def valid(self):
        return self.weak & self.stable

    @property
    def ground_state(self):
        return self.valid & (self.n_ss < 1)


def evaluate(params, power, detuning, threshold=WEAK_COUPLING_THRESHOLD, square="modulus", omega_eval=None):
    """Vectorised steady state, optical spring and occupancy on broadcast arrays.

    Returns a dict of arrays. ``n_ss`` is NaN wherever the effective damping
    is not positive; ``weak`` marks the weak-coupling guard.
    """
    power, detuning = np.broadcast_arrays(np.asarray(power, dtype=float), np.asarray(detuning, dtype=float))
    kc, ke, eta = params.kappa_c, params.kappa_e, params.eta_kappa
    kappa = kc + ke
    E = pump_amplitude(power, kc, params.omega_cav - detuning).astype(complex)
    abar, sigma, _, converged = solve_mean_field(E, detuning, kc, ke, params.area_ratio, params.fermi_velocity_ratio)
    root = math.sqrt(2 * ke)
    G = (2 * abar * ke - root * sigma) * eta
    Ge = root * sigma * eta
    omega = params.omega_m if omega_eval is None else omega_eval
    omega_o, gamma_o = spring_rates(E, sigma, detuning, ke, kappa, eta, omega)
    gamma_eff = params.gamma_m + gamma_o
    stable = (gamma_eff > 0) & converged
    weak = (np.abs(G) <= threshold * kappa) & (np.abs(Ge) <= threshold * kappa)
    safe_gamma = np.where(stable, gamma_eff, 1.0)
    t1, t2, t3 = phonon_terms(params.n_th, params.gamma_m, safe_gamma, coupling_square(G, square),
                              coupling_square(Ge, square), kc, ke, detuning, params.omega_m + omega_o)
    nan = np.full(power.shape, np.nan)
    t1, t2, t3 = (np.where(stable, t, nan) for t in np.broadcast_arrays(t1, t2, t3))
    return dict(
        power=power, detuning=detuning, E=E, abar=abar, sigma_bar=sigma, G=G, G_e=Ge,
        omega_o=omega_o, gamma_o=gamma_o, gamma_eff=gamma_eff, weak=weak, stable=stable,
        term_thermal=t1, term_sigma_noise=t2, term_light_noise=t3, n_ss=t1 + t2 + t3,
        validity_ratio=validity_ratio(E, ke, sigma),
    )


def _warn_ratio(ratio, where):
    worst = float(np.min(ratio))
    if worst < SPRING_VALIDITY_RATIO:
        log.warning("%s: |E|/(sqrt(2 kappa_e)|sigma|) drops to %.3g (< %g)", where, worst, SPRING_VALIDITY_RATIO)
    else:
        log.info("%s: min |E|/(sqrt(2 kappa_e)|sigma|) = %.3g", where, worst)


def coupling_scan(membrane: MembraneSpec, cavity, x0_axis=None, diameters=None):
    """Coupling profile rows ``(diameter, x0, kappa_e, eta, eta_product, A_eff)``.

    One profile per diameter; ``diameters`` defaults to the membrane's own.
    """
    geom = beam_waist(cavity)
    fermi = undoped_fermi_factor(cavity)
    x0_axis = x0_axis or AxisSpec("x0", 0.0, cavity.wavelength / 2, 201)
    rows = []
    for d in diameters if diameters is not None else [membrane.diameter]:
        mode = mechanical_mode(replace(membrane, diameter=float(d)))
        for x in x0_axis.values():
            p = coupling_point(cavity, geom, x, mode.x_zpf, fermi)
            rows.append((float(d), p.x0, p.kappa_e, p.eta_kappa, p.eta_product, p.area_eff))
    return rows


def detuning_scan(config: SweepConfig, power=None):
    """Optical spring along the detuning axis at fixed pump power.

    Returns a dict of arrays with keys ``detuning``, ``omega_o``, ``gamma_o``.
    """
    p = config.scan_power if power is None else power
    delta = config.detuning_axis().values()
    out = evaluate(config.params, p, delta, config.weak_coupling_threshold, config.square)
    _warn_ratio(out["validity_ratio"], "detuning scan")
    return {"detuning": delta, "omega_o": out["omega_o"], "gamma_o": out["gamma_o"]}


def cooling_peak(scan):
    """Detuning at which the optically induced damping is largest."""
    return float(scan["detuning"][int(np.argmax(scan["gamma_o"]))])


def phonon_map(config: SweepConfig, detuning_axis=None, power_axis=None):
    """Weak-coupling occupancy on the (power, detuning) grid.

    Cells failing the weak-coupling guard keep their value but are flagged
    through ``weak``; cells with non-positive damping are NaN and flagged
    through ``stable``.
    """
    delta = (detuning_axis or config.detuning_axis()).values()
    power = (power_axis or config.power).values()
    P, D = np.meshgrid(power, delta, indexing="ij")
    out = evaluate(config.params, P, D, config.weak_coupling_threshold, config.square)
    _warn_ratio(out["validity_ratio"], "phonon map")
    return PhononMap(detuning=delta, power=power, n_ss=out["n_ss"], term_thermal=out["term_thermal"],
                     term_sigma_noise=out["term_sigma_noise"], term_light_noise=out["term_light_noise"],
                     weak=out["weak"], stable=out["stable"])


def _objective(params, config):
    def f(delta, log_power):
        out = evaluate(params, math.exp(log_power), delta, config.weak_coupling_threshold, config.square)
        n = float(out["n_ss"])
        if not (bool(out["weak"]) and bool(out["stable"])) or not math.isfinite(n):
            return _PENALTY
        return n
    return f


def _optimize_one(config, kappa_e):
    params = config.params.with_(kappa_e=float(kappa_e))
    d_axis = config.optimal_detuning_axis()
    p_axis = config.power
    delta = d_axis.values()
    power = p_axis.values()
    power = power[power <= config.power_cap]
    if power.size == 0:
        raise DomainError("power axis lies entirely above the power cap")
    P, D = np.meshgrid(power, delta, indexing="ij")
    out = evaluate(params, P, D, config.weak_coupling_threshold, config.square)
    n = np.where(out["weak"] & out["stable"], out["n_ss"], np.inf)
    if not np.isfinite(n).any():
        return OptimumRecord(float(kappa_e), math.nan, math.nan, math.nan, math.nan, 0, False, False)
    i, j = np.unravel_index(int(np.argmin(n)), n.shape)
    n_coarse = float(n[i, j])

    f = _objective(params, config)
    lo = np.array([d_axis.minimum, math.log(max(power[0], 1e-30))])
    hi = np.array([d_axis.maximum, math.log(min(p_axis.maximum, config.power_cap))])
    step = np.array([delta[1] - delta[0], math.log(power[1] / power[0]) if power.size > 1 else 1.0])
    x = np.array([D[i, j], math.log(P[i, j])])
    best = n_coarse
    converged = False
    it = 0
    for it in range(1, config.max_descent + 1):
        start = best
        for k in range(2):
            a, b = max(lo[k], x[k] - step[k]), min(hi[k], x[k] + step[k])
            if not a < b:
                continue

            def line(t, k=k):
                y = x.copy()
                y[k] = t
                return f(*y)

            res = minimize_scalar(line, bounds=(a, b), method="bounded",
                                  options={"xatol": 1e-9 * max(abs(step[k]), 1e-30)})
            if res.fun < best:
                best = float(res.fun)
                x[k] = res.x
        if start - best <= config.tolerance * abs(best):
            converged = True
            break
        step *= 0.5 if start - best < 0.1 * abs(best) else 1.0
    p_opt = math.exp(x[1])
    return OptimumRecord(
        kappa_e=float(kappa_e), detuning=float(x[0]), power=p_opt, n_min=best, n_coarse=n_coarse,
        iterations=it, converged=converged, at_power_cap=p_opt >= config.power_cap * (1 - 1e-6),
    )


def optimal_cooling(config: SweepConfig, kappa_e_values=None):
    """Minimum occupancy over (detuning, power) for each absorptive rate.

    A coarse grid locates the best valid cell; alternating bounded line
    searches along detuning and log-power then refine it until a full sweep
    improves ``n_min`` by less than ``config.tolerance`` (relative). Cells
    failing the weak-coupling or stability guards never count as minima.
    """
    values = config.kappa_e_axis().values() if kappa_e_values is None else np.asarray(kappa_e_values, dtype=float)
    if config.threads > 1:
        with ThreadPoolExecutor(max_workers=config.threads) as pool:
            return list(pool.map(lambda k: _optimize_one(config, k), values))
    return [_optimize_one(config, k) for k in values]


FIG2_COLUMNS = ("diameter_m", "x0_m", "kappa_e_rad_s", "eta_kappa", "eta_sqrt2ke", "A_eff_m2")
FIG3_COLUMNS = ("delta_rad_s", "gamma_o_rad_s", "omega_o_rad_s")
FIG4_COLUMNS = ("delta_rad_s", "power_w", "n_ss", "valid", "stable", "n_thermal", "n_sigma", "n_light")
FIG5_COLUMNS = ("kappa_e_rad_s", "delta_opt_rad_s", "power_opt_w", "n_min", "converged",
                "n_coarse", "iterations", "at_power_cap")


def fig3_rows(scan):
    return [(d, g, w) for d, g, w in zip(scan["detuning"], scan["gamma_o"], scan["omega_o"])]


def fig4_rows(pm: PhononMap):
    rows = []
    for i, p in enumerate(pm.power):
        for j, d in enumerate(pm.detuning):
            rows.append((d, p, pm.n_ss[i, j], int(pm.valid[i, j]), int(pm.stable[i, j]),
                         pm.term_thermal[i, j], pm.term_sigma_noise[i, j], pm.term_light_noise[i, j]))
    return rows


def fig5_rows(records):
    return [(r.kappa_e, r.detuning, r.power, r.n_min, int(r.converged), r.n_coarse, r.iterations,
             int(r.at_power_cap)) for r in records]


def write_csv(path, columns, rows, comment=None):
    with open(path, "w", newline="") as fh:
        if comment:
            fh.write(f"# {comment}\n")
        writer = csv.writer(fh)
        writer.writerow(columns)
        for row in rows:
            writer.writerow([repr(float(v)) if isinstance(v, (float, np.floating)) else v for v in row])
