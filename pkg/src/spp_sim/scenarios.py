"""Scenario runners used by the command-line front end.

Each runner takes a ``ScenarioConfig``, an output directory and a few
options, writes its artifacts there and returns ``(summary, checks)`` where
``checks`` is a list of ``Check`` rows (empty for plain scenarios).
"""

import math
import os
from dataclasses import dataclass

import numpy as np

from . import units as u
from .directionality import sweep_grid
from .dynamics import (classify_regime, fit_decay, fit_oscillation,
                       markov_rate_gamma_c, markov_rate_intermediate,
                       solve_volterra)
from .errors import InsufficientDataError, ValidationError
from .graphene import (Emitter, GrapheneModel, dispersion_q, group_velocity,
                       residue_coefficient, spp_mode)
from .io import write_csv, write_json
from .kernels import (EnsembleGeometry, KernelParams, KIND_DETUNED,
                      KIND_RESONANT, collective_coupling)
from .lambshift import collective_rate, collective_shifts
from .planner import plan_train, survival_budget, validate_protection

__all__ = ["SCENARIOS", "Check", "run_scenario", "physical_rates"]


@dataclass(frozen=True)
class Check:
    name: str
    value: float
    target: str
    passed: bool

    @property
    def status(self):
        return "PASS" if self.passed else "FAIL"


def physical_rates(cfg):
    """(varpi, gamma, v/L) in s^-1 for the configured ensemble at k_sp."""
    model, emitter, geom = cfg.model(), cfg.emitter(), cfg.geometry()
    k_sp = float(dispersion_q(model, emitter.omega_sg))
    mode = spp_mode(model, emitter, k_sp)
    varpi = math.sqrt(collective_coupling(geom, mode))
    v_over_L = mode.group_velocity * 1e9 / geom.width_L
    return varpi, model.gamma, v_over_L


def _fig_path(outdir, name):
    return os.path.join(outdir, name)


# ---------------------------------------------------------------------------

def run_dispersion(cfg, outdir, figures=True, **_):
    model, emitter = cfg.model(), cfg.emitter()
    omega = np.linspace(0.01, 1.0, 100)
    q = dispersion_q(model, omega)
    lam = 2 * math.pi / q
    v_c = group_velocity(model, q) / u.C_M_S
    A = residue_coefficient(model, emitter, q).per_gamma0
    valid = (omega < 2 * model.fermi_energy) & (u.ev_to_rate(omega) >= 10 * model.gamma)
    write_csv(os.path.join(outdir, "dispersion.csv"),
              ["omega_eV", "q_nm^-1", "lambda_sp_nm", "v_over_c", "A_per_gamma0_nm^2/s", "valid"],
              [omega, q, lam, v_c, A, [str(bool(x)).lower() for x in valid]])
    k_sp = float(dispersion_q(model, emitter.omega_sg))
    summary = {
        "k_sp_nm^-1": k_sp, "lambda_sp_nm": 2 * math.pi / k_sp,
        "group_velocity_over_c": float(group_velocity(model, k_sp) / u.C_M_S),
        "residue_A_per_gamma0": residue_coefficient(model, emitter, k_sp).per_gamma0,
        "gamma_sp_s^-1": model.gamma,
    }
    write_json(os.path.join(outdir, "dispersion.json"), summary)
    if figures:
        from .plotting import plot_dispersion
        plot_dispersion(omega, q, omega / u.HBAR_C_EV_NM, _fig_path(outdir, "dispersion.png"))
    return summary, []


def _dynamics_params(cfg):
    varpi, gamma, v_over_L = physical_rates(cfg)
    if not gamma > 0:
        raise ValidationError("dynamics needs a finite Drude time (gamma > 0)")
    vp = cfg.get("dynamics.varpi_gamma", varpi / gamma)
    vl = cfg.get("dynamics.v_over_l_gamma", v_over_L / gamma)
    dt = cfg["dynamics.detuning_gamma"]
    return vp, 1.0, vl, dt, gamma


def run_dynamics(cfg, outdir, figures=True, step_fs=None, horizon=None, **_):
    vp, g, vl, dt, gamma = _dynamics_params(cfg)
    dimensionless = cfg["solver.dimensionless"]
    # rate unit: gamma (dimensionless) or fs^-1
    scale = 1.0 if dimensionless else gamma * 1e-15
    kind = KIND_RESONANT if dt == 0 else KIND_DETUNED
    params = KernelParams(varpi_sq=(vp * scale) ** 2, v_over_L=vl * scale, gamma=g * scale,
                          detuning=dt * scale, kind=kind)
    fastest = max(vp, g, vl, abs(dt)) * scale
    step = cfg["solver.step"]
    if step_fs is not None:
        step = step_fs * 1e-15 * gamma if dimensionless else step_fs
    if step is None:
        step = 1.0 / (200.0 * fastest)
    horizon = cfg["solver.horizon"] if horizon is None else horizon
    traj = solve_volterra(params, horizon, step)
    traj.to_csv(os.path.join(outdir, "trajectory.csv"))
    regime = classify_regime(vp, g, vl)
    summary = {
        "units": "1/gamma" if dimensionless else "fs",
        "varpi": vp * scale, "gamma": g * scale, "v_over_L": vl * scale,
        "detuning": dt * scale, "step": step, "horizon": horizon,
        "scheme": traj.scheme, "richardson_error": traj.richardson_error,
        "regime": regime.regime,
        "min_abs_alpha": float(np.abs(traj.alpha).min()),
    }
    try:
        freq, decay = fit_oscillation(traj)
        summary["fit_oscillation"] = {"freq": freq, "decay": decay}
    except InsufficientDataError:
        summary["fit_oscillation"] = None
    summary["fit_decay"] = None
    if regime.regime != "damped-oscillation":
        try:
            summary["fit_decay"] = fit_decay(traj)
        except InsufficientDataError:
            pass
    write_json(os.path.join(outdir, "dynamics.json"), summary)
    if figures:
        from .plotting import plot_trajectory
        label = r"$\gamma t$" if dimensionless else r"$t$ (fs)"
        plot_trajectory(traj.t, traj.alpha, _fig_path(outdir, "trajectory.png"), label)
    return summary, []


def run_markov(cfg, outdir, figures=True, **_):
    model, emitter, geom = cfg.model(), cfg.emitter(), cfg.geometry()
    varpi, gamma, v_over_L = physical_rates(cfg)
    k_sp = float(dispersion_q(model, emitter.omega_sg))
    v = group_velocity(model, k_sp) * 1e9
    widths = np.logspace(1, 5, 41)
    density = geom.density
    rates, limits = [], []
    for L in widths:
        vp_sq = density / 4.0 * residue_coefficient(model, emitter, k_sp).absolute
        rates.append(markov_rate_gamma_c(math.sqrt(vp_sq), gamma, v / L))
        limits.append(vp_sq / gamma if gamma > 0 else math.inf)
    write_csv(os.path.join(outdir, "gamma_c_vs_width.csv"),
              ["width_L_nm", "v_over_L_s^-1", "gamma_c_s^-1", "markov_limit_s^-1"],
              [widths, v / widths, rates, limits])
    regime = classify_regime(varpi, gamma, v_over_L)
    summary = {
        "varpi_s^-1": varpi, "gamma_s^-1": gamma, "v_over_L_s^-1": v_over_L,
        "gamma_c_s^-1": markov_rate_gamma_c(varpi, gamma, v_over_L),
        "regime": regime.regime,
        "intermediate_rate_example": {
            "varpi_gamma": 0.1, "detuning_gamma": 10.0,
            "rate_gamma": markov_rate_intermediate(0.1, 1.0, 10.0)},
    }
    write_json(os.path.join(outdir, "markov.json"), summary)
    return summary, []


def run_map(cfg, outdir, figures=True, workers=None, **_):
    model, emitter, geom = cfg.model(), cfg.emitter(), cfg.geometry()
    gamma_fit = cfg["grid.gamma_fit_s"]
    if gamma_fit is None:
        varpi, gamma, v_over_L = physical_rates(cfg)
        gamma_fit = markov_rate_gamma_c(varpi, gamma, v_over_L)
    grid = sweep_grid(model, emitter, geom, gamma_fit, resolution=cfg["grid.resolution"],
                      kx_window=(cfg["grid.kx_min"], cfg["grid.kx_max"]),
                      ky_window=(cfg["grid.ky_min"], cfg["grid.ky_max"]), workers=workers)
    grid.to_csv(os.path.join(outdir, "map.csv"))
    grid.to_json(os.path.join(outdir, "map.json"))
    grid.to_gnuplot(os.path.join(outdir, "map.dat"))
    if figures:
        from .plotting import plot_map
        plot_map(grid, _fig_path(outdir, "map.png"))
    return grid.metadata(), []


def run_plan(cfg, outdir, figures=True, **_):
    model, emitter = cfg.model(), cfg.emitter()
    plan = plan_train(model, emitter, cfg["plan.lambda_es_nm"])
    gamma = model.gamma
    survival_budget(plan, cfg["plan.varpi_gamma"] * gamma, gamma, cfg["plan.dwell_s"])
    plan.to_json(os.path.join(outdir, "plan.json"))
    with open(os.path.join(outdir, "plan.txt"), "w", encoding="utf-8", newline="\n") as fh:
        fh.write(plan.table() + "\n")
    report = validate_protection(plan, model, emitter, raise_on_violation=False)
    write_json(os.path.join(outdir, "protection.json"), report.to_dict())
    if figures:
        from .plotting import plot_plan
        k_sp = float(dispersion_q(model, emitter.omega_sg))
        plot_plan(plan.q_magnitudes(), np.array(plan.delta_n), emitter.light_wavenumber, k_sp,
                  _fig_path(outdir, "plan.png"))
    print(plan.table())
    validate_protection(plan, model, emitter)
    return {"pulse_count": plan.pulse_count, "survival": plan.survival,
            "protected": report.protected}, []


def run_lambshift(cfg, outdir, figures=True, **_):
    model, emitter, geom = cfg.model(), cfg.emitter(), cfg.geometry()
    res = collective_shifts(model, emitter, geom,
                            omega_max=cfg["lambshift.omega_max_factor"] * emitter.omega_sg,
                            k_max=cfg["lambshift.k_max_nm"])
    res.to_json(os.path.join(outdir, "shifts.json"))
    return res.to_dict(), []


# ---------------------------------------------------------------------------

def _rel(a, b):
    return abs(a - b) / abs(b)


def _anchor_checks():
    model = GrapheneModel(0.5, 0.5)
    em10 = Emitter(0.5, 1e8, 10.0)
    em20 = Emitter(0.5, 1e8, 20.0)
    k_sp = float(dispersion_q(model, 0.5))
    rows = []

    def add(name, value, target, ok):
        rows.append(Check(name, float(value), target, bool(ok)))

    add("q_sp at 0.5 eV (nm^-1)", k_sp, "0.174 +- 0.5%", _rel(k_sp, 0.174) <= 0.005)
    lam = 2 * math.pi / k_sp
    add("lambda_sp at 0.5 eV (nm)", lam, "36.2 +- 0.5%", _rel(lam, 36.2) <= 0.005)
    lam90 = 2 * math.pi / float(dispersion_q(model, 0.01)) * 1e-3
    add("lambda_sp at 0.01 eV (um)", lam90, "90 +- 1%", _rel(lam90, 90.0) <= 0.01)
    a10 = residue_coefficient(model, em10, 0.174).per_gamma0
    a20 = residue_coefficient(model, em20, 0.174).per_gamma0
    add("A at z=10 nm, q=0.174 (gamma0 nm^2/s)", a10, "1.87e20 +- 2%", _rel(a10, 1.87e20) <= 0.02)
    add("A at z=20 nm, q=0.174 (gamma0 nm^2/s)", a20, "5.73e18 +- 2%", _rel(a20, 5.73e18) <= 0.02)
    r_num = (residue_coefficient(model, em20, k_sp).per_gamma0
             / residue_coefficient(model, em10, k_sp).per_gamma0)
    r_exact = math.exp(-2 * k_sp * 10.0)
    add("A(20 nm)/A(10 nm)", r_num, "exp(-2 q_sp 10 nm) +- 1e-6", _rel(r_num, r_exact) <= 1e-6)
    vc = float(group_velocity(model, k_sp) / u.C_M_S)
    add("v_sp / c", vc, "[0.006, 0.012]", 0.006 <= vc <= 0.012)

    vp, g = 2.0, 1.0
    traj = solve_volterra(KernelParams(varpi_sq=vp * vp, gamma=g), 10.0, 1e-3 / vp,
                          richardson=False)
    om = math.sqrt(vp * vp - g * g / 4)
    exact = np.exp(-g * traj.t / 2) * (np.cos(om * traj.t) + g / (2 * om) * np.sin(om * traj.t))
    err = float(np.max(np.abs(traj.alpha - exact)))
    add("Volterra vs analytic (varpi=2 gamma)", err, "<= 1e-6", err <= 1e-6)
    gc = markov_rate_gamma_c(0.1, 1.0, 1e-9)
    add("Gamma_c as v/L -> 0 (gamma)", gc, "varpi^2/gamma = 0.01 +- 1e-6", _rel(gc, 0.01) <= 1e-6)
    life = 1.0 / markov_rate_intermediate(0.1, 1.0, 10.0)
    add("intermediate lifetime (1/gamma)", life, "> 1e4", life > 1e4)

    plan = plan_train(model, em10, 500.0)
    add("pulse count, lambda_es = 500 nm", plan.pulse_count, "15", plan.pulse_count == 15)
    d = plan.delta_n[-2]
    add("Delta_{n_p-1} (eV)", d, "0.035 +- 15%", _rel(d, 0.035) <= 0.15)
    rep = validate_protection(plan, model, em10, raise_on_violation=False)
    add("intermediate q_n outside light cone", sum(rep.outside_light_cone),
        f"all {plan.n_p}", all(rep.outside_light_cone))

    m1 = GrapheneModel(0.5, 1.0)
    widths = []
    for L in (1000.0, 100.0):
        grid = sweep_grid(m1, em10, EnsembleGeometry(int(0.01 * L * L), L), 1e10,
                          resolution=129)
        widths.append(grid.fwhm_transverse)
    ratio = widths[1] / widths[0]
    add("transverse FWHM ratio L=100/L=1000", ratio, "10 +- 10%", _rel(ratio, 10.0) <= 0.1)

    L = 1e5
    geom = EnsembleGeometry(int(0.01 * L * L), L)
    A = residue_coefficient(model, em10, k_sp).absolute
    vp_sq = geom.n_emitters / (4 * L * L) * A
    v = group_velocity(model, k_sp) * 1e9
    gc_k = collective_rate(model, em10, geom, k_sp)
    gc_m = markov_rate_gamma_c(math.sqrt(vp_sq), model.gamma, v / L)
    add("gamma_c (k-space) vs Gamma_c, L = 1e5 nm", gc_k / gc_m, "1 +- 5%", _rel(gc_k, gc_m) <= 0.05)
    return rows


def run_reproduce(cfg, outdir, figures=True, **_):
    rows = _anchor_checks()
    write_csv(os.path.join(outdir, "checks.csv"), ["check", "value", "target", "status"],
              [[r.name for r in rows], [r.value for r in rows], [r.target for r in rows],
               [r.status for r in rows]])
    write_json(os.path.join(outdir, "checks.json"),
               [{"check": r.name, "value": r.value, "target": r.target, "status": r.status}
                for r in rows])
    width = max(len(r.name) for r in rows)
    for r in rows:
        print(f"{r.status}  {r.name:<{width}}  {r.value:.6g}  (target {r.target})")
    return {"passed": sum(r.passed for r in rows), "total": len(rows)}, rows


SCENARIOS = {
    "dispersion": run_dispersion,
    "dynamics": run_dynamics,
    "markov": run_markov,
    "map": run_map,
    "plan": run_plan,
    "lambshift": run_lambshift,
    "reproduce-paper": run_reproduce,
}


def run_scenario(name, cfg, outdir, **options):
    os.makedirs(outdir, exist_ok=True)
    return SCENARIOS[name](cfg, outdir, **options)
