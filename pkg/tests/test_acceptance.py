"""Numbered acceptance criteria, one PASS/FAIL line each.

Every criterion is a function returning ``(passed, detail)``. The pytest
wrappers record the line for the terminal summary and then assert, so a
failing criterion fails the run. ``python tests/test_acceptance.py`` prints
the same table without pytest.
"""

import math
import os
import sys
import tempfile
from contextlib import redirect_stdout
from io import StringIO
from pathlib import Path

import mpmath as mp
import numpy as np
import pytest
from scipy.integrate import quad

from spp_sim import units as u
from spp_sim.cli import main as cli_main
from spp_sim.directionality import sweep_grid
from spp_sim.dynamics import (fit_decay, fit_oscillation, markov_rate_gamma_c,
                              markov_rate_intermediate, solve_volterra)
from spp_sim.graphene import (Emitter, GrapheneModel, dispersion_omega,
                              dispersion_q, group_velocity,
                              residue_coefficient)
from spp_sim.kernels import (KIND_DETUNED, KIND_RESONANT, EnsembleGeometry,
                             KernelParams, resonant_kernel)
from spp_sim.lambshift import (collective_rate, collective_shifts,
                               kramers_kronig_real, pv_integral)
from spp_sim.planner import plan_train, validate_protection
from spp_sim.specfun import (bessel_j0, bessel_j1, bessel_y0, bessel_y1,
                             erfcx, hankel_h0_2_result)

MODEL = GrapheneModel(0.5, 0.5)
EM10 = Emitter(0.5, 1e8, 10.0)
EM20 = Emitter(0.5, 1e8, 20.0)


def rel(a, b):
    return abs(a - b) / abs(b)


def exact_alpha(varpi, gamma, t):
    root = np.sqrt(complex(gamma * gamma - 4 * varpi * varpi))
    lp, lm = 0.5 * (-gamma + root), 0.5 * (-gamma - root)
    return (lp * np.exp(lm * t) - lm * np.exp(lp * t)) / (lp - lm)


def criterion_1():
    q = float(dispersion_q(MODEL, 0.5))
    lam = 2 * math.pi / q
    lam_far = 2 * math.pi / float(dispersion_q(MODEL, 0.01)) * 1e-3
    ok = rel(q, 0.174) <= 5e-3 and rel(lam, 36.2) <= 5e-3 and rel(lam_far, 90.0) <= 1e-2
    return ok, f"q_sp = {q:.6f} nm^-1, lambda_sp = {lam:.3f} nm, lambda_sp(0.01 eV) = {lam_far:.2f} um"


def criterion_2():
    a10 = residue_coefficient(MODEL, EM10, 0.174).per_gamma0
    a20 = residue_coefficient(MODEL, EM20, 0.174).per_gamma0
    q = float(dispersion_q(MODEL, 0.5))
    ratio = residue_coefficient(MODEL, EM20, q).per_gamma0 / residue_coefficient(MODEL, EM10, q).per_gamma0
    # z = z' moves from 10 to 20 nm, so the exponent changes by 2 q * 10 nm
    expected = math.exp(-2 * q * 10.0)
    ok = rel(a10, 1.87e20) <= 0.02 and rel(a20, 5.73e18) <= 0.02 and rel(ratio, expected) <= 1e-6
    return ok, (f"A(10 nm) = {a10:.4e}, A(20 nm) = {a20:.4e} gamma0 nm^2/s at q = 0.174; "
                f"ratio {ratio:.7f} vs exp(-2 q_sp 10 nm) = {expected:.7f}")


def criterion_3():
    q = float(dispersion_q(MODEL, 0.5))
    v = float(group_velocity(MODEL, q))
    h = 1e-6
    fd = (u.ev_to_rate(dispersion_omega(MODEL, q * (1 + h)))
          - u.ev_to_rate(dispersion_omega(MODEL, q * (1 - h)))) / (2 * q * h) * 1e-9
    analytic = u.ev_to_rate(float(dispersion_omega(MODEL, q))) / (2 * q) * 1e-9
    vc = v / u.C_M_S
    ok = 0.006 <= vc <= 0.012 and rel(fd, analytic) <= 1e-6 and rel(v, analytic) <= 1e-12
    return ok, f"v_sp/c = {vc:.5f}; finite difference vs omega/2q: {rel(fd, analytic):.1e}"


def criterion_4():
    parts, ok = [], True
    for varpi, gamma in ((10.0, 1.0), (2.0, 1.0), (0.1, 1.0)):
        p = KernelParams(varpi_sq=varpi ** 2, gamma=gamma)
        h = 1e-3 / max(varpi, gamma)
        errs = []
        for step in (h, h / 2):
            traj = solve_volterra(p, 10.0, step, richardson=False)
            errs.append(float(np.max(np.abs(traj.alpha - exact_alpha(varpi, gamma, traj.t)))))
        order = math.log2(errs[0] / errs[1])
        ok &= errs[0] <= 1e-6 and abs(order - 2.0) <= 0.2
        parts.append(f"({varpi:g},{gamma:g}): err {errs[0]:.2e}, order {order:.3f}")
    return ok, "; ".join(parts)


def criterion_5():
    traj = solve_volterra(KernelParams(varpi_sq=0.01, gamma=1.0), 500.0, 0.01, richardson=False)
    rate = fit_decay(traj)
    ok = rel(rate, 0.01) <= 0.05
    rng = np.random.default_rng(5)
    worst = 0.0
    for _ in range(3):
        varpi, gamma, vl = rng.uniform(0.05, 3.0, size=3)
        p = KernelParams(varpi_sq=varpi ** 2, v_over_L=vl, gamma=gamma)
        val = quad(lambda s: resonant_kernel(p, s), 0, np.inf, epsabs=0, epsrel=1e-13)[0]
        worst = max(worst, rel(val, markov_rate_gamma_c(varpi, gamma, vl)))
    ok &= worst <= 1e-8
    return ok, f"fitted decay {rate:.6f} gamma vs varpi^2/gamma = 0.01; quad vs Gamma_c worst {worst:.1e}"


def criterion_6():
    p = KernelParams(varpi_sq=100.0, v_over_L=0.1, gamma=1.0)
    traj = solve_volterra(p, 5.0, 1e-4, richardson=False)
    freq, _ = fit_oscillation(traj)
    return rel(freq, 10.0) <= 0.15, f"fitted frequency {freq:.4f} gamma vs varpi = 10 gamma"


def criterion_7():
    life = 1.0 / markov_rate_intermediate(0.1, 1.0, 10.0)
    ok = life > 1e4
    parts = [f"lifetime {life:.4g}/gamma"]
    for varpi in (10.0, 2.0):
        mins = []
        for delta in (0.0, 5.0, 10.0):
            kind = KIND_DETUNED if delta else KIND_RESONANT
            p = KernelParams(varpi_sq=varpi ** 2, v_over_L=0.1, gamma=1.0, detuning=delta, kind=kind)
            traj = solve_volterra(p, 5.0, 1e-3 / max(varpi, delta, 1.0), richardson=False)
            mins.append(float(np.abs(traj.alpha).min()))
        ok &= mins[0] < mins[1] < mins[2]
        parts.append(f"varpi={varpi:g}: min|alpha| " + ", ".join(f"{m:.3g}" for m in mins))
    return ok, "; ".join(parts)


def criterion_8():
    plan = plan_train(MODEL, EM10, 500.0)
    rep = validate_protection(plan, MODEL, EM10, raise_on_violation=False)
    d = plan.delta_n[-2]
    ok = plan.pulse_count == 15 and rel(d, 0.035) <= 0.15 and all(rep.outside_light_cone)
    return ok, (f"{plan.pulse_count} pulses, Delta_(n_p-1) = {d:.5f} eV, "
                f"{sum(rep.outside_light_cone)}/{plan.n_p} intermediate states outside the light cone")


def criterion_9():
    model = GrapheneModel(0.5, 1.0)
    grids = {L: sweep_grid(model, EM10, EnsembleGeometry(int(0.01 * L * L), L), 1e10)
             for L in (1000.0, 100.0)}
    g = grids[1000.0]
    i, j = g.peak_index
    cell = g.ky[1] - g.ky[0]
    peak_ok = abs(g.ky[i] - 1.0) <= cell and abs(g.kx[j]) <= cell
    sym = float(np.max(np.abs(g.values - g.values[:, ::-1])))
    ratio = grids[100.0].fwhm_transverse / g.fwhm_transverse
    ok = peak_ok and sym <= 1e-12 and rel(ratio, 10.0) <= 0.1
    return ok, (f"peak at ({g.kx[j]:.4f}, {g.ky[i]:.4f}) k_sp, asymmetry {sym:.1e}, "
                f"FWHM ratio {ratio:.4f}")


def criterion_10():
    pv_const = abs(pv_integral(np.ones(2001), 0.01, 1000))
    x_q, g = 1.0, 0.01
    h = g / 8
    x = np.arange(int(round(20.0 / h)) + 1) * h
    im = g / ((x - x_q) ** 2 + g * g) - g / ((x + x_q) ** 2 + g * g)
    idx = np.nonzero(np.abs(x - x_q) < 5 * g)[0]
    xp = x[idx]
    exact = (x_q - xp) / ((xp - x_q) ** 2 + g * g) + (x_q + xp) / ((xp + x_q) ** 2 + g * g)
    kk = float(np.max(np.abs(kramers_kronig_real(im, h, idx) - exact)) * 2 * g)
    L = 1e5
    geom = EnsembleGeometry(int(0.01 * L * L), L)
    k_sp = float(dispersion_q(MODEL, 0.5))
    A = residue_coefficient(MODEL, EM10, k_sp).absolute
    varpi = math.sqrt(geom.n_emitters / (4 * L * L) * A)
    v = group_velocity(MODEL, k_sp) * 1e9
    gc = collective_rate(MODEL, EM10, geom)
    gm = markov_rate_gamma_c(varpi, MODEL.gamma, v / L)
    s = collective_shifts(MODEL, EM10, EnsembleGeometry(10000, 1e3))
    book = s.delta_collective - (s.delta_s - s.delta_g - s.delta_single)
    ok = pv_const <= 1e-14 and kk <= 0.01 and rel(gc, gm) <= 0.05 and book == 0.0
    return ok, (f"PV(const) = {pv_const:.1e}, KK error {kk:.2e} of peak, "
                f"gamma_c/Gamma_c = {gc / gm:.6f}, bookkeeping residual {book:g}")


def criterion_11():
    mp.mp.dps = 40
    worst = 0.0
    for x in np.linspace(0.0, 50.0, 101):
        xm = mp.mpf(float(x))
        ref = 2 / mp.sqrt(mp.pi) * mp.quad(lambda t: mp.exp(-t * t - 2 * xm * t),
                                            [0, 1 / (1 + xm), mp.inf])
        worst = max(worst, abs(erfcx(x) - float(ref)) / float(ref))
    overlap = max(abs(hankel_h0_2_result(x, "series").value - hankel_h0_2_result(x, "asymptotic").value)
                  / abs(hankel_h0_2_result(x, "asymptotic").value)
                  for x in np.linspace(8.0, 12.0, 41))
    wr = max(abs((bessel_j1(x) * bessel_y0(x) - bessel_j0(x) * bessel_y1(x)) * math.pi * x / 2 - 1)
             for x in (0.5, 5.0, 50.0))
    ok = worst <= 1e-12 and overlap <= 1e-9 and wr <= 1e-10
    return ok, f"erfcx worst {worst:.1e}, Hankel overlap {overlap:.1e}, Wronskian {wr:.1e}"


def _tree(root):
    return {p.relative_to(root).as_posix(): p.read_bytes()
            for p in sorted(Path(root).rglob("*")) if p.is_file()}


def criterion_12():
    with tempfile.TemporaryDirectory() as tmp:
        cfg = os.path.join(tmp, "run.cfg")
        with open(cfg, "w") as fh:
            fh.write("outputs.figures = true\n")
        codes, trees = [], []
        for name in ("first", "second"):
            out = os.path.join(tmp, name)
            with redirect_stdout(StringIO()):
                codes.append(cli_main(["reproduce-paper", "--config", cfg, "--out", out]))
            trees.append(_tree(out))
    same = trees[0] == trees[1]
    return same and codes == [0, 0], f"{len(trees[0])} files, identical = {same}, exit codes {codes}"


CRITERIA = {n: globals()[f"criterion_{n}"] for n in range(1, 13)}


def _line(n, ok, detail):
    return f"criterion {n}: {'PASS' if ok else 'FAIL'}  {detail}"


@pytest.mark.acceptance
@pytest.mark.parametrize("n", sorted(CRITERIA))
def test_criterion(n):
    from conftest import ACCEPTANCE_LINES
    ok, detail = CRITERIA[n]()
    line = _line(n, ok, detail)
    ACCEPTANCE_LINES.append(line)
    print(line)
    assert ok, line


if __name__ == "__main__":
    results = [CRITERIA[n]() for n in sorted(CRITERIA)]
    for n, (ok, detail) in zip(sorted(CRITERIA), results):
        print(_line(n, ok, detail))
    sys.exit(0 if all(ok for ok, _ in results) else 1)
