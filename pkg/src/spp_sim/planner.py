"""Pi-pulse train that writes the SPP wave vector into the ensemble phase.

Convention: the two pulse fields have antiparallel in-plane wave vectors of
equal magnitude |k1| = |k2| = k_sp/(2 n_p + 1) along the k_sp direction, so
that -(n_p + 1) k1 + n_p k2 = k_sp holds exactly and the intermediate states
sit at q_n = (2n + 1)|k1|. This is one consistent choice; the construction
only fixes the sum.
"""

import math
from dataclasses import asdict, dataclass, field

import numpy as np

from . import units as u
from .dynamics import markov_rate_intermediate
from .errors import (InfeasiblePlanError, NonPositiveArgumentError,
                     ProtectionViolatedError, ValidationError)
from .graphene import dispersion_omega, dispersion_q
from .io import dumps_json, write_json

__all__ = [
    "PulsePlan", "ProtectionReport", "plan_train", "survival_budget",
    "validate_protection", "pulse_count_for", "DEFAULT_DWELL_S",
]

DEFAULT_DWELL_S = 1e-9
CONVENTION = "antiparallel equal-magnitude pulses, exact final matching"


@dataclass
class PulsePlan:
    """Pulse-train plan. Wave vectors in nm^-1, detunings in eV, rates in s^-1."""

    lambda_es: float
    k1: tuple
    k2: tuple
    n_p: int
    pulse_count: int
    q_n: list
    delta_n: list
    gamma_n: list = field(default_factory=list)
    pulse_duration: float = DEFAULT_DWELL_S
    survival: float = 1.0
    convention: str = CONVENTION

    def q_magnitudes(self):
        return np.hypot(*np.asarray(self.q_n, dtype=float).T)

    def to_dict(self):
        return asdict(self)

    def to_json(self, path=None):
        if path is None:
            return dumps_json(self.to_dict())
        write_json(path, self.to_dict())

    def table(self):
        """Human-readable table of the intermediate steps."""
        lines = [f"pulse train: lambda_es = {self.lambda_es:g} nm, n_p = {self.n_p}, "
                 f"{self.pulse_count} pulses ({self.convention})",
                 f"{'n':>3} {'|q_n| (nm^-1)':>15} {'Delta_n (eV)':>14} {'Gamma_n (s^-1)':>15}"]
        mags = self.q_magnitudes()
        for n, (qm, d) in enumerate(zip(mags, self.delta_n)):
            g = self.gamma_n[n] if n < len(self.gamma_n) else float("nan")
            lines.append(f"{n:>3} {qm:>15.6e} {d:>14.6e} {g:>15.6e}")
        lines.append(f"survival = {self.survival:.6f} (dwell {self.pulse_duration:g} s per step)")
        return "\n".join(lines)


@dataclass(frozen=True)
class ProtectionReport:
    light_cone: float              # omega_sg / c, nm^-1
    outside_light_cone: list       # per n < n_p
    below_resonance: list          # |q_n| < k_sp per n < n_p
    delta_free: list               # Delta_n^(0) = c|q_n| - omega_sg, eV
    ratio: list                    # Delta_n^(0) / Delta_n
    ratio_threshold: float
    ratio_ok: list                 # ratio > threshold
    protected: bool

    def to_dict(self):
        return asdict(self)


def pulse_count_for(lambda_es, lambda_sp):
    """n_p = ceil((lambda_es/lambda_sp - 1)/2), floored at 0."""
    return max(0, math.ceil((lambda_es / lambda_sp - 1.0) / 2.0 - 1e-12))


def plan_train(model, emitter, lambda_es, k_direction=(0.0, 1.0)):
    """Plan the pulse train for the SPP at omega_sg.

    Parameters
    ----------
    lambda_es : float
        Optical wavelength of the pulses in nm.
    k_direction : (float, float)
        Direction of k_sp in the plane.
    """
    if not lambda_es > 0:
        raise NonPositiveArgumentError("lambda_es must be > 0")
    k_sp = float(dispersion_q(model, emitter.omega_sg))
    lambda_sp = 2.0 * math.pi / k_sp
    n_p = pulse_count_for(lambda_es, lambda_sp)
    d = np.asarray(k_direction, dtype=float)
    d = d / np.hypot(*d)
    k_mag = k_sp / (2 * n_p + 1)
    if k_mag > 2.0 * math.pi / lambda_es * (1 + 1e-12):
        raise InfeasiblePlanError(
            f"per-pulse in-plane wavenumber {k_mag:.4g} exceeds 2pi/lambda_es")
    k1 = -k_mag * d
    k2 = k_mag * d
    q_n, delta_n = [], []
    for n in range(n_p + 1):
        q = -(n + 1) * k1 + n * k2
        q_n.append((float(q[0]), float(q[1])))
        if n == n_p:
            delta_n.append(0.0)
        else:
            qm = (2 * n + 1) * k_mag
            delta_n.append(float(emitter.omega_sg - dispersion_omega(model, qm)))
    return PulsePlan(lambda_es=float(lambda_es), k1=(float(k1[0]), float(k1[1])),
                     k2=(float(k2[0]), float(k2[1])), n_p=n_p, pulse_count=2 * n_p + 1,
                     q_n=q_n, delta_n=delta_n)


def survival_budget(plan, varpi, gamma, pulse_duration=DEFAULT_DWELL_S):
    """exp(-sum_n Gamma_qn tau) over the intermediate steps n < n_p.

    Rates in s^-1, ``pulse_duration`` (dwell per step) in s. Fills
    ``plan.gamma_n``, ``plan.pulse_duration`` and ``plan.survival``.
    """
    if pulse_duration < 0:
        raise ValidationError("pulse_duration must be >= 0")
    rates = [markov_rate_intermediate(varpi, gamma, u.ev_to_rate(d)) for d in plan.delta_n[:-1]]
    plan.gamma_n = [float(r) for r in rates]
    plan.pulse_duration = float(pulse_duration)
    plan.survival = float(math.exp(-sum(rates) * pulse_duration))
    return plan.survival


def validate_protection(plan, model, emitter, ratio_threshold=10.0, raise_on_violation=True):
    """Check that every intermediate state n < n_p is protected.

    Each |q_n| must lie outside the light cone and below k_sp. The ratios
    Delta_n^(0)/Delta_n are reported and compared with ``ratio_threshold``
    but do not decide protection. Raises ``ProtectionViolatedError`` (with
    the report attached) when a state sits inside the light cone.
    """
    k_sp = float(dispersion_q(model, emitter.omega_sg))
    cone = emitter.light_wavenumber
    mags = plan.q_magnitudes()[:-1]
    outside = [bool(m > cone) for m in mags]
    below = [bool(m < k_sp) for m in mags]
    free = [float(u.HBAR_C_EV_NM * m - emitter.omega_sg) for m in mags]
    ratio = [f / d if d > 0 else math.inf for f, d in zip(free, plan.delta_n[:-1])]
    report = ProtectionReport(
        light_cone=cone, outside_light_cone=outside, below_resonance=below,
        delta_free=free, ratio=ratio, ratio_threshold=ratio_threshold,
        ratio_ok=[bool(r > ratio_threshold) for r in ratio],
        protected=all(outside) and all(below))
    if raise_on_violation and not all(outside):
        bad = [n for n, ok in enumerate(outside) if not ok]
        raise ProtectionViolatedError(
            f"intermediate states {bad} lie inside the light cone", report=report)
    return report
