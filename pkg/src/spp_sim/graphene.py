"""Drude graphene: conductivity, p-mode reflection, SPP poles and coupling.

Unit conventions for this module: energies in eV, in-plane wavenumbers in
nm^-1, heights in nm, rates (damping, emitter decay) as angular s^-1, the
conductivity in siemens, group velocity in m/s. The residue coefficient
``A`` is reported per unit vacuum decay rate, in nm^2/s.
"""

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from . import units as u
from .errors import (BranchAmbiguityError, NonPositiveArgumentError,
                     OverdampedPoleError, ValidationError)

__all__ = [
    "GrapheneModel", "Emitter", "SppMode", "SppPole", "Conductivity", "Residue",
    "drude_conductivity", "fresnel_rp", "pole_find", "dispersion_omega",
    "dispersion_q", "spp_wavelength", "group_velocity", "residue_coefficient",
    "lorentzian_im_g", "spp_mode", "is_valid", "rp_denominator",
]


@dataclass(frozen=True)
class GrapheneModel:
    """Graphene monolayer in vacuum.

    Parameters
    ----------
    fermi_energy : float
        E_f in eV.
    drude_time : float
        Drude relaxation time tau_D in ps. ``math.inf`` gives the lossless limit.
    """

    fermi_energy: float = 0.5
    drude_time: float = 0.5
    permittivity_above: float = 1.0
    permittivity_below: float = 1.0

    def __post_init__(self):
        if not self.fermi_energy > 0:
            raise ValidationError(f"fermi_energy must be > 0 eV, got {self.fermi_energy}")
        if not self.drude_time > 0:
            raise ValidationError(f"drude_time must be > 0 ps, got {self.drude_time}")
        if self.permittivity_above != 1.0 or self.permittivity_below != 1.0:
            raise ValidationError("only vacuum above and below the sheet is supported")

    @property
    def gamma(self):
        """SPP damping 1/(2 tau_D), s^-1."""
        return u.drude_damping(self.drude_time)

    @property
    def collision_rate(self):
        """1/tau_D, s^-1."""
        return 2.0 * self.gamma

    @property
    def plasma_coefficient(self):
        """beta in omega^2 = beta q, with omega in s^-1 and q in nm^-1."""
        return 2.0 * u.ALPHA * u.C_NM_S * self.fermi_energy / u.HBAR_EV_S


@dataclass(frozen=True)
class Emitter:
    """Two-level emitter with its dipole perpendicular to the sheet.

    omega_sg in eV, gamma_0 (vacuum decay rate) in s^-1, z_at in nm.
    """

    omega_sg: float = 0.5
    gamma_0: float = 1e8
    z_at: float = 10.0

    def __post_init__(self):
        for name in ("omega_sg", "gamma_0", "z_at"):
            if not getattr(self, name) > 0:
                raise ValidationError(f"{name} must be > 0, got {getattr(self, name)}")

    @property
    def rate(self):
        """Transition angular frequency in s^-1."""
        return u.ev_to_rate(self.omega_sg)

    @property
    def light_wavenumber(self):
        """omega_sg / c in nm^-1."""
        return self.omega_sg / u.HBAR_C_EV_NM


class Conductivity(NamedTuple):
    sigma: complex
    valid: bool


class SppPole(NamedTuple):
    omega: float   # eV
    gamma: float   # s^-1
    valid: bool


class Residue(NamedTuple):
    per_gamma0: float   # nm^2/s
    absolute: float     # nm^2/s^2


@dataclass(frozen=True)
class SppMode:
    k: tuple
    omega: float
    gamma: float
    group_velocity: float
    residue_A: float
    residue_A_abs: float
    valid: bool


def is_valid(model, omega_ev, gamma=None):
    """Drude-pole validity: hbar*omega < 2 E_f and omega >= 10 gamma."""
    gamma = model.gamma if gamma is None else gamma
    omega_ev = np.asarray(omega_ev)
    ok = (omega_ev < 2.0 * model.fermi_energy) & (u.ev_to_rate(omega_ev) >= 10.0 * gamma)
    return bool(ok) if ok.ndim == 0 else ok


def _positive(name, x):
    arr = np.asarray(x)
    if np.any(~(np.real(arr) > 0)):
        raise NonPositiveArgumentError(f"{name} must be > 0")


def _sigma_rate(model, omega_rate):
    """Drude sigma(omega) in S for an angular frequency (complex allowed)."""
    prefactor = u.E_CHARGE * model.fermi_energy / (math.pi * u.HBAR_EV_S ** 2)
    return prefactor * 1j / (omega_rate + 1j * model.collision_rate)


def drude_conductivity(model, omega):
    """Sheet conductivity sigma = (e^2 E_f / pi hbar^2) i/(omega + i/tau_D).

    ``omega`` is a photon energy in eV (real or complex). Returns
    ``Conductivity(sigma, valid)`` with sigma in siemens.
    """
    _positive("omega", omega)
    sigma = _sigma_rate(model, u.ev_to_rate(np.asarray(omega)))
    valid = np.real(omega) < 2.0 * model.fermi_energy
    if np.ndim(sigma) == 0:
        return Conductivity(complex(sigma), bool(valid))
    return Conductivity(sigma, valid)


def _qz(omega_rate, q_m, mode):
    if mode == "quasistatic":
        return 1j * q_m
    k0sq = (omega_rate / u.C_M_S) ** 2
    diff = k0sq - q_m ** 2
    if np.any(np.abs(diff) < 1e-30 * 1e18):   # 1e-30 nm^-2 expressed in m^-2
        raise BranchAmbiguityError("q is on the light line; q_z branch is ambiguous")
    qz = np.sqrt(diff + 0j)
    return np.where(np.imag(qz) < 0, -qz, qz)


def fresnel_rp(model, omega, q, qz_mode="exact"):
    """p-polarized reflection r_p = sigma q_z / (2 omega eps0 + sigma q_z).

    ``omega`` in eV (complex allowed for pole checks), ``q`` in nm^-1.
    ``qz_mode="exact"`` uses q_z = sqrt(omega^2/c^2 - q^2) with Im q_z >= 0;
    ``"quasistatic"`` uses q_z = i q, the approximation behind the pole
    equation.
    """
    _positive("q", q)
    w = u.ev_to_rate(np.asarray(omega, dtype=complex))
    sigma = _sigma_rate(model, w)
    qz = _qz(w, np.asarray(q) * 1e9, qz_mode)
    return sigma * qz / (2.0 * w * u.EPS0 + sigma * qz)


def rp_denominator(model, omega, q, qz_mode="exact"):
    """(2 omega eps0 + sigma q_z, 2 omega eps0); zero of the first is the pole."""
    w = u.ev_to_rate(np.asarray(omega, dtype=complex))
    sigma = _sigma_rate(model, w)
    qz = _qz(w, np.asarray(q) * 1e9, qz_mode)
    return 2.0 * w * u.EPS0 + sigma * qz, 2.0 * w * u.EPS0


def pole_find(model, q):
    """Closed-form root of w(w + i/tau_D) = 2 alpha c E_f q / hbar.

    Returns ``SppPole(omega [eV], gamma [s^-1], valid)`` where the complex
    root is omega - i gamma.
    """
    _positive("q", q)
    q = np.asarray(q, dtype=float)
    g = model.gamma
    disc = model.plasma_coefficient * q - g * g
    if np.any(disc <= 0):
        raise OverdampedPoleError(
            "2 alpha c E_f q / hbar <= 1/(4 tau_D^2): no propagating SPP at this q")
    omega_rate = np.sqrt(disc)
    omega = u.rate_to_ev(omega_rate)
    gamma = np.full_like(omega_rate, g)
    valid = (omega < 2.0 * model.fermi_energy) & (omega_rate >= 10.0 * g)
    if q.ndim == 0:
        return SppPole(float(omega), float(gamma), bool(valid))
    return SppPole(omega, gamma, valid)


def dispersion_omega(model, q):
    """Lossless dispersion hbar*omega = hbar sqrt(2 alpha c E_f q / hbar), eV."""
    _positive("q", q)
    return u.rate_to_ev(np.sqrt(model.plasma_coefficient * np.asarray(q, dtype=float)))


def dispersion_q(model, omega):
    """Inverse dispersion q = hbar omega^2/(2 alpha c E_f), nm^-1."""
    _positive("omega", omega)
    w = u.ev_to_rate(np.asarray(omega, dtype=float))
    return w * w / model.plasma_coefficient


def spp_wavelength(model, omega):
    """lambda_sp = 2 pi / q in nm."""
    return 2.0 * math.pi / dispersion_q(model, omega)


def group_velocity(model, q):
    """d omega / dq = omega / (2 q) in m/s."""
    _positive("q", q)
    q = np.asarray(q, dtype=float)
    w = np.sqrt(model.plasma_coefficient * q)
    return w / (2.0 * q) * 1e-9


def residue_coefficient(model, emitter, q, z=None, z_prime=None):
    """Pole-strength coefficient A_{z,z'}(q).

    A = 3/(4 omega_sg^3) c^3 omega_q q exp(-q (z + z')) per unit gamma_0
    (nm^2/s), with z = z' = z_at unless given. The pole must exist at q.
    """
    pole_find(model, q)
    z = emitter.z_at if z is None else z
    z_prime = z if z_prime is None else z_prime
    q = np.asarray(q, dtype=float)
    w_q = np.sqrt(model.plasma_coefficient * q)
    w_sg = emitter.rate
    per = 0.75 * u.C_NM_S ** 3 / w_sg ** 3 * w_q * q * np.exp(-q * (z + z_prime))
    if q.ndim == 0:
        per = float(per)
    return Residue(per, per * emitter.gamma_0)


def lorentzian_im_g(model, emitter, omega, q):
    """Pole approximation Im g = A gamma_q / ((w - w_q)^2 + gamma_q^2), nm^2/s.

    ``omega`` in eV; ``A`` is the absolute residue coefficient.
    """
    A = residue_coefficient(model, emitter, q).absolute
    w_q = np.sqrt(model.plasma_coefficient * np.asarray(q, dtype=float))
    g = model.gamma
    dw = u.ev_to_rate(np.asarray(omega, dtype=float)) - w_q
    return A * g / (dw * dw + g * g)


def spp_mode(model, emitter, k):
    """Bundle pole, group velocity and residue for an in-plane wave vector."""
    kx, ky = (float(k), 0.0) if np.ndim(k) == 0 else (float(k[0]), float(k[1]))
    q = math.hypot(kx, ky)
    pole = pole_find(model, q)
    res = residue_coefficient(model, emitter, q)
    return SppMode(
        k=(kx, ky),
        omega=pole.omega,
        gamma=pole.gamma,
        group_velocity=float(group_velocity(model, q)),
        residue_A=res.per_gamma0,
        residue_A_abs=res.absolute,
        valid=pole.valid,
    )
