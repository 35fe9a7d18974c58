"""Geometry factor, collective couplings and memory kernels.

Kernels are functions of the lag u >= 0 and are unit-agnostic: rates in
``KernelParams`` may be in s^-1 or in units of gamma, as long as ``u`` uses
the reciprocal unit. The free-space kernel needs the light rate c*k0 in the
same unit.
"""

import math
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from . import units as u_
from .errors import (NegativeLagError, NonPositiveArgumentError,
                     SingularKernelError, ValidationError)
from .specfun import bessel_j0, hankel_tilde

__all__ = [
    "EnsembleGeometry", "KernelParams", "MemoryKernel", "KIND_RESONANT",
    "KIND_DETUNED", "KIND_FREE", "KIND_COMBINED",
    "geometry_factor", "collective_coupling", "freespace_coupling",
    "resonant_kernel", "detuned_kernel", "freespace_kernel",
    "spp_kernel_params", "freespace_kernel_params",
]

KIND_RESONANT = "resonant-spp"
KIND_DETUNED = "detuned-spp"
KIND_FREE = "free-space"
KIND_COMBINED = "combined"
_KINDS = (KIND_RESONANT, KIND_DETUNED, KIND_FREE)

# beyond this many Gaussian widths the free-space kernel is below 1e-18
_GAUSS_CUTOFF = 13.0

_GL_NODES, _GL_WEIGHTS = np.polynomial.legendre.leggauss(8)
_GL_T = 0.5 * (_GL_NODES + 1.0)        # nodes on [0, 1]
_GL_W = 0.5 * _GL_WEIGHTS


@dataclass(frozen=True)
class EnsembleGeometry:
    """Gaussian emitter cloud: N emitters, rms width L (nm) in the plane."""

    n_emitters: int
    width_L: float

    def __post_init__(self):
        if self.n_emitters < 0 or int(self.n_emitters) != self.n_emitters:
            raise ValidationError(f"n_emitters must be a non-negative integer, got {self.n_emitters}")
        if not self.width_L > 0:
            raise ValidationError(f"width_L must be > 0 nm, got {self.width_L}")

    @property
    def density(self):
        """N / L^2 in nm^-2."""
        return self.n_emitters / self.width_L ** 2

    @classmethod
    def from_density(cls, density, width_L):
        return cls(int(round(density * width_L ** 2)), width_L)


def geometry_factor(geom, dk):
    """zeta = exp(-L^2 |dk|^2 / 2) for a scalar |dk| or a vector (..., 2)."""
    dk = np.asarray(dk, dtype=float)
    dk2 = dk * dk if dk.ndim == 0 else np.sum(dk * dk, axis=-1)
    return np.exp(-0.5 * geom.width_L ** 2 * dk2)


def collective_coupling(geom, spp):
    """varpi^2 = (N / 4L^2) * A(k_sp) in s^-2, from an ``SppMode``."""
    return geom.n_emitters / (4.0 * geom.width_L ** 2) * spp.residue_A_abs


def freespace_coupling(geom, emitter, k0):
    """varpi_0^2 = 3 N gamma_0 c^4 k0^2 / (16 pi omega_sg^3 L^2), s^-2.

    The dipole moment is eliminated through the vacuum decay rate gamma_0.
    """
    if not k0 > 0:
        raise NonPositiveArgumentError("k0 must be > 0")
    c = u_.C_NM_S
    return (3.0 * geom.n_emitters * emitter.gamma_0 * c ** 4 * k0 ** 2
            / (16.0 * math.pi * emitter.rate ** 3 * geom.width_L ** 2))


@dataclass(frozen=True)
class KernelParams:
    """Parameters of one kernel component.

    For ``free-space`` kernels ``v_over_L`` holds c/L, ``detuning`` holds
    Delta_0 = c k0 - omega_sg and ``light_rate`` holds c k0.
    """

    varpi_sq: float
    v_over_L: float = 0.0
    gamma: float = 0.0
    detuning: float = 0.0
    kind: str = KIND_RESONANT
    light_rate: float = 0.0

    def __post_init__(self):
        if self.kind not in _KINDS:
            raise ValidationError(f"unknown kernel kind {self.kind!r}")
        for name in ("varpi_sq", "v_over_L", "gamma"):
            if not getattr(self, name) >= 0:
                raise ValidationError(f"{name} must be >= 0, got {getattr(self, name)}")
        if self.kind == KIND_RESONANT and self.detuning != 0:
            raise ValidationError("resonant-spp kernel requires detuning = 0")
        if self.kind == KIND_FREE and not self.light_rate > 0:
            raise ValidationError("free-space kernel requires light_rate = c*k0 > 0")

    @property
    def fastest_rate(self):
        return max(math.sqrt(self.varpi_sq), self.gamma, self.v_over_L,
                   abs(self.detuning), self.light_rate)


def _check_lag(u, strict=False):
    u = np.asarray(u, dtype=float)
    if strict and np.any(~(u > 0)):
        raise NonPositiveArgumentError("free-space kernel needs u > 0 (log-singular at 0)")
    if np.any(u < 0):
        raise NegativeLagError("kernel lag must be >= 0")
    return u


def _smooth(p, u):
    rate = p.gamma - 1j * p.detuning
    return p.varpi_sq * np.exp(-0.25 * (p.v_over_L * u) ** 2 - rate * u)


def resonant_kernel(p, u):
    """K(u) = varpi^2 exp(-(v/L)^2 u^2 / 4 - gamma u)."""
    if p.kind != KIND_RESONANT:
        raise ValidationError(f"expected resonant-spp parameters, got {p.kind}")
    return _smooth(p, _check_lag(u)).real


def detuned_kernel(p, u):
    """K(u) = varpi^2 exp(-(v/L)^2 u^2 / 4 - (gamma - i Delta) u)."""
    if p.kind not in (KIND_DETUNED, KIND_RESONANT):
        raise ValidationError(f"expected detuned-spp parameters, got {p.kind}")
    return _smooth(p, _check_lag(u))


def _free(p, u):
    out = np.zeros(np.shape(u), dtype=complex)
    live = p.v_over_L * u < 2.0 * _GAUSS_CUTOFF
    if np.any(live):
        ul = u[live]
        out[live] = (-1j * math.pi * p.varpi_sq * hankel_tilde(p.light_rate * ul)
                     * np.exp(-1j * p.detuning * ul - 0.25 * (p.v_over_L * ul) ** 2))
    return out


def freespace_kernel(p, u):
    """K0(u) = -i pi varpi_0^2 H0~(c k0 u) exp(-i Delta_0 u - (c u / 2L)^2).

    H0~(x) = H0^(2)(x) e^{ix}; the kernel is log-singular at u = 0. The
    -i pi prefactor makes Re of its Markov integral reproduce the
    free-space decay rate.
    """
    if p.kind != KIND_FREE:
        raise ValidationError(f"expected free-space parameters, got {p.kind}")
    u = np.atleast_1d(_check_lag(u, strict=True))
    out = _free(p, u)
    return out if out.size > 1 else out[0]


def _singular_part(p, u):
    """S(u) with K0(u) = S(u) ln u + (smooth part)."""
    x = p.light_rate * u
    return (-2.0 * p.varpi_sq * bessel_j0(x)
            * np.exp(1j * (p.light_rate - p.detuning) * u - 0.25 * (p.v_over_L * u) ** 2))


@dataclass(frozen=True)
class KernelTable:
    u: np.ndarray
    values: np.ndarray
    step: float
    singular: bool


@dataclass(frozen=True)
class MemoryKernel:
    """Sum of kernel components; ``kind`` is ``combined`` for more than one."""

    components: tuple = field(default_factory=tuple)

    def __post_init__(self):
        if isinstance(self.components, KernelParams):
            object.__setattr__(self, "components", (self.components,))
        if not self.components:
            raise ValidationError("a memory kernel needs at least one component")

    @property
    def kind(self):
        return self.components[0].kind if len(self.components) == 1 else KIND_COMBINED

    @property
    def singular(self):
        return any(c.kind == KIND_FREE for c in self.components)

    @property
    def is_zero(self):
        return all(c.varpi_sq == 0 for c in self.components)

    @cached_property
    def tabulation_step(self):
        """1/(20 r) with r the fastest rate among varpi, gamma, v/L, |Delta|."""
        rate = max(c.fastest_rate for c in self.components)
        return math.inf if rate == 0 else 1.0 / (20.0 * rate)

    def __call__(self, u):
        u = _check_lag(u, strict=self.singular)
        shape = np.shape(u)
        u = np.atleast_1d(u)
        out = np.zeros(u.shape, dtype=complex)
        for c in self.components:
            out += _free(c, u) if c.kind == KIND_FREE else _smooth(c, u)
        return out.reshape(shape) if shape else out[0]

    def tabulate(self, step, n):
        """Values on u = 0, step, ..., (n-1) step; a singular u=0 entry is NaN."""
        if not step > 0:
            raise NonPositiveArgumentError("step must be > 0")
        grid = step * np.arange(n)
        vals = np.full(n, np.nan + 0j)
        start = 1 if self.singular else 0
        vals[start:] = self(grid[start:])
        return KernelTable(grid, vals, step, self.singular)

    def _smooth_moments(self, h, n, components):
        """Gauss-Legendre moments of the listed components over n cells."""
        m = np.arange(n)[:, None]
        uu = h * (m + _GL_T[None, :])
        vals = np.zeros(uu.shape, dtype=complex)
        for c in components:
            vals += _free(c, uu) if c.kind == KIND_FREE else _smooth(c, uu)
        k0 = h * vals @ _GL_W
        k1 = h * vals @ (_GL_W * _GL_T)
        return k0, k1

    def _singular_first_cell(self, h, c):
        """Moments of one free-space component over [0, h].

        K = S(u) ln u + R(u): S is interpolated by a degree-7 polynomial on
        the Gauss nodes and integrated against ln u exactly; R is smooth.
        """
        uu = h * _GL_T
        s_vals = _singular_part(c, uu)
        r_vals = _free(c, uu) - s_vals * np.log(uu)
        coeffs = np.polynomial.polynomial.polyfit(_GL_T, s_vals, len(_GL_T) - 1)
        log_h = math.log(h)
        moments = []
        for j in (0, 1):
            acc = 0j
            for m, cm in enumerate(coeffs):
                p = m + j + 1
                acc += cm * (log_h / p - 1.0 / p ** 2)
            moments.append(h * acc + h * np.sum(_GL_W * _GL_T ** j * r_vals))
        return moments[0], moments[1]

    def cell_moments(self, h, n, product_first_cell=True):
        """K0_m = int_{mh}^{(m+1)h} K du and K1_m = int K (u - mh)/h du.

        The log-singular first cell of free-space components is integrated
        by product integration; requesting plain Gauss-Legendre for it
        raises ``SingularKernelError``.
        """
        if not h > 0:
            raise NonPositiveArgumentError("step must be > 0")
        if self.singular and not product_first_cell:
            raise SingularKernelError(
                "free-space kernel is log-singular at u=0; product integration of "
                "the first cell is required")
        regular = [c for c in self.components if c.kind != KIND_FREE]
        free = [c for c in self.components if c.kind == KIND_FREE]
        k0 = np.zeros(n, dtype=complex)
        k1 = np.zeros(n, dtype=complex)
        if regular:
            a, b = self._smooth_moments(h, n, regular)
            k0 += a
            k1 += b
        for c in free:
            last = min(n, int(math.ceil(2.0 * _GAUSS_CUTOFF / (c.v_over_L * h))) + 1)
            s0, s1 = self._singular_first_cell(h, c)
            k0[0] += s0
            k1[0] += s1
            if last > 1:
                a, b = self._smooth_moments(h, last, [c])
                k0[1:last] += a[1:]
                k1[1:last] += b[1:]
        return k0, k1


def spp_kernel_params(model, emitter, geom, k, detuning=0.0):
    """Kernel parameters (s^-1 units) for the timed-Dicke state at |k| = k.

    ``detuning`` is omega_sg - omega_k in s^-1; zero gives the resonant kind.
    """
    from .graphene import residue_coefficient, group_velocity
    A = residue_coefficient(model, emitter, k).absolute
    varpi_sq = geom.n_emitters / (4.0 * geom.width_L ** 2) * A
    v = group_velocity(model, k) * 1e9
    kind = KIND_RESONANT if detuning == 0 else KIND_DETUNED
    return KernelParams(varpi_sq=float(varpi_sq), v_over_L=float(v / geom.width_L),
                        gamma=model.gamma, detuning=detuning, kind=kind)


def freespace_kernel_params(emitter, geom, k0):
    """Free-space kernel parameters (s^-1) for a timed-Dicke state at |k| = k0."""
    c = u_.C_NM_S
    return KernelParams(varpi_sq=freespace_coupling(geom, emitter, k0),
                        v_over_L=c / geom.width_L, gamma=0.0,
                        detuning=c * k0 - emitter.rate, kind=KIND_FREE,
                        light_rate=c * k0)
