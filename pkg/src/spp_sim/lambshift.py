"""Collective decay rate and collective Lamb shifts of the timed-Dicke state.

Frequencies are handled internally as angular rates (s^-1) on a uniform grid
x_j = j h that places omega_sg on a node. The self-coupling spectrum

    Im g_aa(x) = int d^2k/(2pi)^2 Im g(x, k)

is, after substituting k = W^2/beta (W the SPP frequency), a convolution of

    G(W) = a0 W^6 exp(-2 z W^2 / beta) / (pi beta^3)

with the Lorentzian gamma/((x - W)^2 + gamma^2), evaluated by FFT.

Principal values use the subtraction form

    PV int f(x)/(x - x_p) dx = int (f(x) - f(x_p))/(x - x_p) dx + f(x_p) ln((b - x_p)/(x_p - a)),

with the smooth integrand summed by the trapezoid rule and its pole value
f'(x_p) taken from a fourth-order central difference. On a pole-centered
symmetric grid the log term vanishes, constants integrate to zero, and
linear functions are integrated exactly. The resulting rule is a fixed
weight vector, so every PV sum is a dot product (or an FFT correlation).
"""

import math
from dataclasses import asdict, dataclass, field

import numpy as np
from scipy.signal import fftconvolve
from scipy.special import i0e

from . import units as u
from .errors import (CutoffTooSmallError, PvGridMisalignedError,
                     ValidationError)
from .graphene import dispersion_q, group_velocity
from .io import write_json

__all__ = [
    "ShiftResult", "FrequencyGrid", "pv_weights", "pv_integral",
    "kramers_kronig_real", "self_coupling_spectrum", "collective_rate",
    "collective_shifts", "default_k_max", "DEFAULT_OMEGA_MAX_FACTOR",
]

DEFAULT_OMEGA_MAX_FACTOR = 20.0
POINTS_PER_GAMMA = 4
_SUPPRESSION = 1e-8

_GL16_X, _GL16_W = np.polynomial.legendre.leggauss(16)


# ---------------------------------------------------------------------------
# principal values on a uniform grid

def _trapezoid_weights(n, h):
    w = np.full(n, h)
    w[0] = w[-1] = 0.5 * h
    return w


def pv_weights(n, h, pole_index):
    """Weights c with sum_j c_j f(x_j) ~ PV int_{x_0}^{x_{n-1}} f(x)/(x - x_p) dx.

    The pole x_p = x_{pole_index} must be an interior node with at least
    one node on either side; ``PvGridMisalignedError`` otherwise.
    """
    p = int(pole_index)
    if p != pole_index or p < 1 or p > n - 2:
        raise PvGridMisalignedError("the pole must sit on an interior grid node")
    w = _trapezoid_weights(n, h)
    offs = (np.arange(n) - p).astype(float) * h       # exact symmetric offsets
    c = np.zeros(n)
    mask = np.arange(n) != p
    c[mask] = w[mask] / offs[mask]
    c[p] = -np.sum(c[mask]) + math.log((n - 1 - p) / p)
    # w_p * f'(x_p) from a central difference
    wp = w[p] / h
    if 2 <= p <= n - 3:
        c[p + 1] += wp * 8.0 / 12.0
        c[p - 1] -= wp * 8.0 / 12.0
        c[p + 2] -= wp / 12.0
        c[p - 2] += wp / 12.0
    else:
        c[p + 1] += wp * 0.5
        c[p - 1] -= wp * 0.5
    return c


def pv_integral(values, h, pole_index):
    """PV int f(x)/(x - x_p) dx from samples of f on a uniform grid."""
    values = np.asarray(values)
    return np.dot(pv_weights(len(values), h, pole_index), values)


def kramers_kronig_real(im_values, h, indices=None):
    """Real part from the imaginary part on the grid x_j = j h, x_0 = 0.

    Re g(x_p) = (1/pi) [PV int Im g(x)/(x - x_p) dx + int Im g(x)/(x + x_p) dx]
    for each requested interior index p (default: all interior nodes).
    """
    im_values = np.asarray(im_values, dtype=float)
    n = len(im_values)
    if indices is None:
        indices = range(1, n - 1)
    x = np.arange(n) * h
    w = _trapezoid_weights(n, h)
    out = []
    for p in indices:
        reg = np.dot(w, im_values / (x + x[p]))
        out.append((pv_integral(im_values, h, p) + reg) / math.pi)
    return np.array(out)


# ---------------------------------------------------------------------------
# spectrum

def default_k_max(model, emitter):
    """max(10 k_sp, 10/(2 z_at)) in nm^-1."""
    k_sp = float(dispersion_q(model, emitter.omega_sg))
    return max(10.0 * k_sp, 10.0 / (2.0 * emitter.z_at))


def _check_k_max(emitter, k_max):
    if math.exp(-2.0 * k_max * emitter.z_at) >= _SUPPRESSION:
        raise CutoffTooSmallError(
            f"k_max = {k_max:g} nm^-1 leaves exp(-2 k_max z_at) >= {_SUPPRESSION:g}")


def _a0(emitter):
    """A(k) = a0 * omega_k * k * exp(-2 k z), nm^2 s^-2 with k in nm^-1."""
    return 0.75 * u.C_NM_S ** 3 * emitter.gamma_0 / emitter.rate ** 3


def _g_density(model, emitter, W):
    beta = model.plasma_coefficient
    return _a0(emitter) * W ** 6 * np.exp(-2.0 * emitter.z_at * W * W / beta) / (math.pi * beta ** 3)


def self_coupling_spectrum(model, emitter, omega, k_max=None):
    """Im g_aa(omega) = int_{|k|<k_max} d^2k/(2pi)^2 Im g(omega, k), in s^-1.

    ``omega`` in eV (scalar or array). Evaluated by adaptive quadrature over
    the SPP frequency W = sqrt(beta k).
    """
    from scipy.integrate import quad
    k_max = default_k_max(model, emitter) if k_max is None else k_max
    _check_k_max(emitter, k_max)
    beta = model.plasma_coefficient
    g = model.gamma
    W_max = math.sqrt(beta * k_max)
    x = np.atleast_1d(u.ev_to_rate(np.asarray(omega, dtype=float)))
    out = np.empty(x.shape)
    for i, xi in enumerate(x):
        f = lambda W: _g_density(model, emitter, W) * g / ((xi - W) ** 2 + g * g)
        pts = [p for p in (xi - 5 * g, xi, xi + 5 * g) if 0 < p < W_max]
        out[i] = quad(f, 0.0, W_max, points=pts or None, limit=400,
                      epsabs=0.0, epsrel=1e-11)[0]
    return out if np.ndim(omega) else float(out[0])


@dataclass(frozen=True)
class FrequencyGrid:
    """Uniform grid x_j = j h (s^-1) with omega_sg on node ``pole_index``."""

    h: float
    n: int
    pole_index: int

    @property
    def x(self):
        return np.arange(self.n) * self.h

    @property
    def x_max(self):
        return (self.n - 1) * self.h

    @classmethod
    def build(cls, omega_sg, gamma, x_max, points_per_gamma=POINTS_PER_GAMMA):
        m = max(4, math.ceil(omega_sg / (gamma / points_per_gamma)))
        h = omega_sg / m
        n = int(math.ceil(x_max / h)) + 1
        return cls(h, n, m)


def _spectrum_on_grid(model, emitter, grid, k_max):
    """(Im g_aa on the x grid, W-grid density G * trapezoid weights, n_W)."""
    beta = model.plasma_coefficient
    g = model.gamma
    n_w = min(grid.n, int(math.ceil(math.sqrt(beta * k_max) / grid.h)) + 1)
    W = np.arange(n_w) * grid.h
    gw = _g_density(model, emitter, W) * _trapezoid_weights(n_w, grid.h)
    d = np.arange(-(n_w - 1), grid.n) * grid.h
    lor = g / (d * d + g * g)
    im = fftconvolve(gw, lor)[n_w - 1: n_w - 1 + grid.n]
    return im, gw, n_w


# ---------------------------------------------------------------------------
# wave-vector integrals around k_sp

def _radial_nodes(k_c, scale, reach, k_lo=0.0):
    """Gauss-Legendre nodes on geometrically growing panels around k_c."""
    edges = [0.0]
    s = 0.25 * scale
    while s < reach:
        edges.append(s)
        s *= 2.0
    edges.append(reach)
    e = np.array(edges)
    lo = np.maximum(k_c - e[::-1], k_lo)
    hi = k_c + e[1:]
    pts = np.unique(np.concatenate([lo, hi]))
    a, b = pts[:-1], pts[1:]
    keep = b > a
    a, b = a[keep], b[keep]
    nodes = (0.5 * (b - a))[:, None] * _GL16_X[None, :] + (0.5 * (a + b))[:, None]
    weights = (0.5 * (b - a))[:, None] * _GL16_W[None, :]
    return nodes.ravel(), weights.ravel()


def _angular_zeta_sq(L, k, k_sp):
    """(1/2pi) int dphi |zeta|^2 = exp(-L^2 (k - k_sp)^2) i0e(2 L^2 k k_sp)."""
    return np.exp(-(L * (k - k_sp)) ** 2) * i0e(2.0 * L * L * k * k_sp)


def _residue(model, emitter, k):
    w_k = np.sqrt(model.plasma_coefficient * k)
    return _a0(emitter) * w_k * k * np.exp(-2.0 * k * emitter.z_at), w_k


def _k_window(model, emitter, geom, k_sp):
    v = group_velocity(model, k_sp) * 1e9
    lor_width = model.gamma / v
    scale = min(1.0 / geom.width_L, lor_width)
    reach = min(14.0 / geom.width_L, default_k_max(model, emitter) - k_sp)
    return scale, reach


def collective_rate(model, emitter, geom, k_sp=None):
    """gamma_c = pi N int d^2k/(2pi)^2 |zeta(k_sp, k)|^2 Im g(omega_sg, k), s^-1."""
    k_sp = float(dispersion_q(model, emitter.omega_sg)) if k_sp is None else k_sp
    scale, reach = _k_window(model, emitter, geom, k_sp)
    k, wk = _radial_nodes(k_sp, scale, reach)
    A, w_k = _residue(model, emitter, k)
    g = model.gamma
    im_g = A * g / ((emitter.rate - w_k) ** 2 + g * g)
    radial = k * _angular_zeta_sq(geom.width_L, k, k_sp) * im_g
    # pi N (1/2pi) int k dk (angular average) Im g
    return float(0.5 * geom.n_emitters * np.dot(wk, radial))


# ---------------------------------------------------------------------------
# shifts

@dataclass
class ShiftResult:
    """Collective shifts in eV and the collective rate in s^-1."""

    delta_s: float
    delta_g: float
    delta_single: float
    delta_collective: float
    gamma_c: float
    omega_max: float
    k_max: float
    est_error: float
    errors: dict = field(default_factory=dict)
    below_linewidth: bool = False
    linewidth: float = 0.0

    def to_dict(self):
        return asdict(self)

    def to_json(self, path):
        write_json(path, {
            "delta_s_eV": self.delta_s, "delta_g_eV": self.delta_g,
            "delta_single_eV": self.delta_single,
            "delta_collective_eV": self.delta_collective,
            "gamma_c_s^-1": self.gamma_c, "omega_max_eV": self.omega_max,
            "k_max_nm^-1": self.k_max, "est_error_eV": self.est_error,
            "errors_eV": self.errors, "below_linewidth": self.below_linewidth,
            "linewidth_eV": self.linewidth,
        })


def _shift_terms(model, emitter, geom, k_sp, omega_max_rate, k_max, uniform_zeta,
                 points_per_gamma):
    grid = FrequencyGrid.build(emitter.rate, model.gamma, omega_max_rate, points_per_gamma)
    im, gw, n_w = _spectrum_on_grid(model, emitter, grid, k_max)
    x = grid.x
    w = _trapezoid_weights(grid.n, grid.h)
    p = grid.pole_index
    wsg = x[p]
    c_pv = pv_weights(grid.n, grid.h, p)
    t1 = float(np.dot(w / (x + wsg), im))
    p1 = float(np.dot(c_pv, im))
    # pi * Re g(omega_sg, k) / A(k) = sum_j v_j L(x_j - W)
    v = c_pv + w / (x + wsg)
    g = model.gamma
    if uniform_zeta:
        pi_re = _correlate(v, grid.h, g, n_w)
        t2 = geom.n_emitters * float(np.dot(gw, pi_re))
    else:
        scale, reach = _k_window(model, emitter, geom, k_sp)
        k, wk = _radial_nodes(k_sp, scale, reach)
        A, w_k = _residue(model, emitter, k)
        pi_re = np.array([np.dot(v, g / ((x - Wi) ** 2 + g * g)) for Wi in w_k])
        radial = k * _angular_zeta_sq(geom.width_L, k, k_sp) * A * pi_re
        # pi N int d^2k/(2pi)^2 |zeta|^2 Re g = N/(2pi) int k dk ... (pi Re g)
        t2 = geom.n_emitters / (2.0 * math.pi) * float(np.dot(wk, radial))
    N = geom.n_emitters
    delta_s = -(N - 2) * t1 - t2
    delta_g = -N * t1
    delta_single = -(p1 - t1)
    return np.array([delta_s, delta_g, delta_single]), grid


def _correlate(v, h, g, n_w):
    """r_i = sum_j v_j g/((x_j - W_i)^2 + g^2) for W_i = i h, i < n_w."""
    n = len(v)
    d = np.arange(-(n_w - 1), n) * h
    lor = g / (d * d + g * g)
    full = fftconvolve(v[::-1], lor)
    # lag x_j - W_i = (j - i) h appears at index n - 1 + n_w - 1 - i
    idx = (n - 1) + (n_w - 1) - np.arange(n_w)
    return full[idx]


def collective_shifts(model, emitter, geom, k_sp=None, omega_max=None, k_max=None,
                      uniform_zeta=False, points_per_gamma=POINTS_PER_GAMMA):
    """Collective Lamb shifts and rate with cutoff-doubling error estimates.

    Parameters
    ----------
    omega_max : float, optional
        Frequency cutoff in eV (>= 10 omega_sg); default 20 omega_sg.
    k_max : float, optional
        Wave-number cutoff in nm^-1; default max(10 k_sp, 10/(2 z_at)).
    uniform_zeta : bool
        Replace |zeta|^2 by 1 in the wave-vector integral (single-emitter
        consistency check with N = 1).

    Returns
    -------
    ShiftResult
    """
    k_sp = float(dispersion_q(model, emitter.omega_sg)) if k_sp is None else k_sp
    omega_max = DEFAULT_OMEGA_MAX_FACTOR * emitter.omega_sg if omega_max is None else omega_max
    if omega_max < 10.0 * emitter.omega_sg * (1 - 1e-12):
        raise CutoffTooSmallError("omega_max must be >= 10 omega_sg")
    k_max = default_k_max(model, emitter) if k_max is None else k_max
    _check_k_max(emitter, k_max)
    if not model.gamma > 0:
        raise ValidationError("shifts need a finite Drude time (gamma > 0)")
    args = (model, emitter, geom, k_sp)
    base, grid = _shift_terms(*args, u.ev_to_rate(omega_max), k_max, uniform_zeta,
                              points_per_gamma)
    wide, _ = _shift_terms(*args, u.ev_to_rate(2 * omega_max), k_max, uniform_zeta,
                           points_per_gamma)
    deep, _ = _shift_terms(*args, u.ev_to_rate(omega_max), 2 * k_max, uniform_zeta,
                           points_per_gamma)
    errs = np.maximum(np.abs(wide - base), np.abs(deep - base))
    ds, dg, d1 = u.rate_to_ev(base)
    dc = ds - dg - d1
    names = ("delta_s", "delta_g", "delta_single")
    errors = {n: float(u.rate_to_ev(e)) for n, e in zip(names, errs)}
    errors["delta_collective"] = float(u.rate_to_ev(errs.sum()))
    linewidth = u.rate_to_ev(model.gamma)
    return ShiftResult(
        delta_s=float(ds), delta_g=float(dg), delta_single=float(d1),
        delta_collective=float(dc),
        gamma_c=collective_rate(model, emitter, geom, k_sp),
        omega_max=float(omega_max), k_max=float(k_max),
        est_error=max(errors.values()), errors=errors,
        below_linewidth=bool(abs(dc) < linewidth), linewidth=float(linewidth))
