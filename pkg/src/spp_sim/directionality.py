"""Frequency and wave-vector excitation distribution of the emitted SPPs.

Under a uniform-decay ansatz the excitation probability of the SPP mode k at
frequency w is

    P(k, w) = N Im g(w, k) |zeta(k_sp, k)|^2 / (gamma_fit^2 + (w - w_sg)^2),

with the Lorentzian pole form of Im g. ``sweep_grid`` evaluates it on a 2D
k grid (in units of k_sp), normalizes to the grid maximum and measures the
widths along the radial line and the azimuthal arc through the peak.
"""

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import brentq, minimize_scalar

from . import units as u
from .errors import (NonPositiveArgumentError, PeakOnBoundaryError,
                     ValidationError)
from .graphene import dispersion_q, residue_coefficient
from .io import write_csv, write_json

__all__ = [
    "DirectionalityGrid", "emission_distribution", "sweep_grid",
    "transverse_fwhm_gaussian",
]


def transverse_fwhm_gaussian(width_L):
    """FWHM of |zeta|^2 = exp(-L^2 dk^2): 2 sqrt(ln 2) / L."""
    return 2.0 * math.sqrt(math.log(2.0)) / width_L


def _as_vec(k):
    k = np.asarray(k, dtype=float)
    if k.shape[-1:] != (2,):
        raise ValidationError("wave vectors must have a trailing dimension of 2")
    return k


def emission_distribution(model, emitter, geom, k_sp, gamma_fit, omega, k):
    """Unnormalized P(k, omega) for wave vectors ``k`` of shape (..., 2).

    ``k_sp`` and ``k`` in nm^-1, ``gamma_fit`` in s^-1 and ``omega`` in eV.
    The result carries units of nm^2 s (N Im g / rate^2).
    """
    if not gamma_fit > 0:
        raise NonPositiveArgumentError("gamma_fit must be > 0")
    k = _as_vec(k)
    k_sp = _as_vec(k_sp)
    q = np.hypot(k[..., 0], k[..., 1])
    A = residue_coefficient(model, emitter, q).absolute
    w_q = np.sqrt(model.plasma_coefficient * q)
    w = u.ev_to_rate(omega)
    g = model.gamma
    im_g = A * g / ((w - w_q) ** 2 + g * g)
    dk2 = np.sum((k - k_sp) ** 2, axis=-1)
    zeta_sq = np.exp(-geom.width_L ** 2 * dk2)
    dw = w - emitter.rate
    return geom.n_emitters * im_g * zeta_sq / (gamma_fit ** 2 + dw * dw)


@dataclass
class DirectionalityGrid:
    """Normalized P over a (kx, ky) grid in units of k_sp.

    ``values[i, j]`` belongs to ``(kx[j], ky[i])``. Widths are in nm^-1.
    """

    kx: np.ndarray
    ky: np.ndarray
    omega: float
    values: np.ndarray
    peak_index: tuple
    k_sp: float
    fwhm_transverse: float
    fwhm_radial: float
    peak_k: tuple = (0.0, 0.0)
    meta: dict = field(default_factory=dict)

    def metadata(self):
        return {
            "k_sp_nm^-1": self.k_sp,
            "omega_eV": self.omega,
            "resolution": [len(self.kx), len(self.ky)],
            "kx_window_ksp": [self.kx[0], self.kx[-1]],
            "ky_window_ksp": [self.ky[0], self.ky[-1]],
            "peak_index": list(self.peak_index),
            "peak_grid_ksp": [self.kx[self.peak_index[1]], self.ky[self.peak_index[0]]],
            "peak_refined_ksp": list(self.peak_k),
            "fwhm_transverse_nm^-1": self.fwhm_transverse,
            "fwhm_radial_nm^-1": self.fwhm_radial,
            **self.meta,
        }

    def to_csv(self, path):
        """``kx,ky,p_ratio`` rows, kx fastest, wave numbers in units of k_sp."""
        kx, ky = np.meshgrid(self.kx, self.ky)
        write_csv(path, ["kx", "ky", "p_ratio"], [kx.ravel(), ky.ravel(), self.values.ravel()])

    def to_json(self, path):
        write_json(path, self.metadata())

    def to_gnuplot(self, path):
        """Blank-line separated ``kx ky p`` blocks, one per ky row (splot format)."""
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            for i, y in enumerate(self.ky):
                for j, x in enumerate(self.kx):
                    fh.write(f"{x:.17g} {y:.17g} {self.values[i, j]:.17g}\n")
                fh.write("\n")


def _axis(lo, hi, n):
    """n points on [lo, hi]; symmetric windows are built from integer offsets
    so that the grid is exactly mirror-symmetric about 0."""
    if math.isclose(lo, -hi, rel_tol=0, abs_tol=1e-15) and n % 2 == 1:
        m = n // 2
        return np.arange(-m, m + 1) * (hi / m)
    return np.linspace(lo, hi, n)


def _half_max_width(f, x0, lo, hi):
    """Distance between half-maximum points of f on either side of x0."""
    half = 0.5 * f(x0)
    edges = []
    for end in (lo, hi):
        if f(end) > half:
            return math.nan
        edges.append(brentq(lambda x: f(x) - half, min(x0, end), max(x0, end),
                            xtol=1e-14 * max(1.0, abs(x0)), rtol=1e-14))
    return abs(edges[1] - edges[0])


def _workers(workers):
    if workers is None:
        env = os.environ.get("SPP_SIM_THREADS")
        workers = int(env) if env else 1
    return max(1, int(workers))


def sweep_grid(model, emitter, geom, gamma_fit, omega=None, resolution=257,
               kx_window=(-0.2, 0.2), ky_window=(0.8, 1.2), workers=None):
    """Evaluate P/P_max on a (kx, ky) grid with k_sp along +y.

    Parameters
    ----------
    gamma_fit : float
        Emitter decay rate in the uniform-decay ansatz, s^-1.
    omega : float, optional
        Frequency slice in eV; defaults to omega_sg.
    resolution : int
        Points per axis (>= 32). Odd values put kx = 0 on the grid.
    kx_window, ky_window : (float, float)
        Window in units of k_sp.
    workers : int, optional
        Thread count for row evaluation; defaults to ``SPP_SIM_THREADS`` or 1.
        Rows are evaluated independently and gathered in order, so the
        result does not depend on the worker count.
    """
    if resolution < 32:
        raise ValidationError("resolution must be >= 32")
    omega = emitter.omega_sg if omega is None else omega
    k_sp = float(dispersion_q(model, emitter.omega_sg))
    ksp_vec = np.array([0.0, k_sp])
    kx = _axis(kx_window[0], kx_window[1], resolution)
    ky = _axis(ky_window[0], ky_window[1], resolution)

    def row(i):
        kk = np.column_stack([kx * k_sp, np.full(resolution, ky[i] * k_sp)])
        return emission_distribution(model, emitter, geom, ksp_vec, gamma_fit, omega, kk)

    n_workers = _workers(workers)
    if n_workers > 1:
        with ThreadPoolExecutor(max_workers=n_workers) as pool:
            rows = list(pool.map(row, range(resolution)))
    else:
        rows = [row(i) for i in range(resolution)]
    raw = np.vstack(rows)
    peak = raw.max()
    values = raw / peak
    i, j = np.unravel_index(np.argmax(raw), raw.shape)
    if i in (0, resolution - 1) or j in (0, resolution - 1):
        raise PeakOnBoundaryError("maximum of P lies on the window boundary; k_sp not inside")

    # continuous refinement: the peak lies on the k_sp ray by symmetry
    def radial(r):
        return float(emission_distribution(model, emitter, geom, ksp_vec, gamma_fit, omega,
                                           np.array([0.0, r])))

    dy = (ky[1] - ky[0]) * k_sp
    r_lo = max(ky[0] * k_sp, ky[i] * k_sp - dy)
    r_hi = min(ky[-1] * k_sp, ky[i] * k_sp + dy)
    r_pk = minimize_scalar(lambda r: -radial(r), bounds=(r_lo, r_hi), method="bounded",
                           options={"xatol": 1e-12 * k_sp}).x
    fwhm_r = _half_max_width(radial, r_pk, ky[0] * k_sp, ky[-1] * k_sp)

    def arc(phi):
        return float(emission_distribution(model, emitter, geom, ksp_vec, gamma_fit, omega,
                                           np.array([r_pk * math.sin(phi), r_pk * math.cos(phi)])))

    phi_max = math.asin(min(1.0, max(abs(kx[0]), abs(kx[-1])) * k_sp / r_pk))
    fwhm_phi = _half_max_width(arc, 0.0, -phi_max, phi_max)
    return DirectionalityGrid(
        kx=kx, ky=ky, omega=omega, values=values, peak_index=(int(i), int(j)),
        k_sp=k_sp, fwhm_transverse=r_pk * fwhm_phi, fwhm_radial=fwhm_r,
        peak_k=(0.0, r_pk / k_sp),
        meta={"width_L_nm": geom.width_L, "gamma_fit_s^-1": gamma_fit,
              "n_emitters": geom.n_emitters},
    )
