"""Non-Markovian amplitude dynamics, Markov rates and trajectory fits.

The amplitude obeys

    -alpha'(t) = int_0^t K(t - tau) alpha(tau) dtau,   alpha(0) = 1.

``solve_volterra`` integrates the memory term exactly against a piecewise
linear alpha (product trapezoid rule) and advances alpha with the implicit
trapezoid rule. The history sum is accumulated by divide-and-conquer FFT
convolution, so a run of n steps costs O(n log^2 n).

Everything here is unit-agnostic: pass rates in s^-1 with times in s, or
rates in units of gamma with times in 1/gamma.
"""

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.signal import fftconvolve

from .errors import (DegenerateParametersError, InsufficientDataError,
                     NonPositiveArgumentError, StepTooCoarseError,
                     ValidationError)
from .kernels import MemoryKernel, KernelParams
from .specfun import erfcx

__all__ = [
    "AmplitudeTrajectory", "RegimeReport", "solve_volterra",
    "markov_rate_gamma_c", "markov_rate_intermediate", "classify_regime",
    "fit_oscillation", "fit_decay", "transient_time", "REGIME_KAPPA",
    "SCHEME_TRAPEZOID", "SCHEME_EULER",
]

SCHEME_TRAPEZOID = "trapezoid-product"
SCHEME_EULER = "euler-oracle"
REGIME_KAPPA = 2.0
RICHARDSON_LIMIT = 1e-3

_DIRECT_BLOCK = 64


@dataclass
class AmplitudeTrajectory:
    """Uniformly sampled amplitude alpha(t) with solver metadata."""

    t: np.ndarray
    alpha: np.ndarray
    step: float
    scheme: str = SCHEME_TRAPEZOID
    richardson_error: float = 0.0
    transient: float = 0.0
    meta: dict = field(default_factory=dict)

    def __len__(self):
        return len(self.t)

    def to_csv(self, path):
        """Write ``t,re_alpha,im_alpha,abs_alpha`` rows with 17 significant digits."""
        data = np.column_stack([self.t, self.alpha.real, self.alpha.imag, np.abs(self.alpha)])
        np.savetxt(path, data, fmt="%.17g", delimiter=",",
                   header="t,re_alpha,im_alpha,abs_alpha", comments="")


@dataclass(frozen=True)
class RegimeReport:
    regime: str
    dominant_rate: float
    oscillation_freq: float = None


def _as_kernel(kernel):
    if isinstance(kernel, MemoryKernel):
        return kernel
    if isinstance(kernel, KernelParams):
        return MemoryKernel(kernel)
    return MemoryKernel(tuple(kernel))


def transient_time(kernel):
    """3 / max(gamma, v/L) over the kernel's components (0 if both vanish)."""
    kernel = _as_kernel(kernel)
    rate = max(max(c.gamma, c.v_over_L) for c in kernel.components)
    return 3.0 / rate if rate > 0 else 0.0


def _trapezoid_run(k0, k1, h, n):
    """Product-trapezoid solution on n steps from cell moments k0, k1."""
    w = k0 - k1
    w[1:] += k1[:-1]
    alpha = np.zeros(n + 1, dtype=complex)
    alpha[0] = 1.0
    known = np.zeros(n + 1, dtype=complex)
    known[1:] = k1[:n]              # alpha_0 enters only through K1_{n-1}
    total = np.zeros(n + 1, dtype=complex)   # I_n
    denom = 1.0 + 0.5 * h * w[0]

    def base(lo, hi):
        j0 = max(lo, 1)
        for m in range(j0, hi):
            if m > j0:
                # sum_{j=j0}^{m-1} alpha_j w_{m-j}
                known[m] += np.dot(alpha[j0:m], w[m - j0:0:-1])
            alpha[m] = (alpha[m - 1] - 0.5 * h * (total[m - 1] + known[m])) / denom
            total[m] = alpha[m] * w[0] + known[m]

    def solve(lo, hi):
        if hi - lo <= _DIRECT_BLOCK:
            base(lo, hi)
            return
        mid = (lo + hi) // 2
        solve(lo, mid)
        src = alpha[lo:mid].copy()
        if lo == 0:
            src[0] = 0.0
        conv = fftconvolve(src, w[: hi - lo])
        known[mid:hi] += conv[mid - lo: hi - lo]
        solve(mid, hi)

    solve(0, n + 1)
    return alpha


def _euler_run(k0, h, n):
    """Explicit Euler with piecewise-constant history; first-order oracle."""
    alpha = np.zeros(n + 1, dtype=complex)
    alpha[0] = 1.0
    for m in range(n):
        # I_m = sum_{l=0}^{m-1} K0_l alpha_{m-1-l}
        mem = np.dot(k0[:m], alpha[m - 1::-1][:m]) if m else 0.0
        alpha[m + 1] = alpha[m] - h * mem
    return alpha


def _run(kernel, h, n, scheme, product_first_cell):
    k0, k1 = kernel.cell_moments(h, n + 1, product_first_cell=product_first_cell)
    if scheme == SCHEME_TRAPEZOID:
        return _trapezoid_run(k0, k1, h, n)
    if scheme == SCHEME_EULER:
        return _euler_run(k0, h, n)
    raise ValidationError(f"unknown scheme {scheme!r}")


def solve_volterra(kernel, horizon, step, scheme=SCHEME_TRAPEZOID, richardson=True,
                   product_first_cell=True, check_step=True):
    """Integrate -alpha' = K * alpha on [0, horizon] with alpha(0) = 1.

    Parameters
    ----------
    kernel : MemoryKernel or KernelParams
    horizon, step : float
        Final time and largest allowed time step (reciprocal units of the
        kernel rates). The step used is horizon/ceil(horizon/step).
    scheme : {"trapezoid-product", "euler-oracle"}
    richardson : bool
        Rerun at step/2 and report (4/3) max|alpha_h - alpha_{h/2}| as the
        error of the returned solution; raises ``StepTooCoarseError`` above
        1e-3.
    product_first_cell : bool
        Must stay True for kernels with the log-singular free-space part.
    check_step : bool
        Enforce step <= kernel.tabulation_step.

    Returns
    -------
    AmplitudeTrajectory
    """
    kernel = _as_kernel(kernel)
    if not step > 0:
        raise NonPositiveArgumentError("step must be > 0")
    if not horizon >= step:
        raise ValidationError(f"horizon ({horizon}) must be >= step ({step})")
    if check_step and step > kernel.tabulation_step * (1 + 1e-12):
        raise ValidationError(
            f"step {step:.3g} exceeds the kernel tabulation step {kernel.tabulation_step:.3g}")
    # the grid ends on the horizon; the step shrinks slightly if needed
    n = int(math.ceil(horizon / step - 1e-9))
    step = horizon / n
    t = step * np.arange(n + 1)
    if kernel.is_zero:
        return AmplitudeTrajectory(t, np.ones(n + 1, dtype=complex), step, scheme, 0.0,
                                   transient_time(kernel))
    alpha = _run(kernel, step, n, scheme, product_first_cell)
    err = 0.0
    if richardson:
        fine = _run(kernel, 0.5 * step, 2 * n, scheme, product_first_cell)
        order = 2.0 if scheme == SCHEME_TRAPEZOID else 1.0
        factor = 2.0 ** order / (2.0 ** order - 1.0)
        err = float(factor * np.max(np.abs(alpha - fine[::2])))
        if err > RICHARDSON_LIMIT:
            raise StepTooCoarseError(
                f"Richardson error {err:.3g} exceeds {RICHARDSON_LIMIT:g}; reduce the step")
    return AmplitudeTrajectory(t, alpha, step, scheme, err, transient_time(kernel))


# ---------------------------------------------------------------------------
# Markov rates and regimes

def markov_rate_gamma_c(varpi, gamma, v_over_L):
    """Gamma_c = sqrt(pi) varpi^2 / (v/L) erfcx(gamma / (v/L)).

    Equals the integral of the resonant kernel over all lags. For
    v/L = 0 the limit varpi^2 / gamma is returned.
    """
    if varpi < 0 or gamma < 0 or v_over_L < 0:
        raise ValidationError("rates must be >= 0")
    if gamma == 0 and v_over_L == 0:
        raise DegenerateParametersError("gamma and v/L cannot both vanish")
    if v_over_L == 0:
        return varpi * varpi / gamma
    return math.sqrt(math.pi) * varpi * varpi / v_over_L * float(erfcx(gamma / v_over_L))


def markov_rate_intermediate(varpi, gamma, detuning):
    """Gamma_qn = varpi^2 gamma / (gamma^2 + Delta^2), dropping O(v/L) terms."""
    if not gamma > 0:
        raise NonPositiveArgumentError("gamma must be > 0")
    return varpi * varpi * gamma / (gamma * gamma + detuning * detuning)


def classify_regime(varpi, gamma, v_over_L, kappa=REGIME_KAPPA):
    """Damped oscillation if varpi > kappa max(gamma, v/L), pure decay if below
    max(gamma, v/L)/kappa, crossover otherwise."""
    if varpi < 0 or gamma < 0 or v_over_L < 0:
        raise ValidationError("rates must be >= 0")
    scale = max(gamma, v_over_L)
    if varpi > kappa * scale:
        return RegimeReport("damped-oscillation", varpi, varpi)
    if varpi == 0 or varpi < scale / kappa:
        rate = 0.0 if varpi == 0 else markov_rate_gamma_c(varpi, gamma, v_over_L)
        return RegimeReport("pure-decay", rate, None)
    return RegimeReport("crossover", scale, None)


# ---------------------------------------------------------------------------
# fits

def _zero_crossings(t, y):
    s = np.signbit(y)
    idx = np.nonzero(s[1:] != s[:-1])[0]
    y0, y1 = y[idx], y[idx + 1]
    return t[idx] - y0 * (t[idx + 1] - t[idx]) / (y1 - y0)


def fit_oscillation(traj):
    """Angular frequency and amplitude decay rate of Re alpha.

    The frequency comes from the mean spacing of interpolated zero
    crossings (half a period each); the decay rate from a regression of
    log|Re alpha| at its extrema.
    """
    t = np.asarray(traj.t)
    y = np.asarray(traj.alpha).real
    zc = _zero_crossings(t, y)
    if len(zc) < 3:
        raise InsufficientDataError("need at least three zero crossings of Re alpha")
    half_period = (zc[-1] - zc[0]) / (len(zc) - 1)
    freq = math.pi / half_period
    peaks = []
    for a, b in zip(zc[:-1], zc[1:]):
        sel = (t > a) & (t < b)
        if np.any(sel):
            i = np.argmax(np.abs(y[sel]))
            peaks.append((t[sel][i], abs(y[sel][i])))
    if len(peaks) < 2:
        raise InsufficientDataError("need at least two extrema of Re alpha")
    pt, pv = np.array(peaks).T
    decay = -np.polyfit(pt, np.log(pv), 1)[0]
    return float(freq), float(decay)


def fit_decay(traj, t_min=None, floor=1e-8, min_decades=2.0):
    """Asymptotic decay rate of |alpha| from its final decade.

    Samples before ``t_min`` (default: the trajectory's transient time
    3/max(gamma, v/L)) and below ``floor`` are ignored. Raises
    ``InsufficientDataError`` unless |alpha| spans ``min_decades``.
    """
    t = np.asarray(traj.t)
    mag = np.abs(np.asarray(traj.alpha))
    t_min = traj.transient if t_min is None else t_min
    sel = (t >= t_min) & (mag > floor)
    if np.count_nonzero(sel) < 3:
        raise InsufficientDataError("too few samples above the floor after the transient")
    ts, ms = t[sel], mag[sel]
    last = ms[-1]
    if np.log10(ms.max() / last) < min_decades:
        raise InsufficientDataError(
            f"|alpha| decays by less than {min_decades:g} decades in the window")
    # final decade: from the last time |alpha| exceeded 10x its end value
    above = np.nonzero(ms > 10.0 * last)[0]
    start = above[-1] + 1 if len(above) else 0
    tt, mm = ts[start:], ms[start:]
    if len(tt) < 3:
        raise InsufficientDataError("final decade holds fewer than three samples")
    slope = np.polyfit(tt, np.log(mm), 1)[0]
    return float(-slope)
