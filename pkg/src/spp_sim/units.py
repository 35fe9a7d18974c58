"""Physical constants and unit conversions.

The conversion table is anchored on (eV, nm, fs). Rates are angular
throughout: ``Hz`` and ``s^-1`` are treated as the same unit, and an energy
converts to a rate through ``omega = E / hbar``.
"""

import math

__all__ = [
    "HBAR_EV_S", "C_M_S", "ALPHA", "E_CHARGE", "EPS0",
    "C_NM_S", "HBAR_C_EV_NM",
    "convert", "ev_to_rate", "rate_to_ev", "drude_damping",
]

# CODATA 2018
HBAR_EV_S = 6.582119569e-16
C_M_S = 2.99792458e8
ALPHA = 7.2973525693e-3
E_CHARGE = 1.602176634e-19
EPS0 = 8.8541878128e-12

C_NM_S = C_M_S * 1e9
HBAR_C_EV_NM = HBAR_EV_S * C_NM_S

# unit -> (dimension, factor to canonical unit of that dimension)
_UNITS = {
    # energy, canonical eV
    "eV": ("energy", 1.0),
    "meV": ("energy", 1e-3),
    "J": ("energy", 1.0 / E_CHARGE),
    # length, canonical nm
    "nm": ("length", 1.0),
    "um": ("length", 1e3),
    "m": ("length", 1e9),
    # time, canonical fs
    "fs": ("time", 1.0),
    "ps": ("time", 1e3),
    "ns": ("time", 1e6),
    "s": ("time", 1e15),
    # angular rate, canonical fs^-1
    "fs^-1": ("rate", 1.0),
    "ps^-1": ("rate", 1e-3),
    "ns^-1": ("rate", 1e-6),
    "s^-1": ("rate", 1e-15),
    "Hz": ("rate", 1e-15),
    "rad/s": ("rate", 1e-15),
    # wavenumber, canonical nm^-1
    "nm^-1": ("wavenumber", 1.0),
    "um^-1": ("wavenumber", 1e-3),
    "m^-1": ("wavenumber", 1e-9),
    # speed, canonical nm/fs
    "nm/fs": ("speed", 1.0),
    "m/s": ("speed", 1e-6),
    "c": ("speed", C_M_S * 1e-6),
}

_HBAR_EV_FS = HBAR_EV_S * 1e15


def _lookup(unit):
    try:
        return _UNITS[unit]
    except KeyError:
        raise KeyError(f"unknown unit {unit!r}; known: {sorted(_UNITS)}") from None


def convert(value, from_unit, to_unit):
    """Convert ``value`` between units of the same dimension.

    Energy and angular rate are interconvertible through hbar. Works on
    scalars and numpy arrays alike.

    >>> convert(1.0, "ps", "fs")
    1000.0
    """
    dim_a, fa = _lookup(from_unit)
    dim_b, fb = _lookup(to_unit)
    if dim_a == dim_b:
        return value * (fa / fb)
    if {dim_a, dim_b} == {"energy", "rate"}:
        if dim_a == "energy":
            return (value * fa / _HBAR_EV_FS) / fb
        return (value * fa * _HBAR_EV_FS) / fb
    from .errors import IncompatibleDimensionsError
    raise IncompatibleDimensionsError(
        f"cannot convert {from_unit} ({dim_a}) to {to_unit} ({dim_b})")


def ev_to_rate(energy_ev):
    """Angular frequency in s^-1 of an energy in eV."""
    return energy_ev / HBAR_EV_S


def rate_to_ev(rate):
    return rate * HBAR_EV_S


def drude_damping(drude_time_ps):
    """SPP amplitude damping rate 1/(2 tau_D) in s^-1."""
    if not drude_time_ps > 0:
        from .errors import ValidationError
        raise ValidationError(f"drude time must be positive, got {drude_time_ps}")
    if math.isinf(drude_time_ps):
        return 0.0
    return 0.5 / (drude_time_ps * 1e-12)
