"""Real and complex error functions with overflow-safe scaled forms.

The probability densities of evolved post-measurement states involve
erfc of complex arguments whose magnitude reaches ~1e3 for heavy-particle
configurations.  exp(+z^2) factors overflow doubles near |z| ~ 27, so all
large-argument work goes through the Faddeeva function

    w(z) = exp(-z^2) erfc(-i z),

which is bounded in the closed upper half plane, plus explicit log-space
combinations below.  scipy.special provides the Faddeeva kernel (wofz)
and the complex erf built on it; this module adds the saturating
reflection for the lower half plane and the log-magnitude forms used by
the measurement integrands.
"""

from __future__ import annotations

import numpy as np
from scipy import special as _sp

__all__ = [
    "erf_real",
    "erf_complex",
    "erfc_complex",
    "faddeeva_w",
    "log_abs_erfc",
    "log_abs_w",
]

# exp(z^2) with Re z^2 beyond this cannot influence a double-range result
_EXP_CUTOFF = 690.0


def _as_complex_array(z):
    arr = np.atleast_1d(np.asarray(z, dtype=complex))
    scalar = np.isscalar(z) or np.ndim(z) == 0
    return arr, scalar


def erf_real(x):
    """erf for real argument; odd, range (-1, 1)."""
    return _sp.erf(np.asarray(x, dtype=float))


def faddeeva_w(z):
    """w(z) = exp(-z^2) erfc(-iz).

    Bounded (|w| <= 1) for Im(z) >= 0.  For Im(z) < 0 the reflection
    w(z) = 2 exp(-z^2) - w(-z) is used; there the true value grows like
    2 exp(Im(z)^2 - Re(z)^2) and the result saturates to inf rather than
    raising once it leaves double range.
    """
    arr, scalar = _as_complex_array(z)
    out = np.empty(arr.shape, dtype=complex)
    upper = arr.imag >= 0.0
    if upper.any():
        out[upper] = _sp.wofz(arr[upper])
    lower = ~upper
    if lower.any():
        zl = arr[lower]
        with np.errstate(over="ignore", invalid="ignore"):
            out[lower] = 2.0 * np.exp(-zl * zl) - _sp.wofz(-zl)
    return complex(out[0]) if scalar else out.reshape(np.shape(z))


def erfc_complex(z):
    """erfc(z) for complex z through scaled forms.

    Uses erfc(z) = exp(-z^2) w(iz) on Re(z) >= 0 (w evaluated in its
    bounded half plane) and the reflection erfc(z) = 2 - erfc(-z)
    elsewhere, so intermediates overflow only when the result itself
    leaves double range.
    """
    arr, scalar = _as_complex_array(z)
    out = np.empty(arr.shape, dtype=complex)
    right = arr.real >= 0.0
    with np.errstate(over="ignore", invalid="ignore", under="ignore"):
        if right.any():
            zr = arr[right]
            out[right] = np.exp(-zr * zr) * _sp.wofz(1j * zr)
        left = ~right
        if left.any():
            zl = arr[left]
            out[left] = 2.0 - np.exp(-zl * zl) * _sp.wofz(-1j * zl)
    return complex(out[0]) if scalar else out.reshape(np.shape(z))


def erf_complex(z):
    """erf(z) for complex z; odd function, erf(z) = 1 - erfc(z)."""
    arr, scalar = _as_complex_array(z)
    out = 1.0 - erfc_complex(arr)
    # keep exact oddness near 0 where 1 - erfc loses digits
    small = np.abs(arr) < 1e-8
    if small.any():
        zs = arr[small]
        out[small] = (2.0 / np.sqrt(np.pi)) * zs * (1.0 - zs * zs / 3.0)
    return complex(out[0]) if scalar else out.reshape(np.shape(z))


def log_abs_w(zeta):
    """log|w(zeta)| for complex arrays, stable in both half planes.

    For Im(zeta) < 0 the reflection splits into dominated regimes: when
    Re(zeta^2) > ~690 the 2 exp(-zeta^2) term cannot affect the result and
    |w(zeta)| = |w(-zeta)| holds to machine precision; otherwise the
    combination is factored as exp(-Re zeta^2) * |2 - exp(zeta^2) w(-zeta)|
    whose pieces all stay inside double range.
    """
    arr, scalar = _as_complex_array(zeta)
    out = np.empty(arr.shape, dtype=float)
    upper = arr.imag >= 0.0
    if upper.any():
        out[upper] = np.log(np.abs(_sp.wofz(arr[upper])))
    lower = ~upper
    if lower.any():
        zl = arr[lower]
        re_z2 = np.real(zl * zl)
        w_mirror = _sp.wofz(-zl)
        res = np.empty(zl.shape, dtype=float)
        dead = re_z2 > _EXP_CUTOFF
        if dead.any():
            res[dead] = np.log(np.abs(w_mirror[dead]))
        live = ~dead
        if live.any():
            zz = zl[live] * zl[live]
            with np.errstate(over="ignore", under="ignore"):
                ez2 = np.exp(np.where(zz.real < -_EXP_CUTOFF,
                                      -np.inf + 0j, zz))
                res[live] = -re_z2[live] + np.log(
                    np.abs(2.0 - ez2 * w_mirror[live]))
        out[lower] = res
    return float(out[0]) if scalar else out.reshape(np.shape(zeta))


def log_abs_erfc(z):
    """log|erfc(z)| for complex arrays without overflow.

    Identity erfc(z) = exp(-z^2) w(iz) combined with log_abs_w.
    """
    arr, scalar = _as_complex_array(z)
    out = -np.real(arr * arr) + log_abs_w(1j * arr)
    return float(out[0]) if scalar else out.reshape(np.shape(z))
