"""Scalar special functions for real and complex arguments.

Modified Bessel functions ``I`` and ``K``, ``log Gamma``, digamma and the
logarithm of the Barnes G-function.  Every function accepts a scalar or an
array and returns the same shape.  Branch cuts are principal, i.e. arguments
in (-pi, pi].

``bessel_i`` sums the defining power series for ``|z| < SERIES_RADIUS`` and
switches to the AMOS routines (through :mod:`scipy.special`) outside that
disc.  ``bessel_k`` uses AMOS throughout.
"""

import math

import numpy as np
from scipy import special as sc

from .errors import BesselOverflowError, BranchCutError, DomainError, PoleError

SERIES_RADIUS = 12.0
SERIES_TERMS = 90
# exp(709.78) is the largest finite double
OVERFLOW_RE = 700.0

EULER_GAMMA = float(np.euler_gamma)
# zeta'(-1) = 1/12 - ln(Glaisher's constant)
ZETA_PRIME_M1 = -0.16542114370045092


def _checked(z):
    z = np.asarray(z, dtype=complex)
    if not np.all(np.isfinite(z)):
        raise DomainError("non-finite argument")
    return z


def _out(values, like):
    if np.ndim(like) == 0:
        return complex(values.reshape(-1)[0]) if np.ndim(values) else complex(values)
    return values


def _series_i(order, z):
    """Power series of I_order(z) (principal branch of (z/2)**order)."""
    half = z / 2.0
    q = half * half
    if order == 0.0:
        lead = np.ones_like(z)
    else:
        with np.errstate(divide="ignore", invalid="ignore"):
            lead = np.where(z == 0, 0.0, np.exp(order * np.log(np.where(z == 0, 1.0, half))))
    term = lead / math.gamma(order + 1.0)
    total = term.copy()
    for k in range(1, SERIES_TERMS):
        term = term * q / (k * (k + order))
        total = total + term
    return total


def bessel_i(order, z, scaled=False):
    """Modified Bessel function of the first kind ``I_order(z)``.

    With ``scaled=True`` the result is multiplied by ``exp(-|Re z|)`` (the
    AMOS convention), which keeps large arguments finite.
    """
    order = float(order)
    if order <= -1.0:
        raise DomainError(f"bessel_i needs order > -1, got {order}")
    zz = _checked(z)
    flat = np.atleast_1d(zz).ravel()
    out = np.empty_like(flat)
    small = np.abs(flat) < SERIES_RADIUS
    if np.any(small):
        vals = _series_i(order, flat[small])
        if scaled:
            vals = vals * np.exp(-np.abs(flat[small].real))
        out[small] = vals
    big = ~small
    if np.any(big):
        zb = flat[big]
        if not scaled and np.max(np.abs(zb.real)) > OVERFLOW_RE:
            raise BesselOverflowError("I_order overflows; use scaled=True")
        out[big] = sc.ive(order, zb) if scaled else sc.iv(order, zb)
    return _out(out.reshape(np.shape(zz)), z)


def bessel_k(order, z, scaled=False):
    """Modified Bessel function of the second kind ``K_order(z)``.

    ``scaled=True`` multiplies by ``exp(z)``.  Points on the cut
    ``(-inf, 0]`` are rejected.
    """
    order = float(order)
    zz = _checked(z)
    if np.any((zz.imag == 0) & (zz.real <= 0)):
        raise BranchCutError("K_order is cut along (-inf, 0]")
    if not scaled and np.min(zz.real) < -OVERFLOW_RE:
        raise BesselOverflowError("K_order overflows; use scaled=True")
    vals = sc.kve(order, zz) if scaled else sc.kv(order, zz)
    return _out(np.asarray(vals), z)


def bessel_i_prime(order, z, scaled=False):
    """d/dz I_order(z) via I' = I_{order+1} + (order/z) I_order."""
    zz = _checked(z)
    upper = np.asarray(bessel_i(order + 1.0, zz, scaled))
    if order == 0.0:
        return _out(upper, z)
    base = np.asarray(bessel_i(order, zz, scaled))
    if np.any(zz == 0):
        raise DomainError("I' is singular at 0 for non-zero order")
    return _out(upper + order / zz * base, z)


def bessel_k_prime(order, z, scaled=False):
    """d/dz K_order(z) via K' = -K_{order+1} + (order/z) K_order."""
    zz = _checked(z)
    upper = np.asarray(bessel_k(order + 1.0, zz, scaled))
    base = np.asarray(bessel_k(order, zz, scaled))
    return _out(-upper + order / zz * base, z)


def _reject_poles(zz):
    bad = (zz.imag == 0) & (zz.real <= 0) & (zz.real == np.round(zz.real))
    if np.any(bad):
        raise PoleError("Gamma has poles at the non-positive integers")


def log_gamma(z):
    """Principal branch of log Gamma(z)."""
    zz = _checked(z)
    _reject_poles(zz)
    return _out(np.asarray(sc.loggamma(zz)), z)


def digamma(z):
    zz = _checked(z)
    _reject_poles(zz)
    return _out(np.asarray(sc.psi(zz)), z)


# B_{2k+2} / (4k(k+1)) for k = 1..9
_BERNOULLI = [-1 / 30, 1 / 42, -1 / 30, 5 / 66, -691 / 2730, 7 / 6, -3617 / 510,
              43867 / 798, -174611 / 330]
_G_COEF = [b / (4 * k * (k + 1)) for k, b in enumerate(_BERNOULLI, start=1)]
_G_SHIFT_TO = 16.0


def _log_g_plus_one_asymptotic(w):
    """log G(w + 1) for large |w|, Re w > 0."""
    lw = np.log(w)
    total = 0.5 * w * w * lw - 0.75 * w * w + 0.5 * w * math.log(2 * math.pi) - lw / 12.0 + ZETA_PRIME_M1
    inv2 = 1.0 / (w * w)
    p = inv2
    for c in _G_COEF:
        total = total + c * p
        p = p * inv2
    return total


def barnes_g_log(z):
    """Logarithm of the Barnes G-function, normalised by G(1) = G(2) = 1.

    ``z`` is shifted upward with ``log G(z) = log G(z+n) - sum_k log Gamma(z+k)``
    until the Stirling-type expansion is accurate.  The branch is the one
    continuous along that shift; it is real on the positive real axis and
    ``exp`` of the result is single valued.
    """
    zz = _checked(z)
    _reject_poles(zz)
    flat = np.atleast_1d(zz).ravel()
    out = np.empty_like(flat)
    for i, zi in enumerate(flat):
        n = 0
        while (zi + n).real < _G_SHIFT_TO or abs(zi + n) < _G_SHIFT_TO:
            n += 1
        acc = _log_g_plus_one_asymptotic(zi + n - 1.0)
        if n:
            acc -= np.sum(sc.loggamma(zi + np.arange(n)))
        out[i] = acc
    return _out(out.reshape(np.shape(zz)), z)
