"""Bessel model parametrix and confluent-hypergeometric (CHF) coefficients.

The Bessel parametrix ``Phi_alpha(z)`` solves a 2x2 RH problem with jumps on
three rays meeting at the origin::

    Gamma_1: arg z =  2pi/3     Gamma_2: arg z = pi     Gamma_3: arg z = -2pi/3

all oriented towards 0, so the ``+`` side of a ray at angle ``theta`` is the
direction ``-1j * exp(1j*theta)``.  Sector I is ``|arg z| < 2pi/3``, II lies
between Gamma_1 and Gamma_2 and III between Gamma_2 and Gamma_3.

Only the CHF data that have closed forms (the residue-type coefficient
``Phi_1``, the local constant ``Upsilon_0``, the entry ``(Upsilon_1)_21`` and
the six jump matrices) are provided; the full CHF parametrix is not.
"""

from dataclasses import dataclass
import math

import numpy as np
from scipy import special as sc

from . import specfun
from .errors import ContourError, DomainError, PoleError

SIGMA1 = np.array([[0, 1], [1, 0]], dtype=complex)
SIGMA2 = np.array([[0, -1j], [1j, 0]], dtype=complex)
SIGMA3 = np.array([[1, 0], [0, -1]], dtype=complex)

RAY_ANGLES = {1: 2 * np.pi / 3, 2: np.pi, 3: -2 * np.pi / 3}
CONTOUR_TOL = 1e-12
LIMIT_OFFSET = 1e-8


def _ray_distance(z, theta):
    rot = z * np.exp(-1j * theta)
    return abs(rot.imag) if rot.real >= 0 else abs(z)


def classify_sector(z):
    """Return 1, 2 or 3 for sectors I, II, III.

    Points exactly on a ray go to the counterclockwise-adjacent sector
    (arg = 2pi/3 -> II, arg = pi -> III, arg = -2pi/3 -> I).
    """
    z = complex(z)
    if z == 0:
        raise DomainError("the origin belongs to no sector")
    arg = math.atan2(z.imag, z.real)
    if arg == math.pi:
        return 3
    if -2 * math.pi / 3 <= arg < 2 * math.pi / 3:
        return 1
    if arg >= 2 * math.pi / 3:
        return 2
    return 3


def _check_order(order):
    if order <= -1:
        raise DomainError(f"Bessel parametrix needs alpha > -1, got {order}")


def _core(order, z, scaled):
    w = np.sqrt(complex(z))
    i_w = specfun.bessel_i(order, w, scaled)
    ip_w = specfun.bessel_i_prime(order, w, scaled)
    k_w = specfun.bessel_k(order, w, scaled)
    kp_w = specfun.bessel_k_prime(order, w, scaled)
    if scaled:
        # AMOS scales I by exp(-Re w); turn that into exp(-w)
        phase = np.exp(-1j * w.imag)
        i_w, ip_w = i_w * phase, ip_w * phase
    return w, np.array([[i_w, 1j / np.pi * k_w],
                        [np.pi * 1j * w * ip_w, -w * kp_w]])


def bessel_parametrix(order, z, scaled=False, check_contour=True):
    """Evaluate ``Phi_alpha^(Bes)(z)``.

    With ``scaled=True`` the result is ``Phi(z) @ exp(-sqrt(z) sigma_3)``,
    which stays O(1) for large ``|z|``.
    """
    _check_order(order)
    z = complex(z)
    if z == 0:
        raise DomainError("Phi_alpha is singular at the origin")
    if check_contour:
        for j, theta in RAY_ANGLES.items():
            if _ray_distance(z, theta) < CONTOUR_TOL:
                raise ContourError(f"z={z} lies on Gamma_{j}")
    w, psi = _core(order, z, scaled)
    sector = classify_sector(z)
    if sector == 1:
        return psi
    c = np.exp(1j * np.pi * order) if sector == 2 else np.exp(-1j * np.pi * order)
    sign = -1.0 if sector == 2 else 1.0
    if scaled:
        # column 2 carries exp(+w); column 1 exp(-w), so rescale by exp(-2w)
        right = np.array([[1, 0], [sign * c * np.exp(-2 * w), 1]])
    else:
        right = np.array([[1, 0], [sign * c, 1]])
    return psi @ right


def bessel_jump_matrix(order, ray):
    """Jump ``J`` with ``Phi_+ = Phi_- J`` on ``Gamma_ray``."""
    if ray == 1:
        return np.array([[1, 0], [np.exp(1j * np.pi * order), 1]])
    if ray == 2:
        return np.array([[0, 1], [-1, 0]], dtype=complex)
    if ray == 3:
        return np.array([[1, 0], [np.exp(-1j * np.pi * order), 1]])
    raise DomainError(f"unknown ray {ray!r}")


def one_sided_limits(order, ray, radius, offset=LIMIT_OFFSET):
    """Boundary values ``(Phi_+, Phi_-)`` on ``Gamma_ray`` at ``|z| = radius``.

    Each limit is Richardson-extrapolated from perpendicular offsets
    ``offset`` and ``2*offset``.
    """
    theta = RAY_ANGLES[ray]
    z0 = radius * np.exp(1j * theta)
    n_plus = -1j * np.exp(1j * theta)

    def limit(direction):
        a = bessel_parametrix(order, z0 + direction * offset)
        b = bessel_parametrix(order, z0 + 2 * direction * offset)
        return 2 * a - b

    return limit(n_plus), limit(-n_plus)


def jump_residual(order, ray, radius, offset=LIMIT_OFFSET):
    plus, minus = one_sided_limits(order, ray, radius, offset)
    return float(np.max(np.abs(plus - minus @ bessel_jump_matrix(order, ray))))


def b1_matrix(order):
    a = 1 + 4 * order ** 2
    return np.array([[-a, -2j], [-2j, a]]) / 8


def _left_frame(z):
    z = complex(z)
    d = np.diag([(np.pi ** 2 * z) ** -0.25, (np.pi ** 2 * z) ** 0.25])
    return d @ np.array([[1, 1j], [1j, 1]]) / np.sqrt(2)


def bessel_asymptotic_frame(order, z, scaled=False):
    """Large-z approximation of ``Phi_alpha`` truncated after the ``B_1`` term.

    ``(pi^2 z)^(-sigma3/4) (1/sqrt2) [[1, i], [i, 1]] (I + B_1 z^(-1/2)) e^(sqrt(z) sigma3)``;
    ``scaled=True`` drops the final exponential factor.
    """
    z = complex(z)
    if abs(z) < 1:
        raise DomainError("asymptotic frame is defined for |z| >= 1")
    w = np.sqrt(z)
    frame = _left_frame(z) @ (np.eye(2) + b1_matrix(order) / w)
    if scaled:
        return frame
    return frame @ np.diag([np.exp(w), np.exp(-w)])


def asymptotic_residual(order, z):
    """Size of the O(1/z) remainder in the large-z expansion at ``z``.

    Returns ``max|L^{-1} Phi(z) e^{-sqrt(z) sigma3} - I - B_1 z^{-1/2}|`` with
    ``L`` the constant-in-alpha left factor of the frame.
    """
    z = complex(z)
    phi = bessel_parametrix(order, z, scaled=True)
    inner = np.linalg.solve(_left_frame(z), phi)
    return float(np.max(np.abs(inner - np.eye(2) - b1_matrix(order) / np.sqrt(z))))


# below this the 1/z coefficient is treated as zero
EXACT_COEFFICIENT = 1e-6


def asymptotic_slope(order, radii=None, angles=None):
    """Least-squares slope of log(residual) against log|z|; close to -1.

    Returns ``(mean_slope, per_angle_slopes, max_residual)``.  For
    ``alpha = +-1/2`` the Bessel functions are elementary, the expansion
    terminates after ``B_1`` up to terms beyond all orders; the slope is then
    meaningless and reported as ``nan``.
    """
    if radii is None:
        radii = np.logspace(2, 6, 9)
    if angles is None:
        angles = [0.0, np.pi / 3, -np.pi / 3, 5 * np.pi / 6, -5 * np.pi / 6]
    radii = np.asarray(radii, dtype=float)
    slopes = []
    worst = 0.0
    coef = 0.0
    for theta in angles:
        res = np.array([asymptotic_residual(order, r * np.exp(1j * theta)) for r in radii])
        worst = max(worst, float(res.max()))
        coef = max(coef, float(res[-1] * radii[-1]))
        slopes.append(float(np.polyfit(np.log(radii), np.log(res), 1)[0]))
    if coef < EXACT_COEFFICIENT:
        return float("nan"), slopes, worst
    return float(np.mean(slopes)), slopes, worst


# ---------------------------------------------------------------------------
# confluent hypergeometric parametrix data


@dataclass(frozen=True)
class CHFCoefficients:
    beta: complex
    phi1: np.ndarray
    upsilon0: np.ndarray
    upsilon1_21: complex


def _check_beta(beta):
    beta = complex(beta)
    if not np.isfinite(beta):
        raise DomainError("beta must be finite")
    if beta != 0 and beta.imag == 0 and beta.real == round(beta.real):
        raise PoleError(f"Gamma(1 +- beta) has a pole at beta={beta}")
    return beta


def chf_coefficients(beta):
    """Closed-form coefficients of the CHF parametrix for a given ``beta``.

    Removable singularities at ``beta = 0`` are evaluated through the
    regularised forms ``1/Gamma(-b) = -b/Gamma(1-b)`` and
    ``psi(-b) = psi(1-b) + 1/b``.
    """
    b = _check_beta(beta)
    g_plus = complex(sc.gamma(1 + b))
    g_minus = complex(sc.gamma(1 - b))
    e_plus = np.exp(1j * np.pi * b)
    e_minus = np.exp(-1j * np.pi * b)
    ge = specfun.EULER_GAMMA
    psi_1mb = complex(sc.psi(1 - b))

    phi1 = np.array([
        [b * b * 1j, -(b * g_minus / g_plus) * e_minus * 1j],
        [-(b * g_plus / g_minus) * e_plus * 1j, -b * b * 1j],
    ])
    # 1/Gamma(b) = b/Gamma(1+b)
    upsilon0 = np.array([
        [g_minus * e_minus, b / g_plus * (psi_1mb + 2 * ge)],
        [g_plus, e_plus * (1 + b * (psi_1mb + 2 * ge)) / g_minus],
    ])
    # np.sinc breaks down for subnormal arguments; use its series near 0
    sinc = 1 - (np.pi * b) ** 2 / 6 if abs(b) < 1e-8 else complex(np.sinc(b))
    u21 = 1j * e_minus / sinc
    return CHFCoefficients(beta=b, phi1=phi1, upsilon0=upsilon0, upsilon1_21=u21)


def chf_jump_matrix(beta, ray):
    """Jump matrix on the CHF contour ``Sigma_ray``, ``ray`` in 1..6."""
    b = complex(beta)
    ep, em = np.exp(1j * np.pi * b), np.exp(-1j * np.pi * b)
    table = {
        1: [[0, em], [-ep, 0]],
        2: [[1, 0], [ep, 1]],
        3: [[1, 0], [em, 1]],
        4: [[0, ep], [-em, 0]],
        5: [[1, 0], [em, 1]],
        6: [[1, 0], [ep, 1]],
    }
    if ray not in table:
        raise DomainError(f"unknown CHF ray {ray!r}")
    return np.array(table[ray], dtype=complex)


def check_parametrix(alpha, samples=100, seed=0, radius_range=(0.2, 5.0)):
    """Numerical verification report for one ``alpha``.

    ``samples`` random points per sector for the determinant, and the same
    number of random radii spread over the three rays for the jumps.  The
    slope is ``None`` when the large-z expansion is exact (see
    :func:`asymptotic_slope`).
    """
    rng = np.random.default_rng(seed)
    lo, hi = radius_range
    bounds = {1: (-2 * np.pi / 3, 2 * np.pi / 3), 2: (2 * np.pi / 3, np.pi),
              3: (-np.pi, -2 * np.pi / 3)}
    det_dev = 0.0
    for a, b in bounds.values():
        r = rng.uniform(lo, hi, samples)
        th = rng.uniform(a, b, samples)
        for ri, ti in zip(r, th):
            z = ri * np.exp(1j * ti)
            det_dev = max(det_dev, abs(np.linalg.det(bessel_parametrix(alpha, z)) - 1))
    jump = 0.0
    for k, r in enumerate(rng.uniform(lo, hi, samples)):
        jump = max(jump, jump_residual(alpha, k % 3 + 1, r))
    slope, _, worst = asymptotic_slope(alpha)
    return {"max_jump_residual": jump, "max_det_deviation": float(det_dev),
            "asymptotic_slope": None if np.isnan(slope) else slope,
            "asymptotic_max_residual": worst}
