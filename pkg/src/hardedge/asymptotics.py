"""Large-gap expansions of the thinned hard-edge tacnode determinant.

``F(s; gamma) = ln det(I - gamma K)`` and its derivative ``H = dF/ds`` admit
explicit large-``s`` expansions.  For ``gamma = 1`` the constant term of ``F``
is unknown and is an explicit input ``C``.  For ``gamma < 1`` the expansion is
written in ``beta = ln(1 - gamma) / (2 pi i)``, which is purely imaginary.

The constant terms ``D_1``, ``D_2`` depend on entries of the matrix ``M^(1)``:
``m13``, ``m14`` come from the Hastings-McLeod solution (see
:func:`hardedge.painleve.m1_entries`) while ``m31`` has no closed form and
must be supplied by the caller.

Expansions in powers of ``s`` are also exposed as term lists ``(coef, power,
log_power)`` meaning ``coef * s**power * ln(s)**log_power`` so that the
relation ``F' = H`` can be checked exactly, term by term.
"""

import math
from fractions import Fraction
from dataclasses import dataclass, field, replace

import numpy as np

from .errors import DomainError
from .painleve import MOneEntries
from .specfun import EULER_GAMMA, barnes_g_log, log_gamma

LN8 = math.log(8.0)


def beta_from_gamma(gamma):
    gamma = float(gamma)
    if not 0.0 <= gamma < 1.0:
        raise DomainError(f"beta needs gamma in [0, 1), got {gamma}")
    return complex(0.0, -math.log1p(-gamma) / (2 * math.pi))


@dataclass(frozen=True)
class AsymptoticParams:
    """Inputs of the expansions.

    Give exactly one of ``gamma`` (in ``[0, 1]``) or ``beta``.  Passing
    ``beta`` directly allows complex values such as ``beta = i x`` with
    ``x < 0``; ``gamma`` is then ``1 - exp(2 pi i beta)``.
    """

    nu: float
    gamma: float = None
    beta: complex = None
    stilde: float = 0.0
    tau: float = 0.0
    m1: MOneEntries = None
    m31: complex = None
    alpha: float = field(init=False)

    def __post_init__(self):
        if not self.nu > -0.5:
            raise DomainError(f"nu must exceed -1/2, got {self.nu}")
        if (self.gamma is None) == (self.beta is None):
            raise DomainError("give exactly one of gamma and beta")
        if self.gamma is not None:
            g = float(self.gamma)
            if not 0.0 <= g <= 1.0:
                raise DomainError(f"gamma must lie in [0, 1], got {g}")
            object.__setattr__(self, "gamma", g)
            object.__setattr__(self, "beta", None if g == 1.0 else beta_from_gamma(g))
        else:
            b = complex(self.beta)
            g = 1.0 - np.exp(2j * np.pi * b)
            object.__setattr__(self, "beta", b)
            object.__setattr__(self, "gamma", g.real if abs(g.imag) <= 1e-15 * max(1.0, abs(g)) else g)
        object.__setattr__(self, "alpha", self.nu - 0.5)

    @property
    def full(self):
        """True for the unthinned case ``gamma = 1``."""
        return self.beta is None

    def with_beta(self, beta):
        return replace(self, gamma=None, beta=beta)


def _check_s(s):
    s = float(s)
    if not s > 0:
        raise DomainError(f"s must be positive, got {s}")
    return s


def _need_beta(params):
    if params.full:
        raise DomainError("this quantity is defined only for gamma < 1")
    return params.beta


def theta(s, params):
    """Phase of the oscillatory correction (real for purely imaginary beta)."""
    s = _check_s(s)
    beta = _need_beta(params)
    ratio = 1.0 - params.stilde / math.sqrt(s)
    if not ratio > 0:
        raise DomainError("theta needs 1 - stilde/sqrt(s) > 0")
    val = (2 / 3 * s ** 0.75 - 2 * params.stilde * s ** 0.25 + 0.75j * beta * math.log(s)
           + 1j * beta * math.log(8 * ratio) + log_gamma(1 + beta).imag)
    return _realify(val)


def _realify(val):
    val = complex(val)
    return val.real if val.imag == 0 else val


def _eval_terms(terms, s):
    ls = math.log(s)
    return sum(c * s ** float(p) * ls ** k for c, p, k in terms)


def f_terms(params):
    """Non-constant part of the ``F`` expansion that is a finite sum of powers."""
    return expansion_terms("F", _ibeta(params), params.stilde, params.alpha, params.full)


def h_terms(params):
    """Power-law part of the ``H`` expansion (no oscillatory term)."""
    return expansion_terms("H", _ibeta(params), params.stilde, params.alpha, params.full)


def _ibeta(params):
    return None if params.full else 1j * params.beta


def expansion_terms(which, ibeta, stilde, alpha, full):
    """Term lists with exact rational coefficients and powers.

    ``ibeta`` is ``i * beta`` (so ``beta^2 = -ibeta^2``).  The parameters may
    be numbers or symbols (anything supporting ``+ - *``), which lets the
    ``F' = H`` relation be checked symbolically.
    """
    R = Fraction
    st = stilde
    if which == "F" and full:
        return [(R(-1, 12), R(3, 2), 0), (R(1, 2) * st, R(1), 0), (-st * st, R(1, 2), 0),
                ((4 * alpha ** 2 - 1) * R(1, 16) - R(3, 128), R(0), 1)]
    if which == "H" and full:
        return [(R(-1, 8), R(1, 2), 0), (R(1, 2) * st, R(0), 0), (-st * st * R(1, 2), R(-1, 2), 0),
                ((4 * alpha ** 2 - 1) * R(1, 16), R(-1), 0), (R(-3, 128), R(-1), 0)]
    bi = ibeta
    if which == "F":
        return [(R(4, 3) * bi, R(3, 4), 0), (-4 * bi * st, R(1, 4), 0), (R(3, 4) * bi * bi, R(0), 1)]
    if which == "H":
        return [(bi, R(-1, 4), 0), (-bi * st, R(-3, 4), 0), (R(7, 8) * bi * bi, R(-1), 0)]
    raise DomainError(f"unknown expansion {which!r}")


def differentiate_terms(terms):
    """Exact ``d/ds`` of a term list; constants are dropped."""
    out = []
    for c, p, k in terms:
        if k == 0:
            if p != 0:
                out.append((c * p, p - 1, 0))
        elif k == 1 and p == 0:
            out.append((c, Fraction(-1), 0))
        else:
            raise DomainError("only s**p and ln s terms are supported")
    return out


def collect_terms(terms):
    """Merge terms with equal ``(power, log_power)``; zero coefficients vanish."""
    acc = {}
    for c, p, k in terms:
        acc[(p, k)] = acc.get((p, k), 0) + c
    return {key: c for key, c in acc.items() if c != 0}


def h_asymptotic(s, params):
    s = _check_s(s)
    val = _eval_terms(h_terms(params), s)
    if not params.full:
        val += -0.25j * params.beta * np.cos(2 * theta(s, params)) / s
    return _realify(val)


def d_constants(params):
    """``(D_1, D_2)``; they need ``tau = 0`` and an explicit ``m31``."""
    if params.tau != 0:
        raise DomainError("D_1 and D_2 are defined at tau = 0")
    if params.m1 is None or params.m31 is None:
        raise DomainError("D_1 and D_2 need m1 (m13, m14) and m31")
    m13, m14, m31 = params.m1.m13, params.m1.m14, complex(params.m31)
    st, nu = params.stilde, params.nu
    sp, sm = m13 + m14, m13 - m14
    d1 = 2j / 9 * (5 * m31 - 28 * sp ** 2 * sm - st * (13 * m13 + 18 * m14) + 10j * nu)
    d2 = 2j / 9 * (2 * m31 + 18 * sp ** 3 - sp ** 2 * sm + st * (m13 + 13 * m14) - 4j * nu)
    return complex(d1), complex(d2)


def f_asymptotic(s, params, C=0.0):
    """Large-``s`` expansion of ``F``.

    For ``gamma = 1`` the undetermined constant is the input ``C``.  For
    ``gamma < 1`` the constant term needs ``m31`` via :func:`d_constants`;
    at ``beta = 0`` every term vanishes and ``m31`` is not required.
    """
    s = _check_s(s)
    val = _eval_terms(f_terms(params), s)
    if params.full:
        return _realify(val + C)
    b = params.beta
    if b == 0:
        return 0.0
    d1, d2 = d_constants(params)
    val += (d1 + 13 / 24 - LN8) * b * b + d2 * b ** 4
    val += barnes_g_log(1 + b) + barnes_g_log(1 - b)
    return _realify(val)


def variance_constant(params):
    d1, _ = d_constants(params)
    return _realify((1 + EULER_GAMMA - 13 / 24 + LN8 - d1) / (2 * math.pi ** 2))


def counting_stats(s, params):
    """Mean, log-variance and variance constant of the counting function.

    ``var_const`` is ``None`` when ``m31`` is not supplied.
    """
    s = float(s)
    if not s > 1:
        raise DomainError(f"counting statistics need s > 1, got {s}")
    mu = 2 / (3 * math.pi) * s ** 0.75 - 2 * params.stilde / math.pi * s ** 0.25
    sigma2 = 3 / (8 * math.pi ** 2) * math.log(s)
    var_const = None
    if params.m1 is not None and params.m31 is not None:
        var_const = variance_constant(params)
    return {"mu": mu, "sigma2": sigma2, "var_const": var_const}


def clt_and_bound(s, params, epsilon=0.0):
    """Centre and scale of the normal approximation and the high-probability band."""
    if epsilon < 0:
        raise DomainError("epsilon must be non-negative")
    stats = counting_stats(s, params)
    sigma = math.sqrt(stats["sigma2"])
    half = (3 / (4 * math.pi) + epsilon) * math.log(s)
    mu = stats["mu"]
    return {"center": mu, "scale": sigma, "half_width": half, "interval": (mu - half, mu + half)}


def normalize_count(count, s, params):
    """``(N - mu(s)) / sigma(s)`` for an observed count ``N``."""
    band = clt_and_bound(s, params)
    return (np.asarray(count, dtype=float) - band["center"]) / band["scale"]


def gen_fn_expansion_check(s, params, x0=0.05, levels=5):
    """Recover mean and variance coefficients from the ``beta = i x`` expansion.

    ``F(s; 1 - exp(-2 pi x)) = -2 pi E[N] x + 2 pi^2 Var[N] x^2 + O(x^3)``.
    The odd part of the expansion in ``x`` is exactly linear; the even part
    is quadratic plus higher even powers, removed by Richardson extrapolation
    in ``x^2`` over ``levels`` halvings of ``x0``.
    """
    def f(x):
        return complex(f_asymptotic(s, params.with_beta(1j * x)))

    f0 = f(0.0)
    linear = (f(x0) - f(-x0)) / (2 * x0)
    table = []
    for j in range(levels):
        x = x0 / 2 ** j
        row = [((f(x) + f(-x)) / 2 - f0) / (x * x)]
        for k in range(1, j + 1):
            row.append(row[k - 1] + (row[k - 1] - table[j - 1][k - 1]) / (4 ** k - 1))
        table.append(row)
    quadratic = table[-1][-1]
    stats = counting_stats(s, params)
    lin_ref = -2 * math.pi * stats["mu"]
    quad_ref = 2 * math.pi ** 2 * (stats["sigma2"] + stats["var_const"])
    return {
        "value_at_zero": f0,
        "linear": _realify(linear),
        "linear_expected": lin_ref,
        "linear_rel": abs(linear - lin_ref) / abs(lin_ref),
        "quadratic": _realify(quadratic),
        "quadratic_expected": _realify(quad_ref),
        "quadratic_rel": abs(quadratic - quad_ref) / abs(quad_ref),
    }


def _tau0_relations(params):
    """``M12``, ``M32`` and ``M^(2)_13 + M^(2)_14`` implied at ``tau = 0``."""
    m13, m14, m31 = params.m1.m13, params.m1.m14, complex(params.m31)
    st, sp = params.stilde, params.m1.m13 + params.m1.m14
    m12 = (m13 ** 2 - m14 ** 2 + st) / 2
    m32 = -2 * m12 * sp - st * m14 + 1j * params.nu
    m2_sum = m31 + 2 * m12 * sp + st * m13
    return m12, m32, m2_sum


def c_nu_tau0(beta, params):
    """``C_nu(stilde, 0)`` after the ``tau = 0`` relations are substituted.

    Its integral over ``[0, beta]`` should be ``D_1 beta^2 + D_2 beta^4``;
    the two are coded independently so that this can be checked.
    """
    if params.tau != 0:
        raise DomainError("this form of C_nu is for tau = 0")
    if params.m1 is None or params.m31 is None:
        raise DomainError("C_nu needs m1 (m13, m14) and m31")
    m13, m14, m31 = params.m1.m13, params.m1.m14, complex(params.m31)
    st, nu = params.stilde, params.nu
    sp, sm = m13 + m14, m13 - m14
    lin = 5 * m31 - 28 * sp ** 2 * sm - st * (13 * m13 + 18 * m14) + 10j * nu
    cub = 2 * m31 + 18 * sp ** 3 - sp ** 2 * sm + st * (m13 + 13 * m14) - 4j * nu
    return 4 / 9 * 1j * beta * lin + 8 / 9 * 1j * beta ** 3 * cub


def c_nu_tau0_unreduced(beta, params, m12=None, m32=None, m2_sum=None):
    """``C_nu(stilde, 0)`` in terms of ``M12``, ``M32`` and ``M^(2)_13 + M^(2)_14``.

    Missing entries are filled from the ``tau = 0`` relations.  With those
    defaults this agrees with :func:`c_nu_tau0` only at ``stilde = 0``; see
    :func:`c_nu_reduction_gap`.
    """
    if params.tau != 0:
        raise DomainError("this form of C_nu is for tau = 0")
    r12, r32, r2 = _tau0_relations(params)
    m12 = r12 if m12 is None else m12
    m32 = r32 if m32 is None else m32
    m2_sum = r2 if m2_sum is None else m2_sum
    m13, m14, m31 = params.m1.m13, params.m1.m14, complex(params.m31)
    sp, sm = m13 + m14, m13 - m14
    b2 = beta * beta
    bracket = (10 * (m31 + m32) + (4 * b2 - 6) * sp * m12 + 36 * b2 * sp ** 3
               + 8 * b2 * (m31 - m32) - (10 + 8 * b2) * sp ** 2 * sm - (5 + 4 * b2) * m2_sum)
    return (4 / 9 * 1j * beta * bracket
            + 16 / 3 * 1j * beta ** 3 * m14 * (2 * m12 + m14 ** 2 - m13 ** 2))


def c_nu_reduction_gap(beta, params):
    """Closed form of ``c_nu_tau0_unreduced - c_nu_tau0`` with default relations."""
    return -40j / 9 * beta * params.stilde * (params.m1.m13 + params.m1.m14)


def c_nu_general(beta, nu, m, m2_sum, sx, sy):
    """``C_nu(stilde, tau)`` for general ``tau`` (advanced entry point).

    ``m`` maps ``"m11" .. "m34"`` (keys m11, m12, m13, m14, m31, m32, m33,
    m34) to entries of ``M^(1)``; ``m2_sum`` is ``M^(2)_13 + M^(2)_14``;
    ``sx`` and ``sy`` are the two ratios of entries of ``M_0(0)`` that enter
    only through this function.  None of these has a closed form here.
    """
    keys = ("m11", "m12", "m13", "m14", "m31", "m32", "m33", "m34")
    missing = [k for k in keys if m.get(k) is None]
    if missing or m2_sum is None or sx is None or sy is None:
        raise DomainError("general C_nu needs " + ", ".join(missing + ["m2_sum", "sx", "sy"]))
    m11, m12, m13, m14, m31, m32, m33, m34 = (complex(m[k]) for k in keys)
    b = beta
    b2 = b * b
    sp, sm = m13 + m14, m13 - m14
    tp, tm = m33 + m34, m33 - m34
    bracket = (10 * (m31 + m32) + (14 + 6 * b2) * sp * tm + (5 + 4 * b2) * sm * tp
               + 12 * b2 * sp ** 3 + 8 * b2 * (m31 - m32) + 10 * b2 * sp * tm
               + 4 * b2 * sm * tp - (5 + 4 * b2) * m2_sum + (2 + 4 * b2) * m12 * sp)
    d = -4 * b / 9 * (2 * (-5 + 2 * b2) * (m11 + m12) + 30 * b2 * sp ** 2
                      + 2 * (5 + 4 * b2) * sp * (-m13 + m14) + 2 * (5 + 8 * b2) * tp)
    k = 8 * b / 45 * (-3 * (7 + 20 * b2 + 8 * b2 * b2) * (m11 - m12) - 30 * b2 * (3 * sp ** 2 + tp)
                      + 5 * (5 - 2 * b2) * (m34 - m33) + 5 * (5 + 4 * b2) * (m13 ** 2 - m14 ** 2))
    z = -m12 - m14 ** 2 + m13 ** 2 + 2 * m33 + m34
    return (4 / 9 * 1j * b * bracket + (1 - 2 * nu) / 2 * (d * sx + k * sy)
            - 16 / 3 * 1j * b ** 3 * m14 * z)


def integrate_c_nu(beta, params, nodes=8):
    """``int_0^beta C_nu(stilde, 0) d beta'`` by Gauss-Legendre on the segment."""
    t, w = np.polynomial.legendre.leggauss(nodes)
    pts = beta * (t + 1) / 2
    return complex(np.sum(w * np.array([c_nu_tau0(p, params) for p in pts])) * beta / 2)
