"""Nystrom Fredholm determinants ``ln det(I - gamma K)`` on ``(0, s)``.

Kernels are either :class:`ScalarKernel` (vectorised ``offdiag(x, y)`` and
``diag(x)``) or integrable kernels :class:`IIKSKernel`,
``K(x, y) = f(x)^T h(y) / (x - y)``, converted with :func:`kernel_from_iiks`.
``gamma`` is always explicit; kernels never carry it.

Quadrature is Gauss-Legendre on ``(0, 1)`` mapped either linearly or by
``x = s t^2``.  The square-root map makes ``sqrt(x)``-type endpoint behaviour
(hard-edge kernels) smooth in ``t``.
"""

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
import os
from typing import Callable

import numpy as np
from scipy import special as sc

from .errors import ConvergenceError, DomainError

DEFAULT_LADDER = (40, 80, 160, 320)
MAPS = ("gauss_legendre_sqrt", "gauss_legendre_linear")


@dataclass(frozen=True)
class ScalarKernel:
    offdiag: Callable
    diag: Callable
    symmetric: bool = False
    name: str = ""


@dataclass(frozen=True)
class IIKSKernel:
    """``f``, ``h``, ``fprime`` map an array of shape (m,) to shape (4, m)."""

    f: Callable
    h: Callable
    fprime: Callable
    name: str = ""


@dataclass(frozen=True, eq=False)
class QuadGrid:
    s: float
    n: int
    nodes: np.ndarray
    weights: np.ndarray
    map: str


def make_grid(s, n, map="gauss_legendre_sqrt"):
    if not s > 0:
        raise DomainError(f"interval length must be positive, got {s}")
    if map not in MAPS:
        raise DomainError(f"unknown quadrature map {map!r}")
    t, w = np.polynomial.legendre.leggauss(int(n))
    t, w = (t + 1) / 2, w / 2
    if map == "gauss_legendre_linear":
        return QuadGrid(s=float(s), n=int(n), nodes=s * t, weights=s * w, map=map)
    return QuadGrid(s=float(s), n=int(n), nodes=s * t * t, weights=2 * s * t * w, map=map)


def kernel_from_iiks(k, check_points=None, tol=1e-8):
    """Scalar kernel of an integrable kernel; diagonal by L'Hopital, ``f'(x)^T h(x)``.

    ``f(x)^T h(x) = 0`` is required for the diagonal to be finite; it is
    checked at ``check_points`` (default a few points in (0, 10]).
    """
    pts = np.linspace(0.05, 10, 7) if check_points is None else np.asarray(check_points, float)
    ortho = np.abs(np.einsum("im,im->m", k.f(pts), k.h(pts)))
    if np.max(ortho) > tol:
        raise DomainError(f"f^T h = {np.max(ortho):.3e} at a sample point; kernel is not integrable")

    def offdiag(x, y):
        x, y = np.broadcast_arrays(np.asarray(x, float), np.asarray(y, float))
        shape = x.shape
        fx = k.f(x.ravel())
        hy = k.h(y.ravel())
        num = np.einsum("im,im->m", fx, hy)
        return (num / (x.ravel() - y.ravel())).reshape(shape)

    def diag(x):
        x = np.asarray(x, float)
        return np.einsum("im,im->m", k.fprime(x.ravel()), k.h(x.ravel())).reshape(x.shape)

    return ScalarKernel(offdiag=offdiag, diag=diag, name=k.name)


def _bessel_parts(alpha, x):
    # meshgrid inputs repeat values; evaluate J only once per distinct point
    x = np.asarray(x, float)
    u, inv = np.unique(x, return_inverse=True)
    t = np.sqrt(u)
    j = sc.jv(alpha, t)
    jp = sc.jvp(alpha, t)
    inv = inv.reshape(x.shape)
    return t[inv], j[inv], jp[inv]


def bessel_reference_kernel(alpha):
    """Hard-edge Bessel kernel built from ``J_alpha``.

    ``K(x, y) = [J(sx) sy J'(sy) - sx J'(sx) J(sy)] / (2 (x - y))`` with
    ``sx = sqrt(x)``, and diagonal ``(J(sx)^2 - J_{a+1}(sx) J_{a-1}(sx)) / 4``.
    It is a validation kernel for the engine, not one of the tacnode kernels.
    """
    if not alpha > -1:
        raise DomainError(f"Bessel kernel needs alpha > -1, got {alpha}")

    def diag(x):
        t = np.sqrt(np.asarray(x, float))
        return (sc.jv(alpha, t) ** 2 - sc.jv(alpha + 1, t) * sc.jv(alpha - 1, t)) / 4

    def offdiag(x, y):
        x, y = np.broadcast_arrays(np.asarray(x, float), np.asarray(y, float))
        tx, jx, jpx = _bessel_parts(alpha, x)
        ty, jy, jpy = _bessel_parts(alpha, y)
        with np.errstate(divide="ignore", invalid="ignore"):
            out = (jx * ty * jpy - tx * jpx * jy) / (2 * (x - y))
        # cancellation near the diagonal: fall back to the limit
        close = np.abs(x - y) <= 1e-9 * np.maximum(np.abs(x), np.abs(y))
        if np.any(close):
            out = np.where(close, (diag(x) + diag(y)) / 2, out)
        return out

    return ScalarKernel(offdiag=offdiag, diag=diag, symmetric=True, name=f"bessel(alpha={alpha})")


def bessel_iiks_kernel(alpha):
    """The same Bessel kernel written as ``f(x)^T h(y) / (x - y)``."""
    if not alpha > -1:
        raise DomainError(f"Bessel kernel needs alpha > -1, got {alpha}")

    def f(x):
        t, j, jp = _bessel_parts(alpha, np.asarray(x, float))
        z = np.zeros_like(t)
        return np.array([j / 2, t * jp / 2, z, z])

    def h(y):
        t, j, jp = _bessel_parts(alpha, np.asarray(y, float))
        z = np.zeros_like(t)
        return np.array([t * jp, -j, z, z])

    def fprime(x):
        x = np.asarray(x, float)
        t, j, jp = _bessel_parts(alpha, x)
        z = np.zeros_like(t)
        # Bessel's equation turns (t J')' / (4t) into -(1 - alpha^2/x) J / 4
        return np.array([jp / (4 * t), -(1 - alpha * alpha / x) * j / 4, z, z])

    return IIKSKernel(f=f, h=h, fprime=fprime, name=f"bessel-iiks(alpha={alpha})")


def _threads():
    try:
        return max(1, int(os.environ.get("HARDEDGE_THREADS", "1")))
    except ValueError:
        return 1


def kernel_values(kernel, x, y):
    """Matrix ``K(x_i, y_j)`` with the diagonal rule where ``x_i == y_j``."""
    x = np.asarray(x, float)
    y = np.asarray(y, float)
    n_threads = _threads()

    def rows(lo, hi):
        xx, yy = np.meshgrid(x[lo:hi], y, indexing="ij")
        same = xx == yy
        with np.errstate(divide="ignore", invalid="ignore"):
            block = np.asarray(kernel.offdiag(xx, yy))
        if np.any(same):
            block = np.where(same, kernel.diag(xx), block)
        return block

    if n_threads == 1 or len(x) < 64:
        return rows(0, len(x))
    cuts = np.linspace(0, len(x), n_threads + 1).astype(int)
    with ThreadPoolExecutor(max_workers=n_threads) as ex:
        parts = list(ex.map(lambda ab: rows(*ab), zip(cuts[:-1], cuts[1:])))
    return np.vstack(parts)


def kernel_matrix(kernel, grid):
    """Symmetrised Nystrom matrix ``W^{1/2} K W^{1/2}`` (without gamma)."""
    sw = np.sqrt(grid.weights)
    return sw[:, None] * kernel_values(kernel, grid.nodes, grid.nodes) * sw[None, :]


def _check_gamma(gamma):
    if np.iscomplexobj(gamma):
        return complex(gamma)
    gamma = float(gamma)
    if not 0 <= gamma <= 1:
        raise DomainError(f"gamma must lie in [0, 1], got {gamma}")
    return gamma


def log_det_on_grid(kernel, gamma, grid):
    """``ln det(I - gamma W^{1/2} K W^{1/2})`` for one fixed grid."""
    gamma = _check_gamma(gamma)
    if gamma == 0:
        return 0.0
    mat = np.eye(grid.n) - gamma * kernel_matrix(kernel, grid)
    sign, logabs = np.linalg.slogdet(mat)
    if sign == 0:
        raise DomainError("I - gamma K is singular on this grid")
    if np.iscomplexobj(mat) or np.iscomplexobj(sign):
        return complex(logabs + np.log(sign))
    if sign < 0:
        raise DomainError("det(I - gamma K) < 0: gamma times an eigenvalue exceeds 1")
    return float(logabs)


def log_det_eigen(kernel, gamma, grid):
    """Oracle: ``sum ln(1 - gamma lambda_i)`` over eigenvalues of the same matrix."""
    gamma = _check_gamma(gamma)
    mat = kernel_matrix(kernel, grid)
    if kernel.symmetric and not np.iscomplexobj(mat):
        lam = np.linalg.eigvalsh((mat + mat.T) / 2)
        return float(np.sum(np.log1p(-gamma * lam)))
    lam = np.linalg.eigvals(mat)
    return complex(np.sum(np.log(1 - gamma * lam)))


@dataclass(frozen=True)
class LogDetResult:
    value: float
    n_used: int
    history: tuple = field(default=())


def _refine(fun, s, map, ladder, tol):
    history = []
    prev = None
    for n in ladder:
        val = fun(make_grid(s, n, map))
        history.append((n, val))
        if prev is not None and abs(val - prev) < tol:
            return LogDetResult(value=val, n_used=n, history=tuple(history))
        prev = val
    diff = abs(history[-1][1] - history[-2][1]) if len(history) > 1 else float("inf")
    raise ConvergenceError(f"no convergence to {tol:g} on ladder {tuple(ladder)}", residual=diff)


def log_det(kernel, gamma, s, map="gauss_legendre_sqrt", tol=1e-10, ladder=DEFAULT_LADDER):
    """``ln det(I - gamma K)`` on ``(0, s)``, refined along ``ladder`` until successive
    values differ by less than ``tol``."""
    return _refine(lambda g: log_det_on_grid(kernel, gamma, g), s, map, ladder, tol)


def resolvent_on_grid(kernel, gamma, grid, point=None):
    """``R(point, point)`` for ``R = (I - gamma K)^{-1} gamma K`` by Nystrom interpolation.

    Solves ``r_i = gamma K(x_i, p) + sum_j gamma K(x_i, x_j) w_j r_j`` and
    returns ``gamma K(p, p) + sum_j gamma K(p, x_j) w_j r_j``.  ``point``
    defaults to the right endpoint ``s``.
    """
    gamma = _check_gamma(gamma)
    p = grid.s if point is None else float(point)
    if gamma == 0:
        return 0.0
    x, w = grid.nodes, grid.weights
    kxx = kernel_values(kernel, x, x)
    kxp = kernel_values(kernel, x, [p])[:, 0]
    kpx = kernel_values(kernel, [p], x)[0]
    kpp = kernel.diag(np.array([p]))[0]
    a = np.eye(grid.n) - gamma * kxx * w[None, :]
    r = np.linalg.solve(a, gamma * kxp)
    val = gamma * kpp + gamma * np.dot(kpx * w, r)
    return complex(val) if np.iscomplexobj(val) else float(val)


def resolvent_diag_at_s(kernel, gamma, s, map="gauss_legendre_sqrt", tol=1e-10,
                        ladder=DEFAULT_LADDER):
    return _refine(lambda g: resolvent_on_grid(kernel, gamma, g), s, map, ladder, tol)


def trace_on_grid(kernel, grid):
    return float(np.dot(grid.weights, kernel.diag(grid.nodes)))


def thinning_from_generating(x):
    if x < 0:
        raise DomainError("generating-function variable must be non-negative")
    return -np.expm1(-2 * np.pi * x)


def generating_function(kernel, s, x, map="gauss_legendre_sqrt", tol=1e-10,
                        ladder=DEFAULT_LADDER):
    """``E exp(-2 pi x N(s)) = det(I - (1 - e^{-2 pi x}) K)``."""
    gamma = thinning_from_generating(x)
    res = log_det(kernel, gamma, s, map, tol, ladder)
    return float(np.exp(res.value)), res.n_used


def log_det_derivative_s(kernel, gamma, s, n=160, map="gauss_legendre_sqrt", h=None):
    """Fourth-order central difference of ``ln det`` in ``s`` at fixed ``n``."""
    h = 1e-3 * s if h is None else h

    def f(t):
        return log_det_on_grid(kernel, gamma, make_grid(t, n, map))

    return (f(s - 2 * h) - 8 * f(s - h) + 8 * f(s + h) - f(s + 2 * h)) / (12 * h)


def integrated_resolvent(kernel, gamma, s, n=80, m=40, map="gauss_legendre_sqrt"):
    """``-int_0^s R(t, t) dt`` with ``m`` outer square-root-mapped nodes."""
    outer = make_grid(s, m, "gauss_legendre_sqrt")
    vals = [resolvent_on_grid(kernel, gamma, make_grid(t, n, map)) for t in outer.nodes]
    return -float(np.dot(outer.weights, vals))
