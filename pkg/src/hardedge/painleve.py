"""Hastings-McLeod solution of inhomogeneous Painleve II.

Solves ``q'' = 2 q^3 + x q - nu`` with ``q ~ nu/x`` as ``x -> +inf`` and
``q ~ sqrt(-x/2)`` as ``x -> -inf``.  The primary solver is a spectral-element
Chebyshev collocation of the two-point problem on ``[-L, L]`` with Newton's
method.  :func:`shoot_hm` is an independent shooting solver used as an oracle.
"""

from dataclasses import dataclass, field
import math

import numpy as np
from scipy import sparse
from scipy.integrate import solve_ivp
from scipy.sparse.linalg import spsolve
from scipy.special import airy

from .errors import ConvergenceError, DomainError


@dataclass(frozen=True)
class HMConfig:
    L: float = 30.0
    n_nodes: int = 801
    degree: int = 20
    tol: float = 1e-9
    max_iter: int = 60
    step_tol: float = 1e-13

    def solve(self, nu):
        return solve_hm(nu, self.L, self.n_nodes, self.degree, self.tol, self.max_iter,
                        self.step_tol)


@dataclass(frozen=True, eq=False)
class HMSolution:
    nu: float
    L: float
    x: np.ndarray
    q: np.ndarray
    qprime: np.ndarray
    u: np.ndarray
    degree: int
    residual: float
    iterations: int = 0
    _edges: np.ndarray = field(default=None, repr=False)

    def _locate(self, x):
        x = float(x)
        if not -self.L <= x <= self.L:
            raise DomainError(f"x={x} outside [-{self.L}, {self.L}]")
        e = min(int(np.searchsorted(self._edges, x, side="right")) - 1, len(self._edges) - 2)
        sl = slice(e * self.degree, (e + 1) * self.degree + 1)
        return e, sl

    def interpolate(self, values, x):
        """Barycentric interpolation of nodal ``values`` inside the element of ``x``."""
        e, sl = self._locate(x)
        nodes = self.x[sl]
        return _barycentric(nodes, values[sl], float(x))

    def q_at(self, x):
        return self.interpolate(self.q, x)

    def qprime_at(self, x):
        return self.interpolate(self.qprime, x)


def _cheb_nodes(p):
    # Chebyshev-Lobatto points on [-1, 1], increasing
    return -np.cos(np.pi * np.arange(p + 1) / p)


def _cheb_weights(p):
    w = (-1.0) ** np.arange(p + 1)
    w[0] *= 0.5
    w[-1] *= 0.5
    return w


def _cheb_diff(p):
    """Chebyshev differentiation matrix on the increasing Lobatto points."""
    t = _cheb_nodes(p)
    c = np.ones(p + 1)
    c[0] = c[-1] = 2.0
    c *= (-1.0) ** np.arange(p + 1)
    dt = t[:, None] - t[None, :]
    d = np.outer(c, 1 / c) / (dt + np.eye(p + 1))
    d -= np.diag(d.sum(axis=1))
    return d


def _barycentric(nodes, values, x):
    p = len(nodes) - 1
    w = _cheb_weights(p)
    diff = x - nodes
    hit = np.nonzero(diff == 0)[0]
    if hit.size:
        return float(values[hit[0]])
    t = w / diff
    return float(np.dot(t, values) / t.sum())


def _initial_guess(x, nu):
    left = np.sqrt((np.sqrt(x * x + 1) - x) / 4)
    right = nu * x / (x * x + 1)
    s = 0.5 * (1 + np.tanh(x))
    return (1 - s) * left + s * right


def _left_bc(x, nu):
    return math.sqrt(-x / 2)


def _right_bc(x, nu):
    return nu / x


def solve_hm(nu, L=30.0, n_nodes=801, degree=20, tol=1e-9, max_iter=60, step_tol=1e-13):
    """Hastings-McLeod solution on ``[-L, L]`` by spectral-element collocation.

    Boundary values come from the leading asymptotics at ``+-L``; the errors
    they introduce decay exponentially towards the interior.  ``n_nodes`` is
    rounded up to a whole number of elements of the given ``degree``.
    Newton stops once the full step falls below ``step_tol`` (relative) and
    fails if the collocation residual is then above ``tol``.
    """
    nu = float(nu)
    if not nu > -0.5:
        raise DomainError(f"Hastings-McLeod needs nu > -1/2, got {nu}")
    if L < 10:
        raise DomainError("L must be at least 10")
    if n_nodes < 200:
        raise DomainError("n_nodes must be at least 200")
    p = int(degree)
    n_el = max(1, math.ceil((n_nodes - 1) / p))
    edges = np.linspace(-L, L, n_el + 1)
    h = edges[1] - edges[0]
    t = _cheb_nodes(p)
    d1 = _cheb_diff(p) * (2 / h)
    d2 = d1 @ d1
    n = n_el * p + 1
    x = np.concatenate([edges[e] + (t[:-1] + 1) * h / 2 for e in range(n_el)] + [[L]])

    # static sparsity pattern: row blocks for interior nodes and interfaces
    rows, cols, vals = [], [], []
    for e in range(n_el):
        base = e * p
        for i in range(1, p):
            r = base + i
            rows.extend([r] * (p + 1))
            cols.extend(range(base, base + p + 1))
            vals.extend(d2[i])
    for e in range(1, n_el):
        r = e * p
        base_l, base_r = (e - 1) * p, e * p
        rows.extend([r] * (2 * p + 2))
        cols.extend(list(range(base_l, base_l + p + 1)) + list(range(base_r, base_r + p + 1)))
        vals.extend(list(d1[p]) + list(-d1[0]))
    lin = sparse.csr_matrix((vals, (rows, cols)), shape=(n, n))
    interior = np.ones(n, dtype=bool)
    interior[::p] = False

    bc_left, bc_right = _left_bc(-L, nu), _right_bc(L, nu)

    def residual(q):
        r = lin @ q
        r[interior] -= 2 * q[interior] ** 3 + x[interior] * q[interior] - nu
        r[0] = q[0] - bc_left
        r[-1] = q[-1] - bc_right
        return r

    def jacobian(q):
        diag = np.where(interior, -(6 * q * q + x), 0.0)
        jac = (lin + sparse.diags(diag)).tolil()
        jac[0, :] = 0
        jac[-1, :] = 0
        jac[0, 0] = 1
        jac[-1, -1] = 1
        return jac.tocsc()

    q = _initial_guess(x, nu)
    res = residual(q)
    norm = np.max(np.abs(res))
    it = 0
    # the residual floor is set by roundoff in D^2, so stop on the Newton step
    while it < max_iter:
        step = spsolve(jacobian(q), -res)
        if np.max(np.abs(step)) < step_tol * max(1.0, np.max(np.abs(q))):
            break
        lam = 1.0
        while True:
            trial = q + lam * step
            r_trial = residual(trial)
            n_trial = np.max(np.abs(r_trial))
            if n_trial < norm or lam < 1e-4:
                break
            lam *= 0.5
        q, res, norm = trial, r_trial, n_trial
        it += 1
    if not norm <= tol:
        raise ConvergenceError(f"Newton stalled with residual {norm:.3e}", residual=float(norm))

    qp = np.empty(n)
    for e in range(n_el):
        sl = slice(e * p, (e + 1) * p + 1)
        qp[sl] = d1 @ q[sl]
    u = qp ** 2 - x * q ** 2 - q ** 4 + 2 * nu * q
    return HMSolution(nu=nu, L=float(L), x=x, q=q, qprime=qp, u=u, degree=p,
                      residual=float(norm), iterations=it, _edges=edges)


def ode_residual(sol, points=None):
    """Max |q'' - 2q^3 - xq + nu| at interior collocation nodes, or at ``points``.

    At arbitrary points ``q''`` is obtained by differentiating the local
    interpolant of ``q'``.
    """
    if points is None:
        p = sol.degree
        n_el = len(sol._edges) - 1
        h = sol._edges[1] - sol._edges[0]
        d1 = _cheb_diff(p) * (2 / h)
        worst = 0.0
        for e in range(n_el):
            sl = slice(e * p, (e + 1) * p + 1)
            qpp = d1 @ sol.qprime[sl]
            xs, qs = sol.x[sl], sol.q[sl]
            r = qpp - 2 * qs ** 3 - xs * qs + sol.nu
            worst = max(worst, float(np.max(np.abs(r[1:-1]))))
        return worst
    worst = 0.0
    for xp in np.atleast_1d(points):
        e, sl = sol._locate(xp)
        h = sol._edges[1] - sol._edges[0]
        d1 = _cheb_diff(sol.degree) * (2 / h)
        qpp_nodes = d1 @ sol.qprime[sl]
        qpp = _barycentric(sol.x[sl], qpp_nodes, float(xp))
        qv = sol.q_at(xp)
        worst = max(worst, abs(qpp - 2 * qv ** 3 - xp * qv + sol.nu))
    return worst


def hm_hamiltonian(sol, x):
    """``u(x) = q'^2 - x q^2 - q^4 + 2 nu q`` from the interpolated solution."""
    q = sol.q_at(x)
    qp = sol.qprime_at(x)
    return qp * qp - x * q * q - q ** 4 + 2 * sol.nu * q


# ---------------------------------------------------------------------------
# shooting oracle


def right_series_coefficients(nu, terms):
    """Coefficients ``a_n`` of the formal expansion ``q ~ sum a_n x^(2-3n)``."""
    a = [0.0, float(nu)]
    for m in range(2, terms + 1):
        cubic = 0.0
        for i in range(1, m):
            for j in range(1, m - i + 1):
                k = m + 1 - i - j
                if 1 <= k <= m - 1:
                    cubic += a[i] * a[j] * a[k]
        a.append(a[m - 1] * (5 - 3 * m) * (4 - 3 * m) - 2 * cubic)
    return a[1:]


def _right_series(nu, x):
    # sum terms while they keep shrinking (optimal truncation)
    coef = right_series_coefficients(nu, 40)
    q = qp = 0.0
    prev = math.inf
    for n, a in enumerate(coef, start=1):
        term = a * x ** (2 - 3 * n)
        if abs(term) > prev:
            break
        q += term
        qp += a * (2 - 3 * n) * x ** (1 - 3 * n)
        prev = abs(term) if term != 0 else prev
    return q, qp


@dataclass(frozen=True, eq=False)
class ShootingResult:
    """Dense shooting trajectory; trustworthy on ``[x_valid, x_right]``."""

    sol: object
    k: float
    x_valid: float
    x_right: float

    def q_at(self, x):
        if not self.x_valid <= x <= self.x_right:
            raise DomainError(f"x={x} outside the trusted range [{self.x_valid}, {self.x_right}]")
        return float(self.sol(x)[0])


def shoot_hm(nu, x_right=6.0, x_left=-8.0, rtol=1e-13, bisections=70, depart_tol=0.25):
    """Independent Hastings-McLeod solution by shooting leftward from ``x_right``.

    The starting data is the right asymptotic series plus ``k * Ai``.  Each
    trajectory is classified as ending above or below the left asymptotics
    ``sqrt(-x/2) - nu/(2x)`` (poles count by their sign).  Several sign
    changes in ``k`` exist; most separate solutions with a real pole.  Every
    one is bisected, and the trajectory that follows the left asymptotics
    furthest (to within ``depart_tol``) is kept.  Instability amplifies
    roundoff by ``exp((2 sqrt2/3)|x|^(3/2))`` on the left, so the trajectory
    eventually departs; ``x_valid`` is set two units right of that point.
    """
    nu = float(nu)
    if not nu > -0.5:
        raise DomainError(f"Hastings-McLeod needs nu > -1/2, got {nu}")
    q0, qp0 = _right_series(nu, x_right)
    ai, aip, _, _ = airy(x_right)

    def rhs(x, y):
        return [y[1], 2 * y[0] ** 3 + x * y[0] - nu]

    def blowup(x, y):
        return abs(y[0]) - 50.0

    blowup.terminal = True

    def run(k, dense=False):
        return solve_ivp(rhs, (x_right, x_left), [q0 + k * ai, qp0 + k * aip],
                         method="DOP853", rtol=rtol, atol=1e-30, events=blowup,
                         dense_output=dense)

    def target(x):
        return math.sqrt(-x / 2) - nu / (2 * x)

    def above(k):
        r = run(k)
        if r.status == 1:
            return r.y[0, -1] > 0
        return r.y[0, -1] > target(x_left)

    grid = np.linspace(-3.0, x_left, 101)

    def departure(r):
        xs = grid[grid >= r.t[-1]]
        off = np.abs(r.sol(xs)[0] - [target(x) for x in xs]) > depart_tol
        return xs[np.argmax(off)] if off.any() else r.t[-1]

    scan = np.concatenate([-np.logspace(6, -3, 28), [0.0], np.logspace(-3, 6, 28)])
    signs = [above(k) for k in scan]
    best, best_k, best_x = None, None, math.inf
    for i in range(len(scan) - 1):
        if signs[i] == signs[i + 1]:
            continue
        lo, hi, lo_sign = scan[i], scan[i + 1], signs[i]
        for _ in range(bisections):
            mid = 0.5 * (lo + hi)
            if mid in (lo, hi):
                break
            if above(mid) == lo_sign:
                lo = mid
            else:
                hi = mid
        k = 0.5 * (lo + hi)
        r = run(k, dense=True)
        x_dep = departure(r)
        if x_dep < best_x:
            best, best_k, best_x = r, k, x_dep
    if best is None or best_x > -4.0:
        raise ConvergenceError("no separatrix follows the left asymptotics", residual=best_x)
    return ShootingResult(sol=best.sol, k=float(best_k), x_valid=float(best_x + 2.0),
                          x_right=float(x_right))


# ---------------------------------------------------------------------------
# M^(1) entries


@dataclass(frozen=True)
class MOneEntries:
    nu: float
    stilde: float
    tau: float
    m13: complex
    m14: complex
    m11: complex = None
    m12: complex = None
    m33: complex = None
    m34: complex = None


def m1_entries(nu, stilde, tau, sol):
    """Entries of ``M^(1)`` expressed through the Hastings-McLeod solution.

    ``m13 = -2^(-1/3) i u(x) + stilde^2`` and ``m14 = 2^(-1/3) i q(x)`` with
    ``x = 2^(2/3)(stilde - tau^2)``.  The ``stilde^2`` term sits outside the
    argument of ``u``.  At ``tau = 0`` the four further entries
    ``m11 = m12 = -m33 = m34 = (m13^2 - m14^2 + stilde)/2`` are filled in;
    otherwise they are left as ``None``.
    """
    if abs(float(nu) - sol.nu) > 0:
        raise DomainError("solution was computed for a different nu")
    x = 2 ** (2 / 3) * (stilde - tau * tau)
    c = 2 ** (-1 / 3)
    m13 = -c * 1j * hm_hamiltonian(sol, x) + stilde ** 2
    m14 = c * 1j * sol.q_at(x)
    if tau != 0:
        return MOneEntries(nu=float(nu), stilde=float(stilde), tau=float(tau), m13=m13, m14=m14)
    v = (m13 ** 2 - m14 ** 2 + stilde) / 2
    return MOneEntries(nu=float(nu), stilde=float(stilde), tau=0.0, m13=m13, m14=m14,
                       m11=v, m12=v, m33=-v, m34=v)
