"""Non-intersecting squared Bessel paths with fixed endpoints.

The transition density of the squared Bessel process with parameter
``alpha > -1`` is :func:`sbesq_density`; the process satisfies
``dX = 2(alpha+1) dt + 2 sqrt(X) dW``.  It is symmetric with respect to the
measure ``y**alpha dy``, i.e. ``p_t(x, y) x**alpha = p_t(y, x) y**alpha``,
which gives a bridge density that stays finite when an endpoint is 0.

Ensembles are built step by step on a time grid.  Each path moves as a
squared Bessel bridge towards the common end point ``b``; a step is redrawn
until the strict ordering ``X_1 < ... < X_n`` holds.  This conditions on
non-intersection one step at a time.  Conditioning the whole path at once is
exact but its acceptance rate decays like ``dt**(n(n-1)/2)`` when all paths
share their end points, so it is impractical even for ``n = 3``.
Ensembles are therefore qualitative pictures, meant for ``n <= 8``.
"""

import math
from dataclasses import dataclass

import numpy as np

from .errors import ConvergenceError, DomainError, NumericalError
from .specfun import bessel_i

MAX_PATHS = 8
BRIDGE_POINTS = 2001
# grid points whose log-weight is this far below the peak carry negligible mass
TAIL_DROP = 40.0


def _check_alpha(alpha):
    alpha = float(alpha)
    if not alpha > -1:
        raise DomainError(f"alpha must exceed -1, got {alpha}")
    return alpha


def sbesq_logdensity(alpha, t, x, y):
    """Logarithm of the transition density ``p_t(x, y)``; broadcasts over ``x`` and ``y``."""
    alpha = _check_alpha(alpha)
    if not t > 0:
        raise DomainError(f"t must be positive, got {t}")
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if np.any(x < 0) or np.any(y <= 0):
        raise DomainError("need x >= 0 and y > 0")
    x, y = np.broadcast_arrays(x, y)
    out = np.empty(x.shape)
    zero = x == 0
    if np.any(zero):
        yz = y[zero]
        out[zero] = (alpha * np.log(yz) - yz / (2 * t) - (alpha + 1) * math.log(2 * t)
                     - math.lgamma(alpha + 1))
    pos = ~zero
    if np.any(pos):
        xp, yp = x[pos], y[pos]
        z = np.sqrt(xp * yp) / t
        scaled_i = np.real(np.asarray(bessel_i(alpha, z, scaled=True)))
        out[pos] = (-math.log(2 * t) + alpha / 2 * (np.log(yp) - np.log(xp))
                    - (np.sqrt(xp) - np.sqrt(yp)) ** 2 / (2 * t) + np.log(scaled_i))
    return out if out.ndim else float(out)


def sbesq_density(alpha, t, x, y):
    """Transition density ``p_t(x, y)`` of the squared Bessel process."""
    return np.exp(sbesq_logdensity(alpha, t, x, y))


def bridge_logweight(alpha, t0, x0, t1, x1, t_mid, z):
    """Unnormalised log-density of ``X(t_mid)`` given ``X(t0) = x0`` and ``X(t1) = x1``.

    Uses ``p(x0 -> z) p(z -> x1) = p(x0 -> z) p(x1 -> z) (x1 / z)**alpha``.
    """
    return (sbesq_logdensity(alpha, t_mid - t0, x0, z)
            + sbesq_logdensity(alpha, t1 - t_mid, x1, z) - alpha * np.log(z))


@dataclass(frozen=True, eq=False)
class BridgeTable:
    """Tabulated inverse CDF of a bridge marginal, in the variable ``u = sqrt(z)``.

    When the window starts at ``u = 0`` the first cell follows the local power
    law ``u**(power - 1)`` exactly (``power = 2 alpha + 2``); other cells are
    piecewise linear in the CDF.
    """

    u: np.ndarray
    cdf: np.ndarray
    power: float = None

    def draw(self, rng, size=None):
        r = rng.random(size)
        u = np.interp(r, self.cdf, self.u)
        if self.power is not None:
            first = r < self.cdf[1]
            u = np.where(first, self.u[1] * (r / self.cdf[1]) ** (1 / self.power), u)
        return u ** 2

    def mean(self):
        z = self.u ** 2
        dz = np.diff(self.cdf)
        cells = dz * (z[1:] + z[:-1]) / 2
        if self.power is not None:
            cells[0] = dz[0] * z[1] * self.power / (self.power + 2)
        return float(np.sum(cells))


def bridge_table(alpha, t0, x0, t1, x1, t_mid, points=BRIDGE_POINTS):
    """Tabulate the bridge marginal at ``t_mid`` on an adaptive window.

    ``sqrt(X)`` has unit diffusion, so the window is centred at the linear
    interpolation of ``sqrt(x0)``, ``sqrt(x1)`` with width a multiple of the
    bridge standard deviation; it is widened until the log-weight at both
    ends is ``TAIL_DROP`` below the peak.
    """
    alpha = _check_alpha(alpha)
    if not t0 < t_mid < t1:
        raise DomainError("need t0 < t_mid < t1")
    if x0 < 0 or x1 < 0:
        raise DomainError("bridge end points must be non-negative")
    ta, tb = t_mid - t0, t1 - t_mid
    sd = math.sqrt(ta * tb / (ta + tb))
    uc = (tb * math.sqrt(x0) + ta * math.sqrt(x1)) / (ta + tb)
    width = (10.0 + 2 * math.sqrt(alpha + 1)) * sd
    for _ in range(8):
        lo, hi = max(0.0, uc - width), uc + width
        u = np.linspace(lo, hi, points)
        inner = u[1:] if lo == 0 else u
        with np.errstate(divide="ignore", over="ignore", invalid="ignore"):
            logw = bridge_logweight(alpha, t0, x0, t1, x1, t_mid, inner ** 2) + np.log(2 * inner)
        if lo == 0:
            logw = np.concatenate([[-np.inf], logw])
        finite = np.isfinite(logw)
        if not np.any(finite):
            width *= 2
            continue
        peak = np.max(logw[finite])
        edge_ok = logw[-1] < peak - TAIL_DROP and (lo == 0 or logw[0] < peak - TAIL_DROP)
        if edge_ok:
            break
        width *= 2
    else:
        raise NumericalError("bridge density does not decay inside the tabulation window")
    dens = np.where(finite, np.exp(logw - peak), 0.0)
    cells = (dens[1:] + dens[:-1]) / 2 * np.diff(u)
    power = None
    if lo == 0:
        # near 0 the weight in u behaves like u**(2 alpha + 1)
        power = 2 * alpha + 2
        cells[0] = dens[1] * u[1] / power
    cdf = np.concatenate([[0.0], np.cumsum(cells)])
    if not (np.isfinite(cdf[-1]) and cdf[-1] > 0):
        raise NumericalError("bridge CDF tabulation failed")
    return BridgeTable(u=u, cdf=cdf / cdf[-1], power=power)


def sample_bridge(alpha, t0, x0, t1, x1, t_mid, rng=None, size=None):
    """Draw ``X(t_mid)`` from the squared Bessel bridge by inverse CDF."""
    rng = np.random.default_rng(rng)
    return bridge_table(alpha, t0, x0, t1, x1, t_mid).draw(rng, size)


@dataclass(frozen=True, eq=False)
class PathEnsemble:
    n: int
    alpha: float
    a: float
    b: float
    T: float
    times: np.ndarray
    X: np.ndarray
    acceptance_rate: float
    attempts: int

    def is_ordered(self):
        """Strict ordering of the paths at every interior grid time."""
        inner = self.X[:, 1:-1]
        return bool(np.all(np.diff(inner, axis=0) > 0))


def sample_nonintersecting(n, alpha, a, b, time_grid=None, steps=200, T=1.0, max_rejects=200_000,
                           seed=None, batch=256):
    """Sample ``n`` ordered squared Bessel bridges from ``a`` at ``t = 0`` to ``b`` at ``t = 1``.

    Grid time ``t`` corresponds to process time ``T t / (2 n)``.  At each
    step the ``n`` bridge transitions are drawn in batches of ``batch``
    candidates; the first strictly ordered candidate is kept.  Candidates at
    the first step are sorted (labels are exchangeable when the start is
    common).  ``max_rejects`` bounds the rejected candidates per step.
    ``acceptance_rate`` is the fraction of candidates accepted over all steps.
    """
    n = int(n)
    if not 1 <= n <= MAX_PATHS:
        raise DomainError(f"n must lie in 1..{MAX_PATHS}")
    alpha = _check_alpha(alpha)
    if a < 0 or b < 0:
        raise DomainError("end points must be non-negative")
    if not T > 0:
        raise DomainError("T must be positive")
    times = np.linspace(0.0, 1.0, steps + 1) if time_grid is None else np.asarray(time_grid, float)
    if times[0] != 0 or times[-1] != 1 or np.any(np.diff(times) <= 0):
        raise DomainError("time grid must increase from 0 to 1")
    rng = np.random.default_rng(seed)
    scale = T / (2 * n)
    proc = scale * times
    X = np.empty((n, times.size))
    X[:, 0] = a
    X[:, -1] = b
    attempts = 0
    accepted = 0
    for k in range(1, times.size - 1):
        tables = [bridge_table(alpha, proc[k - 1], X[i, k - 1], proc[-1], b, proc[k]) for i in range(n)]
        rejected = 0
        while True:
            cand = np.stack([tab.draw(rng, batch) for tab in tables])
            if k == 1:
                cand.sort(axis=0)
            ok = np.all(np.diff(cand, axis=0) > 0, axis=0) if n > 1 else np.ones(batch, bool)
            if np.any(ok):
                j = int(np.argmax(ok))
                X[:, k] = cand[:, j]
                attempts += rejected + j + 1
                accepted += 1
                break
            rejected += batch
            if rejected > max_rejects:
                raise ConvergenceError(f"rejection budget exhausted at grid step {k}",
                                       residual=rejected)
    rate = accepted / attempts if attempts else 1.0
    return PathEnsemble(n=n, alpha=alpha, a=float(a), b=float(b), T=float(T), times=times, X=X,
                        acceptance_rate=rate, attempts=attempts)
