"""Coupled 24-function Hamiltonian system and its Lax-pair identities.

The state is ``(s, p_1..p_12, q_1..q_12)``, split into three blocks of four:
block 1 (indices 1-4) builds ``A_1 = q_b p_b^T``, blocks 2 and 3 build
``A_2 = Q_2 P_2^T + Q_3 P_3^T + c I`` with ``c = (2 nu - 1)/4``.  The
Hamiltonian is ``H = p_b^T (A_0 + A_2/s) q_b``.

The flow implemented by :func:`vector_field` is::

    q_b' = (A_0 + A~_2/s) q_b        p_b' = -(A_0 + A~_2/s)^T p_b
    Q_k' = (p_b . Q_k) q_b / s       P_k' = -(P_k . q_b) p_b / s

with ``A~_2 = A_2 - c I``.  Dropping ``c I`` is a gauge choice: it changes the
field by a multiple of the flow of ``sum_{k<=4} p_k q_k``, which is conserved,
so all identities below hold on the constraint surface where that sum is 0.
"""

from dataclasses import dataclass

import numpy as np
from scipy.integrate import solve_ivp

from .errors import ConvergenceError, DomainError

S_MIN = 1e-6


@dataclass(frozen=True, eq=False)
class PhaseState:
    s: float
    p: np.ndarray
    q: np.ndarray

    def __post_init__(self):
        p = np.asarray(self.p, dtype=complex).reshape(12)
        q = np.asarray(self.q, dtype=complex).reshape(12)
        object.__setattr__(self, "p", p)
        object.__setattr__(self, "q", q)

    @classmethod
    def from_vector(cls, s, y):
        return cls(s=float(s), p=y[:12], q=y[12:])

    def vector(self):
        return np.concatenate([self.p, self.q])

    def constraint(self):
        return complex(np.dot(self.p[:4], self.q[:4]))


@dataclass(frozen=True)
class ModelConstants:
    """Scalars entering ``A_0``.  ``m*`` are entries of ``M^(1)``."""

    nu: float
    stilde: float
    tau: float
    m11: complex
    m12: complex
    m13: complex
    m14: complex
    m33: complex
    m34: complex

    @classmethod
    def from_m1(cls, m1, **overrides):
        vals = {k: getattr(m1, k) for k in ("m11", "m12", "m13", "m14", "m33", "m34")}
        vals.update(overrides)
        missing = [k for k, v in vals.items() if v is None]
        if missing:
            raise DomainError(f"M^(1) entries not set: {', '.join(missing)}")
        return cls(nu=m1.nu, stilde=m1.stilde, tau=m1.tau, **vals)

    @property
    def c(self):
        return (2 * self.nu - 1) / 4


@dataclass(frozen=True, eq=False)
class LaxMatrices:
    a0: np.ndarray
    a1: np.ndarray
    a2: np.ndarray


def a0_matrix(consts):
    x = -consts.m13 + consts.m14
    y = consts.m11 + consts.m12 - consts.m33 + consts.m34
    t = consts.tau
    a0 = np.zeros((4, 4), dtype=complex)
    a0[0, 1] = (t - 1j * x) / 2
    a0[0, 3] = -0.5j
    a0[2, 0] = 0.5j
    a0[2, 1] = -(1j * consts.stilde + 1j * y) / 2
    a0[2, 3] = -(t + 1j * x) / 2
    a0[3, 1] = -0.5j
    return a0


def _blocks(v):
    return v[:4], v[4:8], v[8:12]


def build_lax(state, consts):
    p1, p2, p3 = _blocks(state.p)
    q1, q2, q3 = _blocks(state.q)
    a1 = np.outer(q1, p1)
    a2 = np.outer(q2, p2) + np.outer(q3, p3) + consts.c * np.eye(4)
    return LaxMatrices(a0=a0_matrix(consts), a1=a1, a2=a2)


def _check_s(s):
    if not s > 0:
        raise DomainError(f"s must be positive, got {s}")


def hamiltonian(state, consts):
    _check_s(state.s)
    lax = build_lax(state, consts)
    return complex(state.p[:4] @ (lax.a0 + lax.a2 / state.s) @ state.q[:4])


def _field(s, y, a0, c):
    p1, p2, p3 = y[0:4], y[4:8], y[8:12]
    q1, q2, q3 = y[12:16], y[16:20], y[20:24]
    pq2, pq3 = p1 @ q2, p1 @ q3          # p_b . Q_k
    qp2, qp3 = p2 @ q1, p3 @ q1          # P_k . q_b
    out = np.empty(24, dtype=complex)
    out[0:4] = -(a0.T @ p1) - (pq2 * p2 + pq3 * p3) / s
    out[4:8] = -qp2 * p1 / s
    out[8:12] = -qp3 * p1 / s
    out[12:16] = a0 @ q1 + (qp2 * q2 + qp3 * q3) / s
    out[16:20] = pq2 * q1 / s
    out[20:24] = pq3 * q1 / s
    return out


def vector_field(state, consts):
    """Derivative ``(p', q')`` of the 24 functions at ``state``."""
    _check_s(state.s)
    d = _field(state.s, state.vector(), a0_matrix(consts), consts.c)
    return PhaseState(s=state.s, p=d[:12], q=d[12:])


def printed_vector_field(state, consts):
    """The field with the opposite sign of the ``A_0`` terms in ``p_1..p_4``.

    Kept only to show that this sign choice breaks the Hamilton and Lax
    identities; use :func:`vector_field`.
    """
    d = vector_field(state, consts)
    a0 = a0_matrix(consts)
    p = d.p.copy()
    p[:4] += 2 * (a0.T @ state.p[:4])
    return PhaseState(s=state.s, p=p, q=d.q)


def random_state(rng, s=1.0, scale=0.5, on_constraint=True):
    """Random complex state; projected so that ``sum_{k<=4} p_k q_k = 0``."""
    def draw():
        return scale * (rng.standard_normal(12) + 1j * rng.standard_normal(12))

    p, q = draw(), draw()
    if on_constraint:
        pb = p[:4]
        q[:4] = q[:4] - (pb @ q[:4]) * pb.conj() / (pb @ pb.conj())
    return PhaseState(s=s, p=p, q=q)


def hamilton_residual(state, consts, h=1e-6, field=None):
    """Relative mismatch between the field and Hamilton's equations for ``H``.

    ``X_H = (-dH/dq, dH/dp)`` comes from central differences.  The field
    differs from ``X_H`` by ``-(c/s) X_g`` with ``X_g = (-p_b, q_b)`` the flow
    of the constraint function, which is removed before comparing.
    ``field`` defaults to :func:`vector_field`.
    """
    field_fn = vector_field if field is None else field
    y = state.vector()
    grad = np.empty(24, dtype=complex)
    for k in range(24):
        e = np.zeros(24, dtype=complex)
        e[k] = h
        hp = hamiltonian(PhaseState.from_vector(state.s, y + e), consts)
        hm = hamiltonian(PhaseState.from_vector(state.s, y - e), consts)
        grad[k] = (hp - hm) / (2 * h)
    x_h = np.concatenate([-grad[12:], grad[:12]])
    x_g = np.zeros(24, dtype=complex)
    x_g[0:4] = -state.p[:4]
    x_g[12:16] = state.q[:4]
    field = field_fn(state, consts).vector()
    diff = field - x_h + (consts.c / state.s) * x_g
    return float(np.linalg.norm(diff) / np.linalg.norm(field))


@dataclass(frozen=True, eq=False)
class Trajectory:
    s0: float
    s1: float
    sol: object
    nfev: int

    def __call__(self, s):
        return PhaseState.from_vector(s, self.sol(s))

    def vector(self, s):
        return self.sol(s)


def integrate(initial, consts, s_end, tol=1e-12):
    """Adaptive DOP853 integration from ``initial.s`` to ``s_end``.

    The system is singular at ``s = 0``; starting points below ``S_MIN`` are
    rejected.  Step-size collapse (typically finite-``s`` blow-up of generic
    complex data) raises :class:`ConvergenceError`.
    """
    if not initial.s >= S_MIN:
        raise DomainError(f"initial s must be at least {S_MIN}")
    if not s_end > initial.s:
        raise DomainError("s_end must exceed the initial s")
    a0 = a0_matrix(consts)
    c = consts.c
    res = solve_ivp(_field, (initial.s, s_end), initial.vector(), method="DOP853",
                    rtol=tol, atol=tol * 1e-2, dense_output=True, args=(a0, c))
    if res.status != 0:
        raise ConvergenceError(f"integration stopped at s={res.t[-1]}: {res.message}")
    return Trajectory(s0=initial.s, s1=float(s_end), sol=res.sol, nfev=res.nfev)


def _fd(fun, s, h):
    return (fun(s - 2 * h) - 8 * fun(s - h) + 8 * fun(s + h) - fun(s + 2 * h)) / (12 * h)


def _rel(a, b):
    return float(np.max(np.abs(a - b)) / max(1.0, np.max(np.abs(a))))


IDENTITY_KEYS = ("dH", "H1", "A1", "A2")


def identity_residuals_at(traj, consts, s, h=1e-3):
    """Residuals of the four differential identities at one point ``s``.

    Derivatives are five-point differences of the dense output with step
    ``h``, so ``s`` must lie at least ``2 h`` inside the trajectory.  Each
    residual is divided by ``max(1, |derivative|)``; see :func:`check_identities`.
    """
    def ham(t):
        return hamiltonian(traj(t), consts)

    def lax(t):
        return build_lax(traj(t), consts)

    st = traj(s)
    lx = lax(s)
    b = lx.a0 + lx.a2 / s
    pb, qb = st.p[:4], st.q[:4]
    out = {}
    dh = _fd(ham, s, h)
    out["dH"] = abs(dh + pb @ lx.a2 @ qb / s ** 2) / max(1.0, abs(dh))
    qdot = _fd(traj.vector, s, h)[12:]
    lhs = np.dot(st.p, qdot) - ham(s)
    rhs = ham(s) - _fd(lambda t: t * ham(t), s, h)
    out["H1"] = abs(lhs - rhs) / max(1.0, abs(lhs))
    a1dot = _fd(lambda t: lax(t).a1, s, h)
    out["A1"] = _rel(a1dot, -(lx.a1 @ b - b @ lx.a1))
    a2dot = _fd(lambda t: lax(t).a2, s, h)
    out["A2"] = _rel(a2dot, (lx.a1 @ lx.a2 - lx.a2 @ lx.a1) / s)
    return {k: float(v) for k, v in out.items()}


def check_identities(traj, consts, n_points=40, h=1e-3):
    """Max deviations of the differential identities along a trajectory.

    Derivatives are five-point differences of the dense output.  Keys:
    ``dH`` for ``H' + p_b A_2 q_b / s^2``; ``H1`` for
    ``sum p_k q_k' - H - (H - (sH)')``; ``A1`` for ``A_1' + [A_1, A_0 + A_2/s]``;
    ``A2`` for ``A_2' - [A_1/s, A_2]``; ``sum14`` and ``sum512`` for drift of
    the two conserved sums; ``rank_a1`` for the second singular value of
    ``A_1`` relative to the first.  The four identity residuals are divided
    by ``max(1, |derivative|)`` so that large excursions of the state do not
    swamp the finite-difference error budget.
    """
    s_pts = np.linspace(traj.s0 + 2.5 * h, traj.s1 - 2.5 * h, n_points)
    report = dict.fromkeys(IDENTITY_KEYS + ("sum14", "sum512", "rank_a1"), 0.0)
    first = traj(traj.s0)
    c14 = np.dot(first.p[:4], first.q[:4])
    c512 = np.dot(first.p[4:], first.q[4:])
    for s in s_pts:
        for k, v in identity_residuals_at(traj, consts, s, h).items():
            report[k] = max(report[k], v)
        st = traj(s)
        report["sum14"] = max(report["sum14"], abs(np.dot(st.p[:4], st.q[:4]) - c14))
        report["sum512"] = max(report["sum512"], abs(np.dot(st.p[4:], st.q[4:]) - c512))
        sv = np.linalg.svd(build_lax(st, consts).a1, compute_uv=False)
        if sv[0] > 0:
            report["rank_a1"] = max(report["rank_a1"], sv[1] / sv[0])
    return {k: float(v) for k, v in report.items()}
