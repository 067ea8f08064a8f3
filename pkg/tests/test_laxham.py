import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from hardedge import laxham as lh
from hardedge.errors import DomainError
from hardedge.painleve import m1_entries, solve_hm


@pytest.fixture(scope="module")
def consts():
    sol = solve_hm(0.25)
    return lh.ModelConstants.from_m1(m1_entries(0.25, 0.3, 0.0, sol))


def generic_consts(nu=0.7, tau=0.4):
    # tau != 0: the M^(1) entries are free inputs
    return lh.ModelConstants(nu=nu, stilde=-0.2, tau=tau, m11=0.1 + 0.2j, m12=-0.3j,
                             m13=0.5 - 0.1j, m14=0.2j, m33=0.05, m34=-0.1 + 0.1j)


def zero_state(s=1.0):
    return lh.PhaseState(s=s, p=np.zeros(12), q=np.zeros(12))


def test_zero_state(consts):
    lax = lh.build_lax(zero_state(), consts)
    assert np.all(lax.a1 == 0)
    assert np.allclose(lax.a2, (2 * 0.25 - 1) / 4 * np.eye(4))
    assert lh.hamiltonian(zero_state(), consts) == 0
    assert np.all(lh.vector_field(zero_state(), consts).vector() == 0)


def test_outer_product_structure(consts):
    q = np.zeros(12)
    p = np.zeros(12)
    q[0], p[2] = 1, 1
    lax = lh.build_lax(lh.PhaseState(s=1.0, p=p, q=q), consts)
    e13 = np.zeros((4, 4))
    e13[0, 2] = 1
    assert np.array_equal(lax.a1, e13)


def test_trace_a2(consts):
    state = lh.random_state(np.random.default_rng(0))
    lax = lh.build_lax(state, consts)
    expected = np.dot(state.p[4:], state.q[4:]) + (2 * consts.nu - 1)
    assert np.trace(lax.a2) == pytest.approx(expected)
    assert np.trace(lax.a1) == pytest.approx(state.constraint())


def test_hamiltonian_hand_value(consts):
    p = np.zeros(12, dtype=complex)
    q = np.zeros(12, dtype=complex)
    q[0], p[2] = 1, 2.5
    assert lh.hamiltonian(lh.PhaseState(s=3.0, p=p, q=q), consts) == pytest.approx(2.5 * 0.5j)


def test_p3_has_no_a0_term(consts):
    rng = np.random.default_rng(1)
    p = np.zeros(12, dtype=complex)
    q = np.zeros(12, dtype=complex)
    p[:4] = rng.standard_normal(4)
    q[:4] = rng.standard_normal(4)
    d = lh.vector_field(lh.PhaseState(s=2.0, p=p, q=q), consts)
    assert d.p[2] == 0


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 2 ** 32 - 1), st.floats(0.1, 10), st.complex_numbers(max_magnitude=3, allow_nan=False))
def test_hamiltonian_linear_in_first_block(seed, s, lam):
    c = generic_consts()
    state = lh.random_state(np.random.default_rng(seed), s=s)
    # H is linear in p_1..p_4; p_5..p_12 enter quadratically through A_2
    p = state.p.copy()
    p[:4] *= lam
    scaled = lh.PhaseState(s=s, p=p, q=state.q)
    h0 = lh.hamiltonian(state, c)
    assert abs(lh.hamiltonian(scaled, c) - lam * h0) <= 1e-12 * max(1, abs(lam * h0))


@pytest.mark.parametrize("which", ["hm", "generic"])
def test_hamilton_equations(consts, which):
    c = consts if which == "hm" else generic_consts()
    rng = np.random.default_rng(2)
    for _ in range(20):
        state = lh.random_state(rng, s=rng.uniform(0.5, 5))
        assert lh.hamilton_residual(state, c) < 1e-6


def test_opposite_a0_sign_is_not_hamiltonian(consts):
    state = lh.random_state(np.random.default_rng(3), s=2.0)
    assert lh.hamilton_residual(state, consts, field=lh.printed_vector_field) > 1e-2


def test_identities_along_trajectories(consts):
    rng = np.random.default_rng(4)
    for _ in range(10):
        traj = lh.integrate(lh.random_state(rng, s=1.0), consts, 5.0)
        rep = lh.check_identities(traj, consts)
        for key in ("dH", "H1", "A1", "A2"):
            assert rep[key] < 1e-6, (key, rep)
        assert rep["sum14"] < 1e-10 * 4
        assert rep["sum512"] < 1e-10 * 4
        assert rep["rank_a1"] < 1e-9


def test_zero_trajectory(consts):
    traj = lh.integrate(zero_state(), consts, 2.0)
    assert np.all(traj.vector(1.7) == 0)
    rep = lh.check_identities(traj, consts, n_points=5)
    assert all(v == 0 for v in rep.values())


def test_off_constraint_state_breaks_identity(consts):
    # the H1 identity needs sum_{k<=4} p_k q_k = 0
    state = lh.random_state(np.random.default_rng(5), s=1.0, on_constraint=False)
    assert abs(state.constraint()) > 1e-3
    rep = lh.check_identities(lh.integrate(state, consts, 2.0), consts, n_points=5)
    assert rep["H1"] > 1e-4
    assert rep["dH"] < 1e-6


def test_errors(consts):
    with pytest.raises(DomainError):
        lh.hamiltonian(zero_state(s=0.0), consts)
    with pytest.raises(DomainError):
        lh.integrate(zero_state(s=1e-8), consts, 1.0)
    with pytest.raises(DomainError):
        lh.integrate(zero_state(s=2.0), consts, 1.0)
    with pytest.raises(DomainError):
        lh.ModelConstants.from_m1(m1_entries(0.25, 0.3, 0.5, solve_hm(0.25)))
