import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy.integrate import quad

from hardedge import pathsim as ps
from hardedge.errors import ConvergenceError, DomainError


def _integrate(f):
    return quad(f, 0, np.inf, epsabs=1e-14, epsrel=1e-12, limit=200)[0]


@pytest.mark.parametrize("alpha,x,t", [(0.0, 1.0, 0.3), (0.5, 2.0, 1.0), (-0.5, 0.0, 0.3),
                                       (2.3, 0.0, 0.7), (-0.4, 0.5, 0.05)])
def test_normalization(alpha, x, t):
    assert _integrate(lambda y: ps.sbesq_density(alpha, t, x, y)) == pytest.approx(1.0, abs=1e-8)


@pytest.mark.parametrize("alpha,x,y", [(0.7, 1.3, 0.8), (0.0, 0.0, 2.0), (-0.3, 2.0, 0.1)])
def test_chapman_kolmogorov(alpha, x, y):
    s, t = 0.2, 0.5
    lhs = _integrate(lambda z: ps.sbesq_density(alpha, s, x, z) * ps.sbesq_density(alpha, t, z, y))
    assert lhs == pytest.approx(ps.sbesq_density(alpha, s + t, x, y), rel=1e-6)


def test_origin_formula():
    alpha, t = 0.8, 0.4
    y = np.array([1e-3, 0.1, 2.0])
    expect = y ** alpha * np.exp(-y / (2 * t)) / ((2 * t) ** (alpha + 1) * math.gamma(alpha + 1))
    assert np.allclose(ps.sbesq_density(alpha, t, 0.0, y), expect, rtol=1e-14)
    # the x > 0 formula tends to the x = 0 one
    assert ps.sbesq_density(alpha, t, 1e-12, y) == pytest.approx(expect, rel=1e-9)


def test_symmetry_factor():
    alpha, t, x, y = 1.7, 0.6, 0.9, 2.5
    ratio = ps.sbesq_density(alpha, t, x, y) / ps.sbesq_density(alpha, t, y, x)
    assert ratio == pytest.approx((y / x) ** alpha, rel=1e-13)


def test_density_large_arguments():
    # scaled Bessel evaluation keeps the density finite far from the origin
    assert np.isfinite(ps.sbesq_density(0.5, 0.01, 400.0, 401.0))
    total = quad(lambda y: ps.sbesq_density(0.5, 0.01, 400.0, y), 300, 500, epsabs=1e-14, limit=200)[0]
    assert total == pytest.approx(1.0, abs=1e-8)


def test_density_errors():
    with pytest.raises(DomainError):
        ps.sbesq_density(0.0, 0.0, 1.0, 1.0)
    with pytest.raises(DomainError):
        ps.sbesq_density(-1.0, 0.3, 1.0, 1.0)
    with pytest.raises(DomainError):
        ps.sbesq_density(0.0, 0.3, -1.0, 1.0)


def test_free_mean_quadrature():
    for alpha, x, t in [(0.0, 1.0, 0.3), (1.5, 0.0, 0.8), (-0.5, 2.0, 0.2)]:
        m = _integrate(lambda y: y * ps.sbesq_density(alpha, t, x, y))
        assert m == pytest.approx(x + 2 * (alpha + 1) * t, rel=1e-8)


def test_free_mean_euler_maruyama():
    # independent oracle: simulate dX = 2(alpha+1) dt + 2 sqrt(X) dW
    rng = np.random.default_rng(3)
    alpha, x0, t, steps, m = 0.5, 1.0, 0.3, 300, 40_000
    dt = t / steps
    x = np.full(m, x0)
    for _ in range(steps):
        x = np.abs(x + 2 * (alpha + 1) * dt + 2 * np.sqrt(x) * rng.standard_normal(m) * math.sqrt(dt))
    se = x.std() / math.sqrt(m)
    assert abs(x.mean() - (x0 + 2 * (alpha + 1) * t)) < 4 * se
    # density mean from the closed form
    dm = _integrate(lambda y: y * ps.sbesq_density(alpha, t, x0, y))
    assert abs(x.mean() - dm) < 4 * se


@pytest.mark.parametrize("alpha,x0,x1", [(0.0, 1.0, 2.0), (1.0, 0.0, 0.5), (-0.5, 0.3, 0.0)])
def test_bridge_mean(alpha, x0, x1):
    t0, t1, tm = 0.0, 1.0, 0.4
    w = lambda z: math.exp(ps.bridge_logweight(alpha, t0, x0, t1, x1, tm, z))
    norm = _integrate(w)
    mean = _integrate(lambda z: z * w(z)) / norm
    second = _integrate(lambda z: z * z * w(z)) / norm
    draws = ps.sample_bridge(alpha, t0, x0, t1, x1, tm, rng=11, size=100_000)
    se = math.sqrt((second - mean ** 2) / draws.size)
    assert abs(draws.mean() - mean) < 3 * se
    assert ps.bridge_table(alpha, t0, x0, t1, x1, tm).mean() == pytest.approx(mean, rel=1e-4)


def test_bridge_degenerate():
    draws = ps.sample_bridge(0.0, 0.0, 3.0, 1.0, 3.0, 1e-6, rng=0, size=1000)
    assert np.max(np.abs(draws - 3.0)) < 0.02


def test_bridge_errors():
    with pytest.raises(DomainError):
        ps.sample_bridge(0.0, 0.5, 1.0, 1.0, 1.0, 0.2)
    with pytest.raises(DomainError):
        ps.sample_bridge(0.0, 0.0, -1.0, 1.0, 1.0, 0.2)


def test_single_path_always_accepted():
    e = ps.sample_nonintersecting(1, 0.0, 1.0, 1.0, steps=50, seed=0)
    assert e.acceptance_rate == 1.0
    assert e.X[0, 0] == 1.0 and e.X[0, -1] == 1.0


def test_ensemble_positive_and_ordered():
    positive = 0
    for seed in range(10):
        e = ps.sample_nonintersecting(3, 0.0, 2.0, 2.0, seed=seed)
        assert e.is_ordered()
        assert np.all(e.X[:, 0] == 2.0) and np.all(e.X[:, -1] == 2.0)
        window = (e.times >= 0.05) & (e.times <= 0.95)
        positive += bool(np.all(e.X[:, window] > 0))
    assert positive >= 0.99 * 10


def test_ensemble_deterministic():
    e1 = ps.sample_nonintersecting(3, 0.5, 1.0, 2.0, steps=60, seed=42)
    e2 = ps.sample_nonintersecting(3, 0.5, 1.0, 2.0, steps=60, seed=42)
    assert np.array_equal(e1.X, e2.X)
    assert e1.attempts == e2.attempts


def test_acceptance_decreases_with_n():
    rates = []
    for n in (2, 4, 6):
        rates.append(np.mean([ps.sample_nonintersecting(n, 0.0, 1.0, 1.0, steps=60, seed=s).acceptance_rate
                              for s in range(3)]))
    assert rates[0] > rates[1] > rates[2]


def test_time_scaling():
    # with a single path the grid only rescales time: the endpoint-free mean at
    # grid time t equals the bridge mean at process time T t / 2
    e = ps.sample_nonintersecting(1, 0.0, 1.0, 1.0, steps=4, T=2.0, seed=0)
    assert e.T == 2.0
    tab = ps.bridge_table(0.0, 0.0, 1.0, 1.0, 1.0, 0.25)
    draws = [ps.sample_nonintersecting(1, 0.0, 1.0, 1.0, steps=4, T=2.0, seed=s).X[0, 1] for s in range(400)]
    se = np.std(draws) / math.sqrt(len(draws))
    assert abs(np.mean(draws) - tab.mean()) < 4 * se


def test_ensemble_errors():
    with pytest.raises(DomainError):
        ps.sample_nonintersecting(9, 0.0, 1.0, 1.0)
    with pytest.raises(DomainError):
        ps.sample_nonintersecting(2, 0.0, -1.0, 1.0)
    with pytest.raises(DomainError):
        ps.sample_nonintersecting(2, 0.0, 1.0, 1.0, time_grid=[0.0, 0.5, 0.4, 1.0])
    with pytest.raises(ConvergenceError):
        ps.sample_nonintersecting(8, 0.0, 1.0, 1.0, steps=40, max_rejects=1, seed=0, batch=1)


@settings(max_examples=25, deadline=None)
@given(st.floats(-0.9, 3.0), st.floats(0.0, 5.0), st.floats(0.05, 2.0))
def test_density_positive_and_normalized(alpha, x, t):
    y = np.linspace(0.01, 10, 7)
    assert np.all(ps.sbesq_density(alpha, t, x, y) >= 0)
    total = _integrate(lambda v: ps.sbesq_density(alpha, t, x, v))
    assert total == pytest.approx(1.0, abs=1e-7)
