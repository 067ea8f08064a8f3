import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from hardedge import specfun
from hardedge.errors import BesselOverflowError, BranchCutError, DomainError, PoleError


def _series_oracle(order, z, terms=40):
    # extended-precision partial sum of the defining series
    with mpmath.workdps(40):
        z = mpmath.mpc(z)
        half = z / 2
        total = mpmath.mpf(0)
        for k in range(terms):
            total += half ** (2 * k + order) / (mpmath.factorial(k) * mpmath.gamma(k + order + 1))
        return complex(total)


def test_bessel_i_trivial_values():
    assert specfun.bessel_i(0, 0) == 1
    assert specfun.bessel_i(1.5, 0) == 0


@pytest.mark.parametrize("order,z", [(0, 1.0), (0.5, 3.2), (-0.4, 2.0), (2.3, 7.5), (1, 1 + 2j)])
def test_bessel_i_against_series_oracle(order, z):
    assert specfun.bessel_i(order, z) == pytest.approx(_series_oracle(order, z), rel=1e-13)


def test_bessel_i_real_accuracy_on_0_30():
    xs = np.linspace(0.05, 30, 61)
    for order in (0.0, 0.5, 2.3):
        got = specfun.bessel_i(order, xs).real
        ref = np.array([float(mpmath.besseli(order, x)) for x in xs])
        assert np.max(np.abs(got / ref - 1)) < 1e-12


def test_series_and_amos_agree_in_overlap_band():
    # both regimes are accurate near the switchover radius
    from scipy import special as sc
    z = 12.0 * np.exp(1j * np.linspace(-1.2, 1.2, 9)) * np.linspace(0.85, 0.99, 9)
    for order in (0.0, 1.3):
        series = specfun._series_i(order, z)
        amos = sc.iv(order, z)
        assert np.max(np.abs(series / amos - 1)) < 1e-11


def test_bessel_i_scaled_and_overflow():
    x = 800.0
    with pytest.raises(BesselOverflowError):
        specfun.bessel_i(0, x)
    scaled = specfun.bessel_i(0, x, scaled=True)
    assert scaled.real == pytest.approx(1 / math.sqrt(2 * math.pi * x), rel=1e-3)
    with pytest.raises(DomainError):
        specfun.bessel_i(-1, 1.0)


def test_wronskian_on_log_grid():
    xs = np.logspace(np.log10(0.1), np.log10(20), 50)
    for order in (0.0, 0.5, -0.4, 2.3):
        i, k = specfun.bessel_i(order, xs), specfun.bessel_k(order, xs)
        ip, kp = specfun.bessel_i_prime(order, xs), specfun.bessel_k_prime(order, xs)
        w = i * kp - ip * k
        assert np.max(np.abs(w * xs + 1)) < 1e-10


def test_wronskian_at_one():
    w = (specfun.bessel_i(0, 1.0) * specfun.bessel_k_prime(0, 1.0)
         - specfun.bessel_i_prime(0, 1.0) * specfun.bessel_k(0, 1.0))
    assert w == pytest.approx(-1, abs=1e-13)


def test_k0_small_argument():
    for z in (1e-2, 3e-2, 1e-1):
        rem = specfun.bessel_k(0, z) + (math.log(z / 2) + specfun.EULER_GAMMA) * specfun.bessel_i(0, z)
        # next term of the expansion is z^2/4
        assert abs(rem) / z ** 2 == pytest.approx(0.25, rel=0.1)


def test_k0_large_x_decay():
    x = 50.0
    val = math.exp(x) * specfun.bessel_k(0, x).real * math.sqrt(2 * x / math.pi)
    assert abs(val - 1) < 3e-3
    # the leading correction is -1/(8x); removing it leaves O(x^-2)
    assert abs(val - 1 + 1 / (8 * x)) < 1e-4


def test_k_branch_cut():
    with pytest.raises(BranchCutError):
        specfun.bessel_k(0, -1.0)
    with pytest.raises(BranchCutError):
        specfun.bessel_k(0, 0.0)


def test_gamma_trivial_values():
    assert specfun.log_gamma(1) == 0
    assert abs(specfun.barnes_g_log(1)) < 1e-13
    assert abs(specfun.barnes_g_log(2)) < 1e-13
    with pytest.raises(PoleError):
        specfun.log_gamma(-2)
    with pytest.raises(PoleError):
        specfun.digamma(0)
    with pytest.raises(PoleError):
        specfun.barnes_g_log(-1)


def test_gamma_modulus_on_imaginary_axis():
    beta = 0.1j
    lhs = abs(np.exp(specfun.log_gamma(1 + beta))) ** 2
    assert lhs == pytest.approx(0.1 * math.pi / math.sinh(0.1 * math.pi), rel=1e-14)


@pytest.mark.parametrize("z", [0.5, 3.0, 2 + 3j, -1.5 + 0.5j, 0.3 - 7j, 25 + 1j])
def test_barnes_g_against_mpmath(z):
    ref = complex(mpmath.barnesg(z))
    assert np.exp(specfun.barnes_g_log(z)) == pytest.approx(ref, rel=1e-12)


complex_samples = st.builds(complex, st.floats(0.1, 20), st.floats(-15, 15))


@settings(max_examples=60, deadline=None)
@given(complex_samples)
def test_gamma_recurrence(z):
    lhs = np.exp(specfun.log_gamma(z + 1))
    rhs = z * np.exp(specfun.log_gamma(z))
    assert abs(lhs - rhs) <= 1e-10 * abs(rhs)


@settings(max_examples=60, deadline=None)
@given(complex_samples)
def test_barnes_recurrence(z):
    lhs = specfun.barnes_g_log(z + 1)
    rhs = specfun.log_gamma(z) + specfun.barnes_g_log(z)
    # compare exp of both: the branches of the logs may differ by 2 pi i
    assert abs(np.exp(lhs - rhs) - 1) < 1e-10


@settings(max_examples=40, deadline=None)
@given(complex_samples)
def test_digamma_matches_derivative_of_log_gamma(z):
    def diff(h):
        return (specfun.log_gamma(z + h) - specfun.log_gamma(z - h)) / (2 * h)

    # Richardson on the centred difference
    h = 1e-3
    est = (4 * diff(h / 2) - diff(h)) / 3
    assert abs(est - specfun.digamma(z)) < 1e-8 * max(1, abs(specfun.digamma(z)))


def test_non_finite_rejected():
    with pytest.raises(DomainError):
        specfun.bessel_i(0, float("nan"))
    with pytest.raises(DomainError):
        specfun.log_gamma(complex("inf"))
