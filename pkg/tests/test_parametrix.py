import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy import special as sc

from hardedge import parametrix as px
from hardedge.errors import ContourError, DomainError, PoleError

ALPHAS = [-0.4, 0.0, 0.5, 1.0, 2.3]


def test_sector_one_entry():
    phi = px.bessel_parametrix(0, 4.0)
    assert phi[0, 0] == pytest.approx(sc.iv(0, 2.0), rel=1e-14)


def test_sector_classification():
    assert px.classify_sector(1.0) == 1
    assert px.classify_sector(np.exp(2.5j)) == 2
    assert px.classify_sector(np.exp(-2.5j)) == 3
    # boundary rays go counterclockwise
    assert px.classify_sector(np.exp(2j * np.pi / 3)) == 2
    assert px.classify_sector(-1.0) == 3
    assert px.classify_sector(np.exp(-2j * np.pi / 3)) == 1


def test_contour_and_origin_errors():
    with pytest.raises(ContourError):
        px.bessel_parametrix(0.5, -2.0)
    with pytest.raises(ContourError):
        px.bessel_parametrix(0.5, 3 * np.exp(2j * np.pi / 3))
    with pytest.raises(DomainError):
        px.bessel_parametrix(0.5, 0)
    with pytest.raises(DomainError):
        px.bessel_parametrix(-1.2, 1.0)


@pytest.mark.parametrize("alpha", ALPHAS)
def test_determinant_is_one(alpha):
    rng = np.random.default_rng(3)
    for a, b in [(-2.09, 2.09), (2.1, 3.14), (-3.14, -2.1)]:
        z = rng.uniform(0.2, 5, 30) * np.exp(1j * rng.uniform(a, b, 30))
        for zi in z:
            assert abs(np.linalg.det(px.bessel_parametrix(alpha, zi)) - 1) < 1e-9


@pytest.mark.parametrize("alpha", ALPHAS)
@pytest.mark.parametrize("ray", [1, 2, 3])
def test_jump_conditions(alpha, ray):
    for r in (0.2, 1.0, 5.0):
        assert px.jump_residual(alpha, ray, r) < 1e-8


def test_jump_on_negative_axis_at_unit_radius():
    assert px.jump_residual(0.7, 2, 1.0) < 1e-9


def test_jump_matrices():
    assert np.array_equal(px.bessel_jump_matrix(0.3, 2), [[0, 1], [-1, 0]])
    assert np.allclose(px.bessel_jump_matrix(0, 1), [[1, 0], [1, 1]])
    for a in ALPHAS:
        for ray in (1, 2, 3):
            assert np.linalg.det(px.bessel_jump_matrix(a, ray)) == pytest.approx(1)
    with pytest.raises(DomainError):
        px.bessel_jump_matrix(0, 4)


def test_b1_at_half():
    b1 = px.b1_matrix(0.5)
    assert b1[0, 0] == -0.25 and b1[1, 1] == 0.25


def test_scaled_parametrix_matches_unscaled():
    for z in (3 + 1j, -4 + 0.5j, -4 - 0.5j, 40 * np.exp(2.4j)):
        w = np.sqrt(z)
        ref = px.bessel_parametrix(1.3, z) @ np.diag([np.exp(-w), np.exp(w)])
        assert np.allclose(px.bessel_parametrix(1.3, z, scaled=True), ref, rtol=1e-12, atol=1e-13)


@pytest.mark.parametrize("alpha", [-0.4, 0.0, 1.0, 2.3])
def test_asymptotic_order(alpha):
    slope, per_angle, _ = px.asymptotic_slope(alpha)
    assert -1.15 <= slope <= -0.85
    assert all(-1.15 <= s <= -0.85 for s in per_angle)


def test_asymptotic_expansion_exact_at_half():
    # for alpha = 1/2 the Bessel functions are elementary and the remainder vanishes
    slope, _, _ = px.asymptotic_slope(0.5)
    assert np.isnan(slope)
    for theta in (0.0, 2.0, -2.5):
        assert px.asymptotic_residual(0.5, 1e4 * np.exp(1j * theta)) < 1e-12


def test_frame_determinant():
    for z in (10.0, 1e3 * np.exp(1j), 1e4 * np.exp(-2j)):
        d = np.linalg.det(px.bessel_asymptotic_frame(0.7, z))
        # det(I + B_1 z^{-1/2}) = 1 - det-part of order 1/z
        assert abs(d - 1) < 2 / abs(z)
    with pytest.raises(DomainError):
        px.bessel_asymptotic_frame(0, 0.5)


def test_chf_at_zero():
    c = px.chf_coefficients(0)
    assert np.allclose(c.phi1, 0)
    assert np.allclose(c.upsilon0, [[1, 0], [1, 1]])
    assert c.upsilon1_21 == pytest.approx(1j)


def test_chf_upsilon1_against_direct_formula():
    b = 0.25j
    direct = b * np.pi * 1j * np.exp(-b * np.pi * 1j) / np.sin(b * np.pi)
    assert px.chf_coefficients(b).upsilon1_21 == pytest.approx(direct, rel=1e-14)


def test_chf_upsilon0_against_unregularised_formula():
    import mpmath
    b = 0.3 + 0.2j
    ge = mpmath.euler
    e = mpmath.exp(mpmath.pi * 1j * b)
    ref = [[mpmath.gamma(1 - b) / e, (mpmath.digamma(1 - b) + 2 * ge) / mpmath.gamma(b)],
           [mpmath.gamma(1 + b), -e / mpmath.gamma(-b) * (mpmath.digamma(-b) + 2 * ge)]]
    got = px.chf_coefficients(b).upsilon0
    assert np.allclose(got, np.array(ref, dtype=complex), rtol=1e-13)


def test_chf_pole():
    with pytest.raises(PoleError):
        px.chf_coefficients(2)
    with pytest.raises(PoleError):
        px.chf_coefficients(-1)


@settings(max_examples=50, deadline=None)
@given(st.floats(-3, 3), st.floats(-0.45, 0.45))
def test_chf_invariants(im, re):
    c = px.chf_coefficients(complex(re, im))
    assert abs(np.trace(c.phi1)) < 1e-12
    # det Upsilon_0 = 1 follows from psi(1-b) = psi(-b) + 1/b
    assert abs(np.linalg.det(c.upsilon0) - 1) < 1e-10


def test_chf_jumps():
    b = 0.2j
    assert np.allclose(px.chf_jump_matrix(b, 1),
                       [[0, np.exp(-b * np.pi * 1j)], [-np.exp(b * np.pi * 1j), 0]])
    assert np.allclose(px.chf_jump_matrix(0, 2), [[1, 0], [1, 1]])
    for ray in range(1, 7):
        assert np.linalg.det(px.chf_jump_matrix(b, ray)) == pytest.approx(1)
    assert np.allclose(px.chf_jump_matrix(0, 1) @ px.chf_jump_matrix(0, 4), -np.eye(2))
    # for general beta the product is diagonal with entries -e^{-+2 beta pi i}
    prod = px.chf_jump_matrix(b, 1) @ px.chf_jump_matrix(b, 4)
    assert np.allclose(prod, np.diag([-np.exp(-2j * np.pi * b), -np.exp(2j * np.pi * b)]))


def test_check_parametrix_report():
    rep = px.check_parametrix(1.0, samples=20, seed=4)
    assert rep["max_det_deviation"] < 1e-9
    assert rep["max_jump_residual"] < 1e-8
    assert -1.15 <= rep["asymptotic_slope"] <= -0.85
