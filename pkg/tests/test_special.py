import mpmath
import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from latchem2d.errors import DomainError
from latchem2d.special import EULER_GAMMA, agm, bessel_K0, bessel_K1, elliptic_K


def test_euler_gamma():
    assert EULER_GAMMA == pytest.approx(float(mpmath.euler), abs=1e-16)


def test_agm_known_value():
    # Gauss's constant: 1 / agm(1, sqrt 2)
    assert 1.0 / agm(1.0, np.sqrt(2.0)) == pytest.approx(0.8346268416740731, rel=1e-15)


@settings(max_examples=60, deadline=None)
@given(m=st.floats(-0.999999, 0.999999))
def test_elliptic_K_against_mpmath(m):
    # modulus convention: mpmath takes the parameter m^2
    assert elliptic_K(m) == pytest.approx(float(mpmath.ellipk(m * m)), rel=1e-8)


def test_elliptic_K_limits_and_domain():
    assert elliptic_K(0.0) == pytest.approx(np.pi / 2, rel=1e-15)
    with pytest.raises(DomainError):
        elliptic_K(1.0)
    with pytest.raises(DomainError):
        elliptic_K(np.array([0.2, -1.5]))


@settings(max_examples=80, deadline=None)
@given(x=st.floats(1e-6, 60.0))
def test_bessel_against_mpmath(x):
    assert bessel_K0(x) == pytest.approx(float(mpmath.besselk(0, x)), rel=1e-8)
    assert bessel_K1(x) == pytest.approx(float(mpmath.besselk(1, x)), rel=1e-8)


def test_bessel_branch_crossover_is_continuous():
    x = np.array([2.0 - 1e-12, 2.0, 2.0 + 1e-12])
    assert np.ptp(bessel_K0(x)) < 1e-11
    assert np.ptp(bessel_K1(x)) < 1e-11


def test_bessel_vectorised_and_domain():
    x = np.linspace(0.1, 10, 7)
    ref = np.array([float(mpmath.besselk(0, v)) for v in x])
    assert np.allclose(bessel_K0(x), ref, rtol=1e-12)
    with pytest.raises(DomainError):
        bessel_K0(0.0)
    with pytest.raises(DomainError):
        bessel_K1(-1.0)


def test_bessel_small_argument_logarithm():
    x = 1e-8
    assert bessel_K0(x) == pytest.approx(-np.log(x / 2) - EULER_GAMMA, rel=1e-12)
