import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import integrate

from mirrorchannel.bogoliubov import (
    BogoliubovDomainError,
    coefficients,
    cw_beta_squared,
    cw_coefficients,
    numeric_coefficients,
)
from mirrorchannel.trajectory import CarlitzWilley, Custom, Darcx

freq = st.floats(min_value=0.02, max_value=30.0)


def _gamma_integral_oracle(w, wp, k):
    """Both coefficients from the exact integral of ``x^{iy} e^{-+ i w' x}``."""
    y = w / k
    pre = mpmath.sqrt(wp / w) / (2 * mpmath.pi) * mpmath.power(k, 1j * y) * mpmath.gamma(1 + 1j * y)
    return complex(pre / mpmath.power(1j * wp, 1 + 1j * y)), complex(pre / mpmath.power(-1j * wp, 1 + 1j * y))


@given(freq, freq, st.floats(min_value=0.05, max_value=10.0))
@settings(max_examples=100, deadline=None)
def test_cw_closed_form_matches_gamma_integral(w, wp, k):
    a_ref, b_ref = _gamma_integral_oracle(w, wp, k)
    p = cw_coefficients(w, wp, k)
    assert abs(p.alpha - a_ref) <= 1e-11 * abs(a_ref)
    assert abs(p.beta - b_ref) <= 1e-11 * abs(b_ref) + 1e-300


@given(freq, freq, st.floats(min_value=0.05, max_value=10.0))
@settings(max_examples=100, deadline=None)
def test_cw_thermal_ratio(w, wp, k):
    p = cw_coefficients(w, wp, k)
    assert abs(p.beta) ** 2 == pytest.approx(cw_beta_squared(w, wp, k), rel=1e-11)
    assert abs(p.beta / p.alpha) ** 2 == pytest.approx(math.exp(-2 * math.pi * w / k), rel=1e-11)


def test_cw_large_frequency_ratio_does_not_overflow():
    p = cw_coefficients(1e4, 1.0, 1e-2)
    assert np.isfinite(p.alpha) and p.alpha != 0
    assert p.beta == 0


def test_cw_vectorized_matches_scalar():
    w = np.array([0.1, 1.0, 4.0])
    p = cw_coefficients(w, 0.7, 1.2)
    for k, wk in enumerate(w):
        assert p.alpha[k] == pytest.approx(cw_coefficients(wk, 0.7, 1.2).alpha, rel=1e-14)


def test_wrong_branch_is_detectable():
    good = cw_coefficients(1.0, 1.0, 1.0)
    bad = cw_coefficients(1.0, 1.0, 1.0, branch=-1)
    assert abs(good.beta / good.alpha) ** 2 == pytest.approx(math.exp(-2 * math.pi), rel=1e-12)
    # the wrong branch swaps the Boltzmann factor: |beta| exceeds |alpha|
    assert abs(bad.beta / bad.alpha) ** 2 == pytest.approx(math.exp(2 * math.pi), rel=1e-12)


@pytest.mark.parametrize("args", [(0.0, 1.0, 1.0), (1.0, -1.0, 1.0), (1.0, 1.0, math.inf)])
def test_domain_errors(args):
    with pytest.raises(BogoliubovDomainError):
        cw_coefficients(*args)


@pytest.mark.parametrize("w,wp", [(0.5, 0.5), (2.0, 0.3)])
def test_numeric_cw_complex_values(w, wp):
    num = numeric_coefficients(CarlitzWilley(1.0), w, wp)
    ref = cw_coefficients(w, wp, 1.0)
    assert num.converged
    # the reported extrapolation error must bound the true error
    assert abs(num.alpha - ref.alpha) <= 3 * num.alpha_error + 1e-10 * abs(ref.alpha)
    assert abs(num.beta - ref.beta) <= 3 * num.beta_error + 1e-10 * abs(ref.alpha)
    assert abs(num.alpha - ref.alpha) <= 1e-4 * abs(ref.alpha)


def _by_parts_oracle(traj, w, wp, sign, span=40.0):
    """``Integral e^{i phi} dv = -i Integral e^{i phi} phi''/phi'^2 dv`` with scipy.

    After integrating by parts the integrand lives only where the mirror
    accelerates, so a finite interval suffices.
    """
    scale = traj.time_scale

    def parts(v):
        t = traj.advanced_root(v)
        zd = float(traj.velocity(t))
        zdd = float(traj.acceleration(t))
        fp = (1 - zd) / (1 + zd)
        fpp = -2 * zdd / (1 + zd) ** 3
        phi = sign * wp * v - w * float(traj.ray_f(v))
        d1 = sign * wp - w * fp
        d2 = -w * fpp
        return -1j * np.exp(1j * phi) * d2 / d1**2

    lim = span * scale
    re = integrate.quad(lambda v: parts(v).real, -lim, lim, limit=800, epsabs=1e-14, epsrel=1e-11)[0]
    im = integrate.quad(lambda v: parts(v).imag, -lim, lim, limit=800, epsabs=1e-14, epsrel=1e-11)[0]
    return math.sqrt(wp / w) / (2 * math.pi) * complex(re, im)


def test_numeric_darcx_matches_integration_by_parts():
    d = Darcx(0.5, 1.0)
    w, wp = 1.0, 0.5
    num = numeric_coefficients(d, w, wp)
    a_ref = _by_parts_oracle(d, w, wp, +1)
    b_ref = _by_parts_oracle(d, w, wp, -1)
    assert abs(num.alpha - a_ref) <= max(3 * num.alpha_error, 1e-9 * abs(a_ref))
    assert abs(num.beta - b_ref) <= max(3 * num.beta_error, 1e-9 * abs(b_ref))
    assert abs(num.beta - b_ref) <= 1e-6 * abs(b_ref)


def test_static_mirror_off_diagonal_coefficients_vanish():
    p = numeric_coefficients(Custom.static(), 1.0, 0.5)
    assert abs(p.alpha) < 1e-5 and abs(p.beta) < 1e-5


def test_dispatch():
    assert coefficients(CarlitzWilley(2.0), 1.0, 1.0).alpha == cw_coefficients(1.0, 1.0, 2.0).alpha
