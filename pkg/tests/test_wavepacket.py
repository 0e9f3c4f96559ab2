import math

import numpy as np
import pytest
from scipy import integrate

from mirrorchannel.bogoliubov import cw_coefficients
from mirrorchannel.trajectory import CarlitzWilley, Custom, Darcx
from mirrorchannel.wavepacket import (
    PacketIndex,
    packet_beta_mass,
    packet_coefficients,
    packet_coefficients_numeric,
    packet_norm,
    packet_profile,
    packet_vacuum_moments,
)


def _cquad(fn, a, b, **kw):
    re = integrate.quad(lambda x: fn(x).real, a, b, limit=2000, **kw)[0]
    im = integrate.quad(lambda x: fn(x).imag, a, b, limit=2000, **kw)[0]
    return complex(re, im)


def _thermal_mass(j, eps, kappa):
    """``(1/eps) Integral_bin dw / (exp(2 pi w/kappa) - 1)``, the created quanta of a packet."""
    val = integrate.quad(lambda w: 1.0 / math.expm1(2 * math.pi * w / kappa), j * eps, (j + 1) * eps)[0]
    return val / eps


def test_index_validation_and_windows():
    idx = PacketIndex(2, -3, 0.5)
    assert idx.omega_low == 1.0 and idx.omega_high == 1.5 and idx.omega_center == 1.25
    lo, hi = idx.time_window
    assert lo == pytest.approx((-6 * math.pi - math.pi) / 0.5)
    assert hi - lo == pytest.approx(2 * math.pi / 0.5)
    for bad in [(-1, 0, 0.1), (0.5, 0, 0.1), (0, 1.5, 0.1), (0, 0, 0.0)]:
        with pytest.raises(ValueError):
            PacketIndex(*bad)


@pytest.mark.parametrize("j", [0, 1, 2, 5])
@pytest.mark.parametrize("w", [-1000.0, -61.0, -31.0, 0.3, 8.0, 59.0, 61.0, 150.0])
def test_profile_matches_direct_integral(j, w):
    a, b = math.sqrt(j), math.sqrt(j + 1)
    ref = _cquad(lambda t: 2 * np.exp(-1j * w * t * t), a, b, epsabs=1e-14, epsrel=1e-12)
    got = packet_profile(np.array([w]), j)[0]
    assert abs(got - ref) <= 1e-12


@pytest.mark.parametrize("j,n,wp", [(1, 0, 0.3), (2, 3, 0.05), (0, -2, 1.7)])
def test_closed_form_packets_match_bin_integration(j, n, wp):
    idx = PacketIndex(j, n, 0.1)
    eps, kappa = idx.epsilon, 1.0

    # integrate in t with w = t^2 to tame the w^{-1/2} growth of alpha at w -> 0
    def weighted(t, which):
        w = t * t
        p = cw_coefficients(w, wp, kappa)
        c = p.alpha if which == 0 else p.beta
        return 2 * t * np.exp(2j * math.pi * n * w / eps) * c / math.sqrt(eps)

    a, b = math.sqrt(idx.omega_low), math.sqrt(idx.omega_high)
    a_ref = _cquad(lambda t: weighted(t, 0), a, b, epsabs=1e-13, epsrel=1e-11)
    b_ref = _cquad(lambda t: weighted(t, 1), a, b, epsabs=1e-13, epsrel=1e-11)
    c = packet_coefficients(idx, wp, kappa)
    assert c.converged
    assert abs(c.alpha - a_ref) <= 1e-9 * abs(a_ref)
    assert abs(c.beta - b_ref) <= 1e-9 * abs(a_ref)


def test_numeric_horizon_path_matches_closed_form():
    idx = PacketIndex(1, 2, 0.5)
    num = packet_coefficients_numeric(CarlitzWilley(1.0), idx, 0.8)
    ref = packet_coefficients(idx, 0.8, 1.0)
    assert abs(num.alpha - ref.alpha) <= 1e-6 * abs(ref.alpha)
    assert abs(num.beta - ref.beta) <= 1e-6 * abs(ref.alpha)


def test_static_mirror_packets_are_unchanged():
    idx = PacketIndex(1, 2, 0.1)
    c = packet_coefficients_numeric(Custom.static(), idx, 0.14)
    ref = np.exp(2j * math.pi * 2 * 0.14 / 0.1) / math.sqrt(0.1)
    assert abs(c.alpha - ref) <= 1e-9 * abs(ref)
    assert abs(c.beta) <= 1e-12
    outside = packet_coefficients_numeric(Custom.static(), idx, 0.35)
    assert abs(outside.alpha) <= 1e-9 and abs(outside.beta) <= 1e-12


@pytest.mark.parametrize("n", [0, 1, -2])
def test_uniform_mirror_is_a_pure_doppler_shift(n):
    speed, eps = 0.3, 0.1
    d = (1 - speed) / (1 + speed)
    idx = PacketIndex(2, n, eps)
    wp = d * 0.23  # reflects into w = 0.23, inside the bin
    c = packet_coefficients_numeric(Custom.uniform(speed), idx, wp)
    ref = np.exp(2j * math.pi * n * (wp / d) / eps) / math.sqrt(eps * d)
    assert abs(c.alpha - ref) <= 1e-8 * abs(ref)
    assert abs(c.beta) <= 1e-10


@pytest.mark.parametrize("j", [0, 1, 2, 4])
def test_normalization(j):
    res = packet_norm(PacketIndex(j, 0, 0.1), 1.0)
    assert res.value == pytest.approx(1.0, abs=max(3 * res.error, 1e-6))
    assert res.value == pytest.approx(1.0, abs=1e-3)


@pytest.mark.parametrize("j,eps,kappa", [(1, 0.1, 1.0), (3, 0.25, 2.0), (0, 0.1, 1.0)])
def test_beta_mass_matches_thermal_oracle(j, eps, kappa):
    res = packet_beta_mass(PacketIndex(j, 0, eps), kappa)
    ref = _thermal_mass(j, eps, kappa) if j > 0 else None
    if j == 0:
        # Bose factor ~ kappa/(2 pi w) is not integrable at w = 0
        assert res.divergent
    else:
        assert res.value == pytest.approx(ref, rel=1e-5)


def test_bin_width_consistency():
    kappa, eps = 1.0, 0.2
    coarse = packet_beta_mass(PacketIndex(1, 0, eps), kappa).value
    fine = [packet_beta_mass(PacketIndex(k, 0, eps / 2), kappa).value for k in (2, 3)]
    assert 0.5 * sum(fine) == pytest.approx(coarse, rel=1e-5)


def test_position_space_moments_reproduce_thermal_mass():
    idx = PacketIndex(1, 0, 0.1)
    m = packet_vacuum_moments(CarlitzWilley(1.0), idx)
    ref = _thermal_mass(1, 0.1, 1.0)
    assert abs(m.n_beta - ref) <= 2 * m.error
    assert abs(m.pair) <= 2 * m.error


def test_moments_of_static_mirror_vanish():
    m = packet_vacuum_moments(Custom.static(), PacketIndex(1, 0, 0.1))
    assert m.n_beta == 0.0 and m.pair == 0.0


def test_weak_darcx_creates_few_quanta():
    m = packet_vacuum_moments(Darcx(0.3, 1.0), PacketIndex(1, 0, 0.1))
    assert 0.0 < m.n_beta < 1e-2
    assert m.error < 1e-5
    # Cauchy-Schwarz on the anomalous moment: |P|^2 <= n_beta (1 + n_beta)
    assert abs(m.pair) ** 2 <= m.n_beta * (1 + m.n_beta) * (1 + 1e-6)


@pytest.mark.parametrize("j", [0, 1, 3])
def test_time_shift_moves_beta_along_log_frequency(j):
    # shifting n by one rescales omega' by exp(2 pi kappa/eps), so the beta mass per packet is n-independent
    eps, kappa, n = 0.5, 1.0, 2
    scale = math.exp(2 * math.pi * kappa * n / eps)
    idx0, idxn = PacketIndex(j, 0, eps), PacketIndex(j, n, eps)
    for wp in (0.2, 1.0, 7.0):
        a = packet_coefficients(idxn, wp * scale, kappa)
        b = packet_coefficients(idx0, wp, kappa)
        assert abs(a.beta) ** 2 * wp * scale == pytest.approx(abs(b.beta) ** 2 * wp, rel=1e-8)


def test_packet_coefficients_are_stable_to_four_digits():
    c = packet_coefficients(PacketIndex(2, 0, 0.1), 1.0, 1.0)
    assert c.converged
    assert c.quad_error <= 1e-4 * abs(c.alpha)


@pytest.mark.parametrize("j", [0, 1])
@pytest.mark.parametrize("n", [-1, 0, 1])
@pytest.mark.parametrize("wp", [0.5, 1.0])
def test_numeric_path_within_one_percent(j, n, wp):
    idx = PacketIndex(j, n, 0.1)
    num = packet_coefficients_numeric(CarlitzWilley(1.0), idx, wp)
    ref = packet_coefficients(idx, wp, 1.0)
    assert abs(num.alpha - ref.alpha) <= 0.01 * abs(ref.alpha)
    assert abs(num.beta - ref.beta) <= 0.01 * max(abs(ref.beta), 1e-3 * abs(ref.alpha))
