"""Special functions used by the analytic mirror formulas.

Lambert W on its principal real branch and the Gamma function on the
imaginary axis.  Everything accepts scalars or numpy arrays and returns the
same shape; domain violations raise instead of producing NaN.
"""

from __future__ import annotations

import math

import numpy as np
import numpy.typing as npt

__all__ = [
    "SpecialFunctionDomainError",
    "lambert_w0",
    "lambert_w0_exp",
    "loggamma",
    "gamma_imag",
    "gamma_imag_modulus",
    "log_gamma_imag_modulus",
    "arg_gamma_imag",
    "log_sinh",
    "theta_phase",
]

ArrayLike = npt.ArrayLike

_INV_E = math.exp(-1.0)
_HALF_LOG_2PI = 0.5 * math.log(2.0 * math.pi)

# B_{2k} / (2k (2k-1)) for the Stirling series, k = 1..9
_STIRLING = (
    1.0 / 12.0,
    -1.0 / 360.0,
    1.0 / 1260.0,
    -1.0 / 1680.0,
    1.0 / 1188.0,
    -691.0 / 360360.0,
    1.0 / 156.0,
    -3617.0 / 122400.0,
    43867.0 / 244188.0,
)
_STIRLING_MIN_MODULUS = 16.0


class SpecialFunctionDomainError(ValueError):
    """Argument outside the domain of a special function (including poles)."""


def _scalar_or_array(values: np.ndarray, like: ArrayLike):
    if np.ndim(like) == 0:
        return values.reshape(()).item()
    return values


# ---------------------------------------------------------------------------
# Lambert W
# ---------------------------------------------------------------------------


def _branch_series(p: np.ndarray) -> np.ndarray:
    # W(x) about x = -1/e in p = sqrt(2 (e x + 1))
    return -1.0 + p * (
        1.0 + p * (-1.0 / 3.0 + p * (11.0 / 72.0 + p * (-43.0 / 540.0 + p * (769.0 / 17280.0))))
    )


def _halley(w: np.ndarray, x: np.ndarray, iterations: int = 12) -> np.ndarray:
    for _ in range(iterations):
        ew = np.exp(w)
        f = w * ew - x
        wp1 = w + 1.0
        denom = ew * wp1 - (w + 2.0) * f / (2.0 * wp1)
        step = f / denom
        w = w - step
        if np.all(np.abs(step) <= 4e-16 * np.maximum(np.abs(w), 1e-300)):
            break
    return w


def lambert_w0(x: ArrayLike):
    """Principal real branch of the Lambert W function.

    Parameters
    ----------
    x : array_like
        Arguments with ``x >= -1/e``.

    Returns
    -------
    float or ndarray
        ``w >= -1`` with ``w * exp(w) == x`` to about machine precision.

    Raises
    ------
    SpecialFunctionDomainError
        If any ``x < -1/e`` or is not finite.

    Notes
    -----
    Halley iteration from a piecewise start: a series in
    ``p = sqrt(2(ex + 1))`` near the branch point, Winitzki's formula in the
    middle and ``ln x - ln ln x`` for large arguments.
    """
    xa = np.asarray(x, dtype=float)
    if not np.all(np.isfinite(xa)):
        raise SpecialFunctionDomainError("lambert_w0 requires finite arguments")
    if np.any(xa < -_INV_E):
        raise SpecialFunctionDomainError("lambert_w0 is undefined below -1/e")
    xf = xa.ravel()
    w = np.empty_like(xf)

    p = np.sqrt(np.maximum(2.0 * (math.e * xf + 1.0), 0.0))
    near = p < 1e-3
    w[near] = _branch_series(p[near])

    rest = ~near
    xr = xf[rest]
    pr = p[rest]
    w0 = np.empty_like(xr)
    low = xr < -0.25
    big = xr > 3.0
    mid = ~(low | big)
    w0[low] = _branch_series(pr[low])
    l1 = np.log1p(xr[mid])
    w0[mid] = l1 * (1.0 - np.log1p(l1) / (2.0 + l1))
    lb = np.log(xr[big])
    llb = np.log(lb)
    w0[big] = lb - llb + llb / lb
    w[rest] = _halley(w0, xr)
    w[xf == 0.0] = 0.0
    return _scalar_or_array(w.reshape(xa.shape), x)


def lambert_w0_exp(a: ArrayLike):
    """``W(exp(a))`` evaluated without forming ``exp(a)``.

    Parameters
    ----------
    a : array_like
        Real exponents of any magnitude.

    Returns
    -------
    float or ndarray
        Positive values of ``W(exp(a))``.

    Notes
    -----
    For ``a > 1`` Newton's method is applied to ``w + ln w = a``, which is
    overflow free.  For very negative ``a`` the two-term expansion
    ``e^a - e^{2a}`` is exact to double precision.
    """
    aa = np.asarray(a, dtype=float)
    if not np.all(np.isfinite(aa)):
        raise SpecialFunctionDomainError("lambert_w0_exp requires finite arguments")
    af = aa.ravel()
    w = np.empty_like(af)

    tiny = af < -40.0
    ea = np.exp(af[tiny])
    w[tiny] = ea - ea * ea

    direct = (~tiny) & (af <= 1.0)
    if np.any(direct):
        w[direct] = np.asarray(lambert_w0(np.exp(af[direct])))

    large = af > 1.0
    if np.any(large):
        al = af[large]
        wl = al - np.log(al) + np.log(al) / al
        wl = np.maximum(wl, 0.5)
        for _ in range(50):
            g = wl + np.log(wl) - al
            step = g / (1.0 + 1.0 / wl)
            wl = wl - step
            if np.all(np.abs(step) <= 4e-16 * wl):
                break
        w[large] = wl
    return _scalar_or_array(w.reshape(aa.shape), a)


# ---------------------------------------------------------------------------
# Gamma function
# ---------------------------------------------------------------------------


def _stirling(z: np.ndarray) -> np.ndarray:
    zinv = 1.0 / z
    zinv2 = zinv * zinv
    series = np.zeros_like(z)
    for c in reversed(_STIRLING):
        series = series * zinv2 + c
    return (z - 0.5) * np.log(z) - z + _HALF_LOG_2PI + series * zinv


def loggamma(z: ArrayLike):
    """Log-Gamma for complex arguments with ``Re z >= 0``, excluding ``z = 0``.

    Stirling's series after upward recurrence to ``|z| >= 16``.  The branch
    is the one continuous in the upper and lower half planes, with
    ``loggamma(conj(z)) == conj(loggamma(z))``.

    Parameters
    ----------
    z : array_like of complex
        Arguments with nonnegative real part.

    Returns
    -------
    complex or ndarray of complex
    """
    za = np.asarray(z, dtype=complex)
    if np.any(za.real < 0.0):
        raise SpecialFunctionDomainError("loggamma is implemented for Re z >= 0 only")
    if np.any(za == 0.0):
        raise SpecialFunctionDomainError("Gamma has a pole at z = 0")
    zf = za.ravel()
    lower = zf.imag < 0.0
    zf = np.where(lower, np.conj(zf), zf)
    shift = np.where(np.abs(zf) < _STIRLING_MIN_MODULUS, 16, 0)
    out = _stirling(zf + shift)
    for k in range(16):
        sel = shift > k
        if np.any(sel):
            out[sel] -= np.log(zf[sel] + k)
    out = np.where(lower, np.conj(out), out)
    return _scalar_or_array(out.reshape(za.shape), z)


def _check_imag_argument(y: ArrayLike) -> np.ndarray:
    ya = np.asarray(y, dtype=float)
    if not np.all(np.isfinite(ya)):
        raise SpecialFunctionDomainError("gamma_imag requires finite arguments")
    if np.any(ya == 0.0):
        raise SpecialFunctionDomainError("Gamma(iy) has a pole at y = 0")
    return ya


def gamma_imag(y: ArrayLike):
    """Gamma on the imaginary axis, ``Gamma(i y)`` for real ``y != 0``.

    The modulus decays like ``exp(-pi |y| / 2)``, so values underflow to zero
    beyond ``|y|`` of roughly 450; use :func:`log_gamma_imag_modulus` and
    :func:`arg_gamma_imag` there.

    Examples
    --------
    >>> round(abs(gamma_imag(1.0)), 6)
    0.521564
    """
    ya = _check_imag_argument(y)
    out = np.exp(np.asarray(loggamma(1j * np.abs(ya))))
    out = np.where(ya < 0.0, np.conj(out), out)
    return _scalar_or_array(np.asarray(out), y)


def log_sinh(x: ArrayLike):
    """``ln sinh x`` for ``x > 0`` without overflow."""
    xa = np.asarray(x, dtype=float)
    with np.errstate(divide="ignore"):
        out = np.where(
            xa > 20.0,
            xa - math.log(2.0) + np.log1p(-np.exp(-2.0 * np.minimum(xa, 1e300))),
            np.log(np.sinh(np.minimum(xa, 20.0))),
        )
    return _scalar_or_array(np.asarray(out), x)


def log_gamma_imag_modulus(y: ArrayLike):
    """``ln |Gamma(i y)|`` from the reflection identity.

    Uses ``|Gamma(iy)|^2 = pi / (y sinh(pi y))``, an independent path from
    :func:`gamma_imag`.
    """
    ya = np.abs(_check_imag_argument(y))
    out = 0.5 * (math.log(math.pi) - np.log(ya) - np.asarray(log_sinh(math.pi * ya)))
    return _scalar_or_array(np.asarray(out), y)


def gamma_imag_modulus(y: ArrayLike):
    """``|Gamma(i y)|`` from the reflection identity."""
    return _scalar_or_array(np.exp(np.asarray(log_gamma_imag_modulus(y))), y)


def arg_gamma_imag(y: ArrayLike):
    """Phase of ``Gamma(i y)``, continuous on each half line.

    Taken as the imaginary part of :func:`loggamma`, so it is not reduced
    modulo ``2 pi``; only phase differences at equal ``y`` enter physical
    quantities.
    """
    ya = _check_imag_argument(y)
    out = np.asarray(loggamma(1j * np.abs(ya))).imag
    out = np.where(ya < 0.0, -out, out)
    return _scalar_or_array(np.asarray(out), y)


def theta_phase(omega: ArrayLike, omega_prime: ArrayLike, kappa: ArrayLike):
    """Mixing phase ``(omega/kappa) ln(omega'/kappa) - arg Gamma(i omega/kappa)``.

    Parameters
    ----------
    omega, omega_prime, kappa : array_like
        Strictly positive output frequency, input frequency and surface
        gravity.  Broadcast against each other.

    Returns
    -------
    float or ndarray
    """
    w, wp, k = np.broadcast_arrays(
        np.asarray(omega, dtype=float),
        np.asarray(omega_prime, dtype=float),
        np.asarray(kappa, dtype=float),
    )
    if np.any(w <= 0.0) or np.any(wp <= 0.0) or np.any(k <= 0.0):
        raise SpecialFunctionDomainError("theta_phase requires positive arguments")
    y = w / k
    out = y * np.log(wp / k) - np.asarray(arg_gamma_imag(y))
    if np.ndim(omega) == 0 and np.ndim(omega_prime) == 0 and np.ndim(kappa) == 0:
        return float(out)
    return out
