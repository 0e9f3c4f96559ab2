"""Plane-wave Bogoliubov coefficients of the reflected (right-moving) sector.

Convention.  With ``u = f(v)`` the ray map of the mirror,

    alpha(w, w') = (1/2pi) sqrt(w'/w) * Integral dv exp(+i w' v - i w f(v))
    beta(w, w')  = (1/2pi) sqrt(w'/w) * Integral dv exp(-i w' v - i w f(v))

over the advanced times ``v`` that reach the mirror.  These are the
scalar-product overlaps of the outgoing mode of frequency ``w`` with the
incoming modes of frequency ``w'`` and their conjugates, after integrating
the derivative weights by parts, up to one common complex conjugation.  That
conjugation and the sign of ``beta`` never change a channel invariant.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
import numpy.typing as npt

from . import specfun
from ._quadrature import edges_from_density, panel_rule, richardson
from .trajectory import CarlitzWilley, Trajectory

__all__ = [
    "BogoliubovDomainError",
    "BogoliubovConvergenceError",
    "BogoliubovPair",
    "cw_coefficients",
    "cw_beta_squared",
    "numeric_coefficients",
    "damped_overlap",
    "coefficients",
]

ArrayLike = npt.ArrayLike


class BogoliubovDomainError(ValueError):
    """Non-positive frequency or surface gravity."""


class BogoliubovConvergenceError(RuntimeError):
    """The damping extrapolation did not settle."""


@dataclass(frozen=True)
class BogoliubovPair:
    """Coefficients linking one output frequency to one input frequency.

    Attributes
    ----------
    alpha, beta : complex or ndarray
        Mixing and particle-creation coefficients.
    omega, omega_prime : float or ndarray
        Output and input frequencies.
    alpha_error, beta_error : float or ndarray
        Absolute error estimates; zero for closed forms.
    """

    alpha: complex | np.ndarray
    beta: complex | np.ndarray
    omega: float | np.ndarray
    omega_prime: float | np.ndarray
    alpha_error: float | np.ndarray = 0.0
    beta_error: float | np.ndarray = 0.0
    converged: bool = True


def _positive(name: str, value: ArrayLike) -> np.ndarray:
    arr = np.asarray(value, dtype=float)
    if not np.all(np.isfinite(arr)) or np.any(arr <= 0.0):
        raise BogoliubovDomainError(f"{name} must be positive and finite")
    return arr


def cw_coefficients(
    omega: ArrayLike,
    omega_prime: ArrayLike,
    kappa: ArrayLike,
    *,
    branch: int = 1,
) -> BogoliubovPair:
    """Closed-form coefficients for the Carlitz-Willey mirror.

    Parameters
    ----------
    omega, omega_prime, kappa : array_like
        Positive output frequency, input frequency and surface gravity.
    branch : {1, -1}
        Sign of ``i pi`` in ``ln(-x) = ln x + i pi``.  Only ``+1`` is
        physical: it gives ``|alpha| > |beta|``.  The other value exists to
        check that the test suite notices the wrong choice.

    Returns
    -------
    BogoliubovPair

    Notes
    -----
    With ``y = w/kappa`` and ``theta = y ln(w'/kappa) - arg Gamma(i y)``,

        alpha =  (1/2pi kappa) sqrt(w/w') |Gamma(iy)| e^{+pi y/2} e^{-i theta}
        beta  = -(1/2pi kappa) sqrt(w/w') |Gamma(iy)| e^{-pi y/2} e^{-i theta}

    which follow from integrating the ray map ``f(v) = -ln(-kappa v)/kappa``
    against the damped exponentials.  Moduli are formed in log space, so
    large ``w/kappa`` underflows gracefully instead of overflowing.
    """
    if branch not in (1, -1):
        raise ValueError("branch must be +1 or -1")
    w = _positive("omega", omega)
    wp = _positive("omega_prime", omega_prime)
    k = _positive("kappa", kappa)
    w, wp, k = np.broadcast_arrays(w, wp, k)
    y = w / k
    lg = np.asarray(specfun.loggamma(1j * y))
    theta = y * np.log(wp / k) - lg.imag
    common = -np.log(2.0 * math.pi * k) + 0.5 * np.log(w / wp) + lg.real
    half = 0.5 * math.pi * y
    alpha = np.exp(common + (2 * branch - 1) * half - 1j * theta)
    beta = -np.exp(common - half - 1j * theta)
    if np.ndim(alpha) == 0:
        return BogoliubovPair(complex(alpha), complex(beta), float(w), float(wp))
    return BogoliubovPair(alpha, beta, w, wp)


def cw_beta_squared(omega: ArrayLike, omega_prime: ArrayLike, kappa: ArrayLike):
    """Thermal spectrum ``|beta|^2 = 1 / (2 pi kappa w' (exp(2 pi w/kappa) - 1))``."""
    w = _positive("omega", omega)
    wp = _positive("omega_prime", omega_prime)
    k = _positive("kappa", kappa)
    with np.errstate(over="ignore"):
        out = 1.0 / (2.0 * math.pi * k * wp * np.expm1(2.0 * math.pi * w / k))
    return float(out) if np.ndim(out) == 0 else out


# ---------------------------------------------------------------------------
# Generic path: damped overlap integrals
# ---------------------------------------------------------------------------

_SAMPLES = 4000
_DECAY = 40.0


def damped_overlap(
    traj: Trajectory,
    omega: float,
    omega_prime: float,
    sign: int,
    eta: float,
    *,
    resolution: float = 1.0,
    order: int = 16,
) -> complex:
    """``Integral dv exp(i sign w' v - i w f(v) - eta |v|)`` by panel quadrature.

    Parameters
    ----------
    traj : Trajectory
        Supplies ``f(v)``, ``f'(v)`` and the horizon, if any.
    omega, omega_prime : float
        Output and input frequencies.
    sign : {1, -1}
        ``+1`` for the mixing integral, ``-1`` for the creation integral.
    eta : float
        Damping rate.
    resolution : float
        Multiplies the panel density; ``2`` halves every panel.
    order : int
        Gauss-Legendre nodes per panel.

    Notes
    -----
    With a horizon at ``v0`` the substitution ``v = v0 - e^x`` resolves the
    logarithmic phase pile-up near the horizon.  Without one, ``v = T sinh x``
    with ``T`` the trajectory's time scale keeps the acceleration region
    resolved.  Panels hold about two oscillations of the local phase.
    """
    w, wp = float(omega), float(omega_prime)
    v0 = traj.horizon_v0
    reach = _DECAY / eta
    if v0 is not None:
        x_lo = math.log(1e-10 / max(w, wp, 1.0 / traj.time_scale))
        x_hi = math.log(reach + abs(v0))
        grid = np.linspace(x_lo, x_hi, _SAMPLES)
        ex = np.exp(grid)
        v = v0 - ex
        dvdx = ex
        slope = np.asarray(traj.ray_f_slope(v))
    else:
        scale = traj.time_scale
        x_hi = math.asinh(reach / scale)
        grid = np.linspace(-x_hi, x_hi, _SAMPLES)
        v = scale * np.sinh(grid)
        dvdx = scale * np.cosh(grid)
        slope = np.asarray(traj.ray_f_slope(v))
    rate = np.abs(sign * wp - w * slope) * dvdx + eta * dvdx
    density = resolution * (rate / (4.0 * math.pi) + 2.0)
    edges = edges_from_density(grid, density)
    # the damping factor has a kink at v = 0; keep it on a panel edge
    x_kink = 0.0 if v0 is None else (math.log(v0) if v0 > 0.0 else None)
    if x_kink is not None and edges[0] < x_kink < edges[-1]:
        edges = np.union1d(edges, [x_kink])
    x, wq = panel_rule(edges, order)

    if v0 is not None:
        ex = np.exp(x)
        v = v0 - ex
        jac = ex
        phase = sign * wp * v - w * np.asarray(traj.ray_f(v))
    else:
        v = traj.time_scale * np.sinh(x)
        jac = traj.time_scale * np.cosh(x)
        # keep the (w' - w) v part exact when the mirror barely moves
        phase = (sign * wp - w) * v - w * np.asarray(traj.ray_f_offset(v))
    integrand = np.exp(1j * phase - eta * np.abs(v)) * jac
    return complex(np.sum(wq * integrand))


def numeric_coefficients(
    traj: Trajectory,
    omega: float,
    omega_prime: float,
    damping: float | None = None,
    *,
    levels: int = 6,
    resolution: float = 1.0,
    rtol: float = 1e-3,
    strict: bool = False,
) -> BogoliubovPair:
    """Bogoliubov coefficients of an arbitrary trajectory by damped quadrature.

    The overlap integrals are regularized with ``exp(-eta |v|)`` for
    ``eta = damping * 2**-k``, ``k = 0 .. levels-1``, and extrapolated to
    ``eta -> 0`` with a Richardson table.

    Parameters
    ----------
    traj : Trajectory
    omega, omega_prime : float
        Positive output and input frequencies.
    damping : float, optional
        Largest damping rate; defaults to ``0.1 * max(omega, omega_prime)``.
    levels : int
        Number of damping values in the extrapolation.
    resolution : float
        Panel density multiplier passed to :func:`damped_overlap`.
    rtol : float
        Relative size of the extrapolation residual accepted as converged.
    strict : bool
        Raise :class:`BogoliubovConvergenceError` instead of returning a
        pair with ``converged=False``.

    Returns
    -------
    BogoliubovPair
        Errors are the last Richardson corrections.

    Notes
    -----
    When the mirror is inertial in the far past or future, ``alpha`` has a
    delta-function part at the Doppler-shifted frequency.  There the damped
    integral grows like ``1/eta`` and the extrapolation is reported as not
    converged.
    """
    w = float(_positive("omega", omega))
    wp = float(_positive("omega_prime", omega_prime))
    eta0 = 0.1 * max(w, wp) if damping is None else float(_positive("damping", damping))
    if levels < 2:
        raise ValueError("at least two damping levels are needed")
    etas = eta0 * 0.5 ** np.arange(levels)
    raw = np.array(
        [
            [damped_overlap(traj, w, wp, s, eta, resolution=resolution) for s in (1, -1)]
            for eta in etas
        ]
    )
    best, err, _ = richardson(raw)
    pref = math.sqrt(wp / w) / (2.0 * math.pi)
    alpha, beta = pref * best[0], pref * best[1]
    a_err, b_err = pref * err[0], pref * err[1]
    floor = 1e-12 * pref / max(w, wp)
    converged = bool(a_err <= rtol * abs(alpha) + floor and b_err <= rtol * abs(beta) + floor)
    if strict and not converged:
        raise BogoliubovConvergenceError(
            f"damping extrapolation residuals {a_err:.3g} (alpha), {b_err:.3g} (beta)"
        )
    return BogoliubovPair(complex(alpha), complex(beta), w, wp, float(a_err), float(b_err), converged)


def coefficients(traj: Trajectory, omega: float, omega_prime: float) -> BogoliubovPair:
    """Closed form for Carlitz-Willey, damped quadrature otherwise."""
    if isinstance(traj, CarlitzWilley):
        return cw_coefficients(omega, omega_prime, traj.kappa)
    return numeric_coefficients(traj, omega, omega_prime)
