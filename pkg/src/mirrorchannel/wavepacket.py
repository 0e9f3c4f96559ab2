"""Wave-packet Bogoliubov coefficients.

An outgoing packet ``(j, n)`` collects the frequencies ``[j eps, (j+1) eps]``
with weight ``exp(2 pi i w n / eps) / sqrt(eps)``, which localizes it in the
retarded-time window ``[(2 pi n - pi)/eps, (2 pi n + pi)/eps]``.  Its
coefficients against an incoming plane wave of frequency ``w'`` are the
frequency integrals of the plane-wave coefficients over the bin.

For the Carlitz-Willey mirror these integrals depend on ``w'`` and ``n`` only
through

    s = 2 pi n / eps - ln(w'/kappa) / kappa,

    alpha = F_+(s) / (2 pi kappa sqrt(eps w')),
    beta  = -F_-(s) / (2 pi kappa sqrt(eps w')),
    F_pm(s) = Integral_bin dw sqrt(w) exp(pm pi w / 2 kappa) Gamma(i w/kappa) exp(i w s).

Working in ``s`` keeps every step finite even when ``w'`` itself would
overflow, and ``dw'/w' = kappa ds`` turns integrals over input frequencies
into integrals over ``s``.  Internally frequencies are measured in units of
the bin width, so the bin is ``[j, j+1]``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable

import numpy as np

from . import specfun
from ._quadrature import edges_from_density, gauss_legendre, panel_rule, richardson
from .bogoliubov import numeric_coefficients
from .trajectory import CarlitzWilley, Trajectory

__all__ = [
    "PacketIndex",
    "PacketCoefficients",
    "PacketIntegral",
    "CWPacketAmplitudes",
    "packet_coefficients",
    "packet_transform",
    "packet_coefficients_numeric",
    "packet_profile",
    "packet_norm",
    "packet_beta_mass",
    "QuadratureWarning",
    "PacketMoments",
    "packet_vacuum_moments",
]

_ORDER = 20
_NODES_PER_TURN = 12
_TOL = 1e-8


class QuadratureWarning(UserWarning):
    """A packet integral missed its error target."""


@dataclass(frozen=True)
class PacketIndex:
    """Frequency bin ``j``, time bin ``n`` and bin width ``epsilon``."""

    j: int
    n: int
    epsilon: float

    def __post_init__(self) -> None:
        if int(self.j) != self.j or self.j < 0:
            raise ValueError("frequency bin j must be a nonnegative integer")
        if int(self.n) != self.n:
            raise ValueError("time bin n must be an integer")
        if not (math.isfinite(self.epsilon) and self.epsilon > 0.0):
            raise ValueError("bin width epsilon must be positive and finite")

    @property
    def omega_low(self) -> float:
        return self.j * self.epsilon

    @property
    def omega_high(self) -> float:
        return (self.j + 1) * self.epsilon

    @property
    def omega_center(self) -> float:
        """Central frequency ``(j + 1/2) epsilon``."""
        return (self.j + 0.5) * self.epsilon

    @property
    def time_window(self) -> tuple[float, float]:
        """Retarded-time interval in which the packet is concentrated."""
        return ((2 * math.pi * self.n - math.pi) / self.epsilon, (2 * math.pi * self.n + math.pi) / self.epsilon)

    def s_of(self, omega_prime, kappa: float):
        """Log-frequency variable ``2 pi n/eps - ln(w'/kappa)/kappa``."""
        return 2.0 * math.pi * self.n / self.epsilon - np.log(np.asarray(omega_prime, float) / kappa) / kappa


@dataclass(frozen=True)
class PacketCoefficients:
    """Coefficients of one packet against one incoming plane wave.

    ``quad_error`` is the relative change of the coefficients under a
    refinement of the quadrature; ``converged`` compares it with the target.
    ``tau_offset`` is ``epsilon (|alpha|^2 - |beta|^2) - 1`` evaluated
    without cancellation, available from the horizon-free numeric path where
    the mirror-at-rest part of ``alpha`` is known exactly.
    """

    index: PacketIndex
    omega_prime: float
    alpha: complex
    beta: complex
    quad_error: float
    converged: bool = True
    tau_offset: float | None = None


@dataclass(frozen=True)
class PacketIntegral:
    """An integral over input frequencies with its error budget.

    Attributes
    ----------
    value : float
        Window quadrature plus tail correction.
    tail : float
        Tail correction that was added.
    error : float
        Estimated remaining error.
    divergent : bool
        The tail grows without bound; ``value`` then belongs to the window
        and ``error`` is the increase caused by doubling it.
    """

    value: float
    tail: float
    error: float
    divergent: bool = False


# ---------------------------------------------------------------------------
# Carlitz-Willey amplitudes
# ---------------------------------------------------------------------------


def _log_envelope(omega_r: np.ndarray, kappa_r: float) -> tuple[np.ndarray, np.ndarray]:
    """``ln sqrt(w) Gamma(i w/kappa)`` split into log-modulus and phase."""
    y = omega_r / kappa_r
    lg = np.asarray(specfun.loggamma(1j * y))
    return 0.5 * np.log(omega_r) + lg.real, lg.imag


@lru_cache(maxsize=256)
def _bin_rule(j: int, panels: int) -> tuple[np.ndarray, np.ndarray]:
    """Nodes and weights on the rescaled bin ``[j, j+1]``.

    For ``j = 0`` the substitution ``w = t^2`` removes the ``w^{-1/2}``
    endpoint singularity; the Jacobian ``2t`` is folded into the weights.
    """
    edges = np.linspace(0.0, 1.0, panels + 1)
    t, wt = panel_rule(edges, _ORDER)
    if j == 0:
        return t * t, 2.0 * t * wt
    return j + t, wt


def _panels_for(j: int, s_max: float) -> int:
    turns = s_max / (2.0 * math.pi) * (2.0 if j == 0 else 1.0)
    return max(2, int(math.ceil(_NODES_PER_TURN * turns / _ORDER)) + 1)


class CWPacketAmplitudes:
    """Evaluator of ``F_pm(s)`` for one frequency bin of a Carlitz-Willey mirror.

    Parameters
    ----------
    j : int
        Frequency bin.
    epsilon, kappa : float
        Bin width and surface gravity in natural units.

    Notes
    -----
    All internal quantities are in units of ``epsilon``: ``kappa_r =
    kappa/epsilon`` and ``s_r = epsilon s``.  The rescaled amplitudes are
    ``epsilon^{-3/2}`` times the natural ones.
    """

    def __init__(self, j: int, epsilon: float, kappa: float) -> None:
        if not (kappa > 0.0 and math.isfinite(kappa)):
            raise ValueError("kappa must be positive and finite")
        PacketIndex(j, 0, epsilon)
        self.j = int(j)
        self.epsilon = float(epsilon)
        self.kappa = float(kappa)
        self.kappa_r = self.kappa / self.epsilon

    def _weights(self, panels: int) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        omega_r, wq = _bin_rule(self.j, panels)
        logmod, phase = _log_envelope(omega_r, self.kappa_r)
        half = 0.5 * math.pi * omega_r / self.kappa_r
        wp = wq * np.exp(logmod + half + 1j * phase)
        wm = wq * np.exp(logmod - half + 1j * phase)
        return omega_r, wp, wm

    def amplitudes_rescaled(self, s_r, *, refine: int = 0, chunk: int = 2048):
        """``(F_+, F_-)`` at rescaled ``s_r`` (arrays of the same shape).

        ``refine`` doubles the panel count that many times.
        """
        s = np.atleast_1d(np.asarray(s_r, float))
        panels = _panels_for(self.j, float(np.max(np.abs(s)))) * 2**refine
        omega_r, wp, wm = self._weights(panels)
        fp = np.empty(s.shape, complex)
        fm = np.empty(s.shape, complex)
        flat = s.ravel()
        fpf = fp.ravel()
        fmf = fm.ravel()
        for start in range(0, flat.size, chunk):
            sl = slice(start, start + chunk)
            ph = np.exp(1j * np.outer(flat[sl], omega_r))
            fpf[sl] = ph @ wp
            fmf[sl] = ph @ wm
        if np.ndim(s_r) == 0:
            return complex(fp[0]), complex(fm[0])
        return fp, fm

    def coefficients(self, n: int, omega_prime: float) -> PacketCoefficients:
        """Packet coefficients with a refinement error estimate."""
        index = PacketIndex(self.j, n, self.epsilon)
        if not (omega_prime > 0.0 and math.isfinite(omega_prime)):
            raise ValueError("omega_prime must be positive and finite")
        s_r = self.epsilon * float(index.s_of(omega_prime, self.kappa))
        coarse = self.amplitudes_rescaled(s_r)
        fine = self.amplitudes_rescaled(s_r, refine=1)
        # alpha = F_+ / (2 pi kappa_r sqrt(w'_r)) / sqrt(eps), w'_r = w'/eps
        pref = 1.0 / (2.0 * math.pi * self.kappa_r * math.sqrt(omega_prime))
        alpha = pref * fine[0]
        beta = -pref * fine[1]
        err = max(
            abs(fine[0] - coarse[0]) / max(abs(fine[0]), 1e-300),
            abs(fine[1] - coarse[1]) / max(abs(fine[1]), 1e-300),
        )
        return PacketCoefficients(index, float(omega_prime), complex(alpha), complex(beta), float(err), err <= _TOL)

    # -- endpoint data for tails ----------------------------------------------

    def endpoint_moduli(self) -> tuple[float, float]:
        """``sum |G_+|^2`` and ``sum |G_-|^2`` over the bin edges (rescaled)."""
        edges = np.array([self.j, self.j + 1.0]) if self.j > 0 else np.array([1.0])
        logmod, _ = _log_envelope(edges, self.kappa_r)
        half = 0.5 * math.pi * edges / self.kappa_r
        return float(np.sum(np.exp(2 * (logmod + half)))), float(np.sum(np.exp(2 * (logmod - half))))

    def s_integrals(self, window: float = 400.0) -> dict[str, PacketIntegral]:
        """Integrals over ``s_r`` of ``|F_+|^2``, ``|F_-|^2`` and ``F_+ F_-``.

        Parameters
        ----------
        window : float
            Half-width of the rescaled ``s`` window, i.e. ``epsilon`` times
            the half-width in natural units.

        Returns
        -------
        dict
            Keys ``"pp"``, ``"mm"``, ``"pm_re"``, ``"pm_im"`` and ``"diff"``
            (``|F_+|^2 - |F_-|^2``).

        Notes
        -----
        ``|F|^2`` is band limited to frequencies below the bin width, so
        Gauss panels of width ``pi`` in ``s_r`` are exact to rounding.  Beyond
        the window ``|F_pm|^2`` falls off like ``sum_edges |G_pm|^2 / s^2``
        when ``j >= 1``, which gives the tails.  For ``j = 0`` the integrable
        singularity of ``G`` at zero frequency makes ``|F_pm|^2`` decay like
        ``pi kappa_r^2 / |s|``, so those integrals diverge logarithmically and
        are flagged.  Their difference still converges.
        """
        L = float(window)
        edges = np.linspace(-L, L, max(2, int(math.ceil(2 * L / math.pi))) + 1)
        s, ws = panel_rule(edges, 16)
        fp, fm = self.amplitudes_rescaled(s)
        fp2 = np.abs(fp) ** 2
        fm2 = np.abs(fm) ** 2
        cross = fp * fm
        quad = {
            "pp": float(ws @ fp2),
            "mm": float(ws @ fm2),
            "pm_re": float(ws @ cross.real),
            "pm_im": float(ws @ cross.imag),
            "diff": float(ws @ (fp2 - fm2)),
        }
        a_p, a_m = self.endpoint_moduli()
        out: dict[str, PacketIntegral] = {}
        osc_err = 2.0 * (a_p + a_m) / L**2
        if self.j > 0:
            out["pp"] = PacketIntegral(quad["pp"] + 2 * a_p / L, 2 * a_p / L, osc_err)
            out["mm"] = PacketIntegral(quad["mm"] + 2 * a_m / L, 2 * a_m / L, osc_err)
        else:
            grow = 2.0 * math.pi * self.kappa_r**2 * math.log(2.0)
            out["pp"] = PacketIntegral(quad["pp"], 0.0, grow, True)
            out["mm"] = PacketIntegral(quad["mm"], 0.0, grow, True)
        diff_tail = 2.0 * (a_p - a_m) / L
        out["diff"] = PacketIntegral(quad["diff"] + diff_tail, diff_tail, osc_err + 8.0 * math.pi * self.kappa_r / L**1.5)
        out["pm_re"] = PacketIntegral(quad["pm_re"], 0.0, osc_err)
        out["pm_im"] = PacketIntegral(quad["pm_im"], 0.0, osc_err)
        return out


def packet_coefficients(index: PacketIndex, omega_prime: float, kappa: float) -> PacketCoefficients:
    """Carlitz-Willey packet coefficients by Gauss-Legendre quadrature over the bin.

    Parameters
    ----------
    index : PacketIndex
    omega_prime : float
        Incoming frequency, positive.
    kappa : float
        Surface gravity.

    Returns
    -------
    PacketCoefficients
        ``quad_error`` is the relative change under panel doubling.

    Examples
    --------
    >>> c = packet_coefficients(PacketIndex(0, 0, 0.1), 0.05, 1.0)
    >>> abs(c.alpha) > abs(c.beta)
    True
    """
    return CWPacketAmplitudes(index.j, index.epsilon, kappa).coefficients(index.n, omega_prime)


def packet_norm(index: PacketIndex, kappa: float, window: float = 400.0) -> PacketIntegral:
    """``Integral dw' (|alpha|^2 - |beta|^2)`` over all input frequencies.

    Orthonormal packets give exactly one.  The integral is taken over ``s``
    with the endpoint tail correction and does not depend on ``n``.
    """
    amp = CWPacketAmplitudes(index.j, index.epsilon, kappa)
    r = amp.s_integrals(window)["diff"]
    scale = 1.0 / (4.0 * math.pi**2 * amp.kappa_r)
    return PacketIntegral(r.value * scale, r.tail * scale, r.error * scale, r.divergent)


def packet_beta_mass(index: PacketIndex, kappa: float, window: float = 400.0) -> PacketIntegral:
    """``Integral dw' |beta|^2``, the mean number of created quanta in the packet."""
    amp = CWPacketAmplitudes(index.j, index.epsilon, kappa)
    r = amp.s_integrals(window)["mm"]
    scale = 1.0 / (4.0 * math.pi**2 * amp.kappa_r)
    return PacketIntegral(r.value * scale, r.tail * scale, r.error * scale, r.divergent)


# ---------------------------------------------------------------------------
# Generic packet transform of plane-wave coefficients
# ---------------------------------------------------------------------------


def packet_transform(
    coefficient_fn: Callable[[np.ndarray], tuple[np.ndarray, np.ndarray]],
    index: PacketIndex,
    omega_prime: float,
    *,
    phase_turns: float = 0.0,
    tol: float = _TOL,
    max_panels: int = 512,
) -> PacketCoefficients:
    """Integrate plane-wave coefficients over a frequency bin.

    Parameters
    ----------
    coefficient_fn : callable
        Maps an array of output frequencies to ``(alpha, beta)`` arrays at
        the fixed input frequency ``omega_prime``.
    index : PacketIndex
    omega_prime : float
    phase_turns : float
        Expected phase turns of the coefficients across the bin, used for
        the initial panel count; ``2 pi |n|`` turns from the packet weight
        are always added.
    tol : float
        Relative target for the panel-doubling error estimate.
    max_panels : int
        Refinement stops here and the result is flagged.

    Returns
    -------
    PacketCoefficients
    """
    eps = index.epsilon
    turns = abs(index.n) + phase_turns
    panels = max(2, int(math.ceil(_NODES_PER_TURN * turns / _ORDER)) + 1)
    if index.j == 0:
        panels *= 2

    def integrate(p: int) -> tuple[complex, complex]:
        u, wq = _bin_rule(index.j, p)
        omega = eps * u
        a, b = coefficient_fn(omega)
        weight = eps * wq * np.exp(2j * math.pi * omega * index.n / eps) / math.sqrt(eps)
        return complex(weight @ np.asarray(a)), complex(weight @ np.asarray(b))

    prev = integrate(panels)
    err = math.inf
    while panels < max_panels:
        panels *= 2
        cur = integrate(panels)
        err = max(
            abs(cur[0] - prev[0]) / max(abs(cur[0]), 1e-300),
            abs(cur[1] - prev[1]) / max(abs(cur[1]), 1e-300),
        )
        prev = cur
        if err <= tol:
            break
    return PacketCoefficients(index, float(omega_prime), prev[0], prev[1], float(err), err <= tol)


# ---------------------------------------------------------------------------
# Numeric path for arbitrary trajectories
# ---------------------------------------------------------------------------


def _fresnel_tail(q: np.ndarray, w: np.ndarray, terms: int = 14) -> np.ndarray:
    """``Integral_q^inf exp(-i w t^2) dt`` for large ``w q^2`` (asymptotic series)."""
    z = -2j * w * q  # d/dt of the phase at q, times i
    total = np.zeros(np.shape(w), complex)
    term = -1.0 / z  # leading integration-by-parts term
    coef = term.copy()
    for k in range(terms):
        total += coef
        coef = coef * (2 * k + 1) / (z * q)
    return total * np.exp(-1j * w * q * q)


def packet_profile(w_r: np.ndarray, j: int) -> np.ndarray:
    """Rescaled packet profile ``Integral_j^{j+1} x^{-1/2} exp(-i x w) dx``.

    This is the retarded-time shape of the packet (up to normalization),
    centered at ``w = 0``.  Small ``|w|`` uses Gauss panels in ``t = sqrt(x)``,
    large ``|w|`` the asymptotic endpoint expansion.
    """
    w = np.asarray(w_r, float)
    out = np.empty(w.shape, complex)
    a, b = math.sqrt(j), math.sqrt(j + 1.0)
    qmin = b if j == 0 else a
    big = np.abs(w) * qmin * qmin > 60.0
    if np.any(~big):
        ws = w[~big]
        turns = float(np.max(np.abs(ws))) * (j + 1.0) / (2 * math.pi) if ws.size else 0.0
        panels = max(2, int(math.ceil(_NODES_PER_TURN * turns / _ORDER)) + 1)
        t, wt = panel_rule(np.linspace(a, b, panels + 1), _ORDER)
        out[~big] = 2.0 * (np.exp(-1j * np.outer(ws, t * t)) @ wt)
    if np.any(big):
        wb = w[big]
        if j == 0:
            full = 0.5 * np.sqrt(math.pi / np.abs(wb)) * np.exp(-0.25j * math.pi * np.sign(wb))
            out[big] = 2.0 * (full - _fresnel_tail(np.full(wb.shape, b), wb))
        else:
            out[big] = 2.0 * (_fresnel_tail(np.full(wb.shape, a), wb) - _fresnel_tail(np.full(wb.shape, b), wb))
    return out


class _ProfileGrid:
    """Quadrature nodes along the outgoing null coordinate for one damping rate.

    Stores everything that does not depend on the input frequency: the
    offset ``pi(u) = p(u) - u = 2 z``, its slope ``pi'(u)``, the damped
    packet profile and the weights.  Rescaled units throughout.
    """

    def __init__(self, traj: Trajectory, index: PacketIndex, eta: float, wp_max: float, resolution: float) -> None:
        un = 2.0 * math.pi * index.n
        scale = traj.time_scale
        reach = 36.0 / eta
        x_lo = -math.asinh((reach + max(0.0, -un)) / scale)
        x_hi = math.asinh((reach + max(0.0, un)) / scale)
        grid = np.linspace(x_lo, x_hi, 6000)
        u = scale * np.sinh(grid)
        zd = np.asarray(traj.velocity(traj.retarded_root(u)), float)
        slope = (1.0 + zd) / (1.0 - zd)
        rate = (wp_max * np.maximum(slope, 1.0) + index.j + 1.0 + eta) * scale * np.cosh(grid)
        edges = edges_from_density(grid, resolution * (rate / (4.0 * math.pi) + 2.0))
        # the damping factor has a kink at the packet center
        edges = np.union1d(edges, [math.asinh(un / scale)])
        x, wq = panel_rule(edges, 16)
        self.u = scale * np.sinh(x)
        tm = traj.retarded_root(self.u)
        self.shift = 2.0 * np.asarray(traj.position(tm), float)
        zd = np.asarray(traj.velocity(tm), float)
        self.dshift = 2.0 * zd / (1.0 - zd)
        self.weight = (
            wq * scale * np.cosh(x) * np.exp(-eta * np.abs(self.u - un)) * packet_profile(self.u - un, index.j)
        )

    @property
    def size(self) -> int:
        return self.u.size

    def overlap(self, wp: float, sign: int) -> complex:
        """Damped ``Integral du e^{i s w' u} [(1+pi') e^{i s w' pi} - 1] profile``."""
        ph = sign * wp * self.shift
        bracket = np.expm1(1j * ph) + self.dshift * np.exp(1j * ph)
        if not np.any(bracket):
            return 0j
        return complex(np.sum(self.weight * bracket * np.exp(1j * sign * wp * self.u)))


def _numeric_no_horizon_many(
    traj: Trajectory,
    index: PacketIndex,
    omega_primes: np.ndarray,
    levels: int,
    resolution: float,
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Packet coefficients at several input frequencies, natural units.

    Returns ``alpha``, ``beta``, the absolute Richardson error of each pair
    (the larger of the two), all in natural units, and
    ``epsilon (|alpha|^2 - |beta|^2) - 1`` formed from the moving-mirror
    remainder so that it keeps full relative precision.
    """
    eps = index.epsilon
    traj_r = traj.scaled(eps)
    wps = np.asarray(omega_primes, float) / eps
    etas = 0.05 * 0.5 ** np.arange(levels)
    raw = np.empty((levels, 2, wps.size), complex)
    for k, eta in enumerate(etas):
        grid = _ProfileGrid(traj_r, index, eta, float(np.max(wps)), resolution)
        for m, wp in enumerate(wps):
            raw[k, 0, m] = grid.overlap(wp, 1)
            raw[k, 1, m] = grid.overlap(wp, -1)
    best, err, diag = richardson(raw)
    if levels > 2:
        err = np.maximum(err, np.abs(diag[-2] - diag[-3]))
    pref = np.sqrt(wps) / (2.0 * math.pi)
    # a mirror at rest contributes exp(2 pi i w' n) on the bin to alpha and nothing to beta
    inside = (wps >= index.j) & (wps <= index.j + 1)
    alpha0 = np.where(inside, np.exp(2j * math.pi * wps * index.n), 0.0)
    moving = pref * best[0]
    beta_r = pref * best[1]
    alpha = (alpha0 + moving) / math.sqrt(eps)
    beta = beta_r / math.sqrt(eps)
    error = pref * np.maximum(err[0], err[1]) / math.sqrt(eps)
    # |alpha0| is 0 or exactly 1, so eps |alpha|^2 - 1 needs no subtraction of nearly equal numbers
    offset = np.where(inside, 2.0 * (np.conj(alpha0) * moving).real, -1.0) + np.abs(moving) ** 2 - np.abs(beta_r) ** 2
    return alpha, beta, error, offset


def _numeric_no_horizon(
    traj: Trajectory, index: PacketIndex, omega_prime: float, levels: int, resolution: float, tol: float
) -> PacketCoefficients:
    a, b, e, off = _numeric_no_horizon_many(traj, index, np.array([omega_prime]), levels, resolution)
    rel = float(e[0] / max(abs(a[0]), abs(b[0]), 1e-300))
    return PacketCoefficients(index, float(omega_prime), complex(a[0]), complex(b[0]), rel, rel <= tol, float(off[0]))


def packet_coefficients_numeric(
    traj: Trajectory,
    index: PacketIndex,
    omega_prime: float,
    *,
    levels: int = 6,
    resolution: float = 1.0,
    tol: float = 1e-6,
) -> PacketCoefficients:
    """Packet coefficients of an arbitrary trajectory without closed forms.

    Parameters
    ----------
    traj : Trajectory
    index : PacketIndex
    omega_prime : float
        Incoming frequency in natural units.
    levels : int
        Damping levels in the Richardson extrapolation.
    resolution : float
        Panel density multiplier.
    tol : float
        Relative error target for the frequency integral.

    Returns
    -------
    PacketCoefficients

    Notes
    -----
    With a horizon the plane-wave coefficients are smooth in the output
    frequency, so they are computed by damped quadrature at Gauss nodes of
    the bin and integrated with the packet weight.

    Without a horizon the mirror is inertial at early or late times and
    ``alpha`` has delta-function parts, so the order is swapped: the packet
    profile is integrated against the incoming wave along the outgoing
    null coordinate.  The contribution of a mirror at rest is subtracted and
    added back in closed form, and the remainder is computed from
    ``p(u) - u = 2 z`` so that minute displacements keep full relative
    precision.  Everything runs in units of the bin width, which keeps
    extreme parameter sets representable.
    """
    if not (omega_prime > 0.0 and math.isfinite(omega_prime)):
        raise ValueError("omega_prime must be positive and finite")
    if traj.horizon_v0 is None:
        return _numeric_no_horizon(traj, index, omega_prime, levels, resolution, tol)

    def coeffs(omega: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        pairs = [numeric_coefficients(traj, float(w), omega_prime, levels=levels, resolution=resolution) for w in omega]
        return np.array([p.alpha for p in pairs]), np.array([p.beta for p in pairs])

    turns = 0.0
    if isinstance(traj, CarlitzWilley):
        turns = index.epsilon * abs(math.log(omega_prime / traj.kappa)) / traj.kappa / (2 * math.pi)
    return packet_transform(coeffs, index, omega_prime, phase_turns=turns, tol=tol, max_panels=64)


# ---------------------------------------------------------------------------
# Vacuum moments of a packet for arbitrary trajectories
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class PacketMoments:
    """Second moments of an outgoing packet when the input is the vacuum.

    Attributes
    ----------
    n_beta : float
        ``Integral dw' |beta|^2``, the mean number of created quanta.
    pair : complex
        ``Integral dw' alpha beta``, the anomalous moment.
    error : float
        Change of either moment when the integration window is halved.
    window : float
        Half-width of the window along the outgoing null coordinate, in
        units of the inverse bin width.
    """

    n_beta: float
    pair: complex
    error: float
    window: float


def _log_slope_rate(traj: Trajectory, t: np.ndarray) -> np.ndarray:
    """``d ln p'/du = 2 z'' / ((1 - z')(1 - z'^2))`` at mirror times ``t``."""
    zd = np.asarray(traj.velocity(t), float)
    zdd = np.asarray(traj.acceleration(t), float)
    return 2.0 * zdd / ((1.0 - zd) * (1.0 - zd * zd))


def _schwarzian(traj: Trajectory, u: np.ndarray, scale: float) -> np.ndarray:
    """Schwarzian derivative of ``p(u)``: ``(ln p')'' - (ln p')'^2 / 2``."""
    h = 1e-4 * scale
    g = _log_slope_rate(traj, traj.retarded_root(u))
    gp = _log_slope_rate(traj, traj.retarded_root(u + h))
    gm = _log_slope_rate(traj, traj.retarded_root(u - h))
    return (gp - gm) / (2.0 * h) - 0.5 * g * g


def _kernel_block(u1, u2, pi1, pi2, dpi1, dpi2, sch1, sch2, scale, thermal_kappa=None):
    """Regular kernel ``p'p'/(p - p')^2 - 1/(u - u')^2`` on a block of node pairs."""
    delta = u1[:, None] - u2[None, :]
    if thermal_kappa is not None:
        k = thermal_kappa
        x = 0.5 * k * delta
        with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
            small = np.abs(x) < 1e-3
            out = (0.5 * k / np.sinh(x)) ** 2 - 1.0 / delta**2
            series = -(k * k) / 12.0 + (k**4) * delta**2 / 240.0
        return np.where(small, series, out)
    dp = pi1[:, None] - pi2[None, :]
    a1 = dpi1[:, None]
    a2 = dpi2[None, :]
    with np.errstate(divide="ignore", invalid="ignore"):
        num = delta**2 * (a1 + a2 + a1 * a2) - 2.0 * delta * dp - dp * dp
        out = num / (delta**2 * (delta + dp) ** 2)
    near = np.abs(delta) < 1e-3 * scale
    if np.any(near):
        taylor = (0.5 * (sch1[:, None] + sch2[None, :]) / 6.0) * np.ones_like(delta)
        out = np.where(near, taylor, out)
    return out


def _moments_once(traj_r: Trajectory, index: PacketIndex, window: float, resolution: float, block: int):
    scale = traj_r.time_scale
    un = 2.0 * math.pi * index.n
    width = min(math.pi / (index.j + 1.0), 1.0) / resolution
    lo = min(0.0, un) - window
    hi = max(0.0, un) + window
    edges = [np.linspace(lo, hi, int(math.ceil((hi - lo) / width)) + 1)]
    if scale < width:
        k = np.arange(0.0, math.asinh(width / scale) + 1.0, 1.0)
        graded = scale * np.sinh(k)
        edges.append(np.concatenate((-graded, graded)))
    e = np.unique(np.concatenate(edges))
    e = e[(e >= lo) & (e <= hi)]
    u, wq = panel_rule(e, 16)
    thermal = traj_r.kappa if isinstance(traj_r, CarlitzWilley) else None
    if thermal is None:
        tm = traj_r.retarded_root(u)
        pi = 2.0 * np.asarray(traj_r.position(tm), float)
        zd = np.asarray(traj_r.velocity(tm), float)
        dpi = 2.0 * zd / (1.0 - zd)
        sch = _schwarzian(traj_r, u, scale)
        if not (np.all(np.isfinite(pi)) and np.all(np.isfinite(dpi)) and np.all(np.isfinite(sch))):
            raise FloatingPointError("trajectory data overflowed inside the integration window")
    else:
        pi = dpi = sch = np.zeros_like(u)
    amp = wq * packet_profile(u - un, index.j)
    half = (np.abs(u - un) <= 0.5 * window) | (np.abs(u) <= 0.5 * window)
    amp_h = np.where(half, amp, 0.0)
    sums = np.zeros(4, complex)
    for start in range(0, u.size, block):
        sl = slice(start, start + block)
        kb = _kernel_block(u[sl], u, pi[sl], pi, dpi[sl], dpi, sch[sl], sch, scale, thermal)
        ka = kb @ amp
        kh = kb @ amp_h
        sums[0] += np.conj(amp[sl]) @ ka
        sums[1] += amp[sl] @ ka
        sums[2] += np.conj(amp_h[sl]) @ kh
        sums[3] += amp_h[sl] @ kh
    c = -1.0 / (4.0 * math.pi**2)
    n_beta = float((c * sums[0]).real)
    pair = complex(c * sums[1])
    err = float(max(abs(c * (sums[0] - sums[2])), abs(c * (sums[1] - sums[3]))))
    return n_beta, pair, err


def packet_vacuum_moments(
    traj: Trajectory,
    index: PacketIndex,
    *,
    window: float = 40.0,
    max_window: float = 320.0,
    tol: float = 1e-6,
    resolution: float = 1.0,
    block: int = 1024,
) -> PacketMoments:
    """Created-quanta number and anomalous moment of a packet, for any mirror.

    Parameters
    ----------
    traj : Trajectory
    index : PacketIndex
    window : float
        Initial half-width of the integration window in ``epsilon u``,
        measured from both the packet center and the origin of the
        trajectory.  It is doubled until the error target is met.
    max_window : float
        Largest window tried.
    tol : float
        Target for the window-halving error, relative to ``max(1, n_beta)``.
    resolution : float
        Panel density multiplier.
    block : int
        Rows of the kernel matrix held in memory at once.

    Returns
    -------
    PacketMoments

    Notes
    -----
    Summing ``|beta|^2`` and ``alpha beta`` over input frequencies turns the
    frequency integral into the vacuum correlator of the reflected field.
    With ``Phi`` the packet profile along the outgoing null coordinate and

        D(u, u') = p'(u) p'(u') / (p(u) - p(u'))^2 - 1 / (u - u')^2,

    the moments are ``n_beta = -(1/4 pi^2 eps) <Phi|D|Phi>`` and
    ``pair = -(1/4 pi^2 eps) Phi^T D Phi``.  The subtracted term is the
    mirror at rest, which creates nothing, so ``D`` is bounded and vanishes
    wherever ``p`` is linear.  ``D`` is formed from ``p(u) - u = 2 z`` and its
    slope so that tiny displacements keep full relative precision.  Pairs
    closer than ``1e-3`` of the trajectory's time scale use the diagonal
    limit ``{p, u} / 6`` (Schwarzian derivative).  The Carlitz-Willey
    mirror uses its closed-form kernel ``kappa^2 / (4 sinh^2(kappa du/2))``.
    """
    traj_r = traj.scaled(index.epsilon)
    w = float(window)
    while True:
        n_beta, pair, err = _moments_once(traj_r, index, w, resolution, block)
        if err <= tol * max(1.0, abs(n_beta)) or 2.0 * w > max_window:
            return PacketMoments(n_beta, pair, err, w)
        w *= 2.0
