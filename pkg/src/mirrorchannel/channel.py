"""Single-mode Gaussian channels induced by mirror reflection.

An output mode is related to the input field by ``V_out = T V_in T^T + N``
on 2x2 quadrature covariance matrices (vacuum ``V = I/2``).  With ``S`` the
real block that maps the quadratures of one input frequency onto those of
the output mode,

    T = S at the populated input mode,
    N = -(1/2) T T^T + (1/2) Integral dw' S S^T.

The channel is reduced to the two symplectic invariants ``tau = det T`` and
``n_bar`` (added thermal photons), and classified as amplifier, classical
additive, attenuator or erasure.
"""

from __future__ import annotations

import enum
import logging
import math
from dataclasses import dataclass, field
from typing import Any

import numpy as np

from . import specfun
from ._quadrature import panel_rule
from .bogoliubov import cw_coefficients
from .trajectory import CarlitzWilley, Trajectory
from .wavepacket import (
    CWPacketAmplitudes,
    PacketIndex,
    packet_coefficients_numeric,
    packet_vacuum_moments,
)

__all__ = [
    "ChannelClass",
    "ChannelError",
    "CutoffError",
    "NoiseNegativityError",
    "TailConvergenceError",
    "PlaneWaveProvenance",
    "PacketProvenance",
    "ChannelPair",
    "ChannelParams",
    "EpsilonOptimum",
    "s_block",
    "s_block_planewave",
    "planewave_block_from_coefficients",
    "assemble_planewave",
    "planewave_noise_quadrature",
    "planewave_canonical_form",
    "assemble_packet",
    "cw_packet_noise_closed_form",
    "packet_tau",
    "packet_tau_offset",
    "canonical_params",
    "classify",
    "apply_channel",
    "optimize_epsilon",
    "nbar_case_formulas",
    "derived_nbar_planewave",
    "resolve_case_labels",
    "PLANEWAVE_TAU_TOL",
    "PACKET_TAU_TOL",
]

log = logging.getLogger(__name__)

PLANEWAVE_TAU_TOL = 1e-9
PACKET_TAU_TOL = 1e-3
_PSD_TOL = 1e-9


class ChannelClass(str, enum.Enum):
    """Equivalence class of a single-mode Gaussian channel.

    ``PHASE_CONJUGATING`` covers ``tau < 0``, which packet channels can reach
    by a hair; it is never produced by :func:`classify`, which only accepts
    ``tau >= 0``.
    """

    AMPLIFIER = "amplifier"
    CLASSICAL_ADDITIVE = "classical_additive"
    ATTENUATOR = "attenuator"
    ERASURE = "erasure"
    PHASE_CONJUGATING = "phase_conjugating"


class ChannelError(ValueError):
    """Invalid channel input or unphysical result."""


class CutoffError(ChannelError):
    """Frequency cutoffs out of order or too close together."""


class NoiseNegativityError(ChannelError):
    """Noise matrix with a negative eigenvalue or determinant beyond tolerance."""


class TailConvergenceError(ChannelError, RuntimeError):
    """A noise integral did not converge within the requested tolerance."""


@dataclass(frozen=True)
class PlaneWaveProvenance:
    omega: float
    kappa: float
    cutoff_low: float
    cutoff_high: float
    kind: str = "planewave_cw"


@dataclass(frozen=True)
class PacketProvenance:
    index: PacketIndex
    source: str
    kappa: float | None
    units: str
    kind: str = "packet"


@dataclass(frozen=True)
class ChannelPair:
    """Gaussian channel ``V -> T V T^T + N``.

    Attributes
    ----------
    T, N : ndarray
        Real 2x2 matrices; ``N`` is symmetric.
    provenance : PlaneWaveProvenance or PacketProvenance or None
    quad_error : float
        Largest absolute error estimate of the integrals behind ``T`` and ``N``.
    converged : bool
        Whether every integral met its target.
    notes : tuple of str
        Diagnostics collected during assembly.
    tau_offset : float or None
        ``det T - 1`` evaluated without cancellation, when the assembly
        could provide it (packets of horizon-free mirrors in bin units).
        Resolves departures from the identity far below double precision.
    """

    T: np.ndarray
    N: np.ndarray
    provenance: Any = None
    quad_error: float = 0.0
    converged: bool = True
    notes: tuple[str, ...] = field(default=())
    tau_offset: float | None = None

    def __post_init__(self) -> None:
        t = np.array(self.T, dtype=float)
        n = np.array(self.N, dtype=float)
        if t.shape != (2, 2) or n.shape != (2, 2):
            raise ChannelError("T and N must be 2x2")
        if not (np.all(np.isfinite(t)) and np.all(np.isfinite(n))):
            raise ChannelError("T and N must be finite")
        scale = max(1.0, float(np.max(np.abs(n))))
        if abs(n[0, 1] - n[1, 0]) > 1e-12 * scale:
            raise ChannelError("N must be symmetric")
        n[0, 1] = n[1, 0] = 0.5 * (n[0, 1] + n[1, 0])
        object.__setattr__(self, "T", t)
        object.__setattr__(self, "N", n)

    @property
    def tau(self) -> float:
        return float(np.linalg.det(self.T))

    @property
    def nu(self) -> float:
        """``sqrt(det N)``; negative determinants within rounding give zero."""
        return math.sqrt(max(float(np.linalg.det(self.N)), 0.0))

    @property
    def min_noise_eigenvalue(self) -> float:
        return float(np.min(np.linalg.eigvalsh(self.N)))

    def physicality_margin(self) -> float:
        """``sqrt(det N) - |1 - det T|/2``; nonnegative for a physical channel."""
        return self.nu - 0.5 * abs(1.0 - self.tau)

    def is_physical(self, tol: float = _PSD_TOL) -> bool:
        return self.physicality_margin() >= -tol and self.min_noise_eigenvalue >= -tol


@dataclass(frozen=True)
class ChannelParams:
    """Canonical parameters of a channel.

    ``physical`` is false when the noise is below the complete-positivity
    bound; ``n_bar`` is then negative and only meaningful as a diagnostic.
    """

    tau: float
    n_bar: float
    cls: ChannelClass
    nu: float
    physical: bool = True


# ---------------------------------------------------------------------------
# S blocks
# ---------------------------------------------------------------------------


def s_block(alpha: complex, beta: complex) -> np.ndarray:
    """Quadrature block of one output mode against one input mode.

    For ``b = Integral (conj(alpha) a - conj(beta) a^dagger)`` the output
    quadratures are ``S`` times the input quadratures, with

        S = [[ Re(alpha - beta),  Im(alpha + beta)],
             [-Im(alpha - beta),  Re(alpha + beta)]].

    ``det S = |alpha|^2 - |beta|^2``.
    """
    a = complex(alpha)
    b = complex(beta)
    return np.array([[(a - b).real, (a + b).imag], [-(a - b).imag, (a + b).real]])


def s_block_planewave(omega: float, omega_prime: float, kappa: float) -> np.ndarray:
    """Carlitz-Willey plane-wave block in closed form.

    ``(1/pi kappa) sqrt(w/w') |Gamma(i w/kappa)| diag(cosh x, sinh x) R(theta)``
    with ``x = pi w / 2 kappa`` and ``R`` the rotation by ``theta``.  Moduli
    are combined in log space so large ``w/kappa`` does not overflow.
    """
    for name, v in (("omega", omega), ("omega_prime", omega_prime), ("kappa", kappa)):
        if not (math.isfinite(v) and v > 0.0):
            raise specfun.SpecialFunctionDomainError(f"{name} must be positive and finite")
    y = omega / kappa
    x = 0.5 * math.pi * y
    log_c = -math.log(math.pi * kappa) + 0.5 * math.log(omega / omega_prime) + specfun.log_gamma_imag_modulus(y)
    # cosh x and sinh x in log form: x + ln((1 +- e^{-2x})/2)
    ch = math.exp(log_c + x + math.log1p(math.exp(-2 * x)) - math.log(2.0))
    sh = math.exp(log_c + x + math.log(-math.expm1(-2 * x)) - math.log(2.0))
    th = specfun.theta_phase(omega, omega_prime, kappa)
    c, s = math.cos(th), math.sin(th)
    return np.array([[ch * c, -ch * s], [sh * s, sh * c]])


def planewave_block_from_coefficients(alpha: complex, beta: complex) -> np.ndarray:
    """General block in the plane-wave phase convention: ``s_block(alpha, conj(beta))``.

    The closed-form plane-wave block corresponds to the creation coefficient
    entering with its phase reversed relative to the packet convention.
    Both give the same ``det`` and the same ``tau``; only the orientation of
    the noise ellipse differs.
    """
    return s_block(alpha, np.conj(beta))


# ---------------------------------------------------------------------------
# Plane waves
# ---------------------------------------------------------------------------


def _check_cutoffs(omega: float, cutoff_low: float, cutoff_high: float) -> float:
    if not (math.isfinite(cutoff_low) and math.isfinite(cutoff_high) and 0.0 < cutoff_low < cutoff_high):
        raise CutoffError("cutoffs must satisfy 0 < cutoff_low < cutoff_high")
    log_ratio = math.log(cutoff_high / cutoff_low)
    if log_ratio <= 1.0 / omega:
        raise CutoffError(
            f"ln(cutoff_high/cutoff_low) = {log_ratio:.6g} must exceed 1/omega = {1.0 / omega:.6g}; "
            "the noise matrix would not be positive"
        )
    return log_ratio


def _planewave_noise_diag(omega: float, kappa: float) -> np.ndarray:
    x = 0.5 * math.pi * omega / kappa
    return np.array([1.0 / math.tanh(x), math.tanh(x)])


def assemble_planewave(
    omega: float,
    kappa: float,
    cutoff_low: float,
    cutoff_high: float,
    *,
    method: str = "closed",
) -> ChannelPair:
    """Plane-wave Carlitz-Willey channel with infrared and ultraviolet cutoffs.

    Parameters
    ----------
    omega, kappa : float
        Output frequency and surface gravity, pure numbers in natural units.
    cutoff_low, cutoff_high : float
        Input-frequency cutoffs of the noise integral.
    method : {"closed", "quadrature"}
        Closed-form noise or Gauss-Legendre integration of ``S S^T`` built
        from the closed-form blocks.

    Returns
    -------
    ChannelPair
        ``T`` is the block at ``w' = w``;
        ``N = (1/4 pi kappa)(ln(cutoff_high/cutoff_low) - 1/w) diag(coth x, tanh x)``.

    Raises
    ------
    CutoffError
        Unordered cutoffs, or ``ln(cutoff_high/cutoff_low) <= 1/w``.
    """
    log_ratio = _check_cutoffs(omega, cutoff_low, cutoff_high)
    T = s_block_planewave(omega, omega, kappa)
    if method == "closed":
        N = np.diag((log_ratio - 1.0 / omega) / (4.0 * math.pi * kappa) * _planewave_noise_diag(omega, kappa))
    elif method == "quadrature":
        N = planewave_noise_quadrature(omega, kappa, cutoff_low, cutoff_high)
    else:
        raise ValueError("method must be 'closed' or 'quadrature'")
    return ChannelPair(T, N, PlaneWaveProvenance(omega, kappa, cutoff_low, cutoff_high))


def planewave_noise_quadrature(
    omega: float, kappa: float, cutoff_low: float, cutoff_high: float, *, panels: int = 64
) -> np.ndarray:
    """Noise matrix by integrating ``S S^T`` over ``[cutoff_low, cutoff_high]``.

    Integrates in ``ln w'``, where ``w' S S^T`` is constant, with blocks
    evaluated from :func:`s_block_planewave` at each node.
    """
    _check_cutoffs(omega, cutoff_low, cutoff_high)
    edges = np.linspace(math.log(cutoff_low), math.log(cutoff_high), panels + 1)
    x, w = panel_rule(edges, 8)
    acc = np.zeros((2, 2))
    for xi, wi in zip(x, w):
        wp = math.exp(xi)
        s = s_block_planewave(omega, wp, kappa)
        acc += wi * wp * (s @ s.T)
    T = s_block_planewave(omega, omega, kappa)
    return 0.5 * acc - 0.5 * T @ T.T


def planewave_canonical_form(
    omega: float, kappa: float, cutoff_low: float, cutoff_high: float
) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    """Explicit reduction to canonical form, ``T_c = S_B T S_A``, ``N_c = S_B N S_B^T``.

    Returns ``(T_c, N_c, S_A, S_B)``; ``T_c`` is ``I/sqrt(2 pi w kappa)`` and
    ``N_c`` is proportional to the identity.
    """
    pair = assemble_planewave(omega, kappa, cutoff_low, cutoff_high)
    x = 0.5 * math.pi * omega / kappa
    s_b = np.diag([math.sqrt(math.tanh(x)), math.sqrt(1.0 / math.tanh(x))])
    th = specfun.theta_phase(omega, omega, kappa)
    s_a = np.array([[math.cos(th), math.sin(th)], [-math.sin(th), math.cos(th)]])
    return s_b @ pair.T @ s_a, s_b @ pair.N @ s_b.T, s_a, s_b


def nbar_case_formulas(omega: float, kappa: float, log_ratio: float) -> dict[str, float]:
    """The three piecewise thermal-photon expressions quoted for plane waves.

    Keys ``"first"`` ``(w L + 2 pi w kappa - 2)/(2 - 4 pi w kappa)``,
    ``"second"`` ``(w L - 2 pi w kappa)/(4 pi w kappa - 2)`` and
    ``"threshold"`` ``L/(4 pi kappa) - 1/2``, with ``L = ln(cutoff ratio)``.
    They are usually attributed to ``tau < 1``, ``tau > 1`` and ``tau = 1``.
    """
    g = 2.0 * math.pi * omega * kappa
    with np.errstate(divide="ignore", invalid="ignore"):
        first = (omega * log_ratio + g - 2.0) / (2.0 - 2.0 * g) if g != 1.0 else math.nan
        second = (omega * log_ratio - g) / (2.0 * g - 2.0) if g != 1.0 else math.nan
    return {"first": first, "second": second, "threshold": log_ratio / (4.0 * math.pi * kappa) - 0.5}


def derived_nbar_planewave(omega: float, kappa: float, log_ratio: float) -> float:
    """``n_bar`` from the class mappings applied to the closed-form plane-wave noise.

    ``nu = (L - 1/w)/(4 pi kappa)`` and ``tau = 1/(2 pi w kappa)``; then
    ``nu = (tau - 1)(n + 1/2)`` for amplifiers, ``nu = n`` at ``tau = 1`` and
    ``nu = (1 - tau)(n + 1/2)`` for attenuators.
    """
    nu = (log_ratio - 1.0 / omega) / (4.0 * math.pi * kappa)
    tau = 1.0 / (2.0 * math.pi * omega * kappa)
    return _nbar_from_nu(nu, tau, PLANEWAVE_TAU_TOL)[0]


def resolve_case_labels(points: list[tuple[float, float, float]]) -> dict[str, str]:
    """Match the quoted piecewise expressions to the regimes they actually describe.

    Parameters
    ----------
    points : list of (omega, kappa, log_ratio)
        Sample points on both sides of ``tau = 1``.

    Returns
    -------
    dict
        ``{"amplifier": key, "attenuator": key}`` with keys of
        :func:`nbar_case_formulas`, chosen so the expression agrees with
        :func:`derived_nbar_planewave` to ``1e-12`` relative at every point of
        that regime.

    Raises
    ------
    ChannelError
        If no single assignment is consistent with all points.
    """
    found: dict[str, set[str]] = {"amplifier": set(), "attenuator": set()}
    seen: dict[str, bool] = {"amplifier": False, "attenuator": False}
    for omega, kappa, log_ratio in points:
        tau = 1.0 / (2.0 * math.pi * omega * kappa)
        if abs(tau - 1.0) <= PLANEWAVE_TAU_TOL:
            continue
        regime = "amplifier" if tau > 1.0 else "attenuator"
        derived = derived_nbar_planewave(omega, kappa, log_ratio)
        cases = nbar_case_formulas(omega, kappa, log_ratio)
        ok = {k for k in ("first", "second") if abs(cases[k] - derived) <= 1e-12 * max(1.0, abs(derived))}
        found[regime] = ok if not seen[regime] else (found[regime] & ok)
        seen[regime] = True
    out = {}
    for regime in ("amplifier", "attenuator"):
        if not seen[regime]:
            continue
        if len(found[regime]) != 1:
            raise ChannelError(f"no unique expression reproduces the {regime} regime")
        out[regime] = next(iter(found[regime]))
    return out


# ---------------------------------------------------------------------------
# Wave packets
# ---------------------------------------------------------------------------


def cw_packet_noise_closed_form(j: int, epsilon: float, kappa: float) -> float:
    """``Integral dw' (|alpha|^2 + |beta|^2)`` for a Carlitz-Willey packet.

    By Parseval the integral equals ``(1/eps) Integral_bin coth(pi w/kappa) dw``,
    i.e. ``(kappa/(pi eps)) ln(sinh(pi (j+1) eps/kappa) / sinh(pi j eps/kappa))``.
    Infinite for ``j = 0``.
    """
    if j == 0:
        return math.inf
    a = math.pi * j * epsilon / kappa
    b = math.pi * (j + 1) * epsilon / kappa
    return kappa / (math.pi * epsilon) * (specfun.log_sinh(b) - specfun.log_sinh(a))


def _k_matrix(e: float, p: complex) -> np.ndarray:
    """``Integral dw' S S^T`` from ``E = Integral (|a|^2 + |b|^2)`` and ``P = Integral a b``."""
    return np.array([[e - 2.0 * p.real, 2.0 * p.imag], [2.0 * p.imag, e + 2.0 * p.real]])


_CW_MOMENT_CACHE: dict[tuple[int, float, float, float], tuple[float, complex, float, bool]] = {}


def _cw_moments(j: int, epsilon: float, kappa: float, window: float) -> tuple[float, complex, float, bool]:
    key = (j, epsilon, kappa, window)
    hit = _CW_MOMENT_CACHE.get(key)
    if hit is not None:
        return hit
    amp = CWPacketAmplitudes(j, epsilon, kappa)
    r = amp.s_integrals(window)
    c = 1.0 / (4.0 * math.pi**2 * amp.kappa_r)
    e = c * (r["pp"].value + r["mm"].value)
    p = -c * complex(r["pm_re"].value, r["pm_im"].value)
    err = c * max(r["pp"].error + r["mm"].error, r["pm_re"].error + r["pm_im"].error)
    divergent = r["pp"].divergent or r["mm"].divergent
    out = (e, p, err, divergent)
    _CW_MOMENT_CACHE[key] = out
    return out


def _packet_coeffs_at_center(source, index: PacketIndex, numeric: bool):
    wt = index.omega_center
    if isinstance(source, Trajectory) and (numeric or not isinstance(source, CarlitzWilley)):
        return packet_coefficients_numeric(source, index, wt)
    kappa = source.kappa if isinstance(source, CarlitzWilley) else float(source)
    amp = CWPacketAmplitudes(index.j, index.epsilon, kappa)
    return amp.coefficients(index.n, wt)


def packet_tau(source, index: PacketIndex, *, units: str | None = None) -> float:
    """``det T`` of a packet channel without assembling the noise."""
    c = _packet_coeffs_at_center(source, index, numeric=False)
    units = _resolve_units(source, units)
    scale = index.epsilon if units == "bin" else 1.0
    return scale * (abs(c.alpha) ** 2 - abs(c.beta) ** 2)


def packet_tau_offset(source, index: PacketIndex) -> tuple[float, float]:
    """``det T - 1`` in bin units, with an absolute error estimate.

    For horizon-free trajectories the mirror-at-rest part of the packet
    coefficient is exact and the remainder is computed separately, so
    offsets as small as ``1e-30`` keep full relative precision.  Other
    sources fall back to ``packet_tau(..., units="bin") - 1``.
    """
    c = _packet_coeffs_at_center(source, index, numeric=False)
    if c.tau_offset is not None:
        return c.tau_offset, 2.0 * c.quad_error
    tau = index.epsilon * (abs(c.alpha) ** 2 - abs(c.beta) ** 2)
    return tau - 1.0, 2.0 * c.quad_error * max(tau, 1.0)


def _resolve_units(source, units: str | None) -> str:
    if units is None:
        cw = not isinstance(source, Trajectory) or isinstance(source, CarlitzWilley)
        return "natural" if cw else "bin"
    if units not in ("natural", "bin"):
        raise ValueError("units must be 'natural' or 'bin'")
    return units


def assemble_packet(
    source,
    index: PacketIndex,
    *,
    units: str | None = None,
    numeric: bool = False,
    window: float = 400.0,
    tol: float = 1e-4,
    strict: bool = False,
) -> ChannelPair:
    """Channel of one outgoing wave packet with only its central input mode populated.

    Parameters
    ----------
    source : float or Trajectory
        Surface gravity of a Carlitz-Willey mirror (closed-form amplitudes),
        or any trajectory.
    index : PacketIndex
    units : {"natural", "bin"}, optional
        ``"natural"`` keeps the packet coefficients as functions of input
        frequency (dimension ``frequency^{-1/2}``), ``"bin"`` multiplies them
        by ``sqrt(epsilon)``, which makes a mirror at rest the identity
        channel.  Defaults to natural for Carlitz-Willey and bin otherwise.
    numeric : bool
        Use the trajectory-generic path even for Carlitz-Willey.
    window : float
        Half-width (in ``epsilon s``) of the log-frequency window for the
        closed-form noise integrals.
    tol : float
        Error target of the noise integrals relative to ``max(1, E)``.
    strict : bool
        Raise :class:`TailConvergenceError` instead of flagging.

    Returns
    -------
    ChannelPair
        ``T = S`` at ``w' = (j + 1/2) eps`` and
        ``N = (1/2)(Integral dw' S S^T - T T^T)``.

    Raises
    ------
    NoiseNegativityError
        If ``N`` has an eigenvalue below ``-1e-9``.
    TailConvergenceError
        With ``strict=True`` when an integral misses ``tol``.

    Notes
    -----
    ``Integral S S^T = E I + 2 [[-Re P, Im P], [Im P, Re P]]`` with
    ``E = Integral (|alpha|^2 + |beta|^2)`` and ``P = Integral alpha beta``.
    For Carlitz-Willey these are integrals over ``s`` of the closed-form
    amplitudes with endpoint tail corrections.  In the ``j = 0`` bin they
    grow without bound as the window widens, because the bin reaches zero
    frequency; the pair is then flagged and the window is recorded.  For
    other trajectories ``E = 1 + 2 n_beta`` and ``P`` come from the vacuum
    correlator of the reflected field, see
    :func:`mirrorchannel.wavepacket.packet_vacuum_moments`.
    """
    units = _resolve_units(source, units)
    notes: list[str] = []
    coeff = _packet_coeffs_at_center(source, index, numeric)
    scale = math.sqrt(index.epsilon) if units == "bin" else 1.0
    T = s_block(scale * coeff.alpha, scale * coeff.beta)
    t_err = scale**2 * coeff.quad_error * max(abs(coeff.alpha), abs(coeff.beta)) ** 2
    converged = coeff.converged
    if not coeff.converged:
        notes.append(f"packet coefficients at the central frequency missed their target: {coeff.quad_error:.3g}")

    cw_kappa = None
    if not isinstance(source, Trajectory):
        cw_kappa = float(source)
    elif isinstance(source, CarlitzWilley) and not numeric:
        cw_kappa = source.kappa

    if cw_kappa is not None:
        e, p, k_err, divergent = _cw_moments(index.j, index.epsilon, cw_kappa, window)
        if divergent:
            converged = False
            notes.append(
                f"noise integral grows logarithmically with the window in the j=0 bin; "
                f"value for half-width {window:g}/eps, increase per doubling {k_err:.3g}"
            )
        elif k_err > tol * max(1.0, e):
            converged = False
            notes.append(f"noise tail error {k_err:.3g} above target")
        name = "cw"
    else:
        m = packet_vacuum_moments(source, index, tol=tol)
        e = 1.0 + 2.0 * m.n_beta
        p = m.pair
        k_err = m.error
        if k_err > tol * max(1.0, e):
            converged = False
            notes.append(f"vacuum moments changed by {k_err:.3g} when the window was halved")
        name = getattr(source, "name", type(source).__name__.lower())
    K = _k_matrix(e, p)
    N = 0.5 * (K - T @ T.T)
    N = 0.5 * (N + N.T)
    quad_error = float(max(t_err, k_err))
    if strict and not converged:
        raise TailConvergenceError("; ".join(notes))
    offset = coeff.tau_offset if units == "bin" else None
    pair = ChannelPair(
        T, N, PacketProvenance(index, name, cw_kappa, units), quad_error, converged, tuple(notes), offset
    )
    if pair.min_noise_eigenvalue < -_PSD_TOL * max(1.0, float(np.max(np.abs(K)))):
        raise NoiseNegativityError(f"noise matrix has eigenvalue {pair.min_noise_eigenvalue:.3g}")
    return pair


# ---------------------------------------------------------------------------
# Canonical parameters
# ---------------------------------------------------------------------------


def classify(tau: float, tol: float = PLANEWAVE_TAU_TOL) -> ChannelClass:
    """Class of a channel from its transmissivity.

    ``|tau - 1| <= tol`` is classical additive, ``tau <= tol`` erasure,
    otherwise amplifier (``tau > 1``) or attenuator.

    Raises
    ------
    ChannelError
        For ``tau < 0``.
    """
    if not math.isfinite(tau):
        raise ChannelError("tau must be finite")
    if tau < 0.0:
        raise ChannelError("tau must be nonnegative")
    if abs(tau - 1.0) <= tol:
        return ChannelClass.CLASSICAL_ADDITIVE
    if tau <= tol:
        return ChannelClass.ERASURE
    return ChannelClass.AMPLIFIER if tau > 1.0 else ChannelClass.ATTENUATOR


def _nbar_from_nu(nu: float, tau: float, tol: float) -> tuple[float, ChannelClass]:
    if tau < -tol:
        return nu / (1.0 - tau) - 0.5, ChannelClass.PHASE_CONJUGATING
    cls = classify(max(tau, 0.0), tol)
    if cls is ChannelClass.AMPLIFIER:
        return nu / (tau - 1.0) - 0.5, cls
    if cls is ChannelClass.ATTENUATOR:
        return nu / (1.0 - tau) - 0.5, cls
    if cls is ChannelClass.CLASSICAL_ADDITIVE:
        return nu, cls
    return nu - 0.5, cls


def canonical_params(pair: ChannelPair, tol: float | None = None) -> ChannelParams:
    """``(tau, n_bar, class)`` of a channel.

    Parameters
    ----------
    pair : ChannelPair
    tol : float, optional
        Band around ``tau = 1`` treated as classical additive; defaults to
        ``1e-3`` for packets and ``1e-9`` otherwise.

    Returns
    -------
    ChannelParams

    Raises
    ------
    NoiseNegativityError
        If ``det N`` is negative beyond rounding.

    Notes
    -----
    Both invariants are unchanged by ``T -> S_B T S_A``, ``N -> S_B N S_B^T``
    with symplectic ``S_A``, ``S_B``, so no explicit reduction is needed.
    """
    if tol is None:
        tol = PACKET_TAU_TOL if isinstance(pair.provenance, PacketProvenance) else PLANEWAVE_TAU_TOL
    det_n = float(np.linalg.det(pair.N))
    if det_n < -1e-12 * max(1.0, float(np.max(np.abs(pair.N)))) ** 2:
        raise NoiseNegativityError(f"det N = {det_n:.3g} is negative")
    nu = math.sqrt(max(det_n, 0.0))
    tau = pair.tau
    n_bar, cls = _nbar_from_nu(nu, tau, tol)
    return ChannelParams(tau, n_bar, cls, nu, pair.is_physical())


def apply_channel(pair: ChannelPair, v_in: np.ndarray, *, check: bool = True) -> np.ndarray:
    """``V_out = T V_in T^T + N``.

    Parameters
    ----------
    pair : ChannelPair
    v_in : array_like
        Symmetric 2x2 covariance matrix.
    check : bool
        Require ``v_in`` to satisfy ``det V >= 1/4`` and be positive definite.
    """
    v = np.asarray(v_in, dtype=float)
    if v.shape != (2, 2) or not np.all(np.isfinite(v)):
        raise ChannelError("v_in must be a finite 2x2 matrix")
    if abs(v[0, 1] - v[1, 0]) > 1e-12 * max(1.0, float(np.max(np.abs(v)))):
        raise ChannelError("v_in must be symmetric")
    if check and (np.linalg.det(v) < 0.25 * (1.0 - 1e-12) or v[0, 0] <= 0.0):
        raise ChannelError("v_in violates the uncertainty relation det V >= 1/4")
    out = pair.T @ v @ pair.T.T + pair.N
    return 0.5 * (out + out.T)


# ---------------------------------------------------------------------------
# Bin-width optimization
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class EpsilonOptimum:
    """Result of :func:`optimize_epsilon`.

    ``at_boundary`` is true when the best value sits on an end of the search
    range, in which case the true supremum may lie outside it.
    """

    epsilon: float
    tau: float
    method: str
    at_boundary: bool
    evaluations: int


def optimize_epsilon(
    kappa: float,
    j: int = 0,
    n: int = 0,
    search_range: tuple[float, float] | None = None,
    *,
    xtol: float = 1e-4,
    grid: int = 41,
) -> EpsilonOptimum:
    """Bin width that maximizes the Carlitz-Willey packet transmissivity.

    Parameters
    ----------
    kappa : float
        Surface gravity.
    j, n : int
        Packet indices.
    search_range : (float, float), optional
        Bounds on ``epsilon``; defaults to ``(kappa/100, kappa)``.
    xtol : float
        Tolerance on ``ln epsilon``.
    grid : int
        Points of the fallback log-spaced scan.

    Returns
    -------
    EpsilonOptimum

    Notes
    -----
    Golden-section search in ``ln epsilon`` assuming a single interior
    maximum.  If an interior probe falls below an endpoint value, or the
    search converges onto an end of the range, the bracket violation is
    logged and a grid scan over the whole range decides.
    """
    if search_range is None:
        search_range = (kappa / 100.0, kappa)
    lo, hi = (float(v) for v in search_range)
    if not (0.0 < lo < hi and math.isfinite(hi)):
        raise ValueError("search range must satisfy 0 < low < high")
    count = 0

    def tau_at(x: float) -> float:
        nonlocal count
        count += 1
        return packet_tau(kappa, PacketIndex(j, n, math.exp(x)))

    a, b = math.log(lo), math.log(hi)
    fa, fb = tau_at(a), tau_at(b)
    g = (math.sqrt(5.0) - 1.0) / 2.0
    c, d = b - g * (b - a), a + g * (b - a)
    fc, fd = tau_at(c), tau_at(d)
    violated = min(fc, fd) < min(fa, fb) - 1e-15
    while b - a > xtol and not violated:
        if fc >= fd:
            b, d, fd = d, c, fc
            c = b - g * (b - a)
            fc = tau_at(c)
        else:
            a, c, fc = c, d, fd
            d = a + g * (b - a)
            fd = tau_at(d)
    x_best = c if fc >= fd else d
    f_best = max(fc, fd)
    edge = min(x_best - math.log(lo), math.log(hi) - x_best) <= 2 * xtol
    if not violated and not edge:
        return EpsilonOptimum(math.exp(x_best), f_best, "golden", False, count)
    log.warning(
        "optimize_epsilon: %s; falling back to a grid scan over [%g, %g]",
        "bracket not unimodal" if violated else "maximum on the edge of the search range",
        lo,
        hi,
    )
    xs = np.linspace(math.log(lo), math.log(hi), grid)
    vals = np.array([tau_at(x) for x in xs])
    k = int(np.argmax(vals))
    return EpsilonOptimum(float(math.exp(xs[k])), float(vals[k]), "grid", k in (0, grid - 1), count)
