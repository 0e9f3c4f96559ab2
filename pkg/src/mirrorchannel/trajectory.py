"""Mirror worldlines and their ray-tracing maps.

A mirror at ``x = z(t)`` reflects the null ray arriving at advanced time
``v = t + z`` into the outgoing ray at retarded time ``u = t - z``.  The maps
``v = p(u)`` and its inverse ``u = f(v)`` encode the reflection.  All
quantities are pure numbers in natural units.
"""

from __future__ import annotations

import math
from abc import ABC, abstractmethod
from dataclasses import dataclass, field
from typing import Callable, Literal

import numpy as np
import numpy.typing as npt

from .specfun import lambert_w0_exp

__all__ = [
    "TrajectoryError",
    "Trajectory",
    "CarlitzWilley",
    "Darcx",
    "Custom",
    "RayMap",
    "position",
    "velocity",
    "acceleration",
    "proper_acceleration",
    "ray_p",
    "ray_f",
    "solve_increasing",
]

ArrayLike = npt.ArrayLike


class TrajectoryError(ValueError):
    """Invalid trajectory parameters or arguments outside a ray-map domain."""


def _out(values: np.ndarray, like: ArrayLike):
    if np.ndim(like) == 0:
        return float(np.asarray(values).reshape(()))
    return values


def solve_increasing(
    fun: Callable[[np.ndarray], np.ndarray],
    dfun: Callable[[np.ndarray], np.ndarray],
    target: ArrayLike,
    guess: ArrayLike,
    *,
    rtol: float = 1e-13,
    max_expand: int = 400,
    max_iter: int = 200,
) -> np.ndarray:
    """Solve ``fun(t) = target`` elementwise for a strictly increasing ``fun``.

    The root is first bracketed by geometric expansion around ``guess``, then
    refined by Newton steps that fall back to bisection whenever they leave
    the bracket.

    Parameters
    ----------
    fun, dfun : callable
        Vectorized function and its (positive) derivative.
    target : array_like
        Right-hand sides.
    guess : array_like
        Starting points, broadcast against ``target``.
    rtol : float
        Relative tolerance on the root, measured against ``max(1, |t|)``.

    Returns
    -------
    ndarray
        Roots with the broadcast shape of ``target`` and ``guess``.

    Raises
    ------
    TrajectoryError
        If no sign change is found, which signals a non-monotone function.
    """
    y, t0 = np.broadcast_arrays(np.asarray(target, float), np.asarray(guess, float))
    y = y.ravel().copy()
    t0 = t0.ravel().copy()
    lo = t0.copy()
    hi = t0.copy()
    step = np.maximum(1.0, np.abs(t0) * 1e-3)
    glo = fun(lo) - y
    ghi = glo.copy()
    for _ in range(max_expand):
        need_lo = glo > 0.0
        need_hi = ghi < 0.0
        if not (np.any(need_lo) or np.any(need_hi)):
            break
        lo = np.where(need_lo, lo - step, lo)
        hi = np.where(need_hi, hi + step, hi)
        step = np.where(need_lo | need_hi, 2.0 * step, step)
        glo = np.where(need_lo, fun(lo) - y, glo)
        ghi = np.where(need_hi, fun(hi) - y, ghi)
    if np.any(glo > 0.0) or np.any(ghi < 0.0) or not np.all(np.isfinite(lo + hi)):
        raise TrajectoryError("root bracketing failed; the map is not monotone over the requested range")

    t = 0.5 * (lo + hi)
    done = np.zeros(t.shape, dtype=bool)
    for _ in range(max_iter):
        g = fun(t) - y
        lo = np.where(g < 0.0, t, lo)
        hi = np.where(g > 0.0, t, hi)
        d = dfun(t)
        with np.errstate(divide="ignore", invalid="ignore"):
            t_new = t - g / d
        outside = ~np.isfinite(t_new) | (t_new <= lo) | (t_new >= hi)
        t_new = np.where(outside, 0.5 * (lo + hi), t_new)
        scale = np.maximum(1.0, np.abs(t_new))
        converged = (np.abs(t_new - t) <= rtol * scale) | (g == 0.0) | (hi - lo <= rtol * scale)
        t = np.where(done, t, t_new)
        done |= converged
        if np.all(done):
            break
    return t.reshape(np.broadcast(np.asarray(target), np.asarray(guess)).shape)


class Trajectory(ABC):
    """A subluminal mirror worldline ``x = z(t)``.

    Subclasses provide position, velocity and acceleration; the ray maps are
    obtained numerically unless a subclass supplies a closed form.
    """

    kind: str = "trajectory"

    @property
    def horizon_v0(self) -> float | None:
        """Advanced time of the horizon, or ``None`` for horizon-free motion."""
        return None

    @property
    def time_scale(self) -> float:
        """Duration over which the velocity changes appreciably."""
        return 1.0

    @abstractmethod
    def position(self, t: ArrayLike): ...

    @abstractmethod
    def velocity(self, t: ArrayLike): ...

    @abstractmethod
    def acceleration(self, t: ArrayLike): ...

    @abstractmethod
    def scaled(self, factor: float) -> "Trajectory":
        """The same worldline with all times and lengths multiplied by ``factor``."""

    def proper_acceleration(self, t: ArrayLike):
        """``z'' / (1 - z'^2)^{3/2}``; raises if the mirror is not subluminal."""
        zd = np.asarray(self.velocity(t), float)
        if np.any(np.abs(zd) >= 1.0):
            raise TrajectoryError("mirror velocity reaches the speed of light")
        zdd = np.asarray(self.acceleration(t), float)
        return _out(zdd / (1.0 - zd * zd) ** 1.5, t)

    # -- numeric ray maps ---------------------------------------------------

    def retarded_root(self, u: ArrayLike) -> np.ndarray:
        """Time ``t_m`` at which the outgoing ray ``u`` leaves the mirror."""
        return solve_increasing(
            lambda t: t - np.asarray(self.position(t), float),
            lambda t: 1.0 - np.asarray(self.velocity(t), float),
            u,
            u,
        )

    def advanced_root(self, v: ArrayLike) -> np.ndarray:
        """Time at which the incoming ray ``v`` hits the mirror."""
        self._check_v(v)
        return solve_increasing(
            lambda t: t + np.asarray(self.position(t), float),
            lambda t: 1.0 + np.asarray(self.velocity(t), float),
            v,
            v,
        )

    def _check_v(self, v: ArrayLike) -> None:
        v0 = self.horizon_v0
        if v0 is not None and np.any(np.asarray(v) >= v0):
            raise TrajectoryError(f"advanced time must lie below the horizon v0 = {v0}")

    def ray_p_numeric(self, u: ArrayLike):
        tm = self.retarded_root(u)
        return _out(tm + np.asarray(self.position(tm), float), u)

    def ray_f_numeric(self, v: ArrayLike):
        tb = self.advanced_root(v)
        return _out(tb - np.asarray(self.position(tb), float), v)

    def ray_p(self, u: ArrayLike):
        """Advanced time ``v = p(u)`` of the ray reflected into ``u``."""
        return self.ray_p_numeric(u)

    def ray_f(self, v: ArrayLike):
        """Retarded time ``u = f(v)`` of the reflection of ray ``v``."""
        return self.ray_f_numeric(v)

    def ray_f_offset(self, v: ArrayLike):
        """``f(v) - v`` evaluated as ``-2 z`` so tiny offsets keep full precision."""
        tb = self.advanced_root(v)
        return _out(-2.0 * np.asarray(self.position(tb), float), v)

    def ray_f_slope(self, v: ArrayLike):
        """``f'(v) = (1 - z') / (1 + z')`` at the reflection event."""
        tb = self.advanced_root(v)
        zd = np.asarray(self.velocity(tb), float)
        return _out((1.0 - zd) / (1.0 + zd), v)


@dataclass(frozen=True)
class CarlitzWilley(Trajectory):
    """Worldline ``z(t) = -t - W(exp(-2 kappa t)) / kappa``.

    The mirror moves at nearly the speed of light toward ``+x`` in the far
    past and toward ``-x`` in the far future, with a horizon at ``v = 0``.
    Its ray maps are ``p(u) = -exp(-kappa u)/kappa`` and
    ``f(v) = -ln(-kappa v)/kappa``.
    """

    kappa: float
    kind: str = field(default="cw", init=False, repr=False)

    def __post_init__(self) -> None:
        if not (math.isfinite(self.kappa) and self.kappa > 0.0):
            raise TrajectoryError("kappa must be positive and finite")

    @property
    def horizon_v0(self) -> float:
        return 0.0

    @property
    def time_scale(self) -> float:
        return 1.0 / self.kappa

    def _w(self, t: ArrayLike) -> np.ndarray:
        return np.asarray(lambert_w0_exp(-2.0 * self.kappa * np.asarray(t, float)))

    def position(self, t: ArrayLike):
        return _out(-np.asarray(t, float) - self._w(t) / self.kappa, t)

    def velocity(self, t: ArrayLike):
        w = self._w(t)
        return _out((w - 1.0) / (w + 1.0), t)

    def acceleration(self, t: ArrayLike):
        w = self._w(t)
        return _out(-4.0 * self.kappa * w / (1.0 + w) ** 3, t)

    def proper_acceleration(self, t: ArrayLike):
        return _out(-self.kappa / (2.0 * np.sqrt(self._w(t))), t)

    def scaled(self, factor: float) -> "CarlitzWilley":
        return CarlitzWilley(self.kappa / factor)

    def ray_p(self, u: ArrayLike):
        return _out(-np.exp(-self.kappa * np.asarray(u, float)) / self.kappa, u)

    def ray_f(self, v: ArrayLike):
        self._check_v(v)
        return _out(-np.log(-self.kappa * np.asarray(v, float)) / self.kappa, v)

    def ray_f_slope(self, v: ArrayLike):
        self._check_v(v)
        return _out(-1.0 / (self.kappa * np.asarray(v, float)), v)


def _asinh_exp(x: np.ndarray) -> np.ndarray:
    # asinh(e^x) without overflow
    pos = x > 0.0
    xp = np.where(pos, x, 0.0)
    xn = np.where(pos, 0.0, x)
    return np.where(pos, xp + np.log1p(np.sqrt(1.0 + np.exp(-2.0 * xp))), np.arcsinh(np.exp(xn)))


def _logistic_root(x: np.ndarray) -> np.ndarray:
    # 1 / sqrt(1 + e^{-2x})
    pos = x > 0.0
    xp = np.where(pos, x, 0.0)
    xn = np.where(pos, 0.0, x)
    return np.where(pos, 1.0 / np.sqrt(1.0 + np.exp(-2.0 * xp)), np.exp(xn) / np.sqrt(1.0 + np.exp(2.0 * xn)))


def _darcx_kernel(x: np.ndarray) -> np.ndarray:
    # e^{-2x} (1 + e^{-2x})^{-3/2}
    pos = x > 0.0
    xp = np.where(pos, x, 0.0)
    xn = np.where(pos, 0.0, x)
    qp = np.exp(-2.0 * xp)
    return np.where(pos, qp / (1.0 + qp) ** 1.5, np.exp(xn) / (1.0 + np.exp(2.0 * xn)) ** 1.5)


@dataclass(frozen=True)
class Darcx(Trajectory):
    """Horizon-free worldline ``z(t) = -(xi/nu) asinh(exp(nu t))``.

    The mirror is asymptotically inertial at both ends: at rest on one side
    and moving with speed ``|xi|`` on the other.  The acceleration peaks at
    ``2 |xi nu| / 3^{3/2}`` where ``exp(-2 nu t) = 2``.
    """

    xi: float
    nu: float
    kind: str = field(default="darcx", init=False, repr=False)

    def __post_init__(self) -> None:
        if not (0.0 < abs(self.xi) < 1.0):
            raise TrajectoryError("Darcx requires 0 < |xi| < 1")
        if not (math.isfinite(self.nu) and self.nu != 0.0):
            raise TrajectoryError("Darcx requires a finite nonzero nu")

    @property
    def time_scale(self) -> float:
        return 1.0 / abs(self.nu)

    def position(self, t: ArrayLike):
        x = self.nu * np.asarray(t, float)
        return _out(-(self.xi / self.nu) * _asinh_exp(x), t)

    def velocity(self, t: ArrayLike):
        x = self.nu * np.asarray(t, float)
        return _out(-self.xi * _logistic_root(x), t)

    def acceleration(self, t: ArrayLike):
        x = self.nu * np.asarray(t, float)
        return _out(-self.xi * self.nu * _darcx_kernel(x), t)

    def scaled(self, factor: float) -> "Darcx":
        return Darcx(self.xi, self.nu / factor)


@dataclass(frozen=True)
class Custom(Trajectory):
    """User-defined worldline from a vectorized position function.

    Parameters
    ----------
    position_fn : callable
        ``z(t)``, vectorized over numpy arrays.
    velocity_fn, acceleration_fn : callable, optional
        Exact derivatives; central differences are used when omitted.
    horizon : float, optional
        Advanced time ``v0`` beyond which no ray reaches the mirror.
    name : str
        Label used in output files.
    feature_time : float
        Time over which the velocity changes appreciably; sets the finest
        quadrature panels near the origin.
    """

    position_fn: Callable[[np.ndarray], np.ndarray]
    velocity_fn: Callable[[np.ndarray], np.ndarray] | None = None
    acceleration_fn: Callable[[np.ndarray], np.ndarray] | None = None
    horizon: float | None = None
    name: str = "custom"
    feature_time: float = 1.0
    kind: str = field(default="custom", init=False, repr=False)

    @classmethod
    def static(cls, z0: float = 0.0) -> "Custom":
        """A mirror at rest at ``x = z0``."""
        return cls(
            lambda t: np.full(np.shape(t), float(z0)),
            lambda t: np.zeros(np.shape(t)),
            lambda t: np.zeros(np.shape(t)),
            name="static",
        )

    @classmethod
    def uniform(cls, speed: float, z0: float = 0.0) -> "Custom":
        """A mirror in uniform motion ``z = z0 + speed * t``."""
        if not abs(speed) < 1.0:
            raise TrajectoryError("uniform motion must be subluminal")
        return cls(
            lambda t: z0 + speed * np.asarray(t, float),
            lambda t: np.full(np.shape(t), float(speed)),
            lambda t: np.zeros(np.shape(t)),
            name="uniform",
        )

    @property
    def horizon_v0(self) -> float | None:
        return self.horizon

    @property
    def time_scale(self) -> float:
        return self.feature_time

    def position(self, t: ArrayLike):
        return _out(np.asarray(self.position_fn(np.asarray(t, float)), float), t)

    def _step(self, t: np.ndarray) -> np.ndarray:
        return 1e-5 * np.maximum(1.0, np.abs(t))

    def velocity(self, t: ArrayLike):
        ta = np.asarray(t, float)
        if self.velocity_fn is not None:
            return _out(np.asarray(self.velocity_fn(ta), float), t)
        h = self._step(ta)
        return _out((np.asarray(self.position_fn(ta + h)) - np.asarray(self.position_fn(ta - h))) / (2 * h), t)

    def acceleration(self, t: ArrayLike):
        ta = np.asarray(t, float)
        if self.acceleration_fn is not None:
            return _out(np.asarray(self.acceleration_fn(ta), float), t)
        h = 1e2 * self._step(ta)
        zp = np.asarray(self.velocity(ta + h))
        zm = np.asarray(self.velocity(ta - h))
        return _out((zp - zm) / (2 * h), t)

    def scaled(self, factor: float) -> "Custom":
        f = float(factor)
        vel = self.velocity_fn
        acc = self.acceleration_fn
        return Custom(
            lambda t: f * np.asarray(self.position_fn(np.asarray(t) / f)),
            None if vel is None else (lambda t: np.asarray(vel(np.asarray(t) / f))),
            None if acc is None else (lambda t: np.asarray(acc(np.asarray(t) / f)) / f),
            None if self.horizon is None else f * self.horizon,
            self.name,
            f * self.feature_time,
        )


@dataclass(frozen=True)
class RayMap:
    """One of the two reflection maps of a trajectory.

    ``direction`` is ``"p_of_u"`` for ``v = p(u)`` or ``"f_of_v"`` for
    ``u = f(v)``.  ``method="numeric"`` bypasses closed forms, which is how
    the analytic and root-finding paths are compared.
    """

    direction: Literal["p_of_u", "f_of_v"]
    trajectory: Trajectory
    method: Literal["auto", "numeric"] = "auto"

    def __post_init__(self) -> None:
        if self.direction not in ("p_of_u", "f_of_v"):
            raise TrajectoryError(f"unknown ray-map direction {self.direction!r}")
        if self.method not in ("auto", "numeric"):
            raise TrajectoryError(f"unknown ray-map method {self.method!r}")

    @property
    def horizon_v0(self) -> float | None:
        return self.trajectory.horizon_v0

    def __call__(self, x: ArrayLike):
        traj = self.trajectory
        if self.direction == "p_of_u":
            return traj.ray_p_numeric(x) if self.method == "numeric" else traj.ray_p(x)
        return traj.ray_f_numeric(x) if self.method == "numeric" else traj.ray_f(x)


def position(traj: Trajectory, t: ArrayLike):
    """Mirror position ``z(t)``."""
    return traj.position(t)


def velocity(traj: Trajectory, t: ArrayLike):
    """Mirror velocity ``dz/dt``."""
    return traj.velocity(t)


def acceleration(traj: Trajectory, t: ArrayLike):
    """Coordinate acceleration ``d^2z/dt^2``."""
    return traj.acceleration(t)


def proper_acceleration(traj: Trajectory, t: ArrayLike):
    """Acceleration in the instantaneous rest frame of the mirror."""
    return traj.proper_acceleration(t)


def ray_p(ray_map: RayMap, u: ArrayLike):
    """Evaluate ``v = p(u)`` on a ``p_of_u`` map."""
    if ray_map.direction != "p_of_u":
        raise TrajectoryError("ray_p needs a p_of_u map")
    return ray_map(u)


def ray_f(ray_map: RayMap, v: ArrayLike):
    """Evaluate ``u = f(v)`` on an ``f_of_v`` map."""
    if ray_map.direction != "f_of_v":
        raise TrajectoryError("ray_f needs an f_of_v map")
    return ray_map(v)
