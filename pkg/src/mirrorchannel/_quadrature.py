"""Panel quadrature and extrapolation helpers shared by the coefficient modules."""

from __future__ import annotations

from functools import lru_cache

import numpy as np


@lru_cache(maxsize=32)
def gauss_legendre(order: int) -> tuple[np.ndarray, np.ndarray]:
    """Nodes and weights of the ``order``-point rule on ``[0, 1]``."""
    x, w = np.polynomial.legendre.leggauss(order)
    return 0.5 * (x + 1.0), 0.5 * w


def panel_rule(edges: np.ndarray, order: int = 16) -> tuple[np.ndarray, np.ndarray]:
    """Composite Gauss-Legendre rule on consecutive panels.

    Parameters
    ----------
    edges : ndarray
        Increasing panel boundaries.
    order : int
        Nodes per panel.

    Returns
    -------
    nodes, weights : ndarray
        Flattened nodes and weights.
    """
    x, w = gauss_legendre(order)
    a = edges[:-1, None]
    h = np.diff(edges)[:, None]
    return (a + h * x).ravel(), (h * w).ravel()


def edges_from_density(grid: np.ndarray, density: np.ndarray, min_panels: int = 1) -> np.ndarray:
    """Panel edges such that each panel holds about one unit of ``density``.

    ``density`` is sampled on ``grid`` and integrated with the trapezoid
    rule; panel edges are placed where the running integral crosses
    integers.
    """
    cum = np.concatenate(([0.0], np.cumsum(0.5 * (density[1:] + density[:-1]) * np.diff(grid))))
    count = max(int(np.ceil(cum[-1])), min_panels)
    levels = np.linspace(0.0, cum[-1], count + 1)
    edges = np.interp(levels, cum, grid)
    edges[0], edges[-1] = grid[0], grid[-1]
    return edges


def richardson(values: np.ndarray, ratio: float = 2.0) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Richardson table for a sequence computed at steps ``h, h/r, h/r^2, ...``.

    Assumes an error expansion in integer powers of the step.

    Parameters
    ----------
    values : ndarray
        Shape ``(m, ...)``; row ``k`` is the estimate at step ``h / r^k``.
    ratio : float
        Step reduction factor ``r``.

    Returns
    -------
    best : ndarray
        Fully extrapolated estimate.
    error : ndarray
        Difference between the last two diagonal entries, a conservative
        error estimate.
    diagonal : ndarray
        All diagonal entries of the table, shape ``(m, ...)``.
    """
    table = [np.asarray(v, dtype=complex) for v in values]
    diagonal = [table[-1]]
    for m in range(1, len(table)):
        factor = ratio**m
        table = [(factor * table[k + 1] - table[k]) / (factor - 1.0) for k in range(len(table) - 1)]
        diagonal.append(table[-1])
    best = diagonal[-1]
    error = np.abs(diagonal[-1] - diagonal[-2]) if len(diagonal) > 1 else np.full(np.shape(best), np.inf)
    return best, error, np.asarray(diagonal)
