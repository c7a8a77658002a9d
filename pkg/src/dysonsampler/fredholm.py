"""Gap probability det(I - K_N) on L^2(-theta, theta) by Nystrom discretisation."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .orthopoly import RecurrenceTable, kernel_matrix

DEFAULT_ORDER = 64
# allowed disagreement between the m- and 2m-node determinants
DOUBLING_TOL = 1e-9


class InsufficientPrecision(RuntimeError):
    pass


@dataclass(frozen=True)
class GapQuery:
    theta: float
    quad_order: int = DEFAULT_ORDER

    def __post_init__(self):
        if not self.theta > 0:
            raise ValueError("theta must be positive")
        if self.quad_order < 4:
            raise ValueError("quad_order must be >= 4")


def nystrom_determinant(table: RecurrenceTable, theta: float, m: int) -> float:
    x, w = np.polynomial.legendre.leggauss(m)
    x = theta * x
    sw = np.sqrt(theta * w)
    a = np.eye(m) - sw[:, None] * kernel_matrix(table, x) * sw[None, :]
    return float(np.linalg.det(a))


def gap_probability(table: RecurrenceTable, query: GapQuery, check: bool = True) -> float:
    """Probability that no eigenvalue lies in (-theta, theta).

    With ``check`` the determinant is recomputed on twice as many nodes and
    a discrepancy above DOUBLING_TOL raises :class:`InsufficientPrecision`.
    """
    val = nystrom_determinant(table, query.theta, query.quad_order)
    if check:
        fine = nystrom_determinant(table, query.theta, 2 * query.quad_order)
        if abs(fine - val) > DOUBLING_TOL:
            raise InsufficientPrecision(
                f"A({query.theta}) changes by {abs(fine - val):.2e} from {query.quad_order} to "
                f"{2 * query.quad_order} nodes")
    if val < -1e-8 or val > 1 + 1e-8:
        raise InsufficientPrecision(f"determinant {val!r} outside [0, 1]; kernel or table is inaccurate")
    if -1e-10 <= val < 0:
        val = 0.0
    elif 1 < val <= 1 + 1e-10:
        val = 1.0
    return val


def gap_curve(table: RecurrenceTable, thetas, quad_order: int = DEFAULT_ORDER) -> np.ndarray:
    thetas = np.asarray(thetas, dtype=float)
    if np.any(thetas <= 0) or np.any(np.diff(thetas) <= 0):
        raise ValueError("thetas must be positive and increasing")
    vals = np.array([gap_probability(table, GapQuery(float(t), quad_order)) for t in thetas])
    if np.any(np.diff(vals) > 1e-10):
        raise InsufficientPrecision("gap probability is not monotone in theta")
    return vals
