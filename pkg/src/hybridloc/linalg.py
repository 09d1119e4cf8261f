"""Small dense helpers for the 3x3 normal equations."""

from __future__ import annotations

import numpy as np

from .errors import SingularSystem

RCOND_TOL = 1e-12


def condition_number(a: np.ndarray) -> float:
    """2-norm condition number; ``inf`` for an exactly singular matrix."""
    with np.errstate(divide="ignore"):
        return float(np.linalg.cond(a))


def check_conditioning(a: np.ndarray, tol: float = RCOND_TOL, what: str = "matrix", exc=SingularSystem) -> float:
    cond = condition_number(a)
    if not np.isfinite(cond) or 1.0 / cond < tol:
        raise exc(f"{what} is numerically singular (condition number {cond:.3e})")
    return cond


def symmetrize(a: np.ndarray) -> np.ndarray:
    return 0.5 * (a + a.T)


def row_equilibration(m: np.ndarray) -> np.ndarray:
    """Diagonal weight ``1 / ||row||^2`` that brings every row of ``m`` to unit norm."""
    return np.diag(1.0 / np.einsum("ij,ij->i", m, m))


def information_inverse(m: np.ndarray, q: np.ndarray, tol: float = RCOND_TOL) -> np.ndarray:
    """Return ``(M^T Q^-1 M)^-1`` for diagonal PSD ``Q``.

    With positive definite ``Q`` this is the textbook normal-equation inverse.
    When some variance is zero the information is infinite along that
    direction and the expression is taken at its limit ``M^-1 Q M^-T``, which
    is only defined because ``M`` is square here.
    """
    var = np.diag(q)
    if np.all(var > 0.0):
        info = m.T @ (m / var[:, None])
        check_conditioning(info, tol, "information matrix")
        return symmetrize(np.linalg.inv(info))
    check_conditioning(m, tol, "Jacobian")
    m_inv = np.linalg.inv(m)
    return symmetrize(m_inv @ q @ m_inv.T)
