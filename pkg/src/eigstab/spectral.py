"""Lowest eigenpairs of -Lap + V on a grid.

The discretized operator is tridiagonal (plus an optional rank-one term,
used by the linearization module).  Pure tridiagonal problems go through
LAPACK bisection + inverse iteration, which cannot be fooled by clusters
of nearly degenerate low eigenvalues.  With a rank-one term the pairs
come from shift-invert Lanczos, with the shift placed strictly below the
spectrum so the magnitude ordering matches the eigenvalue ordering;
shifted solves use banded LU plus the Sherman-Morrison formula.
Everything is deterministic for fixed inputs.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg as sla
import scipy.sparse.linalg as spla

from .exceptions import ConvergenceError, DegenerateInputError
from .grid import (
    Grid,
    GridFunction,
    gradient_squared_integral,
    symmetric_tridiagonal,
)

ITERATION_CAP = 10_000
DEFAULT_TOL = 1e-10


@dataclass(frozen=True)
class EigenPair:
    lam: float
    psi: GridFunction       # L2-normalized, sign-fixed positive at max |psi|
    residual: float
    iterations: int


class _TridiagRank1:
    """Symmetric tridiagonal matrix plus an optional rank-one term."""

    def __init__(self, diag, off, rank1=None):
        self.diag = np.asarray(diag, dtype=float)
        self.off = np.asarray(off, dtype=float)
        self.n = self.diag.size
        self.rank1 = None
        if rank1 is not None:
            rho, u = rank1
            self.rank1 = (float(rho), np.asarray(u, dtype=float))

    @property
    def opnorm(self) -> float:
        bound = np.abs(self.diag).copy()
        bound[:-1] += np.abs(self.off)
        bound[1:] += np.abs(self.off)
        top = float(bound.max())
        if self.rank1 is not None:
            rho, u = self.rank1
            top += abs(rho) * float(u @ u)
        return top

    def matvec(self, v):
        out = self.diag * v
        out[:-1] += self.off * v[1:]
        out[1:] += self.off * v[:-1]
        if self.rank1 is not None:
            rho, u = self.rank1
            out += rho * (u @ v) * u
        return out

    def lower_bound(self) -> float:
        lb = self.diag.copy()
        lb[:-1] -= np.abs(self.off)
        lb[1:] -= np.abs(self.off)
        lb = float(lb.min())
        if self.rank1 is not None:
            rho, u = self.rank1
            if rho < 0.0:
                lb += rho * float(u @ u)
        return lb

    def solve_shifted(self, sigma, rhs):
        """(A - sigma I)^(-1) rhs via banded LU and Sherman-Morrison."""
        ab = np.zeros((3, self.n))
        ab[0, 1:] = self.off
        ab[1] = self.diag - sigma
        ab[2, :-1] = self.off
        if self.rank1 is None:
            return sla.solve_banded((1, 1), ab, rhs)
        rho, u = self.rank1
        stacked = sla.solve_banded((1, 1), ab, np.column_stack([rhs, u]))
        y, z = stacked[:, 0], stacked[:, 1]
        denom = 1.0 + rho * (u @ z)
        return y - (rho * (u @ y) / denom) * z


def smallest_eigenpairs(
    diag,
    off,
    k: int = 1,
    rank1=None,
    tol: float = DEFAULT_TOL,
    maxiter: int = ITERATION_CAP,
):
    """k smallest eigenpairs of a symmetric tridiagonal (+ rank-one) matrix.

    Returns (eigs, vecs, residuals, iterations) with vecs of shape (n, k),
    orthonormal columns, eigenvalues in ascending order.  Pure tridiagonal
    matrices go through LAPACK bisection + inverse iteration; a rank-one
    term is handled by shift-invert Lanczos with the shift below the
    spectrum and Sherman-Morrison solves.  ``tol`` is a residual target,
    floored at the rounding level 50 * eps * ||A||, which is unreachable
    below for large grids.
    """
    A = _TridiagRank1(diag, off, rank1)
    tol_eff = max(tol, 50.0 * np.finfo(float).eps * A.opnorm)

    if A.rank1 is None:
        eigs, vecs = sla.eigh_tridiagonal(
            A.diag, A.off, select="i", select_range=(0, k - 1)
        )
        iterations = k
    else:
        # the rank-one term is PSD (rho > 0) in every use here, so the
        # tridiagonal part bounds the modified spectrum from below
        lam_t = sla.eigh_tridiagonal(
            A.diag, A.off, select="i", select_range=(0, 0), eigvals_only=True
        )[0]
        rho, u = A.rank1
        lb = lam_t if rho >= 0.0 else lam_t + rho * float(u @ u)
        sigma = lb - max(1e-8 * A.opnorm, 1e-8)
        lin = spla.LinearOperator((A.n, A.n), matvec=A.matvec, dtype=float)
        opinv = spla.LinearOperator(
            (A.n, A.n), matvec=lambda b: A.solve_shifted(sigma, b), dtype=float
        )
        v0 = np.exp(-4.0 * np.linspace(0.0, 1.0, A.n))
        eigs, vecs = spla.eigsh(
            lin,
            k=k,
            sigma=sigma,
            OPinv=opinv,
            which="LM",
            v0=v0,
            maxiter=maxiter,
            tol=0,
        )
        iterations = maxiter  # ARPACK does not report its iteration count
        order = np.argsort(eigs)
        eigs, vecs = eigs[order].copy(), vecs[:, order].copy()
        # one inverse-iteration polish per pair: ARPACK residuals in
        # shift-invert mode sit a little above rounding level
        for j in range(k):
            v = vecs[:, j]
            try:
                y = A.solve_shifted(eigs[j], v)
            except np.linalg.LinAlgError:
                continue
            ny = np.linalg.norm(y)
            if not np.isfinite(ny) or ny == 0.0:
                continue
            v = y / ny
            eigs[j] = float(v @ A.matvec(v))
            vecs[:, j] = v

    residuals = np.array(
        [np.linalg.norm(A.matvec(vecs[:, j]) - eigs[j] * vecs[:, j]) for j in range(k)]
    )
    worst = float(residuals.max())
    if worst > tol_eff:
        raise ConvergenceError(
            f"eigensolve residual {worst:.3e} exceeds target {tol_eff:.3e}",
            best=vecs,
            residual=worst,
        )
    return np.asarray(eigs, dtype=float), vecs, residuals, iterations


def rayleigh_quotient(psi: GridFunction, V: GridFunction) -> float:
    """(int |grad psi|^2 + int V psi^2) / int psi^2."""
    w = psi.grid.quad_weights
    denom = float(w @ psi.values**2)
    if denom == 0.0:
        raise DegenerateInputError("rayleigh_quotient of the zero function")
    kinetic = gradient_squared_integral(psi)
    potential = float(w @ (V.values * psi.values**2))
    return (kinetic + potential) / denom


def lowest_eigenpair(
    V: GridFunction, ell: int = 0, tol: float = DEFAULT_TOL
) -> EigenPair:
    """Ground state of -Lap_ell + V on V's grid."""
    grid = V.grid
    diag, off = symmetric_tridiagonal(grid, ell, V.values)
    eigs, vecs, residuals, iters = smallest_eigenpairs(diag, off, k=1, tol=tol)
    w = grid.quad_weights
    psi_vals = vecs[:, 0] / np.sqrt(w)
    # normalize in the quadrature L2 norm and fix the sign
    psi_vals /= np.sqrt(w @ psi_vals**2)
    peak = np.argmax(np.abs(psi_vals))
    if psi_vals[peak] < 0.0:
        psi_vals = -psi_vals
    return EigenPair(
        lam=float(eigs[0]),
        psi=GridFunction(grid, psi_vals),
        residual=float(residuals[0]),
        iterations=iters,
    )


def lambda_of_potential(V: GridFunction, tol: float = DEFAULT_TOL) -> float:
    """min(0, lowest eigenvalue): the eigenvalue functional, clamped to 0
    when the discrete minimum is positive."""
    return min(0.0, lowest_eigenpair(V, 0, tol).lam)
