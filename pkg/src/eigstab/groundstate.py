"""The constrained minimization for the optimal profile Q.

Minimizes  int |grad psi|^2 - (int |psi|^q)^(2/q)  over unit-L2 radial
functions.  The minimizer Q solves

    -Lap Q - ||Q||_q^(2-q) Q^(q-1) = E Q,        int Q^2 = 1,

with E < 0 the minimum value.  From E the two sharp constants follow:
the eigenvalue-ratio constant C' = -E and the interpolation-inequality
constant S via the scaling identity

    C' = theta^(1/(1-theta)) (1-theta) S^(-1/(1-theta)).

In d = 1 the minimizer has the closed form A sech^(2/(q-2))(kappa x);
see :func:`keller_profile`.

Virial identity
---------------
Multiplying the profile equation by Q and integrating gives
T - N = E with T = int |grad Q|^2 and N = ||Q||_q^2.  Multiplying by
x . grad Q and integrating by parts (Pohozaev) gives
((d-2)/2) T = d (N/q + E/2).  Eliminating T:

    N = 2 q E / ((d-2) q - 2 d),   i.e.  ||Q||_q = sqrt(2q|E| / (2d - (d-2)q)),

which is positive in the subcritical range.  ``virial_norm_check``
compares the solver's ||Q||_q against this value.
"""

from __future__ import annotations

import json
import math
import warnings
from dataclasses import dataclass

import numpy as np
import scipy.linalg as sla
from scipy.special import gamma as gamma_fn

from .exceptions import (
    ConvergenceError,
    DegenerateInputError,
    InvalidExponentError,
    PreconditionError,
    UnsupportedShiftError,
)
from .grid import (
    Grid,
    GridFunction,
    gradient_squared_integral,
    laplacian_apply,
    laplacian_tridiagonal,
    norm_l2,
    norm_lp,
    symmetric_tridiagonal,
)
from .spectral import smallest_eigenpairs


# ---------------------------------------------------------------------------
# exponent bookkeeping
# ---------------------------------------------------------------------------

def _check_gamma_range(gamma: float, d: int) -> None:
    if d < 1:
        raise InvalidExponentError("dimension must be >= 1")
    if d == 1 and gamma <= 0.5:
        raise InvalidExponentError(f"d = 1 needs gamma > 1/2, got {gamma}")
    if d >= 2 and gamma <= 0.0:
        raise InvalidExponentError(f"d >= 2 needs gamma > 0, got {gamma}")


@dataclass(frozen=True)
class Exponents:
    """The tied exponents: p = gamma + d/2, q its dual partner via
    1/p + 2/q = 1, and the interpolation weight theta = d(q-2)/(2q)."""

    gamma: float
    d: int
    p: float
    q: float
    theta: float

    @classmethod
    def from_gamma(cls, gamma: float, d: int) -> "Exponents":
        _check_gamma_range(gamma, d)
        p = gamma + d / 2.0
        q = 2.0 * p / (p - 1.0)
        if d >= 3 and q >= 2.0 * d / (d - 2.0):
            raise InvalidExponentError(
                f"q = {q} is supercritical for d = {d}"
            )
        theta = d * (q - 2.0) / (2.0 * q)
        return cls(gamma=gamma, d=d, p=p, q=q, theta=theta)

    @classmethod
    def from_q(cls, q: float, d: int) -> "Exponents":
        if q <= 2.0:
            raise InvalidExponentError(f"need q > 2, got {q}")
        p = q / (q - 2.0)
        return cls.from_gamma(p - d / 2.0, d)


def exponents_from_gamma(gamma: float, d: int) -> Exponents:
    return Exponents.from_gamma(gamma, d)


# ---------------------------------------------------------------------------
# energy functional
# ---------------------------------------------------------------------------

def gns_energy(psi: GridFunction, q: float) -> float:
    """int |grad psi|^2 - (int |psi|^q)^(2/q)."""
    return gradient_squared_integral(psi) - norm_lp(psi, q) ** 2


# ---------------------------------------------------------------------------
# d = 1 closed form
# ---------------------------------------------------------------------------

def _sech_integral(m: float) -> float:
    """int_R sech^m(u) du = sqrt(pi) Gamma(m/2) / Gamma((m+1)/2)."""
    return float(math.sqrt(math.pi) * gamma_fn(m / 2.0) / gamma_fn((m + 1.0) / 2.0))


def keller_parameters(q: float):
    """(amplitude A, rate kappa, eigenvalue E) of the d = 1 profile
    A sech^(2/(q-2))(kappa x).

    Substituting the ansatz into the profile equation matches the
    sech^(beta+2) terms (beta = 2/(q-2)) and yields

        E = -beta^2 kappa^2,
        ||Q||_q^(2-q) A^(q-2) = beta (beta+1) kappa^2,

    while the L2 constraint gives A^2 I_{2 beta} = kappa, where I_m is
    the full-line integral of sech^m.  Eliminating A gives kappa in
    closed form.
    """
    if q <= 2.0:
        raise InvalidExponentError(f"need q > 2, got {q}")
    beta = 2.0 / (q - 2.0)
    i_q = _sech_integral(beta * q)
    kappa = (beta * (beta + 1.0) * i_q ** ((q - 2.0) / q)) ** (-q / (q + 2.0))
    amp = math.sqrt(kappa / _sech_integral(2.0 * beta))
    energy = -(beta**2) * kappa**2
    return amp, kappa, energy


def keller_profile(q: float, x) -> np.ndarray | float:
    """The normalized d = 1 minimizer evaluated at x (scalar or array)."""
    amp, kappa, _ = keller_parameters(q)
    beta = 2.0 / (q - 2.0)
    return amp * np.cosh(kappa * np.asarray(x, dtype=float)) ** (-beta)


# ---------------------------------------------------------------------------
# the solver
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class GroundState:
    Q: GridFunction
    E: float
    q: float
    d: int
    norm_q: float
    C_prime: float
    S: float
    el_residual: float

    @property
    def grid(self) -> Grid:
        return self.Q.grid

    def to_json(self) -> str:
        return json.dumps(
            {
                "q": self.q,
                "d": self.d,
                "E": f"{self.E:.17g}",
                "C_prime": f"{self.C_prime:.17g}",
                "S": f"{self.S:.17g}",
                "norm_q": f"{self.norm_q:.17g}",
                "el_residual": f"{self.el_residual:.17g}",
                "grid": self.grid.metadata(),
                "Q": [f"{v:.17g}" for v in self.Q.values],
            }
        )

    @classmethod
    def from_json(cls, text: str) -> "GroundState":
        doc = json.loads(text)
        grid = Grid.from_metadata(doc["grid"])
        return cls(
            Q=GridFunction(grid, np.array([float(v) for v in doc["Q"]])),
            E=float(doc["E"]),
            q=float(doc["q"]),
            d=int(doc["d"]),
            norm_q=float(doc["norm_q"]),
            C_prime=float(doc["C_prime"]),
            S=float(doc["S"]),
            el_residual=float(doc["el_residual"]),
        )


def _el_residual(grid, psi, energy, coupling, q):
    """Weighted L2 norm of -Lap Q - c Q^(q-1) - E Q."""
    f = GridFunction(grid, psi)
    res = laplacian_apply(f).values - coupling * psi ** (q - 1.0) - energy * psi
    return float(np.sqrt(grid.quad_weights @ res**2))


def interpolation_constant_from_c_prime(c_prime: float, theta: float) -> float:
    """Invert the scaling identity: S = theta ((1-theta)/C')^(1-theta)."""
    return float(theta * ((1.0 - theta) / c_prime) ** (1.0 - theta))


def _petviashvili(grid: Grid, q: float, maxiter: int = 500) -> np.ndarray:
    """Positive solution of the parameter-free equation -Lap u + u = u^(q-1).

    Fixed-point iteration u <- gamma^alpha (-Lap + 1)^(-1) u^(q-1) with
    the stabilizing factor gamma = <(-Lap+1)u, u> / <u^(q-1), u> and
    alpha = (q-1)/(q-2), which contracts toward the ground state from any
    localized positive start.
    """
    w = grid.quad_weights
    r = grid.nodes
    main, upper, lower = laplacian_tridiagonal(grid, 0)
    ab = np.zeros((3, grid.n))
    ab[0, 1:] = upper
    ab[1] = main + 1.0
    ab[2, :-1] = lower
    alpha = (q - 1.0) / (q - 2.0)
    u = 2.0 * np.exp(-(r**2) / 2.0)
    scale = float(np.abs(main).max()) + 1.0
    target = 1e-12 * scale
    for _ in range(maxiter):
        mu = main * u
        mu[:-1] += upper * u[1:]
        mu[1:] += lower * u[:-1]
        mu += u
        rhs = u ** (q - 1.0)
        num = float(w @ (mu * u))
        den = float(w @ (rhs * u))
        if den <= 0.0 or not np.isfinite(den):
            raise ConvergenceError("profile iteration degenerated")
        gamma = num / den
        u = gamma**alpha * sla.solve_banded((1, 1), ab, rhs)
        u = np.maximum(u, 0.0)
        res = float(np.sqrt(w @ (mu - gamma * rhs) ** 2))
        if res <= target and abs(gamma - 1.0) < 1e-12:
            break
    return u


def solve_ground_state(
    q: float,
    d: int,
    grid: Grid,
    tol: float = 1e-10,
    max_scf: int = 200,
) -> GroundState:
    """Solve the constrained minimization on a radial grid.

    Two phases: a Petviashvili iteration on the parameter-free profile
    equation fixes the shape and width of the minimizer (a normalized
    gradient flow is not reliable here: above the mass-critical exponent
    q = 2 + 4/d it can spread out instead of localizing), then a
    self-consistent polish repeatedly takes the ground state of the
    linearized operator -Lap - ||psi||_q^(2-q) psi^(q-2) until the
    profile-equation residual drops below tol (floored at the rounding
    level of the grid).
    """
    exps = Exponents.from_q(q, d)
    if grid.kind != "radial" or grid.dim != d:
        raise PreconditionError("solve_ground_state needs a radial grid of dimension d")
    w = grid.quad_weights
    r = grid.nodes
    h = grid.spacing

    # rescale the parameter-free solution u to unit L2 mass: with
    # mq = int u^q, the constrained minimizer is s^(d/2) u(s r) / sqrt(m2)
    # up to normalization, where s^2 = |E| = mq^(-2(q-2)/(2q - d(q-2)))
    u = _petviashvili(grid, q)
    mq = float(w @ u**q)
    s = mq ** (-(q - 2.0) / (2.0 * q - d * (q - 2.0)))
    psi = np.interp(s * r, r, u, right=0.0)
    nrm = math.sqrt(w @ psi**2)
    if nrm == 0.0 or not np.isfinite(nrm):
        raise ConvergenceError("profile initialization collapsed")
    psi /= nrm

    # -- self-consistent polish ---------------------------------------
    scale = 2.0 / h**2
    tol_eff = max(tol, 200.0 * np.finfo(float).eps * scale)
    energy = coupling = None
    residual = np.inf
    for _ in range(max_scf):
        nq = _weighted_lp(w, psi, q)
        coupling = nq ** (2.0 - q)
        Veff = -coupling * psi ** (q - 2.0)
        diag, off = symmetric_tridiagonal(grid, 0, Veff)
        eigs, vecs, _, _ = smallest_eigenpairs(diag, off, k=1, tol=tol)
        new = vecs[:, 0] / np.sqrt(w)
        new = np.abs(new)
        new /= math.sqrt(w @ new**2)
        psi = new
        energy = float(eigs[0])
        residual = _el_residual(grid, psi, energy, coupling, q)
        if residual <= tol_eff:
            break
    if residual > tol_eff:
        raise ConvergenceError(
            f"profile solve stalled at residual {residual:.3e}",
            best=GridFunction(grid, psi),
            residual=residual,
        )
    if energy >= 0.0:
        raise ConvergenceError("profile solve converged to E >= 0", residual=residual)

    if psi[-1] > 1e-8 * psi[0]:
        warnings.warn(
            "profile has not decayed at r = L; enlarge the domain",
            stacklevel=2,
        )

    norm_q = _weighted_lp(w, psi, q)
    c_prime = -energy
    s_const = interpolation_constant_from_c_prime(c_prime, exps.theta)
    return GroundState(
        Q=GridFunction(grid, psi),
        E=energy,
        q=q,
        d=d,
        norm_q=norm_q,
        C_prime=c_prime,
        S=s_const,
        el_residual=residual,
    )


def _weighted_lp(w, vals, p):
    return float((w @ np.abs(vals) ** p) ** (1.0 / p))


# ---------------------------------------------------------------------------
# derived objects
# ---------------------------------------------------------------------------

def profile_interpolant(gs: GroundState):
    """Callable Q(r) for r >= 0, cubic off-node, 0 beyond the grid."""
    from scipy.interpolate import CubicSpline

    r = gs.grid.nodes
    spline = CubicSpline(r, gs.Q.values, bc_type="natural", extrapolate=False)
    r0, rmax = r[0], r[-1]
    q0 = gs.Q.values[0]

    def evaluate(x):
        x = np.abs(np.asarray(x, dtype=float))
        out = np.where(x <= rmax, np.nan_to_num(spline(np.minimum(x, rmax))), 0.0)
        # flat (even) continuation below the first node
        out = np.where(x < r0, q0, out)
        return np.clip(out, 0.0, None)

    return evaluate


def optimal_potential(
    gs: GroundState, b: float = 1.0, a: float = 0.0, grid: Grid | None = None
) -> GridFunction:
    """A member of the optimal family: W(x) = -b^2 (Q(b(x-a))/||Q||_q)^(q-2).

    With b = 1, a = 0 on the solver's own grid this uses the nodal values
    directly, so the profile equation makes Q the exact discrete ground
    state of -Lap + W with eigenvalue E.
    """
    if b <= 0.0:
        raise PreconditionError("scale b must be positive")
    target = grid if grid is not None else gs.grid
    if target.kind == "radial" and a != 0.0:
        raise UnsupportedShiftError("radial grids only support a = 0")
    qm2 = gs.q - 2.0
    if target is gs.grid and b == 1.0 and a == 0.0:
        vals = -((gs.Q.values / gs.norm_q) ** qm2)
        return GridFunction(target, vals)
    prof = profile_interpolant(gs)
    x = target.nodes
    arg = b * np.abs(x - a) if target.kind == "line" else b * x
    vals = -(b**2) * (prof(arg) / gs.norm_q) ** qm2
    return GridFunction(target, vals)


@dataclass(frozen=True)
class KellerConstant:
    """The sharp eigenvalue-ratio constant computed two ways."""

    value: float            # from -E
    eigen_route: float      # |lambda(W)| / (int W_-^p)^(1/gamma) at W = W(Q)
    mismatch: float         # relative difference of the two routes


def keller_constant(gamma: float, d: int, gs: GroundState) -> KellerConstant:
    from .spectral import lowest_eigenpair

    exps = Exponents.from_gamma(gamma, d)
    if abs(exps.q - gs.q) > 1e-12 or d != gs.d:
        raise InvalidExponentError(
            f"profile solved for q = {gs.q}, d = {gs.d}; "
            f"gamma = {gamma}, d = {d} implies q = {exps.q}"
        )
    route1 = gs.C_prime
    W = optimal_potential(gs, 1.0, 0.0)
    lam = lowest_eigenpair(W, 0).lam
    wneg = GridFunction(gs.grid, np.maximum(-W.values, 0.0))
    denom = norm_lp(wneg, exps.p) ** (exps.p / gamma)
    route2 = abs(lam) / denom
    mismatch = abs(route1 - route2) / route1
    return KellerConstant(value=route1, eigen_route=route2, mismatch=mismatch)


def virial_norm_check(gs: GroundState):
    """(measured ||Q||_q, value predicted by the virial identity)."""
    q, d = gs.q, gs.d
    predicted = math.sqrt(2.0 * q * abs(gs.E) / (2.0 * d - (d - 2.0) * q))
    return gs.norm_q, predicted
