"""Eigenvalue deficit, distance to the optimal-potential manifold, and
stability ratios.

The manifold M consists of the potentials W(x) = -b^2 V0(b(x-a)) with
V0 = (Q/||Q||_q)^(q-2), which saturate the sharp bound

    |lambda(V)| <= C (int V_-^p)^(1/gamma),        p = gamma + d/2.

``deficit`` measures how far a given V is from saturation;
``distance_to_manifold`` measures how far V_- is from the family in the
branch-appropriate norm, with the scale b eliminated by norm matching and
only the shift a searched; ``stability_report`` combines the two into the
empirical stability ratio deficit / (C * distance^2).  All quotients are
invariant under V -> b^2 V(b x) and translations.
"""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass

import numpy as np

from .exceptions import (
    DegenerateInputError,
    PreconditionError,
)
from .grid import (
    Grid,
    GridFunction,
    gradient_squared_integral,
    norm_lp,
)
from .groundstate import Exponents, GroundState, profile_interpolant
from .spectral import lowest_eigenpair

#: distances below this leave empirical_c undefined (division by ~0)
DISTANCE_FLOOR = 1e-6

#: how sloppy the supplied ground state may be in deficit_decomposition
RAYLEIGH_RESIDUAL_CAP = 1e-6


def negative_part(V: GridFunction) -> GridFunction:
    """V_- >= 0 with V = V_+ - V_-."""
    return GridFunction(V.grid, np.maximum(-V.values, 0.0))


def _require_attractive(vneg: GridFunction) -> None:
    if not vneg.values.any():
        raise DegenerateInputError("V_- vanishes identically; the ratio is 0/0")


def _check_compatible(V: GridFunction, gamma: float, d: int, gs: GroundState) -> Exponents:
    exps = Exponents.from_gamma(gamma, d)
    if abs(exps.q - gs.q) > 1e-12 or gs.d != d:
        raise PreconditionError(
            f"profile solved for q = {gs.q}, d = {gs.d}; "
            f"gamma = {gamma}, d = {d} implies q = {exps.q}"
        )
    if V.grid.kind == "line" and d != 1:
        raise PreconditionError("line-grid potentials are one-dimensional")
    if V.grid.kind == "radial" and V.grid.dim != d:
        raise PreconditionError("potential grid dimension does not match d")
    return exps


def eigenvalue_ratio(V: GridFunction, gamma: float, d: int, gs: GroundState) -> float:
    """|lambda(V)| / (int V_-^p)^(1/gamma), the quantity C bounds."""
    exps = _check_compatible(V, gamma, d, gs)
    vneg = negative_part(V)
    _require_attractive(vneg)
    lam = min(0.0, lowest_eigenpair(V, 0).lam)
    denom = norm_lp(vneg, exps.p) ** (exps.p / gamma)
    return abs(lam) / denom


def deficit(V: GridFunction, gamma: float, d: int, gs: GroundState) -> float:
    """C - |lambda(V)| (int V_-^p)^(-1/gamma); nonnegative up to rounding."""
    return gs.C_prime - eigenvalue_ratio(V, gamma, d, gs)


# ---------------------------------------------------------------------------
# distance to the manifold
# ---------------------------------------------------------------------------


def _base_profile(gs: GroundState):
    """Callable V0_-(r) = (Q(r)/||Q||_q)^(q-2) of the unit-scale member."""
    prof = profile_interpolant(gs)
    qm2 = gs.q - 2.0

    def v0neg(r):
        return (prof(r) / gs.norm_q) ** qm2

    return v0neg


def _matched_scale(vneg: GridFunction, exps: Exponents, gs: GroundState, power: bool) -> float:
    """Scale b fixed by norm matching against the unit-scale member.

    power=False matches ||W_-||_p (the low branch); power=True matches
    ||W_-^(2/(q-2))||_(q/2) (the high branch).  Both reduce to closed-form
    power laws because the family scales exactly.
    """
    base = GridFunction(gs.grid, (gs.Q.values / gs.norm_q) ** (gs.q - 2.0))
    p, q, d = exps.p, exps.q, exps.d
    if not power:
        # ||b^2 V0(b .)||_p = b^(2 - d/p) ||V0||_p
        target = norm_lp(vneg, p)
        ref = norm_lp(base, p)
        return (target / ref) ** (p / (2.0 * p - d))
    # ||(b^2 V0(b .))^(2/(q-2))||_(q/2) = b^(4/(q-2) - 2d/q) * ref
    alpha = 4.0 / (q - 2.0) - 2.0 * d / q
    two_qm2 = 2.0 / (q - 2.0)
    target = norm_lp(GridFunction(vneg.grid, vneg.values**two_qm2), q / 2.0)
    ref = norm_lp(GridFunction(gs.grid, base.values**two_qm2), q / 2.0)
    return (target / ref) ** (1.0 / alpha)


def _family_neg(
    gs: GroundState, grid: Grid, b: float, a: float, v0=None
) -> np.ndarray:
    """Nodal values of W_- for the member with parameters (b, a)."""
    if v0 is None:
        v0 = _base_profile(gs)
    x = grid.nodes
    arg = b * np.abs(x - a) if grid.kind == "line" else b * x
    return b**2 * v0(arg)


def _distance_objective(vneg_vals, w_vals, weights, exps: Exponents, power: bool, denom: float) -> float:
    if power:
        two_qm2 = 2.0 / (exps.q - 2.0)
        diff = np.abs(vneg_vals**two_qm2 - w_vals**two_qm2)
        pnorm = exps.q / 2.0
    else:
        diff = np.abs(vneg_vals - w_vals)
        pnorm = exps.p
    m = diff.max()
    if m == 0.0:
        return 0.0
    return float(m * (weights @ (diff / m) ** pnorm) ** (1.0 / pnorm)) / denom


def _scan_shift(vneg: GridFunction, gs: GroundState, b: float, exps: Exponents, power: bool, denom: float):
    """Minimize the distance over the shift a: coarse node scan (step 4h)
    plus one three-point parabolic refinement.  Radial grids are centered
    by construction, so a = 0 there."""
    grid = vneg.grid
    v0 = _base_profile(gs)
    if grid.kind == "radial":
        w_vals = _family_neg(gs, grid, b, 0.0, v0)
        return _distance_objective(vneg.values, w_vals, grid.quad_weights, exps, power, denom), 0.0

    h = grid.spacing
    shifts = grid.nodes[:: 4]

    def obj(a):
        return _distance_objective(
            vneg.values, _family_neg(gs, grid, b, a, v0), grid.quad_weights, exps, power, denom
        )

    vals = np.array([obj(a) for a in shifts])
    i = int(np.argmin(vals))
    a0 = shifts[i]
    step = 4.0 * h

    # parabolic refinement on the winning bracket, two rounds
    best_a, best_v = a0, float(vals[i])
    for _ in range(2):
        fl, fr = obj(best_a - step), obj(best_a + step)
        denom_p = fl - 2.0 * best_v + fr
        if denom_p <= 0.0:
            step /= 4.0
            continue
        shift = 0.5 * step * (fl - fr) / denom_p
        shift = float(np.clip(shift, -step, step))
        cand = best_a + shift
        cv = obj(cand)
        if cv < best_v:
            best_a, best_v = cand, cv
        step /= 4.0
    return best_v, float(best_a)


def distance_to_manifold(V: GridFunction, gamma: float, d: int, gs: GroundState):
    """Normalized distance from V_- to the manifold, with matched (a, b).

    Low branch (p <= 2): inf_a ||V_- - W_-||_p / ||V_-||_p with b fixed by
    ||W_-||_p = ||V_-||_p.  High branch (p >= 2): the same for the
    (2/(q-2))-power map in L^(q/2).  Returns (distance, a, b).
    """
    exps = _check_compatible(V, gamma, d, gs)
    vneg = negative_part(V)
    _require_attractive(vneg)
    power = exps.p > 2.0
    b = _matched_scale(vneg, exps, gs, power)
    if power:
        two_qm2 = 2.0 / (exps.q - 2.0)
        denom = norm_lp(GridFunction(vneg.grid, vneg.values**two_qm2), exps.q / 2.0)
    else:
        denom = norm_lp(vneg, exps.p)
    dist, a = _scan_shift(vneg, gs, b, exps, power, denom)
    return dist, a, b


# ---------------------------------------------------------------------------
# the report
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class StabilityReport:
    gamma: float
    d: int
    p: float
    q: float
    lam: float
    ratio: float
    deficit: float
    branch: str              # "low" (p <= 2) or "high" (p >= 2)
    distance: float
    matched_a: float
    matched_b: float
    empirical_c: float | None
    transfer_distance: float | None  # L^p distance, populated when p >= 2
    transfer_ratio: float | None     # deficit / (C * transfer^(2 gamma + d - 2))
    trans_lhs: float | None          # p^-1 (||V_- - W_-||_p / 2)^(p-1)
    trans_rhs: float | None          # power-map distance at the p-matched W

    def to_json(self) -> str:
        def fmt(v):
            return None if v is None else f"{v:.17g}"

        return json.dumps(
            {
                "gamma": self.gamma,
                "d": self.d,
                "p": self.p,
                "q": self.q,
                "lambda": fmt(self.lam),
                "ratio": fmt(self.ratio),
                "deficit": fmt(self.deficit),
                "branch": self.branch,
                "distance": fmt(self.distance),
                "matched_a": fmt(self.matched_a),
                "matched_b": fmt(self.matched_b),
                "empirical_c": fmt(self.empirical_c),
                "transfer_distance": fmt(self.transfer_distance),
                "transfer_ratio": fmt(self.transfer_ratio),
                "trans_lhs": fmt(self.trans_lhs),
                "trans_rhs": fmt(self.trans_rhs),
            }
        )


def stability_report(V: GridFunction, gamma: float, d: int, gs: GroundState) -> StabilityReport:
    """Assemble deficit, distance and the stability ratios for V.

    On the high branch (p >= 2, which includes the crossover p = 2) the
    report also carries the L^p transfer distance, its non-quadratic
    exponent diagnostic deficit / (C * t^(2 gamma + d - 2)), and both
    sides of the comparison

        p^-1 (||V_- - W_-||_p / 2)^(p-1)
            <= ||V_-^(2/(q-2)) - W_-^(2/(q-2))||_(q/2)

    at the p-norm-matched member W (valid exactly when the p-norms agree).
    """
    exps = _check_compatible(V, gamma, d, gs)
    vneg = negative_part(V)
    _require_attractive(vneg)
    lam = min(0.0, lowest_eigenpair(V, 0).lam)
    denom = norm_lp(vneg, exps.p) ** (exps.p / gamma)
    ratio = abs(lam) / denom
    dfc = gs.C_prime - ratio
    dist, a, b = distance_to_manifold(V, gamma, d, gs)
    branch = "low" if exps.p <= 2.0 else "high"
    emp = None
    if dist >= DISTANCE_FLOOR:
        emp = dfc / (gs.C_prime * dist**2)

    transfer = transfer_ratio = trans_lhs = trans_rhs = None
    if exps.p >= 2.0:
        bp = _matched_scale(vneg, exps, gs, power=False)
        pden = norm_lp(vneg, exps.p)
        transfer, ap = _scan_shift(vneg, gs, bp, exps, power=False, denom=pden)
        if transfer >= DISTANCE_FLOOR:
            transfer_ratio = dfc / (gs.C_prime * transfer ** (2.0 * gamma + d - 2.0))
        # both sides of the transfer comparison at the p-matched member
        w_vals = _family_neg(gs, V.grid, bp, ap)
        weights = V.grid.quad_weights
        diff_p = np.abs(vneg.values - w_vals)
        lp_diff = _weighted_norm(diff_p, weights, exps.p)
        trans_lhs = (1.0 / exps.p) * (lp_diff / 2.0) ** (exps.p - 1.0)
        two_qm2 = 2.0 / (exps.q - 2.0)
        diff_pow = np.abs(vneg.values**two_qm2 - w_vals**two_qm2)
        trans_rhs = _weighted_norm(diff_pow, weights, exps.q / 2.0)

    return StabilityReport(
        gamma=gamma,
        d=d,
        p=exps.p,
        q=exps.q,
        lam=lam,
        ratio=ratio,
        deficit=dfc,
        branch=branch,
        distance=dist,
        matched_a=a,
        matched_b=b,
        empirical_c=emp,
        transfer_distance=transfer,
        transfer_ratio=transfer_ratio,
        trans_lhs=trans_lhs,
        trans_rhs=trans_rhs,
    )


def _weighted_norm(vals, weights, p):
    m = vals.max()
    if m == 0.0:
        return 0.0
    return float(m * (weights @ (vals / m) ** p) ** (1.0 / p))


# ---------------------------------------------------------------------------
# deficit decomposition
# ---------------------------------------------------------------------------


def deficit_decomposition(
    V: GridFunction, psi: GridFunction, gamma: float, d: int, gs: GroundState
):
    """Split the deficit of V into its two nonnegative mechanisms.

    With Vt = -V_- (positive parts never help the bound), psi the unit-L2
    ground state of -Lap + Vt, and the canonical scale
    b = (int V_-^p)^(-1/(2p-d)), returns

        E-part = b^2 T - b^(d(q-2)/q) ||psi||_q^2 + C'       (energy above
                 the minimum for the rescaled psi)
        H-part = b^(d(q-2)/q) ||psi||_q^2 - b^2 int V_- psi^2  (the Hoelder
                 gap between V_- and the duality partner of psi)

    Both are >= 0 up to discretization and their sum equals the deficit
    exactly whenever lambda <= 0, since E-part + H-part = b^2 lambda + C'
    and b^2 = (int V_-^p)^(-1/gamma).
    """
    exps = _check_compatible(V, gamma, d, gs)
    vneg = negative_part(V)
    _require_attractive(vneg)
    w = V.grid.quad_weights
    nrm = float(np.sqrt(w @ psi.values**2))
    if abs(nrm - 1.0) > 1e-8:
        raise PreconditionError(f"psi must be unit-L2 (norm {nrm!r})")
    vt = -vneg.values
    T = gradient_squared_integral(psi)
    pot = float(w @ (vt * psi.values**2))
    lam = T + pot
    # psi must actually be the ground state of -Lap + Vt
    ep = lowest_eigenpair(GridFunction(V.grid, vt), 0)
    scale = max(1.0, abs(ep.lam))
    if abs(ep.lam - lam) > RAYLEIGH_RESIDUAL_CAP * scale:
        raise PreconditionError(
            f"psi is not the ground state of -Lap - V_- "
            f"(Rayleigh {lam!r} vs eigenvalue {ep.lam!r})"
        )
    p, q = exps.p, exps.q
    b = norm_lp(vneg, p) ** (-p / (2.0 * p - d))
    nq2 = norm_lp(psi, q) ** 2
    mid = b ** (d * (q - 2.0) / q) * nq2
    e_part = b**2 * T - mid + gs.C_prime
    h_part = mid - b**2 * (-pot)
    return float(e_part), float(h_part)


# ---------------------------------------------------------------------------
# sweep corpora
# ---------------------------------------------------------------------------


def line_sweep_corpus(grid: Grid):
    """60 one-dimensional test potentials for gamma = 3/2 (p = 2).

    Four families of 15: depth-scaled and width-scaled sech^2 wells,
    cosine-modulated wells, and symmetric two-bump wells.  Returns a list
    of (family, parameter, GridFunction).  The parameter ranges skip the
    exact optimizers (depth 1, width 1): at finite h those sit a few 1e-6
    *below* the sharp constant, which would trip the sign contracts the
    sweep asserts for genuinely suboptimal potentials.
    """
    if grid.kind != "line":
        raise PreconditionError("line_sweep_corpus needs a line grid")
    x = grid.nodes
    sech2 = 1.0 / np.cosh(x) ** 2
    out = []
    for s in np.linspace(0.45, 1.85, 15):
        out.append(("depth", float(s), GridFunction(grid, -2.0 * s * sech2)))
    for wdt in np.linspace(0.5, 2.0, 15):
        out.append(
            ("width", float(wdt), GridFunction(grid, -2.0 / np.cosh(x / wdt) ** 2))
        )
    for eps in np.linspace(0.05, 0.4, 15):
        out.append(
            ("cosine", float(eps), GridFunction(grid, -2.0 * sech2 * (1.0 + eps * np.cos(x))))
        )
    for sep in np.linspace(0.4, 3.2, 15):
        two = 1.0 / np.cosh(x - sep / 2.0) ** 2 + 1.0 / np.cosh(x + sep / 2.0) ** 2
        out.append(("twobump", float(sep), GridFunction(grid, -1.2 * two)))
    return out


def radial_sweep_corpus(grid: Grid, gs: GroundState):
    """Radial test potentials around the optimal profile (gamma = 1, d = 3).

    Depth- and modulation-perturbed members of the optimal family; twelve
    potentials deep enough to keep a bound state.
    """
    if grid.kind != "radial":
        raise PreconditionError("radial_sweep_corpus needs a radial grid")
    r = grid.nodes
    base = _family_neg(gs, grid, 1.0, 0.0)
    out = []
    for s in np.linspace(0.8, 1.6, 6):
        out.append(("rdepth", float(s), GridFunction(grid, -s * base)))
    for eps in np.linspace(0.05, 0.3, 6):
        mod = 1.0 + eps * np.cos(2.0 * math.pi * r / (0.5 * grid.extent))
        out.append(("rcosine", float(eps), GridFunction(grid, -1.2 * base * mod)))
    return out


@dataclass(frozen=True)
class SweepResult:
    gamma: float
    d: int
    rows: list  # (family, parameter, StabilityReport)

    @property
    def min_empirical_c(self) -> float:
        cs = [rep.empirical_c for _, _, rep in self.rows if rep.empirical_c is not None]
        return float(min(cs)) if cs else float("nan")

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(
            ["family", "parameter", "lambda", "ratio", "deficit", "distance", "empirical_c"]
        )
        for fam, par, rep in self.rows:
            writer.writerow(
                [
                    fam,
                    f"{par:.17g}",
                    f"{rep.lam:.17g}",
                    f"{rep.ratio:.17g}",
                    f"{rep.deficit:.17g}",
                    f"{rep.distance:.17g}",
                    "" if rep.empirical_c is None else f"{rep.empirical_c:.17g}",
                ]
            )
        return buf.getvalue()

    def summary_json(self) -> str:
        branch = self.rows[0][2].branch if self.rows else None
        return json.dumps(
            {
                "gamma": self.gamma,
                "d": self.d,
                "branch": branch,
                "corpus_size": len(self.rows),
                "min_empirical_c": f"{self.min_empirical_c:.17g}",
            }
        )


def run_sweep(corpus, gamma: float, d: int, gs: GroundState) -> SweepResult:
    """stability_report over a corpus, in corpus order."""
    rows = [(fam, par, stability_report(V, gamma, d, gs)) for fam, par, V in corpus]
    return SweepResult(gamma=gamma, d=d, rows=rows)
