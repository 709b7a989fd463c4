"""Hoelder's inequality with remainder and related convexity bounds.

The central objects are the duality map D_p, the gap functional

    H[psi, U] = ||psi||_q^2 - int U |psi|^2 dmu,

which is nonnegative whenever U >= 0 has unit L^(q/(q-2)) norm, and
quantitative lower bounds for the Hoelder deficit 1 - |int f g| in terms
of distances between f (or g) and the dual vector of the other factor.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .exceptions import (
    DegenerateInputError,
    InvalidExponentError,
    PreconditionError,
)
from .measure import (
    MeasFunction,
    conjugate_exponent,
    duality_map,
    lp_norm,
    pairing,
)

#: absolute tolerance on the unit-norm preconditions
UNIT_NORM_TOL = 1e-10

#: pairings below this magnitude get theta = 0
PHASE_TOL = 1e-14


def _require_unit(f: MeasFunction, p: float, name: str) -> None:
    nrm = lp_norm(f, p)
    if abs(nrm - 1.0) > UNIT_NORM_TOL:
        raise PreconditionError(
            f"{name} must be a unit vector in L^{p:g} (norm = {nrm!r})"
        )


def aligning_phase(z: complex) -> float:
    """theta in [0, 2*pi) with e^(i*theta) * z >= 0; 0 for tiny |z|."""
    if abs(z) < PHASE_TOL:
        return 0.0
    return float(np.mod(-np.angle(z), 2.0 * np.pi))


@dataclass(frozen=True)
class HolderReport:
    """Deficit of Hoelder's inequality for a unit pair (f, g) and the two
    quantitative lower bounds that must not exceed it."""

    lhs: float
    deficit: float
    bound_main1: float
    bound_main2: float
    theta: float


def holder_report(f: MeasFunction, g: MeasFunction, p: float) -> HolderReport:
    """Evaluate both remainder bounds for unit vectors f in L^p, g in L^p'.

    bound_main1 = ((p'-1)/4) ||D_p(f) - e^(i theta) g||_{p'}^2
    bound_main2 = (1/(p 2^(p-1))) ||e^(i theta) f - D_{p'}(g)||_p^p

    Both are guaranteed lower bounds for the deficit 1 - |int f g| when
    p >= 2.
    """
    if p < 2.0:
        raise InvalidExponentError(f"holder_report requires p >= 2, got {p}")
    pc = conjugate_exponent(p)
    _require_unit(f, p, "f")
    _require_unit(g, pc, "g")

    z = pairing(f, g)
    theta = aligning_phase(z)
    phase = np.exp(1j * theta)
    lhs = abs(z)
    deficit = 1.0 - lhs

    df = duality_map(f, p)
    diff1 = MeasFunction(g.measure, df.values - phase * g.values)
    bound_main1 = (pc - 1.0) / 4.0 * lp_norm(diff1, pc) ** 2

    dg = duality_map(g, pc)
    diff2 = MeasFunction(f.measure, phase * f.values - dg.values)
    bound_main2 = lp_norm(diff2, p) ** p / (p * 2.0 ** (p - 1.0))

    return HolderReport(
        lhs=lhs,
        deficit=deficit,
        bound_main1=float(bound_main1),
        bound_main2=float(bound_main2),
        theta=theta,
    )


def _check_admissible_pair(psi: MeasFunction, U: MeasFunction, q: float) -> float:
    if q <= 2.0:
        raise InvalidExponentError(f"need q > 2, got {q}")
    uvals = U.values
    if np.iscomplexobj(uvals) and not np.allclose(uvals.imag, 0.0):
        raise PreconditionError("U must be real-valued")
    if np.any(np.real(uvals) < 0.0):
        raise PreconditionError("U must be nonnegative")
    dual = q / (q - 2.0)
    nrm = lp_norm(U, dual)
    if abs(nrm - 1.0) > UNIT_NORM_TOL:
        raise PreconditionError(
            f"U must have unit L^{dual:g} norm (norm = {nrm!r})"
        )
    psiq = lp_norm(psi, q)
    if psiq == 0.0:
        raise DegenerateInputError("psi must not be identically zero")
    return psiq


def h_functional(psi: MeasFunction, U: MeasFunction, q: float) -> float:
    """||psi||_q^2 - int U |psi|^2, nonnegative for admissible (psi, U)."""
    psiq = _check_admissible_pair(psi, U, q)
    w = psi.measure.weights
    return float(psiq**2 - np.sum(w * np.real(U.values) * np.abs(psi.values) ** 2))


def remainder_bounds(
    psi: MeasFunction, U: MeasFunction, q: float, boundary_alt: bool = False
):
    """Lower bound B for H[psi, U] and the value H itself, as a pair (B, H).

    For q >= 4 the bound compares U against |psi|^(q-2)/||psi||_q^(q-2) in
    L^(q/(q-2)) with constant 1/(2(q-2)); for 2 < q < 4 it compares
    U^(2/(q-2)) against |psi|^2/||psi||_q^2 in L^(q/2) with constant
    (q-2)/8.  At q = 4 both apply; the first is returned unless
    ``boundary_alt`` is set.
    """
    psiq = _check_admissible_pair(psi, U, q)
    H = h_functional(psi, U, q)
    uvals = np.real(U.values)
    absq = np.abs(psi.values)

    use_high = q > 4.0 or (q == 4.0 and not boundary_alt)
    if use_high:
        diff = MeasFunction(
            U.measure, (absq / psiq) ** (q - 2.0) - uvals
        )
        B = psiq**2 / (2.0 * (q - 2.0)) * lp_norm(diff, q / (q - 2.0)) ** 2
    else:
        diff = MeasFunction(
            U.measure, (absq / psiq) ** 2 - uvals ** (2.0 / (q - 2.0))
        )
        B = (q - 2.0) / 8.0 * psiq**2 * lp_norm(diff, q / 2.0) ** 2
    return float(B), H


def uniform_convexity_gap(u: MeasFunction, v: MeasFunction, p: float):
    """Midpoint gap 1 - ||(u+v)/2||_p and its convexity lower bound.

    The bound is ((p-1)/8) ||u-v||_p^2 for 1 < p <= 2 and
    (1/(p 2^p)) ||u-v||_p^p for p >= 2 (at p = 2 the two coincide on the
    relevant scale; the first is used).
    """
    if p <= 1.0:
        raise InvalidExponentError(f"need p > 1, got {p}")
    _require_unit(u, p, "u")
    _require_unit(v, p, "v")
    mid = MeasFunction(u.measure, 0.5 * (u.values + v.values))
    gap = 1.0 - lp_norm(mid, p)
    dnorm = lp_norm(u - v, p)
    if p <= 2.0:
        lower = (p - 1.0) / 8.0 * dnorm**2
    else:
        lower = dnorm**p / (p * 2.0**p)
    return float(gap), float(lower)


def duality_continuity_check(f: MeasFunction, g: MeasFunction, p: float):
    """Hoelder continuity of D_p: returns (lhs, rhs) with lhs <= rhs.

    lhs = ||D_p(f) - D_p(g)||_{p'};
    rhs = 4 (p-1) t for p >= 2 and 2 (p' t)^(p-1) for 1 < p <= 2,
    where t = ||f-g||_p / (||f||_p + ||g||_p).
    """
    if p <= 1.0:
        raise InvalidExponentError(f"need p > 1, got {p}")
    nf, ng = lp_norm(f, p), lp_norm(g, p)
    if nf == 0.0 or ng == 0.0:
        raise DegenerateInputError("duality_continuity_check needs nonzero inputs")
    pc = conjugate_exponent(p)
    lhs = lp_norm(duality_map(f, p) - duality_map(g, p), pc)
    t = lp_norm(f - g, p) / (nf + ng)
    if p >= 2.0:
        rhs = 4.0 * (p - 1.0) * t
    else:
        rhs = 2.0 * (pc * t) ** (p - 1.0)
    return float(lhs), float(rhs)


@dataclass(frozen=True)
class PowerComparisonReport:
    """Both sides of the Lipschitz bounds for normalized powers of |f|.

    quad_*: max norm times || |f|^2/||f||_q^2 - |g|^2/||g||_q^2 ||_{q/2}
    versus 4 ||f-g||_q; high_* (only for q >= 4): the (q-2)-power analogue
    with constant 4(q-2).
    """

    quad_lhs: float
    quad_rhs: float
    high_lhs: float | None
    high_rhs: float | None


def power_comparison_check(f: MeasFunction, g: MeasFunction, q: float):
    if q < 2.0:
        raise InvalidExponentError(f"need q >= 2, got {q}")
    nf, ng = lp_norm(f, q), lp_norm(g, q)
    if nf == 0.0 or ng == 0.0:
        raise DegenerateInputError("power_comparison_check needs nonzero inputs")
    m = max(nf, ng)
    af, ag = np.abs(f.values), np.abs(g.values)
    quad_diff = MeasFunction(f.measure, (af / nf) ** 2 - (ag / ng) ** 2)
    quad_lhs = m * lp_norm(quad_diff, q / 2.0)
    quad_rhs = 4.0 * lp_norm(f - g, q)
    high_lhs = high_rhs = None
    if q >= 4.0:
        high_diff = MeasFunction(
            f.measure, (af / nf) ** (q - 2.0) - (ag / ng) ** (q - 2.0)
        )
        high_lhs = m * lp_norm(high_diff, q / (q - 2.0))
        high_rhs = 4.0 * (q - 2.0) * lp_norm(f - g, q)
    return PowerComparisonReport(
        quad_lhs=float(quad_lhs),
        quad_rhs=float(quad_rhs),
        high_lhs=None if high_lhs is None else float(high_lhs),
        high_rhs=None if high_rhs is None else float(high_rhs),
    )
