"""Command-line front end.

Subcommands::

    ground-state     solve the profile Q, emit GroundState JSON
    constants        sharp constants with both-route consistency check
    eigen            lowest eigenvalue of a potential given as CSV
    holder-verify    fuzz the remainder inequalities, report violations
    hessian          linearization kernel report JSON
    stability-sweep  corpus sweep CSV plus min empirical stability ratio
    convergence      Richardson table for the reference eigenvalue

Exit status: 0 if every asserted contract holds, 1 on a contract
violation (with a pointer to the offending record), 2 on invalid
configuration.  Identical configuration and seed produce byte-identical
output.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
import warnings
from dataclasses import dataclass

import numpy as np

from .exceptions import EigstabError
from .grid import Grid, GridFunction
from .groundstate import (
    Exponents,
    keller_constant,
    solve_ground_state,
)
from .hessian import kernel_report
from .holder import (
    duality_continuity_check,
    holder_report,
    power_comparison_check,
    remainder_bounds,
    uniform_convexity_gap,
)
from .measure import WeightedMeasure, conjugate_exponent
from .sampling import random_nonnegative_unit, random_unit_function
from .spectral import lambda_of_potential, lowest_eigenpair
from .stability import line_sweep_corpus, radial_sweep_corpus, run_sweep

#: cross-check tolerance asserted by the `constants` subcommand
ROUTE_MISMATCH_CAP = 1e-6

#: slack granted to the fuzzing inequalities
FUZZ_TOL = 1e-10

_FUZZ_EXPONENTS = (2.0, 2.5, 3.0, 4.0, 6.0)


class ConfigError(Exception):
    pass


class ContractViolation(Exception):
    pass


@dataclass
class RunConfig:
    command: str
    gamma: float | None = None
    q: float | None = None
    d: int = 1
    grid_l: float = 20.0
    grid_n: int = 4000
    tol: float = 1e-10
    seed: int = 0
    samples: int = 1000
    out: str | None = None
    format: str = "json"
    potential: str | None = None
    p: float | None = None


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="eigstab", description="sharp eigenvalue bounds and their stability"
    )
    sub = parser.add_subparsers(dest="command")
    for name in (
        "ground-state",
        "constants",
        "eigen",
        "holder-verify",
        "hessian",
        "stability-sweep",
        "convergence",
    ):
        cmd = sub.add_parser(name)
        cmd.add_argument("--gamma", type=float, default=None)
        cmd.add_argument("--q", type=float, default=None)
        cmd.add_argument("--d", type=int, default=None)
        cmd.add_argument("--grid-l", type=float, default=None)
        cmd.add_argument("--grid-n", type=int, default=None)
        cmd.add_argument("--tol", type=float, default=None)
        cmd.add_argument("--seed", type=int, default=None)
        cmd.add_argument("--samples", type=int, default=None)
        cmd.add_argument("--out", type=str, default=None)
        cmd.add_argument("--format", type=str, default=None, choices=("csv", "json"))
        cmd.add_argument("--potential", type=str, default=None)
        cmd.add_argument("--p", type=float, default=None)
        cmd.add_argument("--config", type=str, default=None)
    return parser


def _load_config(args: argparse.Namespace) -> RunConfig:
    if args.command is None:
        raise ConfigError("no subcommand given")
    cfg = RunConfig(command=args.command)
    if args.config is not None:
        try:
            with open(args.config) as fh:
                doc = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read config file: {exc}") from exc
        grid = doc.pop("grid", None)
        if grid is not None:
            if "L" in grid:
                cfg.grid_l = float(grid["L"])
            if "n" in grid:
                cfg.grid_n = int(grid["n"])
        for key, value in doc.items():
            attr = key.replace("-", "_")
            if not hasattr(cfg, attr) or attr == "command":
                raise ConfigError(f"unknown config key {key!r}")
            setattr(cfg, attr, value)
    # explicit flags win over the config file
    for attr in (
        "gamma", "q", "d", "grid_l", "grid_n", "tol",
        "seed", "samples", "out", "format", "potential", "p",
    ):
        val = getattr(args, attr)
        if val is not None:
            setattr(cfg, attr, val)

    if cfg.gamma is not None and cfg.q is not None:
        raise ConfigError("give exactly one of --gamma and --q")
    if cfg.d < 1:
        raise ConfigError("d must be a positive integer")
    if cfg.grid_l <= 0.0 or cfg.grid_n < 16:
        raise ConfigError("grid needs L > 0 and n >= 16")
    if cfg.tol <= 0.0:
        raise ConfigError("tol must be positive")
    if cfg.seed < 0:
        raise ConfigError("seed must be >= 0")
    if cfg.samples < 1:
        raise ConfigError("samples must be >= 1")
    if cfg.format not in ("csv", "json"):
        raise ConfigError(f"unknown format {cfg.format!r}")
    return cfg


def _exponents(cfg: RunConfig, default_gamma: float | None = None) -> Exponents:
    try:
        if cfg.gamma is not None:
            return Exponents.from_gamma(cfg.gamma, cfg.d)
        if cfg.q is not None:
            return Exponents.from_q(cfg.q, cfg.d)
        if default_gamma is not None:
            return Exponents.from_gamma(default_gamma, cfg.d)
    except EigstabError as exc:
        raise ConfigError(str(exc)) from exc
    raise ConfigError("one of --gamma or --q is required")


def _emit(cfg: RunConfig, text: str) -> None:
    if not text.endswith("\n"):
        text += "\n"
    if cfg.out is None:
        sys.stdout.write(text)
    else:
        with open(cfg.out, "w", newline="") as fh:
            fh.write(text)


def _solve(cfg: RunConfig, exps: Exponents):
    grid = Grid.radial(cfg.d, cfg.grid_l, cfg.grid_n)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        return solve_ground_state(exps.q, cfg.d, grid, tol=cfg.tol)


# ---------------------------------------------------------------------------
# subcommands
# ---------------------------------------------------------------------------


def _cmd_ground_state(cfg: RunConfig) -> None:
    gs = _solve(cfg, _exponents(cfg))
    _emit(cfg, gs.to_json())


def _cmd_constants(cfg: RunConfig) -> None:
    exps = _exponents(cfg)
    gs = _solve(cfg, exps)
    kc = keller_constant(exps.gamma, cfg.d, gs)
    _emit(
        cfg,
        json.dumps(
            {
                "gamma": exps.gamma,
                "d": cfg.d,
                "q": exps.q,
                "C": f"{kc.value:.17g}",
                "C_eigen_route": f"{kc.eigen_route:.17g}",
                "route_mismatch": f"{kc.mismatch:.17g}",
                "C_prime": f"{gs.C_prime:.17g}",
                "S": f"{gs.S:.17g}",
                "norm_q": f"{gs.norm_q:.17g}",
            }
        ),
    )
    if kc.mismatch >= ROUTE_MISMATCH_CAP:
        raise ContractViolation(
            f"constant route mismatch {kc.mismatch:.3e} >= {ROUTE_MISMATCH_CAP:g}"
        )


def _read_potential(cfg: RunConfig, grid: Grid) -> GridFunction:
    if cfg.potential is None:
        raise ConfigError("eigen requires --potential <csv>")
    try:
        with open(cfg.potential, newline="") as fh:
            rows = list(csv.reader(fh))
    except OSError as exc:
        raise ConfigError(f"cannot read potential file: {exc}") from exc
    if not rows or len(rows) < 2:
        raise ConfigError("potential file needs a header and data rows")
    try:
        data = np.array([[float(a), float(b)] for a, b in rows[1:]])
    except (ValueError, TypeError) as exc:
        raise ConfigError(f"malformed potential file: {exc}") from exc
    coords, vals = data[:, 0], data[:, 1]
    order = np.argsort(coords)
    coords, vals = coords[order], vals[order]
    lo, hi = coords[0], coords[-1]
    want_lo = -grid.extent if grid.kind == "line" else 0.0
    tol = 2.0 * max(grid.spacing, (hi - lo) / max(1, coords.size - 1))
    if abs(hi - grid.extent) > tol or abs(lo - want_lo) > tol:
        raise ConfigError(
            f"potential extent [{lo:g}, {hi:g}] does not match the grid "
            f"[{want_lo:g}, {grid.extent:g}]; refusing to extrapolate"
        )
    resampled = np.interp(grid.nodes, coords, vals)
    return GridFunction(grid, resampled)


def _cmd_eigen(cfg: RunConfig) -> None:
    grid = Grid.line(cfg.grid_l, cfg.grid_n) if cfg.d == 1 else Grid.radial(
        cfg.d, cfg.grid_l, cfg.grid_n
    )
    V = _read_potential(cfg, grid)
    lam = lambda_of_potential(V, tol=cfg.tol)
    pair = lowest_eigenpair(V, 0, tol=cfg.tol)
    _emit(
        cfg,
        json.dumps(
            {
                "lambda": f"{lam:.17g}",
                "raw_eigenvalue": f"{pair.lam:.17g}",
                "residual": f"{pair.residual:.17g}",
                "grid": grid.metadata(),
            }
        ),
    )


def _cmd_holder_verify(cfg: RunConfig) -> None:
    rng = np.random.default_rng(cfg.seed)
    measure = WeightedMeasure.uniform_probability(64)
    exponents = (cfg.p,) if cfg.p is not None else _FUZZ_EXPONENTS
    for p in exponents:
        if p < 2.0:
            raise ConfigError(f"holder-verify needs p >= 2, got {p}")
    violations = []
    tight_main = 0.0
    tight_conv = 0.0
    tight_rem = 0.0
    for i in range(cfg.samples):
        p = float(exponents[i % len(exponents)])
        pc = conjugate_exponent(p)
        q = 2.0 * p / (p - 1.0)
        f = random_unit_function(rng, measure, p, complex_values=True)
        g = random_unit_function(rng, measure, pc, complex_values=True)
        rep = holder_report(f, g, p)
        for tag, bound in (("main1", rep.bound_main1), ("main2", rep.bound_main2)):
            if bound > rep.deficit + FUZZ_TOL:
                violations.append(f"sample {i} p={p:g}: {tag} {bound!r} > {rep.deficit!r}")
            if rep.deficit > FUZZ_TOL:
                tight_main = max(tight_main, bound / rep.deficit)
        u = random_unit_function(rng, measure, p)
        v = random_unit_function(rng, measure, p)
        gap, lower = uniform_convexity_gap(u, v, p)
        if lower > gap + FUZZ_TOL:
            violations.append(f"sample {i} p={p:g}: convexity {lower!r} > {gap!r}")
        if gap > FUZZ_TOL:
            tight_conv = max(tight_conv, lower / gap)
        lhs, rhs = duality_continuity_check(f, 0.5 * g + 0.5 * f, p)
        if lhs > rhs + FUZZ_TOL:
            violations.append(f"sample {i} p={p:g}: duality {lhs!r} > {rhs!r}")
        pw = power_comparison_check(f, g, q if q >= 2.0 else p)
        if pw.quad_lhs > pw.quad_rhs + FUZZ_TOL:
            violations.append(f"sample {i}: power-quad {pw.quad_lhs!r} > {pw.quad_rhs!r}")
        if pw.high_lhs is not None and pw.high_lhs > pw.high_rhs + FUZZ_TOL:
            violations.append(f"sample {i}: power-high {pw.high_lhs!r} > {pw.high_rhs!r}")
        psi = random_unit_function(rng, measure, q, complex_values=True)
        U = random_nonnegative_unit(rng, measure, p)
        B, H = remainder_bounds(psi, U, q)
        if H < -FUZZ_TOL:
            violations.append(f"sample {i} q={q:g}: gap functional {H!r} < 0")
        if B > H + FUZZ_TOL:
            violations.append(f"sample {i} q={q:g}: remainder {B!r} > {H!r}")
        if H > FUZZ_TOL:
            tight_rem = max(tight_rem, B / H)
    _emit(
        cfg,
        json.dumps(
            {
                "samples": cfg.samples,
                "seed": cfg.seed,
                "exponents": list(exponents),
                "violations": len(violations),
                "tightness": {
                    "holder_bounds": f"{tight_main:.6g}",
                    "convexity": f"{tight_conv:.6g}",
                    "remainder": f"{tight_rem:.6g}",
                },
            }
        ),
    )
    if violations:
        raise ContractViolation(violations[0])


def _cmd_hessian(cfg: RunConfig) -> None:
    gs = _solve(cfg, _exponents(cfg))
    report = kernel_report(gs)
    _emit(cfg, report.to_json())
    if report.anomalies:
        raise ContractViolation(report.anomalies[0])
    if report.kernel_dim != cfg.d + 1:
        raise ContractViolation(
            f"kernel dimension {report.kernel_dim}, expected {cfg.d + 1}"
        )


def _cmd_stability_sweep(cfg: RunConfig) -> None:
    exps = _exponents(cfg, default_gamma=1.5 if cfg.d == 1 else 1.0)
    gs = _solve(cfg, exps)
    if cfg.d == 1:
        corpus = line_sweep_corpus(Grid.line(cfg.grid_l, cfg.grid_n))
    else:
        corpus = radial_sweep_corpus(gs.grid, gs)
    result = run_sweep(corpus, exps.gamma, cfg.d, gs)
    if cfg.format == "csv":
        _emit(cfg, result.to_csv())
    else:
        _emit(cfg, result.summary_json())
    if cfg.out is not None:
        # summary always goes to stdout so sweeps are self-describing
        sys.stdout.write(result.summary_json() + "\n")
    for fam, par, rep in result.rows:
        fields = [rep.lam, rep.ratio, rep.deficit, rep.distance]
        if not all(np.isfinite(fields)):
            raise ContractViolation(f"{fam} {par:g}: non-finite report field")
        if rep.deficit < -1e-8:
            raise ContractViolation(f"{fam} {par:g}: deficit {rep.deficit!r} < -1e-8")
        if rep.trans_lhs is not None and rep.trans_lhs > rep.trans_rhs + 1e-12:
            raise ContractViolation(f"{fam} {par:g}: transfer comparison failed")
    if not (result.min_empirical_c > 0.0):
        raise ContractViolation(f"min empirical c = {result.min_empirical_c!r}")


def _cmd_convergence(cfg: RunConfig) -> None:
    """Richardson table for lambda(-2 sech^2) against the exact value -1."""
    rows = []
    prev_err = None
    for level in range(3):
        n = cfg.grid_n * 2**level
        grid = Grid.line(cfg.grid_l, n)
        V = GridFunction(grid, -2.0 / np.cosh(grid.nodes) ** 2)
        lam = lowest_eigenpair(V, 0, tol=cfg.tol).lam
        err = abs(lam - (-1.0))
        ratio = None if prev_err is None else prev_err / err
        rows.append((n, grid.spacing, lam, err, ratio))
        prev_err = err
    if cfg.format == "csv":
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["n", "h", "lambda", "error", "ratio"])
        for n, h, lam, err, ratio in rows:
            writer.writerow(
                [n, f"{h:.17g}", f"{lam:.17g}", f"{err:.17g}",
                 "" if ratio is None else f"{ratio:.17g}"]
            )
        _emit(cfg, buf.getvalue())
    else:
        _emit(
            cfg,
            json.dumps(
                {
                    "rows": [
                        {
                            "n": n,
                            "h": f"{h:.17g}",
                            "lambda": f"{lam:.17g}",
                            "error": f"{err:.17g}",
                            "ratio": None if ratio is None else f"{ratio:.17g}",
                        }
                        for n, h, lam, err, ratio in rows
                    ]
                }
            ),
        )
    for n, _, _, _, ratio in rows:
        if ratio is not None and not (3.2 <= ratio <= 4.8):
            raise ContractViolation(
                f"n={n}: error ratio {ratio!r} outside the second-order window"
            )


_COMMANDS = {
    "ground-state": _cmd_ground_state,
    "constants": _cmd_constants,
    "eigen": _cmd_eigen,
    "holder-verify": _cmd_holder_verify,
    "hessian": _cmd_hessian,
    "stability-sweep": _cmd_stability_sweep,
    "convergence": _cmd_convergence,
}


def run(cfg: RunConfig) -> int:
    try:
        _COMMANDS[cfg.command](cfg)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except ContractViolation as exc:
        print(f"contract violation: {exc}", file=sys.stderr)
        return 1
    except EigstabError as exc:
        print(f"contract violation: {exc}", file=sys.stderr)
        return 1
    return 0


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = _load_config(args)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    return run(cfg)


if __name__ == "__main__":
    sys.exit(main())
