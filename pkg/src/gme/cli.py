"""Command-line front end.

Subcommands: ``pure``, ``mixed``, ``sweep``, ``kkt-check``.  States and
ensembles travel in the JSON formats of :mod:`gme.io`; sweeps emit CSV.
Numeric console output uses 9 significant digits; structured output keeps
full precision and is byte-identical for identical inputs and seed.

Exit codes: 0 success, 2 unreadable or invalid input, 3 a check failed
(infeasible ensemble, residual above tolerance), 4 solver did not
converge.
"""

from __future__ import annotations

import argparse
import os
import sys

import numpy as np

from . import io as gio
from .families import CASE_I_GAMMA, CASE_II_GAMMA, sweep
from .mixed import (
    MixedProblem,
    SolverConfig,
    constraint_residuals,
    kkt_residual_blocks,
    objective,
    recover_multipliers,
    solve,
)
from .pure import multi_start_eigenvalue
from .states import DensityMatrix, PureState, ShapeMismatchError

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_CHECK_FAILED = 3
EXIT_UNCONVERGED = 4

SEED_ENV_VAR = "GME_SEED"
# kkt-check verifies a reported certificate, so its default tolerance is
# the certificate gate rather than the solver's inner stationarity target.
KKT_CHECK_TOL = 1e-5


def _fmt(x: float) -> str:
    return f"{x:.9g}"


def _default_seed() -> int:
    env = os.environ.get(SEED_ENV_VAR)
    if env is not None:
        try:
            return int(env)
        except ValueError:
            pass
    return 0


def _add_solver_flags(parser, with_terms=True):
    parser.add_argument("--starts", type=int, default=None,
                        help="number of multi-start runs")
    if with_terms:
        parser.add_argument("--terms", default="auto",
                            help="ensemble terms N, or 'auto' for n^2+1")
    parser.add_argument("--seed", type=int, default=None,
                        help=f"RNG seed (default: ${SEED_ENV_VAR} or 0)")
    parser.add_argument("--feas-tol", type=float, default=None)
    parser.add_argument("--stat-tol", type=float, default=None)
    parser.add_argument("--out", default=None, help="write output to this file")
    parser.add_argument("--format", choices=("table", "structured", "csv"),
                        default=None, help="output format")


def _solver_config(args, with_terms=True) -> SolverConfig:
    kwargs = {}
    if args.starts is not None:
        kwargs["starts"] = args.starts
    if args.seed is not None:
        kwargs["seed"] = args.seed
    else:
        kwargs["seed"] = _default_seed()
    if args.feas_tol is not None:
        kwargs["feas_tol"] = args.feas_tol
    if args.stat_tol is not None:
        kwargs["stat_tol"] = args.stat_tol
    if with_terms and args.terms != "auto":
        kwargs["num_terms"] = int(args.terms)
    return SolverConfig(**kwargs)


def _emit(text: str, out_path):
    if out_path:
        with open(out_path, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _cmd_pure(args) -> int:
    try:
        state = gio.read_state(args.input)
    except gio.StateFileError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    if not isinstance(state, PureState):
        print(f"error: {args.input}: expected kind 'pure'", file=sys.stderr)
        return EXIT_INPUT

    cfg = _solver_config(args, with_terms=False)
    best, runs = multi_start_eigenvalue(state, starts=cfg.starts, seed=cfg.seed)
    measure = min(1.0, max(0.0, 1.0 - best.eigenvalue))

    if args.format == "structured":
        payload = {
            "kind": "pure_result",
            "eigenvalue": best.eigenvalue,
            "measure": measure,
            "residual": best.residual,
            "converged": best.converged,
            "factors": [gio._encode_complex_vector(f) for f in best.state.factors],
            "runs": [
                {"eigenvalue": r.eigenvalue, "residual": r.residual,
                 "iterations": r.iterations, "converged": r.converged}
                for r in runs
            ],
        }
        _emit(gio._dump_json(payload), args.out)
    else:
        lines = [
            f"entanglement eigenvalue  {_fmt(best.eigenvalue)}",
            f"geometric measure        {_fmt(measure)}",
            f"fixed-point residual     {_fmt(best.residual)}",
            f"converged                {str(best.converged).lower()}",
            "nearest product state factors:",
        ]
        for i, f in enumerate(best.state.factors):
            comps = "  ".join(
                f"{_fmt(z.real)}{z.imag:+.9g}i" for z in np.asarray(f)
            )
            lines.append(f"  subsystem {i + 1}:  {comps}")
        lines.append("per-start log:")
        for idx, r in enumerate(runs, start=1):
            lines.append(
                f"  start {idx:3d}: eigenvalue {_fmt(r.eigenvalue)}  "
                f"residual {_fmt(r.residual)}  iters {r.iterations:4d}  "
                f"converged {str(r.converged).lower()}"
            )
        _emit("\n".join(lines) + "\n", args.out)
    return EXIT_OK if best.converged else EXIT_UNCONVERGED


def _cmd_mixed(args) -> int:
    try:
        state = gio.read_state(args.input)
    except gio.StateFileError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    if not isinstance(state, DensityMatrix):
        print(f"error: {args.input}: expected kind 'density'", file=sys.stderr)
        return EXIT_INPUT

    cfg = _solver_config(args)
    try:
        problem = MixedProblem(state, num_terms=cfg.num_terms)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    result = solve(problem, cfg)

    if args.format == "structured":
        _emit(gio.write_measure_result(result), args.out)
    else:
        mult = result.multipliers
        lines = [
            f"entanglement eigenvalue chi  {_fmt(result.chi)}",
            f"half squared measure         {_fmt(result.measure_sq_half)}",
            f"measure E                    {_fmt(result.measure)}",
            f"kkt residual                 {_fmt(result.kkt_residual)}",
            f"multiplier lam               {_fmt(mult.lam)}",
            f"multiplier kappa             {_fmt(mult.kappa)}",
            f"starts                       {result.starts_used}",
            f"converged                    {str(result.converged).lower()}",
            "nearest disentangled ensemble (weight, factor components):",
        ]
        e = result.ensemble
        for k, (w, s) in enumerate(zip(e.weights, e.states), start=1):
            if w == 0.0:
                continue
            parts = ["  ".join(
                f"{_fmt(z.real)}{z.imag:+.9g}i" for z in np.asarray(f)
            ) for f in s.factors]
            lines.append(f"  k={k:3d}  p={_fmt(w)}  " + " | ".join(parts))
        lines.append("multipliers mu (active terms):")
        for k, (w, mu_k, tau_k) in enumerate(
            zip(e.weights, mult.mu, mult.tau), start=1
        ):
            if w == 0.0:
                continue
            lines.append(f"  k={k:3d}  mu={_fmt(mu_k)}  tau={_fmt(tau_k)}")
        _emit("\n".join(lines) + "\n", args.out)
    return EXIT_OK if result.converged else EXIT_UNCONVERGED


def _parse_grid(spec: str):
    try:
        start, end, step = (float(x) for x in spec.split(":"))
    except ValueError:
        raise ValueError(
            f"grid must be start:end:step, got {spec!r}"
        ) from None
    if step <= 0 or end < start:
        raise ValueError(f"invalid grid {spec!r}")
    # Inclusive endpoints with a tolerance against float accumulation.
    count = int(np.floor((end - start) / step + 1e-12)) + 1
    values = [min(start + k * step, end) for k in range(count)]
    if values and end - values[-1] > 1e-12:
        values.append(end)
    return values


def _cmd_sweep(args) -> int:
    if args.family == "example1":
        gamma = None
    else:
        if args.case == "I":
            gamma = CASE_I_GAMMA
        elif args.case == "II":
            gamma = CASE_II_GAMMA
        elif args.gamma is not None:
            gamma = tuple(args.gamma)
        else:
            print("error: example2 needs --case or --gamma", file=sys.stderr)
            return EXIT_INPUT
    try:
        alphas = _parse_grid(args.grid)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT

    cfg = _solver_config(args)
    rows = sweep(args.family, alphas, cfg, gamma=gamma)
    _emit(gio.write_sweep_csv(rows), args.out)
    if all(r.error is not None for r in rows):
        return EXIT_UNCONVERGED
    return EXIT_OK


def _cmd_kkt_check(args) -> int:
    try:
        state = gio.read_state(args.state)
        ensemble = gio.read_ensemble(args.ensemble)
        mult = gio.read_multipliers(args.multipliers) if args.multipliers else None
    except gio.StateFileError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    if not isinstance(state, DensityMatrix):
        print(f"error: {args.state}: expected kind 'density'", file=sys.stderr)
        return EXIT_INPUT

    tol = args.stat_tol if args.stat_tol is not None else KKT_CHECK_TOL
    try:
        feas = constraint_residuals(state, ensemble)
    except ShapeMismatchError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    if feas.max_violation > args.feas_gate:
        print(
            "error: ensemble infeasible beyond tolerance: "
            f"norm_gap {_fmt(feas.norm_gap)}, simplex_gap {_fmt(feas.simplex_gap)}, "
            f"max unit_gap {_fmt(float(np.max(np.abs(feas.unit_gaps))))}",
            file=sys.stderr,
        )
        return EXIT_CHECK_FAILED

    if mult is None:
        mult = recover_multipliers(state, ensemble)
    blocks = kkt_residual_blocks(state, ensemble, mult)
    worst = max(blocks.values())
    chi = objective(state, ensemble)

    if args.format == "structured":
        payload = {
            "kind": "kkt_report",
            "objective": chi,
            "max_residual": worst,
            "tolerance": tol,
            "passed": worst <= tol,
            "blocks": blocks,
            "multipliers": gio._multipliers_payload(mult),
        }
        _emit(gio._dump_json(payload), args.out)
    else:
        lines = [f"objective value    {_fmt(chi)}"]
        for name in ("stationarity", "scalar", "complementarity", "sign",
                     "norm_gap", "simplex_gap", "unit_norm"):
            lines.append(f"{name:<18} {_fmt(blocks[name])}")
        lines.append(f"max residual       {_fmt(worst)}")
        lines.append(f"tolerance          {_fmt(tol)}")
        lines.append(f"passed             {str(worst <= tol).lower()}")
        _emit("\n".join(lines) + "\n", args.out)
    return EXIT_OK if worst <= tol else EXIT_CHECK_FAILED


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="gme",
        description="Geometric measure of entanglement for pure and mixed states.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_pure = sub.add_parser("pure", help="pure-state measure from a state file")
    p_pure.add_argument("input")
    _add_solver_flags(p_pure, with_terms=False)
    p_pure.set_defaults(func=_cmd_pure)

    p_mixed = sub.add_parser("mixed", help="mixed-state measure from a density file")
    p_mixed.add_argument("input")
    _add_solver_flags(p_mixed)
    p_mixed.set_defaults(func=_cmd_mixed)

    p_sweep = sub.add_parser("sweep", help="measure along an alpha grid (CSV)")
    p_sweep.add_argument("--family", choices=("example1", "example2"),
                         required=True)
    p_sweep.add_argument("--case", choices=("I", "II"), default=None,
                         help="named coefficient set for example2")
    p_sweep.add_argument("--gamma", type=float, nargs=4, default=None,
                         help="explicit g1 g2 g3 g4 for example2")
    p_sweep.add_argument("--grid", default="0:1:0.05", help="start:end:step")
    _add_solver_flags(p_sweep)
    p_sweep.set_defaults(func=_cmd_sweep)

    p_kkt = sub.add_parser("kkt-check", help="verify optimality of an ensemble")
    p_kkt.add_argument("state")
    p_kkt.add_argument("ensemble")
    p_kkt.add_argument("--multipliers", default=None,
                       help="multipliers file; recovered when omitted")
    p_kkt.add_argument("--feas-gate", type=float, default=1e-2,
                       help="reject ensembles whose feasibility gaps exceed this")
    _add_solver_flags(p_kkt, with_terms=False)
    p_kkt.set_defaults(func=_cmd_kkt_check)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
