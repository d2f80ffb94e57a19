"""Command line interface: ``skanfem solve | sweep | oracle``."""

from __future__ import annotations

import argparse
import concurrent.futures
import logging
import math
import os
import sys
from pathlib import Path

from .adapt import AmrConfig, PicardDivergenceError, run_adaptive
from .assembly import Linearization
from .linsolve import KrylovConfig, KrylovNotConverged, ZeroPivotError
from .model import BcVariant, FlowParams
from .oracle import BlowUpError, ShootingError, solve_shooting
from .picard import PicardConfig
from .postproc import RunSummary, export_indicators, export_profile

log = logging.getLogger("skanfem")

TABLE_M = "0,0.2,0.5,0.8,1,1.5,3,7,10,20,100"

EXIT_OK = 0
EXIT_SOLVER = 1
EXIT_USAGE = 2
EXIT_IO = 3

SOLVER_ERRORS = (PicardDivergenceError, KrylovNotConverged, ZeroPivotError,
                 BlowUpError, ShootingError, ArithmeticError)


def _add_flow_args(p: argparse.ArgumentParser, single: bool = True) -> None:
    if single:
        g = p.add_mutually_exclusive_group(required=True)
        g.add_argument("--m", type=float, help="wedge exponent m (beta = 2m/(m+1))")
        g.add_argument("--beta", type=float, help="pressure-gradient parameter; m = beta/(2-beta)")
    p.add_argument("--eta-inf", type=float, default=8.0, help="domain truncation length")
    p.add_argument("--bc", choices=[v.value for v in BcVariant], default="wedge",
                   help="wedge: u(0)=0, u(eta_inf)=1; stretching: u(0)=1, u(eta_inf)=0 (beta=0 only)")


def _add_amr_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--n0", type=int, default=8, help="elements in the initial uniform mesh")
    p.add_argument("--max-cycles", type=int, default=20, help="maximum adaptive cycles")
    p.add_argument("--tol-error", type=float, default=1e-6, help="global estimator tolerance")
    p.add_argument("--tol-picard", type=float, default=1e-12, help="relative Picard update tolerance")
    p.add_argument("--max-picard", type=int, default=50, help="maximum Picard iterations per mesh")
    p.add_argument("--damping", type=float, default=1.0, help="Picard damping in (0, 1]")
    p.add_argument("--theta", type=float, default=0.5,
                   help="mark elements with eta_K^2 >= theta * max eta^2")
    p.add_argument("--c1", type=float, default=1.0, help="residual weight of the estimator")
    p.add_argument("--c2", type=float, default=0.5, help="jump weight of the estimator")
    p.add_argument("--linearization", choices=["newton", "picard"], default="newton",
                   help="treatment of the beta*u^2 term")
    solver = p.add_mutually_exclusive_group()
    solver.add_argument("--krylov", dest="krylov", action="store_true", default=True,
                        help="GMRES with SSOR preconditioning for the u-system")
    solver.add_argument("--direct-only", dest="krylov", action="store_false",
                        help="direct tridiagonal solves everywhere")
    p.add_argument("--krylov-tol", type=float, default=1e-13, help="GMRES relative residual target")
    p.add_argument("--restart", type=int, default=30, help="GMRES restart length")
    p.add_argument("--omega", type=float, default=1.0, help="SSOR relaxation factor in (0, 2)")
    p.add_argument("--coarsen", action="store_true", help="also merge low-indicator element pairs")
    p.add_argument("--out-dir", type=Path, default=Path("skanfem-out"), help="output directory")
    p.add_argument("--no-oracle", dest="oracle", action="store_false",
                   help="skip the shooting reference value")


def build_parser() -> argparse.ArgumentParser:
    fmt = argparse.ArgumentDefaultsHelpFormatter
    parser = argparse.ArgumentParser(
        prog="skanfem",
        description="Adaptive finite element solver for the Falkner-Skan equation.",
        formatter_class=fmt,
    )
    parser.add_argument("-v", "--verbose", action="store_true", help="log progress")
    sub = parser.add_subparsers(dest="command", required=True)

    solve = sub.add_parser("solve", help="one adaptive run", formatter_class=fmt)
    _add_flow_args(solve)
    _add_amr_args(solve)
    solve.add_argument("--no-profile", dest="profile", action="store_false", help="skip profile.csv")
    solve.add_argument("--no-indicators", dest="indicators", action="store_false",
                       help="skip indicators_cycle_<k>.csv")
    solve.add_argument("--no-summary", dest="summary", action="store_false", help="skip summary.json")

    sweep = sub.add_parser("sweep", help="wall gradient table over several m", formatter_class=fmt)
    sweep.add_argument("--m-list", default=TABLE_M, help="comma-separated m values")
    _add_flow_args(sweep, single=False)
    _add_amr_args(sweep)

    orc = sub.add_parser("oracle", help="shooting-method reference solution", formatter_class=fmt)
    _add_flow_args(orc)
    orc.add_argument("--tol", type=float, default=1e-10, help="far-field mismatch tolerance")
    orc.add_argument("--step", type=float, default=1e-3, help="Runge-Kutta step")
    orc.add_argument("--profile", action="store_true", help="write oracle_profile.csv to --out-dir")
    orc.add_argument("--out-dir", type=Path, default=Path("skanfem-out"), help="output directory")
    return parser


def _flow_params(args, parser, m=None) -> FlowParams:
    try:
        if m is not None:
            return FlowParams.from_m(m, args.eta_inf, args.bc)
        if args.beta is not None:
            return FlowParams.from_beta(args.beta, args.eta_inf, args.bc)
        return FlowParams.from_m(args.m, args.eta_inf, args.bc)
    except ValueError as exc:
        parser.error(str(exc))


def _amr_config(args, parser) -> AmrConfig:
    try:
        krylov = KrylovConfig(tol=args.krylov_tol, restart=args.restart, relaxation=args.omega)
        picard = PicardConfig(max_iters=args.max_picard, tol=args.tol_picard, damping=args.damping,
                              linearization=Linearization(args.linearization),
                              use_krylov=args.krylov, krylov=krylov)
        return AmrConfig(max_cycles=args.max_cycles, tol_error=args.tol_error, theta=args.theta,
                         coarsening=args.coarsen, c1=args.c1, c2=args.c2, n0=args.n0,
                         picard=picard)
    except ValueError as exc:
        parser.error(str(exc))


def _prepare_out_dir(path: Path) -> None:
    path.mkdir(parents=True, exist_ok=True)
    if not os.access(path, os.W_OK):
        raise OSError(f"output directory {path} is not writable")


def run_solve(args, parser) -> int:
    params = _flow_params(args, parser)
    cfg = _amr_config(args, parser)
    try:
        _prepare_out_dir(args.out_dir)
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    try:
        run = run_adaptive(params, cfg)
        alpha = solve_shooting(params).alpha if args.oracle else None
    except SOLVER_ERRORS as exc:
        print(f"solver failure: {exc}", file=sys.stderr)
        return EXIT_SOLVER
    summary = RunSummary.from_run(params, run, alpha)
    try:
        if args.profile:
            export_profile(run.final_field, args.out_dir / "profile.csv")
        if args.indicators:
            for rec, rep, mesh in zip(run.cycles, run.estimates, run.meshes):
                export_indicators(rep, mesh, rec.cycle, args.out_dir)
        if args.summary:
            summary.write(args.out_dir / "summary.json")
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    last = run.cycles[-1]
    print(f"m={params.m:.12g} beta={params.beta:.12g} f''(0)={summary.fpp0_final:.8f} "
          f"cycles={len(run.cycles)} dofs={last.dofs} eta_global={last.eta_global:.3e} "
          f"terminated_by={summary.terminated_by}")
    if alpha is not None:
        print(f"oracle alpha={alpha:.8f} |diff|={summary.agreement:.3e}")
    return EXIT_OK


def _parse_m_list(text: str, parser) -> list[float]:
    try:
        values = [float(t) for t in text.split(",") if t.strip()]
    except ValueError:
        parser.error(f"--m-list must be comma-separated numbers, got {text!r}")
    if not values or not all(math.isfinite(v) for v in values):
        parser.error("--m-list needs at least one finite value")
    return values


def _sweep_one(params: FlowParams, cfg: AmrConfig, with_oracle: bool):
    fpp0 = alpha = math.nan
    try:
        fpp0 = run_adaptive(params, cfg).cycles[-1].fpp0
    except SOLVER_ERRORS as exc:
        log.warning("m=%g: adaptive run failed: %s", params.m, exc)
    if with_oracle:
        try:
            alpha = solve_shooting(params).alpha
        except SOLVER_ERRORS as exc:
            log.warning("m=%g: oracle failed: %s", params.m, exc)
    return fpp0, alpha


def _workers() -> int:
    env = os.environ.get("SKANFEM_THREADS")
    if env:
        try:
            return max(1, int(env))
        except ValueError:
            log.warning("ignoring non-integer SKANFEM_THREADS=%r", env)
    return os.cpu_count() or 1


def run_sweep(args, parser) -> int:
    ms = _parse_m_list(args.m_list, parser)
    params = []
    for m in ms:
        params.append(_flow_params(args, parser, m=m))
    cfg = _amr_config(args, parser)
    try:
        _prepare_out_dir(args.out_dir)
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO

    workers = min(_workers(), len(params))
    if workers > 1:
        with concurrent.futures.ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_sweep_one, params, [cfg] * len(params),
                                    [args.oracle] * len(params)))
    else:
        results = [_sweep_one(p, cfg, args.oracle) for p in params]

    lines = ["m,beta,fpp0,oracle_alpha,abs_diff"]
    for p, (fpp0, alpha) in zip(params, results):
        diff = abs(fpp0 - alpha)
        lines.append(",".join(repr(float(v)) for v in (p.m, p.beta, fpp0, alpha, diff)))
        print(f"m={p.m:<8g} beta={p.beta:.6f} f''(0)={fpp0:.6f} oracle={alpha:.6f} |diff|={diff:.2e}")
    try:
        (args.out_dir / "table.csv").write_text("\n".join(lines) + "\n", encoding="utf-8")
    except OSError as exc:
        print(f"error: could not write table: {exc}", file=sys.stderr)
        return EXIT_IO
    return EXIT_OK


def run_oracle(args, parser) -> int:
    params = _flow_params(args, parser)
    try:
        res = solve_shooting(params, tol=args.tol, step=args.step)
    except (ShootingError, BlowUpError) as exc:
        print(f"oracle failure: {exc}", file=sys.stderr)
        return EXIT_SOLVER
    except ValueError as exc:
        parser.error(str(exc))
    print(f"alpha={res.alpha:.10f} residual={res.residual:.3e} iterations={res.iterations}")
    if args.profile:
        try:
            _prepare_out_dir(args.out_dir)
            lines = ["eta,f,u,w"] + [",".join(repr(float(v)) for v in row) for row in res.profile]
            (args.out_dir / "oracle_profile.csv").write_text("\n".join(lines) + "\n", encoding="utf-8")
        except OSError as exc:
            print(f"error: {exc}", file=sys.stderr)
            return EXIT_IO
    return EXIT_OK


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    handlers = {"solve": run_solve, "sweep": run_sweep, "oracle": run_oracle}
    return handlers[args.command](args, parser)


if __name__ == "__main__":
    sys.exit(main())
