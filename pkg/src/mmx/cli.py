"""Command line front end.

Subcommands: run (single trajectory), sweep (epsilon sweep with a rate
fit), spectral (closed-form eigenvalue checks on the default grid),
audit (inequality audit along a trajectory), instances (list the
built-in problems).

Exit codes: 0 on success / all checks passed, 1 when a check failed
(rate fit out of band, eigenvalue mismatch, audit violation, target not
reached), 2 on usage or configuration errors.  All file outputs are
written atomically and reruns with identical arguments produce identical
bytes; wall-clock timing and timestamps only ever appear in a report's
separate meta field.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
from typing import Any, Sequence

from .core import ConfigError, OracleError
from .harness import (
    SweepSpec,
    _atomic_write_text,
    audit_trace,
    canonical_algorithm,
    load_sweep_toml,
    short_algorithm,
    sweep,
    write_trace_csv,
)
from .instances import instance_names, make_instance
from .solvers import foam_run, run, select_config
from .spectral import build_report, condition_grid

log = logging.getLogger("mmx")

_LOG_LEVELS = {"error": logging.ERROR, "info": logging.INFO, "debug": logging.DEBUG}

# audit kinds with a certified bound for each method
_AUDIT_FOR = {
    "TsGda": ("GsToOs",),
    "PerturbedGda": ("Psi1Descent", "DualErrPGDA", "GsToOs"),
    "SmoothedGda": ("Psi2Descent", "GsToOs"),
    "PerturbedSmoothedGda": ("Psi2Descent", "DualErrNCSC", "GsToOs"),
    "PerturbedSmoothedFoam": ("PDescent", "GsToOs"),
}

_WHICH_CANON = {
    "lambda1": "Lambda1",
    "lambda2": "Lambda2Full",
    "lambda2full": "Lambda2Full",
    "lambda3": "Lambda3",
}


def _setup_logging() -> None:
    raw = os.environ.get("MMX_LOG", "error").lower()
    if raw not in _LOG_LEVELS:
        raise ConfigError(
            f"MMX_LOG must be one of error, info, debug; got {raw!r}"
        )
    logging.basicConfig(level=_LOG_LEVELS[raw], format="%(name)s: %(message)s")


def _add_common(p: argparse.ArgumentParser, with_init: bool = True) -> None:
    p.add_argument(
        "--alg",
        choices=["tsgda", "pgda", "sgda", "psgda", "foam"],
        help="method to run",
    )
    p.add_argument("--instance", help="problem name (see: mmx instances)")
    p.add_argument("--ell", type=float, default=1.0, help="smoothness level")
    p.add_argument("--dy", type=float, default=1.0, help="dual domain radius")
    p.add_argument("--eps", type=float, help="target accuracy in (0, 1)")
    p.add_argument(
        "--mode", choices=["gs", "os"], default="gs", help="residual measured"
    )
    if with_init:
        p.add_argument(
            "--init",
            choices=["eigenvector", "fixed"],
            default="fixed",
            help="start point family",
        )
    p.add_argument("--max-iters", type=int, default=100_000)
    p.add_argument("--audit-stride", type=int, default=0)
    p.add_argument("--out", help="output path (or base path for sweeps)")
    p.add_argument(
        "--seed",
        type=int,
        default=0,
        help="sampling seed; trajectories never depend on it",
    )


def _build_parser() -> argparse.ArgumentParser:
    top = argparse.ArgumentParser(
        prog="mmx",
        description="first-order minimax methods with empirical certification",
    )
    sub = top.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="run one trajectory, write a trace")
    _add_common(p_run)

    p_sweep = sub.add_parser("sweep", help="first-hit sweep with a rate fit")
    _add_common(p_sweep)
    # sweeps lean on the fast engines, so deep targets stay cheap and the
    # budget only exists to mark genuinely unreachable points as censored
    p_sweep.set_defaults(max_iters=10**12)
    p_sweep.add_argument(
        "--epsilons", help="comma separated decreasing targets (>= 3)"
    )
    p_sweep.add_argument("--config", help="TOML sweep spec; overrides flags")
    p_sweep.add_argument("--jobs", type=int, default=1)
    p_sweep.add_argument("--predicted-slope", type=float, default=None)

    p_spec = sub.add_parser(
        "spectral", help="closed-form eigenvalues vs the numeric spectrum"
    )
    p_spec.add_argument(
        "--which",
        required=True,
        choices=sorted(_WHICH_CANON),
        help="eigenvalue family to check",
    )
    p_spec.add_argument(
        "--grid", default="default", help="parameter grid (only: default)"
    )
    p_spec.add_argument("--out", help="JSON output path")
    p_spec.add_argument("--seed", type=int, default=0)

    p_audit = sub.add_parser(
        "audit", help="audit certified inequalities along a trajectory"
    )
    _add_common(p_audit)

    sub.add_parser("instances", help="list built-in problem names")
    return top


def _require(args: argparse.Namespace, *names: str) -> None:
    for n in names:
        if getattr(args, n, None) in (None, ""):
            raise ConfigError(f"--{n.replace('_', '-')} is required here")


def _cli_instance(name: str, metric: str, eps: float, ell: float, dy: float):
    params: dict[str, float] = {"ell": ell, "d_y": dy}
    if name == "gs-hard":
        # curvature matched to the target, exactly as sweeps choose it
        params["r_y"] = (
            eps / dy if metric == "GS" else eps * eps / (ell * dy * dy)
        )
    if name == "os-hard":
        params.pop("r_y", None)
    return make_instance(name, **params)


def _trace_for(args: argparse.Namespace):
    """Shared run/audit plumbing: instance, config, solved trace."""
    _require(args, "alg", "instance", "eps")
    algorithm = canonical_algorithm(args.alg)
    metric = args.mode.upper()
    problem = _cli_instance(args.instance, metric, args.eps, args.ell, args.dy)
    cfg = select_config(
        algorithm, problem.ell, problem.d_y, args.eps,
        mode=metric, max_iters=args.max_iters,
    )
    from .harness import _fixed_init, _resolve_init

    state0, _ = _resolve_init(
        problem, algorithm, cfg, metric, args.eps, args.init
    )
    if algorithm == "PerturbedSmoothedFoam":
        trace, _ = foam_run(
            problem, cfg, init=state0, audit_stride=args.audit_stride
        )
    else:
        # keep every audited state; otherwise thin long traces
        stride = args.audit_stride or max(1, args.max_iters // 10_000)
        trace = run(
            algorithm,
            problem,
            cfg,
            init=state0,
            audit_stride=args.audit_stride,
            record_stride=stride,
        )
    return algorithm, trace


def _cmd_run(args: argparse.Namespace) -> int:
    algorithm, trace = _trace_for(args)
    if args.out:
        write_trace_csv(trace, args.out)
    last = trace.states[-1]
    print(
        f"{short_algorithm(algorithm)} on {args.instance}: "
        f"t={last.t} grad_calls={trace.grad_calls} "
        f"final_metric={trace.final_metric:.6g} "
        f"hit={'yes' if trace.hit else 'no'}"
    )
    return 0 if trace.hit else 1


def _cmd_sweep(args: argparse.Namespace) -> int:
    if args.config:
        # config overrides flags: the TOML spec is taken whole and flags
        # only fill output paths it leaves unset
        spec = load_sweep_toml(args.config)
        updates: dict[str, Any] = {}
        if args.jobs != 1 and spec.jobs == 1:
            updates["jobs"] = args.jobs
        if args.out and spec.csv_path is None:
            updates["csv_path"] = f"{args.out}.csv"
        if args.out and spec.json_path is None:
            updates["json_path"] = f"{args.out}.json"
        if updates:
            import dataclasses

            spec = dataclasses.replace(spec, **updates)
    else:
        _require(args, "alg", "instance", "epsilons")
        try:
            eps = [float(tok) for tok in args.epsilons.split(",") if tok]
        except ValueError as exc:
            raise ConfigError(f"bad --epsilons value: {exc}") from exc
        spec = SweepSpec(
            algorithm=canonical_algorithm(args.alg),
            instance=args.instance,
            epsilons=eps,
            metric=args.mode.upper(),
            init=args.init,
            instance_params=(
                {"ell": args.ell, "d_y": args.dy}
                if (args.ell, args.dy) != (1.0, 1.0)
                else {}
            ),
            audit_stride=args.audit_stride,
            max_iters=args.max_iters,
            predicted_slope=args.predicted_slope,
            jobs=args.jobs,
            csv_path=f"{args.out}.csv" if args.out else None,
            json_path=f"{args.out}.json" if args.out else None,
        )
    rows = sweep(spec)
    for row in rows:
        flag = " censored" if row["censored"] else ""
        print(
            f"eps={row['eps']:g} T={row['first_hit_T']} "
            f"grad_calls={row['grad_calls']}{flag}"
        )
    from .harness import slope_fit

    try:
        fit = slope_fit(rows, spec.predicted_slope, spec.tolerance)
    except ConfigError as exc:
        print(f"no rate fit: {exc}", file=sys.stderr)
        return 1
    band = (
        "" if spec.predicted_slope is None
        else f" predicted={spec.predicted_slope:+.3f}+/-{spec.tolerance:g}"
    )
    print(
        f"slope={fit.slope:+.4f} r2={fit.r_squared:.6f}{band} "
        f"pass={'yes' if fit.passed else 'no'}"
    )
    return 0 if fit.passed else 1


def _cmd_spectral(args: argparse.Namespace) -> int:
    if args.grid != "default":
        raise ConfigError(f"unknown grid {args.grid!r}; only: default")
    which = _WHICH_CANON[args.which]
    points = []
    all_ok = True
    worst = 0.0
    for p in condition_grid(which):
        rep = build_report(which, p)
        ok = rep.sign_ok and rep.rel_deviation <= 1e-8
        all_ok = all_ok and ok
        worst = max(worst, rep.rel_deviation)
        entry = {
            "params": {
                k: v for k, v in vars(p).items() if v is not None
            },
            "ok": ok,
        }
        entry.update(rep.to_json_dict())
        points.append(entry)
    payload = {
        "which": which,
        "grid": "default",
        "points": points,
        "worst_rel_deviation": worst,
        "all_ok": all_ok,
    }
    text = json.dumps(payload, indent=2, sort_keys=True) + "\n"
    if args.out:
        _atomic_write_text(args.out, text)
        print(
            f"{which}: {len(points)} points, worst rel deviation "
            f"{worst:.3e}, {'all ok' if all_ok else 'FAILURES'}"
        )
    else:
        sys.stdout.write(text)
    return 0 if all_ok else 1


def _cmd_audit(args: argparse.Namespace) -> int:
    if not args.audit_stride:
        args.audit_stride = 1
    algorithm, trace = _trace_for(args)
    kinds = _AUDIT_FOR[algorithm]
    violations = audit_trace(trace, kinds)
    if args.out:
        write_trace_csv(trace, args.out)
    audited = len(trace.states)
    print(
        f"audited {audited} states with {', '.join(kinds)}: "
        f"{len(violations)} violation(s)"
    )
    for t, kind, slack in violations[:20]:
        print(f"  t={t} {kind} slack={slack:.3e}")
    if len(violations) > 20:
        print(f"  ... {len(violations) - 20} more")
    return 0 if not violations else 1


def _cmd_instances(_: argparse.Namespace) -> int:
    for name in instance_names():
        print(name)
    return 0


_COMMANDS = {
    "run": _cmd_run,
    "sweep": _cmd_sweep,
    "spectral": _cmd_spectral,
    "audit": _cmd_audit,
    "instances": _cmd_instances,
}


def main(argv: Sequence[str] | None = None) -> int:
    try:
        _setup_logging()
        args = _build_parser().parse_args(argv)
        log.debug("arguments: %s", args)
        return _COMMANDS[args.command](args)
    except ConfigError as exc:
        print(f"mmx: error: {exc}", file=sys.stderr)
        return 2
    except OracleError as exc:
        print(f"mmx: run failed: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
