"""Command-line front end: list problems, run integrations, export
trajectories, run analyses, and emit gnuplot scripts.

Trajectories are written as CSV (17 significant digits, lossless for
binary64) or JSON.  Exit codes: 0 complete, 2 terminated by an event,
1 on any validation or integration failure.
"""

from __future__ import annotations

import argparse
import json
import sys

import numpy as np

from . import problems  # noqa: F401
from .analysis import convergence_order, lyapunov_spectrum
from .core import build_preset, get_family, list_families
from .errors import IvpSuiteError
from .integrators import (
    IntegratorOptions,
    integrate_adaptive,
    integrate_fixed,
    integrate_implicit,
    integrate_with_events,
)


def _parse_value(text: str):
    """Scalar, bracketed vector, or bare string override value."""
    text = text.strip()
    if text.startswith("[") and text.endswith("]"):
        inner = text[1:-1].strip()
        if not inner:
            return np.array([])
        return np.array([float(part) for part in inner.split(",")])
    try:
        as_int = int(text)
        return as_int
    except ValueError:
        pass
    try:
        return float(text)
    except ValueError:
        return text


def _parse_overrides(pairs):
    overrides = {}
    for pair in pairs or []:
        if "=" not in pair:
            raise IvpSuiteError(f"override '{pair}' is not of the form key=value")
        key, _, value = pair.partition("=")
        overrides[key.strip()] = _parse_value(value)
    return overrides


def _parse_tspan(text):
    if text is None:
        return None
    parts = text.split(":")
    if len(parts) != 2:
        raise IvpSuiteError(f"--tspan expects t0:tf, got '{text}'")
    return float(parts[0]), float(parts[1])


def _fmt(x: float) -> str:
    return format(float(x), ".17g")


def write_csv(path, trajectory):
    n = trajectory.states.shape[1]
    header = "t," + ",".join(f"y{i + 1}" for i in range(n))
    with open(path, "w") as fh:
        fh.write(header + "\n")
        for t, row in zip(trajectory.times, trajectory.states):
            fh.write(_fmt(t) + "," + ",".join(_fmt(v) for v in row) + "\n")


def _jsonable_parameters(params):
    out = {}
    for key, value in params.items():
        if callable(value):
            out[key] = f"<function {getattr(value, '__name__', 'anonymous')}>"
        elif isinstance(value, np.ndarray):
            out[key] = value.tolist()
        elif isinstance(value, (np.integer, np.floating)):
            out[key] = value.item()
        else:
            out[key] = value
    return out


def trajectory_to_json(problem, trajectory) -> dict:
    return {
        "problem": problem.name,
        "preset": problem.preset,
        "parameters": _jsonable_parameters(problem.parameters.as_dict()),
        "times": trajectory.times.tolist(),
        "states": trajectory.states.tolist(),
        "events": [
            {
                "time": ev.time,
                "pre_state": ev.pre_state.tolist(),
                "post_state": ev.post_state.tolist(),
            }
            for ev in trajectory.events
        ],
        "status": trajectory.status,
    }


def load_trajectory_json(path):
    with open(path) as fh:
        doc = json.load(fh)
    return doc


# ---------------------------------------------------------------------------
# subcommands


def cmd_list(args) -> int:
    for family in list_families():
        presets = ", ".join(sorted(family.presets))
        print(f"{family.name:15s} {family.num_vars_expr:15s} "
              f"presets: {presets:30s} {family.description}")
    return 0


def _build_from_args(args):
    overrides = _parse_overrides(getattr(args, "set", None))
    seed = getattr(args, "seed", None)
    if seed is not None and "seed" not in overrides:
        overrides["seed"] = seed  # consumed by presets with seeded pieces
    problem = build_preset(args.family, args.preset, overrides)
    tspan = _parse_tspan(getattr(args, "tspan", None))
    if tspan is not None:
        problem.time_span = tspan
    return problem


def _options_from_args(args):
    kwargs = {}
    if getattr(args, "abs_tol", None) is not None:
        kwargs["abs_tol"] = args.abs_tol
    if getattr(args, "rel_tol", None) is not None:
        kwargs["rel_tol"] = args.rel_tol
    return IntegratorOptions(**kwargs)


def cmd_run(args) -> int:
    problem = _build_from_args(args)
    options = _options_from_args(args)
    integrator = args.integrator
    if integrator == "adaptive":
        traj = integrate_adaptive(problem, options)
    elif integrator == "implicit":
        traj = integrate_implicit(problem, options)
    elif integrator == "events":
        traj = integrate_with_events(problem, options)
    elif integrator.startswith("fixed:"):
        traj = integrate_fixed(problem, int(integrator.split(":", 1)[1]))
    else:
        raise IvpSuiteError(
            f"unknown integrator '{integrator}' "
            "(adaptive, fixed:N, implicit, events)"
        )
    out = args.out or f"{args.family}.{args.format}"
    if args.format == "csv":
        write_csv(out, traj)
    else:
        with open(out, "w") as fh:
            json.dump(trajectory_to_json(problem, traj), fh)
    print(f"wrote {out} ({len(traj.times)} rows, status {traj.status})")
    return 2 if traj.status == "terminated_by_event" else 0


def cmd_lyapunov(args) -> int:
    problem = _build_from_args(args)
    result = lyapunov_spectrum(problem, averaging_span=args.span)
    report = {
        "problem": problem.name,
        "preset": problem.preset,
        "exponents": result.exponents.tolist(),
        "fractal_dimension": result.fractal_dimension,
        "averaging_span": list(result.averaging_span),
        "step_count": result.step_count,
    }
    out = args.out or f"{args.family}-lyapunov.json"
    with open(out, "w") as fh:
        json.dump(report, fh, indent=2)
    print(f"wrote {out}")
    print("exponents:", " ".join(f"{v:.4f}" for v in result.exponents))
    print(f"fractal dimension: {result.fractal_dimension:.4f}")
    return 0


def cmd_convergence(args) -> int:
    problem = _build_from_args(args)
    ladder = [int(s) for s in args.ladder.split(",")]
    result = convergence_order(problem, args.method, ladder)
    report = {
        "problem": problem.name,
        "method": args.method,
        "step_counts": result.step_counts,
        "errors": result.errors.tolist(),
        "observed_order": result.order,
    }
    out = args.out or f"{args.family}-convergence.json"
    with open(out, "w") as fh:
        json.dump(report, fh, indent=2)
    print(f"wrote {out}")
    print(f"observed order: {result.order:.3f}")
    return 0


def cmd_plotscript(args) -> int:
    with open(args.trajectory) as fh:
        header = fh.readline().strip()
    columns = header.split(",")
    n = len(columns) - 1
    out = args.out or args.trajectory.rsplit(".", 1)[0] + ".gp"
    lines = [
        "set datafile separator ','",
        "set key autotitle columnhead",
        "set xlabel 't'",
        f"plot " + ", ".join(
            f"'{args.trajectory}' using 1:{i + 2} with lines" for i in range(n)
        ),
        "pause -1 'time series; press enter'",
    ]
    if n == 2:
        lines += [
            f"plot '{args.trajectory}' using 2:3 with lines title 'phase space'",
            "pause -1 'phase space; press enter'",
        ]
    elif n == 3:
        lines += [
            "set ticslevel 0",
            f"splot '{args.trajectory}' using 2:3:4 with lines title 'phase space'",
            "pause -1 'phase space; press enter'",
        ]
    with open(out, "w") as fh:
        fh.write("\n".join(lines) + "\n")
    print(f"wrote {out}")
    return 0


# ---------------------------------------------------------------------------


def build_parser():
    parser = argparse.ArgumentParser(
        prog="ivpsuite",
        description="Initial value problem suite: run, analyze, export",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    sub.add_parser("list", help="show registered families and presets")

    def add_problem_args(p):
        p.add_argument("family")
        p.add_argument("--preset", default="Canonical")
        p.add_argument("--set", action="append", metavar="KEY=VALUE",
                       help="override a parameter field (repeatable)")
        p.add_argument("--tspan", metavar="T0:TF")

    run = sub.add_parser("run", help="integrate and export a trajectory")
    add_problem_args(run)
    run.add_argument("--integrator", default="adaptive",
                     help="adaptive | fixed:N | implicit | events")
    run.add_argument("--abs-tol", type=float, dest="abs_tol")
    run.add_argument("--rel-tol", type=float, dest="rel_tol")
    run.add_argument("--format", choices=("csv", "json"), default="csv")
    run.add_argument("--out")
    run.add_argument("--seed", type=int,
                     help="override the seed of presets built from one "
                          "(e.g. bouncingball RandomTerrain)")

    lyap = sub.add_parser("lyapunov", help="Lyapunov spectrum via QR")
    add_problem_args(lyap)
    lyap.add_argument("span", type=float, nargs="?", default=500.0)
    lyap.add_argument("--out")

    conv = sub.add_parser("convergence", help="observed order on a step ladder")
    add_problem_args(conv)
    conv.add_argument("method", choices=("rk4", "euler"))
    conv.add_argument("ladder", help="comma-separated step counts, e.g. 16,32,64")
    conv.add_argument("--out")

    plot = sub.add_parser("plotscript", help="emit a gnuplot script for a CSV")
    plot.add_argument("trajectory")
    plot.add_argument("--out")

    rpc = sub.add_parser("rpc-serve",
                         help="serve JSON requests over stdio (machine interface)")
    rpc.add_argument("--once", action="store_true",
                     help="answer a single request and exit")
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    handlers = {
        "list": cmd_list,
        "run": cmd_run,
        "lyapunov": cmd_lyapunov,
        "convergence": cmd_convergence,
        "plotscript": cmd_plotscript,
    }
    try:
        if args.command == "rpc-serve":
            from .rpcserve import serve

            return serve(once=args.once)
        return handlers[args.command](args)
    except IvpSuiteError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except (OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
