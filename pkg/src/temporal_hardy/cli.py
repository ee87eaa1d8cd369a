"""Command line: ``temporal-hardy {verify,scan,optimize,classical}``.

Exit codes: 0 success, 1 verification failure, 2 bad input.
"""
from __future__ import annotations

import argparse
import math
import sys
from pathlib import Path

import numpy as np

from . import hardy, io, optimize, realism, spin
from .hardy import DEFAULT_P4_MIN, DEFAULT_ZERO_TOL, HARDY_BOUND
from .qcore import DEFAULT_CLUSTER_TOL

EXIT_OK, EXIT_FAIL, EXIT_INPUT = 0, 1, 2


class InputError(Exception):
    pass


def _tolerances(args) -> dict:
    return {"zero_tol": args.zero_tol, "p4_min": args.p4_min, "cluster_tol": args.cluster_tol}


def _emit(report: dict, out: str | None):
    text = io.dumps_canonical(report, indent=1)
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def _verify_target(args):
    target = args.target
    extra = {}
    if target == "spin1":
        st = spin.spin1_setting(spin.SPIN1_ALPHA)
        setting, psi = st.setting, st.psi
        extra = {"angle": st.angle}
    elif target == "spin32":
        theta = spin.solve_theta32()
        st = spin.spin32_setting(theta)
        setting, psi = st.setting, st.psi
        extra = {"angle": theta, "cot_polynomial_residual": spin.cot_polynomial(theta),
                 "unnormalized_norm": float(np.linalg.norm(spin.spin32_state_unnormalized(theta)))}
    elif target == "qubit":
        setting, psi = optimize.recipe_setting(optimize.RecipeInput.build(2))
    elif target == "conjecture":
        if args.value is None:
            raise InputError("verify conjecture needs a spin value, e.g. 'verify conjecture 5/2'")
        try:
            res = spin.general_spin_setting(args.value)
        except ValueError as exc:
            raise InputError(str(exc)) from None
        setting, psi = res.spin_setting.setting, res.spin_setting.psi
        extra = {"spin": str(res.spin_setting.system.s), "angle": res.theta,
                 "closed_form_angle": res.closed_form_theta, "a2_weight": res.a2_weight,
                 "eta": res.eta, "structure_residual": res.structure_residual}
    elif target == "file":
        if args.value is None:
            raise InputError("verify file needs a PATH")
        try:
            setting, psi = io.read_setting(args.value, args.cluster_tol)
        except io.SettingFileError as exc:
            raise InputError(str(exc)) from None
        if psi is None:
            raise InputError(f"{args.value}: no 'state' given")
        extra = {"path": args.value}
    else:
        raise InputError(f"unknown target {target!r}")
    return setting, psi, extra


def cmd_verify(args) -> int:
    setting, psi, extra = _verify_target(args)
    report = hardy.evaluate(setting, psi, args.zero_tol, args.p4_min)
    classes = hardy.classify_condition_sets(setting, psi, math.sqrt(args.zero_tol), args.p4_min)
    bound = None
    if all(report.zero_flags):
        bound = hardy.check_bound(report, hardy.born_prob(psi, setting.A2.projector))
    ok = report.success and bound is not None and bound.holds
    payload = {
        "target": args.target,
        "hardy": report.as_dict(),
        "classification": classes.as_dict(),
        "bound": None if bound is None else bound.as_dict(),
        "success": ok,
        **extra,
    }
    if args.save_setting:
        io.write_setting(args.save_setting, setting, psi)
    _emit(io.make_report("verify", payload, seed=args.seed, tolerances=_tolerances(args)), args.output)
    return EXIT_OK if ok else EXIT_FAIL


def parse_grid(spec: str) -> np.ndarray:
    parts = spec.split(":")
    if len(parts) != 3:
        raise InputError(f"grid spec {spec!r} must be start:stop:count")
    try:
        start, stop, count = float(parts[0]), float(parts[1]), int(parts[2])
    except ValueError:
        raise InputError(f"grid spec {spec!r} must be start:stop:count") from None
    if count < 1 or not (math.isfinite(start) and math.isfinite(stop)):
        raise InputError(f"grid spec {spec!r}: count must be >= 1 and bounds finite")
    return np.linspace(start, stop, count)


def cmd_scan(args) -> int:
    family = args.family.replace("-", "_")
    grid = parse_grid(args.grid)
    try:
        curve = optimize.scan_family(family, grid)
    except ValueError as exc:
        raise InputError(str(exc)) from None
    if args.output:
        with open(args.output, "w", newline="\n") as fh:
            curve.to_csv(fh)
    else:
        curve.to_csv(sys.stdout)
    report = io.make_report("scan", {**curve.as_dict(), "grid": args.grid, "csv": args.output},
                            seed=args.seed, tolerances=_tolerances(args))
    if args.report:
        _emit(report, args.report)
    elif args.output:
        _emit(report, None)
    return EXIT_OK


def cmd_optimize(args) -> int:
    if args.dim < 2:
        raise InputError("dimension must be at least 2")
    config = optimize.SearchConfig(restarts=args.restarts, seed=args.seed or 0)
    res = optimize.maximize_success(args.dim, config)
    ok = (res.best_p4 >= 0.24 and res.feasible
          and res.best_p4 <= HARDY_BOUND + optimize.CEILING_SLACK)
    _emit(io.make_report("optimize", {**res.as_dict(), "success": ok}, seed=config.seed,
                         tolerances=_tolerances(args)), args.output)
    return EXIT_OK if ok else EXIT_FAIL


def cmd_classical(args) -> int:
    if args.epsilon < 0:
        raise InputError("epsilon must be nonnegative")
    verdict = realism.classical_max_success(args.epsilon)
    envelope = 3 * args.epsilon
    ok = verdict.classical_max_p4 <= envelope
    payload = {**verdict.as_dict(), "envelope": envelope, "success": ok}
    _emit(io.make_report("classical", payload, seed=args.seed, tolerances=_tolerances(args)),
          args.output)
    return EXIT_OK if ok else EXIT_FAIL


def _global_flags(suppress: bool) -> argparse.ArgumentParser:
    # subcommands get SUPPRESS defaults so flags given before the verb survive
    def default(value):
        return argparse.SUPPRESS if suppress else value

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--zero-tol", type=float, default=default(DEFAULT_ZERO_TOL),
                        help=f"probability threshold for the zero conditions (default {DEFAULT_ZERO_TOL:g})")
    common.add_argument("--p4-min", type=float, default=default(DEFAULT_P4_MIN),
                        help=f"minimum p4 counted as success (default {DEFAULT_P4_MIN:g})")
    common.add_argument("--cluster-tol", type=float, default=default(DEFAULT_CLUSTER_TOL),
                        help=f"relative eigenvalue clustering tolerance (default {DEFAULT_CLUSTER_TOL:g})")
    common.add_argument("--seed", type=int, default=default(None))
    return common


def build_parser() -> argparse.ArgumentParser:
    common = _global_flags(suppress=True)
    parser = argparse.ArgumentParser(prog="temporal-hardy", parents=[_global_flags(False)],
                                     description="Temporal Hardy argument toolkit.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("verify", parents=[common], help="evaluate a known or stored setting")
    p.add_argument("target", choices=["spin1", "spin32", "qubit", "conjecture", "file"])
    p.add_argument("value", nargs="?", help="spin s for 'conjecture', PATH for 'file'")
    p.add_argument("-o", "--output", help="write the JSON report here instead of stdout")
    p.add_argument("--save-setting", metavar="PATH", help="also write the setting file")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("scan", parents=[common], help="scan a one-parameter family")
    p.add_argument("family", choices=["spin1-alpha", "spin32-theta", "recipe-dim"])
    p.add_argument("grid", help="start:stop:count")
    p.add_argument("-o", "--output", help="CSV output path (stdout if omitted)")
    p.add_argument("--report", help="JSON report path")
    p.set_defaults(func=cmd_scan)

    p = sub.add_parser("optimize", parents=[common], help="black-box maximization of p4")
    p.add_argument("dim", type=int)
    p.add_argument("--restarts", type=int, default=32)
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_optimize)

    p = sub.add_parser("classical", parents=[common], help="best realistic model")
    p.add_argument("--epsilon", type=float, default=0.0)
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_classical)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except InputError as exc:
        print(f"temporal-hardy: error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
