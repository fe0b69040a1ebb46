"""Command-line front end.

    lzcontrol optimize-oct    --target z_pi --epsilon0 2 --out run1/
    lzcontrol synth-dp        --target z_pi_2 --out dp/
    lzcontrol optimize-hybrid --target z_pi_2 --epsilon0 2 --initial dp/control.csv --out hyb/
    lzcontrol sweep           --control dp/control.csv --target z_pi_2 --min 0 --max 6 --res 0.01 --out sw/
    lzcontrol ensemble        --control hyb/control.csv --initial-state x+ --target-state x- --out ens/

Options may also come from a JSON file (``--config``) whose keys are the
long option names; explicit command-line flags win.  Failures print a JSON
error object on stderr and exit with the code of the error class.
"""

from __future__ import annotations

import argparse
import json
import logging
import math
import sys
from pathlib import Path

from . import __version__
from .analysis import (STATES, ensemble_grid, ensemble_state_fidelity, epsilon_sweep,
                       parse_state, robustness_R)
from .artifacts import (read_json, write_control_csv, write_ensemble_csv, write_history_csv,
                        write_json, write_sweep_csv, parse_control_csv)
from .constraints import QUADRATURES, eta
from .controls import ShapeFunction, TimeGrid, fluence, initial_square_pulse, rotation_angle
from .errors import ArtifactIOError, InvalidArgumentError, LZControlError, ParseError
from .objective import ObjectiveConfig, gate_distance, parse_target, target_angle
from .optimize import (CONSTRAINT_MODES, STEP_RULES, OptimizerConfig, optimize_hybrid,
                       optimize_oct, synth_dp)
from .su2 import propagate

log = logging.getLogger(__name__)


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise InvalidArgumentError(message)


def _grid_options(p):
    p.add_argument("--target", default="z_pi_2", help="z_pi_2 | z_pi | angle:<radians>")
    p.add_argument("--samples", type=int, default=1024, help="number of time cells N")
    p.add_argument("--t-final", type=float, default=1.0)
    p.add_argument("--shape-p", type=float, default=1.0, help="shape function exponent p")


def _objective_options(p):
    p.add_argument("--epsilon0", type=float, default=0.0)
    p.add_argument("--alpha", type=float, default=1e-6, help="fluence penalty weight")


def _optimizer_options(p, max_iters=20000):
    p.add_argument("--beta", type=float, default=1.0, help="initial step size")
    p.add_argument("--max-iters", type=int, default=max_iters)
    p.add_argument("--tol-J", type=float, default=1e-12)
    p.add_argument("--tol-grad", type=float, default=1e-12)
    p.add_argument("--step-rule", choices=STEP_RULES, default=None,
                   help="trial step policy (default: grow for OCT, bb for the hybrid flow)")
    p.add_argument("--quadrature", choices=QUADRATURES, default="exact",
                   help="cell quadrature for the constraint functionals")


def _common(p):
    p.add_argument("--out", required=True, help="output directory")
    p.add_argument("--config", help="JSON file with option defaults")
    p.add_argument("-v", "--verbose", action="store_true")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="lzcontrol", description=__doc__.split("\n\n")[0])
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="mode", required=True, parser_class=_Parser)

    p = sub.add_parser("optimize-oct", help="unconstrained steepest-descent optimal control")
    _grid_options(p)
    _objective_options(p)
    _optimizer_options(p)
    p.add_argument("--initial", help="initial control CSV (default: smoothed square pulse)")
    _common(p)

    p = sub.add_parser("synth-dp", help="synthesize a decoupling pulse")
    _grid_options(p)
    p.add_argument("--epsilon0", type=float, default=0.0, help="epsilon at which to report delta")
    p.add_argument("--max-iters", type=int, default=500)
    p.add_argument("--quadrature", choices=QUADRATURES, default="exact")
    p.add_argument("--initial", help="starting control CSV (default: multi-lobe ansatz)")
    _common(p)

    p = sub.add_parser("optimize-hybrid", help="constraint-preserving projected-gradient flow")
    _grid_options(p)
    _objective_options(p)
    _optimizer_options(p)
    p.add_argument("--constraint-mode", choices=CONSTRAINT_MODES, default="reduced")
    p.add_argument("--restore-every", type=int, default=0,
                   help="re-impose the constraints every K iterations (0 = never)")
    p.add_argument("--initial", help="decoupling pulse CSV (default: synthesize one)")
    _common(p)

    p = sub.add_parser("sweep", help="gate distance over an epsilon grid")
    p.add_argument("--control", required=True)
    p.add_argument("--target", default="z_pi_2")
    p.add_argument("--shape-p", type=float, default=1.0)
    p.add_argument("--min", type=float, default=0.0)
    p.add_argument("--max", type=float, default=6.0)
    p.add_argument("--res", type=float, default=0.01)
    p.add_argument("--epsilon0", type=float, default=None,
                   help="also report the robustness integral around this epsilon")
    p.add_argument("--delta-eps", type=float, default=0.5)
    p.add_argument("--workers", type=int, default=1)
    _common(p)

    p = sub.add_parser("ensemble", help="state-fidelity statistics over an epsilon ensemble")
    p.add_argument("--control", required=True)
    p.add_argument("--shape-p", type=float, default=1.0)
    p.add_argument("--min", type=float, default=1.5)
    p.add_argument("--max", type=float, default=2.5)
    p.add_argument("--count", type=int, default=21)
    p.add_argument("--initial-state", choices=sorted(STATES), default="x+")
    p.add_argument("--target-state", choices=sorted(STATES), default="x-")
    p.add_argument("--workers", type=int, default=1)
    _common(p)
    return parser


def _subparser(parser, mode):
    for action in parser._actions:
        if isinstance(action, argparse._SubParsersAction):
            return action.choices[mode]
    raise AssertionError("no subcommands")


def parse_args(argv=None) -> argparse.Namespace:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.config:
        config = read_json(args.config)
        sub = _subparser(parser, args.mode)
        known = {a.dest for a in sub._actions} - {"help", "config", "out"}
        values = {}
        for key, value in config.items():
            dest = key.replace("-", "_")
            if dest not in known:
                raise ParseError(f"{args.config}: unknown key {key!r} for {args.mode}")
            values[dest] = value
        sub.set_defaults(**values)
        args = parser.parse_args(argv)
    return args


def _check_positive(name, value):
    if not (isinstance(value, (int, float)) and math.isfinite(value) and value > 0):
        raise InvalidArgumentError(f"{name} must be a positive number, got {value!r}")


def _validate(args):
    for name in ("samples", "t_final", "res", "count", "workers", "delta_eps"):
        if hasattr(args, name):
            _check_positive(name.replace("_", "-"), getattr(args, name))
    for name in ("samples", "count", "workers", "max_iters", "restore_every"):
        value = getattr(args, name, 0)
        if int(value) != value:
            raise InvalidArgumentError(f"{name.replace('_', '-')} must be an integer")


DEFAULT_STEP_RULES = {"optimize-oct": "grow", "optimize-hybrid": "bb"}


def _echo(args) -> dict:
    echo = {k: v for k, v in sorted(vars(args).items()) if k not in ("config", "verbose")}
    if echo.get("step_rule", "") is None:
        echo["step_rule"] = DEFAULT_STEP_RULES[args.mode]
    return echo


def _shape(args) -> ShapeFunction:
    return ShapeFunction(args.shape_p)


def _grid(args) -> TimeGrid:
    return TimeGrid(args.samples, args.t_final)


def _ocfg(args) -> OptimizerConfig:
    return OptimizerConfig(
        beta=args.beta, max_iters=args.max_iters, tol_J=args.tol_J, tol_grad=args.tol_grad,
        step_rule=args.step_rule, quadrature=args.quadrature,
        constraint_mode=getattr(args, "constraint_mode", "reduced"),
        restore_every=getattr(args, "restore_every", 0),
    )


def _load_initial(args, grid, shape):
    control = parse_control_csv(args.initial, shape, grid.t_final)
    if control.grid != grid:
        raise InvalidArgumentError(
            f"{args.initial} has N={control.n}, but --samples is {grid.n}")
    return control


def _emit_result(out, result, extra=None):
    write_control_csv(out / "control.csv", result.control)
    write_history_csv(out / "history.csv", result.history)
    metrics = result.metrics()
    metrics["stop_reason"] = result.reason
    metrics.update(extra or {})
    write_json(out / "metrics.json", metrics)
    return metrics


def run_optimize_oct(args, out):
    grid, shape = _grid(args), _shape(args)
    target = parse_target(args.target)
    cfg = ObjectiveConfig(alpha=args.alpha, shape=shape, epsilon0=args.epsilon0)
    ocfg = _ocfg(args)
    if args.initial:
        initial = _load_initial(args, grid, shape)
    else:
        initial = initial_square_pulse(target_angle(target), grid, shape)
    result = optimize_oct(initial, target, cfg, ocfg)
    return _emit_result(out, result)


def run_synth_dp(args, out):
    grid, shape = _grid(args), _shape(args)
    target = parse_target(args.target)
    ocfg = OptimizerConfig(max_iters=args.max_iters, quadrature=args.quadrature)
    initial = _load_initial(args, grid, shape) if args.initial else None
    control = synth_dp(target_angle(target), grid, shape, ocfg, initial=initial)
    write_control_csv(out / "control.csv", control)
    metrics = {
        "delta": gate_distance(target, propagate(control, args.epsilon0)),
        "eta": list(eta(control, args.quadrature).eta),
        "eta_r_norm": eta(control, args.quadrature).reduced_norm,
        "fluence": fluence(control),
        "theta_tf": rotation_angle(control),
        "max_abs_C": float(abs(control.samples).max()),
    }
    write_json(out / "metrics.json", metrics)
    return metrics


def run_optimize_hybrid(args, out):
    grid, shape = _grid(args), _shape(args)
    target = parse_target(args.target)
    cfg = ObjectiveConfig(alpha=args.alpha, shape=shape, epsilon0=args.epsilon0)
    ocfg = _ocfg(args)
    if args.initial:
        initial = _load_initial(args, grid, shape)
    else:
        initial = synth_dp(target_angle(target), grid, shape, OptimizerConfig(quadrature=args.quadrature))
        write_control_csv(out / "initial_dp.csv", initial)
    result = optimize_hybrid(initial, target, cfg, ocfg)
    extra = {"initial_delta": gate_distance(target, propagate(initial, args.epsilon0))}
    return _emit_result(out, result, extra)


def run_sweep(args, out):
    target = parse_target(args.target)
    control = parse_control_csv(args.control, _shape(args))
    sweep = epsilon_sweep(control, target, args.min, args.max, args.res,
                          source=str(args.control), workers=args.workers)
    write_sweep_csv(out / "sweep.csv", sweep)
    summary = {"points": int(len(sweep.epsilon)), "max_delta": float(sweep.delta.max()),
               "min_delta": float(sweep.delta.min())}
    if args.epsilon0 is not None:
        summary["epsilon0"] = args.epsilon0
        summary["delta_eps"] = args.delta_eps
        summary["robustness"] = robustness_R(control, target, args.epsilon0, args.delta_eps,
                                             args.res, args.workers)
    write_json(out / "metrics.json", summary)
    return summary


def run_ensemble(args, out):
    control = parse_control_csv(args.control, _shape(args))
    eps = ensemble_grid(args.min, args.max, args.count)
    stats = ensemble_state_fidelity(control, parse_state(args.initial_state),
                                    parse_state(args.target_state), eps, args.workers)
    write_ensemble_csv(out / "ensemble.csv", stats)
    summary = stats.summary()
    write_json(out / "stats.json", summary)
    return summary


RUNNERS = {
    "optimize-oct": run_optimize_oct,
    "synth-dp": run_synth_dp,
    "optimize-hybrid": run_optimize_hybrid,
    "sweep": run_sweep,
    "ensemble": run_ensemble,
}


def _fail(exc: LZControlError, out=None) -> int:
    payload = exc.to_dict()
    payload["exit_code"] = exc.exit_code
    text = json.dumps(payload, sort_keys=True)
    print(text, file=sys.stderr)
    if out is not None and out.is_dir():
        try:
            (out / "error.json").write_text(text + "\n", encoding="utf-8")
        except OSError:
            pass
    return exc.exit_code


def main(argv=None) -> int:
    out = None
    try:
        args = parse_args(argv)
        logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                            format="%(levelname)s %(name)s: %(message)s")
        _validate(args)
        out = Path(args.out)
        try:
            out.mkdir(parents=True, exist_ok=True)
        except OSError as exc:
            raise ArtifactIOError(f"cannot create {out}: {exc.strerror or exc}") from None
        write_json(out / "config.echo.json", _echo(args))
        summary = RUNNERS[args.mode](args, out)
    except LZControlError as exc:
        return _fail(exc, out)
    print(json.dumps(summary, sort_keys=True))
    return 0


if __name__ == "__main__":
    sys.exit(main())
