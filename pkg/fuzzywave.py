import logging
import os
import sys

from dotenv import load_dotenv

load_dotenv()
import argparse
import math

from numpy.polynomial import Polynomial

from src.calculus.gs_derivative import EnvelopeFunction, gs_derivative
from src.fuzzy.fuzzy_number import is_crisp
from src.utils.default_config_settings import RunConfig, default_config, load_config_from_file, save_config_to_file
from src.utils.utils import (
    LEVEL_HEADER,
    Z_HEADER,
    dump_json,
    eval_points,
    level_grid_rows,
    open_output,
    parse_coeff,
    write_level_grid_csv,
    write_rows_json,
    write_z_grid_csv,
    z_grid_rows,
)
from src.verification.checks import boundary_initial_check, fuzzy_validity_scan
from src.verification.residuals import fuzzy_equation_check, pde_residual
from src.verification.views import GridSpec
from src.wave.domain_search import validity_rectangle, validity_square
from src.wave.views import WaveProblem
from src.wave.wave_solver import level_functions, s_solution_check

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_VERIFY_FAILED = 1
EXIT_USAGE = 2
EXIT_IO = 3

RESIDUAL_LIMIT = 1e-5
ORDER_TARGET = 2.0
ORDER_SLACK = 0.3


def setup_logging():
    level_name = os.getenv("FUZZY_WAVE_LOGGING_LEVEL", "info").upper()
    level = getattr(logging, level_name, None)
    if not isinstance(level, int):
        level = logging.INFO
    logging.basicConfig(
        level=level,
        format="%(levelname)-8s [%(name)s] %(message)s",
        stream=sys.stderr,
    )


def build_envelope(fn: str, coeff, poly: str | None) -> EnvelopeFunction:
    if fn == "exp-decay":
        return EnvelopeFunction(coeff, lambda t: math.exp(-t), lambda t: -math.exp(-t))
    if fn == "sin":
        return EnvelopeFunction(coeff, math.sin, math.cos)
    if not poly:
        raise ValueError("--fn custom-envelope needs --poly c0,c1,... (ascending powers)")
    p = Polynomial([float(c) for c in poly.split(",")])
    dp = p.deriv()
    return EnvelopeFunction(coeff, lambda t: float(p(t)), lambda t: float(dp(t)))


def cmd_derive(args, config: RunConfig) -> int:
    coeff = parse_coeff(config.coeff, config.alpha_levels)
    env = build_envelope(args.fn, coeff, args.poly)
    results = [gs_derivative(env, t).to_dict() for t in args.t]
    for r in results:
        logger.info(f"🧮 {args.fn} at t={r['t']}: {r['classification']}")
    dump_json({"fn": args.fn, "coeff": config.coeff, "results": results}, sys.stdout)
    return EXIT_OK


def cmd_wave_domain(args, config: RunConfig) -> int:
    if args.rect:
        domain = validity_rectangle(config.m, config.epsilon, config.resolution or 1e-3)
    else:
        domain = validity_square(config.m, config.epsilon, config.refine_tol, config.resolution)
    for note in domain.notes:
        logger.warning(f"⚠️ {note}")
    dump_json(domain.to_dict(), sys.stdout)
    return EXIT_OK


def cmd_wave_eval(args, config: RunConfig) -> int:
    xs = eval_points(args.xmax, config.step)
    ts = eval_points(args.tmax, config.step)
    problem = WaveProblem(U0=parse_coeff(config.coeff, config.alpha_levels), m=config.m) if args.fuzzy else None
    try:
        with open_output(config.output) as stream:
            if config.format == "json":
                if problem is None:
                    write_rows_json(stream, Z_HEADER, z_grid_rows(xs, ts, config.m))
                else:
                    write_rows_json(stream, LEVEL_HEADER, level_grid_rows(xs, ts, problem))
            elif problem is None:
                write_z_grid_csv(stream, xs, ts, config.m)
            else:
                write_level_grid_csv(stream, xs, ts, problem)
    except OSError as e:
        logger.error(f"❌ Cannot write {config.output}: {e}")
        return EXIT_IO
    return EXIT_OK


def _residual_passed(report) -> bool:
    if report.max_abs_residual >= RESIDUAL_LIMIT:
        return False
    return report.order_estimate is None or abs(report.order_estimate - ORDER_TARGET) <= ORDER_SLACK


def cmd_verify(args, config: RunConfig) -> int:
    U0 = parse_coeff(config.coeff, config.alpha_levels)
    problem = WaveProblem(U0=U0, m=config.m)
    side = args.domain if args.domain is not None else validity_square(config.m, config.epsilon, config.refine_tol).s
    domain = (side, side)

    grid = GridSpec(x_max=side, t_max=side, h=config.residual_h)
    residuals = {
        f"u{i + 1}": pde_residual(lambda x, t, a, i=i: level_functions(x, t, a, problem)[i], problem.c, grid)
        for i in range(2)
    }
    boundary = boundary_initial_check(problem)
    scan = fuzzy_validity_scan(problem, domain, config.scan_resolution, epsilon=config.epsilon)
    s_check = s_solution_check(problem, domain, step=config.scan_resolution, epsilon=config.epsilon)
    equation = [fuzzy_equation_check(problem, side * fx, side * ft) for fx, ft in ((0.5, 0.5), (0.25, 0.75), (0.75, 0.25))]

    checks = {
        "pde_residual": (all(_residual_passed(r) for r in residuals.values()), {k: r.model_dump() for k, r in residuals.items()}),
        "boundary_initial_check": (boundary.passed, boundary.model_dump()),
        "fuzzy_validity_scan": (scan.passed, scan.model_dump()),
        "s_solution_check": (s_check.passed, s_check.model_dump()),
        "fuzzy_equation_check": (all(e.passed for e in equation), [e.model_dump() for e in equation]),
    }
    failed = [name for name, (ok, _) in checks.items() if not ok]
    summary = {
        "m": config.m,
        "domain": side,
        "coeff": config.coeff,
        "crisp_coefficient": is_crisp(U0),
        "passed": not failed,
        "failed": failed,
        "checks": {name: {"passed": ok, "report": report} for name, (ok, report) in checks.items()},
    }
    if is_crisp(U0):
        logger.info("U0 is crisp: fuzziness conditions hold vacuously")
    dump_json(summary, sys.stdout)
    if failed:
        logger.error(f"❌ Verification failed: {', '.join(failed)}")
        return EXIT_VERIFY_FAILED
    logger.info(f"✅ All checks passed for m={config.m} on [0, {side:.6g}]^2")
    return EXIT_OK


COMMANDS = {
    "derive": cmd_derive,
    "wave-domain": cmd_wave_domain,
    "wave-eval": cmd_wave_eval,
    "verify": cmd_verify,
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", type=str, default=None, help="JSON settings file; explicit flags override it")
    common.add_argument("--save-config", dest="save_config", type=str, default=None, help="Directory to save the resolved settings to")
    common.add_argument("--threads", type=int, default=None, help="Cap worker threads for grid scans")
    common.add_argument("--m", type=int, default=None, help="Highest series index of the kernel")
    common.add_argument("--coeff", type=str, default=None, help="Fuzzy coefficient 'a,b,c', 'a,b,c,d' or a JSON file")
    common.add_argument("--alpha-levels", dest="alpha_levels", type=int, default=None, help="Number of alpha levels")
    common.add_argument("--epsilon", type=float, default=None, help="Negativity tolerance for the kernel")

    parser = argparse.ArgumentParser(description="Fuzzy wave equation toolkit")
    sub = parser.add_subparsers(dest="subcommand", required=True)

    derive = sub.add_parser("derive", parents=[common], help="Classify the derivative of coeff ⊙ g(t)")
    derive.add_argument("--fn", required=True, choices=["exp-decay", "sin", "custom-envelope"])
    derive.add_argument("--poly", type=str, default=None, help="Polynomial factor coefficients, ascending powers")
    derive.add_argument("--t", type=float, nargs="+", required=True, help="Points at which to differentiate")

    domain = sub.add_parser("wave-domain", parents=[common], help="Search the validity domain of the kernel")
    domain.add_argument("--rect", action="store_true", help="Maximal-area rectangle instead of a square")
    domain.add_argument("--refine-tol", dest="refine_tol", type=float, default=None)
    domain.add_argument("--resolution", type=float, default=None)

    evaluate = sub.add_parser("wave-eval", parents=[common], help="Evaluate the kernel or fuzzy levels on a grid")
    evaluate.add_argument("--xmax", type=float, required=True)
    evaluate.add_argument("--tmax", type=float, required=True)
    evaluate.add_argument("--step", type=float, default=None)
    evaluate.add_argument("--fuzzy", action="store_true", help="Emit x,t,alpha,u1,u2 instead of x,t,z")
    evaluate.add_argument("--format", choices=["csv", "json"], default=None)
    evaluate.add_argument("--output", type=str, default=None, help="Output path (stdout when omitted)")

    verify = sub.add_parser("verify", parents=[common], help="Run the verification suite")
    verify.add_argument("--domain", type=float, default=None, help="Square side (default: validity square of m)")
    verify.add_argument("--scan-resolution", dest="scan_resolution", type=float, default=None)
    verify.add_argument("--refine-tol", dest="refine_tol", type=float, default=None)
    return parser


def resolve_config(args) -> RunConfig:
    settings = default_config()
    if args.config:
        settings.update(load_config_from_file(args.config))
    for key in settings:
        value = getattr(args, key, None)
        if value is not None:
            settings[key] = value
    settings["subcommand"] = args.subcommand
    return RunConfig(**settings)


def main(argv=None) -> int:
    setup_logging()
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_OK if e.code in (0, None) else EXIT_USAGE

    try:
        config = resolve_config(args)
    except OSError as e:
        logger.error(f"❌ Cannot read configuration {args.config}: {e}")
        return EXIT_IO
    except ValueError as e:
        logger.error(f"❌ Invalid configuration: {e}")
        return EXIT_USAGE
    if args.save_config:
        try:
            save_config_to_file(config.model_dump(exclude={"subcommand"}), save_dir=args.save_config)
        except OSError as e:
            logger.error(f"❌ Cannot save configuration to {args.save_config}: {e}")
            return EXIT_IO
    if config.threads is not None:
        os.environ["FUZZY_WAVE_THREADS"] = str(config.threads)

    try:
        return COMMANDS[args.subcommand](args, config)
    except ValueError as e:
        logger.error(f"❌ {e}")
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
