"""Command-line entry point: ``entropic-context <command> [options]``.

Exit codes: 0 success, 2 input error, 3 invariant violation,
4 optimizer non-convergence.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from . import io
from .entropy import evaluate_c
from .errors import InputError, InvariantViolation
from .feasibility import FeasibilityProblem, jpd_exists
from .kcbs import kcbs_value
from .optimize import optimize_general, optimize_two_param, scan_grid
from .quantum import (
    FamilyParams,
    build_pentagon_family,
    build_symmetric_pentagram,
    check_symmetries,
)
from .sampling import estimate_c, sample_pentagon

EXIT_OK, EXIT_INPUT, EXIT_INVARIANT, EXIT_NONCONVERGED = 0, 2, 3, 4


class CliInputError(Exception):
    pass


def _read_json(path: str):
    try:
        return json.loads(Path(path).read_text())
    except OSError as exc:
        raise CliInputError(f"cannot read {path}: {exc.strerror}") from exc
    except json.JSONDecodeError as exc:
        raise CliInputError(f"malformed JSON in {path}: {exc}") from exc


def _seed(text: str) -> int:
    value = int(text)
    if not 0 <= value < 2**64:
        raise argparse.ArgumentTypeError("seed must be a 64-bit unsigned integer")
    return value


def _add_config_source(p: argparse.ArgumentParser, flag: str = "--config") -> None:
    src = p.add_argument_group("configuration (one of)")
    src.add_argument("--theta", type=float, help="family parameter theta (radians)")
    src.add_argument("--phi", type=float, help="family parameter phi (radians)")
    src.add_argument(flag, dest="config", metavar="FILE", help="JSON configuration file")
    src.add_argument("--pentagram", action="store_true", help="symmetric KCBS pentagram")


def _load_config(args):
    chosen = sum([args.config is not None, args.pentagram, args.theta is not None or args.phi is not None])
    if chosen != 1:
        raise CliInputError("give exactly one of --theta/--phi, --config/--from-config, --pentagram")
    if args.pentagram:
        return build_symmetric_pentagram()
    if args.config is not None:
        return io.config_from_dict(_read_json(args.config))
    if args.theta is None or args.phi is None:
        raise CliInputError("--theta and --phi must be given together")
    return build_pentagon_family(FamilyParams(args.theta, args.phi))


def _emit(args, payload) -> None:
    text = payload if isinstance(payload, str) else io.dumps(payload)
    sys.stdout.write(text)
    if getattr(args, "json", None):
        try:
            Path(args.json).write_text(text)
        except OSError as exc:
            raise CliInputError(f"cannot write {args.json}: {exc.strerror}") from exc


def cmd_eval(args) -> int:
    config = _load_config(args)
    report = evaluate_c(config)
    kcbs = kcbs_value(config)
    _emit(args, {
        "entropy": report.to_dict(),
        "entropic_violation": report.c_value > 0,
        "kcbs": {"sum": io.sig(kcbs.sum), "violation": io.sig(kcbs.violation)},
        "kcbs_violation": kcbs.violation > 0,
        "symmetries": list(check_symmetries(config)),
        "orthogonality_residuals": [io.sig(r, 3) for r in config.orthogonality_residuals()],
        "config": io.config_to_dict(config),
    })
    return EXIT_OK


def cmd_scan(args) -> int:
    grid = scan_grid(tuple(args.theta_range), tuple(args.phi_range), args.res)
    text = grid.to_csv()
    if args.out:
        try:
            Path(args.out).write_text(text)
        except OSError as exc:
            raise CliInputError(f"cannot write {args.out}: {exc.strerror}") from exc
        th, ph, c = grid.argmax()
        sys.stdout.write(io.dumps({"out": args.out, "nodes": int(grid.values.size),
                                   "max": {"theta": io.sig(th), "phi": io.sig(ph), "C": io.sig(c)}}))
    else:
        sys.stdout.write(text)
    return EXIT_OK


def cmd_optimize(args) -> int:
    if args.mode == "two-param":
        if args.theta is not None or args.phi is not None:
            if args.theta is None or args.phi is None:
                raise CliInputError("--theta and --phi must be given together")
            start = FamilyParams(args.theta, args.phi)
        else:
            th, ph, _ = scan_grid(resolution=args.res).argmax()
            start = FamilyParams(th, ph)
        res = optimize_two_param(start, args.tolerance, args.max_iter)
        config = build_pentagon_family(res.params)
        payload = {
            "mode": "two-param",
            "start": {"theta": io.sig(start.theta), "phi": io.sig(start.phi)},
            "theta": io.sig(res.params.theta),
            "phi": io.sig(res.params.phi),
            "C": io.sig(res.c_star),
            "converged": res.converged,
            "on_boundary": res.on_boundary,
        }
        converged = res.converged
    else:
        res = optimize_general(args.seed, args.restarts, complex_search=args.complex)
        config = res.config
        payload = {
            "mode": "general",
            "seed": args.seed,
            "restarts": args.restarts,
            "complex": args.complex,
            "angles": [io.sig(a) for a in res.angles],
            "C": io.sig(res.c_star),
            "converged": True,
        }
        converged = True
    payload["kcbs_violation"] = io.sig(kcbs_value(config).violation)
    payload["symmetries"] = list(check_symmetries(config, 1e-3))
    payload["config"] = io.config_to_dict(config)
    _emit(args, payload)
    return EXIT_OK if converged else EXIT_NONCONVERGED


def cmd_feasibility(args) -> int:
    if args.marginals is not None:
        if args.config is not None or args.pentagram or args.theta is not None or args.phi is not None:
            raise CliInputError("--marginals excludes other configuration sources")
        problem = FeasibilityProblem.from_dict(_read_json(args.marginals))
    else:
        problem = FeasibilityProblem.from_config(_load_config(args))
    result = jpd_exists(problem)
    payload = result.to_dict()
    if not args.witness:
        payload.pop("witness", None)
    _emit(args, payload)
    return EXIT_OK


def cmd_sample(args) -> int:
    config = _load_config(args)
    counts = sample_pentagon(config, args.shots, args.seed)
    est = estimate_c(counts, args.resamples, args.seed, miller_madow=args.miller_madow)
    payload = est.to_dict()
    payload["seed"] = args.seed
    payload["C_exact"] = io.sig(evaluate_c(config).c_value)
    payload["counts"] = [{f"{a}{b}": k for (a, b), k in c.items()} for c in counts]
    _emit(args, payload)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="entropic-context", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("eval", help="entropic and pentagram values of one configuration")
    _add_config_source(p)
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("scan", help="C over the (theta, phi) grid as CSV")
    p.add_argument("--res", type=int, default=200)
    p.add_argument("--out", metavar="FILE")
    p.add_argument("--theta-range", type=float, nargs=2, default=(0.0, np.pi / 2), metavar=("LO", "HI"))
    p.add_argument("--phi-range", type=float, nargs=2, default=(0.0, np.pi / 4), metavar=("LO", "HI"))
    p.set_defaults(func=cmd_scan)

    p = sub.add_parser("optimize", help="maximize C")
    p.add_argument("--mode", choices=("two-param", "general"), default="two-param")
    p.add_argument("--restarts", type=int, default=50)
    p.add_argument("--seed", type=_seed, default=0)
    p.add_argument("--res", type=int, default=200, help="grid used to seed the two-param search")
    p.add_argument("--theta", type=float, help="explicit two-param start")
    p.add_argument("--phi", type=float)
    p.add_argument("--tolerance", type=float, default=1e-9)
    p.add_argument("--max-iter", type=int, default=5000, help="two-param iteration budget")
    p.add_argument("--complex", action="store_true", help="complex-amplitude general search")
    p.set_defaults(func=cmd_optimize)

    p = sub.add_parser("feasibility", help="does a joint distribution exist?")
    p.add_argument("--marginals", metavar="FILE", help='JSON {"n", "edges", "tables"}')
    _add_config_source(p, "--from-config")
    p.add_argument("--witness", action="store_true", help="include the witness table")
    p.set_defaults(func=cmd_feasibility)

    p = sub.add_parser("sample", help="finite-shot estimate of C with bootstrap CI")
    _add_config_source(p)
    p.add_argument("--shots", type=int, default=10**6)
    p.add_argument("--seed", type=_seed, default=0)
    p.add_argument("--resamples", type=int, default=1000)
    p.add_argument("--miller-madow", action="store_true")
    p.set_defaults(func=cmd_sample)

    for name in ("eval", "scan", "optimize", "feasibility", "sample"):
        sub.choices[name].add_argument("--json", metavar="FILE", help="also write the output to FILE")
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (CliInputError, InputError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except InvariantViolation as exc:
        print(f"invariant violation: {exc}", file=sys.stderr)
        return EXIT_INVARIANT


if __name__ == "__main__":
    sys.exit(main())
