"""Command-line entry point.

Exit codes: 0 success, 1 parse or domain error, 2 audit falsified,
3 audit inconclusive, 4 credence already a probability, 5 no dominator
found, 6 verification failed.
"""
from __future__ import annotations

import argparse
import os
import sys
import time
from concurrent.futures import ThreadPoolExecutor


from . import __version__
from .core import DomainError, OutcomeSpace
from .dominance import EmptySample, FinderConfig, find_dominating_probability, sample_score_set, verify_domination
from .geometry import IndeterminateForm, SolverError
from .io import dumps, file_digest, parse_credence, parse_rule, parse_weights, read_json
from .oracle import OracleConfig, oracle_dominator, oracle_expected_minimizer, oracle_lp_check
from .propriety import AUDITS, AuditConfig, combined_verdict

EXIT_OK, EXIT_ERROR, EXIT_FALSIFIED, EXIT_INCONCLUSIVE = 0, 1, 2, 3
EXIT_ALREADY, EXIT_NOT_FOUND, EXIT_UNVERIFIED = 4, 5, 6


class CliError(Exception):
    pass


def threads() -> int:
    raw = os.environ.get("DOMKIT_THREADS", "0")
    try:
        value = int(raw)
    except ValueError:
        raise CliError(f"DOMKIT_THREADS must be an integer, got {raw!r}")
    if value < 0:
        raise CliError("DOMKIT_THREADS must be nonnegative")
    return value or (os.cpu_count() or 1)


def _manifest(args, config: dict, inputs: list[str], started: float) -> dict:
    return {
        "command": args.command,
        "config": config,
        "seed": args.seed,
        "version": __version__,
        "input_digests": {path: file_digest(path) for path in inputs},
        "duration_s": time.perf_counter() - started,
    }


def _emit(args, text: str):
    if getattr(args, "out", None):
        with open(args.out, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _space(args) -> OutcomeSpace:
    if args.outcomes is None or args.outcomes < 1:
        raise CliError("--outcomes N (N >= 1) is required")
    return OutcomeSpace.of_size(args.outcomes)


def cmd_audit(args, started) -> int:
    rule = parse_rule(read_json(args.rule))
    space = _space(args)
    cfg = AuditConfig(
        interior_grid=args.grid,
        random_trials=args.random if args.random is not None else 200,
        seed=args.seed,
        metric_tol=args.tol if args.tol is not None else 1e-3,
    )
    with ThreadPoolExecutor(max_workers=min(threads(), len(AUDITS))) as pool:
        reports = list(pool.map(lambda audit: audit(rule, space, cfg), AUDITS.values()))
    verdict = combined_verdict(reports)
    config = {"rule": rule.to_dict(), "outcomes": list(space.labels), "audit": cfg.__dict__}
    out = {
        "verdict": verdict,
        "reports": [r.to_dict() for r in reports],
        "manifest": _manifest(args, config, [args.rule], started),
    }
    _emit(args, dumps(out) + "\n")
    return {"passed": EXIT_OK, "falsified": EXIT_FALSIFIED}.get(verdict, EXIT_INCONCLUSIVE)


def _finder_config(args) -> FinderConfig:
    kwargs = {"seed": args.seed}
    if args.grid is not None:
        kwargs["grid_m"] = args.grid
    if args.random is not None:
        kwargs["random_samples"] = args.random
    if args.epsilon is not None:
        kwargs["epsilon"] = args.epsilon
        kwargs["refine_tol"] = min(1e-7, args.epsilon / 10)
    if getattr(args, "tol", None) is not None:
        kwargs["prob_tol"] = args.tol
    return FinderConfig(**kwargs)


def cmd_dominate(args, started) -> int:
    rule = parse_rule(read_json(args.rule))
    space, c = parse_credence(read_json(args.credence))
    cfg = _finder_config(args)
    result = find_dominating_probability(rule, space, c, cfg)
    out = result.to_dict()
    out["config"] = cfg.to_dict() | {"rule": rule.to_dict()}
    out["manifest"] = _manifest(args, out["config"], [args.rule, args.credence], started)
    _emit(args, dumps(out) + "\n")
    if result.status == "certificate":
        return EXIT_OK
    if result.status == "already_probability":
        print("credence is already a probability; nothing can dominate it", file=sys.stderr)
        return EXIT_ALREADY
    print(f"no dominator found at stage {result.stage} (t* = {result.tstar!r})", file=sys.stderr)
    return EXIT_NOT_FOUND


def cmd_verify(args, started) -> int:
    rule = parse_rule(read_json(args.rule))
    space, c = parse_credence(read_json(args.credence))
    p = parse_weights(read_json(args.p))
    if p.n != space.n:
        raise CliError(f"p has {p.n} weights but the credence has {space.n} outcomes")
    margins, dominated = verify_domination(rule, space, p, c)
    out = {
        "dominated": dominated,
        "p": p.v.tolist(),
        "margins": margins.tolist(),
        "manifest": _manifest(args, {"rule": rule.to_dict()}, [args.rule, args.credence, args.p], started),
    }
    _emit(args, dumps(out) + "\n")
    return EXIT_OK if dominated else EXIT_UNVERIFIED


def cmd_sample_scores(args, started) -> int:
    rule = parse_rule(read_json(args.rule))
    space = _space(args)
    kwargs = {"seed": args.seed}
    if args.grid is not None:
        kwargs["grid_m"] = args.grid
    if args.random is not None:
        kwargs["random_samples"] = args.random
    D = sample_score_set(rule, space, FinderConfig(**kwargs))
    _emit(args, D.to_csv())
    return EXIT_OK


def cmd_oracle(args, started) -> int:
    if args.kind == "lp":
        data = read_json(args.points)
        t = oracle_lp_check(data["points"], data["z"], args.lambda_grid)
        out = {"tstar": t}
        inputs = [args.points]
        config = {"lambda_grid": args.lambda_grid}
    else:
        rule = parse_rule(read_json(args.rule))
        if args.kind == "dominator":
            space, c = parse_credence(read_json(args.credence))
            cfg = OracleConfig(simplex_grid=args.grid or 50)
            res = oracle_dominator(rule, space, c, cfg)
            out = {"p": res.p.tolist(), "min_margin": res.min_margin, "margins": res.margins.tolist()}
            inputs = [args.rule, args.credence]
        else:
            p = parse_weights(read_json(args.p))
            space = OutcomeSpace.of_size(p.n)
            cfg = OracleConfig(credence_grid=args.step)
            res = oracle_expected_minimizer(rule, space, p, cfg)
            out = {"credence": res.credence.tolist(), "expected": res.expected}
            inputs = [args.rule, args.p]
        config = cfg.__dict__ | {"rule": rule.to_dict()}
    out["manifest"] = _manifest(args, config, inputs, started)
    _emit(args, dumps(out) + "\n")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="domkit", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, rule=True):
        if rule:
            p.add_argument("--rule", required=True, help="scoring rule JSON file")
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--out", help="write output here instead of standard output")

    p = sub.add_parser("audit", help="audit propriety, continuity and closure hypotheses")
    common(p)
    p.add_argument("--outcomes", type=int, required=True)
    p.add_argument("--grid", type=int)
    p.add_argument("--random", type=int)
    p.add_argument("--tol", type=float, help="metric tolerance for the topology audits")
    p.set_defaults(func=cmd_audit)

    p = sub.add_parser("dominate", help="find a probability dominating a credence")
    common(p)
    p.add_argument("--credence", required=True)
    p.add_argument("--grid", type=int)
    p.add_argument("--random", type=int)
    p.add_argument("--epsilon", type=float)
    p.add_argument("--tol", type=float, help="tolerance of the probability check")
    p.set_defaults(func=cmd_dominate)

    p = sub.add_parser("verify", help="check that p strictly dominates a credence")
    common(p)
    p.add_argument("--credence", required=True)
    p.add_argument("--p", required=True, help="weights JSON: a list, or a certificate")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("sample-scores", help="export sampled finite scores as CSV")
    common(p)
    p.add_argument("--outcomes", type=int, required=True)
    p.add_argument("--grid", type=int)
    p.add_argument("--random", type=int)
    p.set_defaults(func=cmd_sample_scores)

    p = sub.add_parser("oracle", help="brute-force reference computations")
    osub = p.add_subparsers(dest="kind", required=True)
    q = osub.add_parser("dominator", help="best dominator on a simplex grid")
    common(q)
    q.add_argument("--credence", required=True)
    q.add_argument("--grid", type=int)
    q = osub.add_parser("minimizer", help="credence minimizing expected score under p")
    common(q)
    q.add_argument("--p", required=True)
    q.add_argument("--step", type=float, default=0.05)
    q = osub.add_parser("lp", help="grid value of the hull improvement LP")
    common(q, rule=False)
    q.add_argument("--points", required=True, help='JSON {"points": [[..]], "z": [..]}')
    q.add_argument("--lambda-grid", type=int, default=1000)
    p.set_defaults(func=cmd_oracle)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_ERROR
    started = time.perf_counter()
    try:
        return args.func(args, started)
    except (CliError, ValueError, KeyError, TypeError, OSError, DomainError, EmptySample,
            IndeterminateForm, SolverError) as exc:
        print(f"domkit: error: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
