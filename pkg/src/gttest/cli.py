"""``gttest`` command line: test, verify, tv, simulate.

Exit codes: 0 success, 1 usage or input error, 2 numerical or check failure,
3 not applicable.
"""

from __future__ import annotations

import argparse
import os
import sys
from pathlib import Path

from .errors import GttestError, NumericalError
from .io import RunManifest, load_config, read_sample, write_csv, write_json

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_FAILURE = 2
EXIT_NOT_APPLICABLE = 3


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _emit(text: str, out: str | None) -> None:
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def _candidates(text: str) -> tuple[str, ...]:
    return tuple(c.strip() for c in text.split(",") if c.strip())


def cmd_test(args) -> int:
    from .procedure import Hypotheses, TestConfig, generalized_t_test, t_test_classical, z_test

    tool = load_config(args.config)
    threshold = args.threshold if args.threshold is not None else tool.threshold
    sample = read_sample(args.input, args.format, args.skip_header)
    h = Hypotheses(args.a, args.alt, args.b)
    cfg = TestConfig(
        level=args.level,
        applicability_threshold=threshold,
        candidates=_candidates(args.candidates),
        sigma_known=args.sigma,
        df_convention=args.df_convention,
        sub_asymptotic=args.sub_asymptotic,
        c_star=tool.c_star,
    )
    if args.method == "z":
        decision = z_test(sample, h, cfg)
    elif args.method == "t":
        decision = t_test_classical(sample, h, cfg.level, cfg.df_convention)
    else:
        decision = generalized_t_test(sample, h, cfg)
    params = {
        "input": str(args.input),
        "a": args.a,
        "alt": args.alt,
        "b": args.b,
        "level": args.level,
        "threshold": threshold,
        "candidates": list(cfg.candidates),
        "sigma": args.sigma,
        "method": args.method,
        "df_convention": args.df_convention,
        "sub_asymptotic": args.sub_asymptotic,
        "n": sample.n,
    }
    _emit(write_json(decision.to_dict(), RunManifest("test", params)), args.out)
    return EXIT_NOT_APPLICABLE if decision.outcome == "not_applicable" else EXIT_OK


def cmd_verify(args) -> int:
    from .verify import verify_theorem1, verify_theorem2

    if args.n_min <= 3:
        raise UsageError("--n-min must exceed 3")
    if args.n_max < args.n_min or args.n_step < 1:
        raise UsageError("need n_min <= n_max and n_step >= 1")
    if args.large_count < 2:
        raise UsageError("--large-count must be at least 2")
    n_values = range(args.n_min, args.n_max + 1, args.n_step)
    workers = args.workers or os.cpu_count() or 1
    if args.theorem == 1:
        report = verify_theorem1(n_values, args.large_count, workers)
    else:
        report = verify_theorem2(n_values, args.large_count, args.drift, workers)
    params = {
        "theorem": args.theorem,
        "n_min": args.n_min,
        "n_max": args.n_max,
        "n_step": args.n_step,
        "large_count": args.large_count,
        "drift": args.drift,
    }
    _emit(write_csv((r.as_row() for r in report.records), RunManifest("verify", params)), args.out)
    for f in report.failures:
        print(f, file=sys.stderr)
    return EXIT_OK if report.passed else EXIT_FAILURE


def cmd_tv(args) -> int:
    from .poisson_limit import TvBoundInputs, tv_bound, tv_tstar_vs_y_exact
    from .two_point import TwoPointLaw

    law = TwoPointLaw(args.n, args.p)
    exact = tv_tstar_vs_y_exact(law, args.truncation)
    inputs = TvBoundInputs(args.n, args.p)
    bound = tv_bound(inputs)
    payload = {
        "n": args.n,
        "p": args.p,
        "exact_tv": exact,
        "bound": bound,
        "gap": bound - exact,
        "delta": inputs.delta,
        "delta_star": inputs.delta_star,
        "eps_n": inputs.eps_n,
        "holds": exact <= bound,
    }
    manifest = RunManifest("tv", {"n": args.n, "p": args.p, "truncation": args.truncation})
    _emit(write_json(payload, manifest), args.out)
    return EXIT_OK if exact <= bound else EXIT_FAILURE


def cmd_simulate(args) -> int:
    from .two_point import RADEMACHER, MixtureLaw, TwoPointLaw, tstar_tail_exact
    from .verify import monte_carlo_tail

    if args.c:
        law = MixtureLaw(args.n, args.p, args.c, RADEMACHER)
    else:
        law = TwoPointLaw(args.n, args.p)
    mc = monte_carlo_tail(law, args.x, args.trials, args.seed)
    payload = {"estimate": mc.estimate, "std_error": mc.std_error, "trials": mc.trials, "hits": mc.hits}
    ok = True
    if isinstance(law, TwoPointLaw):
        exact = tstar_tail_exact(law, args.x)
        diff = abs(mc.estimate - exact)
        ok = diff <= 4 * mc.std_error or (mc.std_error == 0 and diff == 0)
        payload.update(exact=exact, z_score=diff / mc.std_error if mc.std_error else 0.0, within_4se=ok)
    params = {"n": args.n, "p": args.p, "c": args.c, "x": args.x, "trials": args.trials, "eta": "rademacher"}
    _emit(write_json(payload, RunManifest("simulate", params, seed=args.seed)), args.out)
    return EXIT_OK if ok else EXIT_FAILURE


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="gttest", description="Generalised T-test and self-normalised sum tools.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    t = sub.add_parser("test", help="run a test on a sample file")
    t.add_argument("input", help="CSV (one value per line) or JSON array")
    t.add_argument("--a", type=float, default=0.0, help="null mean")
    t.add_argument("--alt", choices=["two_sided", "simple", "less", "greater"], default="two_sided")
    t.add_argument("--b", type=float, default=None, help="alternative mean for --alt simple")
    t.add_argument("--level", type=float, default=0.05)
    t.add_argument("--threshold", type=float, default=None, help="applicability threshold (default from config, 0.01)")
    t.add_argument("--candidates", default="normal,student_t,poisson_y")
    t.add_argument("--sigma", type=float, default=None, help="known standard deviation (Z-test)")
    t.add_argument("--method", choices=["generalized", "z", "t"], default="generalized")
    t.add_argument("--df-convention", choices=["n_minus_1", "n"], default="n_minus_1")
    t.add_argument("--sub-asymptotic", action="store_true")
    t.add_argument("--format", choices=["auto", "csv", "json"], default="auto")
    t.add_argument("--skip-header", action="store_true")
    t.add_argument("--config", default=None, help="config file (else $GTTEST_CONFIG)")
    t.add_argument("--out", default=None)
    t.set_defaults(func=cmd_test)

    v = sub.add_parser("verify", help="check the lower bounds on an (n, x) grid")
    v.add_argument("--theorem", type=int, choices=[1, 2], required=True)
    v.add_argument("--n-min", type=int, required=True)
    v.add_argument("--n-max", type=int, required=True)
    v.add_argument("--n-step", type=int, default=1)
    v.add_argument("--large-count", type=int, default=20, help="log-spaced points on [1, sqrt(n)]")
    v.add_argument("--drift", type=float, default=0.05)
    v.add_argument("--workers", type=int, default=0, help="worker processes (0: all cores)")
    v.add_argument("--out", default=None)
    v.set_defaults(func=cmd_verify)

    tv = sub.add_parser("tv", help="exact and bounded total variation between t* and Y")
    tv.add_argument("--n", type=int, required=True)
    tv.add_argument("--p", type=float, required=True)
    tv.add_argument("--truncation", type=float, default=1e-12)
    tv.add_argument("--out", default=None)
    tv.set_defaults(func=cmd_tv)

    s = sub.add_parser("simulate", help="Monte Carlo estimate of P(t* >= x)")
    s.add_argument("--n", type=int, required=True)
    s.add_argument("--p", type=float, required=True)
    s.add_argument("--c", type=float, default=0.0, help="mixture weight c (tau ~ Bernoulli(c/n), Rademacher eta)")
    s.add_argument("--x", type=float, required=True)
    s.add_argument("--trials", type=int, default=10**6)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--out", default=None)
    s.set_defaults(func=cmd_simulate)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:  # usage errors and --help
        return int(exc.code or 0)
    try:
        return args.func(args)
    except NumericalError as exc:
        print(f"gttest: numerical failure: {exc}", file=sys.stderr)
        return EXIT_FAILURE
    except (GttestError, UsageError, ValueError) as exc:
        print(f"gttest: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
