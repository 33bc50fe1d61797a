"""Command-line benchmark driver.

Subcommands:

* ``generate``     -- write a synthetic dataset (prescribed condition
                      number, seeded response) as a LIBSVM file.
* ``run``          -- run one (problem, method, scheme) configuration and
                      write the convergence trace CSV.
* ``compare``      -- run one problem across gd/rna/dna/dna1/dna2/dna3,
                      one trace CSV per method plus a JSON summary.
* ``oracle-check`` -- evaluate the quadratic-case identities on a seeded
                      corpus and print a pass/fail table.

Exit codes: 0 success, 1 runtime failure, 2 usage error.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

import numpy as np

from .extrapolators import (
    IterateWindow,
    build_residuals,
    dna_coefficients,
    dna1_coefficients,
    make_extrapolator,
    rna_coefficients,
)
from .io import (
    LibsvmDataset,
    load_libsvm,
    write_libsvm,
    write_summary,
    write_trace,
)
from .linalg import SyntheticSpec, geometric_spectrum, make_conditioned_matrix
from .problems import LeastSquaresProblem, LogisticProblem, Problem, RidgeProblem
from .schemes import SchemeConfig, run_scheme
from .theory import (
    gd_quadratic_iterates,
    pinv_identity_check,
    random_spd,
    rate_bound,
    ratio_and_bounds,
    theory_corpus,
)

COMPARE_METHODS = ("gd", "rna", "dna", "dna1", "dna2", "dna3")


def _parse_synthetic(text: str) -> tuple[int, int, float]:
    parts = text.split(",")
    if len(parts) != 3:
        raise argparse.ArgumentTypeError("expected m,n,kappa")
    try:
        m, n, kappa = int(parts[0]), int(parts[1]), float(parts[2])
    except ValueError:
        raise argparse.ArgumentTypeError("expected m,n,kappa") from None
    if m < 1 or n < 1 or kappa < 1.0:
        raise argparse.ArgumentTypeError("need m >= 1, n >= 1, kappa >= 1")
    return m, n, kappa


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="nlaccel",
        description="Nonlinear acceleration benchmarks for gradient descent",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    gen = sub.add_parser("generate", help="write a synthetic LIBSVM dataset")
    gen.add_argument("--synthetic", type=_parse_synthetic, required=True,
                     metavar="m,n,kappa")
    gen.add_argument("--seed", type=int, required=True)
    gen.add_argument("--out", required=True)

    def add_run_flags(p: argparse.ArgumentParser) -> None:
        p.add_argument("--problem", choices=("ls", "ridge", "logistic"),
                       default="ls")
        src = p.add_mutually_exclusive_group(required=True)
        src.add_argument("--data", help="LIBSVM file path")
        src.add_argument("--synthetic", type=_parse_synthetic, metavar="m,n,kappa")
        p.add_argument("--scheme", choices=("gd", "online1", "online2", "offline"),
                       default="online1")
        p.add_argument("--window", type=int, default=3, metavar="K")
        p.add_argument("--lambda", dest="lam", type=float, default=1e-8)
        p.add_argument("--iters", type=int, default=100,
                       help="gradient evaluation budget")
        p.add_argument("--seed", type=int, required=True)
        p.add_argument("--mu", type=float, default=None,
                       help="ridge coefficient (default 1/n)")
        p.add_argument("--tau", type=float, default=None,
                       help="logistic ridge coefficient (default 1/(2m))")
        p.add_argument("--out", required=True)

    run = sub.add_parser("run", help="run one configuration, write a trace CSV")
    run.add_argument("--method", choices=COMPARE_METHODS, default="dna1")
    add_run_flags(run)

    cmp_ = sub.add_parser("compare", help="run all methods on one problem")
    add_run_flags(cmp_)

    oc = sub.add_parser("oracle-check", help="verify quadratic-case identities")
    oc.add_argument("--cases", type=int, default=100)
    oc.add_argument("--seed", type=int, default=2024)

    return parser


def _validate(parser: argparse.ArgumentParser, args: argparse.Namespace) -> None:
    if getattr(args, "window", None) is not None and args.window < 1:
        parser.error("--window must be >= 1")
    if getattr(args, "iters", None) is not None and args.window is not None:
        if args.iters < args.window + 1:
            parser.error("--iters must be at least --window + 1")
    if getattr(args, "lam", None) is not None and args.lam < 0.0:
        parser.error("--lambda must be nonnegative")
    if args.command == "compare" and args.scheme == "gd":
        parser.error("compare needs an acceleration scheme (gd is one of its rows)")


def _synthetic_dataset(m: int, n: int, kappa: float, seed: int,
                       labels_sign: bool) -> LibsvmDataset:
    spec = SyntheticSpec(m, n, geometric_spectrum(min(m, n), kappa), seed)
    A = make_conditioned_matrix(spec)
    rng = np.random.default_rng([seed, 1])
    if labels_sign:
        y = rng.choice([-1.0, 1.0], size=m)
    else:
        y = rng.standard_normal(m)
    return LibsvmDataset(A, y)


def _build_problem(args: argparse.Namespace) -> tuple[Problem, np.ndarray]:
    if args.data is not None:
        dataset = load_libsvm(args.data)
    else:
        m, n, kappa = args.synthetic
        dataset = _synthetic_dataset(m, n, kappa, args.seed,
                                     labels_sign=args.problem == "logistic")
    if dataset.n_samples == 0:
        raise ValueError("dataset has no samples")
    if args.problem == "ls":
        problem: Problem = LeastSquaresProblem(dataset.features, dataset.labels)
    elif args.problem == "ridge":
        problem = RidgeProblem(dataset.features, dataset.labels, mu=args.mu)
    else:
        problem = LogisticProblem(dataset.features.T, dataset.labels, tau=args.tau)
    x0 = np.random.default_rng([args.seed, 2]).standard_normal(problem.n)
    return problem, x0


def _run_one(problem: Problem, x0: np.ndarray, method: str,
             args: argparse.Namespace):
    if method == "gd" or args.scheme == "gd":
        cfg = SchemeConfig("plain-gd", args.window, args.iters)
        extrapolator = None
    else:
        cfg = SchemeConfig(args.scheme, args.window, args.iters)
        extrapolator = make_extrapolator(method, lam=args.lam)
    return run_scheme(problem, x0, cfg, extrapolator)


def _cmd_generate(args: argparse.Namespace) -> int:
    m, n, kappa = args.synthetic
    dataset = _synthetic_dataset(m, n, kappa, args.seed, labels_sign=False)
    write_libsvm(dataset, args.out)
    print(f"wrote {m}x{n} dataset (condition {kappa:g}) to {args.out}")
    return 0


def _cmd_run(args: argparse.Namespace) -> int:
    problem, x0 = _build_problem(args)
    method = "gd" if args.scheme == "gd" else args.method
    trace = _run_one(problem, x0, method, args)
    write_trace(trace, args.out)
    last = trace.events[-1]
    print(f"{method}: {last.grad_evals} grad evals, final gap {last.f_gap:.6e}"
          f" -> {args.out}")
    return 1 if trace.diverged else 0


def _cmd_compare(args: argparse.Namespace) -> int:
    problem, x0 = _build_problem(args)
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    summary = []
    for method in COMPARE_METHODS:
        trace = _run_one(problem, x0, method, args)
        csv_path = out_dir / f"{method}.csv"
        write_trace(trace, csv_path)
        summary.append({
            "method": method,
            "final_gap": trace.final_gap,
            "grad_evals": trace.grad_evals,
            "extrapolations": trace.extrapolation_count,
            "fallbacks": trace.fallback_count,
        })
        print(f"{method:6s} final gap {trace.final_gap:.6e} -> {csv_path}")
    write_summary(summary, out_dir / "summary.json")
    return 0


def _cmd_oracle_check(args: argparse.Namespace) -> int:
    corpus = theory_corpus(args.cases, seed=args.seed)
    identity_corpus = theory_corpus(max(50, args.cases // 2), seed=args.seed + 1,
                                    kappas=(10.0, 100.0),
                                    max_gram_cond=1e6)

    def quad_value(tc, point):
        return 0.5 * float(point @ (tc.hessian @ point))

    worst = {
        "prop-values-vs-path": 0.0,
        "ratio-identity": 0.0,
        "ratio-chain": 0.0,
        "pinv-matrix": 0.0,
        "pinv-bilinear": 0.0,
        "rate-bound-margin": 0.0,
    }
    for tc in corpus:
        window = IterateWindow(tc.window_iterates,
                               np.full(tc.window_iterates.shape[1] - 1, tc.stepsize))
        rm = build_residuals(window, np.zeros(window.n))
        bounds = ratio_and_bounds(tc.case)
        vals = bounds.values

        path_dna1 = quad_value(tc, dna1_coefficients(rm).point)
        path_rna = quad_value(tc, rna_coefficients(rm.residuals, 0.0,
                                                   iterates=rm.iterates).point)
        worst["prop-values-vs-path"] = max(
            worst["prop-values-vs-path"],
            abs(path_dna1 - vals.f_dna1) / abs(vals.f_dna1),
            abs(path_rna - vals.f_rna) / abs(vals.f_rna),
        )
        worst["ratio-identity"] = max(
            worst["ratio-identity"],
            abs(bounds.ratio_identity - bounds.ratio_closed_form)
            / bounds.ratio_closed_form,
        )
        chain_violation = max(
            1.0 - bounds.ratio_closed_form - 1e-10,
            bounds.ratio_closed_form - bounds.upper_bound * (1.0 + 1e-8),
            bounds.upper_bound - bounds.kappa * (1.0 + 1e-8),
        )
        worst["ratio-chain"] = max(worst["ratio-chain"], chain_violation)

    for tc in identity_corpus:
        report = pinv_identity_check(tc.case)
        worst["pinv-matrix"] = max(worst["pinv-matrix"], report.matrix_deviation)
        worst["pinv-bilinear"] = max(worst["pinv-bilinear"], report.bilinear_deviation)

    rng = np.random.default_rng(args.seed + 2)
    for kappa in (10.0, 100.0, 10000.0):
        for _ in range(5):
            n = 12
            A = random_spd(rng, n, kappa)
            b = rng.standard_normal(n)
            x_star = -np.linalg.solve(A, b)
            x0 = rng.standard_normal(n)
            alpha = 1.0 / float(np.linalg.eigvalsh(A)[-1])
            for k in range(1, 11):
                pts = gd_quadratic_iterates(A, b, x0, k, alpha)
                window = IterateWindow(pts, np.full(k, alpha))
                rm = build_residuals(window, b)
                point = dna_coefficients(rm).point
                err = point - x_star
                measured = float(err @ (A @ err))
                bound = rate_bound(A, x0, k, x_star=x_star)
                worst["rate-bound-margin"] = max(worst["rate-bound-margin"],
                                                 measured - bound)

    checks = [
        ("prop-values-vs-path", worst["prop-values-vs-path"], 1e-8),
        ("ratio-identity", worst["ratio-identity"], 1e-8),
        ("ratio-chain", worst["ratio-chain"], 0.0),
        ("pinv-matrix", worst["pinv-matrix"], 1e-8),
        ("pinv-bilinear", worst["pinv-bilinear"], 1e-10),
        ("rate-bound-margin", worst["rate-bound-margin"], 0.0),
    ]
    print(f"{'check':24s} {'worst':>12s} {'tol':>10s}  status")
    failed = False
    for name, value, tol in checks:
        ok = value <= tol
        failed = failed or not ok
        print(f"{name:24s} {value:12.3e} {tol:10.0e}  {'pass' if ok else 'FAIL'}")
    return 1 if failed else 0


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if args.command in ("run", "compare"):
            _validate(parser, args)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        if args.command == "generate":
            return _cmd_generate(args)
        if args.command == "run":
            return _cmd_run(args)
        if args.command == "compare":
            return _cmd_compare(args)
        return _cmd_oracle_check(args)
    except (ValueError, RuntimeError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
