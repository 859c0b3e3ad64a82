"""
LPStream: Command-line Solver

Solve an LP-type problem over a stream file and write a JSON report.

Usage:
    # MEB over an insert-only point file, 12 passes or so
    python -m lpstream.cli.run_solver --problem meb --input points.txt

    # Same points with deletions, checked against the exact ball
    python -m lpstream.cli.run_solver --problem meb --model turnstile --input churn.txt --verify

    # Four machines and a coordinator, one partition file each
    python -m lpstream.cli.run_solver --problem svm --gamma 0.2 --model coordinator \
        --input p0.txt --input p1.txt --input p2.txt --input p3.txt

Exit codes: 0 solution, 2 infeasible, 1 error.
"""

import argparse
import logging
import sys
from typing import Optional

from pydantic import ValidationError

from lpstream.cli.report import MODELS, PROBLEMS, RunConfig, RunReport, emit_report
from lpstream.config import DEFAULT_DELTA_BOUND, DEFAULT_RUN_SETTINGS
from lpstream.errors import LpStreamError, VerifyRefusedError
from lpstream.pipeline import SolverPipeline

logger = logging.getLogger("run_solver")

EXIT_SOLUTION = 0
EXIT_ERROR = 1
EXIT_INFEASIBLE = 2


def setup_logging(verbose: bool = False, log_file: Optional[str] = None):
    handlers = [logging.StreamHandler(sys.stdout)]
    if log_file:
        handlers.append(logging.FileHandler(log_file, encoding="utf-8"))
    level = logging.DEBUG if verbose else getattr(logging, DEFAULT_RUN_SETTINGS["log_level"].upper(), logging.INFO)
    logging.basicConfig(
        level=level,
        format="%(asctime)s [%(levelname)s] %(name)s: %(message)s",
        handlers=handlers,
        force=True,
    )


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        description="LPStream: LP-type problems over streams and distributed partitions"
    )
    parser.add_argument("--problem", required=True, choices=PROBLEMS, help="Problem class")
    parser.add_argument(
        "--model", default="multipass", choices=MODELS,
        help="Computation model (default: multipass)"
    )
    parser.add_argument(
        "--input", dest="inputs", action="append", required=True,
        help="Stream file; repeat once per machine for the distributed models"
    )
    parser.add_argument("--eps", type=float, default=0.1, help="Approximation parameter (default: 0.1)")
    parser.add_argument("--s", type=int, default=None, help="Pass/space trade-off (default: ceil(ln N))")
    parser.add_argument("--gamma", type=float, default=1.0, help="SVM margin lower bound (default: 1.0)")
    parser.add_argument(
        "--machines", type=int, default=1,
        help="Machines when a single input is split round-robin (default: 1)"
    )
    parser.add_argument(
        "--seed", type=int, default=DEFAULT_RUN_SETTINGS["seed"],
        help=f"Master seed (default: {DEFAULT_RUN_SETTINGS['seed']})"
    )
    parser.add_argument(
        "--backend", default=DEFAULT_RUN_SETTINGS["backend"], choices=["exact", "randomized", "sketch"],
        help=f"Sketch backend (default: {DEFAULT_RUN_SETTINGS['backend']})"
    )
    parser.add_argument("--dim", type=int, default=None, help="Dimension (default: inferred from the input)")
    parser.add_argument(
        "--delta-bound", type=int, default=DEFAULT_DELTA_BOUND,
        help=f"Turnstile coordinate bound in grid units (default: {DEFAULT_DELTA_BOUND})"
    )
    parser.add_argument(
        "--unit", type=float, default=1.0,
        help="MEB input resolution: smallest non-zero distance between points (default: 1.0)"
    )
    parser.add_argument("--sparsity", type=int, default=None, help="SDP row sparsity S (default: d*d)")
    parser.add_argument("--frobenius", type=float, default=1.0, help="SDP entry bound (default: 1.0)")
    parser.add_argument(
        "--objective", type=float, nargs="+", default=None,
        help="LP objective c, or SDP objective C row-major (default: e1 / e1 e1^T)"
    )
    parser.add_argument(
        "--centering", default="binary", choices=["binary", "bucketed"],
        help="Turnstile radius search (default: binary)"
    )
    parser.add_argument(
        "--scheduler", default="round_robin", choices=["round_robin", "threaded"],
        help="Machine scheduler for distributed models (default: round_robin)"
    )
    parser.add_argument("--workers", type=int, default=1, help="Shards per pass (default: 1)")
    parser.add_argument("--sample-size", type=int, default=None, help="Override m (default: derived)")
    parser.add_argument(
        "--iteration-factor", type=float, default=DEFAULT_RUN_SETTINGS["iteration_factor"],
        help=f"Iteration cap = factor * nu * s (default: {DEFAULT_RUN_SETTINGS['iteration_factor']})"
    )
    parser.add_argument("--verify", action="store_true", help="Compare with the brute-force oracle")
    parser.add_argument("--report", default=None, help="Write the JSON report here")
    parser.add_argument(
        "--log-file", default=DEFAULT_RUN_SETTINGS["log_file"],
        help="Also log to this file"
    )
    parser.add_argument("--verbose", "-v", action="store_true", help="Show per-iteration debug output")
    return parser


def print_summary(report: RunReport):
    print("\n" + "=" * 60)
    print("RUN SUMMARY")
    print("=" * 60)
    print(f"Problem:     {report.problem} (d={report.dimension})")
    print(f"Model:       {report.model}")
    print(f"Status:      {report.status}")
    print(f"Solution:    {report.solution}")
    print(f"Iterations:  {report.iterations} ({report.successful_iterations} successful)")
    if report.passes is not None:
        print(f"Passes:      {report.passes} ({report.centering_passes} centering)")
    if report.rounds is not None:
        print(f"Rounds:      {report.rounds} ({report.init_rounds} setup)")
        print(f"Max load:    {report.max_round_load} words ({report.max_round_load_detail} per-class)")
    print(f"Peak words:  {report.peak_words}")
    print(f"Universe:    {report.universe_size}")
    if report.verify is not None:
        print(f"\nVerify ({report.verify.oracle}):")
        print(f"  Oracle value:  {report.verify.oracle_value}")
        print(f"  Output value:  {report.verify.output_value}")
        print(f"  Ratio:         {report.oracle_ratio}")
        print(f"  Feasible:      {report.verify.feasible_for_all}")
    print("=" * 60)


def main(argv: Optional[list] = None) -> int:
    args = build_parser().parse_args(argv)
    setup_logging(args.verbose, args.log_file)

    try:
        config = RunConfig(
            problem=args.problem, model=args.model, inputs=args.inputs, eps=args.eps, s=args.s,
            gamma=args.gamma, machines=args.machines, seed=args.seed, backend=args.backend,
            dim=args.dim, delta_bound=args.delta_bound, unit=args.unit, sparsity=args.sparsity,
            frobenius=args.frobenius, objective=args.objective, centering=args.centering,
            scheduler=args.scheduler, workers=args.workers, sample_size=args.sample_size,
            iteration_factor=args.iteration_factor, verify=args.verify, report=args.report,
        )
    except ValidationError as e:
        logger.error(f"Invalid parameters:\n{e}")
        return EXIT_ERROR

    try:
        report = SolverPipeline(config).run()
    except VerifyRefusedError as e:
        logger.warning(f"Verify refused: {e}")
        return EXIT_ERROR
    except (LpStreamError, OSError) as e:
        logger.error(f"Run failed: {e}")
        return EXIT_ERROR

    emit_report(report, config.report)
    print_summary(report)
    return EXIT_INFEASIBLE if report.status == "infeasible" else EXIT_SOLUTION


if __name__ == "__main__":
    sys.exit(main())
