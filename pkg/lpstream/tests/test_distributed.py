"""
LPStream: Distributed Model Test Suite

Run from the project root:
    python -m lpstream.tests.test_distributed
or through pytest.

Tests (in order):
    1. Quota allocation: multinomial split of m over machine weights
    2. Load meter: words per endpoint and round, aliasing
    3. One machine: the coordinator run reproduces multipass
    4. Load budget: k in {2, 4, 8}, rounds = 2 + 3 * iterations
    5. Parallel model: machine 0 carries the coordinator's traffic
    6. Schedulers and SVM: threaded replies match round-robin, one setup round
    7. Protocol errors: empty partitions, deletions, unknown scheduler
    8. Global sampling: draws are uniform over the union of the machines
    9. Duplicates: repeating every point on its machine changes nothing
"""

import sys

import numpy as np
import pytest
from scipy.stats import chisquare

from lpstream.core import SolverParams
from lpstream.core.solution import Ball
from lpstream.distributed import (
    COORDINATOR,
    Coordinator,
    LoadMeter,
    SampleBatch,
    SolutionBroadcast,
    allocate_quotas,
    run_coordinator,
    run_parallel,
)
from lpstream.errors import EmptyInputError, ProtocolError, UsageError
from lpstream.problems import MebProblem, SvmProblem, exact_meb
from lpstream.streams import delete, insert, run_multipass
from lpstream.tests.helpers import (
    check,
    header,
    labeled_events,
    lattice_points,
    meb_events,
    run_suite,
    separable_points,
)

LOAD_SLACK = 16


def _split(events, k: int) -> list:
    return [events[i::k] for i in range(k)]


# ============================================================
# Test 1: Quota allocation
# ============================================================
def test_allocate_quotas():
    header("Test 1: Quota allocation")
    rng = np.random.default_rng(0)
    check(allocate_quotas([3.0], 50, rng) == [50], "one machine takes the whole sample")
    check(allocate_quotas([0.0, 2.0, 0.0], 40, rng) == [0, 40, 0], "zero-weight machines get nothing")

    quotas = allocate_quotas([1.0, 1.0, 2.0], 100_000, np.random.default_rng(1))
    check(sum(quotas) == 100_000, "quotas add up to m")
    shares = np.array(quotas) / 100_000
    check(np.allclose(shares, [0.25, 0.25, 0.5], atol=0.01), f"shares follow the weights: {shares.round(3)}")

    with pytest.raises(EmptyInputError):
        allocate_quotas([0.0, 0.0], 5, rng)
    check(True, "all-zero weights")
    with pytest.raises(UsageError):
        allocate_quotas([1.0, -1.0], 5, rng)
    check(True, "negative weight")


# ============================================================
# Test 2: Load meter
# ============================================================
def test_load_meter():
    header("Test 2: Load meter")
    meter = LoadMeter()
    with pytest.raises(ProtocolError):
        meter.record(SampleBatch("machine-0", COORDINATOR, (1, 2)))
    check(True, "messages outside a round are rejected")

    ball = Ball((0.0, 0.0), 1.0)
    meter.begin_round("broadcast")
    for name in ("machine-0", "machine-1"):
        meter.record(SolutionBroadcast(COORDINATOR, name, ball))
    meter.begin_round("batches")
    meter.record(SampleBatch("machine-0", COORDINATOR, (1, 2, 3)))
    meter.record(SampleBatch("machine-1", COORDINATOR, (4,)))

    report = meter.report()
    check(report.rounds == 2, "two rounds")
    check(report.rows[0]["load"] == 2 * ball.words, "broadcast load is k * S_f at the coordinator")
    check(report.rows[1]["per_endpoint"] == {COORDINATOR: 4, "machine-0": 3, "machine-1": 1}, "batch words per endpoint")
    check(report.max_round_load == 4 and report.totals[COORDINATOR] == 8, "max load and totals")

    aliased = LoadMeter({COORDINATOR: "machine-0"})
    aliased.begin_round("batches")
    aliased.record(SampleBatch("machine-0", COORDINATOR, (1, 2, 3)))
    aliased.record(SampleBatch("machine-1", COORDINATOR, (4,)))
    check(aliased.report().rows[0]["per_endpoint"] == {"machine-0": 7, "machine-1": 1},
          "aliased self-messages count as sent and received")


# ============================================================
# Test 3: One machine
# ============================================================
def test_single_machine_matches_multipass():
    header("Test 3: One machine")
    events = meb_events(lattice_points(40, 2, 30, seed=21))
    params = SolverParams(eps=0.1, seed=4)

    reference, passes = run_multipass(events, MebProblem(2), params)
    outcome, load = run_coordinator([events], MebProblem(2), params)
    check(outcome.solution == reference.solution, "k = 1 gives the multipass ball")
    check(outcome.iterations == reference.iterations, f"same iteration count ({outcome.iterations})")
    check([r.violators for r in outcome.trace] == [r.violators for r in reference.trace], "same violator trace")
    check(load.init_rounds == 2 and load.rounds == 2 + 3 * outcome.iterations, f"{load.rounds} rounds, 2 of them setup")

    parallel, _ = run_parallel([events], MebProblem(2), params)
    check(parallel.solution == outcome.solution, "parallel k = 1 matches the coordinator")


# ============================================================
# Test 4: Load budget
# ============================================================
def test_load_budget():
    header("Test 4: Load budget")
    points = lattice_points(120, 2, 60, seed=5)
    events = meb_events(points)
    oracle = exact_meb(points).radius
    for k in (2, 4, 8):
        outcome, load = run_coordinator(_split(events, k), MebProblem(2), SolverParams(eps=0.1, seed=k))
        budget = outcome.plan.m + k * Ball.words + 2 * k + LOAD_SLACK
        check(all(row["load"] <= budget for row in load.rows), f"k={k}: every round within {budget} words")
        check(load.rounds == 2 + 3 * outcome.iterations, f"k={k}: {load.rounds} rounds for {outcome.iterations} iterations")
        check(outcome.iterations <= 6 * outcome.plan.nu * outcome.plan.s, f"k={k}: iterations within 6 nu s")
        ratio = outcome.solution.radius / oracle
        check(1 <= ratio <= 1.9, f"k={k}: radius ratio {ratio:.4f}")


# ============================================================
# Test 5: Parallel model
# ============================================================
def test_parallel_load_identity():
    header("Test 5: Parallel model")
    partitions = _split(meb_events(lattice_points(60, 2, 25, seed=9)), 4)
    params = SolverParams(eps=0.1, seed=12)

    coordinated, coordinator_load = run_coordinator(partitions, MebProblem(2), params)
    parallel, parallel_load = run_parallel(partitions, MebProblem(2), params)
    check(parallel.solution == coordinated.solution, "same ball under both models")
    check(parallel_load.rounds == coordinator_load.rounds, "same round count")

    for row_c, row_p in zip(coordinator_load.rows, parallel_load.rows):
        folded = row_c["per_endpoint"].get(COORDINATOR, 0) + row_c["per_endpoint"].get("machine-0", 0)
        assert row_p["per_endpoint"].get("machine-0", 0) == folded, row_c["label"]
        assert COORDINATOR not in row_p["per_endpoint"], row_p["label"]
    check(True, "machine 0 load = coordinator load + its own load, every round")


# ============================================================
# Test 6: Schedulers and SVM
# ============================================================
def test_schedulers_agree():
    header("Test 6: Schedulers and SVM")
    points, labels = separable_points(30, 2, 0.5, seed=3)
    partitions = _split(labeled_events(points, labels), 3)
    params = SolverParams(eps=0.1, seed=8)

    serial, serial_load = run_coordinator(partitions, SvmProblem(2, 0.5), params)
    threaded, threaded_load = run_coordinator(partitions, SvmProblem(2, 0.5), params, scheduler="threaded")
    check(threaded.solution == serial.solution, "threaded scheduler returns the same separator")
    check(threaded_load.rows == serial_load.rows, "and the same load table")
    check(serial_load.init_rounds == 1, "origin-anchored problems need one setup round")
    check(serial_load.rounds == serial_load.init_rounds + 3 * serial.iterations, f"{serial_load.rounds} rounds for {serial.iterations} iterations")
    check(all(y * (np.dot(serial.solution.u, z) - serial.solution.b) > 0 for z, y in zip(points, labels)),
          "separator classifies every point")


# ============================================================
# Test 7: Protocol errors
# ============================================================
def test_protocol_errors():
    header("Test 7: Protocol errors")
    with pytest.raises(EmptyInputError):
        run_coordinator([[], []], MebProblem(2), SolverParams())
    check(True, "every partition empty")

    with pytest.raises(UsageError):
        run_coordinator([[insert((1.0, 1.0)), delete((1.0, 1.0))]], MebProblem(2), SolverParams())
    check(True, "partitions are insert-only")

    with pytest.raises(UsageError):
        run_coordinator([[insert((1.0, 1.0))]], MebProblem(2), SolverParams(), scheduler="async")
    check(True, "unknown scheduler")

    outcome, _ = run_coordinator([[insert((1.0, 1.0))], []], MebProblem(2), SolverParams())
    check(outcome.solution == Ball((1.0, 1.0), 0.0), "an empty machine next to a busy one is fine")


# ============================================================
# Test 8: Global sampling
# ============================================================
def test_global_sampling_is_uniform():
    header("Test 8: Global sampling")
    points = [(float(i), 0.0) for i in range(20)]
    partitions = [meb_events(points[:2]), meb_events(points[2:8]), meb_events(points[8:])]
    params = SolverParams(eps=0.1, seed=3, backend="exact")
    coordinator = Coordinator(MebProblem(2), params)
    for partition in partitions:
        coordinator.add_machine(partition)
    coordinator.initialize()

    reports = [machine.weight_report(0) for machine in coordinator.machines]
    weights = [sum(report.counts) for report in reports]
    check(weights == [2, 6, 12], f"machine weights are their distinct point counts: {weights}")

    quotas = allocate_quotas(weights, 10_000, np.random.default_rng(5))
    draws = [i for machine, quota in zip(coordinator.machines, quotas) for i in machine.sample_batch(0, quota).indices]
    _, observed = np.unique(draws, return_counts=True)
    check(len(draws) == 10_000 and len(observed) == 20, "10000 draws over 20 distinct snapped points")
    p_value = chisquare(observed).pvalue
    check(p_value > 0.001, f"each point drawn with probability 1/20 across machines (chi-square p = {p_value:.4f})")


# ============================================================
# Test 9: Duplicates
# ============================================================
def test_duplicates_across_machines():
    header("Test 9: Duplicates")
    partitions = _split(meb_events(lattice_points(30, 2, 20, seed=13)), 3)
    repeated = [[event for event in part for _ in range(50)] for part in partitions]
    params = SolverParams(eps=0.1, seed=21)

    once, once_load = run_coordinator(partitions, MebProblem(2), params)
    many, many_load = run_coordinator(repeated, MebProblem(2), params)
    check(many.solution == once.solution, "every point x50 on its machine: same ball")
    check(many.iterations == once.iterations and many_load.rounds == once_load.rounds, "same iterations and rounds")


# ============================================================
# Main
# ============================================================
def main():
    return run_suite("Distributed Model Test Suite", [
        test_allocate_quotas,
        test_load_meter,
        test_single_machine_matches_multipass,
        test_load_budget,
        test_parallel_load_identity,
        test_schedulers_agree,
        test_protocol_errors,
        test_global_sampling_is_uniform,
        test_duplicates_across_machines,
    ])


if __name__ == "__main__":
    sys.exit(main())
