"""
LPStream: Solver Core Test Suite

Run from the project root:
    python -m lpstream.tests.test_core
or through pytest.

Tests (in order):
    1. Seeds: derived seeds are reproducible and key-separated
    2. Iteration plan: s, mu, m and the iteration cap
    3. Class weights: scaled totals and the success test
    4. Solve: small MEB through an in-memory pass source
    5. Deletions: a deleted far point does not widen the ball
    6. Sharded passes: worker count does not change the outcome
    7. Budget: iteration cap raises IterationBudgetExceeded
    8. Sampling pass: singleton input, uniform draws at t = 0, class picks by weight
    9. Violator check: planted violators against exact counts
   10. Weight exponents: stored solutions violated, recounted by hand
   11. Success frequency: most iterations succeed on random MEB inputs
   12. Termination: the returned solution has no violator among all points
"""

import math
import sys

import numpy as np
import pytest
from scipy.stats import chisquare

from lpstream.core import (
    Ball,
    IterationPlan,
    NetAnchor,
    SeedPurpose,
    SolverParams,
    UpdateListSource,
    WeightOracle,
    check_violators_weight,
    choose_classes,
    derive_rng,
    derive_seed,
    is_successful,
    sample_m_points,
    scaled_class_weights,
    solve,
    weight_exponent,
)
from lpstream.errors import IterationBudgetExceeded, SketchUsageError, UsageError
from lpstream.problems import MebProblem, exact_meb
from lpstream.tests.helpers import check, header, lattice_points, run_suite


def _meb_source(points, deleted=(), eps=0.1, clamp=False):
    """Radial snapper anchored at the first point, and the signed updates of all points."""
    problem = MebProblem(len(points[0]))
    center = np.asarray(points[0])
    r_max = max(float(np.linalg.norm(np.asarray(p) - center)) for p in points)
    snapper = problem.build_snapper(eps, NetAnchor(points[0], r_max, clamp=clamp))
    updates = [(snapper.snap(p), 1) for p in list(points) + list(deleted)]
    updates += [(snapper.snap(p), -1) for p in deleted]
    return problem, UpdateListSource(updates, snapper.size, snapper.unsnap)


def _assert_encloses(ball, points):
    center = np.asarray(ball.center)
    worst = max(float(np.linalg.norm(np.asarray(p) - center)) for p in points)
    check(worst <= ball.radius * (1 + 1e-9), f"every point inside the ball (max distance {worst:.4f} <= {ball.radius:.4f})")


# ============================================================
# Test 1: Seeds
# ============================================================
def test_seeds():
    header("Test 1: Seeds")
    a = derive_seed(7, SeedPurpose.SAMPLE_BANK, 0, 1)
    check(a == derive_seed(7, SeedPurpose.SAMPLE_BANK, 0, 1), "same key, same seed")
    check(0 <= a < 1 << 64, "seeds are 64-bit")
    others = {
        derive_seed(7, SeedPurpose.SAMPLE_BANK, 0, 2),
        derive_seed(7, SeedPurpose.CHECK_BANK, 0, 1),
        derive_seed(8, SeedPurpose.SAMPLE_BANK, 0, 1),
    }
    check(a not in others and len(others) == 3, "class, purpose and master seed all separate the streams")

    first = derive_rng(3, SeedPurpose.DRAW, 4, 0).integers(0, 1 << 30, size=5)
    second = derive_rng(3, SeedPurpose.DRAW, 4, 0).integers(0, 1 << 30, size=5)
    check(np.array_equal(first, second), "derived generators replay the same draws")


# ============================================================
# Test 2: Iteration plan
# ============================================================
def test_iteration_plan():
    header("Test 2: Iteration plan")
    problem = MebProblem(2)
    n = 1_000_000
    plan = SolverParams(eps=0.1).plan(n, problem)

    check(plan.s == math.ceil(math.log(n)), f"default s = ceil(ln N) = {plan.s}")
    check(math.isclose(plan.growth, n ** (1 / plan.s)), "growth is N^(1/s)")
    check(math.isclose(plan.mu, 1 / (10 * problem.nu * plan.growth)), f"mu = {plan.mu:.5f}")
    ratio = 8 * problem.lam / plan.mu
    expected_m = math.ceil(max(ratio * math.log(ratio), (4 / plan.mu) * math.log(8)))
    check(plan.m == expected_m, f"m = {plan.m}")
    check(plan.max_iterations == math.ceil(20 * problem.nu * plan.s), f"cap = {plan.max_iterations}")

    check(SolverParams(sample_size=17).plan(n, problem).m == 17, "sample_size overrides m")
    check(SolverParams(s=1).plan(n, problem).growth == pytest.approx(n), "s = 1 gives growth N")

    with pytest.raises(UsageError):
        SolverParams(s=100).plan(n, problem)
    check(True, "s above ceil(ln N) is rejected")
    with pytest.raises(UsageError):
        SolverParams(eps=0.7)
    check(True, "eps above 1/2 is rejected")


# ============================================================
# Test 3: Class weights
# ============================================================
def test_class_weights():
    header("Test 3: Class weights")
    scaled = scaled_class_weights([2, 0, 3], math.log(4))
    check(scaled == pytest.approx([2 / 16, 0.0, 3.0]), f"classes scale by N^((i - top)/s): {scaled}")
    check(scaled_class_weights([0, 0], 1.0) == [0.0, 0.0], "empty classes stay zero")

    plan = SolverParams().plan(1 << 20, MebProblem(2))
    check(is_successful((100,), (0,), plan), "no violators is a success")
    check(not is_successful((100,), (100,), plan), "all points violating is a failure")
    budget = plan.mu * 100 * 1.25 / 0.75
    check(is_successful((100,), (math.floor(budget),), plan), f"violators up to {budget:.2f} pass")
    check(not is_successful((100,), (math.floor(budget) + 1,), plan), "one more violator fails")


# ============================================================
# Test 4: Solve
# ============================================================
def test_small_meb_solve():
    header("Test 4: Solve")
    points = lattice_points(30, 2, 10, seed=4)
    problem, source = _meb_source(points)
    outcome = solve(source, problem, SolverParams(eps=0.1, seed=1))

    oracle = exact_meb(points)
    ratio = outcome.solution.radius / oracle.radius
    _assert_encloses(outcome.solution, points)
    check(1 <= ratio <= 1.9, f"radius ratio to the exact ball {ratio:.4f}")
    check(source.passes == 2 * outcome.iterations, f"two passes per iteration ({source.passes})")
    check(outcome.peak_words > 0 and len(outcome.trace) == outcome.iterations, "trace and peak words recorded")

    again_problem, again_source = _meb_source(points)
    again = solve(again_source, again_problem, SolverParams(eps=0.1, seed=1))
    check(again.solution == outcome.solution, "a fixed seed reproduces the solution")

    with pytest.raises(SketchUsageError):
        UpdateListSource([(source.universe_size, 1)], source.universe_size, source.unsnap)
    check(True, "updates outside the universe are rejected")


# ============================================================
# Test 5: Deletions
# ============================================================
def test_deleted_point_is_ignored():
    header("Test 5: Deletions")
    points = lattice_points(20, 2, 5, seed=2)
    far = (500.0, -500.0)
    problem, source = _meb_source(points, deleted=[far], clamp=True)
    outcome = solve(source, problem, SolverParams(eps=0.1, seed=3))

    _assert_encloses(outcome.solution, points)
    check(outcome.solution.radius < 100, f"deleted far point ignored (radius {outcome.solution.radius:.3f})")


# ============================================================
# Test 6: Sharded passes
# ============================================================
def test_sharded_passes_match():
    header("Test 6: Sharded passes")
    points = lattice_points(40, 3, 8, seed=6)
    results = []
    for workers in (1, 3):
        problem, source = _meb_source(points)
        results.append(solve(source, problem, SolverParams(eps=0.1, seed=9, workers=workers)))
    check(results[0].solution == results[1].solution, "1 and 3 shards give the same ball")
    check(results[0].iterations == results[1].iterations, f"same iteration count ({results[0].iterations})")


# ============================================================
# Test 7: Budget
# ============================================================
def test_iteration_budget():
    header("Test 7: Budget")
    points = lattice_points(30, 2, 10, seed=4)
    problem, source = _meb_source(points)
    params = SolverParams(eps=0.1, seed=1, sample_size=1, iteration_factor=0.1)
    with pytest.raises(IterationBudgetExceeded):
        solve(source, problem, params)
    check(True, "one-point samples never clear the violators; the cap raises")


def _line_source(n: int, universe: int = None):
    """Points (i,) at index i, one insert each."""
    return UpdateListSource([(i, 1) for i in range(n)], universe or n, lambda i: (float(i),))


def _plan(universe: int, log_growth: float, mu: float = 0.01, m: int = 1) -> IterationPlan:
    return IterationPlan(universe, 2, 2, 1, log_growth, mu, m, 10)


# ============================================================
# Test 8: Sampling pass
# ============================================================
def test_sample_m_points():
    header("Test 8: Sampling pass")
    problem = MebProblem(1)
    params = SolverParams(seed=5, backend="exact")

    single = UpdateListSource([(7, 1), (7, 1)], 20, lambda i: (float(i),))
    plan = _plan(20, 1.0, m=50)
    for t in (0, 2):
        sample = sample_m_points(single, WeightOracle(problem, single.unsnap, plan), params, plan, t)
        assert sample.points == (7,) and len(sample.draws) == 50, f"t={t}: {sample.points}"
    check(True, "one distinct point: B = {that point} and |draws| = m")

    source = _line_source(20, universe=64)
    plan = _plan(64, 1.0)
    sample = sample_m_points(source, WeightOracle(problem, source.unsnap, plan), params, plan, 0, m=10_000)
    observed = np.bincount(sample.draws, minlength=20)[:20]
    p_value = chisquare(observed).pvalue
    check(len(sample.draws) == 10_000 and observed.sum() == 10_000, "every draw lands on the support")
    check(p_value > 0.001, f"t = 0 draws are uniform over 20 points (chi-square p = {p_value:.4f})")

    expected = math.e / (3 + math.e)
    rng = np.random.default_rng(11)
    picks = sum(choose_classes((3, 1), _plan(10, 1.0), 1, rng)[1] for _ in range(20_000))
    check(abs(picks / 20_000 - expected) <= 0.02, f"class 1 picked with frequency {picks / 20_000:.4f} ~ e/(3+e)")

    source = _line_source(4, universe=10)
    plan = _plan(10, 1.0)
    oracle = WeightOracle(problem, source.unsnap, plan)
    oracle.store(Ball((1.0,), 1.0))
    sample = sample_m_points(source, oracle, params, plan, 1, m=20_000)
    share = sample.draws.count(3) / len(sample.draws)
    check(abs(share - expected) <= 0.02, f"the violating point takes {share:.4f} of the draws")


# ============================================================
# Test 9: Violator check
# ============================================================
def test_check_violators_weight():
    header("Test 9: Violator check")
    problem = MebProblem(1)
    params = SolverParams(seed=2, backend="exact")
    source = _line_source(1000)
    plan = _plan(1000, math.log(1000), mu=0.01)
    oracle = WeightOracle(problem, source.unsnap, plan)

    planted = check_violators_weight(source, oracle, params, plan, 0, Ball((499.0,), 499.5))
    check(planted.totals == (1000,) and planted.violators == (1,), f"exact counts {planted.totals} / {planted.violators}")
    check(planted.success and not planted.violators_empty, "one violator in 1000 at mu = 1/100 is a success")

    everything = check_violators_weight(source, oracle, params, plan, 0, Ball((5000.0,), 1.0))
    check(everything.violators == (1000,) and not everything.success, "all points violating is a failure")

    clean = check_violators_weight(source, oracle, params, plan, 0, Ball((499.5,), 499.5))
    check(clean.violators_empty and clean.success, "a covering ball ends the loop")
    check(source.passes == 3, "one pass per check")


# ============================================================
# Test 10: Weight exponents
# ============================================================
def test_weight_exponent():
    header("Test 10: Weight exponents")
    rng = np.random.default_rng(10)
    points = [tuple(float(v) for v in row) for row in rng.uniform(-3, 3, size=(50, 2))]
    points[0] = (2.0, 0.0)
    problem = MebProblem(2)
    oracle = WeightOracle(problem, lambda i: points[i], None)

    check(all(weight_exponent(i, oracle) == 0 for i in range(len(points))), "empty oracle: every exponent is 0")
    oracle.store(Ball((0.0, 0.0), 1.0))
    check(weight_exponent(0, oracle) == 1, "a point at distance 2 violates the unit ball once")

    balls = [Ball(tuple(float(v) for v in rng.uniform(-1, 1, size=2)), float(rng.uniform(0.5, 3))) for _ in range(4)]
    previous = [weight_exponent(i, oracle) for i in range(len(points))]
    for ball in balls:
        oracle.store(ball)
        current = [weight_exponent(i, oracle) for i in range(len(points))]
        assert all(b >= a for a, b in zip(previous, current)), "exponent decreased"
        previous = current
    check(True, "exponents never decrease as solutions are stored")

    stored = [Ball((0.0, 0.0), 1.0)] + balls
    recount = [
        sum(float(np.linalg.norm(np.subtract(p, ball.center))) > ball.radius * (1 + 1e-12) for ball in stored)
        for p in points
    ]
    check(previous == recount, "five stored balls: exponents equal a direct recount")


# ============================================================
# Test 11: Success frequency
# ============================================================
def test_success_frequency():
    header("Test 11: Success frequency")
    iterations = successful = 0
    for seed in range(100):
        problem, source = _meb_source(lattice_points(15, 2, 10, seed=100 + seed))
        outcome = solve(source, problem, SolverParams(eps=0.1, seed=seed))
        iterations += outcome.iterations
        successful += outcome.successful_iterations
    rate = successful / iterations
    check(rate >= 0.55, f"{successful} of {iterations} iterations successful ({rate:.3f})")


# ============================================================
# Test 12: Termination
# ============================================================
def test_termination_is_sound():
    header("Test 12: Termination")
    for seed in range(20):
        problem, source = _meb_source(lattice_points(200, 2, 40, seed=300 + seed))
        outcome = solve(source, problem, SolverParams(eps=0.1, seed=seed))
        missed = [i for i, _ in source.updates if problem.violates(outcome.raw_solution, source.unsnap(i))]
        assert not missed, f"seed {seed}: {len(missed)} snapped points outside the returned ball"
    check(True, "20 seeds: an exhaustive scan finds no violator of the returned solution")


# ============================================================
# Main
# ============================================================
def main():
    return run_suite("Solver Core Test Suite", [
        test_seeds,
        test_iteration_plan,
        test_class_weights,
        test_small_meb_solve,
        test_deleted_point_is_ignored,
        test_sharded_passes_match,
        test_iteration_budget,
        test_sample_m_points,
        test_check_violators_weight,
        test_weight_exponent,
        test_success_frequency,
        test_termination_is_sound,
    ])


if __name__ == "__main__":
    sys.exit(main())
