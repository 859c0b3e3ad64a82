"""
LPStream: Stream Model Test Suite

Run from the project root:
    python -m lpstream.tests.test_streams
or through pytest.

Tests (in order):
    1. Parser: grammar per record kind, errors carry line numbers
    2. File streams: every replay is a pass, load() is not
    3. Multipass: 1 + 2 * iterations passes, duplicates change nothing
    4. Multipass input rules: deletions and empty streams are rejected
    5. Radius search: binary and bucketed 2-approximations
    6. Turnstile centering: the surviving point becomes the center
    7. Turnstile equivalence: inserted-then-deleted points leave no trace
    8. Turnstile SVM: origin-anchored nets need one checking pass
    9. Strict turnstile: negative counts and empty live sets are rejected
"""

import math
import sys

import numpy as np
import pytest

from lpstream.core import SolverParams
from lpstream.errors import EmptyInputError, StreamFormatError, UsageError
from lpstream.problems import MebProblem, SvmProblem, exact_meb
from lpstream.streams import (
    EventStream,
    FileEventStream,
    RawPointCodec,
    approx_max_norm,
    delete,
    find_center_turnstile,
    format_event,
    infer_dimension,
    insert,
    parse_line,
    parse_stream,
    run_multipass,
    run_turnstile,
)
from lpstream.tests.helpers import (
    check,
    churn_events,
    header,
    labeled_events,
    lattice_points,
    meb_events,
    run_suite,
    separable_points,
    write_stream,
)


def _encloses(ball, points) -> bool:
    center = np.asarray(ball.center)
    return all(np.linalg.norm(np.asarray(p) - center) <= ball.radius * (1 + 1e-9) for p in points)


# ============================================================
# Test 1: Parser
# ============================================================
def test_parser():
    header("Test 1: Parser")
    event = parse_line("+ 1 2.5 -3", "point", 3)
    check(event == insert((1.0, 2.5, -3.0)), "point record")
    check(parse_line("- 0.5 -0.25 | -1", "labeled", 2) == delete((0.5, -0.25), -1), "labeled delete")
    check(parse_line("+ 0.1 0.2 0.9", "row", 2).point == (0.1, 0.2, 0.9), "LP row keeps b last")

    matrix = parse_line("+ 2 0 1 0.5 1 1 -0.25 | 0.75", "matrix", 2)
    check(matrix.point == (0.0, 0.5, 0.5, -0.25, 0.75), "sparse triplets mirror to a symmetric row")
    check(parse_line("# comment", "point", 3) is None and parse_line("   ", "point", 3) is None,
          "comments and blank lines are skipped")

    check(parse_line(format_event(matrix, "matrix", 2), "matrix", 2) == matrix, "formatted matrix row parses back")

    bad = [
        ("* 1 2 3", "point", 3),
        ("+ 1 2", "point", 3),
        ("+ 1 x 3", "point", 3),
        ("+ 0.5 0.5 1", "labeled", 2),
        ("+ 0.5 0.5 | 0", "labeled", 2),
        ("+ 1 0 2 0.5 | 0.1", "matrix", 2),
        ("+ 2 0 0 0.5 | 0.1", "matrix", 2),
    ]
    for line, kind, d in bad:
        with pytest.raises(StreamFormatError) as info:
            parse_line(line, kind, d, line_number=7)
        assert info.value.line_number == 7 and "line 7" in str(info.value), line
    check(True, f"{len(bad)} malformed lines raise StreamFormatError with their line number")

    lines = ["# header", "+ 1 1", "+ 1 oops"]
    with pytest.raises(StreamFormatError) as info:
        list(parse_stream(lines, "point", 2))
    check(info.value.line_number == 3, "parse_stream counts comment lines too")


# ============================================================
# Test 2: File streams
# ============================================================
def test_file_stream(tmp_path):
    header("Test 2: File streams")
    events = meb_events(lattice_points(12, 3, 20, seed=1))
    path = write_stream(tmp_path / "points.txt", events, "point", 3)

    with path.open(encoding="utf-8") as handle:
        check(infer_dimension(handle, "point") == 3, "dimension inferred from the first data line")

    stream = FileEventStream(path, "point", 3)
    check(list(stream.replay()) == events, "file replay yields the written events")
    list(stream.replay())
    check(stream.passes == 2, "two replays are two passes")
    check(stream.load().events == events and stream.passes == 2, "load() parses without counting a pass")

    matrix_path = tmp_path / "rows.txt"
    matrix_path.write_text("+ 1 2 0 0.5 | 0.1\n+ 1 0 0 0.3 | 0.2\n", encoding="utf-8")
    with matrix_path.open(encoding="utf-8") as handle:
        check(infer_dimension(handle, "matrix") == 3, "matrix dimension is the largest index + 1")

    with pytest.raises(FileNotFoundError):
        FileEventStream(tmp_path / "missing.txt", "point", 3)
    check(True, "missing stream file is rejected")


# ============================================================
# Test 3: Multipass
# ============================================================
def test_multipass_passes_and_duplicates():
    header("Test 3: Multipass")
    points = lattice_points(40, 2, 50, seed=3)
    params = SolverParams(eps=0.1, seed=5)

    stream = EventStream(meb_events(points))
    outcome, report = run_multipass(stream, MebProblem(2), params)
    check(report.passes == 1 + 2 * report.iterations, f"{report.passes} passes for {report.iterations} iterations")
    check(report.centering_passes == 1 and stream.passes == report.passes, "one centering pass")
    check(report.anchor.center == points[0], "multipass centers on the first point")
    check(_encloses(outcome.solution, points), "corrected ball encloses the input")
    ratio = outcome.solution.radius / exact_meb(points).radius
    check(ratio <= 1.9, f"radius ratio {ratio:.4f}")

    tripled = [event for event in meb_events(points) for _ in range(3)]
    again, _ = run_multipass(tripled, MebProblem(2), params)
    check(again.solution == outcome.solution, "tripling every point gives the same ball")


# ============================================================
# Test 4: Multipass input rules
# ============================================================
def test_multipass_input_rules():
    header("Test 4: Multipass input rules")
    with pytest.raises(UsageError):
        run_multipass([insert((1.0, 1.0)), delete((1.0, 1.0))], MebProblem(2), SolverParams())
    check(True, "deletions need the turnstile model")

    with pytest.raises(EmptyInputError):
        run_multipass([], MebProblem(2), SolverParams())
    check(True, "empty stream")


# ============================================================
# Test 5: Radius search
# ============================================================
def test_radius_search():
    header("Test 5: Radius search")
    problem = MebProblem(2)
    codec = RawPointCodec(2, delta_bound=1 << 10)
    params = SolverParams()
    events = meb_events([(0.0, 0.0), (3.0, 0.0)])

    for mode in ("binary", "bucketed"):
        r_max, passes = approx_max_norm(events, problem, (0.0, 0.0), params, codec, mode)
        check(r_max == 4.0, f"{mode}: distance 3 gives r_max 4 in {passes} passes")

    r_max, _ = approx_max_norm(meb_events([(0.0, 0.0), (0.0, 4.0)]), problem, (0.0, 0.0), params, codec)
    check(r_max == 4.0, "distance exactly 4 keeps r_max 4")
    r_max, _ = approx_max_norm(meb_events([(2.0, 2.0)]), problem, (2.0, 2.0), params, codec)
    check(r_max == 0.0, "no point off the center gives r_max 0")

    rng = np.random.default_rng(8)
    for _ in range(10):
        points = [tuple(float(v) for v in row) for row in rng.integers(-500, 501, size=(15, 2))]
        true = max(np.linalg.norm(np.subtract(p, points[0])) for p in points)
        for mode in ("binary", "bucketed"):
            r_max, _ = approx_max_norm(meb_events(points), problem, points[0], params, codec, mode)
            assert true <= r_max <= 2 * true or true == 0, f"{mode}: {r_max} vs {true}"
    check(True, "r_max lies in [D, 2D] on 10 random sets, both modes")

    binary_passes = approx_max_norm(events, problem, (0.0, 0.0), params, codec)[1]
    check(binary_passes <= math.ceil(math.log2(codec.search_depth + 2)),
          f"binary search takes {binary_passes} passes for depth {codec.search_depth}")

    with pytest.raises(UsageError):
        approx_max_norm(events, problem, (0.0, 0.0), params, codec, "linear")
    check(True, "unknown centering mode")


# ============================================================
# Test 6: Turnstile centering
# ============================================================
def test_turnstile_center():
    header("Test 6: Turnstile centering")
    p, q = (5.0, -3.0), (1.0, 2.0)
    events = [insert(p), insert(q), delete(p)]
    codec = RawPointCodec(2, delta_bound=100)
    center, live = find_center_turnstile(events, MebProblem(2), SolverParams(), codec)
    check(center == q, f"insert p, insert q, delete p centers on q (got {center})")
    check(live == 1, "one distinct live point")

    outcome, report = run_turnstile(events, MebProblem(2), SolverParams(), delta_bound=100)
    check(report.anchor.r_max == 0.0, "a single live point needs no radius search")
    check(outcome.solution.center == q and outcome.solution.radius == 0.0, "the ball is the point itself")


# ============================================================
# Test 7: Turnstile equivalence
# ============================================================
def test_turnstile_matches_multipass():
    header("Test 7: Turnstile equivalence")
    kept = lattice_points(30, 2, 40, seed=11)
    removed = lattice_points(15, 2, 400, seed=12)
    params = SolverParams(eps=0.1, seed=2)

    for mode in ("binary", "bucketed"):
        outcome, report = run_turnstile(churn_events(kept, removed), MebProblem(2), params, 1 << 12, mode)
        reference, _ = run_multipass(meb_events(kept), MebProblem(2), params, anchor=report.anchor)
        check(outcome.solution == reference.solution, f"{mode}: same ball as multipass on the live points")
        check(_encloses(outcome.solution, kept), f"{mode}: ball encloses every live point")
        check(report.passes == report.centering_passes + 2 * report.iterations,
              f"{mode}: {report.centering_passes} centering + 2 per iteration")

    check(outcome.solution.radius < 200, f"removed far points do not widen the ball ({outcome.solution.radius:.2f})")


# ============================================================
# Test 8: Turnstile SVM
# ============================================================
def test_turnstile_svm():
    header("Test 8: Turnstile SVM")
    points, labels = separable_points(24, 2, 0.5, seed=4)
    kept = labeled_events(points[:16], labels[:16])
    gone = labeled_events(points[16:], labels[16:])
    churn = kept + gone + [delete(e.point, e.label) for e in gone]
    params = SolverParams(eps=0.1, seed=6)

    outcome, report = run_turnstile(churn, SvmProblem(2, 0.5), params)
    reference, _ = run_multipass(kept, SvmProblem(2, 0.5), params)
    check(report.centering_passes == 1 and report.anchor is None, "one checking pass, no anchor")
    check(outcome.solution == reference.solution, "same separator as multipass on the live points")


# ============================================================
# Test 9: Strict turnstile
# ============================================================
def test_strict_turnstile():
    header("Test 9: Strict turnstile")
    with pytest.raises(UsageError):
        run_turnstile([insert((1.0, 1.0)), delete((2.0, 2.0))], MebProblem(2), SolverParams(), delta_bound=10)
    check(True, "deleting a point that was never inserted")

    with pytest.raises(EmptyInputError):
        run_turnstile([insert((1.0, 1.0)), delete((1.0, 1.0))], MebProblem(2), SolverParams(), delta_bound=10)
    check(True, "no live point after deletions")

    with pytest.raises(EmptyInputError):
        run_turnstile(
            [insert((0.5, 0.5), 1), delete((0.5, 0.5), 1)], SvmProblem(2, 0.5), SolverParams(),
        )
    check(True, "no live labeled point after deletions")


# ============================================================
# Main
# ============================================================
def main():
    return run_suite("Stream Model Test Suite", [
        test_parser,
        test_file_stream,
        test_multipass_passes_and_duplicates,
        test_multipass_input_rules,
        test_radius_search,
        test_turnstile_center,
        test_turnstile_matches_multipass,
        test_turnstile_svm,
        test_strict_turnstile,
    ])


if __name__ == "__main__":
    sys.exit(main())
