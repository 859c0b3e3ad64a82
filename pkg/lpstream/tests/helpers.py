"""
LPStream: Test Helpers

Console output in the suite's house style, a `check` that both prints and
asserts, a runner for `python -m lpstream.tests.test_x`, and seeded instance
generators.
"""

import inspect
import math
import tempfile
from pathlib import Path

import numpy as np

from lpstream.streams import delete, format_event, insert

# ============================================================
# Colors for terminal output
# ============================================================
GREEN = "\033[92m"
RED = "\033[91m"
YELLOW = "\033[93m"
CYAN = "\033[96m"
RESET = "\033[0m"
BOLD = "\033[1m"


def ok(msg):
    print(f"  {GREEN}✓ PASS{RESET} {msg}")

def fail(msg):
    print(f"  {RED}✗ FAIL{RESET} {msg}")

def warn(msg):
    print(f"  {YELLOW}⚠ WARN{RESET} {msg}")

def header(msg):
    print(f"\n{BOLD}{CYAN}{'='*60}{RESET}")
    print(f"{BOLD}{CYAN}  {msg}{RESET}")
    print(f"{BOLD}{CYAN}{'='*60}{RESET}")


def check(condition, msg):
    if condition:
        ok(msg)
    else:
        fail(msg)
    assert condition, msg


def run_suite(title: str, tests: list) -> int:
    """Run test functions outside pytest; `tmp_path` gets a fresh directory."""
    print(f"\n{BOLD}LPStream: {title}{RESET}")
    print(f"{'='*60}")

    results = {}
    for test in tests:
        kwargs = {}
        if "tmp_path" in inspect.signature(test).parameters:
            kwargs["tmp_path"] = Path(tempfile.mkdtemp(prefix="lpstream-"))
        try:
            test(**kwargs)
            results[test.__name__] = True
        except AssertionError as e:
            fail(f"{test.__name__}: {e}")
            results[test.__name__] = False
        except Exception as e:
            fail(f"{test.__name__}: {type(e).__name__}: {e}")
            results[test.__name__] = False

    header("SUMMARY")
    for name, passed in results.items():
        mark = f"{GREEN}✓{RESET}" if passed else f"{RED}✗{RESET}"
        print(f"  {mark} {name}")

    if all(results.values()):
        print(f"\n  {GREEN}{BOLD}All {len(results)} tests passed.{RESET}")
        return 0
    print(f"\n  {RED}{BOLD}{sum(not v for v in results.values())} of {len(results)} tests failed.{RESET}")
    return 1


# ============================================================
# Instance generators
# ============================================================

def lattice_points(n: int, d: int, delta: int, seed: int) -> list:
    """n distinct-ish integer points in {-delta..delta}^d."""
    rng = np.random.default_rng(seed)
    return [tuple(float(v) for v in row) for row in rng.integers(-delta, delta + 1, size=(n, d))]


def meb_events(points) -> list:
    return [insert(p) for p in points]


def churn_events(kept, removed) -> list:
    """inserts(kept) ++ inserts(removed) ++ deletes(removed)."""
    return [insert(p) for p in kept] + [insert(p) for p in removed] + [delete(p) for p in removed]


def separable_points(n: int, d: int, gamma: float, seed: int) -> tuple:
    """Labeled points in [-1, 1]^d with margin >= gamma around a random hyperplane through the origin."""
    rng = np.random.default_rng(seed)
    normal = rng.normal(size=d)
    normal /= np.linalg.norm(normal)
    points, labels = [], []
    while len(points) < n:
        z = rng.uniform(-1, 1, size=d)
        side = float(z @ normal)
        if abs(side) < gamma / 2:
            continue
        points.append(tuple(float(v) for v in z))
        labels.append(1 if side > 0 else -1)
    return points, labels


def inseparable_points(n: int, d: int, seed: int) -> tuple:
    """Two copies of a point with opposite labels, plus random noise."""
    rng = np.random.default_rng(seed)
    points = [tuple(float(v) for v in rng.uniform(-1, 1, size=d)) for _ in range(n)]
    labels = [int(v) for v in rng.choice([-1, 1], size=n)]
    points.append(points[0])
    labels.append(-labels[0])
    return points, labels


def labeled_events(points, labels) -> list:
    return [insert(p, y) for p, y in zip(points, labels)]


def lp_rows(n: int, d: int, seed: int) -> list:
    """Rows a.x <= b with ||a|| <= 1 and b in [0.2, 1]; x = 0 is always feasible."""
    rng = np.random.default_rng(seed)
    rows = []
    for _ in range(n):
        a = rng.normal(size=d)
        a /= max(1.0, float(np.linalg.norm(a))) * math.sqrt(d)
        b = float(rng.uniform(0.2, 1.0))
        rows.append((tuple(float(v) for v in a), b))
    return rows


def row_events(rows) -> list:
    return [insert(tuple(a) + (b,)) for a, b in rows]


def sdp_rows(n: int, seed: int, sparsity: int = 2) -> list:
    """2 x 2 symmetric rows with <= `sparsity` non-zeros, spectral norm <= 1, b in [0.2, 1]."""
    rng = np.random.default_rng(seed)
    rows = []
    while len(rows) < n:
        A = np.zeros((2, 2))
        if sparsity >= 2 and rng.random() < 0.5:
            A[0, 1] = A[1, 0] = rng.uniform(-0.9, 0.9)
        else:
            A[0, 0] = rng.uniform(-0.9, 0.9)
            if sparsity >= 2:
                A[1, 1] = rng.uniform(-0.9, 0.9)
        rows.append((A, float(rng.uniform(0.2, 1.0))))
    return rows


def planted_sdp_rows(n: int, seed: int) -> list:
    """Sparse 2 x 2 rows all satisfied by X0 = vv^T / 2 + I / 4 with slack in [0.05, 0.3]."""
    rng = np.random.default_rng(seed)
    v = rng.normal(size=2)
    v /= np.linalg.norm(v)
    planted = 0.5 * np.outer(v, v) + 0.25 * np.eye(2)
    rows = []
    for A, _ in sdp_rows(n, seed):
        b = min(1.0, float(np.sum(A * planted)) + float(rng.uniform(0.05, 0.3)))
        rows.append((A, b))
    return rows


def matrix_events(rows) -> list:
    return [insert(tuple(np.asarray(A, dtype=float).reshape(-1)) + (b,)) for A, b in rows]


def write_stream(path: Path, events, kind: str, d: int) -> Path:
    path.write_text("\n".join(format_event(e, kind, d) for e in events) + "\n", encoding="utf-8")
    return path
