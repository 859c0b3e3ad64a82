"""
LPStream: Exact Lexicographic Simplex

Dense dictionary simplex over Fractions with Bland's rule.

    maximize    c.x        then, among optima, minimize x_1, then x_2, ...
    subject to  a_i.x <= b_i
                lo <= x <= hi

Variables are shifted to y = x - lo >= 0 and the upper bounds become rows, so
the feasible region is a polytope and the LP is never unbounded. Phase 1 uses
one auxiliary variable; phase 2 optimizes the objective vector
[c, -e_1, ..., -e_n] lexicographically in a single run.

Dictionary form: x_B = b - A x_N, objective rows z = z0 + cost . x_N.
"""

import logging
from fractions import Fraction
from typing import Optional, Sequence

from lpstream.errors import UnboundedLpError

logger = logging.getLogger(__name__)

ZERO = Fraction(0)
ONE = Fraction(1)


def exact(value) -> Fraction:
    if isinstance(value, (int, Fraction)):
        return Fraction(value)
    return Fraction(float(value))


class _Dictionary:
    def __init__(self, rows: list, rhs: list, n: int):
        self.A = rows
        self.b = rhs
        self.basis = [n + i for i in range(len(rhs))]
        self.nonbasic = list(range(n))
        self.z0: list = []
        self.cost: list = []

    # --- pricing ---

    def _improving(self, k: int) -> bool:
        for row in self.cost:
            if row[k] > 0:
                return True
            if row[k] < 0:
                return False
        return False

    def entering(self) -> Optional[int]:
        candidates = [k for k in range(len(self.nonbasic)) if self._improving(k)]
        if not candidates:
            return None
        return min(candidates, key=lambda k: self.nonbasic[k])

    def leaving(self, k: int) -> Optional[int]:
        best, best_key = None, None
        for i, row in enumerate(self.A):
            if row[k] > 0:
                key = (self.b[i] / row[k], self.basis[i])
                if best_key is None or key < best_key:
                    best, best_key = i, key
        return best

    # --- pivoting ---

    def pivot(self, r: int, k: int):
        a = self.A[r][k]
        pivot_row = [v / a for v in self.A[r]]
        pivot_row[k] = ONE / a
        b_r = self.b[r] / a

        for i, row in enumerate(self.A):
            if i == r:
                continue
            factor = row[k]
            if factor == 0:
                continue
            self.b[i] -= factor * b_r
            for j in range(len(row)):
                if j != k:
                    row[j] -= factor * pivot_row[j]
            row[k] = -factor / a

        for o, cost in enumerate(self.cost):
            factor = cost[k]
            if factor == 0:
                continue
            self.z0[o] += factor * b_r
            for j in range(len(cost)):
                if j != k:
                    cost[j] -= factor * pivot_row[j]
            cost[k] = -factor / a

        self.A[r] = pivot_row
        self.b[r] = b_r
        self.basis[r], self.nonbasic[k] = self.nonbasic[k], self.basis[r]

    def optimize(self):
        while True:
            k = self.entering()
            if k is None:
                return
            r = self.leaving(k)
            if r is None:
                raise UnboundedLpError("simplex found an unbounded direction")
            self.pivot(r, k)

    # --- objectives ---

    def set_objectives(self, objectives: Sequence[Sequence[Fraction]]):
        """Express each objective (coefficients over the original variables) in the current dictionary."""
        n = len(objectives[0])
        self.z0, self.cost = [], []
        for g in objectives:
            def coefficient(var):
                return g[var] if var < n else ZERO
            self.z0.append(sum((coefficient(v) * self.b[i] for i, v in enumerate(self.basis)), ZERO))
            self.cost.append([
                coefficient(var) - sum((coefficient(v) * self.A[i][k] for i, v in enumerate(self.basis)), ZERO)
                for k, var in enumerate(self.nonbasic)
            ])

    def drop_column(self, k: int):
        for row in self.A:
            del row[k]
        for cost in self.cost:
            del cost[k]
        del self.nonbasic[k]


def _phase_one(table: _Dictionary) -> bool:
    """Make the dictionary feasible. False when the LP has no feasible point."""
    if not table.b:
        return True
    worst = min(range(len(table.b)), key=lambda i: (table.b[i], table.basis[i]))
    if table.b[worst] >= 0:
        return True

    aux = len(table.nonbasic) + len(table.basis)
    for row in table.A:
        row.append(-ONE)
    table.nonbasic.append(aux)
    table.z0 = [ZERO]
    table.cost = [[ZERO] * (len(table.nonbasic) - 1) + [-ONE]]

    table.pivot(worst, len(table.nonbasic) - 1)
    table.optimize()
    if table.z0[0] < 0:
        return False

    if aux in table.basis:
        r = table.basis.index(aux)
        columns = [k for k, v in enumerate(table.A[r]) if v != 0]
        if columns:
            table.pivot(r, min(columns, key=lambda k: table.nonbasic[k]))
        else:
            del table.A[r], table.b[r], table.basis[r]
    table.drop_column(table.nonbasic.index(aux))
    return True


def lex_max_lp(c: Sequence, rows: Sequence, lower: Sequence, upper: Sequence) -> Optional[tuple]:
    """Lexicographic optimum as a tuple of Fractions, or None when infeasible."""
    n = len(c)
    lo = [exact(v) for v in lower]
    hi = [exact(v) for v in upper]
    if any(h < l for l, h in zip(lo, hi)):
        return None

    A, rhs = [], []
    for a, b in rows:
        coefficients = [exact(v) for v in a]
        A.append(coefficients)
        rhs.append(exact(b) - sum((ai * li for ai, li in zip(coefficients, lo)), ZERO))
    for j in range(n):
        A.append([ONE if i == j else ZERO for i in range(n)])
        rhs.append(hi[j] - lo[j])

    table = _Dictionary(A, rhs, n)
    if not _phase_one(table):
        return None

    objectives = [[exact(v) for v in c]]
    objectives += [[-ONE if i == j else ZERO for i in range(n)] for j in range(n)]
    table.set_objectives(objectives)
    table.optimize()

    y = [ZERO] * n
    for i, var in enumerate(table.basis):
        if var < n:
            y[var] = table.b[i]
    return tuple(y[j] + lo[j] for j in range(n))
