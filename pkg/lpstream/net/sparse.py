"""
LPStream: Sparse Matrix Net

Net for the constraint rows (A, b) of the bounded SDP class: symmetric d x d
matrices with at most S non-zero entries and spectral norm <= 1, plus a scalar
right-hand side in [-1, 1].

Every entry is rounded to the nearest multiple of eps/min(d, S) and b to the
nearest multiple of eps. The support pattern is the sorted set of non-zero
positions of the rounded matrix, padded with the smallest unused positions
up to exactly S, so the lexicographically first covering pattern is chosen.

Flat index:
    (rank(pattern) * E^S + entry_code) * B + rhs_code
with E = 2R + 1 entry codes and B = 2Rb + 1 rhs codes.
"""

import logging
import math
from typing import Sequence

import numpy as np

from lpstream.errors import NetDomainError, NetTooLargeError, UsageError
from lpstream.net.lattice import MAX_UNIVERSE, guarded_ceil, nearest_multiple

logger = logging.getLogger(__name__)


# ============================================================
# Combination ranking (lexicographic)
# ============================================================

def rank_combination(positions: Sequence[int], n: int) -> int:
    """Lexicographic rank of a sorted k-subset of 0..n-1."""
    k = len(positions)
    rank = 0
    previous = -1
    for slot, position in enumerate(positions):
        for skipped in range(previous + 1, position):
            rank += math.comb(n - skipped - 1, k - slot - 1)
        previous = position
    return rank


def unrank_combination(rank: int, n: int, k: int) -> tuple:
    positions = []
    candidate = 0
    for slot in range(k):
        while True:
            block = math.comb(n - candidate - 1, k - slot - 1)
            if rank < block:
                break
            rank -= block
            candidate += 1
        positions.append(candidate)
        candidate += 1
    return tuple(positions)


def _cover_pattern(nonzero: Sequence[int], total: int, sparsity: int) -> tuple:
    chosen = set(nonzero)
    position = 0
    while len(chosen) < sparsity:
        if position not in chosen:
            chosen.add(position)
        position += 1
    return tuple(sorted(chosen))


# ============================================================
# Net
# ============================================================

class SparseMatrixNet:
    def __init__(self, d: int, eps: float, sparsity: int):
        if d < 1:
            raise UsageError(f"matrix dimension must be >= 1, got {d}")
        if not 0 < eps <= 1:
            raise UsageError(f"net eps must be in (0, 1], got {eps}")
        if not 1 <= sparsity <= d * d:
            raise UsageError(f"sparsity must be in 1..{d * d}, got {sparsity}")

        self.d = d
        self.eps = eps
        self.sparsity = sparsity
        self.entry_step = eps / min(d, sparsity)
        self.entry_radius = guarded_ceil(1 / self.entry_step)
        self.rhs_step = eps
        self.rhs_radius = guarded_ceil(1 / eps)

        self.entry_codes = 2 * self.entry_radius + 1
        self.rhs_codes = 2 * self.rhs_radius + 1
        self.patterns = math.comb(d * d, sparsity)
        self.size = self.patterns * self.entry_codes ** sparsity * self.rhs_codes
        if self.size >= MAX_UNIVERSE:
            raise NetTooLargeError(
                f"sparse net of {self.size} rows does not fit in 128 bits (d={d}, S={sparsity}, eps={eps})"
            )
        logger.info(
            f"Sparse net ready: d={d} S={sparsity} entry step={self.entry_step:g} "
            f"patterns={self.patterns} N={self.size}"
        )

    def snap(self, A, b: float) -> int:
        matrix = np.asarray(A, dtype=float)
        if matrix.shape != (self.d, self.d):
            raise NetDomainError(f"matrix has shape {matrix.shape}, expected {(self.d, self.d)}")
        codes = nearest_multiple(matrix.reshape(-1), self.entry_step)
        if np.any(np.abs(codes) > self.entry_radius):
            raise NetDomainError("matrix entry outside [-1, 1]")
        nonzero = [int(i) for i in np.flatnonzero(codes)]
        if len(nonzero) > self.sparsity:
            raise NetDomainError(
                f"matrix has {len(nonzero)} non-zero entries after rounding, sparsity is {self.sparsity}"
            )
        pattern = _cover_pattern(nonzero, self.d * self.d, self.sparsity)

        value_code = 0
        for position in pattern:
            value_code = value_code * self.entry_codes + int(codes[position]) + self.entry_radius

        rhs = int(nearest_multiple([b], self.rhs_step)[0])
        if abs(rhs) > self.rhs_radius:
            raise NetDomainError(f"right-hand side {b} outside [-1, 1]")

        block = rank_combination(pattern, self.d * self.d) * self.entry_codes ** self.sparsity + value_code
        return block * self.rhs_codes + rhs + self.rhs_radius

    def unsnap(self, flat: int) -> tuple:
        """(A, b) represented by `flat`."""
        if not 0 <= flat < self.size:
            raise NetDomainError(f"flat index {flat} outside 0..{self.size - 1}")
        block, rhs_code = divmod(flat, self.rhs_codes)
        rank, value_code = divmod(block, self.entry_codes ** self.sparsity)
        pattern = unrank_combination(rank, self.d * self.d, self.sparsity)

        entries = np.zeros(self.d * self.d)
        for position in reversed(pattern):
            value_code, code = divmod(value_code, self.entry_codes)
            entries[position] = (code - self.entry_radius) * self.entry_step
        b = (rhs_code - self.rhs_radius) * self.rhs_step
        return entries.reshape(self.d, self.d), float(b)

    def snapped(self, A, b: float) -> tuple:
        return self.unsnap(self.snap(A, b))
