"""
LPStream: l0 Sketches

Linear sketches over an abstract index universe {0..N-1}:

- L0Estimator: number of non-zero coordinates of the underlying vector
- L0Sampler:   a (near-)uniform element of that support

Two backends share one interface:

- EXACT keeps a counter map and answers exactly. The sampler draws uniformly
  from the sorted support with its own seeded generator.
- RANDOMIZED keeps geometric sub-sampling levels (level j holds the indices
  whose hash has at least j trailing zero bits). Every level is a small
  invertible table of 1-sparse cells (count, index sum, fingerprint) that is
  decoded by peeling. The estimate is |S_j| * 2^j at the smallest level that
  decodes completely; the sample is uniform over that decoded set.

Both backends are linear in the underlying vector, so sketches with the same
config can be merged by adding states. A query returns None for "Empty".
Querying a vector that still has negative entries is undefined.
"""

import logging
import math
from dataclasses import dataclass
from enum import Enum
from typing import Optional

import numpy as np

from lpstream.errors import SketchUsageError

logger = logging.getLogger(__name__)

# ============================================================
# Constants
# ============================================================

MERSENNE_61 = (1 << 61) - 1
HASH_ROWS = 3
MIN_BUCKETS = 8

# c in buckets = ceil(c * ln(1/delta) / zeta^2)
BUCKET_FACTOR = 2.0

# Stream tag mixed into the sampler seed so its draws never reuse the hash stream.
_SAMPLER_STREAM = 0x5A


class Backend(str, Enum):
    EXACT = "exact"
    RANDOMIZED = "randomized"


@dataclass(frozen=True)
class SketchConfig:
    """Parameters shared by every sketch that may be merged with another."""

    universe_size: int
    zeta: float = 0.25
    delta: float = 0.01
    seed: int = 0
    backend: Backend = Backend.EXACT

    def __post_init__(self):
        if self.universe_size < 1:
            raise SketchUsageError(f"universe_size must be >= 1, got {self.universe_size}")
        if not 0 < self.zeta < 1:
            raise SketchUsageError(f"zeta must be in (0, 1), got {self.zeta}")
        if not 0 < self.delta < 1:
            raise SketchUsageError(f"delta must be in (0, 1), got {self.delta}")
        if not 0 <= self.seed < 1 << 64:
            raise SketchUsageError(f"seed must be a 64-bit unsigned integer, got {self.seed}")
        object.__setattr__(self, "backend", Backend(self.backend))

    @property
    def levels(self) -> int:
        """ceil(log2 N) + 1 sub-sampling levels."""
        return (self.universe_size - 1).bit_length() + 1

    @property
    def buckets(self) -> int:
        return max(MIN_BUCKETS, math.ceil(BUCKET_FACTOR * math.log(1 / self.delta) / self.zeta ** 2))


# ============================================================
# Backend states
# ============================================================

class _ExactState:
    """Counter map over the non-zero coordinates."""

    def __init__(self):
        self.counts: dict[int, int] = {}
        self._sorted: Optional[list[int]] = None

    def update(self, index: int, delta: int):
        value = self.counts.get(index, 0) + delta
        if value:
            self.counts[index] = value
        else:
            self.counts.pop(index, None)
        self._sorted = None

    def merged(self, other: "_ExactState") -> "_ExactState":
        result = _ExactState()
        result.counts = dict(self.counts)
        for index, value in other.counts.items():
            result.update(index, value)
        return result

    def support(self) -> list[int]:
        if self._sorted is None:
            self._sorted = sorted(self.counts)
        return self._sorted

    def estimate(self) -> int:
        return len(self.counts)

    def same_as(self, other: "_ExactState") -> bool:
        return self.counts == other.counts

    def words(self) -> int:
        return 2 * len(self.counts)


class _RandomizedState:
    """Geometric levels of peelable 1-sparse tables."""

    def __init__(self, config: SketchConfig):
        self.universe_size = config.universe_size
        self.levels = config.levels
        self.buckets = config.buckets

        rng = np.random.default_rng(config.seed)
        coefficients = [int(v) for v in rng.integers(1, MERSENNE_61, size=2 * (HASH_ROWS + 1))]
        self.level_hash = (coefficients[0], coefficients[1])
        self.row_hashes = [
            (coefficients[2 + 2 * r], coefficients[3 + 2 * r]) for r in range(HASH_ROWS)
        ]
        self.base = int(rng.integers(2, MERSENNE_61))

        shape = (self.levels, HASH_ROWS, self.buckets)
        # object dtype: index sums outgrow int64 for universes beyond 2^63
        self.count = np.zeros(shape, dtype=object)
        self.index_sum = np.zeros(shape, dtype=object)
        self.fingerprint = np.zeros(shape, dtype=object)
        self._decoded: dict[int, Optional[dict[int, int]]] = {}

    # --- hashing ---

    def _top_level(self, index: int) -> int:
        a, b = self.level_hash
        h = (a * index + b) % MERSENNE_61
        if h == 0:
            return self.levels - 1
        trailing = (h & -h).bit_length() - 1
        return min(trailing, self.levels - 1)

    def _bucket(self, row: int, index: int) -> int:
        a, b = self.row_hashes[row]
        return ((a * index + b) % MERSENNE_61) % self.buckets

    # --- updates ---

    def update(self, index: int, delta: int):
        term = pow(self.base, index, MERSENNE_61)
        columns = [self._bucket(r, index) for r in range(HASH_ROWS)]
        for level in range(self._top_level(index) + 1):
            for row, column in enumerate(columns):
                cell = (level, row, column)
                self.count[cell] += delta
                self.index_sum[cell] += delta * index
                self.fingerprint[cell] = (self.fingerprint[cell] + delta * term) % MERSENNE_61
        self._decoded.clear()

    def merged(self, other: "_RandomizedState") -> "_RandomizedState":
        result = object.__new__(_RandomizedState)
        result.__dict__.update(self.__dict__)
        result.count = self.count + other.count
        result.index_sum = self.index_sum + other.index_sum
        result.fingerprint = (self.fingerprint + other.fingerprint) % MERSENNE_61
        result._decoded = {}
        return result

    # --- decoding ---

    def _pure(self, row: int, column: int, count: int, index_sum: int, fingerprint: int) -> Optional[int]:
        if count == 0 or index_sum % count:
            return None
        index = index_sum // count
        if not 0 <= index < self.universe_size:
            return None
        if fingerprint != (count * pow(self.base, index, MERSENNE_61)) % MERSENNE_61:
            return None
        if self._bucket(row, index) != column:
            return None
        return index

    def decode(self, level: int) -> Optional[dict[int, int]]:
        """Recover the whole vector restricted to `level`, or None if peeling stalls."""
        if level in self._decoded:
            return self._decoded[level]

        count = [list(r) for r in self.count[level]]
        index_sum = [list(r) for r in self.index_sum[level]]
        fingerprint = [list(r) for r in self.fingerprint[level]]
        recovered: dict[int, int] = {}

        progress = True
        while progress:
            progress = False
            for row in range(HASH_ROWS):
                for column in range(self.buckets):
                    value = count[row][column]
                    index = self._pure(row, column, value, index_sum[row][column], fingerprint[row][column])
                    if index is None:
                        continue
                    recovered[index] = recovered.get(index, 0) + value
                    term = pow(self.base, index, MERSENNE_61)
                    for r in range(HASH_ROWS):
                        c = self._bucket(r, index)
                        count[r][c] -= value
                        index_sum[r][c] -= value * index
                        fingerprint[r][c] = (fingerprint[r][c] - value * term) % MERSENNE_61
                    progress = True

        complete = all(
            count[r][c] == 0 and index_sum[r][c] == 0 and fingerprint[r][c] == 0
            for r in range(HASH_ROWS) for c in range(self.buckets)
        )
        result = {i: v for i, v in recovered.items() if v} if complete else None
        self._decoded[level] = result
        return result

    def smallest_decoded(self) -> tuple[int, Optional[dict[int, int]]]:
        for level in range(self.levels):
            decoded = self.decode(level)
            if decoded is not None:
                return level, decoded
        return self.levels, None

    def estimate(self) -> int:
        level, decoded = self.smallest_decoded()
        if decoded is None:
            logger.warning("l0 estimator: no level decoded, returning the capacity bound")
            return self.buckets << (self.levels - 1)
        if not decoded and level > 0:
            # lower levels overflowed, so the vector is not empty
            return 1 << level
        return len(decoded) << level

    def support(self) -> list[int]:
        level, decoded = self.smallest_decoded()
        if decoded is None or (not decoded and level > 0):
            logger.warning(f"l0 sampler: no usable level (smallest decoded level {level})")
            return []
        return sorted(decoded)

    def same_as(self, other: "_RandomizedState") -> bool:
        return (
            self.level_hash == other.level_hash
            and self.row_hashes == other.row_hashes
            and self.base == other.base
            and np.array_equal(self.count, other.count)
            and np.array_equal(self.index_sum, other.index_sum)
            and np.array_equal(self.fingerprint, other.fingerprint)
        )

    def words(self) -> int:
        return 3 * self.levels * HASH_ROWS * self.buckets


# ============================================================
# Sketches
# ============================================================

class _L0Sketch:
    def __init__(self, config: SketchConfig):
        self.config = config
        if config.backend is Backend.EXACT:
            self.state = _ExactState()
        else:
            self.state = _RandomizedState(config)

    def update(self, index: int, delta: int = 1):
        index = int(index)
        if not 0 <= index < self.config.universe_size:
            raise SketchUsageError(
                f"index {index} outside universe of size {self.config.universe_size}"
            )
        if delta:
            self.state.update(index, int(delta))

    def fresh_like(self):
        return type(self)(self.config)

    def merge(self, other):
        if type(other) is not type(self):
            raise SketchUsageError(f"cannot merge {type(self).__name__} with {type(other).__name__}")
        if other.config != self.config:
            raise SketchUsageError("cannot merge sketches with different configs")
        result = self.fresh_like()
        result.state = self.state.merged(other.state)
        return result

    def same_state(self, other) -> bool:
        return type(other) is type(self) and other.config == self.config and self.state.same_as(other.state)

    def word_count(self) -> int:
        return self.state.words()


class L0Estimator(_L0Sketch):
    """Support-size sketch: (1 ± zeta) with probability 1 - delta, exact on EXACT."""

    def estimate(self) -> int:
        return self.state.estimate()


class L0Sampler(_L0Sketch):
    """Support sampler. Draws use a generator seeded from the config, one per sketch."""

    def __init__(self, config: SketchConfig):
        super().__init__(config)
        self._rng = np.random.default_rng([config.seed, _SAMPLER_STREAM])

    def sample(self) -> Optional[int]:
        support = self.state.support()
        if not support:
            return None
        return support[int(self._rng.integers(len(support)))]

    def sample_many(self, k: int) -> list[int]:
        """k independent draws; empty list for an empty support."""
        support = self.state.support()
        if not support or k <= 0:
            return []
        return [support[int(i)] for i in self._rng.integers(len(support), size=k)]


# ============================================================
# Functional surface
# ============================================================

def l0_update(sketch: _L0Sketch, index: int, delta: int):
    sketch.update(index, delta)


def l0_estimate(sketch: L0Estimator) -> int:
    return sketch.estimate()


def l0_sample(sketch: L0Sampler) -> Optional[int]:
    return sketch.sample()


def merge(a: _L0Sketch, b: _L0Sketch) -> _L0Sketch:
    return a.merge(b)
