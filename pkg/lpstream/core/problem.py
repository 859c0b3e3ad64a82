"""
LPStream: LP-type Problem Interface

What the solver needs from a problem plugin, and what it needs from a pass
source. Problems work on "elements" (a vector for MEB, (z, y) for SVM, a
constraint row for LP/SDP); a snapper maps elements to indices of the sketch
universe and back.

Contract for every plugin:
    - violates(solve_basis(B), q) is False for every q in B
    - solve_basis is deterministic under a fixed input order
    - violates(Infeasible, q) is False: an infeasible sample is final
"""

import logging
from abc import ABC, abstractmethod
from dataclasses import dataclass
from typing import Any, Iterator, Optional, Protocol, Sequence

from lpstream.core.solution import Solution
from lpstream.errors import SketchUsageError

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class NetAnchor:
    """Result of centering: where the radial net sits and how far it reaches.

    `clamp` is set by turnstile centering: r_max only bounds the live points, so
    deleted points beyond it fold onto the outermost level.
    """

    center: tuple
    r_max: float
    clamp: bool = False

    def __post_init__(self):
        object.__setattr__(self, "center", tuple(float(c) for c in self.center))
        object.__setattr__(self, "r_max", float(self.r_max))


class Snapper(Protocol):
    size: int

    def snap(self, element: Any) -> int: ...

    def unsnap(self, index: int) -> Any: ...


class PassSource(Protocol):
    """A replayable sequence of signed index updates; counts its traversals."""

    universe_size: int
    passes: int

    def unsnap(self, index: int) -> Any: ...

    def scan(self, shards: int = 1) -> list: ...


# ============================================================
# Problem plugins
# ============================================================

class LpTypeProblem(ABC):
    name: str = "abstract"
    nu: int
    lam: int
    radial: bool = False
    exhausted_as_infeasible: bool = False

    @abstractmethod
    def build_snapper(self, eps: float, anchor: Optional[NetAnchor] = None) -> Snapper:
        """Net for this problem; radial problems need the anchor from centering."""

    def embed(self, event) -> Any:
        """Original (unsnapped) element carried by a stream event."""
        return tuple(event.point)

    def position(self, element) -> tuple:
        """Coordinates used for centering. Only radial problems need it."""
        return tuple(element)

    @abstractmethod
    def solve_basis(self, elements: Sequence[Any]) -> Solution:
        ...

    @abstractmethod
    def violates(self, solution: Solution, element: Any) -> bool:
        ...

    @abstractmethod
    def correct_solution(self, solution: Solution, eps: float) -> Solution:
        ...


# ============================================================
# In-memory pass source
# ============================================================

class UpdateListSource:
    """Pass source over a fixed list of (index, sign) updates.

    Used where updates are already in index space: tests, and replays of
    sampled representatives.
    """

    def __init__(self, updates: Sequence[tuple], universe_size: int, unsnap):
        self.updates = [(int(i), int(s)) for i, s in updates]
        self.universe_size = universe_size
        self._unsnap = unsnap
        self.passes = 0
        for index, _ in self.updates:
            if not 0 <= index < universe_size:
                raise SketchUsageError(f"index {index} outside universe of size {universe_size}")

    def unsnap(self, index: int):
        return self._unsnap(index)

    def scan(self, shards: int = 1) -> list:
        self.passes += 1
        return shard_iterators(self.updates, shards)


def shard_iterators(updates: Sequence[tuple], shards: int) -> list:
    """Split one pass into `shards` contiguous chunks, in order."""
    shards = max(1, shards)
    size = -(-len(updates) // shards) if updates else 0
    if size == 0:
        return [iter(())]
    return [iter(updates[start:start + size]) for start in range(0, len(updates), size)]


def iterate_all(chunks: list) -> Iterator[tuple]:
    for chunk in chunks:
        yield from chunk
