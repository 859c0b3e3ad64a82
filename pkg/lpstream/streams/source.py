"""
LPStream: Snapped Pass Source

Adapts a replayable event stream to the solver's PassSource: every pass
re-reads the events, snaps each one onto the problem's net and yields
(index, +1) for inserts and (index, -1) for deletes.
"""

import logging

from lpstream.core.problem import shard_iterators

logger = logging.getLogger(__name__)


class SnappedSource:
    def __init__(self, stream, problem, snapper):
        self.stream = stream
        self.problem = problem
        self.snapper = snapper
        self.universe_size = snapper.size

    @property
    def passes(self) -> int:
        return self.stream.passes

    def unsnap(self, index: int):
        return self.snapper.unsnap(index)

    def scan(self, shards: int = 1) -> list:
        updates = [
            (self.snapper.snap(self.problem.embed(event)), event.sign)
            for event in self.stream.replay()
        ]
        return shard_iterators(updates, shards)
