"""
LPStream: Load Meter

Counts words per endpoint and round. The load of a round is the largest
sent + received total of any single endpoint in that round.

An alias map folds endpoints together: the parallel model runs the
coordinator on machine 0, so its traffic is booked to "machine-0".
"""

import logging
from collections import defaultdict
from dataclasses import dataclass, field
from typing import Optional

from lpstream.distributed.messages import Message
from lpstream.errors import ProtocolError

logger = logging.getLogger(__name__)


@dataclass
class RoundLoad:
    index: int
    label: str
    sent: dict = field(default_factory=lambda: defaultdict(int))
    received: dict = field(default_factory=lambda: defaultdict(int))
    sent_detail: dict = field(default_factory=lambda: defaultdict(int))
    received_detail: dict = field(default_factory=lambda: defaultdict(int))
    messages: int = 0

    def endpoint_load(self, endpoint: str, detail: bool = False) -> int:
        if detail:
            return self.sent_detail.get(endpoint, 0) + self.received_detail.get(endpoint, 0)
        return self.sent.get(endpoint, 0) + self.received.get(endpoint, 0)

    def endpoints(self) -> set:
        return set(self.sent) | set(self.received)

    def load(self, detail: bool = False) -> int:
        return max((self.endpoint_load(e, detail) for e in self.endpoints()), default=0)

    def to_dict(self) -> dict:
        return {
            "round": self.index,
            "label": self.label,
            "messages": self.messages,
            "load": self.load(),
            "load_detail": self.load(detail=True),
            "per_endpoint": {e: self.endpoint_load(e) for e in sorted(self.endpoints())},
        }


@dataclass(frozen=True)
class LoadReport:
    rounds: int
    init_rounds: int
    max_round_load: int
    max_round_load_detail: int
    totals: dict
    rows: tuple

    def to_dict(self) -> dict:
        return {
            "rounds": self.rounds,
            "init_rounds": self.init_rounds,
            "max_round_load": self.max_round_load,
            "max_round_load_detail": self.max_round_load_detail,
            "totals": dict(sorted(self.totals.items())),
            "rows": list(self.rows),
        }


class LoadMeter:
    def __init__(self, alias: Optional[dict] = None):
        self.alias = dict(alias or {})
        self.history: list = []
        self.current: Optional[RoundLoad] = None

    def _name(self, endpoint: str) -> str:
        return self.alias.get(endpoint, endpoint)

    def begin_round(self, label: str):
        self.current = RoundLoad(len(self.history) + 1, label)
        self.history.append(self.current)
        logger.debug(f"Round {self.current.index}: {label}")

    def record(self, message: Message):
        if self.current is None:
            raise ProtocolError(f"{message.kind} sent outside a round")
        sender, receiver = self._name(message.sender), self._name(message.receiver)
        self.current.sent[sender] += message.words
        self.current.received[receiver] += message.words
        self.current.sent_detail[sender] += message.detail_words
        self.current.received_detail[receiver] += message.detail_words
        self.current.messages += 1

    @property
    def rounds(self) -> int:
        return len(self.history)

    def report(self, init_rounds: int = 0) -> LoadReport:
        """`init_rounds` leading rows are setup; the rest come three per iteration."""
        totals = defaultdict(int)
        for row in self.history:
            for endpoint in row.endpoints():
                totals[endpoint] += row.endpoint_load(endpoint)
        return LoadReport(
            rounds=self.rounds,
            init_rounds=init_rounds,
            max_round_load=max((row.load() for row in self.history), default=0),
            max_round_load_detail=max((row.load(detail=True) for row in self.history), default=0),
            totals=dict(totals),
            rows=tuple(row.to_dict() for row in self.history),
        )
