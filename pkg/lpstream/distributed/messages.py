"""
LPStream: Protocol Messages

Everything that crosses a channel between the coordinator and a machine.
Each message knows its size in words, one word per point, number or
solution component:

    CenterCandidate       machine -> coordinator   1
    CenterBroadcast       coordinator -> machine   1
    MaxDistReport         machine -> coordinator   1
    RadiusBroadcast       coordinator -> machine   1
    SolutionBroadcast     coordinator -> machine   S_f
    WeightReport          machine -> coordinator   1      (t + 1 class counts)
    SampleQuota           coordinator -> machine   1
    SampleBatch           machine -> coordinator   len(indices)
    ViolatorWeightReport  machine -> coordinator   2      (2 (t + 1) class counts)

`detail_words` counts the per-class entries individually.
"""

from dataclasses import dataclass
from typing import Optional

from lpstream.core.solution import Solution

COORDINATOR = "coordinator"


def machine_name(machine_id: int) -> str:
    return f"machine-{machine_id}"


@dataclass(frozen=True)
class Message:
    sender: str
    receiver: str

    @property
    def kind(self) -> str:
        return type(self).__name__

    @property
    def words(self) -> int:
        return 1

    @property
    def detail_words(self) -> int:
        return self.words


@dataclass(frozen=True)
class CenterCandidate(Message):
    point: Optional[tuple]

    @property
    def words(self) -> int:
        return 0 if self.point is None else 1


@dataclass(frozen=True)
class CenterBroadcast(Message):
    point: tuple


@dataclass(frozen=True)
class MaxDistReport(Message):
    distance: float


@dataclass(frozen=True)
class RadiusBroadcast(Message):
    r_max: float


@dataclass(frozen=True)
class SolutionBroadcast(Message):
    solution: Solution

    @property
    def words(self) -> int:
        return self.solution.words


@dataclass(frozen=True)
class WeightReport(Message):
    counts: tuple

    @property
    def detail_words(self) -> int:
        return len(self.counts)


@dataclass(frozen=True)
class SampleQuota(Message):
    quota: int


@dataclass(frozen=True)
class SampleBatch(Message):
    indices: tuple

    @property
    def words(self) -> int:
        return len(self.indices)


@dataclass(frozen=True)
class ViolatorWeightReport(Message):
    totals: tuple
    violators: tuple

    @property
    def words(self) -> int:
        return 2

    @property
    def detail_words(self) -> int:
        return len(self.totals) + len(self.violators)
