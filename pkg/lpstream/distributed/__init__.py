from lpstream.distributed.coordinator import (
    SCHEDULERS,
    Coordinator,
    allocate_quotas,
    run_coordinator,
    run_parallel,
)
from lpstream.distributed.machine import Machine
from lpstream.distributed.messages import (
    COORDINATOR,
    CenterBroadcast,
    CenterCandidate,
    MaxDistReport,
    Message,
    RadiusBroadcast,
    SampleBatch,
    SampleQuota,
    SolutionBroadcast,
    ViolatorWeightReport,
    WeightReport,
    machine_name,
)
from lpstream.distributed.meter import LoadMeter, LoadReport, RoundLoad

__all__ = [
    "COORDINATOR",
    "SCHEDULERS",
    "CenterBroadcast",
    "CenterCandidate",
    "Coordinator",
    "LoadMeter",
    "LoadReport",
    "Machine",
    "MaxDistReport",
    "Message",
    "RadiusBroadcast",
    "RoundLoad",
    "SampleBatch",
    "SampleQuota",
    "SolutionBroadcast",
    "ViolatorWeightReport",
    "WeightReport",
    "allocate_quotas",
    "machine_name",
    "run_coordinator",
    "run_parallel",
]
