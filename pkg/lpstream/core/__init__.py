from lpstream.core.params import IterationPlan, SolverParams, default_s
from lpstream.core.problem import (
    LpTypeProblem,
    NetAnchor,
    PassSource,
    Snapper,
    UpdateListSource,
    iterate_all,
    shard_iterators,
)
from lpstream.core.sampling import (
    Sample,
    SketchBank,
    ViolatorCheck,
    build_sample_bank,
    check_violators_weight,
    choose_classes,
    draw_from_bank,
    fill_check_banks,
    is_successful,
    sample_m_points,
)
from lpstream.core.seeds import SeedPurpose, derive_rng, derive_seed
from lpstream.core.solution import INFEASIBLE, Ball, Hyperplane, Infeasible, LpPoint, SdpMatrix, Solution
from lpstream.core.solver import IterationRecord, SolveOutcome, solve
from lpstream.core.weights import WeightOracle, scaled_class_weights, weight_exponent

__all__ = [
    "INFEASIBLE",
    "Ball",
    "Hyperplane",
    "Infeasible",
    "IterationPlan",
    "IterationRecord",
    "LpPoint",
    "LpTypeProblem",
    "NetAnchor",
    "PassSource",
    "Sample",
    "SdpMatrix",
    "SeedPurpose",
    "SketchBank",
    "Snapper",
    "Solution",
    "SolveOutcome",
    "SolverParams",
    "UpdateListSource",
    "ViolatorCheck",
    "WeightOracle",
    "build_sample_bank",
    "check_violators_weight",
    "choose_classes",
    "default_s",
    "derive_rng",
    "derive_seed",
    "draw_from_bank",
    "fill_check_banks",
    "is_successful",
    "iterate_all",
    "sample_m_points",
    "scaled_class_weights",
    "shard_iterators",
    "solve",
    "weight_exponent",
]
