from lpstream.sketch.l0 import (
    Backend,
    SketchConfig,
    L0Estimator,
    L0Sampler,
    l0_update,
    l0_estimate,
    l0_sample,
    merge,
)

__all__ = [
    "Backend",
    "SketchConfig",
    "L0Estimator",
    "L0Sampler",
    "l0_update",
    "l0_estimate",
    "l0_sample",
    "merge",
]
