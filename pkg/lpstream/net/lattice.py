"""
LPStream: Metric epsilon-Net

Maps raw points to coordinates of the sketch universe and back.

A net is a cube lattice over [-1, 1]^d with per-axis step eps/sqrt(d), so every
unit vector lies within eps/2 of a lattice point. Radial nets (MEB) snap the
direction of p - center onto that lattice and the norm onto geometric levels
(1+eps)^l; non-radial nets (unit-cube problems) snap the point itself.

The net is never materialized: everything below is arithmetic on one index.

Flat layout of the universe:
    0                          CENTER
    1 + (tag*L + level)*C^d + mixed_radix(cell)
where C = ceil(2*sqrt(d)/eps) + 1 cells per axis.
"""

import logging
import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from lpstream.errors import NetDomainError, NetTooLargeError, UsageError

logger = logging.getLogger(__name__)

# ============================================================
# Constants
# ============================================================

CENTER = -1

# Relative guard band around exact powers and integer boundaries.
GUARD = 2.0 ** -40

MAX_UNIVERSE = 1 << 128


def guarded_ceil(x: float) -> int:
    """ceil(x), with values inside the guard band of an integer taken as that integer."""
    k = round(x)
    if abs(x - k) <= GUARD * max(1.0, abs(x)):
        return int(k)
    return math.ceil(x)


def nearest_multiple(values, step: float) -> np.ndarray:
    """Integer codes of the nearest multiples of `step`, ties toward -inf."""
    return np.ceil(np.asarray(values, dtype=float) / step - 0.5).astype(np.int64)


# ============================================================
# Types
# ============================================================

@dataclass(frozen=True)
class NetConfig:
    d: int
    eps: float
    center: tuple = ()
    r_max: float = 0.0
    radial: bool = True
    unit: float = 1.0
    tags: int = 1

    def __post_init__(self):
        if self.d < 1:
            raise UsageError(f"net dimension must be >= 1, got {self.d}")
        if not 0 < self.eps <= 1:
            raise UsageError(f"net eps must be in (0, 1], got {self.eps}")
        center = tuple(float(c) for c in self.center) or (0.0,) * self.d
        if len(center) != self.d:
            raise UsageError(f"center has {len(center)} coordinates, net dimension is {self.d}")
        object.__setattr__(self, "center", center)
        if self.r_max < 0:
            raise UsageError(f"r_max must be >= 0, got {self.r_max}")
        if self.unit <= 0:
            raise UsageError(f"unit must be > 0, got {self.unit}")
        if self.tags < 1:
            raise UsageError(f"tags must be >= 1, got {self.tags}")
        net_size(self)

    @property
    def per_axis_step(self) -> float:
        return self.eps / math.sqrt(self.d)

    @property
    def axis_cells(self) -> int:
        return guarded_ceil(2 * math.sqrt(self.d) / self.eps) + 1

    @property
    def levels(self) -> int:
        if not self.radial:
            return 1
        if self.r_max == 0:
            return 0
        return max(1, guarded_ceil(math.log(self.r_max / self.unit) / math.log1p(self.eps)))


@dataclass(frozen=True)
class NetIndex:
    cell: tuple = ()
    level: int = CENTER
    tag: int = 0

    @property
    def is_center(self) -> bool:
        return self.level == CENTER


# ============================================================
# Operations
# ============================================================

def net_size(cfg: NetConfig) -> int:
    """Exact universe cardinality, CENTER slot included."""
    cells = cfg.axis_cells ** cfg.d
    size = cfg.levels * cells * cfg.tags + 1
    if size >= MAX_UNIVERSE:
        raise NetTooLargeError(
            f"net of {size} points does not fit in 128 bits "
            f"(d={cfg.d}, eps={cfg.eps}, levels={cfg.levels})"
        )
    return size


def _lattice_cell(vector: np.ndarray, cfg: NetConfig) -> tuple:
    codes = nearest_multiple(vector + 1.0, cfg.per_axis_step)
    codes = np.clip(codes, 0, cfg.axis_cells - 1)
    return tuple(int(c) for c in codes)


def _lattice_vector(cell: Sequence[int], cfg: NetConfig) -> np.ndarray:
    return -1.0 + np.asarray(cell, dtype=float) * cfg.per_axis_step


def _radial_level(norm: float, cfg: NetConfig, clamp: bool = False) -> int:
    if cfg.levels == 0:
        raise NetDomainError("net holds only its center, but a point differs from it")
    ratio = norm / cfg.unit
    if ratio < 1 - GUARD:
        raise NetDomainError(f"distance {norm} is below the input resolution {cfg.unit}")
    x = math.log(ratio) / math.log1p(cfg.eps)
    k = round(x)
    if abs(x - k) <= GUARD * max(1.0, abs(x)):
        level = k - 1
    else:
        level = math.ceil(x) - 1
    level = max(level, 0)
    if level >= cfg.levels and clamp:
        return cfg.levels - 1
    if level >= cfg.levels:
        covered = cfg.unit * (1 + cfg.eps) ** cfg.levels
        raise NetDomainError(
            f"distance {norm} exceeds the radius {covered} covered by the net; rebuild it"
        )
    return level


def snap(p, cfg: NetConfig, tag: int = 0, clamp: bool = False) -> NetIndex:
    """Net index of p. With `clamp`, radial points beyond the covered radius fold onto
    the outermost level (onto the center when the net has no levels)."""
    point = np.asarray(p, dtype=float)
    if point.shape != (cfg.d,):
        raise NetDomainError(f"point has shape {point.shape}, net dimension is {cfg.d}")
    if not 0 <= tag < cfg.tags:
        raise UsageError(f"tag {tag} outside 0..{cfg.tags - 1}")

    if cfg.radial:
        q = point - np.asarray(cfg.center)
        norm = float(np.linalg.norm(q))
        if norm == 0.0 or (clamp and cfg.levels == 0):
            return NetIndex()
        level = _radial_level(norm, cfg, clamp)
        return NetIndex(_lattice_cell(q / norm, cfg), level, tag)

    if np.any(np.abs(point) > 1 + GUARD):
        raise NetDomainError(f"point {point.tolist()} lies outside the unit cube")
    return NetIndex(_lattice_cell(point, cfg), 0, tag)


def unsnap(idx: NetIndex, cfg: NetConfig) -> np.ndarray:
    center = np.asarray(cfg.center, dtype=float)
    if idx.is_center:
        return center
    vector = _lattice_vector(idx.cell, cfg)
    if not cfg.radial:
        return vector
    length = float(np.linalg.norm(vector))
    if length == 0.0:
        # zero lattice vector: unreachable by snap, pinned to the first axis
        vector = np.eye(cfg.d)[0]
        length = 1.0
    radius = cfg.unit * (1 + cfg.eps) ** (idx.level + 1)
    return center + radius * (vector / length)


def flat_index(idx: NetIndex, cfg: NetConfig) -> int:
    if idx.is_center:
        return 0
    per_axis = cfg.axis_cells
    if len(idx.cell) != cfg.d or any(not 0 <= c < per_axis for c in idx.cell):
        raise NetDomainError(f"cell {idx.cell} outside the lattice")
    if not 0 <= idx.level < cfg.levels or not 0 <= idx.tag < cfg.tags:
        raise NetDomainError(f"level {idx.level} / tag {idx.tag} outside the net")
    code = 0
    for c in idx.cell:
        code = code * per_axis + c
    block = idx.tag * cfg.levels + idx.level
    return 1 + block * per_axis ** cfg.d + code


def from_flat(flat: int, cfg: NetConfig) -> NetIndex:
    size = net_size(cfg)
    if not 0 <= flat < size:
        raise NetDomainError(f"flat index {flat} outside 0..{size - 1}")
    if flat == 0:
        return NetIndex()
    per_axis = cfg.axis_cells
    block, code = divmod(flat - 1, per_axis ** cfg.d)
    tag, level = divmod(block, cfg.levels)
    cell = []
    for _ in range(cfg.d):
        code, c = divmod(code, per_axis)
        cell.append(c)
    return NetIndex(tuple(reversed(cell)), level, tag)


class MetricNet:
    """A NetConfig bound to flat indices: the form the sketches and solvers consume."""

    def __init__(self, config: NetConfig):
        self.config = config
        self.size = net_size(config)
        logger.info(
            f"Net ready: d={config.d} eps={config.eps:g} radial={config.radial} "
            f"levels={config.levels} tags={config.tags} N={self.size}"
        )

    def snap_vector(self, p, tag: int = 0, clamp: bool = False) -> int:
        return flat_index(snap(p, self.config, tag, clamp), self.config)

    def representative(self, flat: int) -> np.ndarray:
        return unsnap(from_flat(flat, self.config), self.config)

    def tag_of(self, flat: int) -> int:
        return from_flat(flat, self.config).tag
