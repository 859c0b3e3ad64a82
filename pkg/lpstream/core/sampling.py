"""
LPStream: Weighted Sampling and Violator Check

Two one-pass routines of the solver loop:

    sample_m_points          one estimator/sampler pair per weight class, then
                             m draws: class by weight, point by l0 sample
    check_violators_weight   two estimator banks (all points, violators only)
                             and the success test
                                 (1/1.25) w(V) <= mu (1/0.75) w(Q)

Banks are linear, so a pass may be split into shards that fill thread-local
clones; clones are merged in shard order.
"""

import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from lpstream.core.seeds import SeedPurpose, derive_rng, derive_seed
from lpstream.core.weights import WeightOracle, scaled_class_weights
from lpstream.errors import EmptyInputError
from lpstream.sketch import L0Estimator, L0Sampler, SketchConfig

logger = logging.getLogger(__name__)

# Denominators of the success test (estimators are 1 +- 1/4 accurate).
OVER_FACTOR = 1.25
UNDER_FACTOR = 0.75


# ============================================================
# Sketch banks
# ============================================================

@dataclass
class SketchBank:
    """One estimator (and optionally one sampler) per weight class."""

    estimators: list
    samplers: list = field(default_factory=list)

    def feed(self, cls: int, index: int, sign: int):
        self.estimators[cls].update(index, sign)
        if self.samplers:
            self.samplers[cls].update(index, sign)

    def fresh_like(self) -> "SketchBank":
        return SketchBank(
            [e.fresh_like() for e in self.estimators],
            [s.fresh_like() for s in self.samplers],
        )

    def merge(self, other: "SketchBank") -> "SketchBank":
        return SketchBank(
            [a.merge(b) for a, b in zip(self.estimators, other.estimators)],
            [a.merge(b) for a, b in zip(self.samplers, other.samplers)],
        )

    def counts(self) -> list:
        return [e.estimate() for e in self.estimators]

    def words(self) -> int:
        return sum(s.word_count() for s in self.estimators + self.samplers)


def _sample_bank(params, plan, t: int) -> SketchBank:
    estimators, samplers = [], []
    for cls in range(t + 1):
        config = SketchConfig(
            plan.universe_size, params.zeta, params.delta,
            derive_seed(params.seed, SeedPurpose.SAMPLE_BANK, t, cls), params.backend,
        )
        estimators.append(L0Estimator(config))
        samplers.append(L0Sampler(config))
    return SketchBank(estimators, samplers)


def _check_bank(params, plan, t: int, side: int) -> SketchBank:
    estimators = []
    for cls in range(t + 1):
        config = SketchConfig(
            plan.universe_size, params.check_zeta, params.check_delta,
            derive_seed(params.seed, SeedPurpose.CHECK_BANK, t, cls, side), params.backend,
        )
        estimators.append(L0Estimator(config))
    return SketchBank(estimators)


def _fill_sharded(chunks: list, empty_banks: tuple, feed_chunk, workers: int) -> tuple:
    """Feed every chunk into its own clone of `empty_banks`; merge in chunk order."""
    if len(chunks) == 1:
        feed_chunk(chunks[0], empty_banks)
        return empty_banks

    clones = [tuple(bank.fresh_like() for bank in empty_banks) for _ in chunks]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        list(pool.map(feed_chunk, chunks, clones))
    merged = clones[0]
    for clone in clones[1:]:
        merged = tuple(a.merge(b) for a, b in zip(merged, clone))
    return merged


# ============================================================
# Sampling
# ============================================================

@dataclass(frozen=True)
class Sample:
    points: tuple   # distinct indices, sorted
    draws: tuple    # all m draws, class order
    words: int = 0


def build_sample_bank(source, oracle: WeightOracle, params, plan, t: int) -> SketchBank:
    """One pass: every snapped point goes into the pair of its current weight class."""

    def feed(chunk, banks):
        (bank,) = banks
        for index, sign in chunk:
            bank.feed(oracle.weight_exponent(index), index, sign)

    chunks = source.scan(params.workers)
    (bank,) = _fill_sharded(chunks, (_sample_bank(params, plan, t),), feed, params.workers)
    return bank


def choose_classes(counts, plan, m: int, rng: np.random.Generator) -> list:
    """Number of draws per class, class i with probability ~ f_i N^(i/s)."""
    weights = np.array(scaled_class_weights(counts, plan.log_growth), dtype=float)
    total = weights.sum()
    if total <= 0:
        raise EmptyInputError("no live points to sample from")
    return [int(k) for k in rng.multinomial(m, weights / total)]


def draw_from_bank(bank: SketchBank, plan, m: int, rng: np.random.Generator) -> list:
    per_class = choose_classes(bank.counts(), plan, m, rng)
    draws = []
    for cls, k in enumerate(per_class):
        if not k:
            continue
        got = bank.samplers[cls].sample_many(k)
        if len(got) < k:
            logger.warning(f"class {cls}: sampler returned {len(got)} of {k} draws")
        draws.extend(got)
    return draws


def sample_m_points(source, oracle: WeightOracle, params, plan, t: int, m: Optional[int] = None) -> Sample:
    bank = build_sample_bank(source, oracle, params, plan, t)
    rng = derive_rng(params.seed, SeedPurpose.DRAW, t, 0)
    draws = draw_from_bank(bank, plan, plan.m if m is None else m, rng)
    if not draws:
        raise EmptyInputError("sampling produced no points")
    return Sample(tuple(sorted(set(draws))), tuple(draws), bank.words())


# ============================================================
# Violator check
# ============================================================

@dataclass(frozen=True)
class ViolatorCheck:
    success: bool
    violators_empty: bool
    totals: tuple
    violators: tuple
    words: int = 0


def is_successful(totals, violators, plan) -> bool:
    live = [i for i, c in enumerate(totals) if c > 0]
    top = live[-1] if live else 0
    left = sum(scaled_class_weights(violators, plan.log_growth, top)) / OVER_FACTOR
    right = plan.mu * sum(scaled_class_weights(totals, plan.log_growth, top)) / UNDER_FACTOR
    return left <= right


def fill_check_banks(chunks: list, oracle: WeightOracle, candidate, params, plan, t: int) -> tuple:
    problem = oracle.problem

    def feed(chunk, banks):
        everything, violating = banks
        for index, sign in chunk:
            element = oracle.unsnap(index)
            cls = oracle.exponent_of(element)
            everything.feed(cls, index, sign)
            if problem.violates(candidate, element):
                violating.feed(cls, index, sign)

    banks = (_check_bank(params, plan, t, 0), _check_bank(params, plan, t, 1))
    return _fill_sharded(chunks, banks, feed, params.workers)


def check_violators_weight(source, oracle: WeightOracle, params, plan, t: int, candidate) -> ViolatorCheck:
    everything, violating = fill_check_banks(source.scan(params.workers), oracle, candidate, params, plan, t)
    totals = tuple(everything.counts())
    violators = tuple(violating.counts())
    return ViolatorCheck(
        success=is_successful(totals, violators, plan),
        violators_empty=not any(violators),
        totals=totals,
        violators=violators,
        words=everything.words() + violating.words(),
    )
