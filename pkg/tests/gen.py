"""Seeded instance generators shared by the invariant and acceptance suites."""

import random
from fractions import Fraction as F

from capid import Capacity, GroundSet, Measure, ValidationError, capacity_from_mobius, is_convex
from capid.info_specs import (
    Contamination,
    Ignorance,
    IntervalBelief,
    VariationNeighborhood,
)

LABELS = "abcdef"
LABELS_BIG = "abcdefgh"

FAMILIES = ("ignorance", "contamination", "variation-neighborhood", "interval-belief")


def random_ground(rng: random.Random, lo=2, hi=5) -> GroundSet:
    return GroundSet.of(LABELS[: rng.randint(lo, hi)])


def random_carrier(rng: random.Random, ground: GroundSet, max_bits=3) -> int:
    bits = rng.randint(1, min(max_bits, ground.size))
    idx = rng.sample(range(ground.size), bits)
    mask = 0
    for i in idx:
        mask |= 1 << i
    return mask


def random_measure(rng: random.Random, ground: GroundSet, carrier=None, denom=20) -> Measure:
    carrier = ground.full_mask if carrier is None else carrier
    idx = [i for i in range(ground.size) if carrier >> i & 1]
    units = [rng.randint(0, denom) for _ in idx]
    if sum(units) == 0:
        units[rng.randrange(len(units))] = 1
    total = sum(units)
    weights = [F(0)] * ground.size
    for i, u in zip(idx, units):
        weights[i] = F(u, total)
    return Measure(ground, tuple(weights), carrier)


def random_belief_function(rng: random.Random, ground: GroundSet) -> Capacity:
    """Normalized random nonnegative masses over nonempty subsets."""
    n_masks = 1 << ground.size
    units = [0] * n_masks
    for mask in range(1, n_masks):
        if rng.random() < 0.5:
            units[mask] = rng.randint(1, 6)
    if sum(units) == 0:
        units[n_masks - 1] = 1
    total = sum(units)
    masses = [F(u, total) for u in units]
    return capacity_from_mobius(ground, masses)


def random_convex_capacity(rng: random.Random, ground: GroundSet) -> Capacity:
    """Belief-function base, then value perturbations that preserve convexity."""
    nu = random_belief_function(rng, ground)
    values = list(nu.values)
    full = ground.full_mask
    for _ in range(3):
        mask = rng.randint(1, full - 1)
        delta = F(rng.choice((-1, 1)), rng.randint(8, 32))
        candidate = values[:]
        candidate[mask] = max(F(0), min(F(1), candidate[mask] + delta))
        try:
            trial = Capacity(ground, tuple(candidate))
        except ValidationError:
            continue
        if is_convex(trial):
            values = candidate
    return Capacity(ground, tuple(values))


def random_spec(rng: random.Random, ground: GroundSet, family: str, carrier: int):
    if family == "ignorance":
        return Ignorance(ground, carrier)
    if family == "contamination":
        focal = random_measure(rng, ground, carrier)
        eps = F(rng.randint(0, 8), 8)
        return Contamination(ground, carrier, focal, eps)
    if family == "variation-neighborhood":
        ref = random_measure(rng, ground, carrier)
        eps = F(rng.randint(1, 20), 20)
        return VariationNeighborhood(ground, carrier, ref, eps)
    if family == "interval-belief":
        focal = random_measure(rng, ground, carrier)
        shrink = F(rng.randint(1, 9), 10)
        grow = 1 + F(rng.randint(1, 10), 10)
        lower = tuple(shrink * w for w in focal.weights)
        bump = F(rng.randint(0, 4), 20)
        upper = tuple(
            grow * w + (bump if carrier >> i & 1 else F(0))
            for i, w in enumerate(focal.weights)
        )
        return IntervalBelief(ground, carrier, lower, upper)
    raise ValueError(family)


def random_q(rng: random.Random, ids, denom=10) -> Measure:
    units = [rng.randint(0, denom) for _ in ids]
    if sum(units) == 0:
        units[rng.randrange(len(units))] = 1
    total = sum(units)
    return Measure(GroundSet.of(ids), tuple(F(u, total) for u in units))
