"""Rule constructors and seeded synthetic populations.

These generators double as independent oracles: a population synthesized from
known per-rule choice distributions is rationalizable by its own mixing
weights by construction, which pins down the soundness direction of the
identification engine without reusing any of its code.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .capacity import Label, Measure, core_vertices
from .errors import ValidationError
from .identification import DecisionRule, MenuCollection
from .info_specs import InfoSpec, build_capacity
from .numeric import Num

PRNG_ID = "python-random-mersenne-twister"


@dataclass(frozen=True)
class PreferenceOrder:
    """Strict ranking over all alternatives, best first."""

    ranking: tuple[Label, ...]

    def name(self) -> str:
        return "pref:" + ">".join(str(l) for l in self.ranking)


@dataclass(frozen=True)
class SatisficingSpec:
    """Threshold search: values, an aspiration level, and a consideration order."""

    values: tuple[tuple[Label, Num], ...]
    threshold: Num
    search_order: tuple[Label, ...]

    def value_of(self, label: Label) -> Num:
        for key, v in self.values:
            if key == label:
                return v
        raise ValidationError(f"no value assigned to {label!r}")


def rules_from_preferences(
    orders: Sequence[PreferenceOrder], collection: MenuCollection
) -> list[DecisionRule]:
    """Maximizers: each rule picks its highest-ranked member of every menu."""
    ground = collection.ground
    out = []
    for order in orders:
        if set(order.ranking) != set(ground.labels):
            raise ValidationError("ranking must be a permutation of the ground set")
        choices = []
        for menu in collection.menus:
            best = next(l for l in order.ranking if ground.singleton(l) & menu)
            choices.append(best)
        out.append(DecisionRule(order.name(), tuple(choices)))
    return out


def rules_from_satisficing(
    specs: Sequence[SatisficingSpec], collection: MenuCollection
) -> list[DecisionRule]:
    """Threshold searchers walking their consideration order within each menu.

    The first satisfactory alternative is taken; when a menu offers none, the
    searcher settles for the menu's last alternative in consideration order.
    """
    ground = collection.ground
    out = []
    for idx, spec in enumerate(specs):
        if set(spec.search_order) != set(ground.labels):
            raise ValidationError("search order must be a permutation of the ground set")
        choices = []
        for menu in collection.menus:
            in_menu = [l for l in spec.search_order if ground.singleton(l) & menu]
            pick = next(
                (l for l in in_menu if spec.value_of(l) >= spec.threshold),
                in_menu[-1],
            )
            choices.append(pick)
        out.append(DecisionRule(f"sat{idx}:{spec.threshold}", tuple(choices)))
    return out


@dataclass(frozen=True)
class SynthResult:
    lam: Measure
    rho_by_rule: dict[str, Measure]
    metadata: dict


def synth_population(
    rules: Sequence,
    specs: Sequence[InfoSpec],
    q: Measure,
    seed: int,
) -> SynthResult:
    """Draw one admissible choice distribution per rule and mix them.

    ``rules`` may be DecisionRule objects or bare rule ids.  Each rho_d is a
    seeded random rational mixture of the core vertices of the rule's
    capacity, so the returned data is rationalized by ``q`` by construction.
    The metadata records the PRNG so runs are reproducible.
    """
    rule_ids = [r.rule_id if isinstance(r, DecisionRule) else r for r in rules]
    if len(rule_ids) != len(specs):
        raise ValidationError("rule ids and specifications must align")
    if set(q.ground.labels) != set(rule_ids):
        raise ValidationError("Q is not a measure over the given rules")
    rng = random.Random(seed)
    ground = specs[0].ground
    rho_by_rule: dict[str, Measure] = {}
    lam_weights = [Fraction(0)] * ground.size
    for rule_id, spec in zip(rule_ids, specs):
        if spec.ground != ground:
            raise ValidationError("specifications live on different ground sets")
        vertices = core_vertices(build_capacity(spec))
        units = [rng.randint(0, 20) for _ in vertices]
        if sum(units) == 0:
            units[rng.randrange(len(units))] = 1
        total = sum(units)
        weights = [Fraction(0)] * ground.size
        for u, vertex in zip(units, vertices):
            share = Fraction(u, total)
            for i, w in enumerate(vertex.weights):
                weights[i] += share * w
        rho = Measure(ground, tuple(weights), spec.carrier)
        rho_by_rule[rule_id] = rho
        qd = q.weight(rule_id)
        for i, w in enumerate(rho.weights):
            lam_weights[i] += qd * w
    lam = Measure(ground, tuple(lam_weights))
    metadata = {"prng": PRNG_ID, "seed": seed, "weight_resolution": 20}
    return SynthResult(lam, rho_by_rule, metadata)
