"""Identification of the average updating bias from posterior-odds data.

The population holds a common prior log-odds value and each individual runs
an unobserved experiment, then updates by a rule that blends the standard
posterior with inertia toward the prior: weight kappa on the prior point mass
(kappa > 0 underreacts to information, kappa < 0 overreacts).  The analyst's
knowledge of experiments is a convex capacity over signal shifts whose core
is the admissible experiment set.

Whether a distribution over update rules explains the observed cross-section
of posterior odds turns out to depend only on its mean kappa, so the engine
reduces to a one-dimensional question: ``rationalizing_kappa_interval``
intersects one linear inequality per subset of odds values and reports the
exact interval of admissible average biases, plus a diagnosis of which way
the data deviates from pure-noise-free updating.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from typing import Optional, Sequence

from .capacity import Capacity, GroundSet, Measure, core_vertices, is_convex
from .errors import ValidationError
from .identification import Verdict, _dominance_verdict
from .numeric import Num, ge, tol_for


@dataclass(frozen=True)
class OddsGrid:
    """Finite grid of log-odds values with a designated prior point.

    ``ground`` carries the odds values themselves as labels; ``shifted``
    carries the same grid recentred at the prior (signal space).  The two are
    index-aligned, so subset masks transfer between them unchanged.
    """

    ground: GroundSet
    prior: Num
    shifted: GroundSet

    @classmethod
    def from_values(cls, values: Sequence[Num], prior: Num) -> "OddsGrid":
        if prior not in values:
            raise ValidationError("prior odds value must belong to the grid")
        ground = GroundSet(tuple(values))
        shifted = GroundSet(tuple(v - prior for v in values))
        return cls(ground, prior, shifted)

    @property
    def prior_mask(self) -> int:
        return self.ground.singleton(self.prior)

    @property
    def null_signal_index(self) -> int:
        return self.shifted.index(self.prior - self.prior)


@dataclass(frozen=True)
class ExperimentModel:
    """Admissible experiments as the core of a convex capacity on signals.

    Every core vertex must put mass strictly below 1 on the null signal;
    otherwise the inertia floor is undefined and the model is rejected.
    """

    grid: OddsGrid
    nu: Capacity

    def __post_init__(self) -> None:
        if self.nu.ground != self.grid.shifted:
            raise ValidationError("experiment capacity must live on the shifted grid")
        if not is_convex(self.nu):
            raise ValidationError("experiment capacity must be convex")
        zero_idx = self.grid.null_signal_index
        tol = self.nu.tol
        for vertex in self.vertices:
            if ge(vertex.weights[zero_idx], 1, tol):
                raise ValidationError(
                    "an admissible experiment is allowed to be pure noise "
                    "(mass 1 on the null signal); such models are rejected"
                )

    @cached_property
    def vertices(self) -> tuple[Measure, ...]:
        return core_vertices(self.nu)

    @cached_property
    def kappa_floor(self) -> Num:
        """Largest inertia weight floor over admissible experiments.

        Monotone in the null-signal mass, so the maximum over the core is
        attained at a vertex.
        """
        zero_idx = self.grid.null_signal_index
        floors = [
            -v.weights[zero_idx] / (1 - v.weights[zero_idx]) for v in self.vertices
        ]
        return max(floors)


@dataclass(frozen=True)
class KappaRange:
    """Admissible bias interval, clipped to [model floor, 1]."""

    lo: Num
    hi: Num

    def __post_init__(self) -> None:
        if self.lo > self.hi:
            raise ValidationError("empty kappa range")
        if self.hi > 1:
            raise ValidationError("kappa cannot exceed 1")

    @classmethod
    def for_model(
        cls, model: ExperimentModel, lo: Optional[Num] = None, hi: Optional[Num] = None
    ) -> "KappaRange":
        floor = model.kappa_floor
        lo = floor if lo is None else max(lo, floor)
        hi = Fraction(1) if hi is None else min(hi, Fraction(1))
        return cls(lo, hi)

    def contains(self, kappa: Num) -> bool:
        return self.lo <= kappa <= self.hi


def bayes_posterior(experiment: Measure, grid: OddsGrid) -> Measure:
    """Posterior odds when the change in odds is distributed as the signal."""
    if experiment.ground != grid.shifted:
        raise ValidationError("experiment must live on the shifted grid")
    return Measure(grid.ground, experiment.weights)


def apply_update_rule(kappa: Num, experiment: Measure, grid: OddsGrid) -> Measure:
    """Blend the posterior with the prior point mass at weight kappa.

    kappa = 0 reproduces ``bayes_posterior``; kappa = 1 collapses onto the
    prior.  Negative kappa overshoots away from the prior and is admissible
    only while all probabilities stay nonnegative.
    """
    if kappa > 1:
        raise ValidationError("kappa cannot exceed 1")
    posterior = bayes_posterior(experiment, grid)
    prior_idx = grid.ground.index(grid.prior)
    weights = list((1 - kappa) * w for w in posterior.weights)
    weights[prior_idx] += kappa
    tol = tol_for(weights)
    for w in weights:
        if not ge(w, 0, tol):
            raise ValidationError(
                f"kappa {kappa} drives a posterior weight negative; it lies "
                "below the admissible floor for this experiment"
            )
    return Measure(grid.ground, tuple(weights))


def biased_capacity(kappa: Num, model: ExperimentModel, grid: OddsGrid) -> Capacity:
    """Capacity whose core is the set of kappa-updated posterior distributions.

    Values blend the experiment capacity of the recentred subset with the
    indicator of the prior's membership; this stays convex for every kappa in
    the admissible range, negative values included.
    """
    if not KappaRange.for_model(model).contains(kappa):
        raise ValidationError(f"kappa {kappa} outside the admissible range")
    prior_mask = grid.prior_mask
    values = tuple(
        (1 - kappa) * model.nu.values[mask] + (kappa if mask & prior_mask else 0)
        for mask in grid.ground.masks()
    )
    return Capacity(grid.ground, values)


def check_average_bias(
    lam: Measure, model: ExperimentModel, grid: OddsGrid, kappa_av: Num
) -> Verdict:
    """Dominance verdict at a single average bias.

    Rationalizability by any rule mix depends only on the mean kappa, so this
    one check settles every mix with that mean.
    """
    if lam.ground != grid.ground:
        raise ValidationError("data must live on the odds grid")
    nu_k = biased_capacity(kappa_av, model, grid)
    return _dominance_verdict(grid.ground, lam, [nu_k], [Fraction(1)])


@dataclass(frozen=True)
class KappaSolution:
    """Exact interval of rationalizing average biases plus a diagnosis.

    ``diagnosis`` is one of "bayesian-feasible" (zero bias works),
    "underreaction" (only positive biases work), "overreaction" (only
    negative), or "impossible".  The witness masks collect the subsets whose
    data mass falls below the pure-posterior floor, split by whether the
    prior belongs to the subset.
    """

    empty: bool
    lo: Optional[Num]
    hi: Optional[Num]
    diagnosis: str
    under_witnesses: tuple[int, ...]
    over_witnesses: tuple[int, ...]


def rationalizing_kappa_interval(
    lam: Measure,
    model: ExperimentModel,
    grid: OddsGrid,
    krange: Optional[KappaRange] = None,
) -> KappaSolution:
    """Intersect the per-subset linear inequalities in the average bias.

    Every subset K yields ``lam(K) >= (1-kappa) nu(K recentred) + kappa [prior in K]``,
    a half-line in kappa; the admissible interval is their intersection with
    the model range.
    """
    if lam.ground != grid.ground:
        raise ValidationError("data must live on the odds grid")
    krange = KappaRange.for_model(model) if krange is None else KappaRange.for_model(
        model, krange.lo, krange.hi
    )
    tol = tol_for(lam.weights, model.nu.values)
    prior_mask = grid.prior_mask
    lo: Num = krange.lo
    hi: Num = krange.hi
    empty = False
    under: list[int] = []
    over: list[int] = []
    for mask in grid.ground.masks():
        base = model.nu.values[mask]
        in_prior = 1 if mask & prior_mask else 0
        lam_k = lam.mass(mask)
        if lam_k < base - tol:
            # data falls below the zero-bias floor on this subset
            (over if in_prior else under).append(mask)
        coeff = in_prior - base
        slackv = lam_k - base
        if coeff > tol:
            bound = slackv / coeff
            if bound < hi:
                hi = bound
        elif coeff < -tol:
            bound = slackv / coeff
            if bound > lo:
                lo = bound
        elif slackv < -tol:
            empty = True
    if not empty and lo > hi + tol:
        empty = True
    if empty:
        return KappaSolution(True, None, None, "impossible", tuple(under), tuple(over))
    if lo > hi:
        hi = lo
    if ge(0, lo, tol) and ge(hi, 0, tol):
        diagnosis = "bayesian-feasible"
    elif lo > 0:
        diagnosis = "underreaction"
    else:
        diagnosis = "overreaction"
    return KappaSolution(False, lo, hi, diagnosis, tuple(under), tuple(over))


def average_bias(q: Measure) -> Num:
    """Mean kappa of a distribution over update rules (labels are kappas)."""
    return sum(w * label for w, label in zip(q.weights, q.ground.labels))
