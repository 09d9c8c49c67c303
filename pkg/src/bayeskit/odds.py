"""Probability inversion over a complete class of discrete causes.

A :class:`CausalSystem` bundles an exhaustive, mutually exclusive set of
causes with their prior probabilities and, per registered event, the
probability of that event under each cause.  From it one can compute the
full posterior over causes, or work with a single pair of hypotheses
through Bayes factors and odds updates.

Odds arithmetic runs in log space internally: a long chain of small
factors would underflow long before its logarithm loses meaning.  Zero
and infinite odds are kept as first-class extended reals, and the one
genuinely undefined combination (zero odds meeting an infinite factor)
raises rather than producing a quiet NaN.

Args/Returns conventions: probabilities are plain floats in [0, 1];
odds are non-negative floats where ``math.inf`` means certainty of the
numerator hypothesis.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Mapping, Sequence

from .exceptions import (
    InconsistentEvidenceError,
    IndeterminateOddsError,
    UndefinedFactorError,
    UnknownEventError,
    ValidationError,
)

# Tolerance for the sum of prior probabilities. Inputs failing it are
# rejected outright, never renormalized.
PROBABILITY_SUM_TOL = 1e-12


def _check_probability(value: float, what: str) -> float:
    value = float(value)
    if math.isnan(value) or not 0.0 <= value <= 1.0:
        raise ValidationError(f"{what} must lie in [0, 1], got {value!r}")
    return value


@dataclass(frozen=True)
class CausalSystem:
    """Complete class of causes with priors and per-event likelihoods.

    ``labels`` names the causes, ``priors`` their probabilities (which
    must sum to one within :data:`PROBABILITY_SUM_TOL`), and ``events``
    maps each registered event label to the list of conditional
    probabilities of that event, one entry per cause, aligned with
    ``labels``.  Instances are immutable after construction.
    """

    labels: tuple[str, ...]
    priors: tuple[float, ...]
    events: dict[str, tuple[float, ...]]

    def __init__(
        self,
        labels: Sequence[str],
        priors: Sequence[float],
        events: Mapping[str, Sequence[float]],
    ):
        labels = tuple(str(lab) for lab in labels)
        if not labels:
            raise ValidationError("a causal system needs at least one cause")
        if len(set(labels)) != len(labels):
            raise ValidationError("cause labels must be unique")

        priors = tuple(_check_probability(p, f"prior of {lab!r}") for lab, p in zip(labels, priors))
        if len(priors) != len(labels):
            raise ValidationError("need exactly one prior per cause")
        total = math.fsum(priors)
        if abs(total - 1.0) > PROBABILITY_SUM_TOL:
            raise ValidationError(f"priors must sum to 1 within {PROBABILITY_SUM_TOL}, got {total!r}")

        checked: dict[str, tuple[float, ...]] = {}
        for event, liks in events.items():
            liks = tuple(
                _check_probability(l, f"P({event!r} | {lab!r})") for lab, l in zip(labels, liks)
            )
            if len(liks) != len(labels):
                raise ValidationError(f"event {event!r} needs one likelihood per cause")
            checked[str(event)] = liks

        object.__setattr__(self, "labels", labels)
        object.__setattr__(self, "priors", priors)
        object.__setattr__(self, "events", checked)

    @property
    def size(self) -> int:
        return len(self.labels)

    def index(self, label: str) -> int:
        try:
            return self.labels.index(label)
        except ValueError:
            raise ValidationError(f"unknown cause label {label!r}") from None

    def event_likelihoods(self, event: str) -> tuple[float, ...]:
        try:
            return self.events[event]
        except KeyError:
            raise UnknownEventError(f"event {event!r} is not registered with this system") from None

    def to_dict(self) -> dict:
        return {
            "causes": [{"label": lab, "prior": p} for lab, p in zip(self.labels, self.priors)],
            "events": {event: list(liks) for event, liks in self.events.items()},
        }

    @classmethod
    def from_dict(cls, data: Mapping) -> "CausalSystem":
        try:
            causes = data["causes"]
            events = data.get("events", {})
            labels = [c["label"] for c in causes]
            priors = [c["prior"] for c in causes]
        except (KeyError, TypeError) as exc:
            raise ValidationError(f"malformed causal system document: {exc}") from None
        return cls(labels, priors, events)


@dataclass(frozen=True)
class EvidenceItem:
    """One piece of evidence for a hypothesis pair.

    ``h_num`` and ``h_den`` are the probabilities of the observed event
    under the numerator and denominator hypotheses.  A pair of zeros is
    rejected here: such an item carries no defined ratio at all.
    """

    event_label: str
    h_num: float
    h_den: float

    def __post_init__(self):
        object.__setattr__(self, "h_num", _check_probability(self.h_num, "h_num"))
        object.__setattr__(self, "h_den", _check_probability(self.h_den, "h_den"))
        if self.h_num == 0.0 and self.h_den == 0.0:
            raise UndefinedFactorError(
                f"event {self.event_label!r} has zero probability under both hypotheses"
            )

    @property
    def log_factor(self) -> float:
        """Natural log of the Bayes factor, as an extended real."""
        if self.h_num == 0.0:
            return -math.inf
        if self.h_den == 0.0:
            return math.inf
        return math.log(self.h_num) - math.log(self.h_den)


def _safe_exp(x: float) -> float:
    try:
        return math.exp(x)
    except OverflowError:
        return math.inf


def _log_of_odds(odds: float) -> float:
    if odds == 0.0:
        return -math.inf
    if math.isinf(odds):
        return math.inf
    return math.log(odds)


@dataclass(frozen=True)
class OddsState:
    """Odds of one cause against another.

    ``odds`` is a non-negative extended real; ``log_odds`` is carried
    alongside so that chained updates never round-trip through a value
    that may have under- or overflowed.  Omit ``log_odds`` to have it
    derived from ``odds``.
    """

    numerator_label: str
    denominator_label: str
    odds: float
    log_odds: float | None = None

    def __post_init__(self):
        odds = float(self.odds)
        if math.isnan(odds) or odds < 0.0:
            raise ValidationError(f"odds must be a non-negative extended real, got {odds!r}")
        object.__setattr__(self, "odds", odds)
        if self.log_odds is None:
            object.__setattr__(self, "log_odds", _log_of_odds(odds))
        else:
            object.__setattr__(self, "log_odds", float(self.log_odds))

    @classmethod
    def from_log_odds(cls, numerator_label: str, denominator_label: str, log_odds: float) -> "OddsState":
        return cls(numerator_label, denominator_label, _safe_exp(log_odds), log_odds)


def posterior_over_causes(system: CausalSystem, event: str) -> tuple[float, ...]:
    """Posterior probability of every cause given one observed event.

    Each entry is prior times likelihood, normalized by the total
    probability of the event.  Raises
    :class:`~bayeskit.exceptions.InconsistentEvidenceError` when that
    total is zero (the event is impossible under every cause) and
    :class:`~bayeskit.exceptions.UnknownEventError` for unregistered
    event labels.
    """
    likelihoods = system.event_likelihoods(event)
    joint = [lik * prior for lik, prior in zip(likelihoods, system.priors)]
    total = math.fsum(joint)
    if total == 0.0:
        raise InconsistentEvidenceError(
            f"event {event!r} has zero probability under every cause"
        )
    return tuple(j / total for j in joint)


def bayes_factor(item: EvidenceItem) -> float:
    """Ratio of the event's probabilities under the two hypotheses.

    Infinite when the denominator hypothesis rules the event out while
    the numerator does not; the 0/0 case cannot reach here because
    :class:`EvidenceItem` refuses to hold it.
    """
    if item.h_den == 0.0:
        return math.inf
    return item.h_num / item.h_den


def update_odds(prior: OddsState, item: EvidenceItem) -> OddsState:
    """Multiply prior odds by the item's Bayes factor (in log space)."""
    new_log = prior.log_odds + item.log_factor
    if math.isnan(new_log):
        raise IndeterminateOddsError(
            f"cannot combine odds {prior.odds!r} with factor for event "
            f"{item.event_label!r}: zero times infinity is undefined"
        )
    return OddsState.from_log_odds(prior.numerator_label, prior.denominator_label, new_log)


def sequential_update(prior: OddsState, items: Sequence[EvidenceItem]) -> OddsState:
    """Fold a list of evidence items into the prior odds.

    The result is the prior odds times the product of all Bayes factors.
    Log factors are combined with an exactly rounded sum, so the output
    is bit-identical under any permutation of ``items``.  An update that
    multiplies zero odds by an infinite factor (or the reverse), taken
    in list order, raises with the offending item's index.
    """
    items = list(items)
    if not items:
        return prior

    log_factors = [item.log_factor for item in items]

    # Walk in order to pinpoint which item first turns the chain
    # indeterminate. Only the sign class of the running odds matters:
    # finite factors never move it between zero, finite and infinite.
    state = prior.log_odds
    for k, lf in enumerate(log_factors):
        if math.isinf(state) and math.isinf(lf) and state != lf:
            raise IndeterminateOddsError(
                f"evidence item {k} (event {items[k].event_label!r}) multiplies "
                f"{'zero' if state < 0 else 'infinite'} odds by an "
                f"{'infinite' if lf > 0 else 'zero'} factor"
            )
        if math.isinf(lf) and not math.isinf(state):
            state = lf

    total = prior.log_odds + math.fsum(log_factors)
    if math.isnan(total):
        raise IndeterminateOddsError("evidence chain combines zero odds with an infinite factor")
    return OddsState.from_log_odds(prior.numerator_label, prior.denominator_label, total)


def odds_from_posteriors(system: CausalSystem, event: str, i: int, j: int) -> OddsState:
    """Posterior odds of cause ``i`` against cause ``j`` given the event.

    Defined as the ratio of the corresponding posterior-vector entries.
    When the two priors are equal (and positive) the priors cancel
    exactly, so the likelihood ratio is returned directly; this keeps
    the equal-prior identity bit-exact instead of merely close.
    """
    n = system.size
    for idx in (i, j):
        if not 0 <= idx < n:
            raise IndexError(f"cause index {idx} out of range for {n} causes")
    if i == j:
        return OddsState(system.labels[i], system.labels[j], 1.0)

    likelihoods = system.event_likelihoods(event)
    h_i, h_j = likelihoods[i], likelihoods[j]
    p_i, p_j = system.priors[i], system.priors[j]

    if p_i == p_j and p_i > 0.0:
        # Equal priors cancel: the posterior ratio is the likelihood ratio.
        if h_i == 0.0 and h_j == 0.0:
            raise IndeterminateOddsError(
                f"both posteriors vanish for event {event!r}; their ratio is undefined"
            )
        posterior_over_causes(system, event)  # still reject impossible events
        odds = math.inf if h_j == 0.0 else h_i / h_j
        return OddsState(system.labels[i], system.labels[j], odds)

    posteriors = posterior_over_causes(system, event)
    post_i, post_j = posteriors[i], posteriors[j]
    if post_j == 0.0:
        if post_i == 0.0:
            raise IndeterminateOddsError(
                f"both posteriors vanish for event {event!r}; their ratio is undefined"
            )
        return OddsState(system.labels[i], system.labels[j], math.inf)
    return OddsState(system.labels[i], system.labels[j], post_i / post_j)
