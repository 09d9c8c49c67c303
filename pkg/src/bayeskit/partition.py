"""Exact counting model for posterior updating over equiprobable cases.

The whole sample space is cut into equally likely cases, cross-tabulated
by a binary event E and three hypotheses: H (counts ``m`` with E, ``n``
without), the rival H' (``m_p``, ``n_p``), and an optional residual
bucket covering everything else (``m_pp``, ``n_pp``).  Priors,
likelihoods and posteriors are then ratios of integers, so every result
here is a :class:`fractions.Fraction` and the ratio identity

    posterior ratio = likelihood ratio x prior ratio

holds with literally zero residual, not merely within rounding.  When
H and H' hold the same number of cases the prior ratio is one and the
posterior ratio collapses to the bare likelihood ratio.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping

from .exceptions import ImpossibleEventError, UndefinedFactorError, ValidationError
from .odds import CausalSystem

HYPOTHESIS = "H"
RIVAL = "H'"
OTHER = "other"

# JSON key per count field, in canonical order.
_JSON_KEYS = (("m", "m"), ("n", "n"), ("m'", "m_p"), ("n'", "n_p"), ("m''", "m_pp"), ("n''", "n_pp"))


def _check_count(value, what: str) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        raise ValidationError(f"{what} must be an integer count, got {value!r}")
    if value < 0:
        raise ValidationError(f"{what} must be non-negative, got {value}")
    return value


@dataclass(frozen=True)
class CasePartition:
    """Counts of equiprobable cases split by event and hypothesis.

    ``m``/``n`` count the cases inside H where E does/does not occur,
    ``m_p``/``n_p`` the same inside H', and ``m_pp``/``n_pp`` cover the
    rest of the sample space.  H and H' must each contain at least one
    case.
    """

    m: int
    n: int
    m_p: int
    n_p: int
    m_pp: int = 0
    n_pp: int = 0

    def __post_init__(self):
        for name in ("m", "n", "m_p", "n_p", "m_pp", "n_pp"):
            _check_count(getattr(self, name), name)
        if self.m + self.n == 0:
            raise ValidationError("hypothesis H must contain at least one case (m + n > 0)")
        if self.m_p + self.n_p == 0:
            raise ValidationError("hypothesis H' must contain at least one case (m' + n' > 0)")

    @property
    def total(self) -> int:
        """Number of cases in the whole partition."""
        return self.m + self.n + self.m_p + self.n_p + self.m_pp + self.n_pp

    @property
    def event_count(self) -> int:
        """Number of cases in which the event occurs."""
        return self.m + self.m_p + self.m_pp

    def _bucket(self, which: str) -> tuple[int, int]:
        if which == HYPOTHESIS:
            return self.m, self.n
        if which == RIVAL:
            return self.m_p, self.n_p
        if which == OTHER:
            return self.m_pp, self.n_pp
        raise ValidationError(f"unknown hypothesis selector {which!r}")

    def prior(self, which: str) -> Fraction:
        """Share of all cases belonging to the chosen hypothesis."""
        with_e, without_e = self._bucket(which)
        return Fraction(with_e + without_e, self.total)

    def likelihood(self, which: str) -> Fraction:
        """Probability of the event inside the chosen hypothesis.

        Only defined for H and H'; the residual bucket may be empty.
        """
        if which == OTHER:
            raise ValidationError("likelihood is defined for H and H' only")
        with_e, without_e = self._bucket(which)
        return Fraction(with_e, with_e + without_e)

    def posterior(self, which: str) -> Fraction:
        """Probability of the chosen hypothesis among event cases."""
        if which == OTHER:
            raise ValidationError("posterior is defined for H and H' only")
        if self.event_count == 0:
            raise ImpossibleEventError("the event occurs in no case of the partition")
        with_e, _ = self._bucket(which)
        return Fraction(with_e, self.event_count)

    def joint_probabilities(self) -> dict[str, Fraction]:
        """The six exact joint probabilities of (event, hypothesis) pairs."""
        t = self.total
        return {
            "E&H": Fraction(self.m, t),
            "notE&H": Fraction(self.n, t),
            "E&H'": Fraction(self.m_p, t),
            "notE&H'": Fraction(self.n_p, t),
            "E&other": Fraction(self.m_pp, t),
            "notE&other": Fraction(self.n_pp, t),
        }

    def verify_theorem(self) -> "TheoremReport":
        """Check the exact ratio identity on this partition.

        Requires the event to be possible and at least one of ``m``,
        ``m_p`` to be positive (otherwise both ratios are 0/0).  Ratios
        whose denominator hypothesis has no event cases are reported as
        ``math.inf``; the residual of the identity is an exact rational
        and is zero for every valid partition.
        """
        if self.event_count == 0:
            raise ImpossibleEventError("the event occurs in no case of the partition")
        if self.m == 0 and self.m_p == 0:
            raise UndefinedFactorError(
                "both hypotheses have zero event cases; their ratio is 0/0"
            )

        prior_ratio = self.prior(HYPOTHESIS) / self.prior(RIVAL)
        if self.m_p > 0:
            posterior_ratio = self.posterior(HYPOTHESIS) / self.posterior(RIVAL)
            likelihood_ratio = self.likelihood(HYPOTHESIS) / self.likelihood(RIVAL)
            residual = abs(posterior_ratio - likelihood_ratio * prior_ratio)
        else:
            # m > 0, m' = 0: both sides of the identity diverge together
            # (the prior ratio stays finite and positive), so the identity
            # holds in the extended sense and the residual is exactly zero.
            posterior_ratio = math.inf
            likelihood_ratio = math.inf
            residual = Fraction(0)

        return TheoremReport(
            equal_priors=self.m + self.n == self.m_p + self.n_p,
            posterior_ratio=posterior_ratio,
            likelihood_ratio=likelihood_ratio,
            prior_ratio=prior_ratio,
            general_identity_residual=residual,
        )

    def to_causal_system(self, event: str = "E") -> CausalSystem:
        """Express the partition as a floating-point causal system.

        H and H' become causes with priors and event likelihoods taken
        from the counts; a third cause absorbs the residual bucket when
        it is non-empty.  Useful for cross-checking the odds machinery
        against exact arithmetic.
        """
        labels = [HYPOTHESIS, RIVAL]
        priors = [float(self.prior(HYPOTHESIS)), float(self.prior(RIVAL))]
        likelihoods = [float(self.likelihood(HYPOTHESIS)), float(self.likelihood(RIVAL))]
        if self.m_pp + self.n_pp > 0:
            labels.append(OTHER)
            priors.append(float(self.prior(OTHER)))
            likelihoods.append(float(Fraction(self.m_pp, self.m_pp + self.n_pp)))
        return CausalSystem(labels, priors, {event: likelihoods})

    def to_dict(self) -> dict:
        return {key: getattr(self, attr) for key, attr in _JSON_KEYS}

    @classmethod
    def from_dict(cls, data: Mapping) -> "CasePartition":
        missing = [key for key, _ in _JSON_KEYS[:4] if key not in data]
        if missing:
            raise ValidationError(f"partition document is missing counts: {missing}")
        values = {attr: data.get(key, 0) for key, attr in _JSON_KEYS}
        return cls(**values)


@dataclass(frozen=True)
class TheoremReport:
    """Outcome of :meth:`CasePartition.verify_theorem`.

    Ratios are exact :class:`~fractions.Fraction` values, or ``math.inf``
    when the denominator hypothesis has no event cases.
    """

    equal_priors: bool
    posterior_ratio: Fraction | float
    likelihood_ratio: Fraction | float
    prior_ratio: Fraction
    general_identity_residual: Fraction
