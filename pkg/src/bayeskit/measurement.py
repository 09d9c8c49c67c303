"""Gaussian measurement-error model.

Each observation carries a value, the covariates it was taken at, and
the standard deviation of its own zero-mean Gaussian error.  The module
provides the error density and its log, the probability that an error
falls in an interval, and the joint log-density of a whole observation
set given model predictions.  Likelihood work happens on logs; the only
place a raw density is exponentiated is :func:`phi_density` itself.
"""

from __future__ import annotations

import csv
import math
import os
from dataclasses import dataclass
from typing import IO, Iterable, Mapping, Sequence

from .exceptions import InvalidPredictionError, InvertedIntervalError, ValidationError

_LOG_SQRT_TWO_PI = 0.5 * math.log(2.0 * math.pi)
_SQRT_TWO = math.sqrt(2.0)


@dataclass(frozen=True)
class GaussianError:
    """Zero-mean Gaussian error with standard deviation ``sigma`` > 0."""

    sigma: float

    def __post_init__(self):
        sigma = float(self.sigma)
        if not (math.isfinite(sigma) and sigma > 0.0):
            raise ValidationError(f"sigma must be finite and positive, got {sigma!r}")
        object.__setattr__(self, "sigma", sigma)


def phi_density(delta: float, err: GaussianError) -> float:
    """Density of the error law at deviation ``delta``."""
    z = delta / err.sigma
    return math.exp(-0.5 * z * z) / (err.sigma * math.sqrt(2.0 * math.pi))


def log_phi_density(delta: float, err: GaussianError) -> float:
    """Log density of the error law; safe far in the tails."""
    z = delta / err.sigma
    return -math.log(err.sigma) - _LOG_SQRT_TWO_PI - 0.5 * z * z


def interval_probability(lower: float, upper: float, err: GaussianError) -> float:
    """Probability that the error lies in [lower, upper].

    Bounds may be infinite.  Computed from the complementary error
    function; the interval is reflected onto the positive half-axis
    first so that far-tail intervals keep relative accuracy instead of
    cancelling.  Raises
    :class:`~bayeskit.exceptions.InvertedIntervalError` when
    ``lower > upper``.
    """
    lower = float(lower)
    upper = float(upper)
    if math.isnan(lower) or math.isnan(upper):
        raise ValidationError("interval bounds must not be NaN")
    if lower > upper:
        raise InvertedIntervalError(f"interval bounds out of order: {lower!r} > {upper!r}")
    if lower == upper:
        return 0.0
    if lower == -math.inf and upper == math.inf:
        return 1.0

    a = lower / (err.sigma * _SQRT_TWO)
    b = upper / (err.sigma * _SQRT_TWO)
    # erfc keeps relative accuracy for large positive arguments; mirror
    # intervals sitting mostly below zero onto the positive side.
    if a + b < 0.0:
        a, b = -b, -a
    p = 0.5 * (math.erfc(a) - math.erfc(b))
    return min(1.0, max(0.0, p))


@dataclass(frozen=True)
class ObservationRecord:
    """One measurement: covariate values, observed value, error law."""

    covariates: dict[str, float]
    value: float
    error: GaussianError

    def __post_init__(self):
        covs = {}
        for name, val in self.covariates.items():
            val = float(val)
            if not math.isfinite(val):
                raise ValidationError(f"covariate {name!r} must be finite, got {val!r}")
            covs[str(name)] = val
        value = float(self.value)
        if not math.isfinite(value):
            raise ValidationError(f"observed value must be finite, got {value!r}")
        object.__setattr__(self, "covariates", covs)
        object.__setattr__(self, "value", value)


@dataclass(frozen=True)
class ObservationSet:
    """Non-empty sequence of records sharing one covariate schema."""

    records: tuple[ObservationRecord, ...]

    def __init__(self, records: Iterable[ObservationRecord]):
        records = tuple(records)
        if not records:
            raise ValidationError("an observation set needs at least one record")
        names = tuple(records[0].covariates)
        for k, rec in enumerate(records):
            if tuple(rec.covariates) != names:
                raise ValidationError(
                    f"record {k} has covariates {tuple(rec.covariates)}, expected {names}"
                )
        object.__setattr__(self, "records", records)

    @property
    def nu(self) -> int:
        """Number of observations."""
        return len(self.records)

    @property
    def covariate_names(self) -> tuple[str, ...]:
        return tuple(self.records[0].covariates)

    def values(self) -> tuple[float, ...]:
        return tuple(rec.value for rec in self.records)

    def sigmas(self) -> tuple[float, ...]:
        return tuple(rec.error.sigma for rec in self.records)

    @classmethod
    def from_csv(cls, source: str | os.PathLike | IO[str]) -> "ObservationSet":
        """Load observations from a delimited file.

        The header must contain ``value`` and ``sigma`` columns; every
        other column is a covariate.  All cells must parse as floats.
        """
        if hasattr(source, "read"):
            return cls._from_csv_file(source)
        with open(source, newline="", encoding="utf-8") as handle:
            return cls._from_csv_file(handle)

    @classmethod
    def _from_csv_file(cls, handle: IO[str]) -> "ObservationSet":
        reader = csv.DictReader(handle)
        header = reader.fieldnames
        if header is None:
            raise ValidationError("observation file is empty")
        for required in ("value", "sigma"):
            if required not in header:
                raise ValidationError(f"observation file lacks a {required!r} column")
        covariate_names = [name for name in header if name not in ("value", "sigma")]

        records = []
        for line, row in enumerate(reader, start=2):
            try:
                covs = {name: float(row[name]) for name in covariate_names}
                value = float(row["value"])
                sigma = float(row["sigma"])
            except (TypeError, ValueError) as exc:
                raise ValidationError(f"line {line}: unreadable numeric cell ({exc})") from None
            records.append(ObservationRecord(covs, value, GaussianError(sigma)))
        if not records:
            raise ValidationError("observation file contains a header but no rows")
        return cls(records)


def log_omega(obs: ObservationSet, predictions: Sequence[float]) -> float:
    """Joint log-density of the observed values given model predictions.

    Sums the per-record log densities of the deviations (observed minus
    predicted) with an exactly rounded summation.  A prediction that is
    NaN or infinite raises
    :class:`~bayeskit.exceptions.InvalidPredictionError` carrying the
    record index.
    """
    predictions = list(predictions)
    if len(predictions) != obs.nu:
        raise ValidationError(
            f"got {len(predictions)} predictions for {obs.nu} observations"
        )
    terms = []
    for k, (rec, pred) in enumerate(zip(obs.records, predictions)):
        pred = float(pred)
        if not math.isfinite(pred):
            raise InvalidPredictionError(f"prediction for record {k} is {pred!r}", index=k)
        terms.append(log_phi_density(rec.value - pred, rec.error))
    return math.fsum(terms)
