"""Command line front end.

Four subcommands cover the library surface: ``odds`` (discrete causes),
``partition`` (exact counting check), ``fit`` (grid posterior for a
model formula), and ``sharper`` (repeated-deal demonstration).  Reports
are JSON on stdout or, with ``--out``, written to a file; grid dumps are
delimited text via ``--dump-grid``.  Diagnostics go to stderr, and the
exit status is zero exactly when a complete report was written.

Floats in reports are printed with 17 significant digits so values
survive a round trip; infinite odds appear as the ``Infinity`` token,
which Python's own json module reads back.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
import warnings
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path
from typing import Any

from .exceptions import BayeskitError, IndeterminateOddsError, ValidationError
from .grid import evaluate_posterior, moments, write_grid_csv
from .expressions import load_model
from .measurement import ObservationSet
from .odds import (
    CausalSystem,
    EvidenceItem,
    OddsState,
    bayes_factor,
    posterior_over_causes,
    sequential_update,
    update_odds,
)
from .partition import CasePartition

SEQUENTIAL_AGREEMENT_TOL = 1e-12


@dataclass(frozen=True)
class RunConfig:
    """One parsed invocation: the subcommand, its options, and the report target."""

    command: str
    options: dict[str, Any]
    out: Path | None


# ---------------------------------------------------------------------------
# Report serialization


def _format_float(x: float) -> str:
    if math.isnan(x):
        return "NaN"
    if math.isinf(x):
        return "Infinity" if x > 0 else "-Infinity"
    return format(x, ".16e")


def render_json(value, indent: int = 0) -> str:
    """Serialize a report with full-precision floats."""
    pad = "  " * indent
    inner = "  " * (indent + 1)
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, int):
        return str(value)
    if isinstance(value, float):
        return _format_float(value)
    if isinstance(value, str):
        return json.dumps(value)
    if value is None:
        return "null"
    if isinstance(value, dict):
        if not value:
            return "{}"
        rows = [f"{inner}{json.dumps(str(k))}: {render_json(v, indent + 1)}" for k, v in value.items()]
        return "{\n" + ",\n".join(rows) + f"\n{pad}}}"
    if isinstance(value, (list, tuple)):
        if not value:
            return "[]"
        rows = [f"{inner}{render_json(v, indent + 1)}" for v in value]
        return "[\n" + ",\n".join(rows) + f"\n{pad}]"
    raise ValidationError(f"cannot serialize {type(value).__name__} into a report")


def _emit(report: dict, out: Path | None) -> None:
    text = render_json(report) + "\n"
    if out is None:
        sys.stdout.write(text)
    else:
        with open(out, "w", encoding="utf-8") as handle:
            handle.write(text)


def _load_json(path: Path) -> dict:
    with open(path, encoding="utf-8") as handle:
        try:
            return json.load(handle)
        except json.JSONDecodeError as exc:
            raise ValidationError(f"{path}: not valid JSON ({exc})") from None


def _ratio_pair(value: Fraction | float) -> dict[str, int]:
    """Exact rational as a numerator/denominator pair; infinity is 1/0."""
    if isinstance(value, Fraction):
        return {"numerator": value.numerator, "denominator": value.denominator}
    if value == math.inf:
        return {"numerator": 1, "denominator": 0}
    raise ValidationError(f"not an exact ratio: {value!r}")


# ---------------------------------------------------------------------------
# Subcommands


def run_odds(config: RunConfig) -> int:
    system = CausalSystem.from_dict(_load_json(config.options["system"]))
    events = [e.strip() for e in str(config.options["events"]).split(",") if e.strip()]
    if not events:
        raise ValidationError("--events needs at least one event label")

    pair_text = str(config.options["pair"])
    try:
        i, j = (int(part) for part in pair_text.split(","))
    except ValueError:
        raise ValidationError(f"--pair must look like I,J with integer indices, got {pair_text!r}") from None
    for idx in (i, j):
        if not 0 <= idx < system.size:
            raise ValidationError(f"cause index {idx} out of range for {system.size} causes")

    p_i, p_j = system.priors[i], system.priors[j]
    if p_j == 0.0 and p_i == 0.0:
        raise IndeterminateOddsError("both chosen causes have zero prior probability")
    prior_odds = math.inf if p_j == 0.0 else p_i / p_j
    prior_state = OddsState(system.labels[i], system.labels[j], prior_odds)

    items = [
        EvidenceItem(event, system.event_likelihoods(event)[i], system.event_likelihoods(event)[j])
        for event in events
    ]
    posterior_state = sequential_update(prior_state, items)

    # Posterior over all causes, conditioning on the events one at a time.
    current = system
    for event in events:
        posterior = posterior_over_causes(current, event)
        current = CausalSystem(current.labels, posterior, current.events)

    report = {
        "causes": list(system.labels),
        "events": events,
        "pair": {"numerator": system.labels[i], "denominator": system.labels[j]},
        "prior_odds": prior_state.odds,
        "per_event_factors": [
            {"event": item.event_label, "bayes_factor": bayes_factor(item)} for item in items
        ],
        "posterior_odds": posterior_state.odds,
        "posterior": {label: p for label, p in zip(current.labels, current.priors)},
    }
    _emit(report, config.out)
    return 0


def run_partition(config: RunConfig) -> int:
    part = CasePartition.from_dict(_load_json(config.options["counts"]))
    outcome = part.verify_theorem()
    report = {
        "counts": part.to_dict(),
        "equal_priors": outcome.equal_priors,
        "posterior_ratio": _ratio_pair(outcome.posterior_ratio),
        "likelihood_ratio": _ratio_pair(outcome.likelihood_ratio),
        "prior_ratio": _ratio_pair(outcome.prior_ratio),
        "general_identity_residual": _ratio_pair(outcome.general_identity_residual),
    }
    _emit(report, config.out)
    return 0


def run_fit(config: RunConfig) -> int:
    expr, space = load_model(_load_json(config.options["model"]))
    obs = ObservationSet.from_csv(config.options["data"])

    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        grid = evaluate_posterior(expr, obs, space)
    for entry in caught:
        print(f"warning: {entry.message}", file=sys.stderr)

    summary = moments(grid)
    dump_path = config.options.get("dump_grid")
    if dump_path is not None:
        write_grid_csv(grid, dump_path)

    report = {
        "map_point": summary.map_point,
        "mean": summary.mean,
        "std": summary.std,
        "log_lambda": summary.log_lambda,
    }
    _emit(report, config.out)
    return 0


def _log_binomial_pmf(n: int, k: int, p: float) -> float:
    coefficient = math.lgamma(n + 1) - math.lgamma(k + 1) - math.lgamma(n - k + 1)
    return coefficient + k * math.log(p) + (n - k) * math.log(1.0 - p)


def sharper_report(
    deals: int, successes: int, p_fair: float, p_sharp: float, prior_odds: float = 1.0
) -> dict:
    """Compare single-shot and per-deal updating for the repeated-deal setup.

    The single-shot route treats the whole run (``successes`` wins out of
    ``deals``) as one evidence item whose probabilities come from the
    binomial law; the sequential route chains one item per deal.  The
    two posterior odds must agree to within
    :data:`SEQUENTIAL_AGREEMENT_TOL` relative, and the report carries
    both plus their observed discrepancy.
    """
    if isinstance(deals, bool) or not isinstance(deals, int) or deals < 1:
        raise ValidationError(f"deals must be a positive integer, got {deals!r}")
    if isinstance(successes, bool) or not isinstance(successes, int) or not 0 <= successes <= deals:
        raise ValidationError(f"successes must lie in [0, {deals}], got {successes!r}")
    for name, p in (("p_fair", p_fair), ("p_sharp", p_sharp)):
        p = float(p)
        if not (0.0 < p < 1.0):
            raise ValidationError(f"{name} must lie strictly inside (0, 1), got {p!r}")
    prior_odds = float(prior_odds)
    if math.isnan(prior_odds) or prior_odds < 0.0:
        raise ValidationError(f"prior odds must be non-negative, got {prior_odds!r}")

    prior_state = OddsState("sharper", "honest", prior_odds)

    whole_run = EvidenceItem(
        f"{successes} of {deals} deals won",
        math.exp(_log_binomial_pmf(deals, successes, p_sharp)),
        math.exp(_log_binomial_pmf(deals, successes, p_fair)),
    )
    single_state = update_odds(prior_state, whole_run)

    per_deal = [EvidenceItem("deal won", p_sharp, p_fair) for _ in range(successes)]
    per_deal += [
        EvidenceItem("deal lost", 1.0 - p_sharp, 1.0 - p_fair)
        for _ in range(deals - successes)
    ]
    sequential_state = sequential_update(prior_state, per_deal)

    scale = max(abs(single_state.odds), abs(sequential_state.odds))
    discrepancy = 0.0 if scale == 0.0 else abs(single_state.odds - sequential_state.odds) / scale
    if not discrepancy <= SEQUENTIAL_AGREEMENT_TOL:
        raise BayeskitError(
            f"single-shot and sequential posterior odds disagree by {discrepancy!r} relative"
        )

    odds = single_state.odds
    probability = 1.0 if math.isinf(odds) else odds / (1.0 + odds)
    return {
        "deals": deals,
        "successes": successes,
        "p_fair": float(p_fair),
        "p_sharp": float(p_sharp),
        "prior_odds": prior_odds,
        "bayes_factor": bayes_factor(whole_run),
        "posterior_odds": odds,
        "posterior_probability": probability,
        "sequential": {
            "per_deal_factors": [bayes_factor(item) for item in per_deal],
            "posterior_odds": sequential_state.odds,
        },
        "max_relative_difference": discrepancy,
    }


def run_sharper(config: RunConfig) -> int:
    report = sharper_report(
        config.options["deals"],
        config.options["successes"],
        config.options["p_fair"],
        config.options["p_sharp"],
        config.options["prior_odds"],
    )
    _emit(report, config.out)
    return 0


# ---------------------------------------------------------------------------
# Argument parsing


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="bayeskit",
        description="Posterior odds, exact counting checks, and grid posteriors.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    odds = sub.add_parser("odds", help="posterior odds and posteriors over discrete causes")
    odds.add_argument("--system", required=True, type=Path, help="causal system JSON document")
    odds.add_argument("--events", required=True, help="comma-separated event labels, applied in order")
    odds.add_argument("--pair", default="0,1", help="numerator,denominator cause indices (default 0,1)")
    odds.add_argument("--out", type=Path, help="write the JSON report here instead of stdout")

    partition = sub.add_parser("partition", help="exact ratio identity on a case partition")
    partition.add_argument("--counts", required=True, type=Path, help="partition counts JSON document")
    partition.add_argument("--out", type=Path, help="write the JSON report here instead of stdout")

    fit = sub.add_parser("fit", help="flat-prior grid posterior for a model formula")
    fit.add_argument("--model", required=True, type=Path, help="model JSON document (formula + parameters)")
    fit.add_argument("--data", required=True, type=Path, help="observations as delimited text")
    fit.add_argument("--dump-grid", type=Path, dest="dump_grid", help="also dump the full grid here as delimited text")
    fit.add_argument("--out", type=Path, help="write the JSON summary here instead of stdout")

    sharper = sub.add_parser("sharper", help="single-shot versus per-deal odds updating")
    sharper.add_argument("--deals", type=int, default=10, help="number of deals (default 10)")
    sharper.add_argument("--successes", type=int, default=6, help="number of won deals (default 6)")
    sharper.add_argument("--p-fair", type=float, required=True, dest="p_fair", help="win probability under honest play")
    sharper.add_argument("--p-sharp", type=float, required=True, dest="p_sharp", help="win probability under cheating")
    sharper.add_argument("--prior-odds", type=float, default=1.0, dest="prior_odds", help="prior odds of cheating (default 1)")
    sharper.add_argument("--out", type=Path, help="write the JSON report here instead of stdout")

    return parser


_RUNNERS = {
    "odds": run_odds,
    "partition": run_partition,
    "fit": run_fit,
    "sharper": run_sharper,
}


def config_from_namespace(args: argparse.Namespace) -> RunConfig:
    options = dict(vars(args))
    command = options.pop("command")
    out = options.pop("out", None)
    return RunConfig(command=command, options=options, out=out)


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    config = config_from_namespace(args)
    try:
        return _RUNNERS[config.command](config)
    except BayeskitError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
