"""Flat-prior posterior densities on rectangular parameter grids.

The parameter box is covered by midpoint-rule cells: an axis with
``points`` cells has nodes at ``lower + (i + 0.5) * step``, all strictly
inside the bounds, and ``points * step`` telescopes to the box width.
The posterior at a node is the joint data log-density there plus a
normalization constant ``log_lambda`` chosen so the Riemann sum of the
normalized density over the box equals one; a uniform prior over the box
cancels out of the ratio and is absorbed into that constant.

Everything is computed in a fixed order (records in sequence, nodes in
row-major order, reductions exactly rounded or left to numpy's
deterministic pairwise sums), so repeated runs give identical floats.
"""

from __future__ import annotations

import csv
import math
import os
import warnings
from dataclasses import dataclass
from typing import IO, Sequence

import numpy as np

from .exceptions import (
    DegeneratePosteriorError,
    EvaluationError,
    InvalidPredictionError,
    ValidationError,
)
from .expressions import (
    Binary,
    Call,
    GridAxis,
    ModelExpression,
    Name,
    Negate,
    Number,
    ParameterSpace,
    evaluate,
    predictions,
)
from .measurement import ObservationSet

_LOG_SQRT_TWO_PI = 0.5 * math.log(2.0 * math.pi)


class MapOnBoundaryWarning(UserWarning):
    """The posterior maximum sits on the edge of the grid; widen the bounds."""


def axis_nodes(axis: GridAxis) -> np.ndarray:
    """Cell-midpoint node positions along one axis."""
    return axis.lower + (np.arange(axis.points) + 0.5) * axis.step


@dataclass(frozen=True, eq=False)
class PosteriorGrid:
    """Normalized log posterior density tabulated over a parameter box.

    ``log_density`` holds the joint data log-density at each node (shape
    equals the space's per-axis point counts, first axis slowest);
    adding ``log_lambda`` normalizes it, in the sense that the Riemann
    sum of ``exp(log_density + log_lambda)`` times ``cell_volume`` is
    one.  Construction verifies this within 1e-9 and rejects grids whose
    density vanishes everywhere.
    """

    space: ParameterSpace
    log_density: np.ndarray
    log_lambda: float
    cell_volume: float

    def __post_init__(self):
        arr = np.array(self.log_density, dtype=float)
        if arr.shape != self.space.shape:
            raise ValidationError(
                f"log density has shape {arr.shape}, space expects {self.space.shape}"
            )
        if np.isnan(arr).any():
            raise ValidationError("log density contains NaN entries")
        arr.setflags(write=False)
        object.__setattr__(self, "log_density", arr)
        object.__setattr__(self, "log_lambda", float(self.log_lambda))
        cell_volume = float(self.cell_volume)
        if not (math.isfinite(cell_volume) and cell_volume > 0.0):
            raise ValidationError(f"cell volume must be finite and positive, got {cell_volume!r}")
        object.__setattr__(self, "cell_volume", cell_volume)

        # The Riemann sum of the normalized density must be one.
        total = math.exp(self.log_lambda + _log_riemann_sum(arr, cell_volume))
        if abs(total - 1.0) > 1e-9:
            raise ValidationError(
                f"normalized density sums to {total!r}, expected 1 within 1e-9"
            )

    @classmethod
    def from_log_density(cls, space: ParameterSpace, log_density) -> "PosteriorGrid":
        """Normalize a raw log-density table over the space's box."""
        arr = np.array(log_density, dtype=float)
        if np.isnan(arr).any():
            raise ValidationError("log density contains NaN entries")
        cell_volume = math.prod(axis.step for axis in space.axes)
        log_lambda = -_log_riemann_sum(arr, cell_volume)
        return cls(space, arr, log_lambda, cell_volume)

    def node_values(self, axis_name: str) -> np.ndarray:
        return axis_nodes(self.space.axis(axis_name))

    def node_params(self, multi_index: Sequence[int]) -> dict[str, float]:
        """Parameter values at one node, keyed by axis name."""
        return {
            axis.name: float(axis_nodes(axis)[i])
            for axis, i in zip(self.space.axes, multi_index)
        }

    def density(self) -> np.ndarray:
        """Normalized density values at the nodes."""
        return np.exp(self.log_density + self.log_lambda)

    def map_indices(self) -> tuple[int, ...]:
        """Multi-index of the highest-density node.

        Ties go to the smallest multi-index in lexicographic order,
        which is exactly the first maximum in row-major traversal.
        """
        flat = int(np.argmax(self.log_density.ravel(order="C")))
        return tuple(int(i) for i in np.unravel_index(flat, self.space.shape))

    def map_on_boundary(self) -> bool:
        return any(
            i == 0 or i == axis.points - 1
            for axis, i in zip(self.space.axes, self.map_indices())
        )


@dataclass(frozen=True)
class PosteriorSummary:
    """Point summaries of a posterior grid, keyed by axis name."""

    map_point: dict[str, float]
    mean: dict[str, float]
    std: dict[str, float]
    log_lambda: float


@dataclass(frozen=True, eq=False)
class MarginalDensity:
    """One-dimensional marginal density table along a single axis."""

    name: str
    values: np.ndarray
    density: np.ndarray
    step: float

    def integral(self) -> float:
        return float(np.sum(self.density) * self.step)

    def mean(self) -> float:
        return float(np.sum(self.values * self.density) * self.step) / self.integral()


@dataclass(frozen=True)
class WeightedMeanResult:
    """Inverse-variance weighted combination of measurements."""

    mean: float
    sigma: float


def _log_riemann_sum(log_density: np.ndarray, cell_volume: float) -> float:
    """Log of the Riemann sum of exp(log_density) over the grid.

    Max-shifted so the largest term is one; the shifted terms are added
    with an exactly rounded sum, making the result independent of node
    order.  An all--infinite table cannot be normalized.
    """
    peak = float(np.max(log_density))
    if peak == -math.inf:
        raise DegeneratePosteriorError("log density is -inf at every node")
    shifted = math.fsum(np.exp(log_density - peak).ravel(order="C"))
    return peak + math.log(shifted) + math.log(cell_volume)


def normalization_lambda(grid: PosteriorGrid) -> float:
    """Recompute ``log_lambda`` from the grid's own table.

    Pure and idempotent: applying it to an already normalized grid
    returns the stored constant.
    """
    return -_log_riemann_sum(grid.log_density, grid.cell_volume)


def _check_fit_names(expr: ModelExpression, obs: ObservationSet, space: ParameterSpace) -> None:
    free = expr.names()
    axis_names = set(space.names)
    covariates = set(obs.covariate_names)
    clash = axis_names & covariates
    if clash:
        raise ValidationError(f"names bound as both parameter and covariate: {sorted(clash)}")
    missing_params = axis_names - free
    if missing_params:
        raise ValidationError(f"parameters never used by the formula: {sorted(missing_params)}")
    unbound = free - axis_names - covariates
    if unbound:
        raise ValidationError(f"formula names with no binding: {sorted(unbound)}")


def _eval_array(node, env: dict):
    """Evaluate a formula tree over broadcastable numpy operands.

    No domain checks here: invalid nodes surface as non-finite entries
    and are diagnosed afterwards by re-evaluating the offending node in
    scalar mode, which produces the precise error.
    """
    if isinstance(node, Number):
        return node.value
    if isinstance(node, Name):
        return env[node.identifier]
    if isinstance(node, Negate):
        return -_eval_array(node.operand, env)
    if isinstance(node, Call):
        arg = _eval_array(node.argument, env)
        if node.function == "sin":
            return np.sin(arg)
        if node.function == "cos":
            return np.cos(arg)
        if node.function == "exp":
            return np.exp(arg)
        return np.log(arg)
    if isinstance(node, Binary):
        left = _eval_array(node.left, env)
        right = _eval_array(node.right, env)
        if node.op == "+":
            return left + right
        if node.op == "-":
            return left - right
        if node.op == "*":
            return left * right
        if node.op == "/":
            return np.divide(left, right)
        return np.power(left, right)
    raise ValidationError(f"not a formula node: {node!r}")


def _diagnose_bad_node(
    expr: ModelExpression,
    record_index: int,
    record,
    grid_shape: tuple[int, ...],
    space: ParameterSpace,
    bad: np.ndarray,
) -> None:
    """Raise the precise error for the first non-finite prediction."""
    flat = int(np.argmax(bad.ravel(order="C")))
    multi = tuple(int(i) for i in np.unravel_index(flat, grid_shape))
    params = {
        axis.name: float(axis_nodes(axis)[i]) for axis, i in zip(space.axes, multi)
    }
    try:
        value = evaluate(expr, params, record.covariates)
    except EvaluationError as exc:
        raise type(exc)(
            f"record {record_index}, node {multi} ({params}): {exc.args[0]}",
            exc.subexpression,
        ) from None
    raise InvalidPredictionError(
        f"record {record_index}, node {multi} ({params}): prediction is {value!r}",
        index=record_index,
    )


def _scaled_residual_grid(
    expr: ModelExpression, obs: ObservationSet, space: ParameterSpace
) -> np.ndarray:
    """Sum over records of ((value - prediction) / sigma)^2 at every node."""
    _check_fit_names(expr, obs, space)
    shape = space.shape
    meshes = np.meshgrid(*[axis_nodes(axis) for axis in space.axes], indexing="ij", sparse=True)
    param_env = dict(zip(space.names, meshes))

    total = np.zeros(shape)
    for k, record in enumerate(obs.records):
        env = dict(param_env)
        env.update(record.covariates)
        with np.errstate(all="ignore"):
            pred = np.broadcast_to(np.asarray(_eval_array(expr.root, env), dtype=float), shape)
            bad = ~np.isfinite(pred)
            if bad.any():
                _diagnose_bad_node(expr, k, record, shape, space, bad)
            scaled = (record.value - pred) / record.error.sigma
            total = total + scaled * scaled
    return total


def evaluate_posterior(
    expr: ModelExpression, obs: ObservationSet, space: ParameterSpace
) -> PosteriorGrid:
    """Tabulate the flat-prior posterior of the parameters over the box.

    At each node the log density is the joint log-density of the
    observations given the formula's predictions there; normalization
    happens via :class:`PosteriorGrid`.  Warns with
    :class:`MapOnBoundaryWarning` when the maximum lands on the grid
    edge, which usually means the box clips the posterior mass.
    """
    residual = _scaled_residual_grid(expr, obs, space)
    constant = math.fsum(
        -math.log(rec.error.sigma) - _LOG_SQRT_TWO_PI for rec in obs.records
    )
    grid = PosteriorGrid.from_log_density(space, constant - 0.5 * residual)
    if grid.map_on_boundary():
        warnings.warn(
            MapOnBoundaryWarning(
                "posterior maximum lies on the grid boundary; widen the parameter bounds"
            ),
            stacklevel=2,
        )
    return grid


def map_estimate(grid: PosteriorGrid) -> dict[str, float]:
    """Highest-density node, ties broken toward the smallest multi-index."""
    return grid.node_params(grid.map_indices())


def marginal(grid: PosteriorGrid, axis_name: str) -> MarginalDensity:
    """Marginal density along one axis.

    Sums the normalized joint density over all other axes, weighted by
    their cell lengths, leaving a table that integrates to one along the
    chosen axis.
    """
    names = grid.space.names
    if axis_name not in names:
        raise ValidationError(f"unknown axis {axis_name!r}")
    k = names.index(axis_name)
    axis = grid.space.axes[k]
    other = tuple(i for i in range(grid.space.dimension) if i != k)
    other_volume = math.prod(a.step for i, a in enumerate(grid.space.axes) if i != k)
    density = grid.density().sum(axis=other) * other_volume
    return MarginalDensity(axis_name, axis_nodes(axis), density, axis.step)


def moments(grid: PosteriorGrid) -> PosteriorSummary:
    """Per-axis posterior mean and standard deviation, plus the MAP point.

    Node weights are the normalized density times the cell volume,
    renormalized by their own discrete sum so the moments are exact for
    the tabulated distribution.
    """
    weights = grid.density() * grid.cell_volume
    total = float(weights.sum())
    mean: dict[str, float] = {}
    std: dict[str, float] = {}
    for k, axis in enumerate(grid.space.axes):
        shape = [1] * grid.space.dimension
        shape[k] = axis.points
        xs = axis_nodes(axis).reshape(shape)
        mu = float((weights * xs).sum()) / total
        var = float((weights * (xs - mu) ** 2).sum()) / total
        mean[axis.name] = mu
        std[axis.name] = math.sqrt(var)
    return PosteriorSummary(
        map_point=map_estimate(grid), mean=mean, std=std, log_lambda=grid.log_lambda
    )


def weighted_mean(values: Sequence[float], sigmas: Sequence[float]) -> WeightedMeanResult:
    """Inverse-variance weighted mean of independent measurements.

    The combined value weights each measurement by 1/sigma^2; the
    combined sigma is the square root of the reciprocal total weight.
    """
    values = [float(v) for v in values]
    sigmas = [float(s) for s in sigmas]
    if not values:
        raise ValidationError("need at least one measurement")
    if len(values) != len(sigmas):
        raise ValidationError(f"got {len(values)} values but {len(sigmas)} sigmas")
    for k, (v, s) in enumerate(zip(values, sigmas)):
        if not math.isfinite(v):
            raise ValidationError(f"value {k} must be finite, got {v!r}")
        if not (math.isfinite(s) and s > 0.0):
            raise ValidationError(f"sigma {k} must be finite and positive, got {s!r}")
    inv_var = [1.0 / (s * s) for s in sigmas]
    total_weight = math.fsum(inv_var)
    mean = math.fsum(v * w for v, w in zip(values, inv_var)) / total_weight
    return WeightedMeanResult(mean=mean, sigma=1.0 / math.sqrt(total_weight))


def chi_squared(expr: ModelExpression, obs: ObservationSet, params: dict[str, float]) -> float:
    """Sum of squared scaled residuals at one parameter point.

    Computed through the scalar formula evaluator; minimizing this over
    the grid nodes selects the same node as :func:`map_estimate`, since
    the log density is an affine function of it with negative slope.
    """
    preds = predictions(expr, params, obs)
    return math.fsum(
        ((rec.value - pred) / rec.error.sigma) ** 2
        for rec, pred in zip(obs.records, preds)
    )


def chi_squared_grid(
    expr: ModelExpression, obs: ObservationSet, space: ParameterSpace
) -> np.ndarray:
    """Squared scaled residual sum tabulated at every grid node."""
    return _scaled_residual_grid(expr, obs, space)


def write_grid_csv(grid: PosteriorGrid, destination: str | os.PathLike | IO[str]) -> None:
    """Dump the grid as delimited text, one row per node in row-major order.

    Columns are the parameter values, then ``log_density``, then the
    normalized ``density``.
    """
    if hasattr(destination, "write"):
        _write_grid_rows(grid, destination)
        return
    with open(destination, "w", newline="", encoding="utf-8") as handle:
        _write_grid_rows(grid, handle)


def _write_grid_rows(grid: PosteriorGrid, handle: IO[str]) -> None:
    writer = csv.writer(handle)
    writer.writerow(list(grid.space.names) + ["log_density", "density"])
    coords = np.meshgrid(*[axis_nodes(axis) for axis in grid.space.axes], indexing="ij")
    columns = [c.ravel(order="C") for c in coords]
    log_flat = grid.log_density.ravel(order="C")
    density_flat = grid.density().ravel(order="C")
    for k in range(log_flat.size):
        row = [repr(float(col[k])) for col in columns]
        row.append(repr(float(log_flat[k])))
        row.append(repr(float(density_flat[k])))
        writer.writerow(row)
