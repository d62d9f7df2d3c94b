"""Threshold sweeps, accuracy-cost curves, AUC, and cost-matching metrics.

A sweep evaluates the full Cartesian product of per-stage threshold grids and
records one (mean cost, accuracy) point per element. The Pareto frontier of
those points is the operative accuracy-cost curve; its AUC is normalized by
the cost range so it reads as mean accuracy across achievable costs, in
accuracy units. Matched-cost compares the curve against each standalone
model: the smallest (interpolated) cascade cost that reaches the model's
accuracy, and the relative computation saved.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .cascade import Mode, PreparedCascade
from .confidence import Policy, policy_range
from .errors import (
    ConfigurationError,
    EmptyBundleError,
    EmptyCurveError,
    GridTooLargeError,
    RoutingArityError,
)
from .records import EvaluationBundle, instance_cost

DEFAULT_GRID_CAP = 1_000_000


@dataclass(frozen=True)
class CurvePoint:
    """One operating point: thresholds, resulting mean cost and accuracy."""

    mean_cost: float
    accuracy: float  # percent
    thresholds: tuple[float, ...]
    skip_thresholds: tuple[float, ...] | None = None


@dataclass(frozen=True)
class MatchedCost:
    """Cascade cost at the accuracy of one standalone model."""

    model_id: str
    standalone_accuracy: float
    standalone_cost: float
    cascade_cost: float | None  # None when the curve never reaches the accuracy
    improvement_percent: float | None

    @property
    def reached(self) -> bool:
        return self.cascade_cost is not None


@dataclass(frozen=True)
class StandaloneStat:
    model_id: str
    accuracy: float  # percent
    mean_cost: float


@dataclass(frozen=True)
class CurveSummary:
    """Pareto frontier plus the derived comparison metrics."""

    points: tuple[CurvePoint, ...]  # cost-sorted frontier
    auc: float
    max_accuracy: float
    matched: tuple[MatchedCost, ...]
    standalone: tuple[StandaloneStat, ...]


def threshold_grid(
    bundle: EvaluationBundle,
    policy: Policy,
    points_per_stage: int,
    *,
    model_order: Sequence[str] | None = None,
    seed: int = 0,
    heuristic_invert: bool = False,
) -> list[list[float]]:
    """Per-stage threshold values: confidence quantiles plus the policy endpoints.

    Stage j's grid holds the policy minimum, the policy maximum, and
    ``points_per_stage - 2`` interior quantiles of stage j's confidence values
    over the whole bundle, deduplicated and sorted. Quantiles are taken at
    actual sample values so every interior threshold is achievable.
    """
    if points_per_stage < 2:
        raise ConfigurationError(
            f"points_per_stage must be >= 2, got {points_per_stage}"
        )
    if not bundle.instances:
        raise EmptyBundleError("cannot build a grid for an empty bundle")
    order = tuple(model_order) if model_order is not None else bundle.model_ids
    prep = PreparedCascade(
        bundle, order, policy, seed=seed, heuristic_invert=heuristic_invert
    )
    low, high = policy_range(policy, bundle.label_count)
    grids: list[list[float]] = []
    for j in range(len(order) - 1):
        values = np.sort(prep.conf[j])
        interior = [
            float(np.quantile(values, i / (points_per_stage - 1), method="lower"))
            for i in range(1, points_per_stage - 1)
        ]
        grids.append(sorted({low, high, *interior}))
    return grids


def _grid_size(per_stage_counts: Sequence[int]) -> int:
    size = 1
    for c in per_stage_counts:
        size *= c
    return size


def sweep(
    bundle: EvaluationBundle,
    policy: Policy,
    mode: Mode,
    grid: Sequence[Sequence[float]],
    *,
    model_order: Sequence[str] | None = None,
    seed: int = 0,
    heuristic_invert: bool = False,
    cap: int = DEFAULT_GRID_CAP,
) -> list[CurvePoint]:
    """Evaluate every element of the per-stage grid product.

    Sequential mode takes one threshold per stage from the grid. Routing mode
    expands each stage's grid into (skip, output) pairs with skip <= output
    before taking the product. Raises GridTooLargeError when the product
    exceeds ``cap``.
    """
    order = tuple(model_order) if model_order is not None else bundle.model_ids
    if len(grid) != len(order) - 1:
        raise ConfigurationError(
            f"grid has {len(grid)} stages for {len(order)} models"
        )
    prep = PreparedCascade(
        bundle, order, policy, seed=seed, heuristic_invert=heuristic_invert
    )
    points: list[CurvePoint] = []
    if mode is Mode.SEQUENTIAL:
        size = _grid_size([len(g) for g in grid])
        if size > cap:
            raise GridTooLargeError(size, cap)
        for element in itertools.product(*grid):
            mean_cost, accuracy = prep.summary_sequential(element)
            points.append(CurvePoint(mean_cost, accuracy, tuple(element)))
    else:
        if len(order) < 3:
            raise RoutingArityError(
                f"routing sweeps require K >= 3, got K={len(order)}"
            )
        stage_bands = [
            [(s, t) for t in g for s in g if s <= t] for g in grid
        ]
        size = _grid_size([len(b) for b in stage_bands])
        if size > cap:
            raise GridTooLargeError(size, cap)
        for element in itertools.product(*stage_bands):
            skips = tuple(s for s, _ in element)
            thresholds = tuple(t for _, t in element)
            mean_cost, accuracy = prep.summary_routing(thresholds, skips)
            points.append(CurvePoint(mean_cost, accuracy, thresholds, skips))
    return points


def pareto_frontier(points: Sequence[CurvePoint]) -> list[CurvePoint]:
    """Cost-sorted subset where each point beats every cheaper point on accuracy.

    Equal-cost points collapse to the most accurate one; dominated points are
    dropped, so the result is strictly increasing in both cost and accuracy.
    """
    if not points:
        raise EmptyCurveError("no points to take a frontier of")

    def sort_key(p: CurvePoint):
        skips = p.skip_thresholds if p.skip_thresholds is not None else ()
        return (p.mean_cost, -p.accuracy, p.thresholds, skips)

    frontier: list[CurvePoint] = []
    best = -math.inf
    for p in sorted(points, key=sort_key):
        if p.accuracy > best:
            frontier.append(p)
            best = p.accuracy
    return frontier


def auc(points: Sequence[CurvePoint]) -> float:
    """Mean accuracy across the curve's cost range, in percent.

    Trapezoidal integral of accuracy over cost divided by (max cost - min
    cost). A single point yields its own accuracy.
    """
    if not points:
        raise EmptyCurveError("cannot integrate an empty curve")
    pts = sorted(points, key=lambda p: p.mean_cost)
    if len(pts) == 1:
        return pts[0].accuracy
    span = pts[-1].mean_cost - pts[0].mean_cost
    if span == 0.0:
        return max(p.accuracy for p in pts)
    area = math.fsum(
        (a.accuracy + b.accuracy) / 2.0 * (b.mean_cost - a.mean_cost)
        for a, b in zip(pts, pts[1:])
    )
    return area / span


def matched_cost(
    points: Sequence[CurvePoint],
    standalone_accuracy: float,
    standalone_cost: float,
) -> tuple[float, float] | None:
    """Smallest curve cost whose interpolated accuracy reaches the target.

    Returns (cascade_cost, improvement_percent) where improvement is
    100 * (1 - cascade_cost / standalone_cost), or None when even the curve's
    maximum accuracy falls short of the target.
    """
    if not points:
        raise EmptyCurveError("cannot match against an empty curve")
    pts = sorted(points, key=lambda p: (p.mean_cost, p.accuracy))
    if standalone_accuracy <= pts[0].accuracy:
        cost = pts[0].mean_cost
    else:
        cost = None
        for a, b in zip(pts, pts[1:]):
            if b.accuracy >= standalone_accuracy:
                # a.accuracy < target <= b.accuracy on the frontier
                frac = (standalone_accuracy - a.accuracy) / (b.accuracy - a.accuracy)
                cost = a.mean_cost + frac * (b.mean_cost - a.mean_cost)
                break
        if cost is None:
            return None
    improvement = 100.0 * (1.0 - cost / standalone_cost)
    return cost, improvement


def max_accuracy_gain(
    points: Sequence[CurvePoint], largest_model_accuracy: float
) -> float:
    """Maximum curve accuracy minus the largest standalone model's accuracy."""
    if not points:
        raise EmptyCurveError("cannot compare against an empty curve")
    return max(p.accuracy for p in points) - largest_model_accuracy


def standalone_stats(
    bundle: EvaluationBundle, model_order: Sequence[str] | None = None
) -> list[StandaloneStat]:
    """Accuracy (percent) and mean per-instance cost of each model alone."""
    order = tuple(model_order) if model_order is not None else bundle.model_ids
    n = len(bundle.instances)
    stats = []
    for model_id in order:
        profile = bundle.profile(model_id)
        table = bundle.predictions[model_id]
        n_correct = sum(
            1
            for inst in bundle.instances
            if table[inst.instance_id].predicted_label == inst.gold_label
        )
        mean_cost = (
            math.fsum(
                instance_cost(profile, bundle.effective_length(inst))
                for inst in bundle.instances
            )
            / n
        )
        stats.append(StandaloneStat(model_id, 100.0 * n_correct / n, mean_cost))
    return stats


def summarize(
    points: Sequence[CurvePoint],
    bundle: EvaluationBundle,
    model_order: Sequence[str] | None = None,
) -> CurveSummary:
    """Frontier, AUC, and per-model matched-cost entries for a sweep result."""
    frontier = pareto_frontier(points)
    stats = standalone_stats(bundle, model_order)
    matched = []
    for stat in stats:
        hit = matched_cost(frontier, stat.accuracy, stat.mean_cost)
        if hit is None:
            matched.append(
                MatchedCost(stat.model_id, stat.accuracy, stat.mean_cost, None, None)
            )
        else:
            cost, improvement = hit
            matched.append(
                MatchedCost(
                    stat.model_id, stat.accuracy, stat.mean_cost, cost, improvement
                )
            )
    return CurveSummary(
        points=tuple(frontier),
        auc=auc(frontier),
        max_accuracy=max(p.accuracy for p in frontier),
        matched=tuple(matched),
        standalone=tuple(stats),
    )
