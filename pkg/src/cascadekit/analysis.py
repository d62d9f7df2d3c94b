"""Per-model contribution analysis and budgeted threshold tuning.

Contribution reports partition instances by the model that answered them and
measure every model's accuracy on the partitions it was involved in: its own
answered set, the set it escalated, and (for later models) how much better it
did than its predecessor on the instances it took over. All per-subset
accuracies come from the precomputed prediction tables, so they exist even
for partitions a model did not answer.

Tuning picks, from a sweep grid, the threshold vector with the best
validation accuracy among those whose validation cost fits the budget, then
reports the same thresholds evaluated on the test bundle.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from .cascade import CascadeConfig, CascadeOutcome, Mode, run
from .confidence import Policy
from .errors import CountMismatchError, InfeasibleBudgetError
from .records import EvaluationBundle
from .sweep import CurvePoint, CurveSummary, sweep


@dataclass(frozen=True)
class ModelContribution:
    """One model's share of the cascade's work and its subset accuracies.

    Accuracies are percentages; ``None`` marks an empty subset. Drop and gain
    follow the answered/escalated split: ``escalation_drop`` is this model's
    accuracy on what it answered minus its accuracy on what it passed along;
    ``takeover_gain`` is this model's accuracy on its answered set minus the
    immediately preceding model's accuracy on that same set.
    """

    model_id: str
    answered_count: int
    answered_fraction: float  # percent of all instances
    correct_count: int
    accuracy_on_answered: float | None
    escalated_count: int
    accuracy_on_escalated: float | None
    escalation_drop: float | None
    previous_model_accuracy: float | None
    takeover_gain: float | None


@dataclass(frozen=True)
class ContributionReport:
    per_model: tuple[ModelContribution, ...]
    overall_accuracy: float  # percent
    total: int


@dataclass(frozen=True)
class TunedOperatingPoint:
    thresholds: tuple[float, ...]
    skip_thresholds: tuple[float, ...] | None
    validation_cost: float
    validation_accuracy: float
    test_cost: float
    test_accuracy: float


def contribution(
    outcomes: Sequence[CascadeOutcome],
    bundle: EvaluationBundle,
    model_order: Sequence[str] | None = None,
) -> ContributionReport:
    """Decompose a run by answering model."""
    n = len(bundle.instances)
    if len(outcomes) != n:
        raise CountMismatchError(f"{len(outcomes)} outcomes for {n} instances")
    by_id = {o.instance_id: o for o in outcomes}
    if set(by_id) != {inst.instance_id for inst in bundle.instances}:
        raise CountMismatchError("outcome instance ids do not match the bundle")

    order = tuple(model_order) if model_order is not None else bundle.model_ids
    gold = {inst.instance_id: inst.gold_label for inst in bundle.instances}

    def model_correct(model_id: str, ids: Sequence[str]) -> int:
        table = bundle.predictions[model_id]
        return sum(1 for i in ids if table[i].predicted_label == gold[i])

    def acc(correct: int, count: int) -> float | None:
        return 100.0 * correct / count if count else None

    answered: dict[str, list[str]] = {m: [] for m in order}
    escalated: dict[str, list[str]] = {m: [] for m in order}
    for o in outcomes:
        answered[o.answered_by].append(o.instance_id)
        for m in o.used:
            if m != o.answered_by:
                escalated[m].append(o.instance_id)

    per_model = []
    overall_correct = 0
    for j, model_id in enumerate(order):
        ans_ids = answered[model_id]
        esc_ids = escalated[model_id]
        correct_ans = model_correct(model_id, ans_ids)
        overall_correct += correct_ans
        acc_ans = acc(correct_ans, len(ans_ids))
        acc_esc = acc(model_correct(model_id, esc_ids), len(esc_ids))
        drop = (
            acc_ans - acc_esc
            if j < len(order) - 1 and acc_ans is not None and acc_esc is not None
            else None
        )
        prev_acc = (
            acc(model_correct(order[j - 1], ans_ids), len(ans_ids)) if j > 0 else None
        )
        gain = (
            acc_ans - prev_acc
            if acc_ans is not None and prev_acc is not None
            else None
        )
        per_model.append(
            ModelContribution(
                model_id=model_id,
                answered_count=len(ans_ids),
                answered_fraction=100.0 * len(ans_ids) / n,
                correct_count=correct_ans,
                accuracy_on_answered=acc_ans,
                escalated_count=len(esc_ids),
                accuracy_on_escalated=acc_esc,
                escalation_drop=drop,
                previous_model_accuracy=prev_acc,
                takeover_gain=gain,
            )
        )

    return ContributionReport(
        per_model=tuple(per_model),
        overall_accuracy=100.0 * overall_correct / n,
        total=n,
    )


def tune(
    validation_bundle: EvaluationBundle,
    test_bundle: EvaluationBundle,
    policy: Policy,
    mode: Mode,
    budget: float,
    grid: Sequence[Sequence[float]],
    *,
    model_order: Sequence[str] | None = None,
    seed: int = 0,
    heuristic_invert: bool = False,
    cap: int | None = None,
) -> TunedOperatingPoint:
    """Pick the best budget-feasible grid element on validation data.

    Selection maximizes validation accuracy among elements with validation
    mean cost <= budget; ties prefer lower cost, then lexicographically
    smaller thresholds. The winner is then evaluated on the test bundle.
    """
    kwargs = dict(
        model_order=model_order, seed=seed, heuristic_invert=heuristic_invert
    )
    if cap is not None:
        kwargs["cap"] = cap
    points = sweep(validation_bundle, policy, mode, grid, **kwargs)
    feasible = [p for p in points if p.mean_cost <= budget]
    if not feasible:
        cheapest = min(p.mean_cost for p in points)
        raise InfeasibleBudgetError(
            f"budget {budget!r} is below the cheapest operating point {cheapest!r}"
        )

    def rank(p: CurvePoint):
        skips = p.skip_thresholds if p.skip_thresholds is not None else ()
        return (-p.accuracy, p.mean_cost, p.thresholds, skips)

    best = min(feasible, key=rank)
    order = tuple(model_order) if model_order is not None else test_bundle.model_ids
    config = CascadeConfig(
        model_order=order,
        policy=policy,
        thresholds=best.thresholds,
        mode=mode,
        skip_thresholds=best.skip_thresholds,
        seed=seed,
        heuristic_invert=heuristic_invert,
    )
    test_summary = run(test_bundle, config)
    return TunedOperatingPoint(
        thresholds=best.thresholds,
        skip_thresholds=best.skip_thresholds,
        validation_cost=best.mean_cost,
        validation_accuracy=best.accuracy,
        test_cost=test_summary.mean_cost,
        test_accuracy=test_summary.accuracy,
    )


@dataclass(frozen=True)
class ImprovementReport:
    """Computation saved at each model's accuracy plus the accuracy headroom."""

    rows: tuple  # MatchedCost entries, cascade order
    largest_model_id: str
    largest_model_accuracy: float
    max_accuracy: float
    max_accuracy_gain: float


def improvement_report(summary: CurveSummary) -> ImprovementReport:
    """Efficiency and accuracy improvements of a curve over its standalone models."""
    largest = summary.standalone[-1]
    return ImprovementReport(
        rows=summary.matched,
        largest_model_id=largest.model_id,
        largest_model_accuracy=largest.accuracy,
        max_accuracy=summary.max_accuracy,
        max_accuracy_gain=summary.max_accuracy - largest.accuracy,
    )
