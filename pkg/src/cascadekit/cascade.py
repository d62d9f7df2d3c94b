"""Cascade execution engine with exact per-instance cost accounting.

An instance walks the configured model order. At every non-final stage the
stage model's confidence is compared against that stage's threshold:
``confidence >= threshold`` outputs the prediction, anything lower escalates.
The final model always outputs. Cost is the sum of per-instance inference
costs of every model actually run; the threshold comparisons themselves are
free.

Routing mode adds a per-stage skip threshold below which the instance jumps
straight to the final model, bypassing the intermediate ones (whose cost is
then never charged).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import Sequence

import numpy as np

from .confidence import Policy, policy_range, stage_confidence
from .errors import (
    BandViolationError,
    ConfigurationError,
    CountMismatchError,
    RoutingArityError,
    ThresholdOutOfRangeError,
    UnknownModelError,
)
from .records import EvaluationBundle, instance_cost


class Mode(str, Enum):
    SEQUENTIAL = "sequential"
    ROUTING = "routing"


@dataclass(frozen=True)
class CascadeConfig:
    """One concrete cascade: model order, policy, and per-stage thresholds.

    ``thresholds`` has one entry per non-final stage. Values at or above the
    policy maximum force escalation of every instance at that stage; values
    below the policy minimum are rejected. ``skip_thresholds`` (routing only)
    must satisfy skip <= output threshold per stage.
    """

    model_order: tuple[str, ...]
    policy: Policy
    thresholds: tuple[float, ...]
    mode: Mode = Mode.SEQUENTIAL
    skip_thresholds: tuple[float, ...] | None = None
    seed: int = 0
    heuristic_invert: bool = False


@dataclass(frozen=True)
class CascadeOutcome:
    """Per-instance result: which models ran, who answered, at what cost."""

    instance_id: str
    used: tuple[str, ...]
    answered_by: str
    predicted_label: int
    correct: bool
    cost: float


@dataclass(frozen=True)
class RunSummary:
    mean_cost: float
    accuracy: float  # percent
    outcomes: tuple[CascadeOutcome, ...]


def _check_config(bundle: EvaluationBundle, config: CascadeConfig) -> None:
    if not config.model_order:
        raise ConfigurationError("model_order is empty")
    known = set(bundle.model_ids)
    for model_id in config.model_order:
        if model_id not in known:
            raise UnknownModelError(model_id)
    if len(set(config.model_order)) != len(config.model_order):
        raise ConfigurationError(f"duplicate model in order {config.model_order}")
    indices = [bundle.profile(m).order_index for m in config.model_order]
    if indices != sorted(indices):
        raise ConfigurationError(
            f"model_order {config.model_order} is not in increasing cost order"
        )

    k = len(config.model_order)
    if len(config.thresholds) != k - 1:
        raise ConfigurationError(
            f"expected {k - 1} thresholds for {k} models, got "
            f"{len(config.thresholds)}"
        )
    low, _ = policy_range(config.policy, bundle.label_count)
    for t in config.thresholds:
        if not math.isfinite(t) or t < low:
            raise ThresholdOutOfRangeError(
                f"threshold {t!r} below policy minimum {low!r}"
            )

    if config.mode is Mode.ROUTING:
        if k < 3:
            raise RoutingArityError(f"routing requires K >= 3, got K={k}")
        skips = config.skip_thresholds
        if skips is None or len(skips) != k - 1:
            raise ConfigurationError(
                f"routing requires {k - 1} skip thresholds, got "
                f"{None if skips is None else len(skips)}"
            )
        for s, t in zip(skips, config.thresholds):
            if not math.isfinite(s) or s < low:
                raise ThresholdOutOfRangeError(
                    f"skip threshold {s!r} below policy minimum {low!r}"
                )
            if s > t:
                raise BandViolationError(
                    f"skip threshold {s!r} exceeds output threshold {t!r}"
                )
    elif config.skip_thresholds is not None:
        raise ConfigurationError("skip thresholds only apply to routing mode")


class PreparedCascade:
    """Confidence, correctness, and cost matrices for one (bundle, policy).

    Prepares everything that does not depend on threshold values, so sweeps
    can evaluate many threshold vectors against the same matrices. Rows are
    cascade stages (cheapest model first), columns are bundle instances in
    bundle order.
    """

    def __init__(
        self,
        bundle: EvaluationBundle,
        model_order: Sequence[str],
        policy: Policy,
        seed: int = 0,
        heuristic_invert: bool = False,
    ):
        self.bundle = bundle
        self.model_order = tuple(model_order)
        self.policy = policy
        self.seed = seed
        self.heuristic_invert = heuristic_invert

        instances = bundle.instances
        n = len(instances)
        k = len(self.model_order)
        max_len = bundle.max_input_length

        conf = np.empty((k, n), dtype=np.float64)
        cost = np.empty((k, n), dtype=np.float64)
        correct = np.empty((k, n), dtype=bool)
        preds = np.empty((k, n), dtype=np.int64)
        for j, model_id in enumerate(self.model_order):
            profile = bundle.profile(model_id)
            table = bundle.predictions[model_id]
            cost_by_len: dict[int, float] = {}
            for i, inst in enumerate(instances):
                rec = table[inst.instance_id]
                conf[j, i] = stage_confidence(
                    policy,
                    rec,
                    inst,
                    stage=j + 1,
                    seed=seed,
                    max_length=max_len,
                    heuristic_invert=heuristic_invert,
                )
                length = bundle.effective_length(inst)
                c = cost_by_len.get(length)
                if c is None:
                    c = instance_cost(profile, length)
                    cost_by_len[length] = c
                cost[j, i] = c
                preds[j, i] = rec.predicted_label
                correct[j, i] = rec.predicted_label == inst.gold_label

        self.n = n
        self.k = k
        self.conf = conf
        self.cost = cost
        # Running cost of the sequential prefix; cumsum accumulates left to
        # right, matching a plain per-instance sum over the used models.
        self.cumcost = np.cumsum(cost, axis=0)
        self.correct = correct
        self.preds = preds

    # --- threshold-dependent evaluation ---------------------------------

    def sequential_stages(self, thresholds: Sequence[float]) -> np.ndarray:
        """0-based answering stage per instance under sequential escalation."""
        stage = np.full(self.n, self.k - 1, dtype=np.int64)
        undecided = np.ones(self.n, dtype=bool)
        for j, t in enumerate(thresholds):
            fire = undecided & (self.conf[j] >= t)
            stage[fire] = j
            undecided &= ~fire
        return stage

    def routing_stages(
        self, thresholds: Sequence[float], skips: Sequence[float]
    ) -> tuple[np.ndarray, np.ndarray]:
        """(last sequential stage, jumped-to-final flag) per instance."""
        final = self.k - 1
        last_seq = np.full(self.n, final, dtype=np.int64)
        jumped = np.zeros(self.n, dtype=bool)
        undecided = np.ones(self.n, dtype=bool)
        for j, (t, s) in enumerate(zip(thresholds, skips)):
            c = self.conf[j]
            out = undecided & (c >= t)
            skip = undecided & ~out & (c < s)
            last_seq[out] = j
            last_seq[skip] = j
            jumped |= skip
            undecided &= ~(out | skip)
        return last_seq, jumped

    def _instance_costs(
        self, last_seq: np.ndarray, jumped: np.ndarray | None = None
    ) -> np.ndarray:
        idx = np.arange(self.n)
        costs = self.cumcost[last_seq, idx]
        if jumped is not None and jumped.any():
            costs = np.where(jumped, costs + self.cost[self.k - 1], costs)
        return costs

    def _summary_stats(
        self,
        answer_stage: np.ndarray,
        last_seq: np.ndarray,
        jumped: np.ndarray | None,
    ) -> tuple[float, float]:
        idx = np.arange(self.n)
        n_correct = int(self.correct[answer_stage, idx].sum())
        costs = self._instance_costs(last_seq, jumped)
        mean_cost = math.fsum(costs.tolist()) / self.n
        accuracy = 100.0 * n_correct / self.n
        return mean_cost, accuracy

    def summary_sequential(self, thresholds: Sequence[float]) -> tuple[float, float]:
        stage = self.sequential_stages(thresholds)
        return self._summary_stats(stage, stage, None)

    def summary_routing(
        self, thresholds: Sequence[float], skips: Sequence[float]
    ) -> tuple[float, float]:
        last_seq, jumped = self.routing_stages(thresholds, skips)
        answer = np.where(jumped, self.k - 1, last_seq)
        return self._summary_stats(answer, last_seq, jumped)

    # --- outcome materialization -----------------------------------------

    def outcomes(
        self,
        last_seq: np.ndarray,
        jumped: np.ndarray | None = None,
    ) -> list[CascadeOutcome]:
        order = self.model_order
        final = self.k - 1
        costs = self._instance_costs(last_seq, jumped)
        out: list[CascadeOutcome] = []
        for i, inst in enumerate(self.bundle.instances):
            z = int(last_seq[i])
            if jumped is not None and jumped[i]:
                used = order[: z + 1] + (order[final],)
                answer = final
            else:
                used = order[: z + 1]
                answer = z
            out.append(
                CascadeOutcome(
                    instance_id=inst.instance_id,
                    used=used,
                    answered_by=order[answer],
                    predicted_label=int(self.preds[answer, i]),
                    correct=bool(self.correct[answer, i]),
                    cost=float(costs[i]),
                )
            )
        return out


def run_sequential(bundle: EvaluationBundle, config: CascadeConfig) -> RunSummary:
    """Run a sequential cascade over every bundle instance."""
    if config.mode is not Mode.SEQUENTIAL:
        raise ConfigurationError("run_sequential requires mode=sequential")
    _check_config(bundle, config)
    prep = PreparedCascade(
        bundle,
        config.model_order,
        config.policy,
        seed=config.seed,
        heuristic_invert=config.heuristic_invert,
    )
    stage = prep.sequential_stages(config.thresholds)
    return aggregate(prep.outcomes(stage), bundle)


def run_routing(bundle: EvaluationBundle, config: CascadeConfig) -> RunSummary:
    """Run a routing cascade (low confidence skips straight to the final model)."""
    if config.mode is not Mode.ROUTING:
        raise ConfigurationError("run_routing requires mode=routing")
    _check_config(bundle, config)
    prep = PreparedCascade(
        bundle,
        config.model_order,
        config.policy,
        seed=config.seed,
        heuristic_invert=config.heuristic_invert,
    )
    assert config.skip_thresholds is not None
    last_seq, jumped = prep.routing_stages(config.thresholds, config.skip_thresholds)
    return aggregate(prep.outcomes(last_seq, jumped), bundle)


def run(bundle: EvaluationBundle, config: CascadeConfig) -> RunSummary:
    if config.mode is Mode.ROUTING:
        return run_routing(bundle, config)
    return run_sequential(bundle, config)


def aggregate(
    outcomes: Sequence[CascadeOutcome], bundle: EvaluationBundle
) -> RunSummary:
    """Reduce per-instance outcomes to mean cost (FLOPs) and accuracy (percent)."""
    if len(outcomes) != len(bundle.instances):
        raise CountMismatchError(
            f"{len(outcomes)} outcomes for {len(bundle.instances)} instances"
        )
    ids = {o.instance_id for o in outcomes}
    expected = {inst.instance_id for inst in bundle.instances}
    if ids != expected:
        raise CountMismatchError("outcome instance ids do not match the bundle")
    n = len(outcomes)
    mean_cost = math.fsum(o.cost for o in outcomes) / n
    accuracy = 100.0 * sum(1 for o in outcomes if o.correct) / n
    return RunSummary(mean_cost=mean_cost, accuracy=accuracy, outcomes=tuple(outcomes))
