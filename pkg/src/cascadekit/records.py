"""Core domain records: instances, predictions, model cost profiles, bundles.

A bundle joins one instance table, one prediction table per model, and one
ordered list of cost profiles into a validated, immutable evaluation unit.
All downstream computation (cascade runs, sweeps, analysis) reads bundles and
never mutates them, so bundles are safe to share across threads.
"""

from __future__ import annotations

import bisect
import math
from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Mapping, Sequence

from .errors import (
    DuplicateInstanceError,
    EmptyBundleError,
    EmptyCostTableError,
    InputError,
    InvalidDistributionError,
    LabelCountMismatchError,
    MissingPredictionError,
    NonFiniteScoreError,
    NonMonotoneCostError,
    NonPositiveLengthError,
    ProfileOrderError,
    UnknownInstanceError,
)

DISTRIBUTION_SUM_TOL = 1e-6


@dataclass(frozen=True)
class InstanceRecord:
    """One evaluation instance: opaque id, gold label index, token count."""

    instance_id: str
    gold_label: int
    input_length: int


@dataclass(frozen=True)
class PredictionRecord:
    """One model's normalized output distribution for one instance.

    ``predicted_label`` is always the argmax of ``distribution`` with ties
    broken toward the lowest index.
    """

    instance_id: str
    model_id: str
    distribution: tuple[float, ...]
    predicted_label: int


@dataclass(frozen=True)
class ModelProfile:
    """A model's identity, cascade order, and sequence-length -> FLOPs table.

    ``order_index`` is 1-based; 1 is the cheapest model. ``cost_table`` holds
    (length, flops) pairs sorted by length.
    """

    model_id: str
    order_index: int
    cost_table: tuple[tuple[int, float], ...]
    param_count: int | None = None

    @classmethod
    def create(
        cls,
        model_id: str,
        order_index: int,
        cost_table: Mapping[int, float] | Iterable[tuple[int, float]],
        param_count: int | None = None,
    ) -> "ModelProfile":
        items = (
            cost_table.items() if isinstance(cost_table, Mapping) else cost_table
        )
        table = tuple(sorted((int(l), float(c)) for l, c in items))
        if any(l < 1 for l, _ in table):
            raise NonPositiveLengthError(
                f"model {model_id!r}: cost table lengths must be >= 1"
            )
        if len({l for l, _ in table}) != len(table):
            raise InputError(f"model {model_id!r}: duplicate cost table length")
        return cls(model_id, int(order_index), table, param_count)

    @cached_property
    def _lengths(self) -> tuple[int, ...]:
        return tuple(l for l, _ in self.cost_table)

    @cached_property
    def _costs(self) -> tuple[float, ...]:
        return tuple(c for _, c in self.cost_table)


def argmax_label(distribution: Sequence[float]) -> int:
    """Index of the largest entry; ties broken toward the lowest index."""
    best = 0
    best_p = distribution[0]
    for i, p in enumerate(distribution):
        if p > best_p:
            best, best_p = i, p
    return best


def normalize_scores(raw_scores: Sequence[float]) -> tuple[float, ...]:
    """Turn raw scores (logits) into a probability vector via stable softmax.

    Inputs are shifted by their maximum before exponentiation; the result sums
    to 1 within 1e-9 and is invariant (to that tolerance) under adding a
    constant to all inputs.
    """
    scores = [float(s) for s in raw_scores]
    if not scores:
        raise InvalidDistributionError("empty score vector")
    if any(not math.isfinite(s) for s in scores):
        raise NonFiniteScoreError(f"non-finite entry in score vector {scores!r}")
    m = max(scores)
    exps = [math.exp(s - m) for s in scores]
    total = math.fsum(exps)
    return tuple(e / total for e in exps)


def make_prediction(
    instance_id: str,
    model_id: str,
    distribution: Sequence[float] | None = None,
    raw_scores: Sequence[float] | None = None,
) -> PredictionRecord:
    """Build a validated PredictionRecord from a distribution or raw scores.

    When both are supplied the explicit distribution wins; raw scores are
    normalized with :func:`normalize_scores`.
    """
    if distribution is None:
        if raw_scores is None:
            raise InvalidDistributionError(
                f"prediction for {instance_id!r}/{model_id!r} carries neither "
                "a distribution nor raw scores"
            )
        dist = normalize_scores(raw_scores)
    else:
        dist = tuple(float(p) for p in distribution)
        _check_distribution(dist, instance_id, model_id)
    return PredictionRecord(instance_id, model_id, dist, argmax_label(dist))


def _check_distribution(
    dist: tuple[float, ...], instance_id: str, model_id: str
) -> None:
    if not dist:
        raise InvalidDistributionError(
            f"empty distribution for {instance_id!r}/{model_id!r}"
        )
    for p in dist:
        if not math.isfinite(p) or p < 0.0 or p > 1.0:
            raise InvalidDistributionError(
                f"distribution entry {p!r} out of [0, 1] for "
                f"{instance_id!r}/{model_id!r}"
            )
    total = math.fsum(dist)
    if abs(total - 1.0) > DISTRIBUTION_SUM_TOL:
        raise InvalidDistributionError(
            f"distribution for {instance_id!r}/{model_id!r} sums to {total!r}"
        )


def instance_cost(profile: ModelProfile, seq_len: int) -> float:
    """Inference cost (FLOPs) of one model at one sequence length.

    Exact table entries are returned as stored. Other lengths are linearly
    interpolated between the two nearest entries, and linearly extrapolated
    from the two nearest entries beyond the table range. A single-entry table
    is treated as flat.
    """
    if seq_len < 1:
        raise NonPositiveLengthError(f"sequence length {seq_len} must be >= 1")
    if not profile.cost_table:
        raise EmptyCostTableError(profile.model_id)
    lengths, costs = profile._lengths, profile._costs
    i = bisect.bisect_left(lengths, seq_len)
    if i < len(lengths) and lengths[i] == seq_len:
        return costs[i]
    if len(lengths) == 1:
        return costs[0]
    if i <= 0:
        lo, hi = 0, 1
    elif i >= len(lengths):
        lo, hi = len(lengths) - 2, len(lengths) - 1
    else:
        lo, hi = i - 1, i
    slope = (costs[hi] - costs[lo]) / (lengths[hi] - lengths[lo])
    return costs[lo] + slope * (seq_len - lengths[lo])


@dataclass(frozen=True)
class EvaluationBundle:
    """Validated, immutable join of instances, predictions, and profiles.

    ``predictions`` maps model_id -> instance_id -> PredictionRecord and holds
    exactly one record per (model, instance) pair. ``profiles`` is ordered by
    order_index (cheapest first).
    """

    instances: tuple[InstanceRecord, ...]
    predictions: dict[str, dict[str, PredictionRecord]]
    profiles: tuple[ModelProfile, ...]
    label_count: int
    dataset_seq_len: int | None = None
    per_instance_cost: bool = False

    @property
    def model_ids(self) -> tuple[str, ...]:
        return tuple(p.model_id for p in self.profiles)

    def profile(self, model_id: str) -> ModelProfile:
        for p in self.profiles:
            if p.model_id == model_id:
                return p
        raise KeyError(model_id)

    def prediction(self, model_id: str, instance_id: str) -> PredictionRecord:
        return self.predictions[model_id][instance_id]

    def effective_length(self, instance: InstanceRecord) -> int:
        """Sequence length used for cost lookup.

        The dataset-wide padded length is the default; per-instance true
        lengths apply when ``per_instance_cost`` is set or when no dataset
        length was configured.
        """
        if self.per_instance_cost or self.dataset_seq_len is None:
            return instance.input_length
        return self.dataset_seq_len

    @cached_property
    def max_input_length(self) -> int:
        return max(inst.input_length for inst in self.instances)


def build_bundle(
    instances: Sequence[InstanceRecord],
    predictions_per_model: Mapping[str, Sequence[PredictionRecord]],
    profiles: Sequence[ModelProfile],
    dataset_seq_len: int | None = None,
    per_instance_cost: bool = False,
) -> EvaluationBundle:
    """Assemble and validate an EvaluationBundle from parsed records."""
    if not instances:
        raise EmptyBundleError("bundle has no instances")

    ordered = tuple(sorted(profiles, key=lambda p: p.order_index))
    _check_profiles(ordered)

    seen: set[str] = set()
    for inst in instances:
        if inst.instance_id in seen:
            raise DuplicateInstanceError(inst.instance_id, "instances")
        seen.add(inst.instance_id)
        if inst.input_length < 1:
            raise NonPositiveLengthError(
                f"instance {inst.instance_id!r} has input_length "
                f"{inst.input_length}"
            )

    if set(predictions_per_model) != {p.model_id for p in ordered}:
        raise InputError(
            "prediction tables and profiles disagree on the model set: "
            f"{sorted(predictions_per_model)} vs {sorted(p.model_id for p in ordered)}"
        )

    label_count: int | None = None
    pred_maps: dict[str, dict[str, PredictionRecord]] = {}
    for prof in ordered:
        table: dict[str, PredictionRecord] = {}
        for rec in predictions_per_model[prof.model_id]:
            if rec.model_id != prof.model_id:
                raise InputError(
                    f"prediction tagged {rec.model_id!r} filed under "
                    f"{prof.model_id!r}"
                )
            if rec.instance_id in table:
                raise DuplicateInstanceError(
                    rec.instance_id, f"predictions for {prof.model_id!r}"
                )
            if rec.instance_id not in seen:
                raise UnknownInstanceError(prof.model_id, rec.instance_id)
            if label_count is None:
                label_count = len(rec.distribution)
            elif len(rec.distribution) != label_count:
                raise LabelCountMismatchError(
                    f"distribution for {rec.instance_id!r}/{prof.model_id!r} "
                    f"has {len(rec.distribution)} entries, expected {label_count}"
                )
            _check_distribution(rec.distribution, rec.instance_id, rec.model_id)
            if rec.predicted_label != argmax_label(rec.distribution):
                raise InvalidDistributionError(
                    f"predicted label {rec.predicted_label} is not the argmax "
                    f"for {rec.instance_id!r}/{rec.model_id!r}"
                )
            table[rec.instance_id] = rec
        for inst in instances:
            if inst.instance_id not in table:
                raise MissingPredictionError(prof.model_id, inst.instance_id)
        pred_maps[prof.model_id] = table

    assert label_count is not None
    for inst in instances:
        if not 0 <= inst.gold_label < label_count:
            raise LabelCountMismatchError(
                f"instance {inst.instance_id!r} has gold label "
                f"{inst.gold_label}, outside 0..{label_count - 1}"
            )

    _check_cost_monotonicity(ordered)

    return EvaluationBundle(
        instances=tuple(instances),
        predictions=pred_maps,
        profiles=ordered,
        label_count=label_count,
        dataset_seq_len=dataset_seq_len,
        per_instance_cost=per_instance_cost,
    )


def _check_profiles(ordered: tuple[ModelProfile, ...]) -> None:
    if not ordered:
        raise InputError("bundle has no model profiles")
    ids = [p.model_id for p in ordered]
    if len(set(ids)) != len(ids):
        raise InputError(f"duplicate model id among profiles: {ids}")
    orders = [p.order_index for p in ordered]
    if orders != list(range(1, len(ordered) + 1)):
        raise ProfileOrderError(
            f"order_index values {orders} are not a contiguous 1..K sequence"
        )
    for p in ordered:
        if not p.cost_table:
            raise EmptyCostTableError(p.model_id)


def _check_cost_monotonicity(ordered: tuple[ModelProfile, ...]) -> None:
    # Checked pairwise at the union of all table lengths; adjacent pairs
    # suffice because strict ordering is transitive.
    lengths = sorted({l for p in ordered for l, _ in p.cost_table})
    for cheaper, pricier in zip(ordered, ordered[1:]):
        for length in lengths:
            if instance_cost(cheaper, length) >= instance_cost(pricier, length):
                raise NonMonotoneCostError(length, cheaper.model_id, pricier.model_id)
