"""Synthetic multi-model prediction bundles with controllable calibration.

Generation is deterministic under a seed and keyed per model, so adding or
removing a model leaves every other model's records byte-identical. Each
instance gets a hidden difficulty rank; model j answers correctly exactly the
``round(n * target_accuracy_j)`` easiest instances, which makes empirical
accuracies track their targets to within half an instance and makes larger
models' correct sets supersets of smaller ones (easy instances are correct
everywhere).

Confidence: the winning label's probability is 1/|Y| + (1 - 1/|Y|) * u with
u drawn from Beta(1 + s, 1) on correct predictions and Beta(1, 1 + s) on
incorrect ones, s being the calibration sharpness. At s = 0 both collapse to
Uniform(0, 1), decoupling confidence from correctness; larger s widens the
separation. The remaining mass is spread evenly over the other labels, so the
winning probability is always strictly between 1/|Y| and 1.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass
from typing import Mapping, Sequence

import numpy as np

from .errors import InvalidSpecError
from .records import (
    EvaluationBundle,
    InstanceRecord,
    ModelProfile,
    PredictionRecord,
    build_bundle,
)

_U_FLOOR = 1e-9  # keeps the winning probability strictly above 1/|Y|


@dataclass(frozen=True)
class SynthModel:
    model_id: str
    target_accuracy: float  # (0, 1]
    calibration_sharpness: float  # >= 0
    cost_table: tuple[tuple[int, float], ...]
    param_count: int | None = None

    @classmethod
    def create(
        cls,
        model_id: str,
        target_accuracy: float,
        calibration_sharpness: float,
        cost_table: Mapping[int, float] | Sequence[tuple[int, float]],
        param_count: int | None = None,
    ) -> "SynthModel":
        items = (
            cost_table.items() if isinstance(cost_table, Mapping) else cost_table
        )
        return cls(
            model_id,
            float(target_accuracy),
            float(calibration_sharpness),
            tuple(sorted((int(l), float(c)) for l, c in items)),
            param_count,
        )


@dataclass(frozen=True)
class SynthSpec:
    n_instances: int
    label_count: int
    models: tuple[SynthModel, ...]  # cheapest first
    seq_len: int
    seed: int = 0
    per_instance_cost: bool = False


def default_cost_table(base_cost: float, seq_len: int) -> dict[int, float]:
    """Three-point cost table scaling linearly with sequence length."""
    half = max(1, seq_len // 2)
    return {
        half: base_cost * half / seq_len,
        seq_len: base_cost,
        seq_len * 2: base_cost * 2.0,
    }


def _validate_spec(spec: SynthSpec) -> None:
    if spec.n_instances < 1:
        raise InvalidSpecError(f"n_instances must be >= 1, got {spec.n_instances}")
    if spec.label_count < 2:
        raise InvalidSpecError(f"label_count must be >= 2, got {spec.label_count}")
    if spec.seq_len < 1:
        raise InvalidSpecError(f"seq_len must be >= 1, got {spec.seq_len}")
    if not spec.models:
        raise InvalidSpecError("spec has no models")
    ids = [m.model_id for m in spec.models]
    if len(set(ids)) != len(ids):
        raise InvalidSpecError(f"duplicate model ids: {ids}")
    prev = 0.0
    for m in spec.models:
        if not 0.0 < m.target_accuracy <= 1.0:
            raise InvalidSpecError(
                f"target accuracy {m.target_accuracy!r} for {m.model_id!r} "
                "outside (0, 1]"
            )
        if m.target_accuracy < prev:
            raise InvalidSpecError(
                "target accuracies must be non-decreasing with cascade order"
            )
        prev = m.target_accuracy
        if m.calibration_sharpness < 0.0:
            raise InvalidSpecError(
                f"calibration sharpness {m.calibration_sharpness!r} for "
                f"{m.model_id!r} is negative"
            )
        if not m.cost_table:
            raise InvalidSpecError(f"model {m.model_id!r} has an empty cost table")


def _derive_rng(seed: int, tag: str) -> np.random.Generator:
    digest = hashlib.sha256(f"{seed}:{tag}".encode()).digest()
    return np.random.default_rng(int.from_bytes(digest[:8], "big"))


def generate(spec: SynthSpec) -> EvaluationBundle:
    """Produce a validated EvaluationBundle described by a SynthSpec."""
    _validate_spec(spec)
    n = spec.n_instances
    labels = spec.label_count

    rng = _derive_rng(spec.seed, "instances")
    gold = rng.integers(0, labels, size=n)
    lengths = rng.integers(1, spec.seq_len + 1, size=n)
    # difficulty_rank[i] < round(n * t) <=> instance i is among the easiest
    # round(n * t) instances
    difficulty_rank = rng.permutation(n)

    instances = [
        InstanceRecord(f"i{idx:06d}", int(gold[idx]), int(lengths[idx]))
        for idx in range(n)
    ]

    predictions: dict[str, list[PredictionRecord]] = {}
    profiles = []
    for order, model in enumerate(spec.models, start=1):
        profiles.append(
            ModelProfile.create(
                model.model_id, order, model.cost_table, model.param_count
            )
        )
        m_rng = _derive_rng(spec.seed, f"model:{model.model_id}")
        n_correct = round(n * model.target_accuracy)
        correct = difficulty_rank < n_correct

        s = model.calibration_sharpness
        a = np.where(correct, 1.0 + s, 1.0)
        b = np.where(correct, 1.0, 1.0 + s)
        u = np.clip(m_rng.beta(a, b), _U_FLOOR, 1.0 - _U_FLOOR)
        top_p = 1.0 / labels + (1.0 - 1.0 / labels) * u

        wrong = m_rng.integers(0, labels - 1, size=n)
        wrong = wrong + (wrong >= gold)  # uniform over labels != gold
        top_label = np.where(correct, gold, wrong)

        records = []
        for idx in range(n):
            win = int(top_label[idx])
            p = float(top_p[idx])
            rest = (1.0 - p) / (labels - 1)
            dist = tuple(p if lab == win else rest for lab in range(labels))
            records.append(
                PredictionRecord(instances[idx].instance_id, model.model_id, dist, win)
            )
        predictions[model.model_id] = records

    return build_bundle(
        instances,
        predictions,
        profiles,
        dataset_seq_len=spec.seq_len,
        per_instance_cost=spec.per_instance_cost,
    )
