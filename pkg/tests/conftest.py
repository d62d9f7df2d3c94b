"""Shared builders for handcrafted bundles."""

from __future__ import annotations

from typing import Mapping, Sequence

import pytest

from cascadekit import (
    EvaluationBundle,
    InstanceRecord,
    ModelProfile,
    PredictionRecord,
    build_bundle,
)
from cascadekit.records import argmax_label

# Inference cost (FLOPs) of the four BERT variants by input sequence length.
BERT_COSTS: dict[str, dict[int, float]] = {
    "mini": {
        50: 0.16e9, 80: 0.25e9, 100: 0.31e9, 120: 0.38e9,
        150: 0.47e9, 220: 0.69e9, 275: 0.87e9,
    },
    "medium": {
        50: 1.26e9, 80: 2.01e9, 100: 2.52e9, 120: 3.02e9,
        150: 3.78e9, 220: 5.54e9, 275: 6.92e9,
    },
    "base": {
        50: 4.25e9, 80: 6.80e9, 100: 8.49e9, 120: 10.19e9,
        150: 12.74e9, 220: 18.69e9, 275: 23.36e9,
    },
    "large": {
        50: 5.10e9, 80: 24.16e9, 100: 30.20e9, 120: 36.24e9,
        150: 45.30e9, 220: 66.44e9, 275: 83.05e9,
    },
}


def bert_profile(model_id: str, order: int) -> ModelProfile:
    return ModelProfile.create(model_id, order, BERT_COSTS[model_id])


def make_bundle(
    distributions: Mapping[str, Sequence[Sequence[float]]],
    gold: Sequence[int],
    lengths: Sequence[int] | None = None,
    cost_tables: Mapping[str, Mapping[int, float]] | None = None,
    dataset_seq_len: int | None = None,
    per_instance_cost: bool = False,
    instance_ids: Sequence[str] | None = None,
) -> EvaluationBundle:
    """Bundle from explicit per-model distributions, model order as given.

    Default cost tables charge ``order * 1e9`` FLOPs flat across two lengths.
    """
    n = len(gold)
    lengths = list(lengths) if lengths is not None else [10] * n
    ids = list(instance_ids) if instance_ids is not None else [
        f"x{i}" for i in range(n)
    ]
    instances = [
        InstanceRecord(ids[i], gold[i], lengths[i]) for i in range(n)
    ]
    profiles = []
    predictions = {}
    for order, (model_id, dists) in enumerate(distributions.items(), start=1):
        assert len(dists) == n
        if cost_tables is not None:
            table = cost_tables[model_id]
        else:
            table = {1: order * 1e9, 1000: order * 1e9}
        profiles.append(ModelProfile.create(model_id, order, table))
        predictions[model_id] = [
            PredictionRecord(
                ids[i],
                model_id,
                tuple(float(p) for p in dists[i]),
                argmax_label(dists[i]),
            )
            for i in range(n)
        ]
    return build_bundle(
        instances,
        predictions,
        profiles,
        dataset_seq_len=dataset_seq_len,
        per_instance_cost=per_instance_cost,
    )


@pytest.fixture
def two_model_bundle() -> EvaluationBundle:
    """3 instances, K=2, binary labels; M1 maxprobs 0.9 / 0.6 / 0.95."""
    return make_bundle(
        distributions={
            "small": [[0.9, 0.1], [0.6, 0.4], [0.95, 0.05]],
            "big": [[0.8, 0.2], [0.3, 0.7], [0.9, 0.1]],
        },
        gold=[0, 1, 0],
    )
