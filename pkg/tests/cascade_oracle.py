"""Rule-following reference implementation of cascade execution.

Walks every instance through the cascade one stage at a time with plain
Python control flow, independently of the engine's vectorized code paths.
Shares only the per-instance primitives (confidence functions and the cost
table lookup) with the engine, so any disagreement localizes the escalation
logic itself.
"""

from __future__ import annotations

from cascadekit import CascadeConfig, CascadeOutcome, EvaluationBundle, Mode
from cascadekit.confidence import stage_confidence
from cascadekit.records import instance_cost


def oracle_outcomes(
    bundle: EvaluationBundle, config: CascadeConfig
) -> list[CascadeOutcome]:
    order = config.model_order
    k = len(order)
    max_len = bundle.max_input_length
    outcomes = []
    for inst in bundle.instances:
        used: list[str] = []
        answer_idx = k - 1
        stage = 0
        while True:
            model_id = order[stage]
            used.append(model_id)
            if stage == k - 1:
                answer_idx = stage
                break
            rec = bundle.predictions[model_id][inst.instance_id]
            conf = stage_confidence(
                config.policy,
                rec,
                inst,
                stage=stage + 1,
                seed=config.seed,
                max_length=max_len,
                heuristic_invert=config.heuristic_invert,
            )
            if conf >= config.thresholds[stage]:
                answer_idx = stage
                break
            if (
                config.mode is Mode.ROUTING
                and conf < config.skip_thresholds[stage]
            ):
                used.append(order[k - 1])
                answer_idx = k - 1
                break
            stage += 1

        answering = order[answer_idx]
        rec = bundle.predictions[answering][inst.instance_id]
        cost = 0.0
        for model_id in used:
            length = bundle.effective_length(inst)
            cost = cost + instance_cost(bundle.profile(model_id), length)
        outcomes.append(
            CascadeOutcome(
                instance_id=inst.instance_id,
                used=tuple(used),
                answered_by=answering,
                predicted_label=rec.predicted_label,
                correct=rec.predicted_label == inst.gold_label,
                cost=cost,
            )
        )
    return outcomes
