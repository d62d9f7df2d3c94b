"""Acceptance suite: one test per criterion, each printing a PASS line.

Run with ``pytest tests/test_acceptance.py -v -s`` to see the per-criterion
lines. Tolerances are stated inline; "exact" means Python ``==`` on floats.
"""

import json
import math
import time
from fractions import Fraction

import numpy as np
import pytest

from cascadekit import (
    CascadeConfig,
    CurvePoint,
    Mode,
    Policy,
    SynthModel,
    SynthSpec,
    auc,
    contribution,
    default_cost_table,
    generate,
    instance_cost,
    matched_cost,
    pareto_frontier,
    policy_range,
    run_routing,
    run_sequential,
    standalone_stats,
    sweep,
    threshold_grid,
    tune,
)
from cascadekit.cli import main as cli_main
from cascade_oracle import oracle_outcomes
from conftest import BERT_COSTS, make_bundle

SEQ = 100


def _report(criterion: int, label: str) -> None:
    print(f"ACCEPTANCE {criterion:02d} {label}: PASS")


def synth_k2(seed: int, n: int = 5000, labels: int = 3, sharp: float = 4.0):
    return generate(
        SynthSpec(
            n_instances=n,
            label_count=labels,
            models=(
                SynthModel.create("med", 0.75, sharp, default_cost_table(2.52e9, SEQ)),
                SynthModel.create("base", 0.85, sharp, default_cost_table(8.49e9, SEQ)),
            ),
            seq_len=SEQ,
            seed=seed,
        )
    )


def synth_k3(seed: int, n: int = 5000, labels: int = 3, sharp: float = 4.0):
    """The K=2 bundle of synth_k2 with a cheaper, less accurate model under it."""
    return generate(
        SynthSpec(
            n_instances=n,
            label_count=labels,
            models=(
                SynthModel.create("mini", 0.65, sharp, default_cost_table(0.31e9, SEQ)),
                SynthModel.create("med", 0.75, sharp, default_cost_table(2.52e9, SEQ)),
                SynthModel.create("base", 0.85, sharp, default_cost_table(8.49e9, SEQ)),
            ),
            seq_len=SEQ,
            seed=seed,
        )
    )


def test_c01_endpoint_exactness():
    """All-min thresholds give exactly (acc(M1), mean c1); all-max give
    exactly (acc(MK), mean sum of costs). Tolerance 0, runtime < 1 s."""
    start = time.perf_counter()
    bundle = generate(
        SynthSpec(
            n_instances=1000,
            label_count=3,
            models=(
                SynthModel.create("a", 0.7, 3.0, default_cost_table(1.1e9, SEQ)),
                SynthModel.create("b", 0.8, 3.0, default_cost_table(4.4e9, SEQ)),
                SynthModel.create("c", 0.9, 3.0, default_cost_table(9.9e9, SEQ)),
            ),
            seq_len=SEQ,
            seed=42,
        )
    )
    n = len(bundle.instances)
    profiles = bundle.profiles
    gold = {i.instance_id: i.gold_label for i in bundle.instances}

    def standalone_acc(model_id):
        table = bundle.predictions[model_id]
        return 100.0 * sum(
            1 for iid, rec in table.items() if rec.predicted_label == gold[iid]
        ) / n

    exp_acc_m1 = standalone_acc("a")
    exp_acc_mk = standalone_acc("c")
    exp_mean_c1 = math.fsum(
        instance_cost(profiles[0], bundle.effective_length(i))
        for i in bundle.instances
    ) / n

    def full_prefix_cost(inst):
        total = 0.0
        for prof in profiles:
            total = total + instance_cost(prof, bundle.effective_length(inst))
        return total

    exp_mean_total = math.fsum(full_prefix_cost(i) for i in bundle.instances) / n

    for policy in (Policy.MAXPROB, Policy.DTU, Policy.RANDOM, Policy.HEURISTIC):
        lo, hi = policy_range(policy, bundle.label_count)
        low = run_sequential(
            bundle, CascadeConfig(bundle.model_ids, policy, (lo, lo), seed=3)
        )
        assert low.accuracy == exp_acc_m1
        assert low.mean_cost == exp_mean_c1
        high = run_sequential(
            bundle, CascadeConfig(bundle.model_ids, policy, (hi, hi), seed=3)
        )
        assert high.accuracy == exp_acc_mk
        assert high.mean_cost == exp_mean_total

    elapsed = time.perf_counter() - start
    assert elapsed < 1.0, f"endpoint check took {elapsed:.2f}s"
    _report(1, "endpoint exactness")


def test_c02_brute_force_oracle_equivalence():
    """>= 100 randomized trials across all policies and both modes: the
    per-instance rule-following oracle produces identical outcome lists."""
    rng = np.random.default_rng(2024)
    policies = [Policy.MAXPROB, Policy.DTU, Policy.RANDOM, Policy.HEURISTIC]
    trials = 0
    for rep in range(26):
        for policy in policies:
            n = int(rng.integers(20, 201))
            labels = int(rng.integers(2, 5))
            k = int(rng.integers(1, 4))
            routing = k == 3 and rep % 2 == 0
            targets = np.sort(rng.uniform(0.4, 0.95, size=k))
            sharp = float(rng.uniform(0.0, 5.0))
            models = tuple(
                SynthModel.create(
                    f"m{j}",
                    float(targets[j]),
                    sharp,
                    default_cost_table((j + 1) ** 2 * 1e9, 60),
                )
                for j in range(k)
            )
            bundle = generate(
                SynthSpec(
                    n, labels, models, seq_len=60, seed=int(rng.integers(0, 10**6))
                )
            )
            lo, hi = policy_range(policy, labels)
            thresholds = tuple(
                float(rng.uniform(lo, hi * 1.05 + 1e-9)) for _ in range(k - 1)
            )
            seed = int(rng.integers(0, 1000))
            invert = bool(rng.integers(0, 2))
            if routing:
                config = CascadeConfig(
                    bundle.model_ids,
                    policy,
                    thresholds,
                    mode=Mode.ROUTING,
                    skip_thresholds=tuple(
                        float(rng.uniform(lo, t)) for t in thresholds
                    ),
                    seed=seed,
                    heuristic_invert=invert,
                )
                summary = run_routing(bundle, config)
            else:
                config = CascadeConfig(
                    bundle.model_ids,
                    policy,
                    thresholds,
                    seed=seed,
                    heuristic_invert=invert,
                )
                summary = run_sequential(bundle, config)
            assert list(summary.outcomes) == oracle_outcomes(bundle, config)
            trials += 1
    assert trials >= 100
    _report(2, f"oracle equivalence over {trials} trials")


def test_c03_cost_formula():
    """An instance escalated medium -> base at length 120 costs exactly
    3.02e9 + 10.19e9 = 13.21e9 FLOPs."""
    bundle = make_bundle(
        distributions={"medium": [[0.55, 0.45]], "base": [[0.9, 0.1]]},
        gold=[0],
        cost_tables={"medium": BERT_COSTS["medium"], "base": BERT_COSTS["base"]},
        dataset_seq_len=120,
    )
    summary = run_sequential(
        bundle, CascadeConfig(bundle.model_ids, Policy.MAXPROB, (0.99,))
    )
    assert summary.outcomes[0].used == ("medium", "base")
    assert summary.outcomes[0].cost == 13.21e9
    assert summary.mean_cost == 13.21e9
    _report(3, "hand-computed cost accounting")


def test_c04_binary_dtu_equals_maxprob():
    """On 2-label bundles the DTU and MaxProb quantile sweeps produce
    identical frontier point sets; AUC agrees within 1e-9."""
    for seed in range(3):
        bundle = synth_k2(seed=seed, n=2000, labels=2)
        frontiers = {}
        aucs = {}
        for policy in (Policy.MAXPROB, Policy.DTU):
            grid = threshold_grid(bundle, policy, 11)
            points = sweep(bundle, policy, Mode.SEQUENTIAL, grid)
            frontier = pareto_frontier(points)
            frontiers[policy] = [(p.mean_cost, p.accuracy) for p in frontier]
            aucs[policy] = auc(frontier)
        assert frontiers[Policy.MAXPROB] == frontiers[Policy.DTU]
        assert abs(aucs[Policy.MAXPROB] - aucs[Policy.DTU]) <= 1e-9
    _report(4, "binary DTU == MaxProb sweeps")


def _policy_auc(bundle, policy, seed, points_per_stage=16):
    grid = threshold_grid(bundle, policy, points_per_stage, seed=seed)
    points = sweep(bundle, policy, Mode.SEQUENTIAL, grid, seed=seed)
    return auc(pareto_frontier(points))


def test_c05_calibrated_superiority():
    """K=2 bundles (targets 0.75/0.85, sharpness 4, n=5000): MaxProb AUC
    beats Random AUC in >= 18 of 20 seeds with mean gap >= 1 point, in
    under a minute."""
    start = time.perf_counter()
    gaps = []
    for seed in range(20):
        bundle = synth_k2(seed=seed)
        gaps.append(
            _policy_auc(bundle, Policy.MAXPROB, seed)
            - _policy_auc(bundle, Policy.RANDOM, seed)
        )
    elapsed = time.perf_counter() - start
    wins = sum(1 for g in gaps if g > 0)
    mean_gap = sum(gaps) / len(gaps)
    assert wins >= 18, f"MaxProb beat Random in only {wins}/20 seeds"
    assert mean_gap >= 1.0, f"mean AUC gap {mean_gap:.3f} < 1 point"
    assert elapsed < 60.0, f"criterion took {elapsed:.1f}s"
    _report(5, f"MaxProb > Random AUC ({wins}/20 seeds, gap {mean_gap:.2f})")


def _matched_at_largest(bundle, seed, points_per_stage):
    grid = threshold_grid(bundle, Policy.MAXPROB, points_per_stage, seed=seed)
    points = sweep(bundle, Policy.MAXPROB, Mode.SEQUENTIAL, grid, seed=seed)
    frontier = pareto_frontier(points)
    largest = standalone_stats(bundle)[-1]
    hit = matched_cost(frontier, largest.accuracy, largest.mean_cost)
    assert hit is not None, "frontier never reaches the largest model's accuracy"
    return hit[0]


def test_c06_k3_efficiency_gain():
    """Adding a cheaper, less accurate model under the K=2 bundle lowers the
    matched cost at acc(M_K) in >= 18 of 20 seeds."""
    wins = 0
    for seed in range(20):
        cost_k2 = _matched_at_largest(synth_k2(seed=seed), seed, 16)
        cost_k3 = _matched_at_largest(synth_k3(seed=seed), seed, 12)
        wins += cost_k3 <= cost_k2
    assert wins >= 18, f"K=3 matched cost improved in only {wins}/20 seeds"
    _report(6, f"K=3 matched cost <= K=2 ({wins}/20 seeds)")


def test_c07_contribution_identity():
    """Sum of answered_fraction_j * accuracy_j / 100 reproduces the overall
    cascade accuracy exactly, on every analyzed run."""
    rng = np.random.default_rng(7)
    checked = 0
    for seed in (0, 1):
        for k, build in ((2, synth_k2), (3, synth_k3)):
            bundle = build(seed=seed, n=997)  # prime size, awkward fractions
            lo, hi = policy_range(Policy.MAXPROB, bundle.label_count)
            for _ in range(4):
                thresholds = tuple(rng.uniform(lo, hi) for _ in range(k - 1))
                config = CascadeConfig(bundle.model_ids, Policy.MAXPROB, thresholds)
                summary = run_sequential(bundle, config)
                report = contribution(summary.outcomes, bundle)
                combined = Fraction(0)
                for m in report.per_model:
                    if m.answered_count == 0:
                        continue
                    frac = Fraction(100 * m.answered_count, report.total)
                    acc = Fraction(100 * m.correct_count, m.answered_count)
                    combined += frac * acc / 100
                overall = Fraction(
                    100 * sum(m.correct_count for m in report.per_model),
                    report.total,
                )
                assert combined == overall
                assert report.overall_accuracy == summary.accuracy
                assert float(combined) == pytest.approx(
                    report.overall_accuracy, abs=1e-9
                )
                checked += 1
    _report(7, f"contribution identity exact on {checked} runs")


def test_c08_tuning_feasibility_and_optimality():
    """Across 20 randomized small bundles the tuned point never exceeds the
    validation budget and matches exhaustive grid search exactly."""
    rng = np.random.default_rng(88)
    for trial in range(20):
        n = int(rng.integers(60, 160))
        k = int(rng.integers(2, 4))
        targets = np.sort(rng.uniform(0.5, 0.95, size=k))
        models = tuple(
            SynthModel.create(
                f"m{j}",
                float(targets[j]),
                float(rng.uniform(1.0, 5.0)),
                default_cost_table((j + 1) ** 2 * 1e9, 80),
            )
            for j in range(k)
        )
        val = generate(
            SynthSpec(n, 3, models, seq_len=80, seed=int(rng.integers(0, 10**6)))
        )
        test = generate(
            SynthSpec(n, 3, models, seq_len=80, seed=int(rng.integers(0, 10**6)))
        )
        grid = threshold_grid(val, Policy.MAXPROB, 5)
        points = sweep(val, Policy.MAXPROB, Mode.SEQUENTIAL, grid)
        costs = sorted(p.mean_cost for p in points)
        budget = costs[int(rng.integers(0, len(costs)))]

        tuned = tune(val, test, Policy.MAXPROB, Mode.SEQUENTIAL, budget, grid)
        assert tuned.validation_cost <= budget

        feasible = [p for p in points if p.mean_cost <= budget]
        best = min(
            feasible, key=lambda p: (-p.accuracy, p.mean_cost, p.thresholds)
        )
        assert tuned.thresholds == best.thresholds
        assert tuned.validation_cost == best.mean_cost
        assert tuned.validation_accuracy == best.accuracy
    _report(8, "tuning matches exhaustive search on 20 bundles")


def test_c09_auc_unit_values():
    """Constant curve yields its value; the linear 70 -> 90 curve yields
    exactly 80.0."""
    flat = [CurvePoint(0.0, 80.0, ()), CurvePoint(1.0, 80.0, ())]
    assert auc(flat) == 80.0
    linear = [CurvePoint(0.0, 70.0, ()), CurvePoint(1.0, 90.0, ())]
    assert auc(linear) == 80.0
    _report(9, "AUC unit values exact")


def test_c10_manifest_determinism(tmp_path):
    """Rerunning from a manifest reproduces every output byte-for-byte,
    including Random-policy runs."""
    data = tmp_path / "data"
    assert (
        cli_main(
            [
                "synth", "--out", str(data),
                "--n", "400", "--labels", "2",
                "--targets", "0.7,0.85", "--sharpness", "3",
                "--costs", "1e9,5e9", "--seq-len", "60", "--seed", "11",
            ]
        )
        == 0
    )
    base_args = [
        "--instances", str(data / "instances.jsonl"),
        "--predictions", str(data / "preds_m1.jsonl"), str(data / "preds_m2.jsonl"),
        "--profiles", str(data / "profiles.toml"),
    ]
    original = tmp_path / "run0"
    assert (
        cli_main(
            ["sweep", *base_args, "--policy", "random", "--seed", "99",
             "--points", "9", "--out", str(original)]
        )
        == 0
    )
    reruns = []
    for i in (1, 2):
        target = tmp_path / f"run{i}"
        assert (
            cli_main(["rerun", str(original / "manifest.json"), "--out", str(target)])
            == 0
        )
        reruns.append(target)
    names = ["curve.csv", "summary.json", "manifest.json"]
    for target in reruns:
        for name in names:
            assert (original / name).read_bytes() == (target / name).read_bytes()
    manifest = json.loads((original / "manifest.json").read_text())
    assert manifest["options"]["policy"] == "random"
    _report(10, "byte-identical reruns from manifests")
