"""Command-line front-end.

Subcommands: validate, simulate, sweep, analyze, tune, synth, plot, rerun.
Every artifact-producing run writes a ``manifest.json`` next to its outputs
recording the resolved options and input digests; ``rerun <manifest>``
reproduces the outputs byte-identically. Options may come from a JSON config
file (``--config``); explicit flags win over the config file, which wins over
built-in defaults. The ``CASCADEKIT_OUTDIR`` environment variable supplies a
default ``--out``.

Exit codes: 0 success, 2 input validation failure, 3 configuration error,
4 internal invariant violation.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
from pathlib import Path
from typing import Sequence

from . import __version__
from .analysis import contribution, improvement_report, tune
from .cascade import CascadeConfig, Mode, run
from .confidence import Policy
from .errors import (
    CascadeKitError,
    ConfigurationError,
    InputError,
)
from .ingest import load_bundle, write_bundle
from .manifest import (
    MANIFEST_NAME,
    atomic_write_text,
    build_manifest,
    check_inputs_unchanged,
    load_manifest,
    write_json,
    write_manifest,
)
from .records import EvaluationBundle
from .sweep import (
    DEFAULT_GRID_CAP,
    CurveSummary,
    summarize,
    sweep,
    threshold_grid,
)
from .svgplot import render_curve_svg
from .synth import SynthModel, SynthSpec, default_cost_table, generate

OUTDIR_ENV = "CASCADEKIT_OUTDIR"


# --- small helpers ----------------------------------------------------------


def _float_list(text: str) -> list[float]:
    try:
        return [float(x) for x in text.split(",") if x.strip()]
    except ValueError as exc:
        raise ConfigurationError(f"cannot parse float list {text!r}") from exc


def _str_list(text: str) -> list[str]:
    return [x.strip() for x in text.split(",") if x.strip()]


def _format_table(headers: Sequence[str], rows: Sequence[Sequence[str]]) -> str:
    widths = [len(h) for h in headers]
    for row in rows:
        for i, cell in enumerate(row):
            widths[i] = max(widths[i], len(cell))
    lines = [
        "  ".join(h.ljust(w) for h, w in zip(headers, widths)).rstrip(),
        "  ".join("-" * w for w in widths),
    ]
    for row in rows:
        lines.append("  ".join(c.ljust(w) for c, w in zip(row, widths)).rstrip())
    return "\n".join(lines)


def _fmt_opt(value: float | None, digits: int = 4) -> str:
    return "n/a" if value is None else f"{value:.{digits}f}"


def _resolve_out(opts: dict) -> Path:
    out = opts.get("out") or os.environ.get(OUTDIR_ENV)
    if not out:
        raise ConfigurationError(
            f"no output directory: pass --out or set {OUTDIR_ENV}"
        )
    return Path(out)


def _bundle_input_paths(opts: dict) -> list[str]:
    return [opts["instances"], *opts["predictions"], opts["profiles"]]


def _load_bundle_from_opts(opts: dict) -> tuple[EvaluationBundle, tuple[str, ...]]:
    bundle = load_bundle(
        opts["instances"],
        opts["predictions"],
        opts["profiles"],
        per_instance_cost=opts.get("per_instance_cost"),
        dataset_seq_len=opts.get("seq_len"),
    )
    models = opts.get("models")
    order = tuple(models) if models else bundle.model_ids
    return bundle, order


def _summary_doc(summary: CurveSummary, opts: dict, order: Sequence[str]) -> dict:
    return {
        "policy": opts["policy"],
        "mode": opts["mode"],
        "model_order": list(order),
        "seed": opts.get("seed", 0),
        "auc": summary.auc,
        "max_accuracy": summary.max_accuracy,
        "max_accuracy_gain": summary.max_accuracy - summary.standalone[-1].accuracy,
        "frontier": [
            {
                "mean_cost": p.mean_cost,
                "accuracy": p.accuracy,
                "thresholds": list(p.thresholds),
                "skip_thresholds": (
                    list(p.skip_thresholds) if p.skip_thresholds is not None else None
                ),
            }
            for p in summary.points
        ],
        "standalone": [
            {"model_id": s.model_id, "accuracy": s.accuracy, "mean_cost": s.mean_cost}
            for s in summary.standalone
        ],
        "matched": [
            {
                "model_id": m.model_id,
                "standalone_accuracy": m.standalone_accuracy,
                "standalone_cost": m.standalone_cost,
                "cascade_cost": m.cascade_cost,
                "improvement_percent": m.improvement_percent,
                "reached": m.reached,
            }
            for m in summary.matched
        ],
    }


def _curve_csv(points, k: int, routing: bool) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    header = [f"t{j + 1}" for j in range(k - 1)]
    if routing:
        header += [f"s{j + 1}" for j in range(k - 1)]
    writer.writerow(header + ["mean_cost_flops", "accuracy_pct"])
    ordered = sorted(
        points,
        key=lambda p: (p.mean_cost, p.accuracy, p.thresholds, p.skip_thresholds or ()),
    )
    for p in ordered:
        row = [repr(t) for t in p.thresholds]
        if routing:
            row += [repr(s) for s in p.skip_thresholds]
        writer.writerow(row + [repr(p.mean_cost), repr(p.accuracy)])
    return buf.getvalue()


def _make_config(opts: dict, order: Sequence[str]) -> CascadeConfig:
    skips = opts.get("skips")
    return CascadeConfig(
        model_order=tuple(order),
        policy=Policy(opts["policy"]),
        thresholds=tuple(opts["thresholds"]),
        mode=Mode(opts["mode"]),
        skip_thresholds=tuple(skips) if skips else None,
        seed=opts.get("seed", 0),
        heuristic_invert=bool(opts.get("heuristic_invert", False)),
    )


# --- subcommand implementations ---------------------------------------------
# Each takes a plain JSON-serializable options dict; the same dict is stored
# in the manifest and fed back by `rerun`.


def _cmd_validate(opts: dict) -> int:
    bundle, _ = _load_bundle_from_opts(opts)
    print(
        f"ok: {len(bundle.instances)} instances, K={len(bundle.model_ids)} models "
        f"({', '.join(bundle.model_ids)}), {bundle.label_count} labels, "
        f"seq_len={bundle.dataset_seq_len}, "
        f"per_instance_cost={bundle.per_instance_cost}"
    )
    return 0


def _cmd_simulate(opts: dict) -> int:
    bundle, order = _load_bundle_from_opts(opts)
    config = _make_config(opts, order)
    summary = run(bundle, config)

    outdir = _resolve_out(opts)
    outdir.mkdir(parents=True, exist_ok=True)
    outcome_lines = [
        json.dumps(
            {
                "instance_id": o.instance_id,
                "used": list(o.used),
                "answered_by": o.answered_by,
                "predicted_label": o.predicted_label,
                "correct": o.correct,
                "cost": o.cost,
            }
        )
        for o in summary.outcomes
    ]
    outcomes_path = outdir / "outcomes.jsonl"
    atomic_write_text(outcomes_path, "\n".join(outcome_lines) + "\n")
    summary_path = outdir / "summary.json"
    write_json(
        summary_path,
        {
            "mean_cost": summary.mean_cost,
            "accuracy": summary.accuracy,
            "instances": len(summary.outcomes),
            "config": _config_doc(config),
        },
    )
    _finish(opts, "simulate", [outcomes_path, summary_path])
    print(f"mean_cost={summary.mean_cost!r} accuracy={summary.accuracy!r}")
    return 0


def _config_doc(config: CascadeConfig) -> dict:
    return {
        "model_order": list(config.model_order),
        "policy": config.policy.value,
        "mode": config.mode.value,
        "thresholds": list(config.thresholds),
        "skip_thresholds": (
            list(config.skip_thresholds)
            if config.skip_thresholds is not None
            else None
        ),
        "seed": config.seed,
        "heuristic_invert": config.heuristic_invert,
    }


def _cmd_sweep(opts: dict) -> int:
    bundle, order = _load_bundle_from_opts(opts)
    policy = Policy(opts["policy"])
    mode = Mode(opts["mode"])
    seed = opts.get("seed", 0)
    invert = bool(opts.get("heuristic_invert", False))
    grid = threshold_grid(
        bundle,
        policy,
        opts.get("points", 12),
        model_order=order,
        seed=seed,
        heuristic_invert=invert,
    )
    points = sweep(
        bundle,
        policy,
        mode,
        grid,
        model_order=order,
        seed=seed,
        heuristic_invert=invert,
        cap=opts.get("cap", DEFAULT_GRID_CAP),
    )
    summary = summarize(points, bundle, order)

    outdir = _resolve_out(opts)
    outdir.mkdir(parents=True, exist_ok=True)
    curve_path = outdir / "curve.csv"
    atomic_write_text(
        curve_path, _curve_csv(points, len(order), mode is Mode.ROUTING)
    )
    summary_path = outdir / "summary.json"
    write_json(summary_path, _summary_doc(summary, opts, order))
    _finish(opts, "sweep", [curve_path, summary_path])

    report = improvement_report(summary)
    rows = [
        [
            m.model_id,
            f"{m.standalone_accuracy:.2f}",
            f"{m.standalone_cost:.4g}",
            "n/a" if m.cascade_cost is None else f"{m.cascade_cost:.4g}",
            _fmt_opt(m.improvement_percent, 2),
        ]
        for m in report.rows
    ]
    print(
        f"auc={summary.auc!r} max_accuracy={summary.max_accuracy!r} "
        f"points={len(points)} frontier={len(summary.points)}"
    )
    print(
        _format_table(
            ["model", "acc%", "cost", "matched_cost", "saved%"], rows
        )
    )
    return 0


def _cmd_analyze(opts: dict) -> int:
    bundle, order = _load_bundle_from_opts(opts)
    policy = Policy(opts["policy"])
    mode = Mode(opts["mode"])
    seed = opts.get("seed", 0)
    invert = bool(opts.get("heuristic_invert", False))

    thresholds = opts.get("thresholds")
    skips = opts.get("skips")
    if thresholds is None:
        match = opts.get("match")
        if not match:
            raise ConfigurationError("analyze needs --thresholds or --match")
        grid = threshold_grid(
            bundle,
            policy,
            opts.get("points", 12),
            model_order=order,
            seed=seed,
            heuristic_invert=invert,
        )
        points = sweep(
            bundle,
            policy,
            mode,
            grid,
            model_order=order,
            seed=seed,
            heuristic_invert=invert,
            cap=opts.get("cap", DEFAULT_GRID_CAP),
        )
        summary = summarize(points, bundle, order)
        target = next(
            (s for s in summary.standalone if s.model_id == match), None
        )
        if target is None:
            raise ConfigurationError(f"model {match!r} not in the cascade order")
        point = next(
            (p for p in summary.points if p.accuracy >= target.accuracy), None
        )
        if point is None:
            raise ConfigurationError(
                f"sweep never reaches the accuracy of {match!r} "
                f"({target.accuracy:.2f}%)"
            )
        thresholds = list(point.thresholds)
        skips = list(point.skip_thresholds) if point.skip_thresholds else None

    config = _make_config(
        {**opts, "thresholds": thresholds, "skips": skips}, order
    )
    run_summary = run(bundle, config)
    report = contribution(run_summary.outcomes, bundle, order)

    outdir = _resolve_out(opts)
    outdir.mkdir(parents=True, exist_ok=True)
    report_path = outdir / "contribution.json"
    write_json(
        report_path,
        {
            "overall_accuracy": report.overall_accuracy,
            "total": report.total,
            "mean_cost": run_summary.mean_cost,
            "config": _config_doc(config),
            "per_model": [
                {
                    "model_id": m.model_id,
                    "answered_count": m.answered_count,
                    "answered_fraction": m.answered_fraction,
                    "correct_count": m.correct_count,
                    "accuracy_on_answered": m.accuracy_on_answered,
                    "escalated_count": m.escalated_count,
                    "accuracy_on_escalated": m.accuracy_on_escalated,
                    "escalation_drop": m.escalation_drop,
                    "previous_model_accuracy": m.previous_model_accuracy,
                    "takeover_gain": m.takeover_gain,
                }
                for m in report.per_model
            ],
        },
    )
    _finish(opts, "analyze", [report_path])

    rows = [
        [
            m.model_id,
            str(m.answered_count),
            f"{m.answered_fraction:.1f}",
            _fmt_opt(m.accuracy_on_answered, 2),
            _fmt_opt(m.accuracy_on_escalated, 2),
            _fmt_opt(m.escalation_drop, 2),
            _fmt_opt(m.takeover_gain, 2),
        ]
        for m in report.per_model
    ]
    print(
        _format_table(
            [
                "model",
                "answered",
                "frac%",
                "acc_answered%",
                "acc_escalated%",
                "drop",
                "gain",
            ],
            rows,
        )
    )
    print(
        f"overall_accuracy={report.overall_accuracy!r} "
        f"mean_cost={run_summary.mean_cost!r}"
    )
    return 0


def _cmd_tune(opts: dict) -> int:
    test_bundle, order = _load_bundle_from_opts(opts)
    val_bundle = load_bundle(
        opts["val_instances"],
        opts["val_predictions"],
        opts["profiles"],
        per_instance_cost=opts.get("per_instance_cost"),
        dataset_seq_len=opts.get("seq_len"),
    )
    policy = Policy(opts["policy"])
    mode = Mode(opts["mode"])
    seed = opts.get("seed", 0)
    invert = bool(opts.get("heuristic_invert", False))
    grid = threshold_grid(
        val_bundle,
        policy,
        opts.get("points", 12),
        model_order=order,
        seed=seed,
        heuristic_invert=invert,
    )
    point = tune(
        val_bundle,
        test_bundle,
        policy,
        mode,
        opts["budget"],
        grid,
        model_order=order,
        seed=seed,
        heuristic_invert=invert,
        cap=opts.get("cap", DEFAULT_GRID_CAP),
    )

    outdir = _resolve_out(opts)
    outdir.mkdir(parents=True, exist_ok=True)
    tuned_path = outdir / "tuned.json"
    write_json(
        tuned_path,
        {
            "budget": opts["budget"],
            "thresholds": list(point.thresholds),
            "skip_thresholds": (
                list(point.skip_thresholds)
                if point.skip_thresholds is not None
                else None
            ),
            "validation_cost": point.validation_cost,
            "validation_accuracy": point.validation_accuracy,
            "test_cost": point.test_cost,
            "test_accuracy": point.test_accuracy,
        },
    )
    _finish(opts, "tune", [tuned_path], extra_inputs=_val_input_paths(opts))
    print(f"thresholds={list(point.thresholds)}")
    print(
        _format_table(
            ["split", "mean_cost", "accuracy%"],
            [
                ["validation", f"{point.validation_cost:.6g}",
                 f"{point.validation_accuracy:.4f}"],
                ["test", f"{point.test_cost:.6g}", f"{point.test_accuracy:.4f}"],
            ],
        )
    )
    return 0


def _val_input_paths(opts: dict) -> list[str]:
    return [opts["val_instances"], *opts["val_predictions"]]


def _cmd_synth(opts: dict) -> int:
    spec = _synth_spec_from_opts(opts)
    bundle = generate(spec)
    outdir = _resolve_out(opts)
    paths = write_bundle(bundle, outdir)
    inputs = [opts["spec"]] if opts.get("spec") else []
    manifest = build_manifest(
        "synth", _manifest_options(opts), inputs, sorted(paths.values()), __version__
    )
    write_manifest(outdir, manifest)
    print(
        f"wrote {len(bundle.instances)} instances x {len(bundle.model_ids)} models "
        f"to {outdir}"
    )
    return 0


def _synth_spec_from_opts(opts: dict) -> SynthSpec:
    if opts.get("spec"):
        try:
            with open(opts["spec"], "r", encoding="utf-8") as fh:
                doc = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise InputError(f"cannot read synth spec {opts['spec']}: {exc}") from exc
        models = tuple(
            SynthModel.create(
                m["model_id"],
                m["target_accuracy"],
                m.get("calibration_sharpness", 0.0),
                {int(k): float(v) for k, v in m["cost_table"].items()},
                m.get("param_count"),
            )
            for m in doc["models"]
        )
        return SynthSpec(
            n_instances=doc["n_instances"],
            label_count=doc["label_count"],
            models=models,
            seq_len=doc["seq_len"],
            seed=doc.get("seed", 0),
            per_instance_cost=doc.get("per_instance_cost", False),
        )

    targets = opts.get("targets")
    costs = opts.get("costs")
    if not targets or not costs:
        raise ConfigurationError("synth needs --spec or both --targets and --costs")
    if len(targets) != len(costs):
        raise ConfigurationError(
            f"{len(targets)} targets but {len(costs)} base costs"
        )
    sharpness = opts.get("sharpness") or [0.0]
    if len(sharpness) == 1:
        sharpness = sharpness * len(targets)
    if len(sharpness) != len(targets):
        raise ConfigurationError(
            f"{len(targets)} targets but {len(sharpness)} sharpness values"
        )
    ids = opts.get("ids") or [f"m{i + 1}" for i in range(len(targets))]
    if len(ids) != len(targets):
        raise ConfigurationError(f"{len(targets)} targets but {len(ids)} ids")
    seq_len = opts.get("seq_len", 100)
    models = tuple(
        SynthModel.create(
            mid, acc, sharp, default_cost_table(base, seq_len)
        )
        for mid, acc, sharp, base in zip(ids, targets, sharpness, costs)
    )
    return SynthSpec(
        n_instances=opts.get("n", 1000),
        label_count=opts.get("labels", 2),
        models=models,
        seq_len=seq_len,
        seed=opts.get("seed", 0),
        per_instance_cost=bool(opts.get("per_instance_cost", False)),
    )


def _cmd_plot(opts: dict) -> int:
    summary_path = opts["summary"]
    try:
        with open(summary_path, "r", encoding="utf-8") as fh:
            doc = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise InputError(f"cannot read summary {summary_path}: {exc}") from exc
    try:
        curve = [(p["mean_cost"], p["accuracy"]) for p in doc["frontier"]]
        standalone = [
            (s["model_id"], s["accuracy"], s["mean_cost"])
            for s in doc["standalone"]
        ]
        matched = [
            (m["model_id"], m["standalone_accuracy"], m["cascade_cost"])
            for m in doc["matched"]
        ]
        title = f"{doc['policy']} cascade, {doc['mode']} mode"
    except (KeyError, TypeError) as exc:
        raise InputError(
            f"summary {summary_path} is missing curve data ({exc})"
        ) from exc
    svg = render_curve_svg(curve, standalone, matched, title=title)
    outdir = _resolve_out(opts)
    outdir.mkdir(parents=True, exist_ok=True)
    svg_path = outdir / "curve.svg"
    atomic_write_text(svg_path, svg)
    manifest = build_manifest(
        "plot", _manifest_options(opts), [summary_path], [svg_path], __version__
    )
    write_manifest(outdir, manifest)
    print(f"wrote {svg_path}")
    return 0


def _cmd_rerun(opts: dict) -> int:
    manifest_path = Path(opts["manifest"])
    manifest = load_manifest(manifest_path)
    check_inputs_unchanged(manifest, manifest_path)
    command = manifest["command"]
    impl = _COMMANDS.get(command)
    if impl is None:
        raise InputError(f"manifest names unknown command {command!r}")
    rerun_opts = dict(manifest["options"])
    rerun_opts["out"] = opts.get("out") or str(manifest_path.parent)
    return impl(rerun_opts)


def _manifest_options(opts: dict) -> dict:
    # The output directory is where artifacts land, not part of the run's
    # configuration; leaving it out keeps manifests location-independent.
    return {k: v for k, v in sorted(opts.items()) if k != "out" and v is not None}


def _finish(
    opts: dict,
    command: str,
    output_paths: list[Path],
    extra_inputs: list[str] | None = None,
) -> None:
    inputs = _bundle_input_paths(opts) + (extra_inputs or [])
    manifest = build_manifest(
        command, _manifest_options(opts), inputs, output_paths, __version__
    )
    write_manifest(_resolve_out(opts), manifest)


_COMMANDS = {
    "validate": _cmd_validate,
    "simulate": _cmd_simulate,
    "sweep": _cmd_sweep,
    "analyze": _cmd_analyze,
    "tune": _cmd_tune,
    "synth": _cmd_synth,
    "plot": _cmd_plot,
}


# --- argument parsing --------------------------------------------------------


def _add_bundle_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--instances", required=True, help="instances.jsonl path")
    p.add_argument(
        "--predictions",
        required=True,
        nargs="+",
        help="prediction files, cheapest model first",
    )
    p.add_argument("--profiles", required=True, help="profiles TOML path")
    p.add_argument(
        "--per-instance-cost",
        action="store_true",
        default=None,
        dest="per_instance_cost",
        help="charge per-instance true lengths instead of the dataset length",
    )
    p.add_argument(
        "--seq-len",
        type=int,
        default=None,
        dest="seq_len",
        help="override the dataset sequence length for cost lookup",
    )
    p.add_argument(
        "--models",
        type=_str_list,
        default=None,
        help="comma-separated cascade order (default: all bundle models)",
    )


def _add_policy_args(p: argparse.ArgumentParser) -> None:
    p.add_argument(
        "--policy",
        choices=[pol.value for pol in Policy],
        default="maxprob",
    )
    p.add_argument(
        "--mode",
        choices=[m.value for m in Mode],
        default="sequential",
    )
    p.add_argument("--seed", type=int, default=0)
    p.add_argument(
        "--heuristic-invert",
        action="store_true",
        default=False,
        dest="heuristic_invert",
        help="treat longer inputs as more confident for the heuristic policy",
    )


def _add_out_arg(p: argparse.ArgumentParser) -> None:
    p.add_argument(
        "--out",
        default=None,
        help=f"output directory (default: ${OUTDIR_ENV})",
    )


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="cascadekit",
        description="simulate, evaluate, and tune model cascades over "
        "precomputed prediction records",
    )
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate", help="load and validate a bundle")
    _add_bundle_args(p)
    p.add_argument("--config", default=None, help="JSON config file with defaults")

    p = sub.add_parser("simulate", help="run one cascade configuration")
    _add_bundle_args(p)
    _add_policy_args(p)
    p.add_argument("--thresholds", type=_float_list, required=True)
    p.add_argument("--skips", type=_float_list, default=None)
    _add_out_arg(p)
    p.add_argument("--config", default=None)

    p = sub.add_parser("sweep", help="trace the accuracy-cost curve")
    _add_bundle_args(p)
    _add_policy_args(p)
    p.add_argument("--points", type=int, default=12, help="grid points per stage")
    p.add_argument("--cap", type=int, default=DEFAULT_GRID_CAP)
    _add_out_arg(p)
    p.add_argument("--config", default=None)

    p = sub.add_parser("analyze", help="per-model contribution report")
    _add_bundle_args(p)
    _add_policy_args(p)
    p.add_argument("--thresholds", type=_float_list, default=None)
    p.add_argument("--skips", type=_float_list, default=None)
    p.add_argument(
        "--match",
        default=None,
        help="analyze at the cheapest sweep point matching this model's accuracy",
    )
    p.add_argument("--points", type=int, default=12)
    p.add_argument("--cap", type=int, default=DEFAULT_GRID_CAP)
    _add_out_arg(p)
    p.add_argument("--config", default=None)

    p = sub.add_parser("tune", help="pick thresholds for a computation budget")
    _add_bundle_args(p)
    p.add_argument("--val-instances", required=True, dest="val_instances")
    p.add_argument(
        "--val-predictions",
        required=True,
        nargs="+",
        dest="val_predictions",
        help="validation prediction files, cheapest model first",
    )
    _add_policy_args(p)
    p.add_argument("--budget", type=float, required=True, help="mean FLOPs budget")
    p.add_argument("--points", type=int, default=12)
    p.add_argument("--cap", type=int, default=DEFAULT_GRID_CAP)
    _add_out_arg(p)
    p.add_argument("--config", default=None)

    p = sub.add_parser("synth", help="generate a synthetic bundle")
    p.add_argument("--spec", default=None, help="JSON synth spec file")
    p.add_argument("--n", type=int, default=1000)
    p.add_argument("--labels", type=int, default=2)
    p.add_argument("--seq-len", type=int, default=100, dest="seq_len")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument(
        "--targets", type=_float_list, default=None, help="per-model accuracy targets"
    )
    p.add_argument(
        "--sharpness",
        type=_float_list,
        default=None,
        help="per-model calibration sharpness (single value broadcasts)",
    )
    p.add_argument(
        "--costs", type=_float_list, default=None, help="per-model base FLOPs"
    )
    p.add_argument("--ids", type=_str_list, default=None)
    p.add_argument(
        "--per-instance-cost",
        action="store_true",
        default=False,
        dest="per_instance_cost",
    )
    _add_out_arg(p)
    p.add_argument("--config", default=None)

    p = sub.add_parser("plot", help="render an accuracy-cost curve as SVG")
    p.add_argument("--summary", required=True, help="summary.json from a sweep")
    _add_out_arg(p)
    p.add_argument("--config", default=None)

    p = sub.add_parser("rerun", help="reproduce a recorded run from its manifest")
    p.add_argument("manifest", help="path to manifest.json")
    p.add_argument("--out", default=None, help="redirect outputs (default: in place)")

    return parser


def _apply_config_file(args: argparse.Namespace, argv: list[str]) -> dict:
    """Resolve options: defaults < config file < explicit flags."""
    opts = {k: v for k, v in vars(args).items() if k not in ("command", "config")}
    config_path = getattr(args, "config", None)
    if not config_path:
        return opts
    try:
        with open(config_path, "r", encoding="utf-8") as fh:
            file_opts = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise InputError(f"cannot read config {config_path}: {exc}") from exc
    if not isinstance(file_opts, dict):
        raise ConfigurationError(f"config {config_path} must hold a JSON object")
    unknown = set(file_opts) - set(opts)
    if unknown:
        raise ConfigurationError(
            f"config {config_path} has unknown keys: {sorted(unknown)}"
        )
    explicit = _explicit_dests(argv)
    for key, value in file_opts.items():
        if key not in explicit:
            opts[key] = value
    return opts


def _explicit_dests(argv: list[str]) -> set[str]:
    dests = set()
    for token in argv:
        if token.startswith("--"):
            dests.add(token[2:].split("=")[0].replace("-", "_"))
    return dests


def main(argv: list[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        # argparse uses status 2 for usage problems; those are configuration
        # errors in our taxonomy
        code = exc.code if isinstance(exc.code, int) else 0
        return 3 if code == 2 else code

    try:
        if args.command == "rerun":
            return _cmd_rerun({"manifest": args.manifest, "out": args.out})
        opts = _apply_config_file(args, argv)
        return _COMMANDS[args.command](opts)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except ConfigurationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except (CascadeKitError, AssertionError) as exc:
        print(f"internal error: {exc}", file=sys.stderr)
        return 4


def entry() -> None:
    sys.exit(main())
