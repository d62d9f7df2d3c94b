"""Reading and writing bundle files.

Formats:

* ``instances.jsonl``     -- one object per line: instance_id, gold_label,
                             input_length
* ``preds_<model>.jsonl`` -- one object per line: instance_id plus either
                             ``distribution`` (probabilities) or
                             ``raw_scores`` (logits, normalized on load);
                             an explicit distribution wins when both appear
* profiles document (TOML) -- optional ``seq_len`` / ``per_instance_cost``
  at top level, then one ``[[models]]`` table per model with ``id``,
  ``order``, optional ``params``, and a ``cost_table`` mapping sequence
  length to FLOPs

Prediction files carry no model identity; the i-th file on the command line
pairs with the profile of order i+1 (cheapest model first). Writing a bundle
back to disk and reloading it reproduces the records exactly.
"""

from __future__ import annotations

import json
from pathlib import Path
from typing import Sequence

try:
    import tomllib
except ModuleNotFoundError:  # Python 3.10
    import tomli as tomllib

from .errors import InputError, ParseError
from .records import (
    EvaluationBundle,
    InstanceRecord,
    ModelProfile,
    PredictionRecord,
    build_bundle,
    make_prediction,
)


def _jsonl_objects(path: Path):
    with open(path, "r", encoding="utf-8") as fh:
        for line_no, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            try:
                obj = json.loads(line)
            except json.JSONDecodeError as exc:
                raise ParseError(path, line_no, f"invalid JSON ({exc.msg})") from exc
            if not isinstance(obj, dict):
                raise ParseError(path, line_no, "expected a JSON object")
            yield line_no, obj


def _require(obj: dict, key: str, path: Path, line_no: int):
    if key not in obj:
        raise ParseError(path, line_no, f"missing field {key!r}")
    return obj[key]


def load_instances(path: str | Path) -> list[InstanceRecord]:
    path = Path(path)
    records = []
    for line_no, obj in _jsonl_objects(path):
        instance_id = _require(obj, "instance_id", path, line_no)
        gold = _require(obj, "gold_label", path, line_no)
        length = _require(obj, "input_length", path, line_no)
        if not isinstance(instance_id, str):
            raise ParseError(path, line_no, "instance_id must be a string")
        if not isinstance(gold, int) or isinstance(gold, bool):
            raise ParseError(path, line_no, "gold_label must be an integer")
        if not isinstance(length, int) or isinstance(length, bool):
            raise ParseError(path, line_no, "input_length must be an integer")
        records.append(InstanceRecord(instance_id, gold, length))
    return records


def load_predictions(path: str | Path, model_id: str) -> list[PredictionRecord]:
    path = Path(path)
    records = []
    for line_no, obj in _jsonl_objects(path):
        instance_id = _require(obj, "instance_id", path, line_no)
        if not isinstance(instance_id, str):
            raise ParseError(path, line_no, "instance_id must be a string")
        distribution = obj.get("distribution")
        raw_scores = obj.get("raw_scores")
        if distribution is None and raw_scores is None:
            raise ParseError(
                path, line_no, "need either 'distribution' or 'raw_scores'"
            )
        for name, vec in (("distribution", distribution), ("raw_scores", raw_scores)):
            if vec is not None and (
                not isinstance(vec, list)
                or not all(isinstance(v, (int, float)) for v in vec)
            ):
                raise ParseError(path, line_no, f"{name!r} must be a numeric array")
        try:
            records.append(
                make_prediction(instance_id, model_id, distribution, raw_scores)
            )
        except InputError as exc:
            # re-raise same kind with file/line context; these classes all
            # accept a single message argument
            raise type(exc)(f"{path}:{line_no}: {exc}") from exc
    return records


def load_profiles(
    path: str | Path,
) -> tuple[list[ModelProfile], int | None, bool]:
    """Parse the profiles document -> (profiles, dataset_seq_len, per_instance_cost)."""
    path = Path(path)
    try:
        with open(path, "rb") as fh:
            doc = tomllib.load(fh)
    except tomllib.TOMLDecodeError as exc:
        raise ParseError(path, 0, f"invalid TOML ({exc})") from exc

    seq_len = doc.get("seq_len")
    if seq_len is not None and (not isinstance(seq_len, int) or seq_len < 1):
        raise ParseError(path, 0, f"seq_len must be a positive integer, got {seq_len!r}")
    per_instance = bool(doc.get("per_instance_cost", False))

    models = doc.get("models")
    if not isinstance(models, list) or not models:
        raise ParseError(path, 0, "profiles document needs a [[models]] array")
    profiles = []
    for entry in models:
        if not isinstance(entry, dict):
            raise ParseError(path, 0, "each [[models]] entry must be a table")
        try:
            model_id = entry["id"]
            order = entry["order"]
            table = entry["cost_table"]
        except KeyError as exc:
            raise ParseError(path, 0, f"model entry missing field {exc}") from exc
        if not isinstance(table, dict):
            raise ParseError(path, 0, f"cost_table for {model_id!r} must be a table")
        try:
            cost_table = {int(k): float(v) for k, v in table.items()}
        except (TypeError, ValueError) as exc:
            raise ParseError(
                path, 0, f"cost_table for {model_id!r} has a non-numeric entry"
            ) from exc
        params = entry.get("params")
        profiles.append(ModelProfile.create(model_id, order, cost_table, params))
    return profiles, seq_len, per_instance


def load_bundle(
    instances_path: str | Path,
    prediction_paths: Sequence[str | Path],
    profiles_path: str | Path,
    *,
    per_instance_cost: bool | None = None,
    dataset_seq_len: int | None = None,
) -> EvaluationBundle:
    """Load, join, and validate a full evaluation bundle.

    Prediction files must be ordered cheapest model first, matching the
    profiles' order indices. Keyword overrides take precedence over the
    values in the profiles document.
    """
    profiles, doc_seq_len, doc_per_instance = load_profiles(profiles_path)
    ordered = sorted(profiles, key=lambda p: p.order_index)
    if len(prediction_paths) != len(ordered):
        raise InputError(
            f"{len(prediction_paths)} prediction files for {len(ordered)} "
            "model profiles"
        )
    predictions = {
        prof.model_id: load_predictions(pred_path, prof.model_id)
        for prof, pred_path in zip(ordered, prediction_paths)
    }
    instances = load_instances(instances_path)
    return build_bundle(
        instances,
        predictions,
        ordered,
        dataset_seq_len=dataset_seq_len if dataset_seq_len is not None else doc_seq_len,
        per_instance_cost=(
            per_instance_cost if per_instance_cost is not None else doc_per_instance
        ),
    )


# --- writing ----------------------------------------------------------------


def _toml_string(value: str) -> str:
    return json.dumps(value)  # JSON escaping is valid for TOML basic strings


def format_profiles_doc(
    profiles: Sequence[ModelProfile],
    dataset_seq_len: int | None,
    per_instance_cost: bool,
) -> str:
    lines = []
    if dataset_seq_len is not None:
        lines.append(f"seq_len = {dataset_seq_len}")
    lines.append(f"per_instance_cost = {'true' if per_instance_cost else 'false'}")
    for prof in sorted(profiles, key=lambda p: p.order_index):
        lines.append("")
        lines.append("[[models]]")
        lines.append(f"id = {_toml_string(prof.model_id)}")
        lines.append(f"order = {prof.order_index}")
        if prof.param_count is not None:
            lines.append(f"params = {prof.param_count}")
        lines.append("")
        lines.append("[models.cost_table]")
        for length, cost in prof.cost_table:
            lines.append(f'"{length}" = {cost!r}')
    return "\n".join(lines) + "\n"


def format_instances(instances: Sequence[InstanceRecord]) -> str:
    lines = [
        json.dumps(
            {
                "instance_id": inst.instance_id,
                "gold_label": inst.gold_label,
                "input_length": inst.input_length,
            }
        )
        for inst in instances
    ]
    return "\n".join(lines) + "\n"


def format_predictions(records: Sequence[PredictionRecord]) -> str:
    lines = [
        json.dumps(
            {
                "instance_id": rec.instance_id,
                "distribution": list(rec.distribution),
            }
        )
        for rec in records
    ]
    return "\n".join(lines) + "\n"


def write_bundle(bundle: EvaluationBundle, outdir: str | Path) -> dict[str, Path]:
    """Write a bundle in the exact formats load_bundle reads.

    Returns {logical name: path}. Reloading the written files yields records
    equal to the originals.
    """
    outdir = Path(outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    paths: dict[str, Path] = {}

    instances_path = outdir / "instances.jsonl"
    instances_path.write_text(format_instances(bundle.instances), encoding="utf-8")
    paths["instances"] = instances_path

    for prof in bundle.profiles:
        table = bundle.predictions[prof.model_id]
        records = [table[inst.instance_id] for inst in bundle.instances]
        pred_path = outdir / f"preds_{prof.model_id}.jsonl"
        pred_path.write_text(format_predictions(records), encoding="utf-8")
        paths[f"predictions:{prof.model_id}"] = pred_path

    profiles_path = outdir / "profiles.toml"
    profiles_path.write_text(
        format_profiles_doc(
            bundle.profiles, bundle.dataset_seq_len, bundle.per_instance_cost
        ),
        encoding="utf-8",
    )
    paths["profiles"] = profiles_path
    return paths
