"""Run manifests and atomic artifact writing.

A manifest records everything needed to reproduce a run byte-for-byte: the
subcommand, its fully-resolved options, and SHA-256 digests of every input
and output file. Manifests contain no timestamps, so a rerun produces an
identical manifest as well.
"""

from __future__ import annotations

import hashlib
import json
import os
import tempfile
from pathlib import Path
from typing import Mapping, Sequence

from .errors import InputError

TOOL_NAME = "cascadekit"
MANIFEST_NAME = "manifest.json"


def file_digest(path: str | Path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 20), b""):
            h.update(chunk)
    return f"sha256:{h.hexdigest()}"


def atomic_write_text(path: str | Path, text: str) -> None:
    """Write-temp-then-rename so readers never observe partial files."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.")
    try:
        with os.fdopen(fd, "w", encoding="utf-8") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def json_text(obj) -> str:
    return json.dumps(obj, indent=2) + "\n"


def write_json(path: str | Path, obj) -> None:
    atomic_write_text(path, json_text(obj))


def build_manifest(
    command: str,
    options: Mapping,
    input_paths: Sequence[str | Path],
    output_paths: Sequence[str | Path],
    version: str,
) -> dict:
    return {
        "tool": TOOL_NAME,
        "version": version,
        "command": command,
        "options": dict(options),
        "inputs": {str(p): file_digest(p) for p in input_paths},
        "outputs": {Path(p).name: file_digest(p) for p in output_paths},
    }


def write_manifest(outdir: str | Path, manifest: dict) -> Path:
    path = Path(outdir) / MANIFEST_NAME
    write_json(path, manifest)
    return path


def load_manifest(path: str | Path) -> dict:
    path = Path(path)
    try:
        with open(path, "r", encoding="utf-8") as fh:
            doc = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise InputError(f"cannot read manifest {path}: {exc}") from exc
    for key in ("tool", "command", "options", "inputs"):
        if key not in doc:
            raise InputError(f"manifest {path} missing field {key!r}")
    if doc["tool"] != TOOL_NAME:
        raise InputError(f"manifest {path} was written by {doc['tool']!r}")
    return doc


def check_inputs_unchanged(manifest: dict, manifest_path: str | Path) -> None:
    for path, digest in manifest["inputs"].items():
        if not os.path.exists(path):
            raise InputError(
                f"manifest input {path} no longer exists (from {manifest_path})"
            )
        current = file_digest(path)
        if current != digest:
            raise InputError(
                f"manifest input {path} changed since the recorded run "
                f"({digest} -> {current})"
            )
