"""Versioned ``.npz`` containers for trained models."""

from __future__ import annotations

import json
from pathlib import Path
from typing import Mapping

import numpy as np

from triage.errors import DataError

FORMAT_VERSION = 1


def save_bundle(path: str | Path, kind: str, meta: Mapping, arrays: Mapping[str, np.ndarray]) -> None:
    header = {"format_version": FORMAT_VERSION, "kind": kind, **meta}
    with Path(path).open("wb") as fh:
        np.savez_compressed(fh, __meta__=np.array(json.dumps(header, sort_keys=True)), **arrays)


def load_bundle(path: str | Path, kind: str) -> tuple[dict, dict[str, np.ndarray]]:
    try:
        with np.load(Path(path), allow_pickle=False) as npz:
            arrays = {k: npz[k] for k in npz.files}
    except (OSError, ValueError) as exc:
        raise DataError(f"cannot read model bundle {path}: {exc}") from exc
    meta = json.loads(str(arrays.pop("__meta__")))
    if meta.get("format_version") != FORMAT_VERSION:
        raise DataError(f"{path}: unsupported bundle format {meta.get('format_version')!r}")
    if meta.get("kind") != kind:
        raise DataError(f"{path}: expected a {kind} bundle, found {meta.get('kind')!r}")
    return meta, arrays
