"""Deterministic CSV/JSON writers; every file opens with a header block."""

from __future__ import annotations
from collections.abc import Mapping
from dataclasses import dataclass, field
from enum import Enum
import hashlib
import json
import math
from pathlib import Path
from typing import Any

import numpy as np
import pandas as pd

__all__ = [
    "OutputHeader",
    "canonical_json",
    "config_hash",
    "sanitize",
    "write_csv",
    "write_json",
]

TOOL = "hypcount"


def sanitize(value: Any) -> Any:
    """Convert ``value`` into plain JSON types; non-finite floats become ``None``."""
    if isinstance(value, Mapping):
        return {str(key): sanitize(item) for key, item in value.items()}
    if isinstance(value, (list, tuple)):
        return [sanitize(item) for item in value]
    if isinstance(value, np.ndarray):
        return sanitize(value.tolist())
    if isinstance(value, Enum):
        return str(value.value)
    if isinstance(value, Path):
        return value.as_posix()
    if isinstance(value, (bool, np.bool_)):
        return bool(value)
    if isinstance(value, (int, np.integer)):
        return int(value)
    if isinstance(value, (float, np.floating)):
        value = float(value)
        return value if math.isfinite(value) else None
    return value


def canonical_json(value: Any) -> str:
    return json.dumps(sanitize(value), sort_keys=True, separators=(",", ":"), ensure_ascii=False)


def config_hash(config: Mapping[str, Any]) -> str:
    return hashlib.sha256(canonical_json(config).encode("utf-8")).hexdigest()


@dataclass(frozen=True)
class OutputHeader:
    """Provenance shared by all outputs of one run.

    :param partial: Set when the run stopped on an exhausted node budget, so the data are
        incomplete.
    """

    version: str
    config: dict[str, Any]
    certificates: dict[str, Any] = field(default_factory=dict)
    partial: bool = False

    @property
    def config_hash(self) -> str:
        return config_hash(self.config)

    def to_dict(self) -> dict[str, Any]:
        return {
            "tool": TOOL,
            "version": self.version,
            "config_hash": self.config_hash,
            "certificates": sanitize(self.certificates),
            "partial": self.partial,
        }

    def comment_lines(self) -> list[str]:
        lines = [
            f"# tool: {TOOL} {self.version}",
            f"# config_hash: {self.config_hash}",
        ]
        for name, certificate in sorted(self.certificates.items()):
            lines.append(f"# certificate[{name}]: {canonical_json(certificate)}")
        if self.partial:
            lines.append("# partial: node budget exceeded, data incomplete")
        return lines


def write_csv(frame: pd.DataFrame, path: Path, header: OutputHeader) -> Path:
    path.parent.mkdir(parents=True, exist_ok=True)
    body = frame.to_csv(index=False, lineterminator="\n", float_format="%.17g")
    path.write_text("\n".join(header.comment_lines()) + "\n" + body, encoding="utf-8")
    return path


def write_json(payload: Mapping[str, Any], path: Path, header: OutputHeader) -> Path:
    path.parent.mkdir(parents=True, exist_ok=True)
    document = {"header": header.to_dict(), **sanitize(payload)}
    text = json.dumps(document, sort_keys=True, indent=2, ensure_ascii=False)
    path.write_text(text + "\n", encoding="utf-8")
    return path
