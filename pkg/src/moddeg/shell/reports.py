"""JSON reports with a reproducibility header.

Every report records the command, its parameters and a SHA-256 over the
input files, and is serialized with sorted keys so reruns are byte-identical.
"""

from __future__ import annotations

import hashlib
import json
from collections import Counter
from functools import lru_cache
from pathlib import Path
from typing import Iterable, Optional

import jsonschema

from .. import __version__

FORMAT = "moddeg-report/1"
VERDICTS = ("pass", "fail", "inapplicable", "needs-data")
SCHEMA_PATH = Path(__file__).resolve().parent / "report.schema.json"


@lru_cache(maxsize=1)
def schema() -> dict:
    return json.loads(SCHEMA_PATH.read_text())


def input_hash(paths: Iterable[Path | str] = (), extra: bytes = b"") -> str:
    h = hashlib.sha256()
    for p in paths:
        data = Path(p).read_bytes()
        h.update(len(data).to_bytes(8, "big"))
        h.update(data)
    h.update(extra)
    return h.hexdigest()


def make_report(
    command: str,
    parameters: dict,
    results: list[dict],
    inputs: Iterable[Path | str] = (),
    digest: Optional[str] = None,
) -> dict:
    counts = Counter(r.get("verdict") for r in results)
    report = {
        "format": FORMAT,
        "version": __version__,
        "command": command,
        "parameters": parameters,
        "input_hash": digest or input_hash(inputs, json.dumps(parameters, sort_keys=True).encode()),
        "summary": {v: counts.get(v, 0) for v in VERDICTS},
        "results": results,
    }
    validate(report)
    return report


def validate(report: dict) -> None:
    """Raise jsonschema.ValidationError if the report is malformed."""
    jsonschema.validate(report, schema())


def dumps(report: dict) -> str:
    return json.dumps(report, sort_keys=True, indent=2, allow_nan=False) + "\n"


def failures(report: dict) -> int:
    return report["summary"]["fail"]
