"""Report documents: a fixed envelope around each command's payload."""
from __future__ import annotations

import hashlib
import json
from functools import lru_cache
from importlib import resources
from typing import Iterable

from . import __version__

SCHEMA = "tfds-report/1"


@lru_cache(maxsize=None)
def citation_table() -> dict[str, str]:
    text = (resources.files("tfds") / "data" / "citations.json").read_text(encoding="utf-8")
    return json.loads(text)


@lru_cache(maxsize=None)
def report_schema() -> dict:
    text = (resources.files("tfds") / "data" / "report.schema.json").read_text(encoding="utf-8")
    return json.loads(text)


def sha256(data: bytes) -> str:
    return hashlib.sha256(data).hexdigest()


def document(payload: dict, path: str, data: bytes, citations: Iterable[str]) -> dict:
    cites = sorted(set(citations))
    table = citation_table()
    unknown = [c for c in cites if c not in table]
    if unknown:
        raise KeyError(f"citation tags missing from the table: {unknown}")
    return {
        "schema": SCHEMA,
        "version": __version__,
        "input": {"path": path, "sha256": sha256(data)},
        "payload": payload,
        "citations": cites,
    }


def dumps(doc: dict) -> str:
    """Canonical serialization; identical documents give identical bytes."""
    return json.dumps(doc, sort_keys=True, indent=2, ensure_ascii=False) + "\n"


def collect_citations(obj) -> set[str]:
    """Every value stored under a ``citation`` or ``citations`` key, at any depth."""
    out: set[str] = set()
    if isinstance(obj, dict):
        for k, v in obj.items():
            if k == "citation" and isinstance(v, str):
                out.add(v)
            elif k == "citations" and isinstance(v, list):
                out.update(x for x in v if isinstance(x, str))
            else:
                out |= collect_citations(v)
    elif isinstance(obj, list):
        for v in obj:
            out |= collect_citations(v)
    return out
