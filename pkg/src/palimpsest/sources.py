"""Reading joint-source files.

A source file is JSON::

    {"alphabet": ["a", "b"],
     "joint": [["1/2", "0"], ["1/4", "1/4"]],
     "storage_alphabet_size": 2}

Entries may be ``"p/q"`` strings (exact) or plain numbers.
"""

from __future__ import annotations

import json
from importlib import resources
from pathlib import Path

from .errors import InputError
from .prob_core import JointSource

BUNDLED = ("typewriter", "editprocess2", "huffman_example")


def parse_source(text: str, origin: str = "<string>") -> JointSource:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise InputError(f"{origin}: line {exc.lineno} column {exc.colno}: {exc.msg}") from exc
    if not isinstance(doc, dict):
        raise InputError(f"{origin}: top level must be an object")
    missing = [k for k in ("alphabet", "joint") if k not in doc]
    if missing:
        raise InputError(f"{origin}: missing key(s) {', '.join(missing)}")
    alphabet = doc["alphabet"]
    joint = doc["joint"]
    if not isinstance(alphabet, list) or not all(isinstance(s, str) and s and " " not in s
                                                 for s in alphabet):
        raise InputError(f"{origin}: alphabet must be a list of non-empty strings without spaces")
    if not isinstance(joint, list) or not all(isinstance(r, list) for r in joint):
        raise InputError(f"{origin}: joint must be a list of rows")
    for r, row in enumerate(joint):
        if len(row) != len(alphabet):
            raise InputError(f"{origin}: joint row {r} has {len(row)} entries, expected {len(alphabet)}")
    try:
        return JointSource(tuple(alphabet), tuple(tuple(r) for r in joint),
                           doc.get("storage_alphabet_size", 2))
    except InputError as exc:
        raise InputError(f"{origin}: {exc}") from exc


def load_source(name_or_path: str | Path) -> JointSource:
    """Load a source from a file path, or by bundled name (``typewriter`` ...)."""
    path = Path(name_or_path)
    if path.exists():
        return parse_source(path.read_text(), str(path))
    stem = str(name_or_path).removesuffix(".json")
    if stem in BUNDLED:
        text = resources.files("palimpsest").joinpath(f"data/{stem}.json").read_text()
        return parse_source(text, f"{stem}.json")
    raise InputError(f"no such source file: {name_or_path}")
