"""Edit distances on storage strings.

Storage strings are plain tuples of integer symbols ``0..|V|-1``; the
distance routines also accept any sequence of hashables (``str`` works), which
is handy for testing against textbook examples.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from .errors import InputError

KINDS = ("hamming", "extended_hamming", "levenshtein")

StorageString = tuple


def length(a: Sequence) -> int:
    return len(a)


def parse_string(text: str, alphabet_size: int = 2) -> StorageString:
    """``"0110"`` -> ``(0, 1, 1, 0)``; dot-separated form for alphabets above 10."""
    if text == "":
        return ()
    parts = text.split(".") if "." in text or alphabet_size > 10 else list(text)
    try:
        symbols = tuple(int(p) for p in parts)
    except ValueError as exc:
        raise InputError(f"bad storage string {text!r}") from exc
    if any(not 0 <= s < alphabet_size for s in symbols):
        raise InputError(f"storage string {text!r} has symbols outside 0..{alphabet_size - 1}")
    return symbols


def format_string(a: Sequence[int], alphabet_size: int = 2) -> str:
    if alphabet_size > 10:
        return ".".join(str(s) for s in a)
    return "".join(str(s) for s in a)


def hamming(a: Sequence, b: Sequence) -> int:
    if len(a) != len(b):
        raise InputError(f"Hamming distance needs equal lengths, got {len(a)} and {len(b)}")
    return sum(1 for x, y in zip(a, b) if x != y)


def extended_hamming(a: Sequence, b: Sequence) -> int:
    # substitutions on the common prefix plus one unit per extra symbol
    return sum(1 for x, y in zip(a, b) if x != y) + abs(len(a) - len(b))


def levenshtein(a: Sequence, b: Sequence) -> int:
    if len(a) < len(b):
        a, b = b, a
    prev = list(range(len(b) + 1))
    for i, x in enumerate(a, 1):
        cur = [i]
        for j, y in enumerate(b, 1):
            cur.append(min(prev[j] + 1, cur[j - 1] + 1, prev[j - 1] + (x != y)))
        prev = cur
    return prev[-1]


_FUNCS = {
    "hamming": hamming,
    "extended_hamming": extended_hamming,
    "levenshtein": levenshtein,
}


@dataclass(frozen=True)
class EditMetric:
    kind: str = "levenshtein"
    alphabet_size: int = 2

    def __post_init__(self):
        if self.kind not in KINDS:
            raise InputError(f"unknown metric {self.kind!r}; choose from {', '.join(KINDS)}")
        if self.alphabet_size < 2:
            raise InputError("alphabet_size must be >= 2")

    def __call__(self, a: Sequence, b: Sequence) -> int:
        return _FUNCS[self.kind](a, b)


def distance(m: EditMetric, a: Sequence, b: Sequence) -> int:
    for s in (a, b):
        if s and isinstance(s[0], int) and any(not 0 <= v < m.alphabet_size for v in s):
            raise InputError(f"string {s!r} has symbols outside the alphabet of size {m.alphabet_size}")
    return m(a, b)
