"""Frozen-set text files.

Format: line 1 holds ``n k``; line 2 holds the n-k frozen indices, sorted
ascending and separated by spaces.  Blank trailing lines are allowed.
"""
from __future__ import annotations

import os

from .transform import CodeSpec


class FrozenFileError(ValueError):
    """Malformed frozen-set file; the message starts with ``source:line:column``."""

    def __init__(self, source: str, line: int, col: int, msg: str):
        super().__init__(f"{source}:{line}:{col}: {msg}")
        self.source, self.line, self.col = source, line, col


def _tokens(text: str):
    """(column, token) pairs of a line, 1-based columns."""
    col = 0
    for tok in text.split():
        col = text.index(tok, col)
        yield col + 1, tok
        col += len(tok)


def _int(source, line, col, tok, what):
    try:
        return int(tok)
    except ValueError:
        raise FrozenFileError(source, line, col, f"{what} must be an integer, got {tok!r}") from None


def parse_frozen(text: str, source: str = "<string>") -> CodeSpec:
    lines = text.splitlines()
    while lines and not lines[-1].strip():
        lines.pop()
    if not lines:
        raise FrozenFileError(source, 1, 1, "empty file")
    head = list(_tokens(lines[0]))
    if len(head) != 2:
        raise FrozenFileError(source, 1, 1, f"expected 'n k', got {len(head)} fields")
    n = _int(source, 1, head[0][0], head[0][1], "n")
    k = _int(source, 1, head[1][0], head[1][1], "k")
    if n < 2 or n & (n - 1):
        raise FrozenFileError(source, 1, head[0][0], f"n must be a power of two >= 2, got {n}")
    if not 0 <= k <= n:
        raise FrozenFileError(source, 1, head[1][0], f"k must lie in [0, {n}], got {k}")
    if len(lines) > 2:
        raise FrozenFileError(source, 3, 1, "unexpected extra line")
    body = list(_tokens(lines[1])) if len(lines) > 1 else []
    frozen = []
    for col, tok in body:
        v = _int(source, 2, col, tok, "frozen index")
        if not 0 <= v < n:
            raise FrozenFileError(source, 2, col, f"index {v} out of range [0, {n})")
        if frozen and v <= frozen[-1]:
            raise FrozenFileError(source, 2, col, f"index {v} is not greater than {frozen[-1]}")
        frozen.append(v)
    if len(frozen) != n - k:
        col = body[-1][0] if body else 1
        raise FrozenFileError(source, 2, col, f"expected {n - k} frozen indices, got {len(frozen)}")
    return CodeSpec(n, tuple(frozen))


def format_frozen(spec: CodeSpec) -> str:
    return f"{spec.n} {spec.k}\n{' '.join(map(str, spec.frozen))}\n"


def read_frozen(path) -> CodeSpec:
    with open(path, encoding="utf-8") as fh:
        return parse_frozen(fh.read(), os.fspath(path))


def write_frozen(path, spec: CodeSpec):
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(format_frozen(spec))
