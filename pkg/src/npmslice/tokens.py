"""Approximate code tokenizer and an adapter for external tokenizer commands."""

from __future__ import annotations

import re
import shlex
import subprocess

TOKEN_RE = re.compile(r"[A-Za-z0-9_]+|[^\sA-Za-z0-9_]")


class ExternalTokenizerFailed(RuntimeError):
    pass


def token_spans(text: str) -> list[tuple[int, int]]:
    """(start, end) character offsets of approx-mode tokens."""
    return [m.span() for m in TOKEN_RE.finditer(text)]


def tokenize(text: str) -> list[str]:
    return TOKEN_RE.findall(text)


def count_tokens(text: str, mode: str = "approx", command: str | None = None,
                 timeout: float = 60.0) -> int:
    """Count tokens in approx mode or by piping text into an external command.

    The external command reads the text on stdin and prints a single integer.
    """
    if mode == "approx":
        return sum(1 for _ in TOKEN_RE.finditer(text))
    if mode != "external":
        raise ValueError(f"unknown token mode {mode!r}")
    if not command:
        raise ExternalTokenizerFailed("external mode needs a tokenizer command")
    try:
        proc = subprocess.run(
            shlex.split(command), input=text.encode("utf-8"), capture_output=True,
            timeout=timeout, check=False,
        )
    except (OSError, subprocess.TimeoutExpired) as exc:
        raise ExternalTokenizerFailed(str(exc)) from exc
    if proc.returncode != 0:
        raise ExternalTokenizerFailed(proc.stderr.decode("utf-8", "replace").strip() or
                                      f"exit status {proc.returncode}")
    try:
        return int(proc.stdout.decode("utf-8").strip())
    except ValueError as exc:
        raise ExternalTokenizerFailed(f"unparseable count {proc.stdout[:40]!r}") from exc


def split_chunks(n_tokens: int, limit: int) -> list[tuple[int, int]]:
    """Greedy consecutive [start, end) token ranges of at most ``limit`` tokens."""
    if limit <= 0:
        raise ValueError("chunk limit must be positive")
    return [(i, min(i + limit, n_tokens)) for i in range(0, n_tokens, limit)]
