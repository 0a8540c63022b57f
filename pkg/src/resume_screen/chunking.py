"""Sliding-window document chunking for embedding.

Character-count windows with configurable overlap. A window prefers to end
on a paragraph break, then a sentence end, searching back at most 15% of the
window size; otherwise it cuts at the raw position. Chunks always cover the
whole body and consecutive chunks overlap by about the configured amount.
"""

from __future__ import annotations

import re

# Within the lookback window, a paragraph break beats a sentence end.
_PARAGRAPH_BREAK = re.compile(r"\n\s*\n")
_SENTENCE_END = re.compile(r"[.!?](?=\s)")
_LOOKBACK_FRACTION = 0.15


def chunk_spans(body: str, chunk_size: int, overlap: int) -> list[tuple[int, int]]:
    """Compute (start, end) spans tiling ``body``.

    Invariants: spans cover [0, len(body)), each span is at most
    ``chunk_size`` long, and the next span starts ``overlap`` characters
    before the previous end (clamped so progress is always made).
    """
    if chunk_size < 1:
        raise ValueError(f"chunk_size must be positive, got {chunk_size}")
    if not 0 <= overlap < chunk_size:
        raise ValueError(f"overlap must be in [0, chunk_size), got {overlap}")
    length = len(body)
    if length == 0:
        return []

    spans: list[tuple[int, int]] = []
    lookback = int(chunk_size * _LOOKBACK_FRACTION)
    start = 0
    while True:
        raw_end = start + chunk_size
        if raw_end >= length:
            spans.append((start, length))
            break
        end = _preferred_cut(body, raw_end, lookback, start)
        spans.append((start, end))
        if end >= length:
            break
        # Clamp keeps the loop advancing even when overlap nearly equals the
        # realized chunk length (boundary snapping can shorten a chunk).
        start = max(end - overlap, start + 1)
    return spans


def _preferred_cut(body: str, raw_end: int, lookback: int, start: int) -> int:
    """Pick the cut position for a window ending at ``raw_end``.

    Searches ``body[raw_end - lookback : raw_end]`` for the rightmost
    paragraph break, then the rightmost sentence end. The cut lands just
    after the match so separators stay with the left chunk. Falls back to
    ``raw_end`` when no boundary is found or the cut would not advance.
    """
    window_start = max(raw_end - lookback, start + 1)
    window = body[window_start:raw_end]
    for pattern in (_PARAGRAPH_BREAK, _SENTENCE_END):
        cut = None
        for match in pattern.finditer(window):
            cut = window_start + match.end()
        if cut is not None and cut > start:
            return cut
    return raw_end
