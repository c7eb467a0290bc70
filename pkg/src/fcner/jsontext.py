"""Scanning for JSON values embedded in free-form model output."""

from __future__ import annotations

import json
from typing import Callable

_decoder = json.JSONDecoder()


def iter_json_arrays(text: str):
    """Yield (start_index, value) for every well-formed JSON array whose
    opening bracket is not inside an earlier yielded array."""
    i = 0
    n = len(text)
    while i < n:
        if text[i] == "[":
            try:
                value, end = _decoder.raw_decode(text, i)
            except ValueError:
                i += 1
                continue
            if isinstance(value, list):
                yield i, value
                i = end
                continue
        i += 1


def first_array(text: str, accept: Callable[[list], bool]) -> list | None:
    """Leftmost well-formed JSON array in ``text`` satisfying ``accept``.

    Rejected arrays are re-scanned from inside, so an acceptable inner
    array nested in a rejected outer one is still found.
    """
    i = 0
    n = len(text)
    while i < n:
        if text[i] == "[":
            try:
                value, _ = _decoder.raw_decode(text, i)
            except ValueError:
                value = None
            if isinstance(value, list) and accept(value):
                return value
        i += 1
    return None
