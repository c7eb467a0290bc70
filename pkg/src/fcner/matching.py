"""Alignment of semantically identical mentions between a gold list and a
prediction, and renaming of matched predictions to their gold spelling.

Matching is evaluation-side only: it consumes the gold list, so its output
must never flow back into anything reported as model capability. Renamed
lists exist solely as scoring input.
"""

from __future__ import annotations

import logging
import string
from dataclasses import dataclass

from .corpus import normalize_ws
from .gateway import ChatParams, ChatRequest, LlmGateway, Purpose
from .jsontext import first_array
from .prompts import PromptLibrary, render_matching_prompt

log = logging.getLogger(__name__)


class MatchContractError(ValueError):
    """A match pair references an element absent from the prediction."""


@dataclass(frozen=True)
class MatchResult:
    """Positionally corresponding matched elements: list1[i] (gold spelling)
    pairs with list2[i] (predicted spelling)."""

    list1: tuple[str, ...]
    list2: tuple[str, ...]
    provenance: str  # "llm" | "oracle"

    def __post_init__(self) -> None:
        if len(self.list1) != len(self.list2):
            raise ValueError("list1 and list2 must have equal length")
        if len(set(self.list1)) != len(self.list1) or len(set(self.list2)) != len(self.list2):
            raise ValueError("match pairing must be one-to-one")

    def __len__(self) -> int:
        return len(self.list1)

    @property
    def pairs(self) -> list[list[str]]:
        return [[g, p] for g, p in zip(self.list1, self.list2)]


def empty_match(provenance: str = "llm") -> MatchResult:
    return MatchResult((), (), provenance)


def _filter_pairs(
    raw_pairs: list[tuple[str, str]], gold: list[str] | tuple[str, ...], pred: list[str] | tuple[str, ...]
) -> tuple[tuple[str, ...], tuple[str, ...]]:
    """Validity filter: both sides must be members of their lists, each
    element used at most once (first pair wins), and a pair may not claim
    that one gold entity "is" a different gold entity - gold entries are
    distinct by construction, and renaming across them would destroy an
    exact match."""
    gold_set = set(gold)
    pred_set = set(pred)
    used1: set[str] = set()
    used2: set[str] = set()
    list1: list[str] = []
    list2: list[str] = []
    for g, p in raw_pairs:
        if g not in gold_set or p not in pred_set:
            continue
        if p in gold_set and p != g:
            continue
        if g in used1 or p in used2:
            continue
        used1.add(g)
        used2.add(p)
        list1.append(g)
        list2.append(p)
    return tuple(list1), tuple(list2)


def parse_match_output(
    text: str, gold: list[str] | tuple[str, ...], pred: list[str] | tuple[str, ...]
) -> MatchResult:
    """Best-effort parse of a matching response: the first JSON array of
    two-string pairs anywhere in the text, run through the validity filter.
    Unparseable text yields an empty result with a logged warning."""
    found = first_array(
        text,
        lambda v: all(
            isinstance(e, list) and len(e) == 2 and all(isinstance(s, str) for s in e) for e in v
        ),
    )
    if found is None:
        log.warning("matching response had no parseable pairs array: %.120r", text)
        return empty_match("llm")
    raw_pairs = [(g.strip(), p.strip()) for g, p in found]
    list1, list2 = _filter_pairs(raw_pairs, gold, pred)
    return MatchResult(list1, list2, "llm")


def llm_match(
    gold: list[str] | tuple[str, ...],
    pred: list[str] | tuple[str, ...],
    model_id: str,
    *,
    gateway: LlmGateway,
    library: PromptLibrary,
    params: ChatParams | None = None,
) -> MatchResult:
    """Ask the matching model to pair the two lists. Either list empty means
    nothing can match, so the model is not called."""
    if not gold or not pred:
        return empty_match("llm")
    prompt = render_matching_prompt(gold, pred, library)
    exchange = gateway.chat(ChatRequest(model_id, prompt, params or ChatParams(), Purpose.MATCHING))
    return parse_match_output(exchange.response_text, gold, pred)


_TRAILING_PUNCT = string.punctuation


def match_norm(text: str) -> str:
    """Normalization for oracle matching: trim, collapse whitespace, strip
    trailing punctuation, casefold."""
    return normalize_ws(text).rstrip(_TRAILING_PUNCT).casefold()


def oracle_match(
    gold: list[str] | tuple[str, ...], pred: list[str] | tuple[str, ...]
) -> MatchResult:
    """Deterministic fallback matcher: pair elements equal under
    ``match_norm``, greedy in gold order, first unused prediction wins."""
    used: set[int] = set()
    list1: list[str] = []
    list2: list[str] = []
    for g in gold:
        gn = match_norm(g)
        for j, p in enumerate(pred):
            if j in used:
                continue
            if match_norm(p) == gn:
                used.add(j)
                list1.append(g)
                list2.append(p)
                break
    return MatchResult(*_filter_pairs(list(zip(list1, list2)), gold, pred), "oracle")


def rename(pred: list[str] | tuple[str, ...], match: MatchResult) -> tuple[str, ...]:
    """Rewrite matched predictions to the gold spelling and deduplicate.

    A pair whose predicted side is absent but whose gold side is already
    present is treated as already renamed (this makes rename idempotent);
    a pair with neither side present violates the contract.
    """
    out = list(pred)
    renamed = [False] * len(out)
    for g, p in zip(match.list1, match.list2):
        for j, entry in enumerate(out):
            if not renamed[j] and entry == p:
                out[j] = g
                renamed[j] = True
                break
        else:
            if g in out:
                continue
            raise MatchContractError(f"match pair references {p!r}, absent from the prediction")
    deduped: list[str] = []
    seen: set[str] = set()
    for entry in out:
        key = normalize_ws(entry)
        if key in seen:
            continue
        seen.add(key)
        deduped.append(entry)
    return tuple(deduped)
