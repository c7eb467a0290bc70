"""Per-article extraction flow: prompt -> model -> validation ->
structuring fallback -> salvage, producing a flagged Prediction.

The predictions file format is a JSON array of Prediction objects with
exactly the fields of :class:`Prediction`; it is also the ingestion format
for external baselines.
"""

from __future__ import annotations

import json
import logging
from dataclasses import dataclass
from pathlib import Path

from .corpus import Article, EntityClass, normalize_ws
from .gateway import ChatParams, ChatRequest, LlmGateway, Purpose
from .jsontext import first_array
from .prompts import (
    PromptLibrary,
    PromptVariant,
    render_extraction_prompt,
    render_structuring_prompt,
)

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class Invalid:
    reason: str  # no-json | wrong-key | wrong-value-type | empty-strings | unrecoverable


@dataclass(frozen=True)
class Prediction:
    article_id: str
    entity_class: EntityClass
    entities: tuple[str, ...]
    model_id: str
    variant_label: str
    raw_response: str
    structuring_invoked: bool
    json_error: bool
    salvaged: bool
    latency_s: float

    def __post_init__(self) -> None:
        if self.json_error and not self.structuring_invoked:
            raise ValueError("json_error implies structuring_invoked")
        if self.salvaged and not self.json_error:
            raise ValueError("salvaged implies json_error")


def validate_response(text: str, entity_class: EntityClass) -> list[str] | Invalid:
    """Accept the response iff it is exactly one JSON object whose
    ``individuals``/``organizations`` key holds an array of non-empty
    strings; return that array in order. Never raises."""
    try:
        value = json.loads(text.strip())
    except ValueError:
        return Invalid("no-json")
    if not isinstance(value, dict):
        return Invalid("no-json")
    if entity_class.key not in value:
        return Invalid("wrong-key")
    entities = value[entity_class.key]
    if not isinstance(entities, list) or any(not isinstance(e, str) for e in entities):
        return Invalid("wrong-value-type")
    if any(not e.strip() for e in entities):
        return Invalid("empty-strings")
    return list(entities)


def salvage_parse(text: str, entity_class: EntityClass) -> list[str] | Invalid:
    """Last-resort recovery: the first well-formed JSON array of strings
    embedded anywhere in the text. The entity class does not change the
    scan; it is kept for signature parity with validate_response."""
    found = first_array(text, lambda v: all(isinstance(e, str) for e in v))
    if found is None:
        return Invalid("unrecoverable")
    return list(found)


def dedupe_entities(entities: list[str]) -> tuple[str, ...]:
    """Strip entries, drop empties, and deduplicate under
    trim+collapse-whitespace equality, keeping first occurrences."""
    out: list[str] = []
    seen: set[str] = set()
    for raw in entities:
        entry = raw.strip()
        key = normalize_ws(entry)
        if not key or key in seen:
            continue
        seen.add(key)
        out.append(entry)
    return tuple(out)


def extract_entities(
    article: Article,
    entity_class: EntityClass,
    variant: PromptVariant,
    model_id: str,
    *,
    gateway: LlmGateway,
    library: PromptLibrary,
    structuring_model_id: str,
    params: ChatParams | None = None,
) -> Prediction:
    """Run one article through the full extraction flow for one class."""
    params = params or ChatParams()
    prompt = render_extraction_prompt(article, variant, library)
    exchange = gateway.chat(ChatRequest(model_id, prompt, params, Purpose.EXTRACTION))
    raw = exchange.response_text
    latency = exchange.latency_s

    structuring_invoked = json_error = salvaged = False
    result = validate_response(raw, entity_class)
    entities: list[str]
    if isinstance(result, Invalid):
        structuring_invoked = True
        structured_text = ""
        if raw.strip():
            structuring_prompt = render_structuring_prompt(raw, entity_class, library)
            ex2 = gateway.chat(
                ChatRequest(structuring_model_id, structuring_prompt, params, Purpose.STRUCTURING)
            )
            structured_text = ex2.response_text
            latency += ex2.latency_s
            result = validate_response(structured_text, entity_class)
        # an empty first response leaves nothing to structure; it falls
        # straight through to the error accounting below
        if isinstance(result, Invalid):
            json_error = True
            salvage = salvage_parse(structured_text, entity_class)
            if isinstance(salvage, Invalid):
                salvage = salvage_parse(raw, entity_class)
            if isinstance(salvage, Invalid):
                log.warning(
                    "article %s (%s): unrecoverable response, scoring an empty prediction",
                    article.id,
                    entity_class.value,
                )
                entities = []
            else:
                entities = salvage
                salvaged = True
        else:
            entities = result
    else:
        entities = result

    return Prediction(
        article_id=article.id,
        entity_class=entity_class,
        entities=dedupe_entities(entities),
        model_id=model_id,
        variant_label=variant.label,
        raw_response=raw,
        structuring_invoked=structuring_invoked,
        json_error=json_error,
        salvaged=salvaged,
        latency_s=latency,
    )


def prediction_to_dict(p: Prediction) -> dict:
    return {
        "article_id": p.article_id,
        "entity_class": p.entity_class.value,
        "entities": list(p.entities),
        "model_id": p.model_id,
        "variant_label": p.variant_label,
        "raw_response": p.raw_response,
        "structuring_invoked": p.structuring_invoked,
        "json_error": p.json_error,
        "salvaged": p.salvaged,
        "latency_s": p.latency_s,
    }


def prediction_from_dict(doc: dict, where: str = "prediction") -> Prediction:
    try:
        return Prediction(
            article_id=doc["article_id"],
            entity_class=EntityClass.parse(doc["entity_class"]),
            entities=dedupe_entities([str(e) for e in doc["entities"]]),
            model_id=doc["model_id"],
            variant_label=doc.get("variant_label", "-"),
            raw_response=doc.get("raw_response", ""),
            structuring_invoked=bool(doc.get("structuring_invoked", False)),
            json_error=bool(doc.get("json_error", False)),
            salvaged=bool(doc.get("salvaged", False)),
            latency_s=float(doc.get("latency_s", 0.0)),
        )
    except (KeyError, TypeError, ValueError) as e:
        raise ValueError(f"{where}: malformed prediction record: {e}") from e


def write_predictions(path: str | Path, predictions: list[Prediction]) -> Path:
    p = Path(path)
    p.parent.mkdir(parents=True, exist_ok=True)
    doc = [prediction_to_dict(x) for x in predictions]
    p.write_text(json.dumps(doc, ensure_ascii=False, indent=2) + "\n", encoding="utf-8")
    return p


def read_predictions(path: str | Path) -> list[Prediction]:
    p = Path(path)
    try:
        doc = json.loads(p.read_text(encoding="utf-8"))
    except json.JSONDecodeError as e:
        raise ValueError(f"{p}:{e.lineno}: invalid JSON: {e.msg}") from e
    if not isinstance(doc, list):
        raise ValueError(f"{p}: predictions file must be a JSON array")
    return [prediction_from_dict(item, f"{p}[{i}]") for i, item in enumerate(doc)]
