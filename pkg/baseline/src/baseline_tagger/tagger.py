"""Batch tagging: dataset file in, predictions file out.

The output is the workbench's predictions file format (a JSON array of
per-article, per-class records), so it feeds straight into
``fcner ingest-baseline``. Entity content is deterministic for a pinned
pipeline; measured wall-clock timing goes to a sidecar ``<out>.meta.json``
so the predictions file itself is byte-stable across runs.
"""

from __future__ import annotations

import json
import time
from dataclasses import dataclass, field
from pathlib import Path

from .pipeline import DEFAULT_PIPELINE, load_pipeline


@dataclass(frozen=True)
class BaselineRun:
    dataset: str
    out: str
    model: str = DEFAULT_PIPELINE
    label_map: dict = field(
        default_factory=lambda: {"PERSON": "individuals", "ORG": "organizations"}
    )


def _load_articles(path: str | Path) -> list[dict]:
    doc = json.loads(Path(path).read_text(encoding="utf-8"))
    if not isinstance(doc, dict) or "articles" not in doc:
        raise ValueError(f"{path}: not a dataset file (missing 'articles')")
    articles = doc["articles"]
    for i, a in enumerate(articles):
        if not isinstance(a.get("id"), str) or not isinstance(a.get("body"), str):
            raise ValueError(f"{path}: articles[{i}] lacks id/body")
    return articles


def _record(article_id: str, entity_class: str, entities: list[str], model: str) -> dict:
    return {
        "article_id": article_id,
        "entity_class": entity_class,
        "entities": entities,
        "model_id": model,
        "variant_label": "-",
        "raw_response": "",
        "structuring_invoked": False,
        "json_error": False,
        "salvaged": False,
        "latency_s": 0.0,
    }


def tag_corpus(run: BaselineRun) -> Path:
    articles = _load_articles(run.dataset)
    tagger, version = load_pipeline(run.model)

    records: list[dict] = []
    started = time.perf_counter()
    for article in articles:
        found = tagger(article["body"])
        records.append(_record(article["id"], "individual", found["individuals"], run.model))
        records.append(_record(article["id"], "organization", found["organizations"], run.model))
    elapsed = time.perf_counter() - started

    out = Path(run.out)
    out.parent.mkdir(parents=True, exist_ok=True)
    out.write_text(json.dumps(records, ensure_ascii=False, indent=2) + "\n", encoding="utf-8")
    meta = {
        "pipeline": run.model,
        "pipeline_version": version,
        "articles": len(articles),
        "wall_clock_s": round(elapsed, 3),
    }
    out.with_suffix(".meta.json").write_text(
        json.dumps(meta, indent=2) + "\n", encoding="utf-8"
    )
    return out
