"""HTTP service for the gold-dataset annotation workflow: serves articles,
proposes pre-annotations, stores human-corrected drafts with optimistic
versioning, runs advisory LLM verification, and exports datasets.

API (JSON in/out, errors as ``{"code", "message"}``)::

    GET  /articles
    GET  /articles/{id}
    GET  /articles/{id}/draft/{class}
    PUT  /articles/{id}/draft/{class}
    POST /articles/{id}/verify/{class}
    POST /export
"""

from __future__ import annotations

import json
import logging
import threading
from dataclasses import dataclass, field
from pathlib import Path
from urllib.parse import quote

from fastapi import FastAPI, Request
from fastapi.responses import JSONResponse
from fastapi.staticfiles import StaticFiles

from . import corpus
from .corpus import Article, EntityClass, GoldRecord, normalize_ws
from .extraction import Prediction
from .gateway import ChatParams, ChatRequest, LlmGateway, Purpose
from .prompts import PromptLibrary, render_verification_prompt

log = logging.getLogger(__name__)

ENTRY_STATUSES = ("proposed", "accepted", "rejected", "added")
ENTRY_SOURCES = ("baseline", "llm", "human")


class ServiceError(Exception):
    def __init__(self, status: int, code: str, message: str):
        super().__init__(message)
        self.status = status
        self.code = code
        self.message = message


@dataclass
class DraftEntry:
    text: str
    status: str
    source: str
    note: str = ""

    def to_dict(self) -> dict:
        return {"text": self.text, "status": self.status, "source": self.source, "note": self.note}


@dataclass
class AnnotationDraft:
    article_id: str
    entity_class: EntityClass
    entries: list[DraftEntry] = field(default_factory=list)
    version: int = 0

    def to_dict(self) -> dict:
        return {
            "article_id": self.article_id,
            "entity_class": self.entity_class.value,
            "version": self.version,
            "entries": [e.to_dict() for e in self.entries],
        }


def _parse_entries(raw: object, where: str) -> list[DraftEntry]:
    if not isinstance(raw, list):
        raise ServiceError(422, "invalid-draft", f"{where}: entries must be a list")
    entries: list[DraftEntry] = []
    for i, item in enumerate(raw):
        if not isinstance(item, dict):
            raise ServiceError(422, "invalid-draft", f"{where}: entries[{i}] must be an object")
        text = item.get("text")
        status = item.get("status")
        source = item.get("source")
        if status not in ENTRY_STATUSES:
            raise ServiceError(422, "invalid-draft", f"{where}: entries[{i}] has bad status {status!r}")
        if source not in ENTRY_SOURCES:
            raise ServiceError(422, "invalid-draft", f"{where}: entries[{i}] has bad source {source!r}")
        if not isinstance(text, str) or (status in ("accepted", "added") and not text.strip()):
            raise ServiceError(
                422, "invalid-draft", f"{where}: entries[{i}] is {status} but has empty text"
            )
        entries.append(DraftEntry(text=text, status=status, source=source, note=str(item.get("note", ""))))
    return entries


class DraftStore:
    """File-per-draft persistence with per-(article, class) write locks and
    optimistic version checks. Every accepted revision is also kept as an
    immutable ``history/`` file, so the store is a full version archive."""

    def __init__(self, directory: str | Path):
        self.directory = Path(directory)
        self.directory.mkdir(parents=True, exist_ok=True)
        (self.directory / "history").mkdir(exist_ok=True)
        self._locks: dict[tuple[str, str], threading.Lock] = {}
        self._locks_guard = threading.Lock()

    def _lock(self, article_id: str, entity_class: EntityClass) -> threading.Lock:
        key = (article_id, entity_class.value)
        with self._locks_guard:
            return self._locks.setdefault(key, threading.Lock())

    def _stem(self, article_id: str, entity_class: EntityClass) -> str:
        return f"{quote(article_id, safe='')}__{entity_class.value}"

    def _path(self, article_id: str, entity_class: EntityClass) -> Path:
        return self.directory / f"{self._stem(article_id, entity_class)}.json"

    def get(self, article_id: str, entity_class: EntityClass) -> AnnotationDraft | None:
        path = self._path(article_id, entity_class)
        if not path.is_file():
            return None
        doc = json.loads(path.read_text(encoding="utf-8"))
        return AnnotationDraft(
            article_id=article_id,
            entity_class=entity_class,
            entries=_parse_entries(doc.get("entries", []), str(path)),
            version=int(doc.get("version", 0)),
        )

    def put(self, article_id: str, entity_class: EntityClass, entries: list[DraftEntry], expected_version: int) -> int:
        """Store a new draft revision; fails on a version conflict, so a
        concurrent edit can never be silently overwritten."""
        with self._lock(article_id, entity_class):
            current = self.get(article_id, entity_class)
            current_version = current.version if current else 0
            if expected_version != current_version:
                raise ServiceError(
                    409,
                    "version-conflict",
                    f"draft for {article_id}/{entity_class.value} is at version "
                    f"{current_version}, request expected {expected_version}",
                )
            new_version = current_version + 1
            path = self._path(article_id, entity_class)
            doc = {"version": new_version, "entries": [e.to_dict() for e in entries]}
            blob = json.dumps(doc, ensure_ascii=False, indent=2) + "\n"
            tmp = path.with_suffix(".tmp")
            tmp.write_text(blob, encoding="utf-8")
            revision = (
                self.directory / "history" / f"{self._stem(article_id, entity_class)}.v{new_version}.json"
            )
            revision.write_text(blob, encoding="utf-8")
            tmp.replace(path)
            return new_version


@dataclass
class ServiceState:
    articles: dict[str, Article]
    order: list[str]
    store: DraftStore
    # None means no pre-annotation source was configured at all; an empty
    # dict is a configured source that proposed nothing
    preannotations: dict[tuple[str, str], list[str]] | None
    preann_source: str
    gateway: LlmGateway | None = None
    library: PromptLibrary | None = None
    verify_model: str = "gemma2:9b"
    chat_params: ChatParams = field(default_factory=ChatParams)


def preannotations_from_predictions(predictions: list[Prediction]) -> dict[tuple[str, str], list[str]]:
    table: dict[tuple[str, str], list[str]] = {}
    for p in predictions:
        table.setdefault((p.article_id, p.entity_class.value), []).extend(p.entities)
    return table


def _article_or_404(state: ServiceState, article_id: str) -> Article:
    article = state.articles.get(article_id)
    if article is None:
        raise ServiceError(404, "unknown-article", f"no article with id {article_id!r}")
    return article


def _class_or_422(entity_class: str) -> EntityClass:
    try:
        return EntityClass.parse(entity_class)
    except ValueError as e:
        raise ServiceError(422, "unknown-class", str(e)) from e


def get_preannotations(state: ServiceState, article_id: str, entity_class: EntityClass) -> AnnotationDraft:
    """A fresh draft proposing the configured source's entities; version 0
    (nothing stored yet)."""
    _article_or_404(state, article_id)
    if state.preannotations is None:
        raise ServiceError(409, "no-preannotation-source", "no pre-annotation source configured")
    proposals = state.preannotations.get((article_id, entity_class.value), [])
    entries = [DraftEntry(text=t, status="proposed", source=state.preann_source) for t in proposals]
    return AnnotationDraft(article_id=article_id, entity_class=entity_class, entries=entries, version=0)


def verify_entries(state: ServiceState, article_id: str, entity_class: EntityClass) -> list[dict]:
    """Advisory LLM check of each accepted/added entry; never mutates the
    stored draft."""
    article = _article_or_404(state, article_id)
    draft = state.store.get(article_id, entity_class)
    if draft is None:
        raise ServiceError(404, "no-draft", f"nothing saved yet for {article_id}/{entity_class.value}")
    if state.gateway is None:
        raise ServiceError(409, "no-gateway", "verification needs a configured model gateway")
    verdicts: list[dict] = []
    for entry in draft.entries:
        if entry.status not in ("accepted", "added"):
            continue
        prompt = render_verification_prompt(article, entry.text, entity_class, state.library)
        exchange = state.gateway.chat(
            ChatRequest(state.verify_model, prompt, state.chat_params, Purpose.VERIFICATION)
        )
        verdicts.append({"entry": entry.text, **_parse_verdict(exchange.response_text)})
    return verdicts


def _parse_verdict(text: str) -> dict:
    try:
        doc = json.loads(text.strip())
        verdict = doc.get("verdict")
        if verdict in ("confirm", "flag"):
            return {"verdict": verdict, "note": str(doc.get("note", ""))}
    except ValueError:
        pass
    return {"verdict": "flag", "note": "unparseable verification response"}


def export_gold(state: ServiceState, dataset_name: str) -> dict:
    """Build the dataset document from stored drafts (accepted + added
    entries become gold lists). Every article needs a saved draft for both
    classes; an empty organizations list is a legitimate review outcome."""
    unreviewed: list[str] = []
    gold: list[GoldRecord] = []
    for article_id in state.order:
        lists: dict[str, tuple[str, ...]] = {}
        for entity_class in EntityClass:
            draft = state.store.get(article_id, entity_class)
            if draft is None:
                unreviewed.append(article_id)
                break
            entries: list[str] = []
            seen: set[str] = set()
            for entry in draft.entries:
                if entry.status not in ("accepted", "added"):
                    continue
                text = normalize_ws(entry.text)
                if text and text not in seen:
                    seen.add(text)
                    entries.append(text)
            lists[entity_class.key] = tuple(entries)
        else:
            gold.append(
                GoldRecord(
                    article_id=article_id,
                    individuals=lists[EntityClass.INDIVIDUAL.key],
                    organizations=lists[EntityClass.ORGANIZATION.key],
                )
            )
    if unreviewed:
        raise ServiceError(
            409, "unreviewed-articles", "articles without saved drafts: " + ", ".join(unreviewed)
        )
    articles = [state.articles[i] for i in state.order]
    doc = corpus.dataset_document(articles, gold)
    exports = state.store.directory / "exports"
    exports.mkdir(parents=True, exist_ok=True)
    out = exports / f"{quote(dataset_name, safe='')}.json"
    out.write_text(json.dumps(doc, ensure_ascii=False, indent=2) + "\n", encoding="utf-8")
    log.info("exported dataset %r to %s", dataset_name, out)
    return doc


def create_app(
    articles: list[Article],
    store_dir: str | Path,
    *,
    preannotations: dict[tuple[str, str], list[str]] | None = None,
    preann_source: str = "baseline",
    gateway: LlmGateway | None = None,
    library: PromptLibrary | None = None,
    verify_model: str = "gemma2:9b",
    chat_params: ChatParams | None = None,
    ui_dir: str | Path | None = None,
) -> FastAPI:
    state = ServiceState(
        articles={a.id: a for a in articles},
        order=[a.id for a in articles],
        store=DraftStore(store_dir),
        preannotations=preannotations,
        preann_source=preann_source,
        gateway=gateway,
        library=library or PromptLibrary(),
        verify_model=verify_model,
        chat_params=chat_params or ChatParams(),
    )
    app = FastAPI(title="fcner annotation service")
    app.state.fcner = state

    @app.exception_handler(ServiceError)
    async def service_error(_request: Request, exc: ServiceError):
        return JSONResponse(status_code=exc.status, content={"code": exc.code, "message": exc.message})

    def article_payload(a: Article) -> dict:
        return {
            "id": a.id,
            "title": a.title,
            "body": a.body,
            "case_label": a.case_label,
            "language": a.language,
        }

    @app.get("/articles")
    def list_articles():
        return [article_payload(state.articles[i]) for i in state.order]

    @app.get("/articles/{article_id}")
    def get_article(article_id: str):
        return article_payload(_article_or_404(state, article_id))

    @app.get("/articles/{article_id}/draft/{entity_class}")
    def get_draft(article_id: str, entity_class: str):
        cls = _class_or_422(entity_class)
        _article_or_404(state, article_id)
        stored = state.store.get(article_id, cls)
        if stored is not None:
            return stored.to_dict()
        return get_preannotations(state, article_id, cls).to_dict()

    @app.put("/articles/{article_id}/draft/{entity_class}")
    async def put_draft(article_id: str, entity_class: str, request: Request):
        cls = _class_or_422(entity_class)
        _article_or_404(state, article_id)
        try:
            body = await request.json()
        except json.JSONDecodeError as e:
            raise ServiceError(400, "invalid-json", f"request body is not JSON: {e.msg}") from e
        if not isinstance(body, dict) or not isinstance(body.get("version"), int):
            raise ServiceError(422, "invalid-draft", "body must carry an integer 'version'")
        entries = _parse_entries(body.get("entries", []), f"{article_id}/{cls.value}")
        version = state.store.put(article_id, cls, entries, body["version"])
        return {"version": version}

    @app.post("/articles/{article_id}/verify/{entity_class}")
    def post_verify(article_id: str, entity_class: str):
        cls = _class_or_422(entity_class)
        return {"verdicts": verify_entries(state, article_id, cls)}

    @app.post("/export")
    async def post_export(request: Request):
        try:
            body = await request.json()
        except json.JSONDecodeError:
            body = {}
        name = body.get("dataset_name") if isinstance(body, dict) else None
        if not name or not isinstance(name, str):
            raise ServiceError(422, "invalid-export", "body must carry a non-empty 'dataset_name'")
        return export_gold(state, name)

    if ui_dir and Path(ui_dir).is_dir():
        app.mount("/", StaticFiles(directory=str(ui_dir), html=True), name="ui")

    return app
