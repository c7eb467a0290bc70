"""Benchmark data model: articles, gold annotations, dataset files, corpus statistics.

The dataset file format is a single JSON document::

    {"articles": [{"id", "title", "body", "case_label", "language"}, ...],
     "gold": [{"article_id", "individuals": [...], "organizations": [...]}, ...]}

UTF-8, no BOM. ``load_dataset`` also accepts a flat export layout (a JSON
array of per-article objects carrying the text and both gold lists) via an
import shim, see ``_load_flat_layout``.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from enum import Enum
from pathlib import Path


class DatasetError(ValueError):
    """Malformed or internally inconsistent dataset file."""


class EntityClass(Enum):
    INDIVIDUAL = "individual"
    ORGANIZATION = "organization"

    @property
    def key(self) -> str:
        """Key naming this class in JSON payloads and gold records."""
        return "individuals" if self is EntityClass.INDIVIDUAL else "organizations"

    @property
    def label(self) -> str:
        """Human-readable plural, used in prompt text."""
        return "individuals (persons)" if self is EntityClass.INDIVIDUAL else "organizations"

    @classmethod
    def parse(cls, text: str) -> "EntityClass":
        t = text.strip().lower()
        for ec in cls:
            if t in (ec.value, ec.key):
                return ec
        raise ValueError(f"unknown entity class: {text!r}")


@dataclass(frozen=True)
class Article:
    id: str
    body: str
    title: str | None = None
    case_label: str | None = None
    language: str = "en"


@dataclass(frozen=True)
class GoldRecord:
    article_id: str
    individuals: tuple[str, ...]
    organizations: tuple[str, ...]

    def entities(self, entity_class: EntityClass) -> tuple[str, ...]:
        if entity_class is EntityClass.INDIVIDUAL:
            return self.individuals
        return self.organizations


@dataclass(frozen=True)
class CorpusStats:
    article_count: int
    sentence_count: int
    word_count: int
    char_count: int
    avg_sentence_len_words: float


def normalize_ws(text: str) -> str:
    """Trim and collapse internal whitespace runs to single spaces."""
    return " ".join(text.split())


# Mapping table M1: characters replaced before a body is embedded in JSON.
# Curly quotes and dashes get ASCII equivalents, NBSP becomes a plain space,
# LF/CR/TAB become their visible backslash escapes. Remaining control
# characters carry no content and are dropped.
_M1 = {
    "“": '"',
    "”": '"',
    "‘": "'",
    "’": "'",
    "–": "-",
    "—": "-",
    " ": " ",
    "\n": "\\n",
    "\r": "\\r",
    "\t": "\\t",
}


def preprocess_text(raw: str) -> str:
    """Make ``raw`` safe to embed as a JSON string value. Idempotent."""
    out = []
    for ch in raw:
        if ch in _M1:
            out.append(_M1[ch])
        elif ch < " " or ch == "\x7f":
            continue
        else:
            out.append(ch)
    return "".join(out)


_SENTENCE_ENDERS = frozenset(".!?")


def count_sentences(text: str) -> int:
    """Sentences per the reference tokenizer: a maximal segment ended by
    '.', '!' or '?' followed by whitespace or end of text.

    Abbreviation-blind by design ("U.S. officials" counts a boundary); the
    corpus statistics this feeds are documented as approximate.
    """
    n = 0
    last = len(text) - 1
    for i, ch in enumerate(text):
        if ch in _SENTENCE_ENDERS and (i == last or text[i + 1].isspace()):
            n += 1
    return n


def count_words(text: str) -> int:
    """Words per the reference tokenizer: maximal runs of non-whitespace."""
    return len(text.split())


def compute_stats(articles: list[Article]) -> CorpusStats:
    """Corpus statistics over article bodies (titles excluded)."""
    sentences = words = chars = 0
    for a in articles:
        sentences += count_sentences(a.body)
        words += count_words(a.body)
        chars += len(a.body)
    avg = round(words / sentences, 1) if sentences else 0.0
    return CorpusStats(
        article_count=len(articles),
        sentence_count=sentences,
        word_count=words,
        char_count=chars,
        avg_sentence_len_words=avg,
    )


def _clean_gold_list(raw: object, where: str) -> tuple[str, ...]:
    if not isinstance(raw, list):
        raise DatasetError(f"{where}: expected a list, got {type(raw).__name__}")
    entries: list[str] = []
    seen: set[str] = set()
    for i, item in enumerate(raw):
        if not isinstance(item, str):
            raise DatasetError(f"{where}[{i}]: expected a string, got {type(item).__name__}")
        entry = normalize_ws(item)
        if not entry:
            raise DatasetError(f"{where}[{i}]: empty entry")
        if entry in seen:
            raise DatasetError(f"{where}[{i}]: duplicate entry {entry!r}")
        seen.add(entry)
        entries.append(entry)
    return tuple(entries)


def _build_article(raw: dict, where: str) -> Article:
    if not isinstance(raw.get("id"), str) or not raw["id"]:
        raise DatasetError(f"{where}: missing or empty article id")
    body = raw.get("body")
    if not isinstance(body, str) or not body.strip():
        raise DatasetError(f"{where} (id {raw['id']!r}): body missing or empty")
    title = raw.get("title")
    case_label = raw.get("case_label")
    return Article(
        id=raw["id"],
        body=preprocess_text(body),
        title=title if isinstance(title, str) else None,
        case_label=case_label if isinstance(case_label, str) else None,
        language=raw.get("language") or "en",
    )


def _load_native_layout(doc: dict, path: Path) -> tuple[list[Article], list[GoldRecord]]:
    articles: list[Article] = []
    ids: set[str] = set()
    for i, raw in enumerate(doc.get("articles", [])):
        article = _build_article(raw, f"{path}: articles[{i}]")
        if article.id in ids:
            raise DatasetError(f"{path}: articles[{i}]: duplicate article id {article.id!r}")
        ids.add(article.id)
        articles.append(article)

    gold: list[GoldRecord] = []
    for i, raw in enumerate(doc.get("gold", [])):
        where = f"{path}: gold[{i}]"
        article_id = raw.get("article_id")
        if not isinstance(article_id, str):
            raise DatasetError(f"{where}: missing article_id")
        if article_id not in ids:
            raise DatasetError(f"{where}: unknown article id {article_id!r}")
        gold.append(
            GoldRecord(
                article_id=article_id,
                individuals=_clean_gold_list(raw.get("individuals", []), f"{where}.individuals"),
                organizations=_clean_gold_list(raw.get("organizations", []), f"{where}.organizations"),
            )
        )
    return articles, gold


_FLAT_BODY_KEYS = ("body", "text", "article")
_FLAT_IND_KEYS = ("individuals", "persons")
_FLAT_ORG_KEYS = ("organizations", "orgs")


def _first_present(raw: dict, keys: tuple[str, ...]) -> object:
    for k in keys:
        if k in raw:
            return raw[k]
    return None


def _load_flat_layout(items: list, path: Path) -> tuple[list[Article], list[GoldRecord]]:
    """Import shim for flat per-article exports (one object per article,
    text and both gold lists side by side). Field names tolerated:
    body/text/article, individuals/persons, organizations/orgs; ids are
    generated when absent."""
    articles: list[Article] = []
    gold: list[GoldRecord] = []
    ids: set[str] = set()
    for i, raw in enumerate(items):
        where = f"{path}: [{i}]"
        if not isinstance(raw, dict):
            raise DatasetError(f"{where}: expected an object")
        body = _first_present(raw, _FLAT_BODY_KEYS)
        if not isinstance(body, str) or not body.strip():
            raise DatasetError(f"{where}: no article text found")
        article_id = raw.get("id") if isinstance(raw.get("id"), str) else f"article-{i + 1:02d}"
        if article_id in ids:
            raise DatasetError(f"{where}: duplicate article id {article_id!r}")
        ids.add(article_id)
        articles.append(_build_article({**raw, "id": article_id, "body": body}, where))
        gold.append(
            GoldRecord(
                article_id=article_id,
                individuals=_clean_gold_list(_first_present(raw, _FLAT_IND_KEYS) or [], f"{where}.individuals"),
                organizations=_clean_gold_list(_first_present(raw, _FLAT_ORG_KEYS) or [], f"{where}.organizations"),
            )
        )
    return articles, gold


def load_dataset(path: str | Path) -> tuple[list[Article], list[GoldRecord]]:
    """Load and validate a dataset file.

    Bodies are passed through ``preprocess_text`` (idempotent, so already
    clean files load unchanged) and gold entries are whitespace-normalized.
    """
    p = Path(path)
    try:
        doc = json.loads(p.read_text(encoding="utf-8"))
    except OSError as e:
        raise DatasetError(f"{p}: cannot read ({e})") from e
    except json.JSONDecodeError as e:
        raise DatasetError(f"{p}:{e.lineno}: invalid JSON: {e.msg}") from e

    if isinstance(doc, dict) and ("articles" in doc or "gold" in doc):
        return _load_native_layout(doc, p)
    if isinstance(doc, list):
        return _load_flat_layout(doc, p)
    raise DatasetError(f"{p}: unrecognized dataset layout")


def dataset_document(articles: list[Article], gold: list[GoldRecord]) -> dict:
    """The native-layout JSON document for ``articles`` and ``gold``."""
    return {
        "articles": [
            {
                "id": a.id,
                "title": a.title,
                "body": a.body,
                "case_label": a.case_label,
                "language": a.language,
            }
            for a in articles
        ],
        "gold": [
            {
                "article_id": g.article_id,
                "individuals": list(g.individuals),
                "organizations": list(g.organizations),
            }
            for g in gold
        ],
    }


def write_dataset(path: str | Path, articles: list[Article], gold: list[GoldRecord]) -> Path:
    p = Path(path)
    p.parent.mkdir(parents=True, exist_ok=True)
    doc = dataset_document(articles, gold)
    p.write_text(json.dumps(doc, ensure_ascii=False, indent=2) + "\n", encoding="utf-8")
    return p
