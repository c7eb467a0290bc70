"""NER pipelines behind the baseline adapter.

``en_core_web_sm`` (or any installed spaCy pipeline) is the default; the
bundled ``pattern-en`` pipeline is a dependency-free stand-in for
environments where spaCy cannot be installed. Both return per-class entity
string lists; label mapping is PERSON -> individuals, ORG -> organizations,
everything else discarded.
"""

from __future__ import annotations

import re

PATTERN_PIPELINE = "pattern-en"
DEFAULT_PIPELINE = "en_core_web_sm"


class MissingPipelineError(RuntimeError):
    pass


# Suffix/keyword vocabulary marking a capitalized run as an organization.
ORG_KEYWORDS = {
    "Holdings", "Partners", "Group", "Ltd", "Trust", "Corporation", "Services",
    "Bank", "Office", "Commission", "Authority", "Agency", "Directorate",
    "Court", "Service", "Force", "Bureau", "Fund", "Ministry", "Institute",
    "Association", "Committee", "Union", "Federation", "Council",
}
# Lowercase words allowed inside a capitalized run ("Anti-Fraud Office of ...").
CONNECTORS = {"of", "the", "and", "for", "de", "la"}

_EDGE_PUNCT = ".,;:!?()[]\"'"


def _tokens(text: str) -> list[str]:
    return text.split()


def _strip_edges(token: str) -> str:
    return token.strip(_EDGE_PUNCT)


def _is_acronym(word: str) -> bool:
    return len(word) >= 2 and word.isupper() and any(c.isalpha() for c in word)


def _is_capitalized(word: str) -> bool:
    return bool(word) and word[0].isupper()


def _capitalized_runs(text: str) -> list[list[str]]:
    """Maximal runs of capitalized (or all-caps) words, allowing lowercase
    connectors between them. Trailing punctuation on the raw token closes
    the run, so names never glue across clause or sentence boundaries."""
    runs: list[list[str]] = []
    current: list[str] = []
    pending_connectors: list[str] = []

    def close() -> None:
        nonlocal current, pending_connectors
        if current:
            runs.append(current)
        current, pending_connectors = [], []

    for raw in _tokens(text):
        word = _strip_edges(raw)
        if not word:
            close()
            continue
        if _is_capitalized(word) or _is_acronym(word):
            if current and pending_connectors:
                current.extend(pending_connectors)
            pending_connectors = []
            current.append(word)
            if raw[-1] in ".,;:!?":
                close()
        elif current and word in CONNECTORS and not pending_connectors and raw[-1] not in ".,;:!?":
            # joins only if another capitalized word follows
            pending_connectors = [word]
        else:
            close()
    close()
    return runs


def _classify(run: list[str]) -> str | None:
    content = [w for w in run if w not in CONNECTORS]
    if any(_is_acronym(w) for w in content):
        return "ORG"
    if any(w in ORG_KEYWORDS for w in content):
        return "ORG"
    if len(run) == 1:
        # lone title-case words are mostly sentence openers and ordinary
        # proper nouns; too noisy to keep
        return None
    if 2 <= len(content) <= 3:
        return "PERSON"
    return None


def pattern_tag(text: str) -> dict[str, list[str]]:
    """The bundled heuristic tagger: capitalization runs classified by
    acronym shape and organization keywords. Deterministic and crude by
    design; it exists to exercise the evaluation path, not to win."""
    persons: list[str] = []
    orgs: list[str] = []
    for run in _capitalized_runs(text):
        label = _classify(run)
        name = " ".join(run)
        if label == "PERSON":
            persons.append(name)
        elif label == "ORG":
            orgs.append(name)
    return {"individuals": _dedupe(persons), "organizations": _dedupe(orgs)}


def _dedupe(names: list[str]) -> list[str]:
    out: list[str] = []
    seen: set[str] = set()
    for name in names:
        key = re.sub(r"\s+", " ", name.strip())
        if key and key not in seen:
            seen.add(key)
            out.append(key)
    return out


class SpacyPipeline:
    def __init__(self, model_name: str):
        try:
            import spacy
        except ImportError as e:
            raise MissingPipelineError(
                f"spaCy is not installed; install it or use --model {PATTERN_PIPELINE}"
            ) from e
        try:
            self.nlp = spacy.load(model_name)
        except OSError as e:
            raise MissingPipelineError(
                f"spaCy pipeline {model_name!r} is not installed ({e})"
            ) from e
        self.version = getattr(self.nlp.meta, "get", lambda *_: "?")("version", "?")

    def __call__(self, text: str) -> dict[str, list[str]]:
        doc = self.nlp(text)
        persons = [e.text for e in doc.ents if e.label_ == "PERSON"]
        orgs = [e.text for e in doc.ents if e.label_ == "ORG"]
        return {"individuals": _dedupe(persons), "organizations": _dedupe(orgs)}


def load_pipeline(model_name: str):
    """Returns (callable text -> {individuals, organizations}, version)."""
    if model_name == PATTERN_PIPELINE:
        return pattern_tag, "1.0"
    pipeline = SpacyPipeline(model_name)
    return pipeline, pipeline.version
