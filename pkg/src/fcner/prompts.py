"""Prompt construction: base extraction prompts, ablation additions, and the
structuring / matching / verification helper prompts.

Templates are plain-text files with ``{placeholder}`` slots, loaded from the
packaged ``templates/`` directory; a custom prompt directory overlays the
packaged defaults file by file.

Addition ids follow the ablation-table convention: 1-3 are mutually
exclusive role preambles, 4 is the step-by-step (chain-of-thought)
instruction, 5 is the extra context paragraph and exists only for
organizations. A variant's label is "-" for no additions, else the
ascending comma-joined "n)" form, e.g. "1),4),5)".
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from pathlib import Path

from .corpus import Article, EntityClass


class PromptError(ValueError):
    """Unknown addition id, role-exclusivity violation, or bad render input."""


ROLE_IDS = frozenset({1, 2, 3})
COT_ID = 4
CONTEXT_ID = 5

_VALID_IDS = {
    EntityClass.INDIVIDUAL: frozenset({1, 2, 3, 4}),
    EntityClass.ORGANIZATION: frozenset({1, 2, 3, 4, 5}),
}

_PLACEHOLDER_RE = re.compile(r"\{([a-z_]+)\}")
_KNOWN_PLACEHOLDERS = frozenset(
    {"article", "role", "context", "gold_list", "llm_list", "raw_response", "class_key", "class_name", "entity"}
)


def _check_variant_ids(entity_class: EntityClass, ids: frozenset[int]) -> None:
    unknown = ids - _VALID_IDS[entity_class]
    if unknown:
        raise PromptError(
            f"unknown addition id(s) {sorted(unknown)} for class {entity_class.value}"
        )
    if len(ids & ROLE_IDS) > 1:
        raise PromptError(f"addition ids {sorted(ids & ROLE_IDS)} are mutually exclusive roles")


@dataclass(frozen=True)
class PromptVariant:
    entity_class: EntityClass
    addition_ids: frozenset[int]

    def __post_init__(self) -> None:
        _check_variant_ids(self.entity_class, self.addition_ids)

    @property
    def label(self) -> str:
        if not self.addition_ids:
            return "-"
        return ",".join(f"{i})" for i in sorted(self.addition_ids))

    @property
    def role_id(self) -> int | None:
        roles = self.addition_ids & ROLE_IDS
        return next(iter(roles)) if roles else None


def base_variant(entity_class: EntityClass) -> PromptVariant:
    return PromptVariant(entity_class, frozenset())


def parse_label(label: str, entity_class: EntityClass) -> PromptVariant:
    """Inverse of ``PromptVariant.label``."""
    text = label.strip()
    if text == "-":
        return base_variant(entity_class)
    ids = set()
    for token in text.split(","):
        token = token.strip()
        if not re.fullmatch(r"\d+\)", token):
            raise PromptError(f"malformed variant label {label!r}")
        ids.add(int(token[:-1]))
    return PromptVariant(entity_class, frozenset(ids))


def enumerate_variants(entity_class: EntityClass, requested: list[set[int] | frozenset[int]]) -> list[PromptVariant]:
    """Canonical, deduplicated variants in stable (input) order."""
    out: list[PromptVariant] = []
    seen: set[frozenset[int]] = set()
    for ids in requested:
        variant = PromptVariant(entity_class, frozenset(ids))
        if variant.addition_ids not in seen:
            seen.add(variant.addition_ids)
            out.append(variant)
    return out


@dataclass(frozen=True)
class PromptTemplate:
    template_id: str
    text: str

    def __post_init__(self) -> None:
        bad = set(_PLACEHOLDER_RE.findall(self.text)) - _KNOWN_PLACEHOLDERS
        if bad:
            raise PromptError(f"template {self.template_id!r} has unknown placeholders: {sorted(bad)}")

    def render(self, **bindings: str) -> str:
        """Substitute every placeholder the template uses, in a single pass
        so substituted values are never re-expanded."""
        needed = {m for m in _PLACEHOLDER_RE.findall(self.text) if m in _KNOWN_PLACEHOLDERS}
        missing = needed - bindings.keys()
        if missing:
            raise PromptError(f"template {self.template_id!r}: unbound placeholders {sorted(missing)}")
        return _PLACEHOLDER_RE.sub(
            lambda m: bindings.get(m.group(1), m.group(0)), self.text
        )


_PACKAGED_DIR = Path(__file__).parent / "templates"


class PromptLibrary:
    """Loads templates by id from a prompt directory (``<id>.txt``),
    falling back to the packaged defaults."""

    def __init__(self, prompt_dir: str | Path | None = None):
        self.prompt_dir = Path(prompt_dir) if prompt_dir else None
        self._cache: dict[str, PromptTemplate] = {}

    def get(self, template_id: str) -> PromptTemplate:
        if template_id not in self._cache:
            self._cache[template_id] = PromptTemplate(template_id, self._read(template_id))
        return self._cache[template_id]

    def _read(self, template_id: str) -> str:
        name = f"{template_id}.txt"
        if self.prompt_dir is not None:
            custom = self.prompt_dir / name
            if custom.is_file():
                return custom.read_text(encoding="utf-8")
        packaged = _PACKAGED_DIR / name
        if packaged.is_file():
            return packaged.read_text(encoding="utf-8")
        raise PromptError(f"no template file for {template_id!r}")


def render_base_prompt(article: Article, entity_class: EntityClass, library: PromptLibrary) -> str:
    template = library.get(f"{entity_class.value}_base")
    return template.render(article=article.body).strip()


def render_extraction_prompt(article: Article, variant: PromptVariant, library: PromptLibrary) -> str:
    """Base prompt for the variant's class plus its additions.

    Additions only wrap the base text (role and context before, the
    step-by-step instruction after), so the rendered base stays a contiguous
    substring of every variant's prompt.
    """
    cls = variant.entity_class
    blocks: list[str] = []
    if variant.role_id is not None:
        blocks.append(library.get(f"{cls.value}_role{variant.role_id}").text.strip())
    if CONTEXT_ID in variant.addition_ids:
        blocks.append(library.get("organization_context").text.strip())
    blocks.append(render_base_prompt(article, cls, library))
    if COT_ID in variant.addition_ids:
        blocks.append(library.get("cot").text.strip())
    return "\n\n".join(blocks)


def render_structuring_prompt(raw_response: str, entity_class: EntityClass, library: PromptLibrary) -> str:
    if not raw_response.strip():
        raise PromptError("cannot render a structuring prompt for an empty response")
    template = library.get("structuring")
    return template.render(
        raw_response=raw_response,
        class_key=entity_class.key,
        class_name=entity_class.label,
    ).strip()


def _numbered(entries: list[str] | tuple[str, ...]) -> str:
    return "\n".join(f"{i}. {entry}" for i, entry in enumerate(entries, start=1))


def render_matching_prompt(
    gold_list: list[str] | tuple[str, ...],
    llm_list: list[str] | tuple[str, ...],
    library: PromptLibrary,
) -> str:
    if not gold_list or not llm_list:
        raise PromptError("matching needs two non-empty lists")
    template = library.get("matching")
    return template.render(gold_list=_numbered(gold_list), llm_list=_numbered(llm_list)).strip()


def render_verification_prompt(
    article: Article, entity: str, entity_class: EntityClass, library: PromptLibrary
) -> str:
    if not entity.strip():
        raise PromptError("cannot verify an empty entity string")
    template = library.get("verification")
    return template.render(
        article=article.body, entity=entity, class_name=entity_class.label
    ).strip()
