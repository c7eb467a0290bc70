from __future__ import annotations

import pytest

from fcner.corpus import EntityClass
from fcner.prompts import (
    PromptError,
    PromptLibrary,
    PromptVariant,
    base_variant,
    enumerate_variants,
    parse_label,
    render_base_prompt,
    render_extraction_prompt,
    render_matching_prompt,
    render_structuring_prompt,
    render_verification_prompt,
)

from conftest import make_article

IND = EntityClass.INDIVIDUAL
ORG = EntityClass.ORGANIZATION


@pytest.fixture(scope="module")
def library():
    return PromptLibrary()


ALL_ORG_VARIANTS = [
    frozenset(), frozenset({1}), frozenset({2}), frozenset({3}), frozenset({4}),
    frozenset({5}), frozenset({1, 4}), frozenset({2, 4}), frozenset({1, 4, 5}),
    frozenset({4, 5}),
]


class TestVariants:
    def test_labels(self):
        assert base_variant(IND).label == "-"
        assert PromptVariant(IND, frozenset({4})).label == "4)"
        assert PromptVariant(ORG, frozenset({5, 1, 4})).label == "1),4),5)"

    @pytest.mark.parametrize("ids", ALL_ORG_VARIANTS)
    def test_label_round_trip(self, ids):
        variant = PromptVariant(ORG, ids)
        assert parse_label(variant.label, ORG) == variant

    def test_roles_mutually_exclusive(self):
        with pytest.raises(PromptError, match="mutually exclusive"):
            PromptVariant(IND, frozenset({1, 2}))

    def test_context_is_organization_only(self):
        with pytest.raises(PromptError, match="unknown addition id"):
            PromptVariant(IND, frozenset({5}))

    def test_enumerate(self):
        variants = enumerate_variants(IND, [set(), {4}, {1, 4}, set()])
        assert [v.label for v in variants] == ["-", "4)", "1),4)"]

    def test_enumerate_empty(self):
        assert enumerate_variants(ORG, []) == []

    def test_malformed_label(self):
        with pytest.raises(PromptError):
            parse_label("1,4", IND)


class TestExtractionPrompt:
    def test_base_contains_body_and_schema(self, library):
        article = make_article(body="Carla Voss denied the charges brought by Helix Group.")
        text = render_extraction_prompt(article, base_variant(IND), library)
        assert article.body in text
        assert '{"individuals":' in text
        assert "{article}" not in text

    @pytest.mark.parametrize("ids", ALL_ORG_VARIANTS)
    def test_base_prompt_is_substring_of_every_variant(self, library, ids):
        article = make_article()
        base = render_base_prompt(article, ORG, library)
        rendered = render_extraction_prompt(article, PromptVariant(ORG, ids), library)
        assert base in rendered
        if ids:
            assert len(rendered) > len(base)

    def test_cot_variant_adds_step_by_step(self, library):
        article = make_article()
        text = render_extraction_prompt(article, PromptVariant(IND, frozenset({4})), library)
        assert "step by step" in text.lower()

    def test_deterministic(self, library):
        article = make_article()
        variant = PromptVariant(ORG, frozenset({1, 4, 5}))
        assert render_extraction_prompt(article, variant, library) == render_extraction_prompt(
            article, variant, library
        )

    def test_role_texts_differ(self, library):
        article = make_article()
        texts = {
            render_extraction_prompt(article, PromptVariant(ORG, frozenset({r})), library)
            for r in (1, 2, 3)
        }
        assert len(texts) == 3


class TestHelperPrompts:
    def test_structuring_embeds_raw_and_schema(self, library):
        raw = "The names are Anna and Boris."
        text = render_structuring_prompt(raw, IND, library)
        assert raw in text
        assert '{"individuals":' in text

    def test_structuring_keeps_other_class_key_out(self, library):
        text = render_structuring_prompt("some answer", ORG, library)
        assert '{"organizations":' in text
        assert '{"individuals":' not in text

    def test_structuring_rejects_empty(self, library):
        with pytest.raises(PromptError):
            render_structuring_prompt("   ", IND, library)

    def test_matching_embeds_both_lists_with_indices(self, library):
        text = render_matching_prompt(["Federal Bureau of Investigations"], ["FBI"], library)
        assert "1. Federal Bureau of Investigations" in text
        assert "1. FBI" in text

    def test_matching_rejects_empty_side(self, library):
        with pytest.raises(PromptError):
            render_matching_prompt([], ["x"], library)

    def test_verification_prompt(self, library):
        article = make_article(body="Helix Group filed for bankruptcy.")
        text = render_verification_prompt(article, "Helix Group", ORG, library)
        assert "Helix Group" in text and article.body in text


class TestLibrary:
    def test_custom_dir_overlays_packaged(self, tmp_path, library):
        (tmp_path / "cot.txt").write_text("Custom reasoning instruction.")
        custom = PromptLibrary(tmp_path)
        article = make_article()
        text = render_extraction_prompt(article, PromptVariant(IND, frozenset({4})), custom)
        assert "Custom reasoning instruction." in text
        # untouched templates still come from the package
        assert render_base_prompt(article, IND, custom) == render_base_prompt(article, IND, library)

    def test_missing_template(self):
        lib = PromptLibrary()
        with pytest.raises(PromptError, match="no template file"):
            lib.get("nonexistent_template")

    def test_unbound_placeholder_rejected(self, library):
        template = library.get("matching")
        with pytest.raises(PromptError, match="unbound"):
            template.render(gold_list="1. A")
