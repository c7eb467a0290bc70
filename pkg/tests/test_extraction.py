from __future__ import annotations

import json

import pytest
from hypothesis import given, strategies as st

from fcner.corpus import EntityClass
from fcner.extraction import (
    Invalid,
    Prediction,
    dedupe_entities,
    extract_entities,
    read_predictions,
    salvage_parse,
    validate_response,
    write_predictions,
)
from fcner.prompts import PromptLibrary, base_variant, render_extraction_prompt, render_structuring_prompt

from conftest import make_article, record_fixture

IND = EntityClass.INDIVIDUAL
ORG = EntityClass.ORGANIZATION


class TestValidateResponse:
    def test_schema_match(self):
        text = '{"individuals":["John Smith","A. Karimova"]}'
        assert validate_response(text, IND) == ["John Smith", "A. Karimova"]

    def test_prose_is_no_json(self):
        result = validate_response("Sure! Here are the names: John, Mary", IND)
        assert isinstance(result, Invalid) and result.reason == "no-json"

    def test_empty_array_is_valid(self):
        assert validate_response('{"organizations":[]}', ORG) == []

    def test_wrong_key(self):
        result = validate_response('{"individuals":["x"]}', ORG)
        assert isinstance(result, Invalid) and result.reason == "wrong-key"

    def test_wrong_value_type(self):
        for text in ('{"individuals":"John"}', '{"individuals":[1,2]}'):
            result = validate_response(text, IND)
            assert isinstance(result, Invalid) and result.reason == "wrong-value-type"

    def test_empty_strings(self):
        result = validate_response('{"individuals":["John",""]}', IND)
        assert isinstance(result, Invalid) and result.reason == "empty-strings"

    def test_surrounding_prose_invalidates(self):
        result = validate_response('Answer: {"individuals":["John"]}', IND)
        assert isinstance(result, Invalid) and result.reason == "no-json"

    def test_whitespace_tolerated(self):
        assert validate_response('  \n {"individuals":["J"]} \n ', IND) == ["J"]

    def test_top_level_array_is_no_json(self):
        result = validate_response('["John"]', IND)
        assert isinstance(result, Invalid) and result.reason == "no-json"


def brute_force_first_string_array(text):
    """Enumerate every substring, parse, keep arrays of strings; earliest
    start wins (the reference oracle for the linear scanner)."""
    for i in range(len(text)):
        if text[i] != "[":
            continue
        for j in range(i + 1, len(text) + 1):
            try:
                value = json.loads(text[i:j])
            except ValueError:
                continue
            if isinstance(value, list) and all(isinstance(e, str) for e in value):
                return value
    return None


SALVAGE_FIXTURES = [
    'Answer: ["FBI", "Europol"] hope this helps',
    "no entities found",
    '["a"] then later ["b", "c"]',
    '{"individuals": ["nested", "inside"]} trailing',
    'numbers first [1, 2] then ["ok"]',
    '[[1], ["x"]] mixed outer',
    "broken [ \"unclosed",
    '[] empty array counts',
    'text ["x", 3] bad then ["y"]',
    "[\"quoted \\\" bracket ] inside\", \"b\"]",
    "deep {\"k\": [\"in object\"]} end",
    "[ \"spaced\" , \"list\" ]",
    "tail only ]",
    "[]",
    "[\"unicode \\u00e9\"]",
    'two objects {"a": 1} {"individuals": ["z"]}',
    "[true, \"no\"] then nothing",
    "prefix [\"One\"] suffix [\"Two\"]",
    "[\"dup\", \"dup\"]",
    "((""))",
]


class TestSalvageParse:
    def test_embedded_array(self):
        assert salvage_parse('Answer: ["FBI", "Europol"] hope this helps', ORG) == ["FBI", "Europol"]

    def test_unrecoverable(self):
        result = salvage_parse("no entities found", IND)
        assert isinstance(result, Invalid) and result.reason == "unrecoverable"

    def test_first_of_two_arrays(self):
        assert salvage_parse('["a"] then later ["b", "c"]', IND) == ["a"]

    def test_array_inside_object(self):
        assert salvage_parse('{"individuals": ["nested"]} trailing', IND) == ["nested"]

    def test_skips_non_string_arrays(self):
        assert salvage_parse('numbers first [1, 2] then ["ok"]', IND) == ["ok"]

    @pytest.mark.parametrize("text", SALVAGE_FIXTURES)
    def test_matches_brute_force_oracle_on_fixture_set(self, text):
        expected = brute_force_first_string_array(text)
        got = salvage_parse(text, IND)
        assert (expected if expected is not None else Invalid("unrecoverable")) == got

    @given(st.text(alphabet='[]"abc,{} :', max_size=60))
    def test_matches_brute_force_oracle_random(self, text):
        expected = brute_force_first_string_array(text)
        got = salvage_parse(text, IND)
        if expected is None:
            assert isinstance(got, Invalid)
        else:
            assert got == expected


class TestDedupe:
    def test_keeps_first_occurrence(self):
        assert dedupe_entities(["FBI", " FBI ", "Europol", "FBI"]) == ("FBI", "Europol")

    def test_drops_empties_and_trims(self):
        assert dedupe_entities(["  John  Smith ", "", "  "]) == ("John  Smith",)

    def test_collapse_key_still_preserves_original_spacing(self):
        # "A  B" and "A B" collide under the collapse key; first form wins
        assert dedupe_entities(["A  B", "A B"]) == ("A  B",)


def make_gateway_flow(replay_gateway, article, cls, first, structured=None):
    gateway, store = replay_gateway
    library = PromptLibrary()
    prompt = render_extraction_prompt(article, base_variant(cls), library)
    record_fixture(store, "gemma2:9b", prompt, first, latency=1.0)
    if structured is not None:
        sprompt = render_structuring_prompt(first, cls, library)
        record_fixture(store, "qwen2:7b", sprompt, structured, latency=0.5)
    return gateway, library


class TestExtractEntities:
    def test_happy_path(self, replay_gateway):
        article = make_article()
        gateway, library = make_gateway_flow(
            replay_gateway, article, IND, '{"individuals":["Ada Obi"]}'
        )
        pred = extract_entities(
            article, IND, base_variant(IND), "gemma2:9b",
            gateway=gateway, library=library, structuring_model_id="qwen2:7b",
        )
        assert pred.entities == ("Ada Obi",)
        assert not pred.structuring_invoked and not pred.json_error and not pred.salvaged
        assert pred.latency_s == 1.0

    def test_structuring_recovers(self, replay_gateway):
        article = make_article()
        gateway, library = make_gateway_flow(
            replay_gateway, article, IND,
            "The names are Ada Obi and Ben Kahn.",
            structured='{"individuals":["Ada Obi","Ben Kahn"]}',
        )
        pred = extract_entities(
            article, IND, base_variant(IND), "gemma2:9b",
            gateway=gateway, library=library, structuring_model_id="qwen2:7b",
        )
        assert pred.entities == ("Ada Obi", "Ben Kahn")
        assert pred.structuring_invoked and not pred.json_error
        assert pred.latency_s == 1.5  # both chat calls counted

    def test_salvage_after_double_failure(self, replay_gateway):
        article = make_article()
        gateway, library = make_gateway_flow(
            replay_gateway, article, ORG,
            "I found some orgs.",
            structured='Sure: ["Helix Group"] is the list.',
        )
        pred = extract_entities(
            article, ORG, base_variant(ORG), "gemma2:9b",
            gateway=gateway, library=library, structuring_model_id="qwen2:7b",
        )
        assert pred.entities == ("Helix Group",)
        assert pred.structuring_invoked and pred.json_error and pred.salvaged

    def test_unrecoverable_yields_empty_flagged_prediction(self, replay_gateway):
        article = make_article()
        gateway, library = make_gateway_flow(
            replay_gateway, article, ORG, "nothing here", structured="still nothing"
        )
        pred = extract_entities(
            article, ORG, base_variant(ORG), "gemma2:9b",
            gateway=gateway, library=library, structuring_model_id="qwen2:7b",
        )
        assert pred.entities == ()
        assert pred.json_error and not pred.salvaged

    def test_empty_first_response_skips_structuring_call(self, replay_gateway):
        article = make_article()
        gateway, library = make_gateway_flow(replay_gateway, article, IND, "")
        calls = []
        gateway.add_listener(lambda ex: calls.append(ex.request.model_id))
        pred = extract_entities(
            article, IND, base_variant(IND), "gemma2:9b",
            gateway=gateway, library=library, structuring_model_id="qwen2:7b",
        )
        assert pred.entities == () and pred.json_error
        assert calls == ["gemma2:9b"]

    def test_flag_invariants_enforced(self):
        with pytest.raises(ValueError):
            Prediction("a", IND, (), "m", "-", "", False, True, False, 0.0)
        with pytest.raises(ValueError):
            Prediction("a", IND, (), "m", "-", "", True, False, True, 0.0)


class TestPredictionsFile:
    def test_round_trip(self, tmp_path):
        pred = Prediction("a1", ORG, ("FBI",), "gemma2:9b", "-", "{}", True, True, True, 1.5)
        path = write_predictions(tmp_path / "p.json", [pred])
        assert read_predictions(path) == [pred]

    def test_malformed_file(self, tmp_path):
        path = tmp_path / "bad.json"
        path.write_text('{"not": "an array"}')
        with pytest.raises(ValueError, match="JSON array"):
            read_predictions(path)

    def test_record_errors_located(self, tmp_path):
        path = tmp_path / "bad.json"
        path.write_text(json.dumps([{"article_id": "a1"}]))
        with pytest.raises(ValueError, match=r"\[0\]"):
            read_predictions(path)
