#!/usr/bin/env python3
"""Generate the demo dataset and the replay fixture stores.

Outputs:
    data/demo_dataset.json  - four small articles, both entity classes
    fixtures/demo/          - recorded exchanges for a full demo experiment
                              (valid responses, a structuring fallback, a
                              salvage case, and an alias that only the
                              matching step can align)
    fixtures/full/          - perfect individual-extraction responses for
                              the 15-article dataset (used by the
                              525-iteration replay run)

Fixture keys depend on the rendered prompt text, so rerun this script after
touching the datasets or the prompt templates.
"""

from __future__ import annotations

import json
import sys
from pathlib import Path

ROOT = Path(__file__).resolve().parents[1]
sys.path.insert(0, str(ROOT / "src"))

from fcner.corpus import Article, EntityClass, GoldRecord, load_dataset, write_dataset  # noqa: E402
from fcner.gateway import ChatExchange, ChatParams, ChatRequest, FixtureStore, Purpose  # noqa: E402
from fcner.prompts import (  # noqa: E402
    PromptLibrary,
    base_variant,
    render_extraction_prompt,
    render_matching_prompt,
    render_structuring_prompt,
)

EXTRACTION_MODEL = "gemma2:9b"
STRUCTURING_MODEL = "qwen2:7b"
MATCHING_MODEL = "gemma2:9b"

DEMO_ARTICLES = [
    Article(
        id="demo1",
        title="Freight invoices under scrutiny",
        body=(
            "Investigators from the FBI questioned Arkady Solovyov on Thursday about a set of freight "
            "invoices issued by Helix Maritime Group. A second witness, Nina Vance, told agents that "
            "the Harbour Authority had returned the paperwork unread. The inquiry continues."
        ),
        case_label="Case Pilot",
    ),
    Article(
        id="demo2",
        title="Consultant fees draw questions",
        body=(
            "Piotr Anders collected advisory fees from Crescent Bay Holdings for three years, filings "
            "show. His former assistant Salma Oduya said no reports were ever delivered. The company "
            "declined to comment."
        ),
        case_label="Case Pilot",
    ),
    Article(
        id="demo3",
        title="Energy trader faces audit",
        body=(
            "An audit of Vostok Energy Partners began after Tomas Keller reported irregular transit "
            "papers to the Bratislava Customs Office. Officials say the review will take months."
        ),
        case_label="Case Pilot",
    ),
    Article(
        id="demo4",
        title="Three held in payroll case",
        body=(
            "Elif Demir, Jonas Mark, and Rita Cole were detained for questioning over a ghost payroll "
            "scheme. No employer has been named in the court record so far."
        ),
        case_label="Case Pilot",
    ),
]

DEMO_GOLD = [
    GoldRecord(
        "demo1",
        individuals=("Arkady Solovyov", "Nina Vance"),
        organizations=("Federal Bureau of Investigations", "Helix Maritime Group"),
    ),
    GoldRecord(
        "demo2",
        individuals=("Piotr Anders", "Salma Oduya"),
        organizations=("Crescent Bay Holdings",),
    ),
    GoldRecord(
        "demo3",
        individuals=("Tomas Keller",),
        organizations=("Vostok Energy Partners", "Bratislava Customs Office"),
    ),
    GoldRecord(
        "demo4",
        individuals=("Elif Demir", "Jonas Mark", "Rita Cole"),
        organizations=(),
    ),
]

# what the "model" answers per (article, class): a valid response, prose
# needing the structuring fallback, or garbage that only salvage can read
IND = EntityClass.INDIVIDUAL
ORG = EntityClass.ORGANIZATION

DEMO_EXTRACTION_RESPONSES = {
    ("demo1", IND): json.dumps({"individuals": ["Arkady Solovyov", "Nina Vance"]}),
    ("demo2", IND): "Sure! The people mentioned in the article are Piotr Anders and Salma Oduya.",
    ("demo3", IND): json.dumps({"individuals": ["Tomas Keller"]}),
    ("demo4", IND): json.dumps({"individuals": ["Elif Demir", "Jonas Mark", "Rita Cole"]}),
    ("demo1", ORG): json.dumps({"organizations": ["FBI", "Helix Maritime Group", "Harbour Authority"]}),
    ("demo2", ORG): json.dumps({"organizations": ["Crescent Bay Holdings"]}),
    ("demo3", ORG): "The organizations I found are Vostok Energy Partners and the Bratislava Customs Office.",
    ("demo4", ORG): json.dumps({"organizations": []}),
}

# structuring answers, keyed by the raw response they reformat
DEMO_STRUCTURING_RESPONSES = {
    ("demo2", IND): json.dumps({"individuals": ["Piotr Anders"]}),  # drops one name: a FN survives
    ("demo3", ORG): (
        'Here is the list: ["Vostok Energy Partners", "Bratislava Customs Office"] - let me know '
        "if you need anything else."
    ),  # still not a bare object: salvage has to dig the array out
}

# matching answers per article (organization class); demo1 includes a junk
# pair that the validity filter must drop
DEMO_MATCHING_RESPONSES = {
    "demo1": json.dumps(
        [
            ["Federal Bureau of Investigations", "FBI"],
            ["Helix Maritime Group", "Helix Maritime Group"],
            ["Harbour Authority", "Harbour Authority"],
        ]
    ),
    "demo2": json.dumps([["Crescent Bay Holdings", "Crescent Bay Holdings"]]),
    "demo3": json.dumps(
        [
            ["Vostok Energy Partners", "Vostok Energy Partners"],
            ["Bratislava Customs Office", "Bratislava Customs Office"],
        ]
    ),
}

# the prediction lists the matching prompts will be rendered against
# (extraction output after validation/structuring/salvage and dedup)
DEMO_PRED_ORGS = {
    "demo1": ["FBI", "Helix Maritime Group", "Harbour Authority"],
    "demo2": ["Crescent Bay Holdings"],
    "demo3": ["Vostok Energy Partners", "Bratislava Customs Office"],
}

LATENCIES = {Purpose.EXTRACTION: 1.25, Purpose.STRUCTURING: 0.6, Purpose.MATCHING: 0.85}


def record(store: FixtureStore, model: str, prompt: str, purpose: Purpose, response: str) -> None:
    request = ChatRequest(model, prompt, ChatParams(), purpose)
    store.put(ChatExchange(request=request, response_text=response, latency_s=LATENCIES[purpose], mode="live"))


def build_demo(library: PromptLibrary) -> None:
    write_dataset(ROOT / "data" / "demo_dataset.json", DEMO_ARTICLES, DEMO_GOLD)
    articles, gold = load_dataset(ROOT / "data" / "demo_dataset.json")
    gold_by_id = {g.article_id: g for g in gold}
    store = FixtureStore(ROOT / "fixtures" / "demo")

    for article in articles:
        for cls in (IND, ORG):
            prompt = render_extraction_prompt(article, base_variant(cls), library)
            raw = DEMO_EXTRACTION_RESPONSES[(article.id, cls)]
            record(store, EXTRACTION_MODEL, prompt, Purpose.EXTRACTION, raw)
            if (article.id, cls) in DEMO_STRUCTURING_RESPONSES:
                sprompt = render_structuring_prompt(raw, cls, library)
                record(
                    store,
                    STRUCTURING_MODEL,
                    sprompt,
                    Purpose.STRUCTURING,
                    DEMO_STRUCTURING_RESPONSES[(article.id, cls)],
                )

    for article_id, pred in DEMO_PRED_ORGS.items():
        gold_orgs = list(gold_by_id[article_id].organizations)
        mprompt = render_matching_prompt(gold_orgs, pred, library)
        record(store, MATCHING_MODEL, mprompt, Purpose.MATCHING, DEMO_MATCHING_RESPONSES[article_id])


def build_full(library: PromptLibrary) -> None:
    articles, gold = load_dataset(ROOT / "data" / "dataset.json")
    gold_by_id = {g.article_id: g for g in gold}
    store = FixtureStore(ROOT / "fixtures" / "full")
    for article in articles:
        prompt = render_extraction_prompt(article, base_variant(IND), library)
        response = json.dumps({"individuals": list(gold_by_id[article.id].individuals)})
        record(store, EXTRACTION_MODEL, prompt, Purpose.EXTRACTION, response)


def main() -> None:
    for directory in (ROOT / "fixtures" / "demo", ROOT / "fixtures" / "full"):
        if directory.exists():
            for f in directory.glob("*.json"):
                f.unlink()
    library = PromptLibrary()
    build_demo(library)
    build_full(library)
    demo_n = len(list((ROOT / "fixtures" / "demo").glob("*.json")))
    full_n = len(list((ROOT / "fixtures" / "full").glob("*.json")))
    print(f"wrote {demo_n} demo fixtures, {full_n} full fixtures")


if __name__ == "__main__":
    main()
