"""Experiment orchestration: model x variant grids over a dataset,
repetition timing, JSON-error accounting, baseline ingestion, and
Tables-shaped report emission.
"""

from __future__ import annotations

import csv
import io
import json
import logging
import threading
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from datetime import datetime
from pathlib import Path

from . import matching, scoring
from .corpus import Article, EntityClass, GoldRecord, load_dataset
from .extraction import (
    Prediction,
    extract_entities,
    read_predictions,
    write_predictions,
)
from .gateway import ChatParams, GatewayConfig, GatewayMode, LlmGateway
from .prompts import PromptLibrary, enumerate_variants
from .scoring import ScoreCard

log = logging.getLogger(__name__)


class ConfigError(ValueError):
    """Invalid experiment configuration."""


DEFAULT_EXTRACTION_MODEL = "gemma2:9b"
DEFAULT_STRUCTURING_MODEL = "qwen2:7b"
DEFAULT_MATCHING_MODEL = "gemma2:9b"


@dataclass(frozen=True)
class ExperimentConfig:
    dataset: str
    entity_classes: tuple[EntityClass, ...] = (EntityClass.INDIVIDUAL,)
    models: tuple[str, ...] = (DEFAULT_EXTRACTION_MODEL,)
    structuring_model: str = DEFAULT_STRUCTURING_MODEL
    matching_model: str = DEFAULT_MATCHING_MODEL
    # None = the per-class default: on for organizations, off for individuals
    matching_enabled: bool | None = None
    matcher: str = "llm"  # "llm" | "oracle"
    variants: tuple[frozenset[int], ...] = (frozenset(),)
    repetitions: int = 1
    mode: GatewayMode = GatewayMode.REPLAY
    endpoint: str = "http://localhost:11434"
    fixture_dir: str | None = None
    prompt_dir: str | None = None
    out_dir: str = "runs"
    temperature: float = 0.0
    seed: int | None = 42
    max_tokens: int | None = None
    timeout_s: float = 120.0
    retries: int = 2
    max_inflight: int = 1
    # concurrent article processing trades timing comparability for speed;
    # reports carry a marker when it was on
    concurrent_articles: bool = False

    def __post_init__(self) -> None:
        if self.repetitions < 1:
            raise ConfigError("repetitions must be >= 1")
        if self.matcher not in ("llm", "oracle"):
            raise ConfigError(f"unknown matcher {self.matcher!r}")
        if not self.models:
            raise ConfigError("at least one model is required")

    def matching_for(self, entity_class: EntityClass) -> bool:
        if self.matching_enabled is not None:
            return self.matching_enabled
        return entity_class is EntityClass.ORGANIZATION

    def chat_params(self) -> ChatParams:
        return ChatParams(temperature=self.temperature, seed=self.seed, max_tokens=self.max_tokens)

    def gateway_config(self) -> GatewayConfig:
        return GatewayConfig(
            mode=self.mode,
            base_url=self.endpoint,
            fixture_dir=self.fixture_dir,
            timeout_s=self.timeout_s,
            retries=self.retries,
            max_inflight=self.max_inflight,
        )


def load_config(path: str | Path, **overrides) -> ExperimentConfig:
    """Read the JSON config file (schema documented in the README) and
    apply CLI overrides."""
    p = Path(path)
    try:
        doc = json.loads(p.read_text(encoding="utf-8"))
    except OSError as e:
        raise ConfigError(f"{p}: cannot read ({e})") from e
    except json.JSONDecodeError as e:
        raise ConfigError(f"{p}:{e.lineno}: invalid JSON: {e.msg}") from e
    if not isinstance(doc, dict):
        raise ConfigError(f"{p}: config must be a JSON object")
    doc.update({k: v for k, v in overrides.items() if v is not None})

    def classes(raw) -> tuple[EntityClass, ...]:
        if raw in (None, "both"):
            return (EntityClass.INDIVIDUAL, EntityClass.ORGANIZATION)
        if isinstance(raw, str):
            return (EntityClass.parse(raw),)
        return tuple(EntityClass.parse(c) for c in raw)

    try:
        variants_raw = doc.get("variants", [[]])
        return ExperimentConfig(
            dataset=doc["dataset"],
            entity_classes=classes(doc.get("entity_class")),
            models=tuple(doc.get("models", [DEFAULT_EXTRACTION_MODEL])),
            structuring_model=doc.get("structuring_model", DEFAULT_STRUCTURING_MODEL),
            matching_model=doc.get("matching_model", DEFAULT_MATCHING_MODEL),
            matching_enabled=doc.get("matching"),
            matcher=doc.get("matcher", "llm"),
            variants=tuple(frozenset(int(i) for i in v) for v in variants_raw),
            repetitions=int(doc.get("repetitions", 1)),
            mode=GatewayMode(doc.get("mode", "replay")),
            endpoint=doc.get("endpoint", "http://localhost:11434"),
            fixture_dir=doc.get("fixture_dir"),
            prompt_dir=doc.get("prompt_dir"),
            out_dir=doc.get("out_dir", "runs"),
            temperature=float(doc.get("temperature", 0.0)),
            seed=doc.get("seed", 42),
            max_tokens=doc.get("max_tokens"),
            timeout_s=float(doc.get("timeout_s", 120.0)),
            retries=int(doc.get("retries", 2)),
            max_inflight=int(doc.get("max_inflight", 1)),
            concurrent_articles=bool(doc.get("concurrent_articles", False)),
        )
    except KeyError as e:
        raise ConfigError(f"{p}: missing required config key {e.args[0]!r}") from e
    except (TypeError, ValueError) as e:
        raise ConfigError(f"{p}: {e}") from e


@dataclass(frozen=True)
class ReportRow:
    model_id: str
    entity_class: EntityClass
    variant_label: str
    matching_enabled: bool
    accuracy: float
    precision: float
    recall: float
    f1: float
    iteration_time_s: float
    json_errors: int
    total_iterations: int
    failure_percent: float


@dataclass
class RunReport:
    rows: list[ReportRow] = field(default_factory=list)
    # set when articles ran concurrently: iteration times are not
    # comparable to sequential runs
    concurrent_articles: bool = False

    @property
    def any_matching(self) -> bool:
        return any(r.matching_enabled for r in self.rows)


@dataclass
class MatchRecord:
    article_id: str
    entity_class: EntityClass
    model_id: str
    variant_label: str
    result: matching.MatchResult

    def to_dict(self) -> dict:
        return {
            "article_id": self.article_id,
            "entity_class": self.entity_class.value,
            "model_id": self.model_id,
            "variant_label": self.variant_label,
            "pairs": self.result.pairs,
            "provenance": self.result.provenance,
        }


def final_entities(
    prediction: Prediction,
    gold_entities: tuple[str, ...],
    *,
    use_matching: bool,
    matcher: str,
    matching_model: str,
    gateway: LlmGateway | None,
    library: PromptLibrary | None,
    params: ChatParams | None = None,
) -> tuple[tuple[str, ...], matching.MatchResult | None]:
    """The list that goes into scoring: renamed when matching is on."""
    entities = prediction.entities
    if not use_matching or not gold_entities or not entities:
        return entities, None
    if matcher == "oracle":
        match = matching.oracle_match(gold_entities, entities)
    else:
        match = matching.llm_match(
            gold_entities, entities, matching_model, gateway=gateway, library=library, params=params
        )
    return matching.rename(entities, match), match


class _PassLatency:
    """Accumulates recorded chat latencies so a replayed pass has a
    deterministic iteration time. Thread-safe (articles may run
    concurrently)."""

    def __init__(self) -> None:
        self.total = 0.0
        self.calls = 0
        self._lock = threading.Lock()

    def __call__(self, exchange) -> None:
        with self._lock:
            self.total += exchange.latency_s
            self.calls += 1


def run_experiment(
    config: ExperimentConfig,
    out_dir: str | Path | None = None,
    *,
    report_formats: tuple[str, ...] = ("markdown-table", "csv", "json"),
) -> tuple[RunReport, Path]:
    """Run the full grid and persist predictions, matches, and reports to
    the run directory (``out_dir`` or a timestamped directory under the
    config's ``out_dir``)."""
    articles, gold = load_dataset(config.dataset)
    gold_by_id = {g.article_id: g for g in gold}
    gateway = LlmGateway(config.gateway_config())
    library = PromptLibrary(config.prompt_dir)
    params = config.chat_params()

    if config.mode in (GatewayMode.LIVE, GatewayMode.RECORD):
        needed = set(config.models) | {config.structuring_model}
        if any(config.matching_for(c) for c in config.entity_classes) and config.matcher == "llm":
            needed.add(config.matching_model)
        for model in sorted(needed):
            if not gateway.health_check(model):
                raise ConfigError(f"model {model!r} not served by {gateway.config.endpoint}")

    run_dir = Path(out_dir) if out_dir else Path(config.out_dir) / datetime.now().strftime(
        "run-%Y%m%d-%H%M%S"
    )
    run_dir.mkdir(parents=True, exist_ok=True)

    report = RunReport(concurrent_articles=config.concurrent_articles)
    all_predictions: list[Prediction] = []
    all_matches: list[MatchRecord] = []

    def process_article(article, entity_class, variant, model, use_matching):
        prediction = extract_entities(
            article,
            entity_class,
            variant,
            model,
            gateway=gateway,
            library=library,
            structuring_model_id=config.structuring_model,
            params=params,
        )
        gold_entities = gold_by_id[article.id].entities(entity_class)
        finals, match = final_entities(
            prediction,
            gold_entities,
            use_matching=use_matching,
            matcher=config.matcher,
            matching_model=config.matching_model,
            gateway=gateway,
            library=library,
            params=params,
        )
        return prediction, match, scoring.score(gold_entities, finals)

    try:
        for entity_class in config.entity_classes:
            use_matching = config.matching_for(entity_class)
            for model in config.models:
                for variant in enumerate_variants(entity_class, [set(v) for v in config.variants]):
                    cards: list[ScoreCard] = []
                    times: list[float] = []
                    json_errors = 0
                    for _ in range(config.repetitions):
                        meter = _PassLatency()
                        gateway.add_listener(meter)
                        started = time.perf_counter()
                        try:
                            work = [
                                (article, entity_class, variant, model, use_matching)
                                for article in articles
                            ]
                            if config.concurrent_articles and len(articles) > 1:
                                workers = min(8, max(2, config.max_inflight), len(articles))
                                with ThreadPoolExecutor(max_workers=workers) as pool:
                                    results = list(pool.map(lambda a: process_article(*a), work))
                            else:
                                results = [process_article(*a) for a in work]
                        finally:
                            gateway.remove_listener(meter)
                        wall = time.perf_counter() - started

                        tp = fp = fn = 0
                        for article, (prediction, match, card) in zip(articles, results):
                            all_predictions.append(prediction)
                            json_errors += int(prediction.json_error)
                            if match is not None:
                                all_matches.append(
                                    MatchRecord(article.id, entity_class, model, variant.label, match)
                                )
                            tp, fp, fn = tp + card.tp, fp + card.fp, fn + card.fn
                        # replayed passes report the recorded latencies so
                        # reports are byte-stable across invocations
                        times.append(meter.total if config.mode is GatewayMode.REPLAY else wall)
                        cards.append(scoring.from_counts(tp, fp, fn))

                    agg = scoring.aggregate(cards, times)
                    total_iterations = config.repetitions * len(articles)
                    report.rows.append(
                        ReportRow(
                            model_id=model,
                            entity_class=entity_class,
                            variant_label=variant.label,
                            matching_enabled=use_matching,
                            accuracy=agg.accuracy,
                            precision=agg.precision,
                            recall=agg.recall,
                            f1=agg.f1,
                            iteration_time_s=agg.iteration_time_s,
                            json_errors=json_errors,
                            total_iterations=total_iterations,
                            failure_percent=scoring.failure_percent(json_errors, total_iterations),
                        )
                    )
    finally:
        # flush whatever completed, even if a gateway error aborted the grid
        _persist_run(run_dir, report, all_predictions, all_matches, report_formats)

    return report, run_dir


def _persist_run(
    run_dir: Path,
    report: RunReport,
    predictions: list[Prediction],
    matches: list[MatchRecord],
    report_formats: tuple[str, ...],
) -> None:
    write_predictions(run_dir / "predictions.json", predictions)
    (run_dir / "matches.json").write_text(
        json.dumps([m.to_dict() for m in matches], ensure_ascii=False, indent=2) + "\n",
        encoding="utf-8",
    )
    for fmt in report_formats:
        emit_report(report, fmt, run_dir / f"report.{_EXTENSIONS[fmt]}")


def ingest_external_predictions(
    path: str | Path, articles: list[Article], gold: list[GoldRecord]
) -> list[Prediction]:
    """Load an external predictions file (e.g. a conventional baseline's
    output) and validate it against the dataset."""
    known = {a.id for a in articles}
    predictions = read_predictions(path)
    for i, p in enumerate(predictions):
        if p.article_id not in known:
            raise ValueError(f"{path}[{i}]: unknown article id {p.article_id!r}")
    return predictions


def score_predictions(
    predictions: list[Prediction],
    articles: list[Article],
    gold: list[GoldRecord],
    *,
    use_matching: bool | None,
    matcher: str = "llm",
    matching_model: str = DEFAULT_MATCHING_MODEL,
    gateway: LlmGateway | None = None,
    library: PromptLibrary | None = None,
) -> tuple[RunReport, list[MatchRecord]]:
    """Score an already-extracted prediction set (one repetition). Rows are
    grouped per (model, class, variant) in first-seen order.

    ``use_matching=None`` applies the per-class default (on for
    organizations, off for individuals)."""
    gold_by_id = {g.article_id: g for g in gold}
    groups: dict[tuple[str, EntityClass, str], list[Prediction]] = {}
    for p in predictions:
        groups.setdefault((p.model_id, p.entity_class, p.variant_label), []).append(p)

    report = RunReport()
    match_records: list[MatchRecord] = []
    for (model, entity_class, variant_label), group in groups.items():
        matching_here = (
            use_matching
            if use_matching is not None
            else entity_class is EntityClass.ORGANIZATION
        )
        tp = fp = fn = 0
        json_errors = 0
        latency = 0.0
        for p in group:
            gold_entities = gold_by_id[p.article_id].entities(entity_class)
            finals, match = final_entities(
                p,
                gold_entities,
                use_matching=matching_here,
                matcher=matcher,
                matching_model=matching_model,
                gateway=gateway,
                library=library,
            )
            if match is not None:
                match_records.append(MatchRecord(p.article_id, entity_class, model, variant_label, match))
            card = scoring.score(gold_entities, finals)
            tp, fp, fn = tp + card.tp, fp + card.fp, fn + card.fn
            json_errors += int(p.json_error)
            latency += p.latency_s
        agg = scoring.aggregate([scoring.from_counts(tp, fp, fn)], [latency])
        report.rows.append(
            ReportRow(
                model_id=model,
                entity_class=entity_class,
                variant_label=variant_label,
                matching_enabled=matching_here,
                accuracy=agg.accuracy,
                precision=agg.precision,
                recall=agg.recall,
                f1=agg.f1,
                iteration_time_s=agg.iteration_time_s,
                json_errors=json_errors,
                total_iterations=len(group),
                failure_percent=scoring.failure_percent(json_errors, len(group)) if group else 0.0,
            )
        )
    return report, match_records


_EXTENSIONS = {"markdown-table": "md", "csv": "csv", "json": "json"}

_COLUMNS = [
    "Base model",
    "Class",
    "Accuracy",
    "Precision",
    "Recall",
    "F1 Score",
    "Execution Time (Sec)",
    "Prompt Additions",
    "Matching",
    "Json errors",
    "Iterations",
    "Failure percent",
]


def _row_cells(row: ReportRow, with_matching: bool) -> list[str]:
    cells = [
        row.model_id,
        row.entity_class.value,
        f"{row.accuracy:.3f}",
        f"{row.precision:.3f}",
        f"{row.recall:.3f}",
        f"{row.f1:.3f}",
        f"{row.iteration_time_s:.1f}",
        row.variant_label,
    ]
    if with_matching:
        cells.append("yes" if row.matching_enabled else "no")
    cells.extend([str(row.json_errors), str(row.total_iterations), f"{row.failure_percent:.2f}%"])
    return cells


def render_report(report: RunReport, fmt: str) -> str:
    """Render a report deterministically (no timestamps, LF endings)."""
    if fmt not in _EXTENSIONS:
        raise ValueError(f"unknown report format {fmt!r}")
    with_matching = report.any_matching
    columns = [c for c in _COLUMNS if with_matching or c != "Matching"]
    rows = [_row_cells(r, with_matching) for r in report.rows]

    if fmt == "json":
        doc = []
        for r in report.rows:
            doc.append(
                {
                    "model_id": r.model_id,
                    "entity_class": r.entity_class.value,
                    "variant_label": r.variant_label,
                    "matching_enabled": r.matching_enabled,
                    "accuracy": r.accuracy,
                    "precision": r.precision,
                    "recall": r.recall,
                    "f1": r.f1,
                    "iteration_time_s": r.iteration_time_s,
                    "json_errors": r.json_errors,
                    "total_iterations": r.total_iterations,
                    "failure_percent": r.failure_percent,
                    "concurrent_articles": report.concurrent_articles,
                }
            )
        return json.dumps(doc, ensure_ascii=False, indent=2) + "\n"

    if fmt == "csv":
        if report.concurrent_articles:
            columns = columns + ["Concurrent articles"]
            rows = [r + ["yes"] for r in rows]
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(columns)
        writer.writerows(rows)
        return buf.getvalue()

    widths = [max(len(columns[i]), *(len(r[i]) for r in rows)) if rows else len(columns[i]) for i in range(len(columns))]
    lines = [
        "| " + " | ".join(columns[i].ljust(widths[i]) for i in range(len(columns))) + " |",
        "|" + "|".join("-" * (widths[i] + 2) for i in range(len(columns))) + "|",
    ]
    for r in rows:
        lines.append("| " + " | ".join(r[i].ljust(widths[i]) for i in range(len(columns))) + " |")
    text = "\n".join(lines) + "\n"
    if report.concurrent_articles:
        text += "\nArticles ran concurrently; iteration times are not comparable to sequential runs.\n"
    return text


def emit_report(report: RunReport, fmt: str, path: str | Path) -> Path:
    if not report.rows:
        log.warning("emitting an empty report to %s", path)
    p = Path(path)
    p.parent.mkdir(parents=True, exist_ok=True)
    p.write_text(render_report(report, fmt), encoding="utf-8", newline="\n")
    return p
