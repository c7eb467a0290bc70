"""Command-line interface.

Subcommands: ``extract``, ``evaluate``, ``experiment``, ``stats``,
``ingest-baseline``, ``serve``. Most take ``--config <file>`` (JSON schema
in the README) plus overrides; the endpoint URL can also be overridden with
the FCNER_ENDPOINT environment variable.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

from . import experiment, service
from .corpus import compute_stats, load_dataset
from .extraction import extract_entities, write_predictions
from .gateway import GatewayMode, LlmGateway
from .prompts import PromptLibrary, enumerate_variants

log = logging.getLogger(__name__)


def _add_config_args(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", required=True, help="experiment config file (JSON)")
    parser.add_argument("--mode", choices=["live", "record", "replay"], help="gateway mode override")
    parser.add_argument("--class", dest="entity_class", choices=["individual", "organization", "both"],
                        help="entity class override")
    parser.add_argument("--matching", choices=["on", "off"], help="matching override")
    parser.add_argument("--out", help="output directory (default: timestamped dir under the config's out_dir)")


def _overrides(args: argparse.Namespace) -> dict:
    out: dict = {}
    if getattr(args, "mode", None):
        out["mode"] = args.mode
    if getattr(args, "entity_class", None):
        out["entity_class"] = args.entity_class
    if getattr(args, "matching", None):
        out["matching"] = args.matching == "on"
    return out


def _load(args: argparse.Namespace) -> experiment.ExperimentConfig:
    return experiment.load_config(args.config, **_overrides(args))


def cmd_experiment(args: argparse.Namespace) -> int:
    config = _load(args)
    report, run_dir = experiment.run_experiment(config, args.out)
    print(experiment.render_report(report, "markdown-table"), end="")
    print(f"run artifacts in {run_dir}", file=sys.stderr)
    return 0


def cmd_extract(args: argparse.Namespace) -> int:
    config = _load(args)
    articles, _ = load_dataset(config.dataset)
    gateway = LlmGateway(config.gateway_config())
    library = PromptLibrary(config.prompt_dir)
    if config.mode in (GatewayMode.LIVE, GatewayMode.RECORD):
        for model in sorted({*config.models, config.structuring_model}):
            if not gateway.health_check(model):
                raise experiment.ConfigError(f"model {model!r} not served by {gateway.config.endpoint}")
    predictions = []
    for entity_class in config.entity_classes:
        for model in config.models:
            for variant in enumerate_variants(entity_class, [set(v) for v in config.variants]):
                for article in articles:
                    predictions.append(
                        extract_entities(
                            article,
                            entity_class,
                            variant,
                            model,
                            gateway=gateway,
                            library=library,
                            structuring_model_id=config.structuring_model,
                            params=config.chat_params(),
                        )
                    )
    out = Path(args.out or "predictions.json")
    if out.is_dir():
        out = out / "predictions.json"
    write_predictions(out, predictions)
    print(f"wrote {len(predictions)} predictions to {out}", file=sys.stderr)
    return 0


def _evaluate_predictions(args: argparse.Namespace) -> int:
    config = _load(args)
    articles, gold = load_dataset(config.dataset)
    predictions = experiment.ingest_external_predictions(args.predictions, articles, gold)
    # scope to the configured classes (a predictions file may carry both)
    if getattr(args, "entity_class", None) or len(config.entity_classes) == 1:
        predictions = [p for p in predictions if p.entity_class in config.entity_classes]
    needs_gateway = config.matcher == "llm"
    gateway = LlmGateway(config.gateway_config()) if needs_gateway else None
    library = PromptLibrary(config.prompt_dir)
    report, matches = experiment.score_predictions(
        predictions,
        articles,
        gold,
        use_matching=config.matching_enabled,
        matcher=config.matcher,
        matching_model=config.matching_model,
        gateway=gateway,
        library=library,
    )
    out_dir = Path(args.out) if args.out else None
    if out_dir:
        out_dir.mkdir(parents=True, exist_ok=True)
        for fmt, ext in (("markdown-table", "md"), ("csv", "csv"), ("json", "json")):
            experiment.emit_report(report, fmt, out_dir / f"report.{ext}")
        (out_dir / "matches.json").write_text(
            json.dumps([m.to_dict() for m in matches], ensure_ascii=False, indent=2) + "\n",
            encoding="utf-8",
        )
    print(experiment.render_report(report, "markdown-table"), end="")
    return 0


def cmd_evaluate(args: argparse.Namespace) -> int:
    return _evaluate_predictions(args)


def cmd_ingest_baseline(args: argparse.Namespace) -> int:
    # same scoring path as evaluate; ingest_external_predictions already
    # validates the file against the dataset
    return _evaluate_predictions(args)


def cmd_stats(args: argparse.Namespace) -> int:
    articles, gold = load_dataset(args.dataset)
    stats = compute_stats(articles)
    individuals = sum(len(g.individuals) for g in gold)
    organizations = sum(len(g.organizations) for g in gold)
    doc = {
        "articles": stats.article_count,
        "sentences": stats.sentence_count,
        "words": stats.word_count,
        "characters": stats.char_count,
        "avg_sentence_len_words": stats.avg_sentence_len_words,
        "gold_individuals": individuals,
        "gold_organizations": organizations,
    }
    if args.format == "json":
        print(json.dumps(doc, indent=2))
    else:
        for key, value in doc.items():
            print(f"{key}: {value}")
    return 0


def cmd_serve(args: argparse.Namespace) -> int:
    import uvicorn

    articles, _ = load_dataset(args.dataset)
    preann = None
    if args.preannotations:
        predictions = experiment.ingest_external_predictions(args.preannotations, articles, [])
        preann = service.preannotations_from_predictions(predictions)
    gateway = None
    if args.fixtures or args.mode != "replay":
        from .gateway import GatewayConfig

        gateway = LlmGateway(
            GatewayConfig(mode=GatewayMode(args.mode), base_url=args.endpoint, fixture_dir=args.fixtures)
        )
    app = service.create_app(
        articles,
        args.store,
        preannotations=preann,
        preann_source=args.preann_source,
        gateway=gateway,
        verify_model=args.verify_model,
        ui_dir=args.ui,
    )
    uvicorn.run(app, host=args.host, port=args.port)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="fcner", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("experiment", help="run a model x variant grid and emit reports")
    _add_config_args(p)
    p.set_defaults(func=cmd_experiment)

    p = sub.add_parser("extract", help="run extraction only and write a predictions file")
    _add_config_args(p)
    p.set_defaults(func=cmd_extract)

    p = sub.add_parser("evaluate", help="score an existing predictions file against the dataset")
    _add_config_args(p)
    p.add_argument("--predictions", required=True, help="predictions file to score")
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("ingest-baseline", help="validate and score an external baseline's predictions")
    _add_config_args(p)
    p.add_argument("--predictions", required=True, help="baseline predictions file")
    p.set_defaults(func=cmd_ingest_baseline)

    p = sub.add_parser("stats", help="corpus statistics for a dataset file")
    p.add_argument("--dataset", required=True)
    p.add_argument("--format", choices=["text", "json"], default="text")
    p.set_defaults(func=cmd_stats)

    p = sub.add_parser("serve", help="run the annotation service (and UI, when built)")
    p.add_argument("--dataset", required=True)
    p.add_argument("--store", required=True, help="draft storage directory")
    p.add_argument("--preannotations", help="predictions file used as the pre-annotation source")
    p.add_argument("--preann-source", choices=["baseline", "llm"], default="baseline")
    p.add_argument("--mode", choices=["live", "record", "replay"], default="replay")
    p.add_argument("--endpoint", default="http://localhost:11434")
    p.add_argument("--fixtures", help="fixture directory for record/replay verification")
    p.add_argument("--verify-model", default="gemma2:9b")
    p.add_argument("--ui", help="directory with the built annotation UI (served at /)")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8765)
    p.set_defaults(func=cmd_serve)

    return parser


def main(argv: list[str] | None = None) -> int:
    logging.basicConfig(level=logging.INFO, format="%(levelname)s %(name)s: %(message)s")
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (experiment.ConfigError, ValueError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
