"""Workbench for LLM-based person/organization extraction from
financial-crime news: benchmark curation, prompt ablations, semantic
matching of entity mentions, and scoring."""

__version__ = "0.1.0"
