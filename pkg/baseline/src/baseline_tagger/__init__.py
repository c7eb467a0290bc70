"""Conventional NER baseline adapter for the extraction workbench."""

__version__ = "0.1.0"
