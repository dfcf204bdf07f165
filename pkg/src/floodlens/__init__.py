"""Flood event extraction from news corpora, validated against satellite and
disaster-database series.

The package is organized as one module per pipeline stage (corpus, textfeat,
classify, geodate, series, refdata, stats, synth) plus a FastAPI service in
``floodlens.service`` and a thin CLI client in ``floodlens.cli``.
"""

__version__ = "0.1.0"
