"""Tokenization, vocabulary fitting and sparse TF-IDF features.

The weighting is the smoothed form used throughout the bag-of-words
classifiers: ``idf(t) = ln((1 + N) / (1 + df(t))) + 1`` followed by L2
normalization of each document vector, so weights stay positive and no
division by zero is possible for unseen terms.
"""

from __future__ import annotations

import csv
import json
import math
import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np
from scipy import sparse

from .errors import DataError

# Unicode alphanumeric runs, underscore excluded; punctuation separates tokens.
_TOKEN_RE = re.compile(r"[^\W_]+", re.UNICODE)


def tokenize(text: str, lowercase: bool = True) -> list[str]:
    """Split text into lowercased alphanumeric tokens, dropping length-1 runs."""
    if lowercase:
        text = text.lower()
    return [t for t in _TOKEN_RE.findall(text) if len(t) >= 2]


@dataclass(frozen=True)
class VectorizerConfig:
    lowercase: bool = True
    min_df: int = 2
    max_features: int = 50_000
    ngram_min: int = 1
    ngram_max: int = 2


@dataclass
class Vocabulary:
    index: dict[str, int]
    df: dict[str, int]
    n_docs: int
    config: VectorizerConfig = field(default_factory=VectorizerConfig)

    def __len__(self) -> int:
        return len(self.index)

    def idf(self, term: str) -> float:
        return math.log((1 + self.n_docs) / (1 + self.df[term])) + 1.0


@dataclass(frozen=True)
class FeatureVector:
    """Sorted sparse vector; L2 norm is 1 unless the vector is all-zero."""

    indices: tuple[int, ...]
    weights: tuple[float, ...]
    dim: int

    def norm(self) -> float:
        return math.sqrt(sum(w * w for w in self.weights))


def ngrams(tokens: Sequence[str], config: VectorizerConfig) -> list[str]:
    out: list[str] = []
    for n in range(config.ngram_min, config.ngram_max + 1):
        for i in range(len(tokens) - n + 1):
            out.append(" ".join(tokens[i : i + n]))
    return out


def fit_vocabulary(docs: Iterable[str], config: VectorizerConfig | None = None) -> Vocabulary:
    """Fit term->index over the corpus.

    Terms with df < min_df are dropped. When more than max_features survive,
    the cut keeps the highest document frequencies, breaking ties by
    lexicographic term order; indices are then assigned in term order so the
    mapping is reproducible run to run.
    """
    config = config or VectorizerConfig()
    df: dict[str, int] = {}
    n_docs = 0
    for doc in docs:
        n_docs += 1
        for term in set(ngrams(tokenize(doc, config.lowercase), config)):
            df[term] = df.get(term, 0) + 1
    if n_docs == 0:
        raise DataError("cannot fit a vocabulary on an empty corpus")
    kept = [t for t, c in df.items() if c >= config.min_df]
    if not kept:
        raise DataError(f"empty vocabulary: no term reaches min_df={config.min_df}")
    if len(kept) > config.max_features:
        kept.sort(key=lambda t: (-df[t], t))
        kept = kept[: config.max_features]
    kept.sort()
    return Vocabulary(
        index={t: i for i, t in enumerate(kept)},
        df={t: df[t] for t in kept},
        n_docs=n_docs,
        config=config,
    )


def transform(doc: str, vocab: Vocabulary) -> FeatureVector:
    """TF-IDF vector for one document; out-of-vocabulary terms are ignored."""
    counts: dict[int, int] = {}
    for term in ngrams(tokenize(doc, vocab.config.lowercase), vocab.config):
        idx = vocab.index.get(term)
        if idx is not None:
            counts[idx] = counts.get(idx, 0) + 1
    if not counts:
        return FeatureVector(indices=(), weights=(), dim=len(vocab))
    inv_df = {i: t for t, i in vocab.index.items()}
    items = sorted(counts.items())
    weights = [tf * vocab.idf(inv_df[i]) for i, tf in items]
    norm = math.sqrt(sum(w * w for w in weights))
    weights = [w / norm for w in weights]
    return FeatureVector(
        indices=tuple(i for i, _ in items), weights=tuple(weights), dim=len(vocab)
    )


def transform_matrix(docs: Sequence[str], vocab: Vocabulary) -> sparse.csr_matrix:
    """Stack per-document TF-IDF vectors into a CSR design matrix."""
    indptr = [0]
    indices: list[int] = []
    data: list[float] = []
    for doc in docs:
        vec = transform(doc, vocab)
        indices.extend(vec.indices)
        data.extend(vec.weights)
        indptr.append(len(indices))
    return sparse.csr_matrix(
        (np.asarray(data, dtype=np.float64), np.asarray(indices, dtype=np.int32), indptr),
        shape=(len(docs), len(vocab)),
    )


def document_text(title: str, body: str) -> str:
    """Title and body concatenated; titles carry strong flood cues."""
    return f"{title} {body}"


def save_vocabulary(vocab: Vocabulary, path: str | Path) -> None:
    """Persist as CSV term,index,df with a JSON sidecar for config and N."""
    path = Path(path)
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["term", "index", "df"])
        for term in sorted(vocab.index, key=vocab.index.get):
            writer.writerow([term, vocab.index[term], vocab.df[term]])
    sidecar = {
        "n_docs": vocab.n_docs,
        "config": {
            "lowercase": vocab.config.lowercase,
            "min_df": vocab.config.min_df,
            "max_features": vocab.config.max_features,
            "ngram_min": vocab.config.ngram_min,
            "ngram_max": vocab.config.ngram_max,
        },
    }
    with open(path.with_suffix(path.suffix + ".json"), "w", encoding="utf-8") as fh:
        json.dump(sidecar, fh, indent=2, sort_keys=True)
        fh.write("\n")


def load_vocabulary(path: str | Path) -> Vocabulary:
    path = Path(path)
    sidecar_path = path.with_suffix(path.suffix + ".json")
    if not path.exists() or not sidecar_path.exists():
        raise DataError(f"vocabulary {path} or its JSON sidecar is missing")
    with open(sidecar_path, encoding="utf-8") as fh:
        sidecar = json.load(fh)
    config = VectorizerConfig(**sidecar["config"])
    index: dict[str, int] = {}
    df: dict[str, int] = {}
    with open(path, newline="", encoding="utf-8") as fh:
        for row in csv.DictReader(fh):
            index[row["term"]] = int(row["index"])
            df[row["term"]] = int(row["df"])
    vocab = Vocabulary(index=index, df=df, n_docs=int(sidecar["n_docs"]), config=config)
    if sorted(index.values()) != list(range(len(index))):
        raise DataError(f"vocabulary {path} has non-dense indices")
    return vocab
