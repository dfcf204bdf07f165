"""Training front-end, model files, and corpus-level prediction.

Model files are versioned JSON with a kind tag; bag-of-words models inline
their fitted vocabulary so a model file is self-contained. Prediction emits
one (label, score) per article: probability for logistic kinds, margin for
the SVM, flood vote fraction for the forest, 1/0 for the keyword rule.
"""

from __future__ import annotations

import json
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path
from typing import Mapping, Sequence

import numpy as np

from ..corpus import Article, Annotation, Label
from ..embeddings import EmbeddingSet
from ..errors import DataError
from ..textfeat import (
    VectorizerConfig,
    Vocabulary,
    document_text,
    fit_vocabulary,
    transform_matrix,
)
from .forest import ForestConfig, ForestModel, TreeNode, train_forest
from .keyword import KeywordRule, keyword_predict
from .linear import LinearConfig, LinearModel, ModelKind, train_embedding_head, train_logistic, train_svm

FORMAT_NAME = "floodlens-model"
FORMAT_VERSION = 1

CLASSIFIER_ORDER = ("keyword", "logistic", "svm", "forest", "embedding_head")
CLASSIFIER_TITLES = {
    "keyword": "Keywords",
    "logistic": "Logistic Regression",
    "svm": "SVM",
    "forest": "Random Forest",
    "embedding_head": "Embedding Head",
}


@dataclass
class ModelBundle:
    classifier: str
    keyword_rule: KeywordRule | None = None
    vocabulary: Vocabulary | None = None
    linear: LinearModel | None = None
    forest: ForestModel | None = None
    # training configuration, persisted with the model for reproducibility
    config: dict | None = None


def train_classifier(
    classifier: str,
    articles_by_id: Mapping[str, Article],
    train_annotations: Sequence[Annotation],
    vectorizer_config: VectorizerConfig | None = None,
    linear_config: LinearConfig | None = None,
    forest_config: ForestConfig | None = None,
    embeddings: EmbeddingSet | None = None,
    keyword_rule: KeywordRule | None = None,
    threads: int = 1,
) -> ModelBundle:
    if classifier not in CLASSIFIER_ORDER:
        raise DataError(f"unknown classifier {classifier!r} (choose from {CLASSIFIER_ORDER})")
    if classifier == "keyword":
        rule = keyword_rule or KeywordRule()
        return ModelBundle(
            classifier="keyword", keyword_rule=rule, config={"stems": list(rule.stems)}
        )

    missing = [a.article_id for a in train_annotations if a.article_id not in articles_by_id]
    if missing:
        raise DataError(f"annotated article {missing[0]!r} not found in corpus")
    y = np.array(
        [1.0 if a.label is Label.FLOOD else 0.0 for a in train_annotations], dtype=np.float64
    )

    def linear_config_dict(config: LinearConfig) -> dict:
        return {
            "lam": config.lam,
            "epochs": config.epochs,
            "learning_rate": config.learning_rate,
            "seed": config.seed,
        }

    if classifier == "embedding_head":
        if embeddings is None:
            raise DataError("embedding_head training requires an embedding file")
        labels = {
            a.article_id: 1 if a.label is Label.FLOOD else 0 for a in train_annotations
        }
        config = linear_config or LinearConfig()
        model, _ = train_embedding_head(embeddings.as_dict(), labels, config)
        return ModelBundle(
            classifier="embedding_head", linear=model, config=linear_config_dict(config)
        )

    docs = [
        document_text(articles_by_id[a.article_id].title, articles_by_id[a.article_id].body)
        for a in train_annotations
    ]
    vocab = fit_vocabulary(docs, vectorizer_config)
    X = transform_matrix(docs, vocab)
    if classifier == "logistic":
        config = linear_config or LinearConfig()
        return ModelBundle(
            classifier="logistic",
            vocabulary=vocab,
            linear=train_logistic(X, y, config),
            config=linear_config_dict(config),
        )
    if classifier == "svm":
        config = linear_config or LinearConfig(epochs=50)
        return ModelBundle(
            classifier="svm",
            vocabulary=vocab,
            linear=train_svm(X, y, config),
            config=linear_config_dict(config),
        )
    fconfig = forest_config or ForestConfig()
    return ModelBundle(
        classifier="forest",
        vocabulary=vocab,
        forest=train_forest(X, y.astype(np.int64), fconfig, threads=threads),
        config={
            "n_trees": fconfig.n_trees,
            "max_depth": fconfig.max_depth,
            "seed": fconfig.seed,
        },
    )


def predict_corpus(
    bundle: ModelBundle,
    articles: Sequence[Article],
    embeddings: EmbeddingSet | None = None,
    threads: int = 1,
) -> dict[str, tuple[Label, float]]:
    if bundle.classifier == "keyword":
        out = {}
        for article in articles:
            label = keyword_predict(article, bundle.keyword_rule)
            out[article.id] = (label, 1.0 if label is Label.FLOOD else 0.0)
        return out

    if bundle.classifier == "embedding_head":
        if embeddings is None:
            raise DataError("embedding_head prediction requires an embedding file")
        subset = embeddings.subset([a.id for a in articles])
        probs = bundle.linear.predict_proba(subset.rows.astype(np.float64))
        return {
            a.id: (Label.FLOOD if p > 0.5 else Label.NOT_FLOOD, float(p))
            for a, p in zip(articles, probs)
        }

    docs = [document_text(a.title, a.body) for a in articles]
    X = _transform_threaded(docs, bundle.vocabulary, threads)
    if bundle.classifier == "forest":
        fractions = bundle.forest.vote_fractions(X)
        return {
            a.id: (Label.FLOOD if f > 0.5 else Label.NOT_FLOOD, float(f))
            for a, f in zip(articles, fractions)
        }
    if bundle.linear.kind is ModelKind.LOGISTIC:
        scores = bundle.linear.predict_proba(X)
        cut = 0.5
    else:
        scores = bundle.linear.decision(X)
        cut = 0.0
    return {
        a.id: (Label.FLOOD if s > cut else Label.NOT_FLOOD, float(s))
        for a, s in zip(articles, scores)
    }


def _transform_threaded(docs: Sequence[str], vocab: Vocabulary, threads: int):
    from scipy import sparse

    if threads <= 1 or len(docs) < 256:
        return transform_matrix(docs, vocab)
    chunk = (len(docs) + threads - 1) // threads
    pieces = [docs[i : i + chunk] for i in range(0, len(docs), chunk)]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        mats = list(pool.map(lambda d: transform_matrix(d, vocab), pieces))
    return sparse.vstack(mats, format="csr")


# ---------------------------------------------------------------------------
# Model files
# ---------------------------------------------------------------------------


def _vocab_to_json(vocab: Vocabulary) -> dict:
    terms = sorted(vocab.index, key=vocab.index.get)
    return {
        "terms": terms,
        "df": [vocab.df[t] for t in terms],
        "n_docs": vocab.n_docs,
        "config": {
            "lowercase": vocab.config.lowercase,
            "min_df": vocab.config.min_df,
            "max_features": vocab.config.max_features,
            "ngram_min": vocab.config.ngram_min,
            "ngram_max": vocab.config.ngram_max,
        },
    }


def _vocab_from_json(obj: dict) -> Vocabulary:
    return Vocabulary(
        index={t: i for i, t in enumerate(obj["terms"])},
        df=dict(zip(obj["terms"], obj["df"])),
        n_docs=obj["n_docs"],
        config=VectorizerConfig(**obj["config"]),
    )


def _tree_to_json(node: TreeNode) -> dict:
    if node.is_leaf:
        return {"c": list(node.counts)}
    return {
        "f": node.feature,
        "t": node.threshold,
        "c": list(node.counts),
        "l": _tree_to_json(node.left),
        "r": _tree_to_json(node.right),
    }


def _tree_from_json(obj: dict) -> TreeNode:
    counts = (obj["c"][0], obj["c"][1])
    if "f" not in obj:
        return TreeNode(counts=counts)
    return TreeNode(
        feature=obj["f"],
        threshold=obj["t"],
        counts=counts,
        left=_tree_from_json(obj["l"]),
        right=_tree_from_json(obj["r"]),
    )


def save_model(bundle: ModelBundle, path: str | Path) -> None:
    doc: dict = {"format": FORMAT_NAME, "version": FORMAT_VERSION, "kind": bundle.classifier}
    if bundle.config is not None:
        doc["config"] = bundle.config
    if bundle.keyword_rule is not None:
        doc["stems"] = list(bundle.keyword_rule.stems)
    if bundle.vocabulary is not None:
        doc["vocabulary"] = _vocab_to_json(bundle.vocabulary)
    if bundle.linear is not None:
        doc["linear"] = {
            "kind": bundle.linear.kind.value,
            "weights": [float(w) for w in bundle.linear.weights],
            "bias": float(bundle.linear.bias),
            "loss_log": [float(v) for v in bundle.linear.loss_log],
        }
    if bundle.forest is not None:
        doc["forest"] = {
            "n_features": bundle.forest.n_features,
            "n_trees": bundle.forest.config.n_trees,
            "max_depth": bundle.forest.config.max_depth,
            "seed": bundle.forest.config.seed,
            "trees": [_tree_to_json(t) for t in bundle.forest.trees],
        }
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(doc, fh, sort_keys=True)
        fh.write("\n")


def load_model(path: str | Path) -> ModelBundle:
    path = Path(path)
    if not path.exists():
        raise DataError(f"model file {path} does not exist")
    with open(path, encoding="utf-8") as fh:
        try:
            doc = json.load(fh)
        except json.JSONDecodeError as exc:
            raise DataError(f"{path}: not a valid model file ({exc.msg})") from None
    if doc.get("format") != FORMAT_NAME:
        raise DataError(f"{path}: not a {FORMAT_NAME} file")
    if doc.get("version") != FORMAT_VERSION:
        raise DataError(f"{path}: unsupported model version {doc.get('version')}")
    kind = doc.get("kind")
    if kind not in CLASSIFIER_ORDER:
        raise DataError(f"{path}: unknown model kind {kind!r}")
    bundle = ModelBundle(classifier=kind, config=doc.get("config"))
    if "stems" in doc:
        bundle.keyword_rule = KeywordRule(stems=tuple(doc["stems"]))
    if "vocabulary" in doc:
        bundle.vocabulary = _vocab_from_json(doc["vocabulary"])
    if "linear" in doc:
        bundle.linear = LinearModel(
            weights=np.array(doc["linear"]["weights"], dtype=np.float64),
            bias=float(doc["linear"]["bias"]),
            kind=ModelKind(doc["linear"]["kind"]),
            loss_log=list(doc["linear"]["loss_log"]),
        )
    if "forest" in doc:
        forest = doc["forest"]
        bundle.forest = ForestModel(
            trees=[_tree_from_json(t) for t in forest["trees"]],
            n_features=forest["n_features"],
            config=ForestConfig(
                n_trees=forest["n_trees"], max_depth=forest["max_depth"], seed=forest["seed"]
            ),
        )
    return bundle
