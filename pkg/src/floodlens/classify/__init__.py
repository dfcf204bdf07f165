"""The five flood-event classifiers and their evaluation metrics.

Row order everywhere (tables, eval output): keyword heuristic, logistic
regression, linear SVM, random forest, embedding head.
"""

from .keyword import KeywordRule, keyword_predict
from .linear import (
    LinearConfig,
    LinearModel,
    ModelKind,
    logistic_loss_and_grad,
    train_embedding_head,
    train_logistic,
    train_svm,
)
from .forest import ForestConfig, ForestModel, train_forest
from .metrics import EvalMetrics, evaluate
from .persist import (
    CLASSIFIER_ORDER,
    CLASSIFIER_TITLES,
    ModelBundle,
    load_model,
    predict_corpus,
    save_model,
    train_classifier,
)

__all__ = [
    "KeywordRule",
    "keyword_predict",
    "LinearConfig",
    "LinearModel",
    "ModelKind",
    "logistic_loss_and_grad",
    "train_logistic",
    "train_svm",
    "train_embedding_head",
    "ForestConfig",
    "ForestModel",
    "train_forest",
    "EvalMetrics",
    "evaluate",
    "CLASSIFIER_ORDER",
    "CLASSIFIER_TITLES",
    "ModelBundle",
    "save_model",
    "load_model",
    "predict_corpus",
    "train_classifier",
]
