"""Linear classifiers: logistic regression, hinge-loss SVM, embedding head.

Logistic training is deterministic full-batch gradient descent from zero
initialization; a step is halved whenever it would raise the regularized loss
by more than 1e-9, so the recorded loss curve is non-increasing. The SVM uses
per-example subgradient descent with the 1/(lambda*t) step schedule and a
seeded example order. The embedding head is the same logistic optimizer run
on fixed document embeddings joined by article id.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field

import numpy as np
from scipy import sparse

from ..errors import DataError


class ModelKind(enum.Enum):
    LOGISTIC = "logistic"
    HINGE_SVM = "hinge_svm"


@dataclass(frozen=True)
class LinearConfig:
    lam: float = 1e-4
    epochs: int = 300
    learning_rate: float = 1.0
    seed: int = 0  # SVM example order only; logistic GD has no randomness


@dataclass
class LinearModel:
    weights: np.ndarray
    bias: float
    kind: ModelKind
    loss_log: list[float] = field(default_factory=list)

    def decision(self, X) -> np.ndarray:
        z = X @ self.weights
        return np.asarray(z).ravel() + self.bias

    def predict_proba(self, X) -> np.ndarray:
        if self.kind is not ModelKind.LOGISTIC:
            raise DataError("probabilities are only defined for logistic models")
        return _sigmoid(self.decision(X))

    def predict(self, X) -> np.ndarray:
        """1 = flood, 0 = not flood; the decision boundary itself is not flood."""
        return (self.decision(X) > 0.0).astype(np.int64)


def _sigmoid(z: np.ndarray) -> np.ndarray:
    out = np.empty_like(z)
    pos = z >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-z[pos]))
    ez = np.exp(z[~pos])
    out[~pos] = ez / (1.0 + ez)
    return out


def _check_training_inputs(X, y: np.ndarray) -> np.ndarray:
    y = np.asarray(y, dtype=np.float64).ravel()
    if X.shape[0] != len(y):
        raise DataError(f"design matrix has {X.shape[0]} rows but {len(y)} labels")
    if X.shape[1] == 0:
        raise DataError("design matrix has zero feature dimension")
    classes = np.unique(y)
    if not np.all(np.isin(classes, (0.0, 1.0))):
        raise DataError("labels must be 0 (not flood) or 1 (flood)")
    if len(classes) < 2:
        raise DataError("training set contains a single class; cannot fit")
    return y


def logistic_loss_and_grad(
    w: np.ndarray, b: float, X, y: np.ndarray, lam: float
) -> tuple[float, np.ndarray, float]:
    """Mean cross-entropy + (lam/2)||w||^2 and its exact gradient.

    Uses log(1+e^z) - y*z per example via logaddexp for stability.
    """
    n = X.shape[0]
    z = np.asarray(X @ w).ravel() + b
    loss = float(np.mean(np.logaddexp(0.0, z) - y * z) + 0.5 * lam * float(w @ w))
    residual = (_sigmoid(z) - y) / n
    grad_w = np.asarray(X.T @ residual).ravel() + lam * w
    grad_b = float(np.sum(residual))
    return loss, grad_w, grad_b


def _gradient_descent(X, y: np.ndarray, config: LinearConfig) -> LinearModel:
    w = np.zeros(X.shape[1], dtype=np.float64)
    b = 0.0
    lr = config.learning_rate
    loss, grad_w, grad_b = logistic_loss_and_grad(w, b, X, y, config.lam)
    log = []
    for _ in range(config.epochs):
        while True:
            w_next = w - lr * grad_w
            b_next = b - lr * grad_b
            loss_next, gw_next, gb_next = logistic_loss_and_grad(w_next, b_next, X, y, config.lam)
            if loss_next <= loss + 1e-9:
                break
            if lr < 1e-12:  # cannot descend further; hold position
                w_next, b_next = w, b
                loss_next, gw_next, gb_next = loss, grad_w, grad_b
                break
            lr *= 0.5
        w, b, loss, grad_w, grad_b = w_next, b_next, loss_next, gw_next, gb_next
        log.append(loss)
    return LinearModel(weights=w, bias=b, kind=ModelKind.LOGISTIC, loss_log=log)


def train_logistic(X, y: np.ndarray, config: LinearConfig | None = None) -> LinearModel:
    config = config or LinearConfig()
    y = _check_training_inputs(X, y)
    return _gradient_descent(X, y, config)


def hinge_objective(w: np.ndarray, b: float, X, y_pm: np.ndarray, lam: float) -> float:
    margins = y_pm * (np.asarray(X @ w).ravel() + b)
    return float(np.mean(np.maximum(0.0, 1.0 - margins)) + 0.5 * lam * float(w @ w))


def train_svm(X, y: np.ndarray, config: LinearConfig | None = None) -> LinearModel:
    """L2-regularized hinge loss by subgradient descent, eta_t = 1/(lam*t)."""
    config = config or LinearConfig(epochs=50)
    y = _check_training_inputs(X, y)
    y_pm = np.where(y > 0.5, 1.0, -1.0)
    n, dim = X.shape
    csr = sparse.csr_matrix(X) if not sparse.issparse(X) else X.tocsr()
    w = np.zeros(dim, dtype=np.float64)
    b = 0.0
    t = 0
    rng = np.random.default_rng(config.seed)
    log = []
    for _ in range(config.epochs):
        order = rng.permutation(n)
        for i in order:
            t += 1
            eta = 1.0 / (config.lam * t)
            row_start, row_end = csr.indptr[i], csr.indptr[i + 1]
            cols = csr.indices[row_start:row_end]
            vals = csr.data[row_start:row_end]
            margin = y_pm[i] * (float(vals @ w[cols]) + b)
            w *= 1.0 - eta * config.lam
            if margin < 1.0:
                w[cols] += eta * y_pm[i] * vals
                b += eta * y_pm[i]
        log.append(hinge_objective(w, b, csr, y_pm, config.lam))
    return LinearModel(weights=w, bias=b, kind=ModelKind.HINGE_SVM, loss_log=log)


def train_embedding_head(
    embeddings: dict[str, np.ndarray],
    labels: dict[str, int],
    config: LinearConfig | None = None,
) -> tuple[LinearModel, list[str]]:
    """Logistic head on frozen document embeddings, joined by article id.

    Returns the model and the id order used for the design matrix. Rows are
    joined by id, so permuting the embedding file never changes the result.
    """
    ids = sorted(labels)
    missing = [i for i in ids if i not in embeddings]
    if missing:
        raise DataError(f"no embedding row for article {missing[0]!r} "
                        f"({len(missing)} missing in total)")
    X = np.stack([np.asarray(embeddings[i], dtype=np.float64) for i in ids])
    y = np.array([labels[i] for i in ids], dtype=np.float64)
    model = train_logistic(X, y, config or LinearConfig())
    return model, ids
