"""Random forest with Gini splits on seeded bootstrap samples.

Each node evaluates ceil(sqrt(V)) features drawn without replacement from a
per-tree RNG stream; the stream for tree k is spawned from (seed, k) so trees
can be grown in any order, or in parallel, without changing the forest.
Ties in the vote go to not-flood.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np
from scipy import sparse

from ..errors import DataError


@dataclass(frozen=True)
class ForestConfig:
    n_trees: int = 100
    max_depth: int = 32
    seed: int = 0


@dataclass
class TreeNode:
    feature: int | None = None
    threshold: float | None = None
    left: "TreeNode | None" = None
    right: "TreeNode | None" = None
    counts: tuple[int, int] = (0, 0)  # (not flood, flood) at this node

    @property
    def is_leaf(self) -> bool:
        return self.feature is None

    def leaf_label(self) -> int:
        neg, pos = self.counts
        return 1 if pos > neg else 0


@dataclass
class ForestModel:
    trees: list[TreeNode]
    n_features: int
    config: ForestConfig = field(default_factory=ForestConfig)

    def predict(self, X) -> np.ndarray:
        votes = self.vote_fractions(X)
        return (votes > 0.5).astype(np.int64)

    def vote_fractions(self, X) -> np.ndarray:
        dense = X.toarray() if sparse.issparse(X) else np.asarray(X, dtype=np.float64)
        out = np.zeros(dense.shape[0], dtype=np.float64)
        for row in range(dense.shape[0]):
            flood_votes = sum(_route(tree, dense[row]).leaf_label() for tree in self.trees)
            out[row] = flood_votes / len(self.trees)
        return out


def _route(node: TreeNode, row: np.ndarray) -> TreeNode:
    while not node.is_leaf:
        node = node.left if row[node.feature] < node.threshold else node.right
    return node


def _gini_best_split(values: np.ndarray, labels: np.ndarray) -> tuple[float, float] | None:
    """Best (threshold, weighted gini) for one feature, or None if constant."""
    order = np.argsort(values, kind="stable")
    sv = values[order]
    sy = labels[order]
    m = len(sv)
    boundary = np.nonzero(sv[:-1] < sv[1:])[0]
    if len(boundary) == 0:
        return None
    pos_prefix = np.cumsum(sy)
    total_pos = pos_prefix[-1]
    n_left = boundary + 1.0
    n_right = m - n_left
    pos_left = pos_prefix[boundary]
    pos_right = total_pos - pos_left
    gini = 2.0 * (
        pos_left * (n_left - pos_left) / n_left + pos_right * (n_right - pos_right) / n_right
    ) / m
    best = int(np.argmin(gini))  # first minimum -> smallest threshold on ties
    threshold = (sv[boundary[best]] + sv[boundary[best] + 1]) / 2.0
    return float(threshold), float(gini[best])


def _node_column(
    csc: sparse.csc_matrix,
    feature: int,
    positions: np.ndarray,
    n_unique: int,
    inverse: np.ndarray,
) -> np.ndarray:
    """Dense column restricted to a bootstrap sample (duplicates expanded)."""
    start, end = csc.indptr[feature], csc.indptr[feature + 1]
    rows = csc.indices[start:end]
    vals = csc.data[start:end]
    unique_col = np.zeros(n_unique, dtype=np.float64)
    local = positions[rows]
    inside = local >= 0
    unique_col[local[inside]] = vals[inside]
    return unique_col[inverse]


def _grow(
    csc: sparse.csc_matrix,
    y: np.ndarray,
    sample: np.ndarray,
    depth_left: int,
    n_candidates: int,
    rng: np.random.Generator,
) -> TreeNode:
    labels = y[sample]
    counts = (int(np.sum(labels == 0)), int(np.sum(labels == 1)))
    node = TreeNode(counts=counts)
    if depth_left <= 0 or counts[0] == 0 or counts[1] == 0:
        return node
    unique_rows, inverse = np.unique(sample, return_inverse=True)
    positions = np.full(csc.shape[0], -1, dtype=np.int64)
    positions[unique_rows] = np.arange(len(unique_rows))
    candidates = np.sort(rng.choice(csc.shape[1], size=n_candidates, replace=False))
    best: tuple[float, float, int] | None = None  # (gini, threshold, feature)
    best_column: np.ndarray | None = None
    for feature in candidates:
        column = _node_column(csc, int(feature), positions, len(unique_rows), inverse)
        found = _gini_best_split(column, labels)
        if found is None:
            continue
        threshold, gini = found
        if best is None or gini < best[0] - 1e-15:
            best = (gini, threshold, int(feature))
            best_column = column
    if best is None:
        return node
    _, threshold, feature = best
    mask = best_column < threshold
    node.feature = feature
    node.threshold = threshold
    node.left = _grow(csc, y, sample[mask], depth_left - 1, n_candidates, rng)
    node.right = _grow(csc, y, sample[~mask], depth_left - 1, n_candidates, rng)
    return node


def _train_one_tree(csc, y, config: ForestConfig, tree_index: int, n_candidates: int) -> TreeNode:
    rng = np.random.default_rng(np.random.SeedSequence(entropy=config.seed, spawn_key=(tree_index,)))
    n = csc.shape[0]
    bootstrap = np.sort(rng.integers(0, n, size=n))
    return _grow(csc, y, bootstrap, config.max_depth, n_candidates, rng)


def train_forest(X, y: np.ndarray, config: ForestConfig | None = None, threads: int = 1) -> ForestModel:
    config = config or ForestConfig()
    y = np.asarray(y, dtype=np.int64).ravel()
    if X.shape[0] != len(y):
        raise DataError(f"design matrix has {X.shape[0]} rows but {len(y)} labels")
    if len(np.unique(y)) < 2:
        raise DataError("training set contains a single class; cannot fit")
    csc = sparse.csc_matrix(X)
    n_candidates = min(csc.shape[1], math.ceil(math.sqrt(csc.shape[1])))
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            trees = list(
                pool.map(
                    lambda k: _train_one_tree(csc, y, config, k, n_candidates),
                    range(config.n_trees),
                )
            )
    else:
        trees = [_train_one_tree(csc, y, config, k, n_candidates) for k in range(config.n_trees)]
    return ForestModel(trees=trees, n_features=csc.shape[1], config=config)
