"""Stage-1 sparse-text classifiers: multinomial naive Bayes and a linear
SVM trained by deterministic primal subgradient descent.

Both consume L2-normalized TF-IDF rows in CSR form and expose a scalar
decision value; the signed distance from the SVM boundary (or the NB
log-odds) becomes the derived open-text feature for stage 2.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..errors import ConfigError, ValidationError


@dataclass
class SparseRows:
    """Minimal CSR container for the sparse text block."""

    indptr: np.ndarray
    indices: np.ndarray
    data: np.ndarray
    n_cols: int

    def __len__(self) -> int:
        return len(self.indptr) - 1

    def row(self, i: int) -> tuple[np.ndarray, np.ndarray]:
        lo, hi = self.indptr[i], self.indptr[i + 1]
        return self.indices[lo:hi], self.data[lo:hi]

    def subset(self, rows) -> "SparseRows":
        rows = np.asarray(rows, dtype=np.int64)
        lengths = self.indptr[rows + 1] - self.indptr[rows]
        indptr = np.zeros(len(rows) + 1, dtype=np.int64)
        np.cumsum(lengths, out=indptr[1:])
        indices = np.concatenate(
            [self.indices[self.indptr[r]: self.indptr[r + 1]] for r in rows]
        ) if len(rows) else np.zeros(0, dtype=np.int64)
        data = np.concatenate(
            [self.data[self.indptr[r]: self.indptr[r + 1]] for r in rows]
        ) if len(rows) else np.zeros(0, dtype=np.float64)
        return SparseRows(indptr, indices, data, self.n_cols)

    @classmethod
    def from_feature_matrix(cls, m) -> "SparseRows":
        return cls(m.sparse_indptr, m.sparse_indices, m.sparse_data, m.vocab_size)


def _check_binary_labels(y: np.ndarray) -> np.ndarray:
    y = np.asarray(y)
    classes = np.unique(y)
    if len(classes) < 2:
        raise ValidationError("stage-1 training needs both classes present")
    if not set(classes.tolist()) <= {0, 1}:
        raise ValidationError(f"labels must be 0/1, got {classes}")
    return y.astype(np.int8)


@dataclass
class NaiveBayesModel:
    """Multinomial NB with additive smoothing over term weights."""

    algorithm: str = field(default="multinomial_nb", init=False)
    alpha: float = 0.1
    class_log_prior: np.ndarray | None = None
    feature_log_prob: np.ndarray | None = None  # (2, V)

    def fit(self, X: SparseRows, y: np.ndarray) -> "NaiveBayesModel":
        if self.alpha <= 0:
            raise ConfigError("NB smoothing alpha must be > 0")
        y = _check_binary_labels(y)
        n = len(X)
        row_of = np.repeat(np.arange(n), np.diff(X.indptr))
        v = X.n_cols
        counts = np.zeros((2, v), dtype=np.float64)
        for c in (0, 1):
            sel = y[row_of] == c
            if np.any(sel):
                counts[c] = np.bincount(
                    X.indices[sel], weights=X.data[sel], minlength=v
                )
        totals = counts.sum(axis=1)
        self.feature_log_prob = np.log(counts + self.alpha) - np.log(
            totals[:, None] + self.alpha * v
        )
        n_per_class = np.array([(y == 0).sum(), (y == 1).sum()], dtype=np.float64)
        self.class_log_prior = np.log(n_per_class) - np.log(n)
        return self

    def log_odds(self, X: SparseRows) -> np.ndarray:
        """log P(1|x) - log P(0|x) up to the shared normalizer."""
        out = np.full(len(X), self.class_log_prior[1] - self.class_log_prior[0])
        delta = self.feature_log_prob[1] - self.feature_log_prob[0]
        for i in range(len(X)):
            idx, vals = X.row(i)
            out[i] += float(np.dot(vals, delta[idx]))
        return out

    def decision_values(self, X: SparseRows) -> np.ndarray:
        return self.log_odds(X)

    def predict(self, X: SparseRows) -> np.ndarray:
        return (self.decision_values(X) > 0).astype(np.int8)


@dataclass
class LinearSvmModel:
    """Linear SVM minimizing 0.5*||w||^2 + C * sum hinge.

    Trained as Pegasos-style subgradient descent with lambda = 1/(n*C),
    step 1/(lambda*t), a fixed epoch count, and a seeded per-epoch shuffle.
    The bias rides along as an augmented always-on coordinate.
    """

    algorithm: str = field(default="linear_svm", init=False)
    c: float = 1e-6
    epochs: int = 30
    seed: int = 0
    weights: np.ndarray | None = None  # (V+1,), last entry is the bias

    def fit(self, X: SparseRows, y: np.ndarray) -> "LinearSvmModel":
        if self.c <= 0:
            raise ConfigError("SVM C must be > 0")
        y = _check_binary_labels(y)
        ypm = y.astype(np.float64) * 2.0 - 1.0
        n = len(X)
        v = X.n_cols
        lam = 1.0 / (n * self.c)
        w = np.zeros(v + 1, dtype=np.float64)
        rng = np.random.default_rng(self.seed)
        t = 0
        for _ in range(self.epochs):
            order = rng.permutation(n)
            for i in order:
                t += 1
                eta = 1.0 / (lam * t)
                idx, vals = X.row(i)
                margin = ypm[i] * (float(np.dot(vals, w[idx])) + w[v])
                w *= 1.0 - eta * lam
                if margin < 1.0:
                    w[idx] += eta * ypm[i] * vals
                    w[v] += eta * ypm[i]
        self.weights = w
        return self

    def decision_values(self, X: SparseRows) -> np.ndarray:
        w = self.weights
        v = len(w) - 1
        out = np.full(len(X), w[v])
        for i in range(len(X)):
            idx, vals = X.row(i)
            out[i] += float(np.dot(vals, w[idx]))
        return out

    def predict(self, X: SparseRows) -> np.ndarray:
        return (self.decision_values(X) > 0).astype(np.int8)


def train_stage1(X: SparseRows, y, algorithm: str, hyper: dict | None = None, seed: int = 0):
    """Train the sparse-text stage; ``hyper`` overrides the defaults."""
    hyper = hyper or {}
    if algorithm == "multinomial_nb":
        return NaiveBayesModel(alpha=float(hyper.get("nb_alpha", 0.1))).fit(X, y)
    if algorithm == "linear_svm":
        return LinearSvmModel(
            c=float(hyper.get("svm_c", 1e-6)),
            epochs=int(hyper.get("svm_epochs", 30)),
            seed=seed,
        ).fit(X, y)
    raise ConfigError(f"unknown stage-1 algorithm {algorithm!r}")


def derived_feature(model, X: SparseRows) -> np.ndarray:
    """Scalar open-text feature per row.

    Linear SVM: signed distance (w.x + b)/||w|| (invariant under positive
    rescaling of (w, b)). Naive Bayes fallback: class log-odds.
    """
    if isinstance(model, LinearSvmModel):
        w = model.weights
        norm = float(np.linalg.norm(w[:-1]))
        if norm == 0.0:
            raise ValidationError("derived feature undefined: zero SVM weight vector")
        return model.decision_values(X) / norm
    if isinstance(model, NaiveBayesModel):
        return model.log_odds(X)
    raise ValidationError(f"unsupported stage-1 model {type(model).__name__}")
