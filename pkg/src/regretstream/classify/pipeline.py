"""Two-stage training pipeline: balanced sampling, out-of-fold derived
feature, stage-2 fitting, grid-search cross-validation, and ablation.

The derived open-text feature for training rows always comes from
fold-nested stage-1 models (no row is scored by a model that saw it), while
held-out rows are scored by the final stage-1 model fit on all training
rows.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace as dc_replace

import numpy as np

from ..errors import ConfigError, InsufficientDataError, ValidationError
from ..features import (
    DERIVED_SLOT,
    FEATURE_GROUPS,
    FeatureMatrix,
    build_vocab,
    featurize_corpus,
)
from .stage1 import SparseRows, derived_feature, train_stage1
from .smo import RbfSvmModel
from .trees import AdaBoostModel

# Sub-stream ids for deriving independent RNGs from one seed.
_RNG_SAMPLE, _RNG_SPLIT, _RNG_FOLDS, _RNG_STAGE1, _RNG_CV = 1, 2, 3, 4, 5


def _rng(seed: int, stream: int, extra: int = 0) -> np.random.Generator:
    return np.random.default_rng([seed, stream, extra])


@dataclass(frozen=True)
class TrainConfig:
    n_per_class: int = 1200
    test_fraction: float = 0.25
    stage1_algorithm: str = "linear_svm"
    stage1_hyper: dict = field(
        default_factory=lambda: {"nb_alpha": 0.1, "svm_c": 1e-6, "svm_epochs": 30}
    )
    stage2_algorithm: str = "adaboost"
    stage2_hyper: dict = field(
        default_factory=lambda: {
            "rbf_c": 0.1, "rbf_gamma": 0.001, "ada_depth": 5, "ada_rounds": 100,
        }
    )
    derived_feature_folds: int = 5
    with_responses: bool = False

    def merged(self, overrides: dict) -> "TrainConfig":
        """New config with hyper overrides applied (grid-search cells)."""
        kwargs = {}
        s1 = dict(self.stage1_hyper)
        s2 = dict(self.stage2_hyper)
        for key, value in overrides.items():
            if key in s1:
                s1[key] = value
            elif key in s2:
                s2[key] = value
            elif hasattr(self, key):
                kwargs[key] = value
            else:
                raise ConfigError(f"unknown hyperparameter {key!r}")
        return dc_replace(self, stage1_hyper=s1, stage2_hyper=s2, **kwargs)

    def to_dict(self) -> dict:
        return {
            "n_per_class": self.n_per_class,
            "test_fraction": self.test_fraction,
            "stage1_algorithm": self.stage1_algorithm,
            "stage1_hyper": dict(self.stage1_hyper),
            "stage2_algorithm": self.stage2_algorithm,
            "stage2_hyper": dict(self.stage2_hyper),
            "derived_feature_folds": self.derived_feature_folds,
            "with_responses": self.with_responses,
        }

    @classmethod
    def from_dict(cls, raw: dict) -> "TrainConfig":
        base = cls()
        return cls(
            n_per_class=int(raw.get("n_per_class", base.n_per_class)),
            test_fraction=float(raw.get("test_fraction", base.test_fraction)),
            stage1_algorithm=raw.get("stage1_algorithm", base.stage1_algorithm),
            stage1_hyper={**base.stage1_hyper, **raw.get("stage1_hyper", {})},
            stage2_algorithm=raw.get("stage2_algorithm", base.stage2_algorithm),
            stage2_hyper={**base.stage2_hyper, **raw.get("stage2_hyper", {})},
            derived_feature_folds=int(raw.get("derived_feature_folds", base.derived_feature_folds)),
            with_responses=bool(raw.get("with_responses", base.with_responses)),
        )


@dataclass(frozen=True)
class EvalMetrics:
    precision: float
    recall: float
    f1: float
    tp: int
    fp: int
    tn: int
    fn: int

    def to_dict(self) -> dict:
        return {
            "precision": self.precision,
            "recall": self.recall,
            "f1": self.f1,
            "tp": self.tp, "fp": self.fp, "tn": self.tn, "fn": self.fn,
        }


def evaluate(pred, true) -> EvalMetrics:
    """Positive-class (deleted = 1) precision/recall/F1 with confusion counts."""
    pred = np.asarray(pred).astype(np.int8)
    true = np.asarray(true).astype(np.int8)
    if len(pred) != len(true):
        raise ValidationError(f"{len(pred)} predictions for {len(true)} labels")
    tp = int(np.sum((pred == 1) & (true == 1)))
    fp = int(np.sum((pred == 1) & (true == 0)))
    tn = int(np.sum((pred == 0) & (true == 0)))
    fn = int(np.sum((pred == 0) & (true == 1)))
    precision = tp / (tp + fp) if tp + fp else 0.0
    recall = tp / (tp + fn) if tp + fn else 0.0
    f1 = 2 * precision * recall / (precision + recall) if precision + recall else 0.0
    return EvalMetrics(precision, recall, f1, tp, fp, tn, fn)


# ---------------------------------------------------------------------------
# Sampling
# ---------------------------------------------------------------------------

def balanced_sample(corpus, n_per_class: int, seed: int) -> list:
    """Per-user paired sample with exactly n_per_class tweets per class.

    Each user contributes up to min(#deleted, #non-deleted) tweets per
    class, chosen uniformly with the seeded RNG; users are visited in a
    seeded random order until the quota is filled.
    """
    rng = _rng(seed, _RNG_SAMPLE)
    per_user: dict[int, tuple[list, list]] = {}
    for user_id in corpus.user_ids():
        timeline = corpus.tweets_of(user_id)
        deleted = [t for t in timeline if t.deleted]
        kept = [t for t in timeline if not t.deleted]
        if deleted and kept:
            per_user[user_id] = (deleted, kept)
    achievable = sum(min(len(d), len(k)) for d, k in per_user.values())
    if achievable < n_per_class:
        raise InsufficientDataError(
            f"requested {n_per_class} pairs but only {achievable} are achievable",
            achievable=achievable,
        )
    users = rng.permutation(sorted(per_user))
    sample = []
    collected = 0
    for user_id in users:
        if collected >= n_per_class:
            break
        deleted, kept = per_user[int(user_id)]
        take = min(len(deleted), len(kept), n_per_class - collected)
        chosen_d = rng.choice(len(deleted), size=take, replace=False)
        chosen_k = rng.choice(len(kept), size=take, replace=False)
        sample.extend(deleted[i] for i in sorted(chosen_d.tolist()))
        sample.extend(kept[i] for i in sorted(chosen_k.tolist()))
        collected += take
    return sample


def replied_sample(corpus, n_per_class: int, seed: int) -> list:
    """Equal-sized per-class sample of replied-to tweets of deleter users."""
    rng = _rng(seed, _RNG_SAMPLE, extra=1)
    deleters = {t.user_id for t in corpus if t.deleted}
    replied = [t for t in corpus if t.reply_ids and t.user_id in deleters]
    deleted = [t for t in replied if t.deleted]
    kept = [t for t in replied if not t.deleted]
    n = min(n_per_class, len(deleted), len(kept))
    if n == 0:
        raise InsufficientDataError(
            "no replied-to tweets available in both classes",
            achievable=min(len(deleted), len(kept)),
        )
    chosen_d = rng.choice(len(deleted), size=n, replace=False)
    chosen_k = rng.choice(len(kept), size=n, replace=False)
    sample = [deleted[i] for i in sorted(chosen_d.tolist())]
    sample.extend(kept[i] for i in sorted(chosen_k.tolist()))
    return sample


def stratified_split(labels, test_fraction: float, rng) -> tuple[np.ndarray, np.ndarray]:
    labels = np.asarray(labels)
    train, test = [], []
    for cls in (0, 1):
        idx = np.nonzero(labels == cls)[0]
        idx = idx[rng.permutation(len(idx))]
        n_test = int(round(len(idx) * test_fraction))
        test.extend(idx[:n_test].tolist())
        train.extend(idx[n_test:].tolist())
    return np.array(sorted(train), dtype=np.int64), np.array(sorted(test), dtype=np.int64)


def stratified_folds(labels, k: int, rng) -> np.ndarray:
    """Fold id per row; each class dealt round-robin after a seeded shuffle."""
    labels = np.asarray(labels)
    folds = np.zeros(len(labels), dtype=np.int64)
    for cls in np.unique(labels):
        idx = np.nonzero(labels == cls)[0]
        if len(idx) < k:
            raise ValidationError(
                f"class {cls} has {len(idx)} rows; cannot build {k} stratified folds"
            )
        idx = idx[rng.permutation(len(idx))]
        for pos, row in enumerate(idx):
            folds[row] = pos % k
    return folds


# ---------------------------------------------------------------------------
# Scaling and stage-2
# ---------------------------------------------------------------------------

@dataclass
class DenseScaler:
    """Column z-scoring; constant (or masked-out) columns pass through."""

    mean: np.ndarray | None = None
    scale: np.ndarray | None = None

    def fit(self, X: np.ndarray) -> "DenseScaler":
        self.mean = X.mean(axis=0)
        std = X.std(axis=0)
        self.scale = np.where(std < 1e-12, 1.0, std)
        self.mean = np.where(std < 1e-12, 0.0, self.mean)
        return self

    def transform(self, X: np.ndarray) -> np.ndarray:
        return (X - self.mean) / self.scale


def train_stage2(X_dense: np.ndarray, y, algorithm: str, hyper: dict | None = None, seed: int = 0):
    """Train the dense stage; returns (model, scaler-or-None).

    The RBF-SVM runs on z-scored features; AdaBoost runs on raw features
    (trees are scale-invariant).
    """
    hyper = hyper or {}
    if algorithm == "adaboost":
        model = AdaBoostModel(
            max_depth=int(hyper.get("ada_depth", 5)),
            rounds=int(hyper.get("ada_rounds", 100)),
        ).fit(X_dense, y)
        return model, None
    if algorithm == "rbf_svm":
        scaler = DenseScaler().fit(X_dense)
        model = RbfSvmModel(
            c=float(hyper.get("rbf_c", 0.1)),
            gamma=float(hyper.get("rbf_gamma", 0.001)),
        ).fit(scaler.transform(X_dense), y)
        return model, scaler
    raise ConfigError(f"unknown stage-2 algorithm {algorithm!r}")


def mask_slots(groups) -> np.ndarray:
    """Dense slot indices for a list of feature-group names."""
    slots = []
    for g in groups:
        if g not in FEATURE_GROUPS:
            raise ValidationError(
                f"unknown feature group {g!r}; valid: {sorted(FEATURE_GROUPS)}"
            )
        slots.extend(FEATURE_GROUPS[g])
    return np.array(sorted(set(slots)), dtype=np.int64)


def stage2_design(matrix: FeatureMatrix, mask_groups=()) -> np.ndarray:
    """Dense design matrix with masked groups zeroed (and the response
    block appended when present). Any remaining NaN is a pipeline bug."""
    dense = matrix.dense.copy()
    slots = mask_slots(mask_groups)
    if len(slots):
        dense[:, slots] = 0.0
    if np.isnan(dense).any():
        raise ValidationError(
            "dense features contain NaN (derived open-text slot not filled?)"
        )
    if matrix.response is not None:
        return np.concatenate([dense, matrix.response], axis=1)
    return dense


# ---------------------------------------------------------------------------
# Prepared training data and the two-stage pipeline
# ---------------------------------------------------------------------------

@dataclass
class PreparedData:
    vocab: object
    stage1: object
    train: FeatureMatrix
    test: FeatureMatrix
    train_tweets: list
    test_tweets: list


def fill_derived(matrix: FeatureMatrix, values: np.ndarray) -> None:
    matrix.dense[:, DERIVED_SLOT] = values


def _out_of_fold_derived(train: FeatureMatrix, config: TrainConfig, seed: int) -> np.ndarray:
    """Derived feature for training rows from fold-nested stage-1 models."""
    X = SparseRows.from_feature_matrix(train)
    y = train.labels
    k = config.derived_feature_folds
    folds = stratified_folds(y, k, _rng(seed, _RNG_FOLDS))
    out = np.zeros(len(y), dtype=np.float64)
    for f in range(k):
        holdout = np.nonzero(folds == f)[0]
        rest = np.nonzero(folds != f)[0]
        model = train_stage1(
            X.subset(rest), y[rest], config.stage1_algorithm, config.stage1_hyper,
            seed=int(_rng(seed, _RNG_STAGE1, extra=f).integers(0, 2**31)),
        )
        out[holdout] = derived_feature(model, X.subset(holdout))
    return out


def prepare_training_data(corpus, config: TrainConfig, seed: int, resources) -> PreparedData:
    """Sample, split, featurize, and fill the derived open-text feature.

    The vocabulary is built from the training split only; held-out rows get
    their derived feature from the final stage-1 model trained on the full
    training split.
    """
    if len(corpus) == 0:
        raise ValidationError("empty corpus")
    if config.with_responses:
        sample = replied_sample(corpus, config.n_per_class, seed)
    else:
        sample = balanced_sample(corpus, config.n_per_class, seed)
    labels = [1 if t.deleted else 0 for t in sample]
    train_idx, test_idx = stratified_split(labels, config.test_fraction, _rng(seed, _RNG_SPLIT))
    train_tweets = [sample[i] for i in train_idx]
    test_tweets = [sample[i] for i in test_idx]

    vocab = build_vocab(train_tweets)
    train = featurize_corpus(
        corpus, vocab, resources, tweets=train_tweets, with_responses=config.with_responses
    )
    test = featurize_corpus(
        corpus, vocab, resources, tweets=test_tweets, with_responses=config.with_responses
    )
    fill_derived(train, _out_of_fold_derived(train, config, seed))
    stage1 = train_stage1(
        SparseRows.from_feature_matrix(train), train.labels,
        config.stage1_algorithm, config.stage1_hyper,
        seed=int(_rng(seed, _RNG_STAGE1, extra=config.derived_feature_folds).integers(0, 2**31)),
    )
    fill_derived(test, derived_feature(stage1, SparseRows.from_feature_matrix(test)))
    return PreparedData(vocab, stage1, train, test, train_tweets, test_tweets)


def fit_and_evaluate(prep: PreparedData, config: TrainConfig, seed: int, mask_groups=()):
    """Train stage-2 on prepared data and evaluate on the held-out split."""
    X_train = stage2_design(prep.train, mask_groups)
    X_test = stage2_design(prep.test, mask_groups)
    model, scaler = train_stage2(
        X_train, prep.train.labels, config.stage2_algorithm, config.stage2_hyper, seed
    )
    if scaler is not None:
        X_test = scaler.transform(X_test)
    metrics = evaluate(model.predict(X_test), prep.test.labels)
    return model, scaler, metrics


def two_stage_train(corpus, config: TrainConfig, seed: int, resources, mask_groups=()):
    """Full pipeline; returns (ModelBundle, held-out EvalMetrics)."""
    from .bundle import ModelBundle

    prep = prepare_training_data(corpus, config, seed, resources)
    model, scaler, metrics = fit_and_evaluate(prep, config, seed, mask_groups)
    bundle = ModelBundle(
        config=config,
        seed=seed,
        mask_groups=tuple(mask_groups),
        vocab=prep.vocab,
        stage1=prep.stage1,
        stage2=model,
        scaler=scaler,
        resources=resources,
        reference_time=corpus.window.post_end,
        metrics=metrics,
    )
    return bundle, metrics


def ablate(corpus, config: TrainConfig, groups, seed: int, resources, threads: int = 1) -> dict:
    """Retrain with each feature group masked and compare to the baseline.

    Group names must come from the dense layout groups. Results carry
    absolute metrics, metric ratios relative to baseline, and the F1 delta.
    """
    groups = list(groups)
    for g in groups:
        if g not in FEATURE_GROUPS:
            raise ValidationError(
                f"unknown feature group {g!r}; valid: {sorted(FEATURE_GROUPS)}"
            )
    prep = prepare_training_data(corpus, config, seed, resources)
    _, _, baseline = fit_and_evaluate(prep, config, seed, ())

    def run_cell(group: str):
        _, _, m = fit_and_evaluate(prep, config, seed, (group,))
        return group, m

    results: dict[str, EvalMetrics] = {}
    if threads > 1 and len(groups) > 1:
        from concurrent.futures import ThreadPoolExecutor

        with ThreadPoolExecutor(max_workers=threads) as pool:
            for group, m in pool.map(run_cell, groups):
                results[group] = m
    else:
        for group in groups:
            results[group] = run_cell(group)[1]

    def rel(x, base):
        return x / base if base else 0.0

    report = {
        "baseline": baseline.to_dict(),
        "dropped": {},
    }
    for group in groups:
        m = results[group]
        report["dropped"][group] = {
            "metrics": m.to_dict(),
            "relative": {
                "precision": rel(m.precision, baseline.precision),
                "recall": rel(m.recall, baseline.recall),
                "f1": rel(m.f1, baseline.f1),
            },
            "delta_f1": m.f1 - baseline.f1,
        }
    return report


def grid_search_cv(grid, tweets, corpus, resources, config: TrainConfig, k: int = 10, seed: int = 0):
    """Stratified k-fold grid search maximizing mean F1.

    Each cell re-runs the full pipeline per fold: vocabulary and stage-1
    (including the nested out-of-fold derived feature) are fit inside the
    training folds only. Returns (best_hyper, results).
    """
    grid = list(grid)
    if not grid:
        raise ValidationError("empty hyperparameter grid")
    tweets = list(tweets)
    labels = np.array([1 if t.deleted else 0 for t in tweets], dtype=np.int8)
    for cls in (0, 1):
        if int((labels == cls).sum()) < k:
            raise ValidationError(f"class {cls} has fewer rows than k={k}")
    folds = stratified_folds(labels, k, _rng(seed, _RNG_CV))

    results = []
    best = None
    for cell_index, cell in enumerate(grid):
        cfg = config.merged(cell)
        fold_metrics = []
        for f in range(k):
            train_tweets = [t for t, fid in zip(tweets, folds) if fid != f]
            val_tweets = [t for t, fid in zip(tweets, folds) if fid == f]
            vocab = build_vocab(train_tweets)
            train = featurize_corpus(
                corpus, vocab, resources, tweets=train_tweets,
                with_responses=cfg.with_responses,
            )
            val = featurize_corpus(
                corpus, vocab, resources, tweets=val_tweets,
                with_responses=cfg.with_responses,
            )
            fill_derived(train, _out_of_fold_derived(train, cfg, seed + f))
            stage1 = train_stage1(
                SparseRows.from_feature_matrix(train), train.labels,
                cfg.stage1_algorithm, cfg.stage1_hyper,
                seed=int(_rng(seed + f, _RNG_STAGE1, extra=99).integers(0, 2**31)),
            )
            fill_derived(val, derived_feature(stage1, SparseRows.from_feature_matrix(val)))
            X_train = stage2_design(train)
            X_val = stage2_design(val)
            model, scaler = train_stage2(
                X_train, train.labels, cfg.stage2_algorithm, cfg.stage2_hyper, seed + f
            )
            if scaler is not None:
                X_val = scaler.transform(X_val)
            fold_metrics.append(evaluate(model.predict(X_val), val.labels))
        mean_f1 = float(np.mean([m.f1 for m in fold_metrics]))
        entry = {
            "hyper": dict(cell),
            "mean_f1": mean_f1,
            "mean_precision": float(np.mean([m.precision for m in fold_metrics])),
            "mean_recall": float(np.mean([m.recall for m in fold_metrics])),
            "per_fold_f1": [m.f1 for m in fold_metrics],
        }
        results.append(entry)
        if best is None or mean_f1 > results[best]["mean_f1"]:
            best = cell_index
    return grid[best], results
