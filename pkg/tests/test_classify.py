import math

import numpy as np
import pytest

from regretstream.classify import (
    AdaBoostModel,
    DecisionTree,
    LinearSvmModel,
    NaiveBayesModel,
    RbfSvmModel,
    SparseRows,
    TrainConfig,
    ablate,
    balanced_sample,
    derived_feature,
    evaluate,
    grid_search_cv,
    load_bundle,
    replied_sample,
    save_bundle,
    stratified_folds,
    stratified_split,
    train_stage1,
    train_stage2,
    two_stage_train,
)
from regretstream.classify.smo import MAX_TRAIN_ROWS
from regretstream.errors import ConfigError, InsufficientDataError, ValidationError

from conftest import make_corpus, make_tweet, ts


def sparse_from_rows(rows, n_cols):
    indptr = [0]
    indices = []
    data = []
    for row in rows:
        for idx in sorted(row):
            indices.append(idx)
            data.append(row[idx])
        indptr.append(len(indices))
    return SparseRows(
        np.array(indptr, dtype=np.int64),
        np.array(indices, dtype=np.int64),
        np.array(data, dtype=np.float64),
        n_cols,
    )


class TestNaiveBayes:
    def _toy(self):
        # 4 docs, 2 per class, disjoint vocab {a,b} vs {c,d}; weights are
        # the L2-normalized TF-IDF values, computed inline.
        idf_a = math.log(5 / 3) + 1  # df 2 of N 4
        idf_b = math.log(5 / 2) + 1  # df 1
        n2 = math.sqrt(idf_a**2 + idf_b**2)
        rows = [
            {0: 1.0},                             # "a a" normalized
            {0: idf_a / n2, 1: idf_b / n2},       # "a b"
            {2: 1.0},                             # "c c"
            {2: idf_a / n2, 3: idf_b / n2},       # "c d"
        ]
        X = sparse_from_rows(rows, 4)
        y = np.array([0, 0, 1, 1])
        return X, y, rows

    def test_posterior_matches_hand_computation(self):
        X, y, rows = self._toy()
        alpha = 0.1
        model = NaiveBayesModel(alpha=alpha).fit(X, y)

        # independent closed-form NB arithmetic
        counts = np.zeros((2, 4))
        for row, cls in zip(rows, y):
            for idx, w in row.items():
                counts[cls, idx] += w
        theta = (counts + alpha) / (counts.sum(axis=1, keepdims=True) + alpha * 4)
        probe = rows[1]  # held-in doc "a b"
        s = np.log([0.5, 0.5])
        for cls in (0, 1):
            for idx, w in probe.items():
                s[cls] += w * math.log(theta[cls, idx])
        want_posterior = math.exp(s[1]) / (math.exp(s[0]) + math.exp(s[1]))

        lo = model.log_odds(X.subset([1]))[0]
        got_posterior = 1.0 / (1.0 + math.exp(-lo))
        assert got_posterior == pytest.approx(want_posterior, abs=1e-9)

    def test_predictions_on_toy(self):
        X, y, _ = self._toy()
        model = NaiveBayesModel(alpha=0.1).fit(X, y)
        assert model.predict(X).tolist() == [0, 0, 1, 1]

    def test_zero_alpha_rejected(self):
        X, y, _ = self._toy()
        with pytest.raises(ConfigError):
            NaiveBayesModel(alpha=0.0).fit(X, y)

    def test_single_class_rejected(self):
        X, _, _ = self._toy()
        with pytest.raises(ValidationError):
            NaiveBayesModel(alpha=0.1).fit(X, np.zeros(4, dtype=int))

    def test_decision_invariance_under_duplication(self):
        rng = np.random.default_rng(21)
        for _ in range(5):
            n, v = 30, 12
            rows = []
            y = []
            for i in range(n):
                cls = i % 2
                base = range(0, 6) if cls == 0 else range(6, 12)
                row = {int(idx): float(rng.uniform(0.2, 1.0)) for idx in rng.choice(list(base), size=3, replace=False)}
                rows.append(row)
                y.append(cls)
            X = sparse_from_rows(rows, v)
            y = np.array(y)
            m1 = NaiveBayesModel(alpha=0.1).fit(X, y)
            X2 = sparse_from_rows(rows + rows, v)
            m2 = NaiveBayesModel(alpha=0.1).fit(X2, np.concatenate([y, y]))
            np.testing.assert_array_equal(m1.predict(X), m2.predict(X))


class TestLinearSvm:
    def _separable(self):
        rng = np.random.default_rng(17)
        rows, y = [], []
        for i in range(60):
            cls = i % 2
            base = (0, 1, 2) if cls == 0 else (3, 4, 5)
            row = {int(b): float(rng.uniform(0.4, 1.0)) for b in base[:2]}
            rows.append(row)
            y.append(cls)
        return sparse_from_rows(rows, 6), np.array(y)

    def test_training_accuracy_on_separable(self):
        X, y = self._separable()
        model = LinearSvmModel(c=1.0, epochs=30, seed=3).fit(X, y)
        assert (model.predict(X) == y).mean() == 1.0

    def test_derived_feature_scale_invariance(self):
        X, y = self._separable()
        model = LinearSvmModel(c=1.0, epochs=30, seed=3).fit(X, y)
        base = derived_feature(model, X)
        model.weights = model.weights * 7.5
        np.testing.assert_allclose(derived_feature(model, X), base, atol=1e-9)

    def test_derived_feature_sign_matches_prediction(self):
        X, y = self._separable()
        model = LinearSvmModel(c=1.0, epochs=30, seed=3).fit(X, y)
        d = derived_feature(model, X)
        np.testing.assert_array_equal(d > 0, model.predict(X).astype(bool))

    def test_boundary_point_scores_zero(self):
        model = LinearSvmModel(c=1.0)
        model.weights = np.array([1.0, -1.0, 0.0])  # w = (1,-1), b = 0
        X = sparse_from_rows([{0: 0.5, 1: 0.5}], 2)
        assert derived_feature(model, X)[0] == pytest.approx(0.0, abs=1e-12)

    def test_zero_weights_rejected(self):
        model = LinearSvmModel(c=1.0)
        model.weights = np.zeros(3)
        X = sparse_from_rows([{0: 1.0}], 2)
        with pytest.raises(ValidationError):
            derived_feature(model, X)

    def test_deterministic_given_seed(self):
        X, y = self._separable()
        w1 = LinearSvmModel(c=1.0, epochs=10, seed=5).fit(X, y).weights
        w2 = LinearSvmModel(c=1.0, epochs=10, seed=5).fit(X, y).weights
        np.testing.assert_array_equal(w1, w2)

    def test_train_stage1_dispatch(self):
        X, y = self._separable()
        assert isinstance(train_stage1(X, y, "multinomial_nb"), NaiveBayesModel)
        assert isinstance(train_stage1(X, y, "linear_svm"), LinearSvmModel)
        with pytest.raises(ConfigError):
            train_stage1(X, y, "perceptron")


def xor_dense(n_per_corner=25, jitter=0.0, seed=0):
    rng = np.random.default_rng(seed)
    corners = [(0, 0, -1), (0, 1, 1), (1, 0, 1), (1, 1, -1)]
    X, y = [], []
    for cx, cy, lab in corners:
        for _ in range(n_per_corner):
            X.append([cx + jitter * rng.normal(), cy + jitter * rng.normal()])
            y.append(1 if lab > 0 else 0)
    return np.array(X), np.array(y)


class TestDecisionTree:
    def test_single_split(self):
        X = np.array([[0.0], [1.0], [2.0], [3.0]])
        y = np.array([-1.0, -1.0, 1.0, 1.0])
        w = np.full(4, 0.25)
        tree = DecisionTree(max_depth=1).fit(X, y, w)
        np.testing.assert_array_equal(tree.predict(X), y)

    def test_depth_limit_respected(self):
        X, y01 = xor_dense(10, jitter=0.05, seed=1)
        y = y01 * 2.0 - 1.0
        w = np.full(len(y), 1.0 / len(y))
        for depth in (1, 2, 3, 5):
            tree = DecisionTree(max_depth=depth).fit(X, y, w)
            assert tree.depth <= depth

    def test_weighted_fit_prefers_heavy_samples(self):
        X = np.array([[0.0], [1.0]])
        y = np.array([1.0, -1.0])
        w = np.array([0.99, 0.01])
        tree = DecisionTree(max_depth=0).fit(X, y, w)  # forced leaf
        assert tree.predict(np.array([[0.5]]))[0] == 1.0

    def test_serialization_roundtrip(self):
        X, y01 = xor_dense(10, seed=2)
        y = y01 * 2.0 - 1.0
        tree = DecisionTree(max_depth=3).fit(X, y, np.full(len(y), 1 / len(y)))
        again = DecisionTree.from_dict(tree.to_dict())
        np.testing.assert_array_equal(tree.predict(X), again.predict(X))


class TestAdaBoost:
    def test_xor_fixture_reaches_perfect_training(self):
        X, y = xor_dense(25)
        model = AdaBoostModel(max_depth=2, rounds=50).fit(X, y)
        assert (model.predict(X) == y).mean() == 1.0
        assert len(model.trees) <= 50

    def test_accepted_rounds_below_half_error(self):
        rng = np.random.default_rng(9)
        X = rng.normal(size=(120, 4))
        y = (X[:, 0] + 0.4 * rng.normal(size=120) > 0).astype(int)
        model = AdaBoostModel(max_depth=1, rounds=40).fit(X, y)
        assert len(model.stage_errors) > 1
        assert all(e < 0.5 for e in model.stage_errors)

    def test_training_error_bound_holds(self):
        rng = np.random.default_rng(10)
        for seed in range(3):
            X = rng.normal(size=(100, 5))
            y = ((X[:, 0] * X[:, 1] > 0) ^ (X[:, 2] > 0.3)).astype(int)
            model = AdaBoostModel(max_depth=2, rounds=30).fit(X, y)
            err = float(np.mean(model.predict(X) != y))
            assert err <= model.training_error_bound() + 1e-9

    def test_perfect_round_dominates(self):
        X, y = xor_dense(10)
        model = AdaBoostModel(max_depth=3, rounds=20).fit(X, y)
        if model.early_stop == "perfect_round":
            assert model.stage_weights[-1] > sum(model.stage_weights[:-1]) - 1e-9
        assert (model.predict(X) == y).mean() == 1.0

    def test_unlearnable_data_stops_early(self):
        # identical points with contradictory labels: first stump has
        # weighted error exactly 0.5
        X = np.zeros((10, 2))
        y = np.array([0, 1] * 5)
        with pytest.raises(ValidationError):
            AdaBoostModel(max_depth=1, rounds=10).fit(X, y)

    def test_serialization_roundtrip(self):
        X, y = xor_dense(15, jitter=0.03, seed=4)
        model = AdaBoostModel(max_depth=2, rounds=15).fit(X, y)
        again = AdaBoostModel.from_dict(model.to_dict())
        np.testing.assert_array_equal(model.predict(X), again.predict(X))
        np.testing.assert_allclose(model.decision_values(X), again.decision_values(X), atol=0)


class TestRbfSvm:
    def _blobs(self, n=120, seed=6):
        rng = np.random.default_rng(seed)
        X0 = rng.normal((-2, -2), 0.5, size=(n // 2, 2))
        X1 = rng.normal((2, 2), 0.5, size=(n // 2, 2))
        X = np.vstack([X0, X1])
        y = np.array([0] * (n // 2) + [1] * (n // 2))
        perm = rng.permutation(n)
        return X[perm], y[perm]

    def test_blob_holdout_accuracy(self):
        X_train, y_train = self._blobs(160, seed=6)
        X_test, y_test = self._blobs(100, seed=7)
        model = RbfSvmModel(c=10.0, gamma=0.5).fit(X_train, y_train)
        acc = (model.predict(X_test) == y_test).mean()
        assert acc >= 0.99

    def test_row_cap_enforced(self):
        X = np.zeros((MAX_TRAIN_ROWS + 1, 2))
        y = np.array([0, 1] * ((MAX_TRAIN_ROWS + 1) // 2) + [0])
        with pytest.raises(ValidationError):
            RbfSvmModel().fit(X, y)

    def test_stage2_dispatch_and_scaler(self):
        X_train, y_train = self._blobs(80, seed=8)
        model, scaler = train_stage2(X_train, y_train, "rbf_svm", {"rbf_c": 10.0, "rbf_gamma": 0.5})
        assert scaler is not None
        Xs = scaler.transform(X_train)
        assert (model.predict(Xs) == y_train).mean() >= 0.95
        model2, scaler2 = train_stage2(X_train, y_train, "adaboost", {"ada_depth": 2, "ada_rounds": 10})
        assert scaler2 is None
        with pytest.raises(ConfigError):
            train_stage2(X_train, y_train, "mlp", {})


class TestEvaluate:
    def test_all_correct(self):
        m = evaluate([1, 0, 1], [1, 0, 1])
        assert (m.precision, m.recall, m.f1) == (1.0, 1.0, 1.0)

    def test_hand_arithmetic(self):
        # TP=2, FP=1, FN=2, TN=1
        pred = [1, 1, 1, 0, 0, 0]
        true = [1, 1, 0, 1, 1, 0]
        m = evaluate(pred, true)
        assert m.precision == pytest.approx(2 / 3, abs=1e-12)
        assert m.recall == pytest.approx(0.5, abs=1e-12)
        assert m.f1 == pytest.approx(4 / 7, abs=1e-12)
        assert (m.tp, m.fp, m.fn, m.tn) == (2, 1, 2, 1)

    def test_no_positive_predictions_convention(self):
        m = evaluate([0, 0, 0], [1, 1, 0])
        assert m.precision == 0.0 and m.f1 == 0.0

    def test_length_mismatch_rejected(self):
        with pytest.raises(ValidationError):
            evaluate([1], [1, 0])


def paired_corpus(n_users=30, n_del=4, n_non=6):
    tweets = []
    tid = 1
    for u in range(1, n_users + 1):
        for k in range(n_del):
            tweets.append(
                make_tweet(id=tid, user_id=u, created_at=ts(minutes=tid),
                           text=f"bad dull tweet {tid}", deleted=True)
            )
            tid += 1
        for k in range(n_non):
            tweets.append(
                make_tweet(id=tid, user_id=u, created_at=ts(minutes=tid),
                           text=f"good sweet tweet {tid}")
            )
            tid += 1
    return make_corpus(tweets)


class TestSampling:
    def test_min_rule_per_user(self):
        tweets = []
        tid = 1
        for k in range(5):
            tweets.append(make_tweet(id=tid, user_id=1, created_at=ts(minutes=tid), deleted=True))
            tid += 1
        for k in range(3):
            tweets.append(make_tweet(id=tid, user_id=1, created_at=ts(minutes=tid)))
            tid += 1
        corpus = make_corpus(tweets)
        sample = balanced_sample(corpus, 3, seed=0)
        deleted = [t for t in sample if t.deleted]
        kept = [t for t in sample if not t.deleted]
        assert len(deleted) == len(kept) == 3

    def test_insufficient_pairs_error_reports_achievable(self):
        corpus = paired_corpus(n_users=2, n_del=2, n_non=5)
        with pytest.raises(InsufficientDataError) as exc:
            balanced_sample(corpus, 10, seed=0)
        assert exc.value.achievable == 4

    def test_exact_balance_and_determinism(self):
        corpus = paired_corpus()
        s1 = balanced_sample(corpus, 50, seed=9)
        s2 = balanced_sample(corpus, 50, seed=9)
        assert [t.id for t in s1] == [t.id for t in s2]
        assert sum(t.deleted for t in s1) == 50
        assert sum(not t.deleted for t in s1) == 50

    def test_different_seed_changes_sample(self):
        corpus = paired_corpus()
        s1 = balanced_sample(corpus, 50, seed=1)
        s2 = balanced_sample(corpus, 50, seed=2)
        assert [t.id for t in s1] != [t.id for t in s2]

    def test_replied_sample_equal_classes(self):
        tweets = []
        tid = 1
        for u in (1, 2):
            for k in range(6):
                deleted = k < 3
                tweets.append(
                    make_tweet(id=tid, user_id=u, created_at=ts(minutes=tid),
                               deleted=deleted, reply_ids=(1000 + tid,))
                )
                tid += 1
        for t in list(tweets):
            tweets.append(
                make_tweet(id=1000 + t.id, user_id=9, created_at=ts(minutes=1000 + t.id),
                           text="some reply", in_reply_to_id=t.id)
            )
        corpus = make_corpus(tweets)
        sample = replied_sample(corpus, 4, seed=0)
        assert sum(t.deleted for t in sample) == 4
        assert sum(not t.deleted for t in sample) == 4
        assert all(t.reply_ids for t in sample)

    def test_stratified_split_and_folds(self):
        labels = np.array([0, 1] * 20)
        rng = np.random.default_rng(0)
        train, test = stratified_split(labels, 0.25, rng)
        assert len(test) == 10 and len(train) == 30
        assert labels[test].sum() == 5
        folds = stratified_folds(labels, 4, np.random.default_rng(0))
        for f in range(4):
            assert labels[folds == f].sum() == 5

    def test_folds_reject_small_classes(self):
        labels = np.array([0, 0, 0, 1])
        with pytest.raises(ValidationError):
            stratified_folds(labels, 3, np.random.default_rng(0))


class TestTwoStage:
    def test_end_to_end_on_synth_small(self, synth_small, resources):
        cfg = TrainConfig(
            n_per_class=100,
            stage2_hyper={"ada_depth": 3, "ada_rounds": 25},
        )
        bundle, metrics = two_stage_train(synth_small.cleaned, cfg, 1, resources)
        assert 0.0 <= metrics.f1 <= 1.0
        assert metrics.tp + metrics.fn == metrics.fp + metrics.tn  # balanced test split
        assert not np.isnan(bundle.stage2.decision_values(np.zeros((1, 112)))).any()

    def test_empty_corpus_rejected(self, resources):
        corpus = make_corpus([])
        with pytest.raises(ValidationError):
            two_stage_train(corpus, TrainConfig(n_per_class=4), 0, resources)

    def test_bundle_roundtrip_same_predictions(self, synth_small, resources, tmp_path):
        cfg = TrainConfig(n_per_class=80, stage2_hyper={"ada_depth": 2, "ada_rounds": 10})
        bundle, _ = two_stage_train(synth_small.cleaned, cfg, 2, resources)
        path = tmp_path / "model.rsb1"
        save_bundle(bundle, path)
        with open(path, "rb") as fh:
            assert fh.read(4) == b"RSB1"
        loaded = load_bundle(path)
        probe = list(synth_small.cleaned)[:40]
        ids1, labels1, scores1 = bundle.predict_records(synth_small.cleaned, tweets=probe)
        ids2, labels2, scores2 = loaded.predict_records(synth_small.cleaned, tweets=probe)
        np.testing.assert_array_equal(ids1, ids2)
        np.testing.assert_array_equal(labels1, labels2)
        np.testing.assert_allclose(scores1, scores2, atol=0)

    def test_byte_identical_bundles_across_runs(self, synth_small, resources, tmp_path):
        cfg = TrainConfig(n_per_class=60, stage2_hyper={"ada_depth": 2, "ada_rounds": 8})
        b1, m1 = two_stage_train(synth_small.cleaned, cfg, 3, resources)
        b2, m2 = two_stage_train(synth_small.cleaned, cfg, 3, resources)
        p1, p2 = tmp_path / "a.rsb1", tmp_path / "b.rsb1"
        save_bundle(b1, p1)
        save_bundle(b2, p2)
        assert p1.read_bytes() == p2.read_bytes()
        assert m1 == m2

    def test_rbf_stage2_path(self, synth_small, resources):
        cfg = TrainConfig(
            n_per_class=60,
            stage2_algorithm="rbf_svm",
            stage2_hyper={"rbf_c": 10.0, "rbf_gamma": 0.05},
        )
        bundle, metrics = two_stage_train(synth_small.cleaned, cfg, 4, resources)
        assert bundle.scaler is not None
        assert 0.0 <= metrics.f1 <= 1.0

    def test_derived_feature_helps_on_lexical_only_corpus(self, whitelist, resources):
        # the only planted signal is open-text words outside every dense
        # channel, so the derived feature is the sole carrier
        from regretstream.synth import SynthConfig

        from conftest import run_synth_pipeline

        cfg = SynthConfig(
            seed=23, n_users=120, tweet_rate_min=1.5, tweet_rate_max=2.2,
            user_conditioned_skew=0.0,
            lexical_rate_deleted=0.0, lexical_rate_non_deleted=0.0,
            oov_lexical_rate_deleted=0.85, oov_lexical_rate_non_deleted=0.08,
            reply_sentiment_coupling=False, orphan_deletes=0,
        )
        sp = run_synth_pipeline(cfg, whitelist)
        base = TrainConfig(
            n_per_class=150,
            stage1_algorithm="linear_svm",
            stage1_hyper={"svm_c": 1.0, "svm_epochs": 30},
            stage2_hyper={"ada_depth": 3, "ada_rounds": 30},
        )
        report = ablate(sp.cleaned, base, ["derived_open_text"], 5, resources)
        with_derived = report["baseline"]["f1"]
        without = report["dropped"]["derived_open_text"]["metrics"]["f1"]
        assert with_derived >= without - 1e-9
        assert with_derived >= 0.75  # the planted signal is strong


class TestAblate:
    def test_unknown_group_rejected(self, synth_small, resources):
        with pytest.raises(ValidationError):
            ablate(synth_small.cleaned, TrainConfig(n_per_class=40), ["nonsense"], 0, resources)

    def test_empty_groups_baseline_only(self, synth_small, resources):
        cfg = TrainConfig(n_per_class=40, stage2_hyper={"ada_depth": 2, "ada_rounds": 6})
        report = ablate(synth_small.cleaned, cfg, [], 0, resources)
        assert report["dropped"] == {}
        assert 0.0 <= report["baseline"]["f1"] <= 1.0

    def test_relative_metrics_present(self, synth_small, resources):
        cfg = TrainConfig(n_per_class=60, stage2_hyper={"ada_depth": 2, "ada_rounds": 8})
        report = ablate(synth_small.cleaned, cfg, ["user", "tweet"], 0, resources)
        for group in ("user", "tweet"):
            cell = report["dropped"][group]
            assert set(cell["relative"]) == {"precision", "recall", "f1"}
            assert cell["delta_f1"] == pytest.approx(
                cell["metrics"]["f1"] - report["baseline"]["f1"], abs=1e-12
            )

    def test_threads_do_not_change_results(self, synth_small, resources):
        cfg = TrainConfig(n_per_class=50, stage2_hyper={"ada_depth": 2, "ada_rounds": 6})
        r1 = ablate(synth_small.cleaned, cfg, ["user", "pos"], 1, resources, threads=1)
        r2 = ablate(synth_small.cleaned, cfg, ["user", "pos"], 1, resources, threads=4)
        assert r1 == r2

    def test_noise_group_delta_near_zero(self, whitelist, resources):
        # tweet attributes and POS counts are unplanted; with a clean signal
        # and a large evaluation split their ablation deltas stay near zero
        from regretstream.synth import SynthConfig

        from conftest import run_synth_pipeline

        cfg = SynthConfig(
            seed=31, n_users=300, tweet_rate_min=3.0, tweet_rate_max=4.0,
            deletion_rate=0.2, user_conditioned_skew=0.97, orphan_deletes=0,
        )
        sp = run_synth_pipeline(cfg, whitelist)
        tc = TrainConfig(
            n_per_class=1700, test_fraction=0.4,
            stage2_hyper={"ada_depth": 3, "ada_rounds": 50},
        )
        report = ablate(sp.cleaned, tc, ["tweet", "pos"], 0, resources)
        assert abs(report["dropped"]["tweet"]["delta_f1"]) <= 0.02
        assert abs(report["dropped"]["pos"]["delta_f1"]) <= 0.02


class TestGridSearch:
    def test_single_cell_degenerate(self, synth_small, resources):
        sample = balanced_sample(synth_small.cleaned, 30, seed=0)
        cfg = TrainConfig(stage2_hyper={"ada_depth": 2, "ada_rounds": 6})
        best, results = grid_search_cv(
            [{"ada_rounds": 6}], sample, synth_small.cleaned, resources, cfg, k=2, seed=0
        )
        assert best == {"ada_rounds": 6}
        assert len(results) == 1

    def test_picks_the_separating_cell(self, resources):
        # deleted iff (high followers) XOR (contains a swear word): every
        # single-feature marginal is exactly 50/50, so depth-1 stumps are
        # useless while depth >= 2 separates perfectly.
        from conftest import make_profile

        tweets = []
        tid = 1
        for u in range(1, 41):
            high = u <= 20
            profile = make_profile(u, followers_count=2000 if high else 50)
            for k in range(20):
                deleted = k < 10
                marked = deleted if high else not deleted
                text = f"damn filler{tid} words" if marked else f"filler{tid} plain words"
                tweets.append(
                    make_tweet(
                        id=tid, user_id=u, created_at=ts(minutes=tid),
                        text=text, deleted=deleted, profile=profile,
                    )
                )
                tid += 1
        corpus = make_corpus(tweets)
        sample = balanced_sample(corpus, 150, seed=1)
        cfg = TrainConfig(derived_feature_folds=3)
        grid = [
            {"ada_depth": 1, "ada_rounds": 1},
            {"ada_depth": 3, "ada_rounds": 10},
        ]
        best, results = grid_search_cv(grid, sample, corpus, resources, cfg, k=2, seed=0)
        assert best == {"ada_depth": 3, "ada_rounds": 10}
        assert results[1]["mean_f1"] > results[0]["mean_f1"] + 0.2

    def test_seeded_determinism(self, synth_small, resources):
        sample = balanced_sample(synth_small.cleaned, 30, seed=2)
        cfg = TrainConfig(stage2_hyper={"ada_depth": 2, "ada_rounds": 5}, derived_feature_folds=2)
        out1 = grid_search_cv([{"ada_rounds": 5}], sample, synth_small.cleaned, resources, cfg, k=2, seed=3)
        out2 = grid_search_cv([{"ada_rounds": 5}], sample, synth_small.cleaned, resources, cfg, k=2, seed=3)
        assert out1 == out2

    def test_empty_grid_rejected(self, synth_small, resources):
        with pytest.raises(ValidationError):
            grid_search_cv([], [], synth_small.cleaned, resources, TrainConfig(), k=2, seed=0)

    def test_k_larger_than_class_rejected(self, synth_small, resources):
        sample = balanced_sample(synth_small.cleaned, 3, seed=0)
        with pytest.raises(ValidationError):
            grid_search_cv([{}], sample, synth_small.cleaned, resources, TrainConfig(), k=10, seed=0)


class TestTrainConfig:
    def test_merged_overrides(self):
        cfg = TrainConfig()
        out = cfg.merged({"nb_alpha": 0.5, "ada_rounds": 7, "n_per_class": 10})
        assert out.stage1_hyper["nb_alpha"] == 0.5
        assert out.stage2_hyper["ada_rounds"] == 7
        assert out.n_per_class == 10

    def test_unknown_key_rejected(self):
        with pytest.raises(ConfigError):
            TrainConfig().merged({"mystery": 1})

    def test_dict_roundtrip(self):
        cfg = TrainConfig(n_per_class=77, stage1_algorithm="multinomial_nb")
        again = TrainConfig.from_dict(cfg.to_dict())
        assert again == cfg

    def test_shipped_default_hyperparameters(self):
        cfg = TrainConfig()
        assert cfg.stage1_hyper["nb_alpha"] == pytest.approx(0.1)
        assert cfg.stage1_hyper["svm_c"] == pytest.approx(1e-6)
        assert cfg.stage2_hyper["rbf_c"] == pytest.approx(0.1)
        assert cfg.stage2_hyper["rbf_gamma"] == pytest.approx(0.001)
        assert cfg.stage2_hyper["ada_depth"] == 5
        assert cfg.stage2_hyper["ada_rounds"] == 100
