"""Versioned model-bundle container ("RSB1", little-endian).

A bundle is self-contained for prediction: it embeds the vocabulary, both
stage models, the dense scaler, the feature-group mask, the training config
and seed, and the lexicon/valence/wordlist resources the dense features
depend on. Serialization is byte-deterministic for identical contents.
"""

from __future__ import annotations

import json
import struct
from dataclasses import dataclass
from datetime import datetime
from pathlib import Path

import numpy as np

from .. import textkit
from ..errors import ValidationError
from ..events import format_rfc3339, parse_rfc3339
from ..features import DERIVED_SLOT, FeatureResources, Vocabulary, featurize_corpus
from .pipeline import DenseScaler, EvalMetrics, TrainConfig, stage2_design
from .smo import RbfSvmModel
from .stage1 import LinearSvmModel, NaiveBayesModel, SparseRows, derived_feature
from .trees import AdaBoostModel

_MAGIC = b"RSB1"
_VERSION = 1


@dataclass
class ModelBundle:
    config: TrainConfig
    seed: int
    mask_groups: tuple[str, ...]
    vocab: Vocabulary
    stage1: object
    stage2: object
    scaler: DenseScaler | None
    resources: FeatureResources
    reference_time: datetime
    metrics: EvalMetrics | None = None

    # -- prediction --------------------------------------------------------

    def predict_records(self, corpus_like, tweets=None):
        """(tweet_ids, labels, scores) for tweet records.

        ``corpus_like`` provides response-link lookups (any Corpus); the
        bundle's stored reference time anchors account-age features.
        """
        matrix = featurize_corpus(
            corpus_like,
            self.vocab,
            self.resources,
            tweets=tweets,
            with_responses=self.config.with_responses,
            now=self.reference_time,
        )
        sparse = SparseRows.from_feature_matrix(matrix)
        matrix.dense[:, DERIVED_SLOT] = derived_feature(self.stage1, sparse)
        X = stage2_design(matrix, self.mask_groups)
        if self.scaler is not None:
            X = self.scaler.transform(X)
        scores = self.stage2.decision_values(X)
        labels = (scores > 0).astype(np.int8)
        return matrix.tweet_ids, labels, scores


def _stage1_manifest(model) -> tuple[dict, list[tuple[str, np.ndarray]]]:
    if isinstance(model, NaiveBayesModel):
        manifest = {"algorithm": "multinomial_nb", "alpha": model.alpha}
        blocks = [
            ("nb_class_log_prior", model.class_log_prior.astype("<f8")),
            ("nb_feature_log_prob", model.feature_log_prob.astype("<f8")),
        ]
        return manifest, blocks
    if isinstance(model, LinearSvmModel):
        manifest = {
            "algorithm": "linear_svm",
            "c": model.c,
            "epochs": model.epochs,
            "seed": model.seed,
        }
        return manifest, [("svm_weights", model.weights.astype("<f8"))]
    raise ValidationError(f"cannot serialize stage-1 model {type(model).__name__}")


def _stage2_manifest(model) -> tuple[dict, list[tuple[str, np.ndarray]]]:
    if isinstance(model, AdaBoostModel):
        return {"kind": "adaboost", "model": model.to_dict()}, []
    if isinstance(model, RbfSvmModel):
        manifest = {
            "kind": "rbf_svm",
            "c": model.c,
            "gamma": model.gamma,
            "bias": model.bias,
        }
        blocks = [
            ("rbf_support_vectors", model.support_vectors.astype("<f8")),
            ("rbf_dual_coef", model.dual_coef.astype("<f8")),
        ]
        return manifest, blocks
    raise ValidationError(f"cannot serialize stage-2 model {type(model).__name__}")


def save_bundle(bundle: ModelBundle, path: str | Path) -> None:
    stage1_manifest, stage1_blocks = _stage1_manifest(bundle.stage1)
    stage2_manifest, stage2_blocks = _stage2_manifest(bundle.stage2)

    res = bundle.resources
    if tuple(res.tagger.tagset) != textkit.DEFAULT_TAGSET:
        raise ValidationError("only the shipped tagger's tagset can be bundled")

    blocks: list[tuple[str, np.ndarray]] = [
        ("vocab_df", bundle.vocab.df.astype("<i8")),
    ]
    blocks += stage1_blocks + stage2_blocks
    if bundle.scaler is not None:
        blocks.append(("scaler_mean", bundle.scaler.mean.astype("<f8")))
        blocks.append(("scaler_scale", bundle.scaler.scale.astype("<f8")))
    terms_blob = "\n".join(bundle.vocab.terms).encode("utf-8")
    wordlist_blob = "\n".join(sorted(res.wordlist)).encode("utf-8")

    manifest = {
        "format_version": _VERSION,
        "config": bundle.config.to_dict(),
        "seed": bundle.seed,
        "mask_groups": list(bundle.mask_groups),
        "reference_time": format_rfc3339(bundle.reference_time),
        "vocab": {"n_documents": bundle.vocab.n_documents, "n_terms": len(bundle.vocab)},
        "stage1": stage1_manifest,
        "stage2": stage2_manifest,
        "has_scaler": bundle.scaler is not None,
        "metrics": bundle.metrics.to_dict() if bundle.metrics is not None else None,
        "resources": {
            "lexicon": [
                {"name": name, "patterns": patterns}
                for name, patterns in res.lexicon.categories
            ],
            "valence": {k: res.valence[k] for k in sorted(res.valence)},
        },
        "blobs": {"vocab_terms": len(terms_blob), "wordlist": len(wordlist_blob)},
        "arrays": [
            {"name": name, "dtype": str(arr.dtype), "shape": list(arr.shape)}
            for name, arr in blocks
        ],
    }
    raw = json.dumps(manifest, sort_keys=True, separators=(",", ":")).encode("utf-8")
    with open(path, "wb") as fh:
        fh.write(_MAGIC)
        fh.write(struct.pack("<I", _VERSION))
        fh.write(struct.pack("<Q", len(raw)))
        fh.write(raw)
        fh.write(terms_blob)
        fh.write(wordlist_blob)
        for _, arr in blocks:
            fh.write(arr.tobytes())


def load_bundle(path: str | Path) -> ModelBundle:
    with open(path, "rb") as fh:
        magic = fh.read(4)
        if magic != _MAGIC:
            raise ValidationError(f"{path}: bad magic {magic!r}, expected {_MAGIC!r}")
        (version,) = struct.unpack("<I", fh.read(4))
        if version != _VERSION:
            raise ValidationError(f"{path}: unsupported bundle version {version}")
        (mlen,) = struct.unpack("<Q", fh.read(8))
        manifest = json.loads(fh.read(mlen).decode("utf-8"))
        terms_blob = fh.read(manifest["blobs"]["vocab_terms"]).decode("utf-8")
        wordlist_blob = fh.read(manifest["blobs"]["wordlist"]).decode("utf-8")
        arrays = {}
        for entry in manifest["arrays"]:
            dtype = np.dtype(entry["dtype"])
            count = int(np.prod(entry["shape"])) if entry["shape"] else 1
            buf = fh.read(dtype.itemsize * count)
            arrays[entry["name"]] = np.frombuffer(buf, dtype=dtype).reshape(entry["shape"]).copy()

    terms = terms_blob.split("\n") if terms_blob else []
    df = arrays["vocab_df"].astype(np.int64)
    vocab = Vocabulary(
        {t: int(d) for t, d in zip(terms, df)}, int(manifest["vocab"]["n_documents"])
    )

    s1 = manifest["stage1"]
    if s1["algorithm"] == "multinomial_nb":
        stage1 = NaiveBayesModel(alpha=float(s1["alpha"]))
        stage1.class_log_prior = arrays["nb_class_log_prior"].astype(np.float64)
        stage1.feature_log_prob = arrays["nb_feature_log_prob"].astype(np.float64)
    else:
        stage1 = LinearSvmModel(
            c=float(s1["c"]), epochs=int(s1["epochs"]), seed=int(s1["seed"])
        )
        stage1.weights = arrays["svm_weights"].astype(np.float64)

    s2 = manifest["stage2"]
    if s2["kind"] == "adaboost":
        stage2 = AdaBoostModel.from_dict(s2["model"])
    else:
        stage2 = RbfSvmModel(c=float(s2["c"]), gamma=float(s2["gamma"]))
        stage2.bias = float(s2["bias"])
        stage2.support_vectors = arrays["rbf_support_vectors"].astype(np.float64)
        stage2.dual_coef = arrays["rbf_dual_coef"].astype(np.float64)

    scaler = None
    if manifest["has_scaler"]:
        scaler = DenseScaler(
            mean=arrays["scaler_mean"].astype(np.float64),
            scale=arrays["scaler_scale"].astype(np.float64),
        )

    res_raw = manifest["resources"]
    resources = FeatureResources(
        lexicon=textkit.Lexicon([(c["name"], c["patterns"]) for c in res_raw["lexicon"]
                                 if not c["name"].startswith("_empty_")]),
        valence={k: float(v) for k, v in res_raw["valence"].items()},
        wordlist=frozenset(w for w in wordlist_blob.split("\n") if w),
        tagger=textkit.RuleTagger(),
    )
    metrics = None
    if manifest.get("metrics"):
        m = manifest["metrics"]
        metrics = EvalMetrics(
            precision=m["precision"], recall=m["recall"], f1=m["f1"],
            tp=m["tp"], fp=m["fp"], tn=m["tn"], fn=m["fn"],
        )
    return ModelBundle(
        config=TrainConfig.from_dict(manifest["config"]),
        seed=int(manifest["seed"]),
        mask_groups=tuple(manifest["mask_groups"]),
        vocab=vocab,
        stage1=stage1,
        stage2=stage2,
        scaler=scaler,
        resources=resources,
        reference_time=parse_rfc3339(manifest["reference_time"], "reference_time"),
        metrics=metrics,
    )
