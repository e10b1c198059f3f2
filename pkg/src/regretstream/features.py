"""Feature assembly: sparse TF-IDF text vectors, the 112-slot dense
post-time block, and the 93-slot response-time block.

Dense layout (fixed slot indices):
  [0..63]   lexicon category percentages
  [64]      sentiment score
  [65..89]  part-of-speech counts (tagset order)
  [90]      hour of day (UTC, 0-23)
  [91]      weekday (Monday=0)
  [92]      timezone offset minutes (0 when unknown)
  [93]      is_reply            [94] is_quote
  [95]      n_urls              [96] n_mentions      [97] n_hashtags
  [98]      has_geo             [99] account_age_days
  [100]     profile_customized  [101] custom_image   [102] bio_length
  [103]     geo_enabled         [104] has_location   [105] has_profile_url
  [106]     favourites_count    [107] followees_count
  [108]     followers_count     [109] listed_count   [110] statuses_count
  [111]     derived open-text feature (NaN until the two-stage
            pipeline fills it)

Response layout: [0] retweet count, [1] quote count, [2] reply count,
[3..66] summed reply lexicon percentages, [67..91] summed reply POS counts,
[92] summed reply sentiment.
"""

from __future__ import annotations

import json
import math
import struct
from dataclasses import dataclass
from datetime import datetime
from pathlib import Path

import numpy as np

from . import textkit
from .errors import ContractError, ValidationError
from .events import Corpus, TweetRecord, UserProfile

DENSE_SIZE = 112
RESPONSE_SIZE = 93
DERIVED_SLOT = 111

FEATURE_GROUPS = {
    "lexicon": tuple(range(0, 64)),
    "sentiment": (64,),
    "pos": tuple(range(65, 90)),
    "tweet": tuple(range(90, 99)),
    "user": tuple(range(99, 111)),
    "derived_open_text": (DERIVED_SLOT,),
}

_MAGIC = b"RSF1"
_VERSION = 1


class Vocabulary:
    """Term index with per-term document frequencies.

    Terms are the normalized tokens of a corpus excluding mention and url
    classes; indices are assigned in lexicographic term order.
    """

    def __init__(self, df: dict[str, int], n_documents: int):
        self.n_documents = n_documents
        self.terms: list[str] = sorted(df)
        self.index: dict[str, int] = {t: i for i, t in enumerate(self.terms)}
        self.df = np.array([df[t] for t in self.terms], dtype=np.int64)

    def __len__(self) -> int:
        return len(self.terms)

    def idf(self) -> np.ndarray:
        return np.log((1.0 + self.n_documents) / (1.0 + self.df)) + 1.0


def tweet_terms(tweet: TweetRecord) -> list[str]:
    """Normalized tokens of a tweet, mentions and urls removed."""
    tokens = textkit.tokenize(tweet.text)
    return [t.normalized for t in tokens if t.cls not in ("mention", "url")]


def build_vocab(corpus) -> Vocabulary:
    """Build a Vocabulary from a cleaned corpus (or any tweet iterable)."""
    tweets = list(corpus)
    if not tweets:
        raise ValidationError("cannot build a vocabulary from an empty corpus")
    df: dict[str, int] = {}
    for t in tweets:
        for term in set(tweet_terms(t)):
            df[term] = df.get(term, 0) + 1
    return Vocabulary(df, len(tweets))


def open_text_vector(tokens: textkit.TokenList, vocab: Vocabulary) -> list[tuple[int, float]]:
    """Sparse L2-normalized TF-IDF vector as (index, weight) pairs.

    weight(t) = tf(t) * (ln((1+N)/(1+df(t))) + 1); out-of-vocabulary terms
    are dropped, so an all-OOV tweet yields an empty vector.
    """
    counts: dict[int, int] = {}
    for tok in tokens:
        if tok.cls in ("mention", "url"):
            continue
        idx = vocab.index.get(tok.normalized)
        if idx is not None:
            counts[idx] = counts.get(idx, 0) + 1
    if not counts:
        return []
    n, df = vocab.n_documents, vocab.df
    pairs = []
    for idx in sorted(counts):
        idf = math.log((1.0 + n) / (1.0 + df[idx])) + 1.0
        pairs.append((idx, counts[idx] * idf))
    norm = math.sqrt(sum(w * w for _, w in pairs))
    return [(i, w / norm) for i, w in pairs]


def dense_features(
    tweet: TweetRecord,
    profile: UserProfile,
    lex: textkit.Lexicon,
    valence: dict[str, float],
    tagger,
    now: datetime,
    tags: list[str] | None = None,
) -> np.ndarray:
    """Compute the 112-slot dense vector for one tweet.

    Slots 0..110 are always finite; slot 111 is left NaN as an explicit
    "not yet filled" sentinel for the derived open-text feature. ``tags``
    may carry pre-computed tags; otherwise ``tagger`` runs. ``now`` is the
    reference timestamp for account age (normally the posting-window end).
    """
    if profile is None:
        raise ValidationError(f"tweet {tweet.id} has no author profile")
    tokens = textkit.tokenize(tweet.text)
    if tags is None:
        tags = textkit.pos_tag(tokens, tagger)
    elif len(tags) != len(tokens):
        raise ValidationError(
            f"tweet {tweet.id}: {len(tags)} pre-computed tags for {len(tokens)} tokens"
        )

    vec = np.zeros(DENSE_SIZE, dtype=np.float64)
    vec[0:64] = textkit.lexicon_score(tokens, lex)
    vec[64] = textkit.sentiment_score(tokens, valence)
    tag_index = {t: i for i, t in enumerate(tagger.tagset)}
    for t in tags:
        vec[65 + tag_index[t]] += 1.0
    created = tweet.created_at
    vec[90] = created.hour
    vec[91] = created.weekday()
    vec[92] = profile.timezone_offset_min if profile.timezone_offset_min is not None else 0.0
    vec[93] = 1.0 if tweet.in_reply_to_id is not None else 0.0
    vec[94] = 1.0 if tweet.quoted_id is not None else 0.0
    vec[95] = len(tweet.urls)
    vec[96] = len(tweet.mentions)
    vec[97] = len(tweet.hashtags)
    vec[98] = 1.0 if tweet.has_geo else 0.0
    vec[99] = (now - profile.account_created_at).total_seconds() / 86400.0
    vec[100] = 1.0 if profile.profile_customized else 0.0
    vec[101] = 1.0 if profile.custom_image else 0.0
    vec[102] = profile.bio_length
    vec[103] = 1.0 if profile.geo_enabled else 0.0
    vec[104] = 1.0 if profile.has_location else 0.0
    vec[105] = 1.0 if profile.has_profile_url else 0.0
    vec[106] = profile.favourites_count
    vec[107] = profile.followees_count
    vec[108] = profile.followers_count
    vec[109] = profile.listed_count
    vec[110] = profile.statuses_count
    vec[DERIVED_SLOT] = np.nan
    return vec


def response_features(
    tweet: TweetRecord,
    responses,
    lex: textkit.Lexicon,
    valence: dict[str, float],
    tagger,
) -> np.ndarray:
    """Compute the 93-slot response block for one tweet.

    ``responses`` are the TweetRecords whose links target this tweet. Reply
    lexicon/POS/sentiment features are element-wise sums over replies only;
    no responses yields the zero vector.
    """
    vec = np.zeros(RESPONSE_SIZE, dtype=np.float64)
    reply_ids = set(tweet.reply_ids)
    retweet_ids = set(tweet.retweet_ids)
    quote_ids = set(tweet.quote_ids)
    tag_index = {t: i for i, t in enumerate(tagger.tagset)}
    for r in responses:
        if r.id in retweet_ids:
            vec[0] += 1.0
        if r.id in quote_ids:
            vec[1] += 1.0
        if r.id in reply_ids:
            vec[2] += 1.0
            tokens = textkit.tokenize(r.text)
            scores = textkit.lexicon_score(tokens, lex)
            for i, s in enumerate(scores):
                vec[3 + i] += s
            tags = textkit.pos_tag(tokens, tagger)
            for t in tags:
                vec[67 + tag_index[t]] += 1.0
            vec[92] += textkit.sentiment_score(tokens, valence)
    return vec


@dataclass
class FeatureResources:
    """The pluggable inputs dense featurization depends on."""

    lexicon: textkit.Lexicon
    valence: dict[str, float]
    wordlist: frozenset[str]
    tagger: object
    pretagged: textkit.PretaggedStore | None = None

    def tags_for(self, tweet: TweetRecord, tokens: textkit.TokenList) -> list[str]:
        if self.pretagged is not None:
            tags = self.pretagged.get(tweet.id)
            if tags is not None:
                if len(tags) != len(tokens):
                    raise ContractError(
                        f"tweet {tweet.id}: pre-tagged file has {len(tags)} tags "
                        f"for {len(tokens)} tokens"
                    )
                tagset = set(self.pretagged.tagset)
                for t in tags:
                    if t not in tagset:
                        raise ContractError(f"tweet {tweet.id}: unknown pre-tagged tag {t!r}")
                return tags
        return textkit.pos_tag(tokens, self.tagger)


@dataclass
class FeatureMatrix:
    """Featurized corpus rows plus labels and ids."""

    tweet_ids: np.ndarray          # (n,) int64
    labels: np.ndarray             # (n,) int8, 1 = deleted
    sparse_indptr: np.ndarray      # (n+1,) int64
    sparse_indices: np.ndarray     # (nnz,) int64
    sparse_data: np.ndarray        # (nnz,) float64
    dense: np.ndarray              # (n, 112) float64
    response: np.ndarray | None    # (n, 93) float64 or None
    vocab_size: int

    def __len__(self) -> int:
        return len(self.tweet_ids)

    def sparse_row(self, i: int) -> list[tuple[int, float]]:
        lo, hi = self.sparse_indptr[i], self.sparse_indptr[i + 1]
        return list(zip(self.sparse_indices[lo:hi].tolist(), self.sparse_data[lo:hi].tolist()))

    def subset(self, rows) -> "FeatureMatrix":
        rows = np.asarray(rows, dtype=np.int64)
        indptr = [0]
        indices = []
        data = []
        for i in rows:
            lo, hi = self.sparse_indptr[i], self.sparse_indptr[i + 1]
            indices.append(self.sparse_indices[lo:hi])
            data.append(self.sparse_data[lo:hi])
            indptr.append(indptr[-1] + (hi - lo))
        return FeatureMatrix(
            tweet_ids=self.tweet_ids[rows],
            labels=self.labels[rows],
            sparse_indptr=np.array(indptr, dtype=np.int64),
            sparse_indices=np.concatenate(indices) if indices else np.zeros(0, dtype=np.int64),
            sparse_data=np.concatenate(data) if data else np.zeros(0, dtype=np.float64),
            dense=self.dense[rows].copy(),
            response=None if self.response is None else self.response[rows].copy(),
            vocab_size=self.vocab_size,
        )


def featurize_corpus(
    corpus: Corpus,
    vocab: Vocabulary,
    resources: FeatureResources,
    tweets=None,
    with_responses: bool = False,
    now: datetime | None = None,
) -> FeatureMatrix:
    """Featurize corpus tweets (or a subset) against a fixed vocabulary."""
    tweets = list(corpus if tweets is None else tweets)
    now = now or corpus.window.post_end
    n = len(tweets)
    indptr = [0]
    indices: list[int] = []
    data: list[float] = []
    dense = np.zeros((n, DENSE_SIZE), dtype=np.float64)
    response = np.zeros((n, RESPONSE_SIZE), dtype=np.float64) if with_responses else None
    ids = np.zeros(n, dtype=np.int64)
    labels = np.zeros(n, dtype=np.int8)
    for i, t in enumerate(tweets):
        tokens = textkit.tokenize(t.text)
        for idx, w in open_text_vector(tokens, vocab):
            indices.append(idx)
            data.append(w)
        indptr.append(len(indices))
        tags = resources.tags_for(t, tokens)
        dense[i] = dense_features(
            t, t.user, resources.lexicon, resources.valence, resources.tagger, now, tags=tags
        )
        if with_responses:
            linked = [
                corpus.get(rid)
                for rid in sorted(set(t.reply_ids) | set(t.retweet_ids) | set(t.quote_ids))
            ]
            response[i] = response_features(
                t, [r for r in linked if r is not None],
                resources.lexicon, resources.valence, resources.tagger,
            )
        ids[i] = t.id
        labels[i] = 1 if t.deleted else 0
    return FeatureMatrix(
        tweet_ids=ids,
        labels=labels,
        sparse_indptr=np.array(indptr, dtype=np.int64),
        sparse_indices=np.array(indices, dtype=np.int64),
        sparse_data=np.array(data, dtype=np.float64),
        dense=dense,
        response=response,
        vocab_size=len(vocab),
    )


# ---------------------------------------------------------------------------
# Versioned binary serialization ("RSF1", little-endian)
# ---------------------------------------------------------------------------

def _array_blocks(m: FeatureMatrix) -> list[tuple[str, np.ndarray]]:
    blocks = [
        ("tweet_ids", m.tweet_ids.astype("<i8")),
        ("labels", m.labels.astype("<i1")),
        ("sparse_indptr", m.sparse_indptr.astype("<i8")),
        ("sparse_indices", m.sparse_indices.astype("<i8")),
        ("sparse_data", m.sparse_data.astype("<f8")),
        ("dense", m.dense.astype("<f8")),
    ]
    if m.response is not None:
        blocks.append(("response", m.response.astype("<f8")))
    return blocks


def save_feature_matrix(m: FeatureMatrix, path: str | Path) -> None:
    blocks = _array_blocks(m)
    manifest = {
        "vocab_size": m.vocab_size,
        "n_rows": len(m),
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
        for _, arr in blocks:
            fh.write(arr.tobytes())


def load_feature_matrix(path: str | Path) -> FeatureMatrix:
    with open(path, "rb") as fh:
        magic = fh.read(4)
        if magic != _MAGIC:
            raise ValidationError(f"{path}: bad magic {magic!r}, expected {_MAGIC!r}")
        (version,) = struct.unpack("<I", fh.read(4))
        if version != _VERSION:
            raise ValidationError(f"{path}: unsupported feature-matrix version {version}")
        (mlen,) = struct.unpack("<Q", fh.read(8))
        manifest = json.loads(fh.read(mlen).decode("utf-8"))
        arrays = {}
        for entry in manifest["arrays"]:
            dtype = np.dtype(entry["dtype"])
            count = int(np.prod(entry["shape"])) if entry["shape"] else 1
            buf = fh.read(dtype.itemsize * count)
            arrays[entry["name"]] = np.frombuffer(buf, dtype=dtype).reshape(entry["shape"]).copy()
    return FeatureMatrix(
        tweet_ids=arrays["tweet_ids"].astype(np.int64),
        labels=arrays["labels"].astype(np.int8),
        sparse_indptr=arrays["sparse_indptr"].astype(np.int64),
        sparse_indices=arrays["sparse_indices"].astype(np.int64),
        sparse_data=arrays["sparse_data"].astype(np.float64),
        dense=arrays["dense"].astype(np.float64),
        response=arrays.get("response").astype(np.float64) if "response" in arrays else None,
        vocab_size=int(manifest["vocab_size"]),
    )
