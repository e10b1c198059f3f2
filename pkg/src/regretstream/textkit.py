"""Tokenization and per-tweet linguistic measurements.

Everything here is a pure function of its inputs: tokenizing, Levenshtein
distance, term-frequency cosine, lexicon category scoring, valence
sentiment, part-of-speech tagging, and lexical-density statistics.
"""

from __future__ import annotations

import json
import math
import re
from collections import Counter
from dataclasses import dataclass
from pathlib import Path

from .errors import ContractError, ValidationError

TOKEN_CLASSES = ("word", "mention", "hashtag", "url", "emoticon", "punct", "number")

# Longest-match-first emoticon inventory. Kept deliberately small; scorers
# only need the common ASCII forms.
EMOTICONS = (
    ">:(", ">:)", ":'(", ":'-(", ":-)", ":-(", ":-D", ":-P", ":-/", ":-|",
    ";-)", "=)", "=(", "=D", ":)", ":(", ":D", ":P", ":p", ":/", ":|", ";)",
    ";D", "D:", "xD", "XD", "<3", "</3", "^_^", "o_O", "O_o", "-_-", "\\o/",
)

NEGATIONS = frozenset({"no", "not", "never", "n't"})

# Score normalizer constant for sentiment (keeps scores in (-1, 1)).
_SENTIMENT_ALPHA = 15.0

_URL_RE = r"(?:[A-Za-z][A-Za-z0-9+.-]*://\S+|t\.co/\S+|www\.\S+)"
_MENTION_RE = r"@\w+"
_HASHTAG_RE = r"#\w+"
_NUMBER_RE = r"\d+(?:[.,:]\d+)*"
_WORD_RE = r"[^\W\d_]+(?:['\u2019][^\W\d_]+)*"
_EMOTICON_RE = "|".join(re.escape(e) for e in sorted(EMOTICONS, key=len, reverse=True))

_TOKEN_RE = re.compile(
    f"(?P<url>{_URL_RE})"
    f"|(?P<mention>{_MENTION_RE})"
    f"|(?P<hashtag>{_HASHTAG_RE})"
    f"|(?P<emoticon>{_EMOTICON_RE})"
    f"|(?P<number>{_NUMBER_RE})"
    f"|(?P<word>{_WORD_RE})"
    f"|(?P<punct>\\S)"
)


@dataclass(frozen=True)
class Token:
    surface: str
    cls: str

    @property
    def normalized(self) -> str:
        """Lowercased surface for words; surface unchanged otherwise."""
        return self.surface.lower() if self.cls == "word" else self.surface


class TokenList(list):
    """Ordered list of Token with convenience views."""

    def surfaces(self) -> list[str]:
        return [t.surface for t in self]

    def normalized(self) -> list[str]:
        return [t.normalized for t in self]

    def words(self) -> list[str]:
        """Normalized surfaces of word-class tokens."""
        return [t.normalized for t in self if t.cls == "word"]

    def count_class(self, cls: str) -> int:
        return sum(1 for t in self if t.cls == cls)


def tokenize(text: str) -> TokenList:
    """Split ``text`` into classified tokens.

    Matching priority: urls, mentions, hashtags, emoticons, numbers, words,
    then single punctuation characters. Deterministic for any input;
    an empty string yields an empty TokenList.
    """
    tokens = TokenList()
    for m in _TOKEN_RE.finditer(text):
        cls = m.lastgroup
        tokens.append(Token(m.group(), cls))
    return tokens


def edit_distance(a: str, b: str) -> int:
    """Levenshtein distance with unit insert/delete/substitute costs.

    Operates on unicode scalar values of the raw strings.
    """
    if a == b:
        return 0
    if not a:
        return len(b)
    if not b:
        return len(a)
    if len(a) < len(b):
        a, b = b, a
    prev = list(range(len(b) + 1))
    for i, ca in enumerate(a, start=1):
        cur = [i]
        for j, cb in enumerate(b, start=1):
            cost = 0 if ca == cb else 1
            cur.append(min(prev[j] + 1, cur[j - 1] + 1, prev[j - 1] + cost))
        prev = cur
    return prev[-1]


def term_cosine(a: str, b: str) -> float:
    """Cosine similarity of lowercased token term-frequency vectors.

    Returns 0.0 when either side has no tokens.
    """
    ta = Counter(t.surface.lower() for t in tokenize(a))
    tb = Counter(t.surface.lower() for t in tokenize(b))
    if not ta or not tb:
        return 0.0
    dot = sum(ta[w] * tb[w] for w in ta.keys() & tb.keys())
    na = math.sqrt(sum(v * v for v in ta.values()))
    nb = math.sqrt(sum(v * v for v in tb.values()))
    return dot / (na * nb)


class Lexicon:
    """Closed-vocabulary category lexicon (64 categories, prefix wildcards).

    Categories are ordered; fewer than 64 loaded categories are padded with
    empty placeholders so score vectors always have 64 components.
    """

    SIZE = 64

    def __init__(self, categories: list[tuple[str, list[str]]]):
        if len(categories) > self.SIZE:
            raise ValidationError(
                f"lexicon has {len(categories)} categories; at most {self.SIZE} allowed"
            )
        padded = [(name, list(patterns)) for name, patterns in categories]
        while len(padded) < self.SIZE:
            padded.append((f"_empty_{len(padded):02d}", []))
        self.categories: list[tuple[str, list[str]]] = padded
        self.category_names: list[str] = [name for name, _ in padded]
        self._literal: dict[str, set[int]] = {}
        self._prefixes: list[tuple[str, int]] = []
        for idx, (_, patterns) in enumerate(padded):
            for pat in patterns:
                pat = pat.lower()
                if pat.endswith("*"):
                    self._prefixes.append((pat[:-1], idx))
                else:
                    self._literal.setdefault(pat, set()).add(idx)

    def categories_for(self, word: str) -> set[int]:
        """Category indices whose patterns match ``word`` (lowercased)."""
        word = word.lower()
        hits = set(self._literal.get(word, ()))
        for prefix, idx in self._prefixes:
            if word.startswith(prefix):
                hits.add(idx)
        return hits

    def index_of(self, name: str) -> int:
        return self.category_names.index(name)

    @classmethod
    def from_file(cls, path: str | Path) -> "Lexicon":
        """Load the JSON lexicon format: {"categories": [{"name", "patterns"}]}."""
        with open(path, encoding="utf-8") as fh:
            raw = json.load(fh)
        cats = [(c["name"], list(c["patterns"])) for c in raw["categories"]]
        return cls(cats)


def lexicon_score(tokens: TokenList, lex: Lexicon) -> list[float]:
    """Per-category percentages of word tokens matching the category.

    The basis is word-class tokens only; all-zero when there are none.
    """
    words = tokens.words()
    out = [0.0] * Lexicon.SIZE
    if not words:
        return out
    counts = [0] * Lexicon.SIZE
    for w in words:
        for idx in lex.categories_for(w):
            counts[idx] += 1
    n = len(words)
    for i, c in enumerate(counts):
        out[i] = 100.0 * c / n
    return out


def load_valence(path: str | Path) -> dict[str, float]:
    """Load a JSON word -> valence score table."""
    with open(path, encoding="utf-8") as fh:
        table = json.load(fh)
    return {str(k).lower(): float(v) for k, v in table.items()}


def _is_negation(tok: Token) -> bool:
    s = tok.normalized
    return s in NEGATIONS or s.endswith("n't") or s.endswith("n\u2019t")


def sentiment_score(tokens: TokenList, valence: dict[str, float]) -> float:
    """Valence-sum sentiment normalized to (-1, 1).

    A valenced token immediately preceded by a negation token has its sign
    flipped. The raw sum s is squashed as s / sqrt(s^2 + 15); empty or
    valence-free input scores 0.0.
    """
    s = 0.0
    prev: Token | None = None
    for tok in tokens:
        v = valence.get(tok.normalized if tok.cls == "word" else tok.surface.lower())
        if v is not None:
            if prev is not None and _is_negation(prev):
                v = -v
            s += v
        prev = tok
    if s == 0.0:
        return 0.0
    return s / math.sqrt(s * s + _SENTIMENT_ALPHA)


# ---------------------------------------------------------------------------
# Part-of-speech tagging
# ---------------------------------------------------------------------------

# 25-tag Twitter-style tagset used by the shipped fallback tagger.
DEFAULT_TAGSET = (
    "common_noun", "proper_noun", "pronoun", "nominal_possessive",
    "proper_noun_possessive", "verb", "nominal_verbal", "proper_noun_verbal",
    "adjective", "adverb", "interjection", "determiner", "preposition",
    "conjunction", "verb_particle", "existential", "existential_verbal",
    "hashtag", "mention", "discourse_marker", "url", "emoticon", "numeral",
    "punctuation", "other",
)

CONTENT_TAGS = frozenset({"common_noun", "proper_noun", "verb", "adjective", "adverb"})

_STRUCTURAL_TAGS = {
    "mention": "mention",
    "hashtag": "hashtag",
    "url": "url",
    "emoticon": "emoticon",
    "punct": "punctuation",
    "number": "numeral",
}

_PRONOUNS = frozenset(
    "i me my mine we us our ours you your yours he him his she her hers it its "
    "they them their theirs who whom whose this that these those myself yourself "
    "himself herself itself ourselves themselves".split()
)
_DETERMINERS = frozenset("a an the some any each every no all both few many much".split())
_PREPOSITIONS = frozenset(
    "in on at by for with about against between into through during before after "
    "above below to from up down of off over under".split()
)
_CONJUNCTIONS = frozenset("and or but nor so yet".split())
_INTERJECTIONS = frozenset("oh hey wow lol omg haha hahaha yay ugh hmm ah uh huh".split())
_COMMON_VERBS = frozenset(
    "be am is are was were been being have has had having do does did doing will "
    "would shall should can could may might must go goes went gone get gets got "
    "make makes made say says said see sees saw know knows knew think thinks "
    "thought want wants take takes took come comes came".split()
)
_VERB_SUFFIXES = ("ing", "ed", "ize", "ise", "ify", "ate")
_ADJ_SUFFIXES = ("ful", "ous", "ive", "able", "ible", "al", "ic", "less", "ish", "est")
_NOUN_SUFFIXES = ("ness", "tion", "sion", "ment", "ity", "ship", "hood", "ism", "ist", "er", "or")


class RuleTagger:
    """Rule-based fallback tagger over the shipped 25-tag tagset.

    Structural token classes map 1:1; words get small-wordlist and suffix
    heuristics. This is a stand-in for a trained tagger, kept deterministic
    and dependency-free.
    """

    tagset = DEFAULT_TAGSET

    def tag(self, tokens: TokenList) -> list[str]:
        tags = []
        for tok in tokens:
            if tok.cls != "word":
                tags.append(_STRUCTURAL_TAGS[tok.cls])
                continue
            tags.append(self._tag_word(tok))
        return tags

    @staticmethod
    def _tag_word(tok: Token) -> str:
        w = tok.normalized
        if w == "rt":
            return "discourse_marker"
        if w in _PRONOUNS:
            return "pronoun"
        if w in _DETERMINERS:
            return "determiner"
        if w in _PREPOSITIONS:
            return "preposition"
        if w in _CONJUNCTIONS:
            return "conjunction"
        if w in _INTERJECTIONS:
            return "interjection"
        if w == "there":
            return "existential"
        if w in _COMMON_VERBS or "'" in w or "\u2019" in w:
            return "verb"
        if w.endswith("ly"):
            return "adverb"
        if any(w.endswith(s) for s in _VERB_SUFFIXES):
            return "verb"
        if any(w.endswith(s) for s in _ADJ_SUFFIXES):
            return "adjective"
        if any(w.endswith(s) for s in _NOUN_SUFFIXES):
            return "common_noun"
        if tok.surface[:1].isupper():
            return "proper_noun"
        return "common_noun"


class PretaggedStore:
    """Tags loaded from a pre-tagged JSONL file ({"id": u64, "tags": [...]})."""

    def __init__(self, tags_by_id: dict[int, list[str]], tagset=DEFAULT_TAGSET):
        self.tagset = tuple(tagset)
        self._tags = tags_by_id

    def get(self, tweet_id: int) -> list[str] | None:
        return self._tags.get(tweet_id)

    @classmethod
    def from_file(cls, path: str | Path, tagset=DEFAULT_TAGSET) -> "PretaggedStore":
        tags_by_id: dict[int, list[str]] = {}
        with open(path, encoding="utf-8") as fh:
            for line in fh:
                line = line.strip()
                if not line:
                    continue
                rec = json.loads(line)
                tags_by_id[int(rec["id"])] = [str(t) for t in rec["tags"]]
        return cls(tags_by_id, tagset)


def pos_tag(tokens: TokenList, tagger) -> list[str]:
    """Tag ``tokens`` through ``tagger``, enforcing the interface contract."""
    tagset = set(tagger.tagset)
    if len(tagger.tagset) != 25:
        raise ContractError(f"tagger declares {len(tagger.tagset)} tags, expected 25")
    tags = tagger.tag(tokens)
    if len(tags) != len(tokens):
        raise ContractError(
            f"tagger returned {len(tags)} tags for {len(tokens)} tokens"
        )
    for t in tags:
        if t not in tagset:
            raise ContractError(f"tagger emitted unknown tag {t!r}")
    return tags


def load_wordlist(path: str | Path) -> frozenset[str]:
    """Load a one-word-per-line dictionary wordlist (lowercased)."""
    words = set()
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            w = line.strip().lower()
            if w:
                words.add(w)
    return frozenset(words)


def text_stats(
    tokens: TokenList,
    tags: list[str],
    wordlist: frozenset[str],
    content_tags: frozenset[str] = CONTENT_TAGS,
) -> tuple[float, float]:
    """(lexical_density, dictionary_fraction) over word tokens.

    Lexical density counts content tags (noun/verb/adjective/adverb) against
    the word-token count; dictionary fraction counts word tokens found in
    ``wordlist`` case-insensitively. Both are 0 when there are no word tokens.
    """
    if len(tags) != len(tokens):
        raise ContractError(f"{len(tags)} tags for {len(tokens)} tokens")
    n_words = tokens.count_class("word")
    if n_words == 0:
        return (0.0, 0.0)
    content = sum(1 for t in tags if t in content_tags)
    in_dict = sum(
        1 for tok in tokens if tok.cls == "word" and tok.normalized in wordlist
    )
    return (content / n_words, in_dict / n_words)
