"""Access to the shipped data fixtures (toy lexicon, valence table,
wordlist, client whitelist, trait map)."""

from __future__ import annotations

from importlib import resources as importlib_resources
from pathlib import Path

from . import analytics, cleanup, textkit
from .features import FeatureResources


def data_path(name: str) -> Path:
    return Path(importlib_resources.files("regretstream").joinpath("data", name))


def load_default_resources() -> FeatureResources:
    """FeatureResources backed by the shipped toy fixtures."""
    return FeatureResources(
        lexicon=textkit.Lexicon.from_file(data_path("toy_lexicon.json")),
        valence=textkit.load_valence(data_path("toy_valence.json")),
        wordlist=textkit.load_wordlist(data_path("toy_wordlist.txt")),
        tagger=textkit.RuleTagger(),
    )


def load_default_whitelist() -> frozenset[str]:
    return cleanup.load_whitelist(data_path("client_whitelist.txt"))


def load_default_trait_map() -> dict:
    return analytics.load_trait_map(data_path("trait_map.json"))


def trait_reference_medians_path() -> Path:
    return data_path("trait_reference_medians.json")
