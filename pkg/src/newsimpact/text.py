"""Shared headline tokenization and the bundled stopword list."""

from __future__ import annotations

import re
from functools import lru_cache
from importlib import resources

_TOKEN_SPLIT = re.compile(r"[^0-9a-z]+")

MIN_TOKEN_LEN = 2


def tokenize(title: str) -> list[str]:
    """Lowercase, split on non-alphanumeric runs, drop tokens shorter than 2."""
    return [t for t in _TOKEN_SPLIT.split(title.lower()) if len(t) >= MIN_TOKEN_LEN]


@lru_cache(maxsize=1)
def default_stopwords() -> frozenset[str]:
    text = resources.files("newsimpact.data").joinpath("stopwords.txt").read_text("utf-8")
    return frozenset(w.strip() for w in text.splitlines() if w.strip() and not w.startswith("#"))


def load_stopwords(path: str) -> frozenset[str]:
    """Read a user-supplied stopword file, one token per line, # comments."""
    with open(path, encoding="utf-8") as fh:
        return frozenset(w.strip().lower() for w in fh if w.strip() and not w.startswith("#"))
