"""Dictionary-based word-category scoring (LIWC-style percentages).

Lexicon file format, UTF-8::

    # comment
    category<TAB>pattern pattern ...

One line per category. Patterns are lowercase words; a trailing ``*`` turns
a pattern into a prefix (stem) match.
"""

from __future__ import annotations

import functools
import re
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

from .errors import ConfigError

TOKEN_RE = re.compile(r"[a-z0-9]+(?:'[a-z0-9]+)*")


@dataclass(frozen=True)
class Category:
    name: str
    patterns: tuple[str, ...]
    exact: frozenset = field(init=False, repr=False, compare=False)
    stems: tuple[str, ...] = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "exact", frozenset(p for p in self.patterns if not p.endswith("*")))
        object.__setattr__(self, "stems", tuple(p[:-1] for p in self.patterns if p.endswith("*")))

    def matches(self, token: str) -> bool:
        return token in self.exact or token.startswith(self.stems)


@dataclass(frozen=True)
class Lexicon:
    categories: dict[str, Category]

    @property
    def names(self) -> tuple[str, ...]:
        return tuple(self.categories)

    def with_pattern(self, category: str, pattern: str) -> "Lexicon":
        cats = dict(self.categories)
        old = cats[category]
        cats[category] = Category(category, old.patterns + (pattern,))
        return Lexicon(cats)


@dataclass(frozen=True)
class CategoryScores:
    word_count: int
    scores: dict[str, float]
    empty_text: bool = False


def parse_lexicon(text: str) -> Lexicon:
    categories: dict[str, Category] = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        if not raw.strip() or raw.lstrip().startswith("#"):
            continue
        if "\t" not in raw:
            raise ConfigError(f"line {lineno}: expected category<TAB>patterns")
        name, _, rest = raw.partition("\t")
        name = name.strip()
        patterns = tuple(rest.split())
        if not name:
            raise ConfigError(f"line {lineno}: empty category name")
        if name in categories:
            raise ConfigError(f"line {lineno}: duplicate category {name!r}")
        if not patterns:
            raise ConfigError(f"line {lineno}: category {name!r} has no patterns")
        for p in patterns:
            if p != p.lower():
                raise ConfigError(f"line {lineno}: pattern {p!r} is not lowercase")
            if p == "*" or "*" in p[:-1]:
                raise ConfigError(f"line {lineno}: bad pattern {p!r}")
        categories[name] = Category(name, patterns)
    return Lexicon(categories)


def load_lexicon(path: str | Path) -> Lexicon:
    return parse_lexicon(Path(path).read_text(encoding="utf-8"))


@functools.lru_cache(maxsize=None)
def default_lexicon() -> Lexicon:
    text = resources.files("dictator_eval").joinpath("data/lexicon.tsv").read_text(encoding="utf-8")
    return parse_lexicon(text)


def tokenize(text: str) -> list[str]:
    return TOKEN_RE.findall(text.lower())


def score_text(text: str, lexicon: Lexicon) -> CategoryScores:
    tokens = tokenize(text or "")
    n = len(tokens)
    if n == 0:
        return CategoryScores(0, {name: 0.0 for name in lexicon.categories}, empty_text=True)
    scores = {}
    for name, cat in lexicon.categories.items():
        hits = sum(1 for tok in tokens if cat.matches(tok))
        scores[name] = 100.0 * hits / n
    return CategoryScores(n, scores)
