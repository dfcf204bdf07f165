"""Keyword heuristic: flood iff a stem appears at a word start.

Stem matching is deliberately prefix-based so "inundat" covers inundated and
inundation, and "flood" covers floods/flooding. This is the strongest simple
keyword rule; it still mislabels hypothetical-flood sentences and misses
descriptions like knee-deep water with no stem present.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

from ..corpus import Article, Label
from ..errors import DataError

DEFAULT_STEMS = ("flood", "inundat", "cyclone")


@dataclass(frozen=True)
class KeywordRule:
    stems: tuple[str, ...] = DEFAULT_STEMS

    def __post_init__(self) -> None:
        if not self.stems:
            raise DataError("keyword rule needs at least one stem")
        if any(s != s.lower() or not s for s in self.stems):
            raise DataError("keyword stems must be non-empty and lowercase")

    def pattern(self) -> re.Pattern:
        alternatives = "|".join(re.escape(s) for s in self.stems)
        return re.compile(r"\b(?:" + alternatives + r")")


def keyword_predict(article: Article, rule: KeywordRule | None = None) -> Label:
    rule = rule or KeywordRule()
    text = f"{article.title} {article.body}".lower()
    return Label.FLOOD if rule.pattern().search(text) else Label.NOT_FLOOD
