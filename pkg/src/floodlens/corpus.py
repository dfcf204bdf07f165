"""Article corpus model, JSONL/CSV readers and writers, and train/test splits.

Corpus files are UTF-8 JSONL, one object per line with keys ``id``, ``source``,
``title``, ``body``, ``published`` (ISO-8601 date) and optional ``url``.
Annotation files are CSV with header ``article_id,label`` where label is
``flood`` or ``not_flood``.
"""

from __future__ import annotations

import csv
import datetime as dt
import enum
import json
import logging
import random
import unicodedata
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Sequence

from .errors import DataError

logger = logging.getLogger(__name__)

_REQUIRED_KEYS = ("id", "source", "title", "body", "published")


class Label(enum.Enum):
    FLOOD = "flood"
    NOT_FLOOD = "not_flood"

    @classmethod
    def parse(cls, text: str) -> "Label":
        try:
            return cls(text.strip().lower())
        except ValueError:
            raise DataError(f"unknown label {text!r} (expected flood or not_flood)") from None


@dataclass(frozen=True)
class Article:
    id: str
    source: str
    title: str
    body: str
    published: dt.date
    url: str | None = None


@dataclass(frozen=True)
class Annotation:
    article_id: str
    label: Label


@dataclass
class CorpusLoadResult:
    """Articles that parsed cleanly plus per-line errors for the rest."""

    articles: list[Article]
    line_errors: list[tuple[int, str]] = field(default_factory=list)

    @property
    def by_id(self) -> dict[str, Article]:
        return {a.id: a for a in self.articles}


def _parse_article(obj: dict, line_no: int) -> Article:
    for key in _REQUIRED_KEYS:
        if key not in obj:
            raise DataError(f"line {line_no}: missing key {key!r}")
    body = unicodedata.normalize("NFC", str(obj["body"]))
    if not body.strip():
        raise DataError(f"line {line_no}: body is empty after trimming")
    try:
        published = dt.date.fromisoformat(str(obj["published"]))
    except ValueError:
        raise DataError(
            f"line {line_no}: published {obj['published']!r} is not an ISO-8601 date"
        ) from None
    url = obj.get("url")
    return Article(
        id=str(obj["id"]),
        source=unicodedata.normalize("NFC", str(obj["source"])),
        title=unicodedata.normalize("NFC", str(obj["title"])),
        body=body,
        published=published,
        url=str(url) if url is not None else None,
    )


def load_corpus(path: str | Path) -> CorpusLoadResult:
    """Read a JSONL corpus.

    Malformed lines are recorded as (line number, message) pairs and skipped;
    a duplicate article id aborts the load because downstream joins are by id.
    """
    path = Path(path)
    if not path.exists():
        raise DataError(f"corpus file {path} does not exist")
    articles: list[Article] = []
    errors: list[tuple[int, str]] = []
    seen: dict[str, int] = {}
    with open(path, encoding="utf-8") as fh:
        for line_no, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            try:
                obj = json.loads(line)
                if not isinstance(obj, dict):
                    raise DataError(f"line {line_no}: expected a JSON object")
                article = _parse_article(obj, line_no)
            except json.JSONDecodeError as exc:
                errors.append((line_no, f"malformed JSON: {exc.msg}"))
                continue
            except DataError as exc:
                errors.append((line_no, str(exc)))
                continue
            if article.id in seen:
                raise DataError(
                    f"{path}: duplicate article id {article.id!r} on line {line_no} "
                    f"(first seen on line {seen[article.id]})"
                )
            seen[article.id] = line_no
            articles.append(article)
    logger.info("loaded %d articles from %s (%d bad lines)", len(articles), path, len(errors))
    return CorpusLoadResult(articles=articles, line_errors=errors)


def write_corpus(articles: Iterable[Article], path: str | Path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for a in articles:
            obj = {
                "id": a.id,
                "source": a.source,
                "title": a.title,
                "body": a.body,
                "published": a.published.isoformat(),
            }
            if a.url is not None:
                obj["url"] = a.url
            fh.write(json.dumps(obj, ensure_ascii=False) + "\n")


def load_annotations(path: str | Path, corpus_ids: set[str] | None = None) -> list[Annotation]:
    """Read an annotation CSV; ids must resolve, one annotation per article."""
    path = Path(path)
    if not path.exists():
        raise DataError(f"annotation file {path} does not exist")
    annotations: list[Annotation] = []
    seen: set[str] = set()
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames is None or [f.strip() for f in reader.fieldnames] != ["article_id", "label"]:
            raise DataError(f"{path}: expected header 'article_id,label', got {reader.fieldnames}")
        for row_no, row in enumerate(reader, start=2):
            article_id = row["article_id"].strip()
            if article_id in seen:
                raise DataError(f"{path} row {row_no}: duplicate annotation for {article_id!r}")
            if corpus_ids is not None and article_id not in corpus_ids:
                raise DataError(f"{path} row {row_no}: article id {article_id!r} not in corpus")
            seen.add(article_id)
            annotations.append(Annotation(article_id, Label.parse(row["label"])))
    return annotations


def write_annotations(annotations: Iterable[Annotation], path: str | Path) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["article_id", "label"])
        for ann in annotations:
            writer.writerow([ann.article_id, ann.label.value])


@dataclass(frozen=True)
class SplitSpec:
    """Seeded stratified split, or explicit id lists when reproducing one."""

    seed: int = 0
    test_fraction: float = 0.5
    explicit_train: tuple[str, ...] | None = None
    explicit_test: tuple[str, ...] | None = None


def split(
    annotations: Sequence[Annotation], spec: SplitSpec
) -> tuple[list[Annotation], list[Annotation]]:
    """Partition annotations into (train, test).

    Stratified per label: class quotas are apportioned by largest remainder so
    the overall test size equals round(test_fraction * n) exactly, and each
    class is within +/-1 of its proportional share. Deterministic for a fixed
    seed. Explicit id lists on the SplitSpec override the seeded draw.
    """
    if spec.explicit_train is not None or spec.explicit_test is not None:
        if spec.explicit_train is None or spec.explicit_test is None:
            raise DataError("explicit split needs both train and test id lists")
        train_ids, test_ids = set(spec.explicit_train), set(spec.explicit_test)
        if train_ids & test_ids:
            raise DataError(f"explicit split overlaps on {sorted(train_ids & test_ids)[:5]}")
        all_ids = {a.article_id for a in annotations}
        if train_ids | test_ids != all_ids:
            raise DataError("explicit split does not cover the annotated set exactly")
        train = [a for a in annotations if a.article_id in train_ids]
        test = [a for a in annotations if a.article_id in test_ids]
        return train, test

    if len(annotations) < 2:
        raise DataError(f"cannot split {len(annotations)} annotations")
    if not 0.0 < spec.test_fraction < 1.0:
        raise DataError(f"test_fraction {spec.test_fraction} outside (0, 1)")
    by_label: dict[Label, list[Annotation]] = {}
    for ann in annotations:
        by_label.setdefault(ann.label, []).append(ann)
    if len(by_label) < 2:
        only = next(iter(by_label)).value
        raise DataError(f"cannot stratify a single-class annotation set (all {only})")

    # Largest-remainder apportionment of the test quota across classes.
    target = round(spec.test_fraction * len(annotations))
    target = min(max(target, 1), len(annotations) - 1)
    labels = sorted(by_label, key=lambda lb: lb.value)
    quotas = {lb: spec.test_fraction * len(by_label[lb]) for lb in labels}
    take = {lb: int(quotas[lb]) for lb in labels}
    remainder_order = sorted(labels, key=lambda lb: (-(quotas[lb] - take[lb]), lb.value))
    i = 0
    while sum(take.values()) < target:
        lb = remainder_order[i % len(labels)]
        if take[lb] < len(by_label[lb]):
            take[lb] += 1
        i += 1
    while sum(take.values()) > target:
        lb = remainder_order[-1 - (i % len(labels))]
        if take[lb] > 0:
            take[lb] -= 1
        i += 1

    rng = random.Random(spec.seed)
    train: list[Annotation] = []
    test: list[Annotation] = []
    for lb in labels:
        group = list(by_label[lb])
        rng.shuffle(group)
        test.extend(group[: take[lb]])
        train.extend(group[take[lb]:])
    train.sort(key=lambda a: a.article_id)
    test.sort(key=lambda a: a.article_id)
    return train, test
