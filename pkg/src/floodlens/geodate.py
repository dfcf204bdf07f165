"""Gazetteer-based location assignment and event week extraction.

Each flood-classified article gets exactly one region. Alias mentions are
counted whole-word and case-insensitively, title mentions weighted 2x body
mentions; the best district wins if any district is mentioned at all,
otherwise the best division, otherwise the country. The event week is the
ISO week of the publication date; news coverage of ongoing floods is close
enough to contemporaneous that weekly aggregation absorbs the lag.
"""

from __future__ import annotations

import csv
import enum
import re
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Iterable, Sequence

from .corpus import Article, Label
from .errors import DataError
from .weeks import week_of

TITLE_WEIGHT = 2
BODY_WEIGHT = 1


class Level(enum.Enum):
    COUNTRY = "Country"
    DIVISION = "Division"
    DISTRICT = "District"


@dataclass(frozen=True)
class Region:
    region_id: str
    name: str
    level: Level
    parent_id: str | None
    aliases: tuple[str, ...]


class Gazetteer:
    """Immutable region index with precompiled alias patterns."""

    def __init__(self, regions: Sequence[Region]):
        self.regions = {r.region_id: r for r in regions}
        self._validate()
        self._patterns = {
            r.region_id: [re.compile(r"\b" + re.escape(a) + r"\b") for a in r.aliases]
            for r in regions
        }

    def _validate(self) -> None:
        levels = {lv: [r for r in self.regions.values() if r.level is lv] for lv in Level}
        if len(levels[Level.COUNTRY]) != 1:
            raise DataError(f"gazetteer must contain exactly 1 Country, found {len(levels[Level.COUNTRY])}")
        if len(levels[Level.DIVISION]) != 8:
            raise DataError(f"gazetteer must contain exactly 8 Divisions, found {len(levels[Level.DIVISION])}")
        for r in self.regions.values():
            if r.level is Level.COUNTRY:
                continue
            if r.parent_id not in self.regions:
                raise DataError(f"region {r.region_id}: unknown parent {r.parent_id!r}")
            parent = self.regions[r.parent_id]
            expected = Level.COUNTRY if r.level is Level.DIVISION else Level.DIVISION
            if parent.level is not expected:
                raise DataError(
                    f"region {r.region_id}: parent {parent.region_id} is a "
                    f"{parent.level.value}, expected {expected.value}"
                )
        seen: dict[str, str] = {}
        for r in self.regions.values():
            for alias in r.aliases:
                if alias in seen:
                    raise DataError(
                        f"alias {alias!r} claimed by both {seen[alias]} and {r.region_id}"
                    )
                seen[alias] = r.region_id

    @property
    def country(self) -> Region:
        return next(r for r in self.regions.values() if r.level is Level.COUNTRY)

    def divisions(self) -> list[Region]:
        return sorted(
            (r for r in self.regions.values() if r.level is Level.DIVISION),
            key=lambda r: r.region_id,
        )

    def districts(self) -> list[Region]:
        return sorted(
            (r for r in self.regions.values() if r.level is Level.DISTRICT),
            key=lambda r: r.region_id,
        )

    def division_of(self, region_id: str) -> str | None:
        """The division a region rolls up to (itself for divisions)."""
        region = self.regions[region_id]
        if region.level is Level.DIVISION:
            return region.region_id
        if region.level is Level.DISTRICT:
            return region.parent_id
        return None

    def mention_counts(self, region_id: str, text: str) -> list[tuple[str, int]]:
        lowered = text.lower()
        out = []
        for alias, pattern in zip(self.regions[region_id].aliases, self._patterns[region_id]):
            count = len(pattern.findall(lowered))
            if count:
                out.append((alias, count))
        return out

    def first_mention(self, region_id: str, text: str) -> int:
        lowered = text.lower()
        best = len(lowered) + 1
        for pattern in self._patterns[region_id]:
            m = pattern.search(lowered)
            if m and m.start() < best:
                best = m.start()
        return best


def load_gazetteer(path: str | Path | None = None) -> Gazetteer:
    """Load the CSV gazetteer; None means the packaged Bangladesh file."""
    if path is None:
        ref = resources.files("floodlens").joinpath("data/gazetteer_bd.csv")
        text = ref.read_text(encoding="utf-8")
        return _parse_gazetteer(text.splitlines(), "<packaged gazetteer>")
    path = Path(path)
    if not path.exists():
        raise DataError(f"gazetteer file {path} does not exist")
    with open(path, newline="", encoding="utf-8") as fh:
        return _parse_gazetteer(fh, str(path))


def _parse_gazetteer(lines: Iterable[str], origin: str) -> Gazetteer:
    regions = []
    reader = csv.DictReader(lines)
    expected = ["region_id", "name", "level", "parent_id", "aliases"]
    if reader.fieldnames != expected:
        raise DataError(f"{origin}: expected header {','.join(expected)}")
    for row in reader:
        try:
            level = Level(row["level"])
        except ValueError:
            raise DataError(f"{origin}: unknown level {row['level']!r} for {row['region_id']}") from None
        aliases = tuple(a.strip().lower() for a in row["aliases"].split("|") if a.strip())
        if not aliases:
            raise DataError(f"{origin}: region {row['region_id']} has no aliases")
        regions.append(
            Region(
                region_id=row["region_id"],
                name=row["name"],
                level=level,
                parent_id=row["parent_id"] or None,
                aliases=aliases,
            )
        )
    return Gazetteer(regions)


@dataclass(frozen=True)
class EventRecord:
    article_id: str
    label: Label
    region_id: str | None
    iso_week: str | None
    evidence: tuple[tuple[str, int], ...] = field(default=())


def extract_location(article: Article, gazetteer: Gazetteer) -> tuple[str, list[tuple[str, int]]]:
    """Pick the article's region: score = 2x title mentions + 1x body mentions.

    Districts outrank divisions whenever any district alias appears; ties
    break on title presence, then earliest first mention in title+body, then
    region id so the outcome never depends on hash order. The evidence lists
    the winner's alias counts first and then any other matched region's, so
    multi-region articles are visible downstream.
    """
    title, body = article.title, article.body
    combined = f"{title}\n{body}"

    def score_levels(region_ids: Iterable[str]):
        scored = []
        for rid in region_ids:
            title_hits = sum(c for _, c in gazetteer.mention_counts(rid, title))
            body_hits = sum(c for _, c in gazetteer.mention_counts(rid, body))
            score = TITLE_WEIGHT * title_hits + BODY_WEIGHT * body_hits
            if score > 0:
                scored.append((score, title_hits > 0, rid))
        return scored

    for group in (gazetteer.districts(), gazetteer.divisions()):
        scored = score_levels(r.region_id for r in group)
        if scored:
            scored.sort(
                key=lambda item: (
                    -item[0],
                    not item[1],
                    gazetteer.first_mention(item[2], combined),
                    item[2],
                )
            )
            winner = scored[0][2]
            evidence = gazetteer.mention_counts(winner, combined)
            others = {rid for _, _, rid in score_levels(gazetteer.regions) if rid != winner}
            others.discard(gazetteer.country.region_id)
            for rid in sorted(others):
                evidence.extend(gazetteer.mention_counts(rid, combined))
            return winner, evidence
    return gazetteer.country.region_id, []


def extract_week(article: Article) -> str:
    return week_of(article.published)


def build_events(
    articles: Sequence[Article],
    predictions: dict[str, Label],
    gazetteer: Gazetteer,
) -> list[EventRecord]:
    """One EventRecord per article; only flood records carry region and week."""
    records = []
    for article in articles:
        if article.id not in predictions:
            raise DataError(f"no prediction for article {article.id!r}")
        label = predictions[article.id]
        if label is Label.FLOOD:
            region_id, evidence = extract_location(article, gazetteer)
            records.append(
                EventRecord(
                    article_id=article.id,
                    label=label,
                    region_id=region_id,
                    iso_week=extract_week(article),
                    evidence=tuple(evidence),
                )
            )
        else:
            records.append(EventRecord(article.id, label, None, None))
    return records


def write_events(records: Iterable[EventRecord], path: str | Path) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["article_id", "label", "region_id", "iso_week"])
        for rec in records:
            writer.writerow(
                [rec.article_id, rec.label.value, rec.region_id or "", rec.iso_week or ""]
            )


def load_events(path: str | Path) -> list[EventRecord]:
    path = Path(path)
    if not path.exists():
        raise DataError(f"events file {path} does not exist")
    records = []
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        expected = ["article_id", "label", "region_id", "iso_week"]
        if reader.fieldnames != expected:
            raise DataError(f"{path}: expected header {','.join(expected)}")
        for row in reader:
            records.append(
                EventRecord(
                    article_id=row["article_id"],
                    label=Label.parse(row["label"]),
                    region_id=row["region_id"] or None,
                    iso_week=row["iso_week"] or None,
                )
            )
    return records
