"""Weekly flood time series per region.

The news flood index for a region-week is the count of flood-classified
articles divided by the total number of articles published that week. By
default the denominator is the in-corpus article total per week (national,
source-pooled); an external denominator CSV in the same series schema can be
supplied to reproduce other estimation schemes. Counts roll up the region
tree: a division includes its districts, the country includes everything.
"""

from __future__ import annotations

import csv
import enum
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Mapping, Sequence

from .corpus import Article, Label
from .errors import DataError
from .geodate import EventRecord, Gazetteer, Level
from .weeks import week_of, week_range


class Unit(enum.Enum):
    FLOOD_FRACTION = "FloodFraction"
    AREA_KM2 = "AreaKm2"
    PEOPLE_AFFECTED = "PeopleAffected"
    TWEET_INDEX = "TweetIndex"


@dataclass
class RegionSeries:
    """Weekly values for one region; weeks strictly increasing, no NaN."""

    region_id: str
    unit: Unit
    points: dict[str, float]
    # Parallel integer counts (numerator, denominator) when the unit is a
    # ratio; aggregate_to_division needs them to sum before dividing.
    counts: dict[str, tuple[int, int]] | None = field(default=None, repr=False)

    def __post_init__(self) -> None:
        weeks = list(self.points)
        if weeks != sorted(weeks):
            self.points = dict(sorted(self.points.items()))
        for week, value in self.points.items():
            if not math.isfinite(value):
                raise DataError(f"series {self.region_id}: non-finite value in {week}")
            if self.unit is Unit.FLOOD_FRACTION and not 0.0 <= value <= 1.0:
                raise DataError(
                    f"series {self.region_id}: flood fraction {value} in {week} outside [0, 1]"
                )

    def weeks(self) -> list[str]:
        return list(self.points)

    def values(self) -> list[float]:
        return list(self.points.values())


def default_denominators(articles: Sequence[Article]) -> dict[str, int]:
    """Total in-corpus article count per week, pooled over sources and regions."""
    totals: dict[str, int] = {}
    for article in articles:
        week = week_of(article.published)
        totals[week] = totals.get(week, 0) + 1
    return totals


def flood_counts(
    events: Iterable[EventRecord], gazetteer: Gazetteer
) -> dict[str, dict[str, int]]:
    """Flood article counts per region per week with hierarchy roll-up.

    A district event increments its district, its division and the country;
    an event resolved only to the country increments the country alone (the
    remainder is exposed by conservation_gap).
    """
    counts: dict[str, dict[str, int]] = {}

    def bump(region_id: str, week: str) -> None:
        per_week = counts.setdefault(region_id, {})
        per_week[week] = per_week.get(week, 0) + 1

    country_id = gazetteer.country.region_id
    for event in events:
        if event.label is not Label.FLOOD:
            continue
        if event.region_id is None or event.iso_week is None:
            raise DataError(f"flood event {event.article_id} lacks region or week")
        region = gazetteer.regions[event.region_id]
        bump(country_id, event.iso_week)
        if region.level is Level.DISTRICT:
            bump(region.region_id, event.iso_week)
            bump(region.parent_id, event.iso_week)
        elif region.level is Level.DIVISION:
            bump(region.region_id, event.iso_week)
    return counts


def conservation_gap(counts: Mapping[str, dict[str, int]], gazetteer: Gazetteer) -> dict[str, int]:
    """Per week: country count minus the division sum (country-only events)."""
    country = counts.get(gazetteer.country.region_id, {})
    division_ids = [d.region_id for d in gazetteer.divisions()]
    gap = {}
    for week, total in country.items():
        division_sum = sum(counts.get(d, {}).get(week, 0) for d in division_ids)
        gap[week] = total - division_sum
    return gap


def build_flood_series(
    events: Iterable[EventRecord],
    region_id: str,
    weeks: Sequence[str],
    denominators: Mapping[str, int],
    gazetteer: Gazetteer,
) -> RegionSeries:
    """value(w) = flood count(region, w) / total articles(w); zero floods -> 0."""
    all_counts = flood_counts(events, gazetteer)
    return series_from_counts(region_id, weeks, all_counts.get(region_id, {}), denominators)


def series_from_counts(
    region_id: str,
    weeks: Sequence[str],
    numerators: Mapping[str, int],
    denominators: Mapping[str, int],
) -> RegionSeries:
    points: dict[str, float] = {}
    counts: dict[str, tuple[int, int]] = {}
    for week in weeks:
        total = denominators.get(week, 0)
        if total <= 0:
            raise DataError(f"zero or missing article total for week {week}")
        numerator = numerators.get(week, 0)
        points[week] = numerator / total
        counts[week] = (numerator, total)
    return RegionSeries(region_id=region_id, unit=Unit.FLOOD_FRACTION, points=points, counts=counts)


def aggregate_to_division(
    district_series: Sequence[RegionSeries], division_id: str
) -> RegionSeries:
    """Combine district ratio series by summing counts, not averaging ratios."""
    if not district_series:
        raise DataError("nothing to aggregate")
    units = {s.unit for s in district_series}
    if len(units) != 1:
        raise DataError(f"cannot aggregate mixed units: {sorted(u.value for u in units)}")
    week_sets = {tuple(s.weeks()) for s in district_series}
    if len(week_sets) != 1:
        raise DataError("district series cover different week ranges")
    for s in district_series:
        if s.counts is None:
            raise DataError(f"series {s.region_id} lacks count data; cannot sum ratios")
    weeks = district_series[0].weeks()
    numerators: dict[str, int] = {}
    denominators: dict[str, int] = {}
    for s in district_series:
        for week in weeks:
            num, den = s.counts[week]
            numerators[week] = numerators.get(week, 0) + num
            denominators[week] = denominators.get(week, 0) + den
    return series_from_counts(division_id, weeks, numerators, denominators)


def corpus_week_span(articles: Sequence[Article]) -> list[str]:
    if not articles:
        raise DataError("cannot derive a week range from an empty corpus")
    days = [a.published for a in articles]
    return week_range(week_of(min(days)), week_of(max(days)))


# ---------------------------------------------------------------------------
# Series CSV: region_id,iso_week,value,unit — identical for news, satellite,
# Twitter and EM-DAT-derived series, so the correlation stage is source-blind.
# ---------------------------------------------------------------------------


def write_series(series_list: Sequence[RegionSeries], path: str | Path) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["region_id", "iso_week", "value", "unit"])
        for series in series_list:
            for week, value in series.points.items():
                writer.writerow([series.region_id, week, repr(value), series.unit.value])


def load_series(path: str | Path) -> dict[str, RegionSeries]:
    path = Path(path)
    if not path.exists():
        raise DataError(f"series file {path} does not exist")
    rows: dict[str, dict[str, float]] = {}
    units: dict[str, Unit] = {}
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        expected = ["region_id", "iso_week", "value", "unit"]
        if reader.fieldnames != expected:
            raise DataError(f"{path}: expected header {','.join(expected)}")
        for row_no, row in enumerate(reader, start=2):
            region_id = row["region_id"]
            try:
                unit = Unit(row["unit"])
                value = float(row["value"])
            except ValueError as exc:
                raise DataError(f"{path} row {row_no}: {exc}") from None
            if region_id in units and units[region_id] is not unit:
                raise DataError(f"{path}: region {region_id} mixes units")
            units[region_id] = unit
            per_region = rows.setdefault(region_id, {})
            if row["iso_week"] in per_region:
                raise DataError(f"{path} row {row_no}: duplicate week {row['iso_week']} for {region_id}")
            per_region[row["iso_week"]] = value
    return {
        region_id: RegionSeries(region_id=region_id, unit=units[region_id], points=points)
        for region_id, points in rows.items()
    }


def load_denominators(path: str | Path) -> dict[str, dict[str, int]]:
    """External denominator CSV (series schema); returns region -> week -> total.

    National totals go under the country region id; per-location schemes list
    each region explicitly. Lookups fall back from region to country.
    """
    series = load_series(path)
    out: dict[str, dict[str, int]] = {}
    for region_id, s in series.items():
        out[region_id] = {}
        for week, value in s.points.items():
            if value <= 0 or value != int(value):
                raise DataError(
                    f"denominator for {region_id} {week} must be a positive integer, got {value}"
                )
            out[region_id][week] = int(value)
    return out


def write_counts(
    counts: Mapping[str, dict[str, int]],
    denominators: Mapping[str, int],
    weeks: Sequence[str],
    region_ids: Sequence[str],
    path: str | Path,
) -> None:
    """Companion artifact exposing raw numerators for conservation checks."""
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["region_id", "iso_week", "flood_count", "total_count"])
        for region_id in region_ids:
            per_region = counts.get(region_id, {})
            for week in weeks:
                writer.writerow([region_id, week, per_region.get(week, 0), denominators.get(week, 0)])
