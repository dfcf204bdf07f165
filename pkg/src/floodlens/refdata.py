"""Reference series: satellite inundated area, EM-DAT events, Twitter CSVs.

Satellite CSV: ``division,week_start_date,inundated_area_km2``.
EM-DAT CSV: ``start_date,end_date,people_affected``.
Both UTF-8 with headers and ISO-8601 dates. Twitter series arrive only as a
precomputed series CSV in the shared schema; re-deriving them is out of scope.
"""

from __future__ import annotations

import csv
import datetime as dt
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

from .errors import DataError
from .geodate import Gazetteer
from .series import RegionSeries, Unit
from .weeks import week_of, week_range

MIN_OVERLAP = 3


@dataclass(frozen=True)
class SatelliteRecord:
    division_id: str
    iso_week: str
    inundated_area_km2: float


@dataclass(frozen=True)
class EmdatEvent:
    start: dt.date
    end: dt.date
    people_affected: float

    def weeks(self) -> list[str]:
        """ISO weeks the event touches, first to last inclusive."""
        return week_range(week_of(self.start), week_of(self.end))


def _parse_date(raw: str, origin: str, row_no: int) -> dt.date:
    try:
        return dt.date.fromisoformat(raw.strip())
    except ValueError:
        raise DataError(f"{origin} row {row_no}: {raw!r} is not an ISO-8601 date") from None


def load_satellite(path: str | Path, gazetteer: Gazetteer) -> dict[str, RegionSeries]:
    """One AreaKm2 series per division plus the country sum, keyed by region id."""
    path = Path(path)
    if not path.exists():
        raise DataError(f"satellite file {path} does not exist")
    name_to_id = {d.name.lower(): d.region_id for d in gazetteer.divisions()}
    for d in gazetteer.divisions():
        for alias in d.aliases:
            name_to_id.setdefault(alias, d.region_id)
    per_division: dict[str, dict[str, float]] = {}
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        expected = ["division", "week_start_date", "inundated_area_km2"]
        if reader.fieldnames != expected:
            raise DataError(f"{path}: expected header {','.join(expected)}")
        for row_no, row in enumerate(reader, start=2):
            division_id = name_to_id.get(row["division"].strip().lower())
            if division_id is None:
                raise DataError(f"{path} row {row_no}: unknown division {row['division']!r}")
            week = week_of(_parse_date(row["week_start_date"], str(path), row_no))
            try:
                area = float(row["inundated_area_km2"])
            except ValueError:
                raise DataError(
                    f"{path} row {row_no}: bad area {row['inundated_area_km2']!r}"
                ) from None
            if area < 0:
                raise DataError(f"{path} row {row_no}: negative inundated area {area}")
            series = per_division.setdefault(division_id, {})
            if week in series:
                raise DataError(f"{path} row {row_no}: duplicate ({row['division']}, {week})")
            series[week] = area
    if not per_division:
        raise DataError(f"{path}: no satellite records")
    out = {
        division_id: RegionSeries(division_id, Unit.AREA_KM2, points)
        for division_id, points in per_division.items()
    }
    country: dict[str, float] = {}
    for series in per_division.values():
        for week, area in series.items():
            country[week] = country.get(week, 0.0) + area
    country_id = gazetteer.country.region_id
    out[country_id] = RegionSeries(country_id, Unit.AREA_KM2, country)
    return out


def write_satellite(records: Sequence[SatelliteRecord], gazetteer: Gazetteer, path: str | Path) -> None:
    from .weeks import week_monday

    id_to_name = {d.region_id: d.name for d in gazetteer.divisions()}
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["division", "week_start_date", "inundated_area_km2"])
        for rec in records:
            writer.writerow(
                [id_to_name[rec.division_id], week_monday(rec.iso_week).isoformat(), repr(rec.inundated_area_km2)]
            )


def load_emdat(path: str | Path) -> list[EmdatEvent]:
    path = Path(path)
    if not path.exists():
        raise DataError(f"EM-DAT file {path} does not exist")
    events = []
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        expected = ["start_date", "end_date", "people_affected"]
        if reader.fieldnames != expected:
            raise DataError(f"{path}: expected header {','.join(expected)}")
        for row_no, row in enumerate(reader, start=2):
            start = _parse_date(row["start_date"], str(path), row_no)
            end = _parse_date(row["end_date"], str(path), row_no)
            if start > end:
                raise DataError(f"{path} row {row_no}: start {start} after end {end}")
            try:
                affected = float(row["people_affected"])
            except ValueError:
                raise DataError(f"{path} row {row_no}: bad people_affected") from None
            if affected < 0:
                raise DataError(f"{path} row {row_no}: negative people_affected")
            events.append(EmdatEvent(start, end, affected))
    return events


def write_emdat(events: Sequence[EmdatEvent], path: str | Path) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["start_date", "end_date", "people_affected"])
        for ev in events:
            writer.writerow([ev.start.isoformat(), ev.end.isoformat(), repr(ev.people_affected)])


def emdat_to_series(
    events: Sequence[EmdatEvent], weeks: Sequence[str], region_id: str = "bangladesh"
) -> RegionSeries:
    """Spread each event's people_affected uniformly over the weeks it covers."""
    if not events:
        raise DataError("no EM-DAT events to convert")
    points = {week: 0.0 for week in weeks}
    for event in events:
        event_weeks = event.weeks()
        share = event.people_affected / len(event_weeks)
        for week in event_weeks:
            if week in points:
                points[week] += share
    return RegionSeries(region_id=region_id, unit=Unit.PEOPLE_AFFECTED, points=points)


def emdat_event_pairs(
    events: Sequence[EmdatEvent], news: RegionSeries
) -> tuple[list[float], list[float]]:
    """Event-granularity pairing: per event, people_affected vs. the peak news
    value over the event's span. Mirrors comparisons where n = event count."""
    if not events:
        raise DataError("no EM-DAT events to pair")
    xs, ys = [], []
    for event in events:
        covered = [news.points[w] for w in event.weeks() if w in news.points]
        if not covered:
            raise DataError(
                f"EM-DAT event {event.start}..{event.end} has no overlap with the news series"
            )
        xs.append(event.people_affected)
        ys.append(max(covered))
    return xs, ys


def align(
    a: RegionSeries, b: RegionSeries, lag: int = 0
) -> tuple[list[str], list[float], list[float]]:
    """Inner join on week keys with pairwise deletion; returns (weeks, x, y).

    A positive lag shifts series b forward by that many weeks before joining
    (b's value for week w is read from w - lag).
    """
    from .weeks import add_weeks

    if lag == 0:
        b_points = b.points
    else:
        b_points = {add_weeks(week, lag): value for week, value in b.points.items()}
    shared = [week for week in a.points if week in b_points]
    shared.sort()
    if len(shared) < MIN_OVERLAP:
        raise DataError(
            f"insufficient overlap between {a.region_id} and {b.region_id}: "
            f"{len(shared)} shared weeks, need {MIN_OVERLAP}"
        )
    return shared, [a.points[w] for w in shared], [b_points[w] for w in shared]
