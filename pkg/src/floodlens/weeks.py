"""ISO-8601 week arithmetic.

Weeks are represented as strings like ``2017-W33``. The ISO calendar is the
only week convention used anywhere in the pipeline: a week starts on Monday,
week 1 is the week containing the year's first Thursday, and a year may have
53 weeks (so early January can belong to the previous ISO year).
"""

from __future__ import annotations

import datetime as dt
import re

from .errors import DataError

_WEEK_RE = re.compile(r"^(\d{4})-W(\d{2})$")


def week_of(day: dt.date) -> str:
    """ISO year-week label for a calendar date, e.g. 2017-08-14 -> '2017-W33'."""
    iso = day.isocalendar()
    return f"{iso[0]:04d}-W{iso[1]:02d}"


def parse_week(label: str) -> tuple[int, int]:
    m = _WEEK_RE.match(label)
    if not m:
        raise DataError(f"invalid ISO week label {label!r} (expected YYYY-Www)")
    year, week = int(m.group(1)), int(m.group(2))
    try:
        dt.date.fromisocalendar(year, week, 1)
    except ValueError as exc:
        raise DataError(f"invalid ISO week label {label!r}: {exc}") from None
    return year, week


def week_monday(label: str) -> dt.date:
    """The Monday that opens the given ISO week."""
    year, week = parse_week(label)
    return dt.date.fromisocalendar(year, week, 1)


def week_range(start: str, end: str) -> list[str]:
    """All ISO weeks from start to end inclusive, in calendar order."""
    first = week_monday(start)
    last = week_monday(end)
    if last < first:
        raise DataError(f"week range {start}..{end} is empty (end before start)")
    out = []
    day = first
    while day <= last:
        out.append(week_of(day))
        day += dt.timedelta(days=7)
    return out


def add_weeks(label: str, k: int) -> str:
    """Shift a week label by k weeks (k may be negative)."""
    return week_of(week_monday(label) + dt.timedelta(days=7 * k))
