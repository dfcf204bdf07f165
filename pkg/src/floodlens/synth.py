"""Seeded synthetic corpora with planted ground truth.

Flood article counts per (division, week) are Poisson draws around smooth
bump-shaped intensity curves; non-flood counts are Poisson around a uniform
base rate, then nudged so the corpus hits the configured size exactly. Flood
articles always name their division (sometimes a district); with probability
q they also contain a keyword stem, otherwise only contextual phrasing that
a keyword rule cannot see. The satellite file is intensity scaled to km^2
plus Gaussian noise, and EM-DAT events sit on the largest country-level
peaks, so every stage of the pipeline has a known answer to recover.
"""

from __future__ import annotations

import datetime as dt
import json
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .corpus import Annotation, Article, Label, write_annotations, write_corpus
from .embeddings import write_embeddings
from .errors import DataError
from .geodate import Gazetteer, Level, load_gazetteer
from .refdata import EmdatEvent, SatelliteRecord, write_emdat, write_satellite
from .weeks import week_monday, week_range

SOURCES = tuple(f"source-{i:02d}" for i in range(1, 11))


@dataclass(frozen=True)
class Bump:
    center: int  # week index into the configured range
    width: float
    peak: float


DEFAULT_BUMPS: dict[str, tuple[Bump, ...]] = {
    "div-sylhet": (Bump(14, 3.0, 7.0), Bump(24, 2.5, 16.0), Bump(33, 3.0, 8.0)),
    "div-rangpur": (Bump(18, 3.0, 6.0), Bump(27, 2.5, 12.0)),
    "div-dhaka": (Bump(20, 4.0, 5.0), Bump(29, 3.0, 10.0)),
    "div-mymensingh": (Bump(16, 2.5, 6.0), Bump(25, 3.0, 9.0)),
    "div-chittagong": (Bump(22, 3.5, 7.5), Bump(31, 2.5, 11.0)),
    "div-rajshahi": (Bump(26, 3.5, 7.0), Bump(34, 2.5, 9.0)),
    "div-barisal": (),
    "div-khulna": (),
}
ACTIVE_FLOOR = 0.5  # off-season flood intensity for divisions with any bump


@dataclass(frozen=True)
class SynthConfig:
    seed: int = 7
    week_start: str = "2017-W01"
    week_end: str = "2017-W44"
    n_articles: int = 5000
    n_annotated: int = 1380
    n_annotated_flood: int = 400
    keyword_prob: float = 0.6  # q: flood articles carrying a keyword stem
    nonflood_keyword_prob: float = 0.18  # hypothetical-flood noise articles
    district_prob: float = 0.5
    # None = the default curves, rescaled so floods are flood_share of the
    # corpus at any size. Explicit curves (even {}) are used verbatim.
    bumps: dict[str, tuple[Bump, ...]] | None = None
    flood_share: float = 0.19
    area_scale: float = 40.0
    noise_scale: float = 8.0
    embedding_dim: int = 64
    embedding_separation: float = 6.0

    def validate(self) -> None:
        if not 0.0 <= self.keyword_prob <= 1.0:
            raise DataError(f"keyword probability q={self.keyword_prob} outside [0, 1]")
        if self.bumps is not None and any(
            b.peak < 0 for bumps in self.bumps.values() for b in bumps
        ):
            raise DataError("bump peaks must be non-negative")
        if not 0.0 < self.flood_share < 1.0:
            raise DataError(f"flood share {self.flood_share} outside (0, 1)")
        if self.n_annotated_flood > self.n_annotated:
            raise DataError("annotated flood count exceeds annotated total")
        if self.n_articles < self.n_annotated:
            raise DataError("corpus smaller than the annotated subset")


# Phrases that signal a real flood without using any keyword stem. These give
# context-based classifiers signal the keyword rule cannot see.
CONTEXT_FLOOD = (
    "went under knee-deep water as the river overflowed its banks",
    "thousands of families were marooned when the embankment collapsed",
    "water entered hundreds of homes overnight and submerged the main road",
    "standing crops on vast tracts of farmland went under water",
    "the river was flowing above the danger mark for a third day",
    "villagers moved to shelters as water kept rising through the night",
    "knee-to-waist-deep water caused immense sufferings to residents",
    "boats became the only way to move around the submerged villages",
    "relief workers carried dry food to people stranded on rooftops",
    "the onrush of water from upstream washed away a stretch of road",
    "swollen rivers burst protective dykes and drowned the low-lying areas",
    "homesteads went under chest-deep water within hours",
    "water seeped into households across several low-lying neighbourhoods",
    "fresh areas were submerged as the water rushed downstream",
    "hundreds took refuge on high ground after their homes went under water",
    "the deluge of river water left the ferry terminal unusable",
    "rice paddies disappeared under a sheet of murky water",
    "tube wells and latrines went under water, raising health fears",
    "rising water forced schools in the area to shut their doors",
    "currents tore through the village market, sweeping away stalls",
)

KEYWORD_FLOOD = (
    "severe flooding has hit the district, officials said",
    "the flood situation deteriorated further on Sunday",
    "fresh floods inundated dozens of villages",
    "floodwater inundated new areas as rivers kept swelling",
    "the cyclone-driven surge inundated coastal settlements",
    "flash floods damaged standing crops across the region",
)

NONFLOOD_PLAIN = (
    "the city corporation unveiled its new budget for the fiscal year",
    "the national cricket team sealed the series with a five-wicket win",
    "traders reported stable vegetable prices at the wholesale market",
    "the education board published the secondary school results",
    "a new bridge tender attracted bids from four construction firms",
    "lawmakers debated the telecom bill late into the evening",
    "garment exports rose for the second consecutive quarter",
    "city buses will run on a revised schedule from next week",
    "the art institute opened its annual exhibition to the public",
    "health officials launched a vaccination drive in the capital",
    "a literature festival drew large crowds over the weekend",
    "power distribution firms announced maintenance outages",
    "the stock index closed marginally higher on strong turnover",
    "farmers attended a training session on improved seed varieties",
    "the university senate approved two new graduate programmes",
    "municipal crews began repairing potholes on the ring road",
)

# Water-adjacent but not a flood event: these share vocabulary with the
# contextual flood phrases so learned classifiers cannot separate the
# classes on single giveaway tokens.
NONFLOOD_AMBIGUOUS = (
    "heavy rain slowed the evening commute and left streets waterlogged for hours",
    "river erosion continued to threaten homesteads along the shifting channel",
    "a drive against illegal sand lifting from the river was launched",
    "the water supply authority shut a pumping station for routine repairs",
    "fishermen demanded restocking of the river after a lean season",
    "a new embankment project was approved to protect farmland in future seasons",
    "dredging of the silted river resumed after a funding delay",
)

NONFLOOD_KEYWORD = (
    "the season of flood, cyclone and dengue is upcoming, doctors warned",
    "a seminar discussed flood insurance products for smallholder farmers",
    "the committee reviewed cyclone preparedness drills for schools",
    "experts proposed a master plan to prevent floods in future decades",
    "a documentary on historic floods premiered at the film centre",
    "officials tabled a flood control budget for the next fiscal year",
)

FLOOD_TITLES = (
    "Rivers swell as rain batters {place}",
    "Thousands stranded in {place}",
    "Villages under water in {place}",
    "{place} reels from rising water",
)

FLOOD_TITLES_KEYWORD = (
    "Flood worsens in {place}",
    "Fresh areas inundated in {place}",
)

NONFLOOD_TITLES = (
    "Council session opens in {place}",
    "Business roundup from {place}",
    "Sports day celebrated in {place}",
    "New projects announced for {place}",
)


@dataclass
class GroundTruthRow:
    article_id: str
    label: Label
    division_id: str | None
    district_id: str | None
    iso_week: str | None
    has_keyword: bool


@dataclass
class SynthBundle:
    out_dir: Path
    corpus_path: Path
    annotations_path: Path
    embeddings_path: Path
    satellite_path: Path
    emdat_path: Path
    ground_truth_path: Path
    intensity_path: Path
    config_path: Path
    weeks: list[str]
    n_articles: int
    n_flood: int
    n_annotated: int


def intensity_curves(config: SynthConfig, weeks: list[str]) -> dict[str, np.ndarray]:
    """Planted flood-article intensity per division and week."""
    bumps_by_division = DEFAULT_BUMPS if config.bumps is None else config.bumps
    curves = {}
    for division_id, bumps in sorted(bumps_by_division.items()):
        values = np.zeros(len(weeks), dtype=np.float64)
        for bump in bumps:
            idx = np.arange(len(weeks), dtype=np.float64)
            values += bump.peak * np.exp(-((idx - bump.center) ** 2) / (2.0 * bump.width**2))
        if bumps:
            values += ACTIVE_FLOOR
        curves[division_id] = values
    if config.bumps is None:
        total = sum(float(v.sum()) for v in curves.values())
        if total > 0:
            scale = config.flood_share * config.n_articles / total
            curves = {d: v * scale for d, v in curves.items()}
    return curves


def _pick(rng: np.random.Generator, options: tuple) -> str:
    return options[int(rng.integers(0, len(options)))]


def _flood_article_text(
    rng: np.random.Generator,
    division_name: str,
    district_name: str | None,
    has_keyword: bool,
) -> tuple[str, str]:
    if has_keyword:
        title_pool = FLOOD_TITLES + FLOOD_TITLES_KEYWORD
    else:
        title_pool = FLOOD_TITLES
    title = _pick(rng, title_pool).format(place=division_name)
    sentences = []
    if has_keyword:
        sentences.append(_pick(rng, KEYWORD_FLOOD))
    n_context = int(rng.integers(2, 4))
    for _ in range(n_context):
        sentences.append(_pick(rng, CONTEXT_FLOOD))
    body_parts = [f"In {division_name}, " + sentences[0] + "."]
    for s in sentences[1:]:
        body_parts.append(s.capitalize() + ".")
    if district_name is not None:
        body_parts.append(f"The situation in {district_name} was among the worst, locals said.")
    return title, " ".join(body_parts)


def _nonflood_article_text(
    rng: np.random.Generator, division_name: str, has_keyword: bool
) -> tuple[str, str]:
    title = _pick(rng, NONFLOOD_TITLES).format(place=division_name)
    sentences = []
    if has_keyword:
        sentences.append(_pick(rng, NONFLOOD_KEYWORD))
    if rng.random() < 0.25:
        sentences.append(_pick(rng, NONFLOOD_AMBIGUOUS))
    n_plain = int(rng.integers(2, 4))
    for _ in range(n_plain):
        sentences.append(_pick(rng, NONFLOOD_PLAIN))
    body_parts = [f"In {division_name}, " + sentences[0] + "."]
    for s in sentences[1:]:
        body_parts.append(s.capitalize() + ".")
    return title, " ".join(body_parts)


def generate(config: SynthConfig, out_dir: str | Path, gazetteer: Gazetteer | None = None) -> SynthBundle:
    """Write the full bundle; the same seed always yields identical bytes."""
    config.validate()
    gazetteer = gazetteer or load_gazetteer()
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    weeks = week_range(config.week_start, config.week_end)
    rng = np.random.default_rng(config.seed)
    curves = intensity_curves(config, weeks)
    division_ids = sorted(curves)
    unknown = [d for d in division_ids if d not in {x.region_id for x in gazetteer.divisions()}]
    if unknown:
        raise DataError(f"bump curve for unknown division {unknown[0]!r}")
    districts_by_division = {
        d.region_id: [x for x in gazetteer.districts() if x.parent_id == d.region_id]
        for d in gazetteer.divisions()
    }

    # Step 1: counts per (week, division), floods first so the exact-size
    # adjustment below never touches planted flood counts.
    flood_counts: dict[tuple[int, str], int] = {}
    for week_idx in range(len(weeks)):
        for division_id in division_ids:
            lam = curves[division_id][week_idx]
            flood_counts[(week_idx, division_id)] = int(rng.poisson(lam)) if lam > 0 else 0
    n_flood = sum(flood_counts.values())
    if n_flood >= config.n_articles:
        raise DataError(
            f"intensity curves produced {n_flood} flood articles, "
            f"leaving no room in a corpus of {config.n_articles}"
        )
    all_division_ids = sorted(x.region_id for x in gazetteer.divisions())
    base_rate = (config.n_articles - n_flood) / (len(weeks) * len(all_division_ids))
    nonflood_counts: dict[tuple[int, str], int] = {}
    for week_idx in range(len(weeks)):
        for division_id in all_division_ids:
            nonflood_counts[(week_idx, division_id)] = int(rng.poisson(base_rate))
    cells = sorted(nonflood_counts)
    delta = config.n_articles - n_flood - sum(nonflood_counts.values())
    i = 0
    while delta != 0:
        cell = cells[i % len(cells)]
        if delta > 0:
            nonflood_counts[cell] += 1
            delta -= 1
        elif nonflood_counts[cell] > 0:
            nonflood_counts[cell] -= 1
            delta += 1
        i += 1

    # Step 2: article skeletons in a fixed order, then a seeded shuffle.
    skeletons: list[tuple[str, int, str]] = []  # (kind, week_idx, division_id)
    for week_idx in range(len(weeks)):
        for division_id in division_ids:
            skeletons.extend([("flood", week_idx, division_id)] * flood_counts[(week_idx, division_id)])
        for division_id in all_division_ids:
            skeletons.extend([("nonflood", week_idx, division_id)] * nonflood_counts[(week_idx, division_id)])
    order = rng.permutation(len(skeletons))
    skeletons = [skeletons[i] for i in order]

    # Step 3: flesh out articles and ground truth.
    division_names = {d.region_id: d.name for d in gazetteer.divisions()}
    articles: list[Article] = []
    truth: list[GroundTruthRow] = []
    width = max(6, len(str(len(skeletons))))
    for n, (kind, week_idx, division_id) in enumerate(skeletons, start=1):
        article_id = f"a{n:0{width}d}"
        monday = week_monday(weeks[week_idx])
        published = monday + dt.timedelta(days=int(rng.integers(0, 7)))
        source = SOURCES[int(rng.integers(0, len(SOURCES)))]
        division_name = division_names[division_id]
        if kind == "flood":
            has_keyword = bool(rng.random() < config.keyword_prob)
            district = None
            district_display = None
            if districts_by_division[division_id] and rng.random() < config.district_prob:
                pool = districts_by_division[division_id]
                district = pool[int(rng.integers(0, len(pool)))]
                # Districts named after their division are only reachable via
                # the qualified alias, so write them qualified in the text.
                if district.name.lower() in district.aliases:
                    district_display = district.name
                else:
                    district_display = f"{district.name} district"
            title, body = _flood_article_text(rng, division_name, district_display, has_keyword)
            label = Label.FLOOD
            truth.append(
                GroundTruthRow(
                    article_id, label, division_id,
                    district.region_id if district else None,
                    weeks[week_idx], has_keyword,
                )
            )
        else:
            has_keyword = bool(rng.random() < config.nonflood_keyword_prob)
            title, body = _nonflood_article_text(rng, division_name, has_keyword)
            label = Label.NOT_FLOOD
            truth.append(GroundTruthRow(article_id, label, None, None, None, has_keyword))
        articles.append(
            Article(id=article_id, source=source, title=title, body=body, published=published)
        )

    # Step 4: annotation subset at the configured class ratio.
    flood_ids = [t.article_id for t in truth if t.label is Label.FLOOD]
    nonflood_ids = [t.article_id for t in truth if t.label is Label.NOT_FLOOD]
    take_flood = min(config.n_annotated_flood, len(flood_ids))
    take_nonflood = min(config.n_annotated - take_flood, len(nonflood_ids))
    ann_flood = [flood_ids[i] for i in rng.permutation(len(flood_ids))[:take_flood]]
    ann_nonflood = [nonflood_ids[i] for i in rng.permutation(len(nonflood_ids))[:take_nonflood]]
    annotations = sorted(
        [Annotation(i, Label.FLOOD) for i in ann_flood]
        + [Annotation(i, Label.NOT_FLOOD) for i in ann_nonflood],
        key=lambda a: a.article_id,
    )

    # Step 5: embeddings from two class-conditional Gaussians.
    direction = rng.normal(size=config.embedding_dim)
    direction /= math.sqrt(float(direction @ direction))
    shift = (config.embedding_separation / 2.0) * direction
    rows = np.empty((len(articles), config.embedding_dim), dtype=np.float32)
    labels_by_id = {t.article_id: t.label for t in truth}
    for i, article in enumerate(articles):
        noise = rng.normal(size=config.embedding_dim)
        mean = shift if labels_by_id[article.id] is Label.FLOOD else -shift
        rows[i] = (mean + noise).astype(np.float32)

    # Step 6: satellite series and EM-DAT events from the planted curves.
    satellite_records = []
    for division_id in all_division_ids:
        curve = curves.get(division_id)
        for week_idx, week in enumerate(weeks):
            intensity = float(curve[week_idx]) if curve is not None else 0.0
            area = intensity * config.area_scale + float(rng.normal(0.0, config.noise_scale))
            satellite_records.append(SatelliteRecord(division_id, week, max(area, 0.0)))
    country_curve = np.zeros(len(weeks))
    for division_id in division_ids:
        country_curve += curves[division_id]
    emdat_events = _emdat_from_peaks(country_curve, weeks)

    # Step 7: write everything.
    paths = SynthBundle(
        out_dir=out_dir,
        corpus_path=out_dir / "corpus.jsonl",
        annotations_path=out_dir / "annotations.csv",
        embeddings_path=out_dir / "embeddings.flemb",
        satellite_path=out_dir / "satellite.csv",
        emdat_path=out_dir / "emdat.csv",
        ground_truth_path=out_dir / "ground_truth.csv",
        intensity_path=out_dir / "intensity.csv",
        config_path=out_dir / "synth_config.json",
        weeks=weeks,
        n_articles=len(articles),
        n_flood=n_flood,
        n_annotated=len(annotations),
    )
    write_corpus(articles, paths.corpus_path)
    write_annotations(annotations, paths.annotations_path)
    write_embeddings(
        [a.id for a in articles],
        rows,
        paths.embeddings_path,
        sidecar={
            "model": "synthetic-gaussian",
            "dim": config.embedding_dim,
            "pooling": "none",
            "separation": config.embedding_separation,
            "seed": config.seed,
        },
    )
    write_satellite(satellite_records, gazetteer, paths.satellite_path)
    write_emdat(emdat_events, paths.emdat_path)
    _write_ground_truth(truth, paths.ground_truth_path)
    _write_intensity(curves, weeks, paths.intensity_path)
    with open(paths.config_path, "w", encoding="utf-8") as fh:
        json.dump(_config_to_json(config), fh, indent=2, sort_keys=True)
        fh.write("\n")
    return paths


def _emdat_from_peaks(country_curve: np.ndarray, weeks: list[str], n_events: int = 5) -> list[EmdatEvent]:
    if float(country_curve.max(initial=0.0)) <= 0.0:
        return []
    peaks = []
    for i in range(len(weeks)):
        left = country_curve[i - 1] if i > 0 else -1.0
        right = country_curve[i + 1] if i + 1 < len(weeks) else -1.0
        if country_curve[i] > left and country_curve[i] >= right:
            peaks.append((float(country_curve[i]), i))
    peaks.sort(key=lambda p: (-p[0], p[1]))
    chosen: list[int] = []
    for _, idx in peaks:
        if all(abs(idx - c) > 2 for c in chosen):
            chosen.append(idx)
        if len(chosen) == n_events:
            break
    # Pad from remaining high weeks if the curve had too few local maxima.
    if len(chosen) < n_events:
        by_height = np.argsort(-country_curve, kind="stable")
        for idx in by_height:
            if all(abs(int(idx) - c) > 2 for c in chosen):
                chosen.append(int(idx))
            if len(chosen) == n_events:
                break
    events = []
    for idx in sorted(chosen):
        first = max(0, idx - 1)
        last = min(len(weeks) - 1, idx + 1)
        start = week_monday(weeks[first])
        end = week_monday(weeks[last]) + dt.timedelta(days=6)
        affected = float(np.round(country_curve[first : last + 1].sum() * 5000.0))
        events.append(EmdatEvent(start=start, end=end, people_affected=affected))
    return events


def _write_ground_truth(truth: list[GroundTruthRow], path: Path) -> None:
    import csv

    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(
            ["article_id", "label", "division_id", "district_id", "iso_week", "has_keyword"]
        )
        for row in truth:
            writer.writerow(
                [
                    row.article_id,
                    row.label.value,
                    row.division_id or "",
                    row.district_id or "",
                    row.iso_week or "",
                    "1" if row.has_keyword else "0",
                ]
            )


def load_ground_truth(path: str | Path) -> list[GroundTruthRow]:
    import csv

    path = Path(path)
    if not path.exists():
        raise DataError(f"ground truth file {path} does not exist")
    rows = []
    with open(path, newline="", encoding="utf-8") as fh:
        for row in csv.DictReader(fh):
            rows.append(
                GroundTruthRow(
                    article_id=row["article_id"],
                    label=Label.parse(row["label"]),
                    division_id=row["division_id"] or None,
                    district_id=row["district_id"] or None,
                    iso_week=row["iso_week"] or None,
                    has_keyword=row["has_keyword"] == "1",
                )
            )
    return rows


def _write_intensity(curves: dict[str, np.ndarray], weeks: list[str], path: Path) -> None:
    import csv

    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["division_id", "iso_week", "intensity"])
        for division_id in sorted(curves):
            for week_idx, week in enumerate(weeks):
                writer.writerow([division_id, week, repr(float(curves[division_id][week_idx]))])


def load_intensity(path: str | Path) -> dict[str, dict[str, float]]:
    import csv

    path = Path(path)
    if not path.exists():
        raise DataError(f"intensity file {path} does not exist")
    out: dict[str, dict[str, float]] = {}
    with open(path, newline="", encoding="utf-8") as fh:
        for row in csv.DictReader(fh):
            out.setdefault(row["division_id"], {})[row["iso_week"]] = float(row["intensity"])
    return out


def score_pipeline(
    bundle: SynthBundle,
    predictions_path: str | Path,
    events_path: str | Path,
    news_series_path: str | Path,
    gazetteer: Gazetteer | None = None,
) -> dict:
    """Score a finished pipeline run against the bundle's planted truth.

    Reports classifier metrics versus planted labels, division/week recovery
    of the flood events, district coverage, and how close the recovered
    news-vs-satellite country correlation sits to the one computed from the
    planted intensity curves themselves.
    """
    import csv

    from . import refdata, series as series_mod, stats
    from .classify import evaluate
    from .geodate import load_events

    gazetteer = gazetteer or load_gazetteer()
    for path, what in (
        (predictions_path, "predictions file"),
        (events_path, "events file"),
        (news_series_path, "news series file"),
    ):
        if not Path(path).exists():
            raise DataError(f"missing pipeline output: {what} {path}")

    truth = {t.article_id: t for t in load_ground_truth(bundle.ground_truth_path)}
    predictions: dict[str, Label] = {}
    with open(predictions_path, newline="", encoding="utf-8") as fh:
        for row in csv.DictReader(fh):
            predictions[row["article_id"]] = Label.parse(row["prediction"])
    metrics = evaluate(predictions, {i: t.label for i, t in truth.items()})

    events = load_events(events_path)
    true_flood_events = [
        e for e in events if e.label is Label.FLOOD and truth[e.article_id].label is Label.FLOOD
    ]
    division_hits = sum(
        1
        for e in true_flood_events
        if gazetteer.division_of(e.region_id) == truth[e.article_id].division_id
    )
    week_hits = sum(1 for e in true_flood_events if e.iso_week == truth[e.article_id].iso_week)
    n_true = len(true_flood_events)

    n_districts = len(gazetteer.districts())
    planted_districts = {t.district_id for t in truth.values() if t.district_id}
    detected_districts = {
        e.region_id
        for e in events
        if e.label is Label.FLOOD and gazetteer.regions[e.region_id].level is Level.DISTRICT
    }

    country_id = gazetteer.country.region_id
    news = series_mod.load_series(news_series_path)[country_id]
    satellite = refdata.load_satellite(bundle.satellite_path, gazetteer)[country_id]
    recovered = stats.spearman(*refdata.align(news, satellite)[1:])
    intensity = load_intensity(bundle.intensity_path)
    planted_country = {}
    for per_week in intensity.values():
        for week, value in per_week.items():
            planted_country[week] = planted_country.get(week, 0.0) + value
    planted = series_mod.RegionSeries(country_id, series_mod.Unit.AREA_KM2, planted_country)
    reference = stats.spearman(*refdata.align(planted, satellite)[1:])

    return {
        "classifier": {
            "accuracy": metrics.accuracy,
            "precision": metrics.precision,
            "recall": metrics.recall,
            "f1": metrics.f1,
        },
        "division_recovery": division_hits / n_true if n_true else 1.0,
        "week_recovery": week_hits / n_true if n_true else 1.0,
        "district_planted_fraction": len(planted_districts) / n_districts,
        "district_detected_fraction": len(detected_districts) / n_districts,
        "news_vs_satellite_rho": recovered.coefficient,
        "planted_vs_satellite_rho": reference.coefficient,
        "rho_gap": abs(recovered.coefficient - reference.coefficient),
    }


def _config_to_json(config: SynthConfig) -> dict:
    return {
        "seed": config.seed,
        "week_start": config.week_start,
        "week_end": config.week_end,
        "n_articles": config.n_articles,
        "n_annotated": config.n_annotated,
        "n_annotated_flood": config.n_annotated_flood,
        "keyword_prob": config.keyword_prob,
        "nonflood_keyword_prob": config.nonflood_keyword_prob,
        "district_prob": config.district_prob,
        "area_scale": config.area_scale,
        "noise_scale": config.noise_scale,
        "embedding_dim": config.embedding_dim,
        "embedding_separation": config.embedding_separation,
        "flood_share": config.flood_share,
        "bumps": None
        if config.bumps is None
        else {
            division: [[b.center, b.width, b.peak] for b in bumps]
            for division, bumps in sorted(config.bumps.items())
        },
    }
