"""Pipeline stages: ingest, train, eval, predict, extract, series, correlate,
synth, report.

Every stage reads its inputs from files and writes its outputs atomically
(temp file + rename), so stages can be re-run or restarted independently and
a crashed run never leaves a half-written artifact. Summaries returned here
are plain dicts; the service layer wraps them in response models.
"""

from __future__ import annotations

import contextlib
import csv
import os
from pathlib import Path
from typing import Iterator, Sequence

from . import charts, refdata, series as series_mod, stats, synth as synth_mod
from .classify import (
    CLASSIFIER_ORDER,
    CLASSIFIER_TITLES,
    ForestConfig,
    KeywordRule,
    LinearConfig,
    ModelBundle,
    evaluate,
    load_model,
    predict_corpus,
    save_model,
    train_classifier,
)
from .corpus import Label, SplitSpec, load_annotations, load_corpus, split
from .embeddings import EmbeddingSet, read_embeddings
from .errors import DataError
from .geodate import build_events, load_events, load_gazetteer, write_events
from .textfeat import VectorizerConfig
from .weeks import week_range

# Table layout order for division columns, country first.
DIVISION_COLUMNS = (
    "div-sylhet",
    "div-rajshahi",
    "div-dhaka",
    "div-barisal",
    "div-chittagong",
    "div-khulna",
    "div-rangpur",
    "div-mymensingh",
)


@contextlib.contextmanager
def atomic_output(path: str | Path) -> Iterator[Path]:
    """Yield a temp path that replaces `path` only if the writer succeeds."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    tmp = path.with_name(path.name + ".part")
    try:
        yield tmp
        os.replace(tmp, path)
    finally:
        if tmp.exists():
            tmp.unlink()


def _require(path: str | Path, what: str) -> Path:
    path = Path(path)
    if not path.exists():
        raise DataError(f"{what} {path} does not exist")
    return path


# ---------------------------------------------------------------------------
# synth
# ---------------------------------------------------------------------------


def run_synth(config: synth_mod.SynthConfig, out_dir: str | Path) -> dict:
    bundle = synth_mod.generate(config, out_dir)
    return {
        "out_dir": str(bundle.out_dir),
        "corpus": str(bundle.corpus_path),
        "annotations": str(bundle.annotations_path),
        "embeddings": str(bundle.embeddings_path),
        "satellite": str(bundle.satellite_path),
        "emdat": str(bundle.emdat_path),
        "ground_truth": str(bundle.ground_truth_path),
        "intensity": str(bundle.intensity_path),
        "n_articles": bundle.n_articles,
        "n_flood": bundle.n_flood,
        "n_annotated": bundle.n_annotated,
        "week_start": bundle.weeks[0],
        "week_end": bundle.weeks[-1],
    }


# ---------------------------------------------------------------------------
# ingest
# ---------------------------------------------------------------------------


def run_ingest(corpus_path: str | Path, annotations_path: str | Path | None = None) -> dict:
    result = load_corpus(_require(corpus_path, "corpus file"))
    summary: dict = {
        "n_articles": len(result.articles),
        "n_bad_lines": len(result.line_errors),
        "bad_lines": [
            {"line": line_no, "error": message} for line_no, message in result.line_errors[:20]
        ],
    }
    sources: dict[str, int] = {}
    for article in result.articles:
        sources[article.source] = sources.get(article.source, 0) + 1
    summary["sources"] = dict(sorted(sources.items()))
    if annotations_path is not None:
        annotations = load_annotations(_require(annotations_path, "annotation file"), set(result.by_id))
        summary["n_annotated"] = len(annotations)
        summary["n_flood"] = sum(1 for a in annotations if a.label is Label.FLOOD)
        summary["n_not_flood"] = summary["n_annotated"] - summary["n_flood"]
    return summary


# ---------------------------------------------------------------------------
# train / eval / predict
# ---------------------------------------------------------------------------


def _load_training_inputs(
    corpus_path: str | Path,
    annotations_path: str | Path,
    split_spec: SplitSpec,
    use: str,
):
    result = load_corpus(_require(corpus_path, "corpus file"))
    annotations = load_annotations(_require(annotations_path, "annotation file"), set(result.by_id))
    if use == "all":
        return result, annotations, []
    train_set, test_set = split(annotations, split_spec)
    if use == "train_split":
        return result, train_set, test_set
    raise DataError(f"unknown training subset {use!r} (use train_split or all)")


def run_train(
    corpus_path: str | Path,
    annotations_path: str | Path,
    classifier: str,
    model_out: str | Path,
    split_spec: SplitSpec | None = None,
    use: str = "train_split",
    vectorizer_config: VectorizerConfig | None = None,
    linear_config: LinearConfig | None = None,
    forest_config: ForestConfig | None = None,
    embeddings_path: str | Path | None = None,
    keyword_stems: Sequence[str] | None = None,
    threads: int = 1,
) -> dict:
    split_spec = split_spec or SplitSpec(seed=0, test_fraction=880 / 1380)
    result, train_set, _ = _load_training_inputs(corpus_path, annotations_path, split_spec, use)
    embeddings = None
    if classifier == "embedding_head":
        embeddings = read_embeddings(_require(embeddings_path, "embedding file"))
    rule = KeywordRule(stems=tuple(keyword_stems)) if keyword_stems else None
    bundle = train_classifier(
        classifier,
        result.by_id,
        train_set,
        vectorizer_config=vectorizer_config,
        linear_config=linear_config,
        forest_config=forest_config,
        embeddings=embeddings,
        keyword_rule=rule,
        threads=threads,
    )
    with atomic_output(model_out) as tmp:
        save_model(bundle, tmp)
    summary = {
        "model": str(model_out),
        "classifier": classifier,
        "n_train": len(train_set),
    }
    if bundle.vocabulary is not None:
        summary["vocabulary_size"] = len(bundle.vocabulary)
    if bundle.linear is not None and bundle.linear.loss_log:
        summary["final_loss"] = bundle.linear.loss_log[-1]
    return summary


def run_eval(
    corpus_path: str | Path,
    annotations_path: str | Path,
    embeddings_path: str | Path,
    out_csv: str | Path,
    out_txt: str | Path,
    split_spec: SplitSpec | None = None,
    vectorizer_config: VectorizerConfig | None = None,
    linear_config: LinearConfig | None = None,
    forest_config: ForestConfig | None = None,
    threads: int = 1,
) -> dict:
    """Train all five classifiers on the train split, score the test split."""
    split_spec = split_spec or SplitSpec(seed=0, test_fraction=880 / 1380)
    result, train_set, test_set = _load_training_inputs(
        corpus_path, annotations_path, split_spec, "train_split"
    )
    if not test_set:
        raise DataError("evaluation needs a non-empty test split")
    embeddings = read_embeddings(_require(embeddings_path, "embedding file"))
    gold = {a.article_id: a.label for a in test_set}
    test_articles = [result.by_id[a.article_id] for a in test_set]
    rows = []
    for classifier in CLASSIFIER_ORDER:
        bundle = train_classifier(
            classifier,
            result.by_id,
            train_set,
            vectorizer_config=vectorizer_config,
            linear_config=linear_config,
            forest_config=forest_config,
            embeddings=embeddings,
            threads=threads,
        )
        predictions = predict_corpus(bundle, test_articles, embeddings=embeddings, threads=threads)
        metrics = evaluate({k: v[0] for k, v in predictions.items()}, gold)
        rows.append(
            {
                "classifier": classifier,
                "accuracy": metrics.accuracy,
                "precision": metrics.precision,
                "recall": metrics.recall,
                "f1": metrics.f1,
                "tp": metrics.tp,
                "fp": metrics.fp,
                "fn": metrics.fn,
                "tn": metrics.tn,
            }
        )
    with atomic_output(out_csv) as tmp:
        with open(tmp, "w", newline="", encoding="utf-8") as fh:
            writer = csv.writer(fh)
            writer.writerow(["classifier", "accuracy", "precision", "recall", "f1", "tp", "fp", "fn", "tn"])
            for row in rows:
                writer.writerow(
                    [
                        row["classifier"],
                        repr(row["accuracy"]),
                        repr(row["precision"]),
                        repr(row["recall"]),
                        repr(row["f1"]),
                        row["tp"],
                        row["fp"],
                        row["fn"],
                        row["tn"],
                    ]
                )
    lines = ["Method                 Accuracy      F1", "-" * 40]
    for row in rows:
        title = CLASSIFIER_TITLES[row["classifier"]]
        lines.append(f"{title:<22} {100 * row['accuracy']:>7.1f} {100 * row['f1']:>7.1f}")
    text = "\n".join(lines) + "\n"
    with atomic_output(out_txt) as tmp:
        tmp.write_text(text, encoding="utf-8")
    return {
        "metrics": rows,
        "table": text,
        "n_train": len(train_set),
        "n_test": len(test_set),
        "out_csv": str(out_csv),
        "out_txt": str(out_txt),
    }


def run_predict(
    model_path: str | Path,
    corpus_path: str | Path,
    out_csv: str | Path,
    embeddings_path: str | Path | None = None,
    threads: int = 1,
) -> dict:
    bundle = load_model(_require(model_path, "model file"))
    result = load_corpus(_require(corpus_path, "corpus file"))
    embeddings: EmbeddingSet | None = None
    if bundle.classifier == "embedding_head":
        embeddings = read_embeddings(_require(embeddings_path, "embedding file"))
    predictions = predict_corpus(bundle, result.articles, embeddings=embeddings, threads=threads)
    n_flood = 0
    with atomic_output(out_csv) as tmp:
        with open(tmp, "w", newline="", encoding="utf-8") as fh:
            writer = csv.writer(fh)
            writer.writerow(["article_id", "prediction", "score"])
            for article in result.articles:
                label, score = predictions[article.id]
                n_flood += label is Label.FLOOD
                writer.writerow([article.id, label.value, repr(score)])
    return {
        "out_csv": str(out_csv),
        "n_articles": len(result.articles),
        "n_flood": n_flood,
        "classifier": bundle.classifier,
    }


def load_predictions(path: str | Path) -> dict[str, Label]:
    path = _require(path, "predictions file")
    out: dict[str, Label] = {}
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        expected = ["article_id", "prediction", "score"]
        if reader.fieldnames != expected:
            raise DataError(f"{path}: expected header {','.join(expected)}")
        for row in reader:
            out[row["article_id"]] = Label.parse(row["prediction"])
    return out


# ---------------------------------------------------------------------------
# extract / series
# ---------------------------------------------------------------------------


def run_extract(
    corpus_path: str | Path,
    predictions_path: str | Path,
    out_csv: str | Path,
    gazetteer_path: str | Path | None = None,
) -> dict:
    result = load_corpus(_require(corpus_path, "corpus file"))
    predictions = load_predictions(predictions_path)
    gazetteer = load_gazetteer(gazetteer_path)
    events = build_events(result.articles, predictions, gazetteer)
    with atomic_output(out_csv) as tmp:
        write_events(events, tmp)
    flood_events = [e for e in events if e.label is Label.FLOOD]
    by_level = {"District": 0, "Division": 0, "Country": 0}
    for event in flood_events:
        by_level[gazetteer.regions[event.region_id].level.value] += 1
    return {
        "out_csv": str(out_csv),
        "n_events": len(events),
        "n_flood_events": len(flood_events),
        "flood_events_by_level": by_level,
    }


def run_series(
    corpus_path: str | Path,
    events_path: str | Path,
    out_series_csv: str | Path,
    out_counts_csv: str | Path,
    gazetteer_path: str | Path | None = None,
    denominators_path: str | Path | None = None,
    week_start: str | None = None,
    week_end: str | None = None,
) -> dict:
    result = load_corpus(_require(corpus_path, "corpus file"))
    events = load_events(_require(events_path, "events file"))
    gazetteer = load_gazetteer(gazetteer_path)
    if week_start and week_end:
        weeks = week_range(week_start, week_end)
    else:
        weeks = series_mod.corpus_week_span(result.articles)
    counts = series_mod.flood_counts(events, gazetteer)
    country_id = gazetteer.country.region_id

    external = None
    if denominators_path is not None:
        external = series_mod.load_denominators(_require(denominators_path, "denominator file"))
    national = series_mod.default_denominators(result.articles)

    def denominators_for(region_id: str) -> dict[str, int]:
        if external is None:
            return national
        if region_id in external:
            return external[region_id]
        if country_id in external:
            return external[country_id]
        raise DataError(f"denominator file covers neither {region_id} nor {country_id}")

    region_ids = [country_id] + [d.region_id for d in gazetteer.divisions()]
    district_ids = sorted(
        {
            e.region_id
            for e in events
            if e.label is Label.FLOOD and gazetteer.regions[e.region_id].level.value == "District"
        }
    )
    all_series = []
    for region_id in region_ids + district_ids:
        all_series.append(
            series_mod.series_from_counts(
                region_id, weeks, counts.get(region_id, {}), denominators_for(region_id)
            )
        )
    with atomic_output(out_series_csv) as tmp:
        series_mod.write_series(all_series, tmp)
    with atomic_output(out_counts_csv) as tmp:
        series_mod.write_counts(counts, national, weeks, region_ids, tmp)
    gap = series_mod.conservation_gap(counts, gazetteer)
    unassigned = {week: g for week, g in gap.items() if g != 0}
    return {
        "out_series_csv": str(out_series_csv),
        "out_counts_csv": str(out_counts_csv),
        "weeks": len(weeks),
        "week_start": weeks[0],
        "week_end": weeks[-1],
        "regions": region_ids + district_ids,
        "conservation_exact": not unassigned,
        "country_only_weeks": unassigned,
    }


# ---------------------------------------------------------------------------
# correlate / report
# ---------------------------------------------------------------------------


def run_correlate(
    news_series_path: str | Path,
    out_csv: str | Path,
    out_txt: str | Path,
    satellite_path: str | Path | None = None,
    emdat_path: str | Path | None = None,
    twitter_series_path: str | Path | None = None,
    gazetteer_path: str | Path | None = None,
    lag: int = 0,
    p_method: str = "auto",
) -> dict:
    gazetteer = load_gazetteer(gazetteer_path)
    country_id = gazetteer.country.region_id
    news = series_mod.load_series(_require(news_series_path, "news series file"))
    if satellite_path is None and emdat_path is None:
        raise DataError("correlate needs at least one reference (satellite or EM-DAT)")

    sources = {"news": news}
    if twitter_series_path is not None:
        sources["twitter"] = series_mod.load_series(_require(twitter_series_path, "twitter series file"))

    all_rows: list[stats.TableRow] = []
    skipped: list[dict] = []
    for source_name, source_series in sources.items():
        if satellite_path is not None:
            satellite = refdata.load_satellite(_require(satellite_path, "satellite file"), gazetteer)
            table = stats.correlate_table(
                source_series, satellite, source=source_name, reference_name="satellite",
                lag=lag, p_method=p_method,
            )
            all_rows.extend(table.rows)
            skipped.extend(
                {"source": source_name, "region_id": r, "reason": reason}
                for r, reason in table.skipped
            )
        if emdat_path is not None:
            events = refdata.load_emdat(_require(emdat_path, "EM-DAT file"))
            if events and country_id in source_series:
                country_news = source_series[country_id]
                weekly = refdata.emdat_to_series(events, country_news.weeks(), region_id=country_id)
                table = stats.correlate_table(
                    {country_id: country_news}, {country_id: weekly},
                    source=source_name, reference_name="emdat", lag=lag, p_method=p_method,
                )
                all_rows.extend(table.rows)
                skipped.extend(
                    {"source": source_name, "region_id": r, "reason": reason}
                    for r, reason in table.skipped
                )
                x, y = refdata.emdat_event_pairs(events, country_news)
                try:
                    for res in (stats.spearman(y, x, p_method=p_method), stats.pearson(y, x, p_method=p_method)):
                        all_rows.append(
                            stats.TableRow(
                                region_id=country_id, source=source_name,
                                reference="emdat-events", coefficient=res.coefficient,
                                n=res.n, p_value=res.p_value, stars=res.stars, method=res.method,
                            )
                        )
                except DataError as exc:
                    skipped.append(
                        {"source": source_name, "region_id": country_id,
                         "reason": f"emdat-events: {exc}"}
                    )

    with atomic_output(out_csv) as tmp:
        with open(tmp, "w", newline="", encoding="utf-8") as fh:
            writer = csv.writer(fh)
            writer.writerow(["region_id", "source", "reference", "coefficient", "n", "p_value", "stars", "method"])
            for row in all_rows:
                writer.writerow(
                    [row.region_id, row.source, row.reference, repr(row.coefficient),
                     row.n, repr(row.p_value), row.stars, row.method.value]
                )
    text = format_correlation_table(all_rows, gazetteer)
    with atomic_output(out_txt) as tmp:
        tmp.write_text(text, encoding="utf-8")

    headline = next(
        (
            row
            for row in all_rows
            if row.region_id == country_id
            and row.reference == "satellite"
            and row.method in (stats.Method.SPEARMAN_PERMUTATION, stats.Method.SPEARMAN_T_APPROX)
            and row.source == "news"
        ),
        None,
    )
    return {
        "out_csv": str(out_csv),
        "out_txt": str(out_txt),
        "n_rows": len(all_rows),
        "skipped": skipped,
        "table": text,
        "country_spearman_vs_satellite": None
        if headline is None
        else {"coefficient": headline.coefficient, "n": headline.n, "p_value": headline.p_value,
              "stars": headline.stars},
    }


def format_correlation_table(rows: Sequence[stats.TableRow], gazetteer) -> str:
    """Text table with EM-DAT and satellite columns per region, one row per
    source, Spearman coefficients with significance stars."""
    columns: list[tuple[str, str, str]] = [("emdat", "bangladesh", "EM-DAT BD")]
    columns.append(("satellite", "bangladesh", "Satellite BD"))
    for division_id in DIVISION_COLUMNS:
        columns.append(("satellite", division_id, gazetteer.regions[division_id].name))
    spearman_rows = [
        r for r in rows
        if r.method in (stats.Method.SPEARMAN_PERMUTATION, stats.Method.SPEARMAN_T_APPROX)
    ]
    sources = sorted({r.source for r in spearman_rows})
    by_key = {(r.source, r.reference, r.region_id): r for r in spearman_rows}
    header = f"{'Source':<10}" + "".join(f"{title:>14}" for _, _, title in columns)
    lines = [header, "-" * len(header)]
    for source in sources:
        cells = []
        for reference, region_id, _ in columns:
            row = by_key.get((source, reference, region_id))
            cells.append("--" if row is None else f"{row.coefficient:.2f}{row.stars}")
        lines.append(f"{source:<10}" + "".join(f"{c:>14}" for c in cells))
    footnote = "significance: * p<0.1, ** p<0.05, *** p<0.01 (two-sided)"
    return "\n".join(lines + [footnote]) + "\n"


def run_report(
    news_series_path: str | Path,
    correlations_csv: str | Path,
    out_dir: str | Path,
    satellite_path: str | Path | None = None,
    emdat_path: str | Path | None = None,
    gazetteer_path: str | Path | None = None,
) -> dict:
    gazetteer = load_gazetteer(gazetteer_path)
    country_id = gazetteer.country.region_id
    news = series_mod.load_series(_require(news_series_path, "news series file"))
    _require(correlations_csv, "correlations file")
    out_dir = Path(out_dir)
    charts_dir = out_dir / "charts"
    charts_dir.mkdir(parents=True, exist_ok=True)
    chart_files = []
    if satellite_path is not None:
        satellite = refdata.load_satellite(satellite_path, gazetteer)
        for region_id in sorted(set(news) & set(satellite)):
            name = gazetteer.regions[region_id].name
            svg = charts.render_comparison(
                f"News flood index vs satellite inundated area: {name}",
                news[region_id],
                satellite[region_id],
                a_label="news",
                b_label="satellite",
            )
            target = charts_dir / f"news_vs_satellite_{region_id}.svg"
            with atomic_output(target) as tmp:
                tmp.write_text(svg, encoding="utf-8")
            chart_files.append(str(target))
    if emdat_path is not None and country_id in news:
        events = refdata.load_emdat(emdat_path)
        if events:
            weekly = refdata.emdat_to_series(events, news[country_id].weeks(), region_id=country_id)
            svg = charts.render_comparison(
                "News flood index vs EM-DAT people affected: Bangladesh",
                news[country_id],
                weekly,
                a_label="news",
                b_label="emdat",
            )
            target = charts_dir / "news_vs_emdat_bangladesh.svg"
            with atomic_output(target) as tmp:
                tmp.write_text(svg, encoding="utf-8")
            chart_files.append(str(target))

    # Rebuild the text table from the stage artifact so report needs no
    # in-memory coupling to correlate.
    rows = []
    with open(correlations_csv, newline="", encoding="utf-8") as fh:
        for row in csv.DictReader(fh):
            rows.append(
                stats.TableRow(
                    region_id=row["region_id"],
                    source=row["source"],
                    reference=row["reference"],
                    coefficient=float(row["coefficient"]),
                    n=int(row["n"]),
                    p_value=float(row["p_value"]),
                    stars=row["stars"],
                    method=stats.Method(row["method"]),
                )
            )
    text = format_correlation_table(rows, gazetteer)
    report_path = out_dir / "report.txt"
    with atomic_output(report_path) as tmp:
        tmp.write_text(text, encoding="utf-8")
    return {
        "report_txt": str(report_path),
        "charts": chart_files,
        "table": text,
    }
