"""Request/response models for the pipeline service.

Paths in requests refer to the filesystem of the machine running the
service; the CLI runs the service in-process by default, so they are
ordinary local paths there.
"""

from __future__ import annotations

from pydantic import BaseModel, Field


class SplitParams(BaseModel):
    seed: int = 0
    test_fraction: float = Field(default=880 / 1380, gt=0.0, lt=1.0)
    explicit_train: list[str] | None = None
    explicit_test: list[str] | None = None


class VectorizerParams(BaseModel):
    lowercase: bool = True
    min_df: int = 2
    max_features: int = 50_000
    ngram_min: int = 1
    ngram_max: int = 2


class LinearParams(BaseModel):
    lam: float = 1e-4
    epochs: int | None = None  # None = per-classifier default (300 logistic, 50 svm)
    learning_rate: float = 1.0
    seed: int = 0


class ForestParams(BaseModel):
    n_trees: int = 100
    max_depth: int = 32
    seed: int = 0


class SynthRequest(BaseModel):
    out_dir: str
    seed: int = 7
    week_start: str = "2017-W01"
    week_end: str = "2017-W44"
    n_articles: int = 5000
    n_annotated: int = 1380
    n_annotated_flood: int = 400
    keyword_prob: float = 0.6
    nonflood_keyword_prob: float = 0.18
    district_prob: float = 0.5
    area_scale: float = 40.0
    noise_scale: float = 8.0
    embedding_dim: int = 64
    embedding_separation: float = 6.0
    # division id -> list of [center_week_index, width, peak]; None = defaults
    bumps: dict[str, list[list[float]]] | None = None


class SynthResponse(BaseModel):
    out_dir: str
    corpus: str
    annotations: str
    embeddings: str
    satellite: str
    emdat: str
    ground_truth: str
    intensity: str
    n_articles: int
    n_flood: int
    n_annotated: int
    week_start: str
    week_end: str


class IngestRequest(BaseModel):
    corpus: str
    annotations: str | None = None


class BadLine(BaseModel):
    line: int
    error: str


class IngestResponse(BaseModel):
    n_articles: int
    n_bad_lines: int
    bad_lines: list[BadLine]
    sources: dict[str, int]
    n_annotated: int | None = None
    n_flood: int | None = None
    n_not_flood: int | None = None


class TrainRequest(BaseModel):
    corpus: str
    annotations: str
    classifier: str
    model_out: str
    split: SplitParams = SplitParams()
    use: str = "train_split"  # or "all"
    vectorizer: VectorizerParams = VectorizerParams()
    linear: LinearParams = LinearParams()
    forest: ForestParams = ForestParams()
    embeddings: str | None = None
    keyword_stems: list[str] | None = None
    threads: int = 1


class TrainResponse(BaseModel):
    model: str
    classifier: str
    n_train: int
    vocabulary_size: int | None = None
    final_loss: float | None = None


class EvalRequest(BaseModel):
    corpus: str
    annotations: str
    embeddings: str
    out_csv: str
    out_txt: str
    split: SplitParams = SplitParams()
    vectorizer: VectorizerParams = VectorizerParams()
    linear: LinearParams = LinearParams()
    forest: ForestParams = ForestParams()
    threads: int = 1


class ClassifierMetrics(BaseModel):
    classifier: str
    accuracy: float
    precision: float
    recall: float
    f1: float
    tp: int
    fp: int
    fn: int
    tn: int


class EvalResponse(BaseModel):
    metrics: list[ClassifierMetrics]
    table: str
    n_train: int
    n_test: int
    out_csv: str
    out_txt: str


class PredictRequest(BaseModel):
    model: str
    corpus: str
    out_csv: str
    embeddings: str | None = None
    threads: int = 1


class PredictResponse(BaseModel):
    out_csv: str
    n_articles: int
    n_flood: int
    classifier: str


class ExtractRequest(BaseModel):
    corpus: str
    predictions: str
    out_csv: str
    gazetteer: str | None = None


class ExtractResponse(BaseModel):
    out_csv: str
    n_events: int
    n_flood_events: int
    flood_events_by_level: dict[str, int]


class SeriesRequest(BaseModel):
    corpus: str
    events: str
    out_series_csv: str
    out_counts_csv: str
    gazetteer: str | None = None
    denominators: str | None = None
    week_start: str | None = None
    week_end: str | None = None


class SeriesResponse(BaseModel):
    out_series_csv: str
    out_counts_csv: str
    weeks: int
    week_start: str
    week_end: str
    regions: list[str]
    conservation_exact: bool
    country_only_weeks: dict[str, int]


class CorrelateRequest(BaseModel):
    news_series: str
    out_csv: str
    out_txt: str
    satellite: str | None = None
    emdat: str | None = None
    twitter_series: str | None = None
    gazetteer: str | None = None
    lag: int = 0
    p_method: str = "auto"  # auto | exact | approx


class SkippedRegion(BaseModel):
    source: str
    region_id: str
    reason: str


class CountrySpearman(BaseModel):
    coefficient: float
    n: int
    p_value: float
    stars: str


class CorrelateResponse(BaseModel):
    out_csv: str
    out_txt: str
    n_rows: int
    skipped: list[SkippedRegion]
    table: str
    country_spearman_vs_satellite: CountrySpearman | None = None


class ReportRequest(BaseModel):
    news_series: str
    correlations_csv: str
    out_dir: str
    satellite: str | None = None
    emdat: str | None = None
    gazetteer: str | None = None


class ReportResponse(BaseModel):
    report_txt: str
    charts: list[str]
    table: str


class HealthResponse(BaseModel):
    status: str
    version: str
