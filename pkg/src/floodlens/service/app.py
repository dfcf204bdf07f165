"""FastAPI application exposing each pipeline stage as a POST endpoint.

Error mapping: malformed requests -> 400 (usage), contract violations in
input data -> 422 (data), anything unexpected -> 500 (internal). The CLI
turns these into exit codes 1, 2 and 3.
"""

from __future__ import annotations

import logging

from fastapi import FastAPI, Request
from fastapi.exceptions import RequestValidationError
from fastapi.responses import JSONResponse

from .. import __version__, pipeline
from ..classify import ForestConfig, LinearConfig
from ..corpus import SplitSpec
from ..errors import DataError, UsageError
from ..synth import Bump, SynthConfig
from ..textfeat import VectorizerConfig
from . import schemas

logger = logging.getLogger(__name__)


def _split_spec(params: schemas.SplitParams) -> SplitSpec:
    return SplitSpec(
        seed=params.seed,
        test_fraction=params.test_fraction,
        explicit_train=tuple(params.explicit_train) if params.explicit_train else None,
        explicit_test=tuple(params.explicit_test) if params.explicit_test else None,
    )


def _vectorizer_config(params: schemas.VectorizerParams) -> VectorizerConfig:
    return VectorizerConfig(
        lowercase=params.lowercase,
        min_df=params.min_df,
        max_features=params.max_features,
        ngram_min=params.ngram_min,
        ngram_max=params.ngram_max,
    )


def _linear_config(params: schemas.LinearParams, classifier: str) -> LinearConfig:
    epochs = params.epochs if params.epochs is not None else (50 if classifier == "svm" else 300)
    return LinearConfig(
        lam=params.lam, epochs=epochs, learning_rate=params.learning_rate, seed=params.seed
    )


def _forest_config(params: schemas.ForestParams) -> ForestConfig:
    return ForestConfig(n_trees=params.n_trees, max_depth=params.max_depth, seed=params.seed)


def _synth_config(req: schemas.SynthRequest) -> SynthConfig:
    if req.bumps is None:
        bumps = None  # scaled default curves
    else:
        bumps = {
            division: tuple(Bump(int(c), float(w), float(p)) for c, w, p in entries)
            for division, entries in req.bumps.items()
        }
    return SynthConfig(
        seed=req.seed,
        week_start=req.week_start,
        week_end=req.week_end,
        n_articles=req.n_articles,
        n_annotated=req.n_annotated,
        n_annotated_flood=req.n_annotated_flood,
        keyword_prob=req.keyword_prob,
        nonflood_keyword_prob=req.nonflood_keyword_prob,
        district_prob=req.district_prob,
        bumps=bumps,
        area_scale=req.area_scale,
        noise_scale=req.noise_scale,
        embedding_dim=req.embedding_dim,
        embedding_separation=req.embedding_separation,
    )


def create_app() -> FastAPI:
    app = FastAPI(title="floodlens", version=__version__)

    @app.exception_handler(DataError)
    async def data_error_handler(request: Request, exc: DataError):
        return JSONResponse(
            status_code=422, content={"detail": {"kind": "data", "message": str(exc)}}
        )

    @app.exception_handler(UsageError)
    async def usage_error_handler(request: Request, exc: UsageError):
        return JSONResponse(
            status_code=400, content={"detail": {"kind": "usage", "message": str(exc)}}
        )

    @app.exception_handler(RequestValidationError)
    async def validation_error_handler(request: Request, exc: RequestValidationError):
        return JSONResponse(
            status_code=400,
            content={"detail": {"kind": "usage", "message": str(exc.errors()[:3])}},
        )

    @app.get("/health", response_model=schemas.HealthResponse)
    def health() -> schemas.HealthResponse:
        return schemas.HealthResponse(status="ok", version=__version__)

    @app.post("/synth", response_model=schemas.SynthResponse)
    def synth(req: schemas.SynthRequest) -> schemas.SynthResponse:
        return schemas.SynthResponse(**pipeline.run_synth(_synth_config(req), req.out_dir))

    @app.post("/ingest", response_model=schemas.IngestResponse)
    def ingest(req: schemas.IngestRequest) -> schemas.IngestResponse:
        return schemas.IngestResponse(**pipeline.run_ingest(req.corpus, req.annotations))

    @app.post("/train", response_model=schemas.TrainResponse)
    def train(req: schemas.TrainRequest) -> schemas.TrainResponse:
        return schemas.TrainResponse(
            **pipeline.run_train(
                corpus_path=req.corpus,
                annotations_path=req.annotations,
                classifier=req.classifier,
                model_out=req.model_out,
                split_spec=_split_spec(req.split),
                use=req.use,
                vectorizer_config=_vectorizer_config(req.vectorizer),
                linear_config=_linear_config(req.linear, req.classifier),
                forest_config=_forest_config(req.forest),
                embeddings_path=req.embeddings,
                keyword_stems=req.keyword_stems,
                threads=req.threads,
            )
        )

    @app.post("/eval", response_model=schemas.EvalResponse)
    def eval_classifiers(req: schemas.EvalRequest) -> schemas.EvalResponse:
        return schemas.EvalResponse(
            **pipeline.run_eval(
                corpus_path=req.corpus,
                annotations_path=req.annotations,
                embeddings_path=req.embeddings,
                out_csv=req.out_csv,
                out_txt=req.out_txt,
                split_spec=_split_spec(req.split),
                vectorizer_config=_vectorizer_config(req.vectorizer),
                linear_config=_linear_config(req.linear, "logistic"),
                forest_config=_forest_config(req.forest),
                threads=req.threads,
            )
        )

    @app.post("/predict", response_model=schemas.PredictResponse)
    def predict(req: schemas.PredictRequest) -> schemas.PredictResponse:
        return schemas.PredictResponse(
            **pipeline.run_predict(
                model_path=req.model,
                corpus_path=req.corpus,
                out_csv=req.out_csv,
                embeddings_path=req.embeddings,
                threads=req.threads,
            )
        )

    @app.post("/extract", response_model=schemas.ExtractResponse)
    def extract(req: schemas.ExtractRequest) -> schemas.ExtractResponse:
        return schemas.ExtractResponse(
            **pipeline.run_extract(
                corpus_path=req.corpus,
                predictions_path=req.predictions,
                out_csv=req.out_csv,
                gazetteer_path=req.gazetteer,
            )
        )

    @app.post("/series", response_model=schemas.SeriesResponse)
    def series(req: schemas.SeriesRequest) -> schemas.SeriesResponse:
        return schemas.SeriesResponse(
            **pipeline.run_series(
                corpus_path=req.corpus,
                events_path=req.events,
                out_series_csv=req.out_series_csv,
                out_counts_csv=req.out_counts_csv,
                gazetteer_path=req.gazetteer,
                denominators_path=req.denominators,
                week_start=req.week_start,
                week_end=req.week_end,
            )
        )

    @app.post("/correlate", response_model=schemas.CorrelateResponse)
    def correlate(req: schemas.CorrelateRequest) -> schemas.CorrelateResponse:
        return schemas.CorrelateResponse(
            **pipeline.run_correlate(
                news_series_path=req.news_series,
                out_csv=req.out_csv,
                out_txt=req.out_txt,
                satellite_path=req.satellite,
                emdat_path=req.emdat,
                twitter_series_path=req.twitter_series,
                gazetteer_path=req.gazetteer,
                lag=req.lag,
                p_method=req.p_method,
            )
        )

    @app.post("/report", response_model=schemas.ReportResponse)
    def report(req: schemas.ReportRequest) -> schemas.ReportResponse:
        return schemas.ReportResponse(
            **pipeline.run_report(
                news_series_path=req.news_series,
                correlations_csv=req.correlations_csv,
                out_dir=req.out_dir,
                satellite_path=req.satellite,
                emdat_path=req.emdat,
                gazetteer_path=req.gazetteer,
            )
        )

    return app
