"""Thin command-line client for the pipeline service.

Every subcommand builds a request, sends it to the service and formats the
response; no pipeline logic lives here. By default the service runs
in-process; point --url (or FLOODLENS_URL) at a running `floodlens serve`
instance to drive a remote one.

Option resolution, highest precedence first: explicit flag, environment
variable FLOODLENS_<NAME>, config file line `name=value`, built-in default.
Exit codes: 0 success, 1 usage error, 2 data error, 3 internal error.
"""

from __future__ import annotations

import json
import os
import sys
from pathlib import Path

import click
import httpx

from .errors import UsageError

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_DATA = 2
EXIT_INTERNAL = 3

ENV_PREFIX = "FLOODLENS_"


def _parse_config_file(path: str | None) -> dict[str, str]:
    if path is None:
        return {}
    p = Path(path)
    if not p.exists():
        raise UsageError(f"config file {path} does not exist")
    out: dict[str, str] = {}
    for line_no, line in enumerate(p.read_text(encoding="utf-8").splitlines(), start=1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise UsageError(f"{path} line {line_no}: expected key=value")
        key, value = line.split("=", 1)
        out[key.strip()] = value.strip()
    return out


class Settings:
    """Flag > FLOODLENS_* env > config file > default."""

    def __init__(self, config_path: str | None, url: str | None):
        self.file_values = _parse_config_file(
            config_path or os.environ.get(ENV_PREFIX + "CONFIG")
        )
        self.url = url or os.environ.get(ENV_PREFIX + "URL") or self.file_values.get("url")

    def get(self, name: str, flag_value, default=None, cast=None):
        value = flag_value
        if value is None:
            env = os.environ.get(ENV_PREFIX + name.upper())
            if env is not None:
                value = env
            elif name in self.file_values:
                value = self.file_values[name]
        if value is None:
            return default
        if cast is not None and cast is not str and isinstance(value, str):
            try:
                if cast is bool:
                    return value.lower() in ("1", "true", "yes", "on")
                return cast(value)
            except ValueError:
                raise UsageError(f"option {name}: cannot interpret {value!r}") from None
        return value


def _client(settings: Settings):
    if settings.url:
        return httpx.Client(base_url=settings.url, timeout=3600.0)
    import warnings

    with warnings.catch_warnings():
        # starlette 1.3 wants httpx2 (not on our index); plain httpx still
        # works for the in-process client, so silence just that warning.
        warnings.filterwarnings("ignore", message=".*httpx2.*")
        from fastapi.testclient import TestClient

    from .service import create_app

    return TestClient(create_app(), raise_server_exceptions=False)


def _call(ctx: click.Context, endpoint: str, payload: dict) -> dict:
    settings: Settings = ctx.obj
    try:
        with _client(settings) as client:
            response = client.post(endpoint, json=payload)
    except httpx.HTTPError as exc:
        click.echo(f"error: cannot reach service: {exc}", err=True)
        sys.exit(EXIT_INTERNAL)
    if response.status_code == 200:
        return response.json()
    try:
        detail = response.json().get("detail")
    except json.JSONDecodeError:
        detail = response.text
    if isinstance(detail, dict):
        kind = detail.get("kind", "internal")
        message = detail.get("message", "")
    else:
        kind, message = "internal", str(detail)
    click.echo(f"error ({kind}): {message}", err=True)
    sys.exit({"usage": EXIT_USAGE, "data": EXIT_DATA}.get(kind, EXIT_INTERNAL))


def _emit(ctx: click.Context, result: dict, as_json: bool, text_keys: tuple[str, ...] = ()) -> None:
    if as_json:
        click.echo(json.dumps(result, indent=2, sort_keys=True))
        return
    for key, value in result.items():
        if key in text_keys:
            continue
        if isinstance(value, (dict, list)):
            value = json.dumps(value, sort_keys=True)
        click.echo(f"{key}: {value}")
    for key in text_keys:
        if result.get(key):
            click.echo("")
            click.echo(result[key].rstrip("\n"))


@click.group()
@click.option("--url", default=None, help="Base URL of a running service (default: in-process).")
@click.option("--config", "config_path", default=None, help="key=value config file.")
@click.pass_context
def cli(ctx: click.Context, url: str | None, config_path: str | None) -> None:
    """Flood event extraction pipeline: news corpora to validated time series."""
    ctx.obj = Settings(config_path, url)


@cli.command()
@click.option("--out-dir", default=None)
@click.option("--seed", type=int, default=None)
@click.option("--n-articles", type=int, default=None)
@click.option("--n-annotated", type=int, default=None)
@click.option("--n-annotated-flood", type=int, default=None)
@click.option("--keyword-prob", "-q", type=float, default=None)
@click.option("--week-start", default=None)
@click.option("--week-end", default=None)
@click.option("--json", "as_json", is_flag=True, help="Print the raw JSON response.")
@click.pass_context
def synth(ctx, out_dir, seed, n_articles, n_annotated, n_annotated_flood, keyword_prob,
          week_start, week_end, as_json):
    """Generate a seeded synthetic bundle with ground truth."""
    s: Settings = ctx.obj
    payload = {
        "out_dir": s.get("out_dir", out_dir, default="synth_out"),
        "seed": s.get("seed", seed, default=7, cast=int),
        "n_articles": s.get("n_articles", n_articles, default=5000, cast=int),
        "n_annotated": s.get("n_annotated", n_annotated, default=1380, cast=int),
        "n_annotated_flood": s.get("n_annotated_flood", n_annotated_flood, default=400, cast=int),
        "keyword_prob": s.get("keyword_prob", keyword_prob, default=0.6, cast=float),
        "week_start": s.get("week_start", week_start, default="2017-W01"),
        "week_end": s.get("week_end", week_end, default="2017-W44"),
    }
    _emit(ctx, _call(ctx, "/synth", payload), as_json)


@cli.command()
@click.option("--corpus", default=None)
@click.option("--annotations", default=None)
@click.option("--json", "as_json", is_flag=True)
@click.pass_context
def ingest(ctx, corpus, annotations, as_json):
    """Validate a corpus (and optionally its annotations); report totals."""
    s: Settings = ctx.obj
    payload = {
        "corpus": s.get("corpus", corpus),
        "annotations": s.get("annotations", annotations),
    }
    if payload["corpus"] is None:
        raise click.UsageError("--corpus is required (flag, env or config file)")
    _emit(ctx, _call(ctx, "/ingest", payload), as_json)


def _training_payload(s: Settings, corpus, annotations, test_fraction, split_seed,
                      min_df, max_features, epochs, lam, n_trees, max_depth, seed, threads):
    split = {
        "seed": s.get("split_seed", split_seed, default=s.get("seed", seed, default=0, cast=int), cast=int),
        "test_fraction": s.get("test_fraction", test_fraction, default=880 / 1380, cast=float),
    }
    vectorizer = {
        "min_df": s.get("min_df", min_df, default=2, cast=int),
        "max_features": s.get("max_features", max_features, default=50_000, cast=int),
    }
    linear = {
        "lam": s.get("lam", lam, default=1e-4, cast=float),
        "seed": s.get("seed", seed, default=0, cast=int),
    }
    if s.get("epochs", epochs, cast=int) is not None:
        linear["epochs"] = s.get("epochs", epochs, cast=int)
    forest = {
        "n_trees": s.get("n_trees", n_trees, default=100, cast=int),
        "max_depth": s.get("max_depth", max_depth, default=32, cast=int),
        "seed": s.get("seed", seed, default=0, cast=int),
    }
    return {
        "corpus": s.get("corpus", corpus),
        "annotations": s.get("annotations", annotations),
        "split": split,
        "vectorizer": vectorizer,
        "linear": linear,
        "forest": forest,
        "threads": s.get("threads", threads, default=1, cast=int),
    }


@cli.command()
@click.option("--corpus", default=None)
@click.option("--annotations", default=None)
@click.option("--classifier", default=None,
              type=click.Choice(["keyword", "logistic", "svm", "forest", "embedding_head"]))
@click.option("--model-out", default=None)
@click.option("--use", default=None, type=click.Choice(["train_split", "all"]))
@click.option("--embeddings", default=None)
@click.option("--test-fraction", type=float, default=None)
@click.option("--split-seed", type=int, default=None)
@click.option("--min-df", type=int, default=None)
@click.option("--max-features", type=int, default=None)
@click.option("--epochs", type=int, default=None)
@click.option("--lam", type=float, default=None)
@click.option("--n-trees", type=int, default=None)
@click.option("--max-depth", type=int, default=None)
@click.option("--seed", type=int, default=None)
@click.option("--threads", type=int, default=None)
@click.option("--json", "as_json", is_flag=True)
@click.pass_context
def train(ctx, corpus, annotations, classifier, model_out, use, embeddings,
          test_fraction, split_seed, min_df, max_features, epochs, lam,
          n_trees, max_depth, seed, threads, as_json):
    """Train one classifier and write a self-contained model file."""
    s: Settings = ctx.obj
    payload = _training_payload(s, corpus, annotations, test_fraction, split_seed,
                                min_df, max_features, epochs, lam, n_trees, max_depth,
                                seed, threads)
    payload.update(
        {
            "classifier": s.get("classifier", classifier, default="logistic"),
            "model_out": s.get("model_out", model_out, default="model.json"),
            "use": s.get("use", use, default="train_split"),
            "embeddings": s.get("embeddings", embeddings),
        }
    )
    for required in ("corpus", "annotations"):
        if payload[required] is None:
            raise click.UsageError(f"--{required} is required")
    _emit(ctx, _call(ctx, "/train", payload), as_json)


@cli.command("eval")
@click.option("--corpus", default=None)
@click.option("--annotations", default=None)
@click.option("--embeddings", default=None)
@click.option("--out-csv", default=None)
@click.option("--out-txt", default=None)
@click.option("--test-fraction", type=float, default=None)
@click.option("--split-seed", type=int, default=None)
@click.option("--min-df", type=int, default=None)
@click.option("--max-features", type=int, default=None)
@click.option("--epochs", type=int, default=None)
@click.option("--lam", type=float, default=None)
@click.option("--n-trees", type=int, default=None)
@click.option("--max-depth", type=int, default=None)
@click.option("--seed", type=int, default=None)
@click.option("--threads", type=int, default=None)
@click.option("--json", "as_json", is_flag=True)
@click.pass_context
def eval_cmd(ctx, corpus, annotations, embeddings, out_csv, out_txt,
             test_fraction, split_seed, min_df, max_features, epochs, lam,
             n_trees, max_depth, seed, threads, as_json):
    """Train and score all five classifiers on a held-out split."""
    s: Settings = ctx.obj
    payload = _training_payload(s, corpus, annotations, test_fraction, split_seed,
                                min_df, max_features, epochs, lam, n_trees, max_depth,
                                seed, threads)
    payload.update(
        {
            "embeddings": s.get("embeddings", embeddings),
            "out_csv": s.get("out_csv", out_csv, default="eval_metrics.csv"),
            "out_txt": s.get("out_txt", out_txt, default="eval_metrics.txt"),
        }
    )
    for required in ("corpus", "annotations", "embeddings"):
        if payload[required] is None:
            raise click.UsageError(f"--{required} is required")
    _emit(ctx, _call(ctx, "/eval", payload), as_json, text_keys=("table",))


@cli.command()
@click.option("--model", default=None)
@click.option("--corpus", default=None)
@click.option("--out-csv", default=None)
@click.option("--embeddings", default=None)
@click.option("--threads", type=int, default=None)
@click.option("--json", "as_json", is_flag=True)
@click.pass_context
def predict(ctx, model, corpus, out_csv, embeddings, threads, as_json):
    """Apply a trained model to a corpus; write article_id,prediction,score."""
    s: Settings = ctx.obj
    payload = {
        "model": s.get("model", model),
        "corpus": s.get("corpus", corpus),
        "out_csv": s.get("out_csv", out_csv, default="predictions.csv"),
        "embeddings": s.get("embeddings", embeddings),
        "threads": s.get("threads", threads, default=1, cast=int),
    }
    for required in ("model", "corpus"):
        if payload[required] is None:
            raise click.UsageError(f"--{required} is required")
    _emit(ctx, _call(ctx, "/predict", payload), as_json)


@cli.command()
@click.option("--corpus", default=None)
@click.option("--predictions", default=None)
@click.option("--out-csv", default=None)
@click.option("--gazetteer", default=None)
@click.option("--json", "as_json", is_flag=True)
@click.pass_context
def extract(ctx, corpus, predictions, out_csv, gazetteer, as_json):
    """Assign region and ISO week to each flood-classified article."""
    s: Settings = ctx.obj
    payload = {
        "corpus": s.get("corpus", corpus),
        "predictions": s.get("predictions", predictions),
        "out_csv": s.get("out_csv", out_csv, default="events.csv"),
        "gazetteer": s.get("gazetteer", gazetteer),
    }
    for required in ("corpus", "predictions"):
        if payload[required] is None:
            raise click.UsageError(f"--{required} is required")
    _emit(ctx, _call(ctx, "/extract", payload), as_json)


@cli.command()
@click.option("--corpus", default=None)
@click.option("--events", default=None)
@click.option("--out-series-csv", default=None)
@click.option("--out-counts-csv", default=None)
@click.option("--gazetteer", default=None)
@click.option("--denominators", default=None)
@click.option("--week-start", default=None)
@click.option("--week-end", default=None)
@click.option("--json", "as_json", is_flag=True)
@click.pass_context
def series(ctx, corpus, events, out_series_csv, out_counts_csv, gazetteer,
           denominators, week_start, week_end, as_json):
    """Build normalized weekly flood series per region."""
    s: Settings = ctx.obj
    payload = {
        "corpus": s.get("corpus", corpus),
        "events": s.get("events", events),
        "out_series_csv": s.get("out_series_csv", out_series_csv, default="news_series.csv"),
        "out_counts_csv": s.get("out_counts_csv", out_counts_csv, default="flood_counts.csv"),
        "gazetteer": s.get("gazetteer", gazetteer),
        "denominators": s.get("denominators", denominators),
        "week_start": s.get("week_start", week_start),
        "week_end": s.get("week_end", week_end),
    }
    for required in ("corpus", "events"):
        if payload[required] is None:
            raise click.UsageError(f"--{required} is required")
    _emit(ctx, _call(ctx, "/series", payload), as_json)


@cli.command()
@click.option("--news-series", default=None)
@click.option("--satellite", default=None)
@click.option("--emdat", default=None)
@click.option("--twitter-series", default=None)
@click.option("--out-csv", default=None)
@click.option("--out-txt", default=None)
@click.option("--gazetteer", default=None)
@click.option("--lag", type=int, default=None)
@click.option("--p-method", default=None, type=click.Choice(["auto", "exact", "approx"]))
@click.option("--json", "as_json", is_flag=True)
@click.pass_context
def correlate(ctx, news_series, satellite, emdat, twitter_series, out_csv, out_txt,
              gazetteer, lag, p_method, as_json):
    """Rank-correlate news series against satellite / EM-DAT references."""
    s: Settings = ctx.obj
    payload = {
        "news_series": s.get("news_series", news_series),
        "satellite": s.get("satellite", satellite),
        "emdat": s.get("emdat", emdat),
        "twitter_series": s.get("twitter_series", twitter_series),
        "out_csv": s.get("out_csv", out_csv, default="correlations.csv"),
        "out_txt": s.get("out_txt", out_txt, default="correlations.txt"),
        "gazetteer": s.get("gazetteer", gazetteer),
        "lag": s.get("lag", lag, default=0, cast=int),
        "p_method": s.get("p_method", p_method, default="auto"),
    }
    if payload["news_series"] is None:
        raise click.UsageError("--news-series is required")
    _emit(ctx, _call(ctx, "/correlate", payload), as_json, text_keys=("table",))


@cli.command()
@click.option("--news-series", default=None)
@click.option("--correlations-csv", default=None)
@click.option("--out-dir", default=None)
@click.option("--satellite", default=None)
@click.option("--emdat", default=None)
@click.option("--gazetteer", default=None)
@click.option("--json", "as_json", is_flag=True)
@click.pass_context
def report(ctx, news_series, correlations_csv, out_dir, satellite, emdat, gazetteer, as_json):
    """Emit the correlation table and SVG charts of news vs reference series."""
    s: Settings = ctx.obj
    payload = {
        "news_series": s.get("news_series", news_series),
        "correlations_csv": s.get("correlations_csv", correlations_csv, default="correlations.csv"),
        "out_dir": s.get("out_dir", out_dir, default="report_out"),
        "satellite": s.get("satellite", satellite),
        "emdat": s.get("emdat", emdat),
        "gazetteer": s.get("gazetteer", gazetteer),
    }
    if payload["news_series"] is None:
        raise click.UsageError("--news-series is required")
    _emit(ctx, _call(ctx, "/report", payload), as_json, text_keys=("table",))


@cli.command()
@click.option("--host", default="127.0.0.1")
@click.option("--port", type=int, default=8000)
def serve(host, port):
    """Run the pipeline service under uvicorn."""
    import uvicorn

    from .service import create_app

    uvicorn.run(create_app(), host=host, port=port)


def main() -> None:
    try:
        cli(standalone_mode=False)
    except click.exceptions.Exit as exc:
        sys.exit(exc.exit_code)
    except click.exceptions.Abort:
        sys.exit(EXIT_USAGE)
    except click.ClickException as exc:
        exc.show()
        sys.exit(EXIT_USAGE)
    except UsageError as exc:
        click.echo(f"error (usage): {exc}", err=True)
        sys.exit(EXIT_USAGE)


if __name__ == "__main__":
    main()
