"""Acceptance criteria, one test per criterion, each printing a PASS line.

Run with `pytest tests/test_acceptance.py -v -s` to see the per-criterion
lines. Budgets are wall-clock seconds measured around the criterion's own
work. The end-to-end chain is driven through the service endpoints, the same
surface the CLI uses.
"""

import csv
import filecmp
import itertools
import math
import time
import warnings

import numpy as np
import pytest

with warnings.catch_warnings():
    warnings.filterwarnings("ignore", message=".*httpx2.*")
    from fastapi.testclient import TestClient

from floodlens.classify import evaluate, keyword_predict, predict_corpus, train_classifier
from floodlens.classify.linear import logistic_loss_and_grad
from floodlens.corpus import Label, SplitSpec, load_annotations, load_corpus, split
from floodlens.embeddings import read_embeddings
from floodlens.service import create_app
from floodlens.stats import Method, rank, pearson, spearman
from floodlens.synth import load_intensity

from conftest import make_article


def announce(name: str, detail: str = "") -> None:
    suffix = f" ({detail})" if detail else ""
    print(f"\nACCEPTANCE {name}: PASS{suffix}")


def rank_oracle(values):
    return [
        1 + sum(1 for u in values if u < v) + (sum(1 for u in values if u == v) - 1) / 2
        for v in values
    ]


def pearson_oracle(x, y):
    n = len(x)
    mx = math.fsum(x) / n
    my = math.fsum(y) / n
    sxy = math.fsum((a - mx) * (b - my) for a, b in zip(x, y))
    sxx = math.fsum((a - mx) ** 2 for a in x)
    syy = math.fsum((b - my) ** 2 for b in y)
    return sxy / math.sqrt(sxx * syy)


class TestRankCorrelationOracles:
    def test_thousand_seeded_pairs_match_oracles(self):
        start = time.monotonic()
        rng = np.random.default_rng(20170814)
        checked = 0
        worst_spearman = worst_pearson = 0.0
        while checked < 1000:
            n = int(rng.integers(3, 51))
            # integers in a narrow range guarantee planted ties
            x = rng.integers(0, 10, size=n).astype(float)
            y = rng.integers(0, 10, size=n).astype(float)
            if len(set(x)) < 2 or len(set(y)) < 2:
                continue
            checked += 1
            assert list(rank(x)) == rank_oracle(list(x))
            assert list(rank(y)) == rank_oracle(list(y))
            rho = spearman(x, y, p_method="approx").coefficient
            rho_oracle = pearson_oracle(rank_oracle(list(x)), rank_oracle(list(y)))
            worst_spearman = max(worst_spearman, abs(rho - rho_oracle))
            r = pearson(x, y, p_method="approx").coefficient
            worst_pearson = max(worst_pearson, abs(r - pearson_oracle(list(x), list(y))))
        elapsed = time.monotonic() - start
        assert worst_spearman < 1e-12
        assert worst_pearson < 1e-12
        assert elapsed < 10.0
        announce(
            "rank/correlation oracle equivalence",
            f"1000 pairs, max dev {max(worst_spearman, worst_pearson):.2e}, {elapsed:.1f}s",
        )


class TestExactPermutationSignificance:
    def test_n5_enumerates_120_and_n3_hand_case(self):
        start = time.monotonic()
        r = spearman([1, 2, 3], [6, 4, 2])
        assert r.method is Method.SPEARMAN_PERMUTATION
        assert r.p_value == pytest.approx(2 / 6, abs=1e-15)

        rng = np.random.default_rng(5)
        for _ in range(10):
            x = rng.normal(size=5)
            y = rng.normal(size=5)
            result = spearman(x, y)
            assert result.method is Method.SPEARMAN_PERMUTATION
            scaled = result.p_value * 120
            assert scaled == pytest.approx(round(scaled), abs=1e-9)
            assert 0 < result.p_value <= 1

        # full enumeration cross-check for one n=5 pair
        x = [3.0, 1.0, 4.0, 1.5, 9.0]
        y = [2.0, 7.0, 1.0, 8.0, 2.5]
        rx, ry = rank_oracle(x), rank_oracle(y)
        observed = abs(pearson_oracle(rx, ry))
        hits = sum(
            1
            for perm in itertools.permutations(ry)
            if abs(pearson_oracle(rx, list(perm))) >= observed - 1e-12
        )
        assert spearman(x, y).p_value == pytest.approx(hits / 120, abs=1e-15)
        elapsed = time.monotonic() - start
        assert elapsed < 1.0
        announce("exact permutation significance", f"{elapsed:.2f}s")


class TestGradientCorrectness:
    def test_ten_seeded_points_on_100x50_design(self):
        start = time.monotonic()
        rng = np.random.default_rng(424242)
        X = rng.normal(size=(100, 50))
        y = (rng.random(100) < 0.4).astype(np.float64)
        lam = 1e-3
        worst = 0.0
        for _ in range(10):
            w = rng.normal(scale=0.5, size=50)
            b = float(rng.normal())
            _, grad_w, grad_b = logistic_loss_and_grad(w, b, X, y, lam)
            analytic = np.append(grad_w, grad_b)
            numeric = np.empty(51)
            h = 1e-6
            for i in range(50):
                dw = np.zeros(50)
                dw[i] = h
                lp, _, _ = logistic_loss_and_grad(w + dw, b, X, y, lam)
                lm, _, _ = logistic_loss_and_grad(w - dw, b, X, y, lam)
                numeric[i] = (lp - lm) / (2 * h)
            lp, _, _ = logistic_loss_and_grad(w, b + h, X, y, lam)
            lm, _, _ = logistic_loss_and_grad(w, b - h, X, y, lam)
            numeric[50] = (lp - lm) / (2 * h)
            rel = np.linalg.norm(analytic - numeric) / max(
                np.linalg.norm(analytic), np.linalg.norm(numeric), 1e-12
            )
            worst = max(worst, rel)
        elapsed = time.monotonic() - start
        assert worst < 1e-5
        assert elapsed < 5.0
        announce("gradient correctness", f"max rel err {worst:.2e}, {elapsed:.1f}s")


class TestClassifierOrdering:
    def test_keyword_trails_learned_models_by_five_points(self, default_bundle):
        start = time.monotonic()
        result = load_corpus(default_bundle.corpus_path)
        annotations = load_annotations(default_bundle.annotations_path, set(result.by_id))
        assert len(annotations) == 1380
        train_set, test_set = split(annotations, SplitSpec(seed=0, test_fraction=880 / 1380))
        assert len(test_set) == 880
        embeddings = read_embeddings(default_bundle.embeddings_path)
        gold = {a.article_id: a.label for a in test_set}
        test_articles = [result.by_id[a.article_id] for a in test_set]

        scores = {}
        for name in ("keyword", "logistic", "embedding_head"):
            bundle = train_classifier(name, result.by_id, train_set, embeddings=embeddings)
            predictions = predict_corpus(bundle, test_articles, embeddings=embeddings)
            scores[name] = evaluate({k: v[0] for k, v in predictions.items()}, gold)

        f1_keyword = scores["keyword"].f1
        f1_logistic = scores["logistic"].f1
        f1_embedding = scores["embedding_head"].f1
        elapsed = time.monotonic() - start
        assert f1_logistic - f1_keyword >= 0.05
        assert f1_embedding - f1_keyword >= 0.05
        assert scores["logistic"].accuracy >= 0.90
        assert elapsed < 120.0
        announce(
            "classifier ordering",
            f"F1 keyword={f1_keyword:.3f} logistic={f1_logistic:.3f} "
            f"embedding={f1_embedding:.3f}, logistic acc={scores['logistic'].accuracy:.3f}, "
            f"{elapsed:.0f}s",
        )


class TestKeywordRuleFidelity:
    def test_three_quoted_sentences(self):
        positive = make_article(body="The season of flood, cyclone and dengue is upcoming")
        negative_contextual = make_article(
            body="... many other parts of the capital went under the knee-to-waist-deep "
            "water, causing immense sufferings to the city dwellers"
        )
        negative_seepage = make_article(body="Water has seeped into households...")
        assert keyword_predict(positive) is Label.FLOOD
        assert keyword_predict(negative_contextual) is Label.NOT_FLOOD
        assert keyword_predict(negative_seepage) is Label.NOT_FLOOD
        announce("keyword rule fidelity")


@pytest.fixture(scope="module")
def pipeline_runs(default_bundle, tmp_path_factory):
    """The full chain, run twice through the service endpoints."""
    root = tmp_path_factory.mktemp("accept_chain")
    bundle = default_bundle
    outputs = []
    start = time.monotonic()
    with TestClient(create_app(), raise_server_exceptions=False) as client:
        for run in ("run1", "run2"):
            out = root / run
            out.mkdir()
            def post(endpoint, payload):
                response = client.post(endpoint, json=payload)
                assert response.status_code == 200, f"{endpoint}: {response.text}"
                return response.json()

            post("/train", {
                "corpus": str(bundle.corpus_path),
                "annotations": str(bundle.annotations_path),
                "classifier": "embedding_head",
                "embeddings": str(bundle.embeddings_path),
                "model_out": str(out / "model.json"),
                "use": "all",
            })
            post("/predict", {
                "model": str(out / "model.json"),
                "corpus": str(bundle.corpus_path),
                "embeddings": str(bundle.embeddings_path),
                "out_csv": str(out / "predictions.csv"),
            })
            post("/extract", {
                "corpus": str(bundle.corpus_path),
                "predictions": str(out / "predictions.csv"),
                "out_csv": str(out / "events.csv"),
            })
            post("/series", {
                "corpus": str(bundle.corpus_path),
                "events": str(out / "events.csv"),
                "out_series_csv": str(out / "news_series.csv"),
                "out_counts_csv": str(out / "flood_counts.csv"),
            })
            correlate = post("/correlate", {
                "news_series": str(out / "news_series.csv"),
                "satellite": str(bundle.satellite_path),
                "emdat": str(bundle.emdat_path),
                "out_csv": str(out / "correlations.csv"),
                "out_txt": str(out / "correlations.txt"),
            })
            post("/report", {
                "news_series": str(out / "news_series.csv"),
                "correlations_csv": str(out / "correlations.csv"),
                "satellite": str(bundle.satellite_path),
                "emdat": str(bundle.emdat_path),
                "out_dir": str(out / "report"),
            })
            outputs.append({"dir": out, "correlate": correlate})
    return {"runs": outputs, "elapsed": time.monotonic() - start, "bundle": bundle}


class TestEndToEndRecovery:
    def test_country_and_division_correlations(self, pipeline_runs):
        bundle = pipeline_runs["bundle"]
        run = pipeline_runs["runs"][0]
        headline = run["correlate"]["country_spearman_vs_satellite"]
        assert headline["coefficient"] >= 0.9
        assert headline["p_value"] < 0.01

        intensity = load_intensity(bundle.intensity_path)
        active = {d for d, curve in intensity.items() if max(curve.values()) > 0}
        rows = {}
        with open(run["dir"] / "correlations.csv", newline="", encoding="utf-8") as fh:
            for row in csv.DictReader(fh):
                if row["reference"] == "satellite" and row["method"].startswith("spearman"):
                    rows[row["region_id"]] = float(row["coefficient"])
        missing = active - set(rows)
        assert not missing, f"no correlation rows for {missing}"
        weakest = min(rows[d] for d in active)
        assert weakest >= 0.7
        assert pipeline_runs["elapsed"] < 300.0
        announce(
            "end-to-end recovery",
            f"country rho={headline['coefficient']:.3f} p={headline['p_value']:.1e}, "
            f"min division rho={weakest:.3f}, both runs {pipeline_runs['elapsed']:.0f}s",
        )


class TestConservation:
    def test_division_counts_sum_to_country_every_week(self, pipeline_runs):
        run = pipeline_runs["runs"][0]
        counts: dict[str, dict[str, int]] = {}
        with open(run["dir"] / "flood_counts.csv", newline="", encoding="utf-8") as fh:
            for row in csv.DictReader(fh):
                counts.setdefault(row["region_id"], {})[row["iso_week"]] = int(row["flood_count"])
        country = counts.pop("bangladesh")
        divisions = {r: c for r, c in counts.items() if r.startswith("div-")}
        assert len(divisions) == 8
        for week, total in country.items():
            division_sum = sum(c.get(week, 0) for c in divisions.values())
            assert division_sum == total, f"week {week}: {division_sum} != {total}"
        announce("conservation", f"{len(country)} weeks exact")


class TestDeterminism:
    def test_two_runs_byte_identical(self, pipeline_runs):
        run1, run2 = (r["dir"] for r in pipeline_runs["runs"])
        artifacts = [
            "model.json",
            "predictions.csv",
            "events.csv",
            "news_series.csv",
            "flood_counts.csv",
            "correlations.csv",
            "correlations.txt",
            "report/report.txt",
        ]
        for name in artifacts:
            assert filecmp.cmp(run1 / name, run2 / name, shallow=False), f"{name} differs"
        charts1 = sorted(p.name for p in (run1 / "report" / "charts").glob("*.svg"))
        charts2 = sorted(p.name for p in (run2 / "report" / "charts").glob("*.svg"))
        assert charts1 == charts2 and charts1
        for name in charts1:
            assert filecmp.cmp(
                run1 / "report" / "charts" / name, run2 / "report" / "charts" / name, shallow=False
            )
        announce("determinism", f"{len(artifacts) + len(charts1)} artifacts byte-identical")
