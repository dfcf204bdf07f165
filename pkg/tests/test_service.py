import warnings

import pytest

with warnings.catch_warnings():
    warnings.filterwarnings("ignore", message=".*httpx2.*")
    from fastapi.testclient import TestClient

from floodlens.service import create_app


@pytest.fixture(scope="module")
def client():
    with TestClient(create_app(), raise_server_exceptions=False) as c:
        yield c


@pytest.fixture(scope="module")
def workspace(client, tmp_path_factory):
    """Synth bundle plus a full stage chain driven through the endpoints."""
    root = tmp_path_factory.mktemp("svc")
    bundle_dir = root / "bundle"
    out = root / "out"
    out.mkdir()
    r = client.post(
        "/synth",
        json={
            "out_dir": str(bundle_dir),
            "seed": 13,
            "n_articles": 900,
            "n_annotated": 300,
            "n_annotated_flood": 90,
        },
    )
    assert r.status_code == 200, r.text
    return {"bundle": r.json(), "root": root, "out": out}


class TestHealthAndErrors:
    def test_health(self, client):
        r = client.get("/health")
        assert r.status_code == 200
        assert r.json()["status"] == "ok"

    def test_missing_field_is_usage_error(self, client):
        r = client.post("/ingest", json={})
        assert r.status_code == 400
        assert r.json()["detail"]["kind"] == "usage"

    def test_missing_file_is_data_error(self, client):
        r = client.post("/ingest", json={"corpus": "/no/such/file.jsonl"})
        assert r.status_code == 422
        detail = r.json()["detail"]
        assert detail["kind"] == "data"
        assert "/no/such/file.jsonl" in detail["message"]


class TestChain:
    def test_ingest(self, client, workspace):
        bundle = workspace["bundle"]
        r = client.post(
            "/ingest", json={"corpus": bundle["corpus"], "annotations": bundle["annotations"]}
        )
        assert r.status_code == 200
        body = r.json()
        assert body["n_articles"] == 900
        assert body["n_annotated"] == 300
        assert body["n_flood"] == 90
        assert body["n_bad_lines"] == 0

    def test_train_predict_extract_series_correlate_report(self, client, workspace):
        bundle = workspace["bundle"]
        out = workspace["out"]
        r = client.post(
            "/train",
            json={
                "corpus": bundle["corpus"],
                "annotations": bundle["annotations"],
                "classifier": "logistic",
                "model_out": str(out / "model.json"),
                "use": "all",
            },
        )
        assert r.status_code == 200, r.text
        assert r.json()["n_train"] == 300

        r = client.post(
            "/predict",
            json={
                "model": str(out / "model.json"),
                "corpus": bundle["corpus"],
                "out_csv": str(out / "predictions.csv"),
            },
        )
        assert r.status_code == 200, r.text
        assert r.json()["n_articles"] == 900

        r = client.post(
            "/extract",
            json={
                "corpus": bundle["corpus"],
                "predictions": str(out / "predictions.csv"),
                "out_csv": str(out / "events.csv"),
            },
        )
        assert r.status_code == 200, r.text
        assert r.json()["n_events"] == 900

        r = client.post(
            "/series",
            json={
                "corpus": bundle["corpus"],
                "events": str(out / "events.csv"),
                "out_series_csv": str(out / "news_series.csv"),
                "out_counts_csv": str(out / "flood_counts.csv"),
            },
        )
        assert r.status_code == 200, r.text
        body = r.json()
        assert body["weeks"] == 44
        assert body["conservation_exact"] is True

        r = client.post(
            "/correlate",
            json={
                "news_series": str(out / "news_series.csv"),
                "satellite": bundle["satellite"],
                "emdat": bundle["emdat"],
                "out_csv": str(out / "correlations.csv"),
                "out_txt": str(out / "correlations.txt"),
            },
        )
        assert r.status_code == 200, r.text
        body = r.json()
        assert body["country_spearman_vs_satellite"]["coefficient"] > 0.5
        assert "Satellite BD" in body["table"]

        r = client.post(
            "/report",
            json={
                "news_series": str(out / "news_series.csv"),
                "correlations_csv": str(out / "correlations.csv"),
                "satellite": bundle["satellite"],
                "emdat": bundle["emdat"],
                "out_dir": str(out / "report"),
            },
        )
        assert r.status_code == 200, r.text
        body = r.json()
        assert (out / "report" / "report.txt").exists()
        assert body["charts"]
        for chart in body["charts"]:
            assert chart.endswith(".svg")

    def test_eval_row_order_matches_method_table(self, client, workspace):
        bundle = workspace["bundle"]
        out = workspace["out"]
        r = client.post(
            "/eval",
            json={
                "corpus": bundle["corpus"],
                "annotations": bundle["annotations"],
                "embeddings": bundle["embeddings"],
                "out_csv": str(out / "eval.csv"),
                "out_txt": str(out / "eval.txt"),
                "split": {"seed": 1, "test_fraction": 0.5},
            },
        )
        assert r.status_code == 200, r.text
        body = r.json()
        assert [m["classifier"] for m in body["metrics"]] == [
            "keyword",
            "logistic",
            "svm",
            "forest",
            "embedding_head",
        ]
        table = body["table"]
        order = [
            table.index("Keywords"),
            table.index("Logistic Regression"),
            table.index("SVM"),
            table.index("Random Forest"),
            table.index("Embedding Head"),
        ]
        assert order == sorted(order)

    def test_correlate_disjoint_weeks_is_data_error(self, client, workspace, tmp_path):
        bundle = workspace["bundle"]
        shifted = tmp_path / "shifted_series.csv"
        lines = ["region_id,iso_week,value,unit"]
        for i in range(1, 11):
            lines.append(f"bangladesh,2031-W{i:02d},0.{i},FloodFraction")
        shifted.write_text("\n".join(lines) + "\n", encoding="utf-8")
        r = client.post(
            "/correlate",
            json={
                "news_series": str(shifted),
                "satellite": bundle["satellite"],
                "out_csv": str(tmp_path / "c.csv"),
                "out_txt": str(tmp_path / "c.txt"),
            },
        )
        assert r.status_code == 422
        assert "overlap" in r.json()["detail"]["message"]

    def test_series_rejects_unknown_week_range(self, client, workspace, tmp_path):
        bundle = workspace["bundle"]
        out = workspace["out"]
        r = client.post(
            "/series",
            json={
                "corpus": bundle["corpus"],
                "events": str(out / "events.csv"),
                "out_series_csv": str(tmp_path / "s.csv"),
                "out_counts_csv": str(tmp_path / "c.csv"),
                "week_start": "2016-W01",
                "week_end": "2016-W10",
            },
        )
        # weeks outside the corpus have no denominators
        assert r.status_code == 422
        assert "2016-W01" in r.json()["detail"]["message"]
