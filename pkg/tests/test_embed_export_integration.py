"""Cross-component check: the external exporter's FLEMB1 files are read back
bitwise by this package, and its verify command accepts them.

Requires the embed-export package to be built (npm install && npm run build
in embed-export/); the tests skip with a pointer when node or the build is
missing.
"""

import json
import shutil
import struct
import subprocess
from pathlib import Path

import numpy as np
import pytest

from floodlens.corpus import write_corpus
from floodlens.embeddings import read_embeddings, verify_embeddings

from conftest import make_article

REPO_ROOT = Path(__file__).resolve().parent.parent
EXPORT_CLI = REPO_ROOT / "embed-export" / "dist" / "src" / "cli.js"

pytestmark = pytest.mark.skipif(
    shutil.which("node") is None or not EXPORT_CLI.exists(),
    reason="embed-export not built (run: cd embed-export && npm install && npm run build)",
)

PROBE_FLOOD = [
    "Rivers swell as rain batters Sylhet. Thousands of families were marooned when the embankment collapsed.",
    "Villages under water in Rangpur. Standing crops on vast tracts of farmland went under water.",
    "Flood worsens in Dhaka. Water entered hundreds of homes overnight and submerged the main road.",
    "Kurigram reels from rising water. Boats became the only way to move around the submerged villages.",
    "Fresh areas inundated in Sunamganj as the river was flowing above the danger mark for a third day.",
]
PROBE_NONFLOOD = [
    "Council session opens in Khulna. The city corporation unveiled its new budget for the fiscal year.",
    "Sports day celebrated in Barisal. The national cricket team sealed the series with a five-wicket win.",
    "Business roundup from Chittagong. Garment exports rose for the second consecutive quarter.",
    "New projects announced for Rajshahi. A new bridge tender attracted bids from four construction firms.",
    "The education board published the secondary school results and the art institute opened its exhibition.",
]


def run_exporter(args):
    return subprocess.run(
        ["node", str(EXPORT_CLI)] + [str(a) for a in args],
        capture_output=True,
        text=True,
        timeout=300,
    )


@pytest.fixture(scope="module")
def exported(tmp_path_factory):
    root = tmp_path_factory.mktemp("export")
    articles = [
        make_article(id=f"flood-{i}", title="", body=text)
        for i, text in enumerate(PROBE_FLOOD)
    ] + [
        make_article(id=f"other-{i}", title="", body=text)
        for i, text in enumerate(PROBE_NONFLOOD)
    ]
    corpus_path = root / "probe.jsonl"
    write_corpus(articles, corpus_path)
    out_path = root / "probe.flemb"
    result = run_exporter(
        ["export", "--corpus", corpus_path, "--out", out_path, "--model", "hashed-256"]
    )
    assert result.returncode == 0, result.stderr
    return {"corpus": corpus_path, "flemb": out_path, "articles": articles}


class TestRoundTrip:
    def test_exporter_verify_accepts_its_output(self, exported):
        result = run_exporter(["verify", exported["flemb"]])
        assert result.returncode == 0, result.stderr
        assert "OK, n=10, d=256" in result.stdout

    def test_primary_reader_recovers_ids_and_floats(self, exported):
        emb = read_embeddings(exported["flemb"])
        assert emb.ids == [a.id for a in exported["articles"]]
        assert emb.dim == 256
        report = verify_embeddings(exported["flemb"])
        assert report["ok"] and report["n"] == 10 and report["d"] == 256
        # bitwise: the payload bytes equal the float32 rows exactly
        blob = Path(exported["flemb"]).read_bytes()
        payload = blob[len(blob) - 10 * 256 * 4 :]
        assert emb.rows.astype("<f4").tobytes() == payload

    def test_header_fields(self, exported):
        blob = Path(exported["flemb"]).read_bytes()
        assert blob[:6] == b"FLEMB1"
        dim, count = struct.unpack_from("<IQ", blob, 6)
        assert (dim, count) == (256, 10)

    def test_sidecar_records_model_and_pooling(self, exported):
        sidecar = json.loads(
            Path(str(exported["flemb"]) + ".json").read_text(encoding="utf-8")
        )
        assert sidecar["model"] == "hashed-256"
        assert sidecar["pooling"] == "mean"

    def test_cosine_ordering_on_probe_set(self, exported):
        emb = read_embeddings(exported["flemb"])
        rows = {i: emb.rows[k].astype(np.float64) for k, i in enumerate(emb.ids)}

        def cos(a, b):
            return float(a @ b / (np.linalg.norm(a) * np.linalg.norm(b)))

        flood = [rows[f"flood-{i}"] for i in range(5)]
        other = [rows[f"other-{i}"] for i in range(5)]
        within = [cos(a, b) for i, a in enumerate(flood) for b in flood[i + 1 :]]
        across = [cos(a, b) for a in flood for b in other]
        assert np.mean(within) > np.mean(across)

    def test_export_determinism_across_runs(self, exported, tmp_path):
        again = tmp_path / "again.flemb"
        result = run_exporter(
            ["export", "--corpus", exported["corpus"], "--out", again, "--model", "hashed-256"]
        )
        assert result.returncode == 0, result.stderr
        assert again.read_bytes() == Path(exported["flemb"]).read_bytes()
