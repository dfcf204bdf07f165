"""FLEMB1 binary embedding files.

Layout, fixed little-endian regardless of platform:

    bytes 0..5    magic "FLEMB1"
    bytes 6..9    u32 dimension d
    bytes 10..17  u64 row count n
    id table      n entries of (u32 byte length, UTF-8 article id)
    payload       n rows of d float32 values, row-major, in id order

The same bytes are produced by the external exporter; the reader here must
recover ids and floats bit-exactly from either producer.
"""

from __future__ import annotations

import json
import struct
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .errors import DataError

MAGIC = b"FLEMB1"
_HEADER = struct.Struct("<6sIQ")


def write_embeddings(
    ids: Sequence[str], rows: np.ndarray, path: str | Path, sidecar: dict | None = None
) -> None:
    rows = np.asarray(rows, dtype=np.float32)
    if rows.ndim != 2:
        raise DataError(f"embedding rows must be 2-D, got shape {rows.shape}")
    if len(ids) != rows.shape[0]:
        raise DataError(f"{len(ids)} ids but {rows.shape[0]} embedding rows")
    if rows.shape[1] == 0:
        raise DataError("embedding dimension must be positive")
    if not np.all(np.isfinite(rows)):
        raise DataError("embedding rows contain non-finite values")
    if len(set(ids)) != len(ids):
        raise DataError("duplicate article ids in embedding file")
    path = Path(path)
    with open(path, "wb") as fh:
        fh.write(_HEADER.pack(MAGIC, rows.shape[1], rows.shape[0]))
        for article_id in ids:
            raw = article_id.encode("utf-8")
            fh.write(struct.pack("<I", len(raw)))
            fh.write(raw)
        if rows.size:
            fh.write(rows.astype("<f4", copy=False).tobytes(order="C"))
    if sidecar is not None:
        with open(path.with_suffix(path.suffix + ".json"), "w", encoding="utf-8") as fh:
            json.dump(sidecar, fh, indent=2, sort_keys=True)
            fh.write("\n")


@dataclass
class EmbeddingSet:
    ids: list[str]
    rows: np.ndarray  # float32, shape (n, d)

    @property
    def dim(self) -> int:
        return int(self.rows.shape[1])

    def as_dict(self) -> dict[str, np.ndarray]:
        return {article_id: self.rows[i] for i, article_id in enumerate(self.ids)}

    def subset(self, wanted: Iterable[str]) -> "EmbeddingSet":
        index = {article_id: i for i, article_id in enumerate(self.ids)}
        wanted = list(wanted)
        missing = [w for w in wanted if w not in index]
        if missing:
            raise DataError(
                f"no embedding row for article {missing[0]!r} ({len(missing)} missing)"
            )
        sel = [index[w] for w in wanted]
        return EmbeddingSet(ids=wanted, rows=self.rows[sel])


def read_embeddings(path: str | Path) -> EmbeddingSet:
    path = Path(path)
    if not path.exists():
        raise DataError(f"embedding file {path} does not exist")
    blob = path.read_bytes()
    if len(blob) < _HEADER.size:
        raise DataError(f"{path}: truncated header ({len(blob)} bytes)")
    magic, dim, count = _HEADER.unpack_from(blob, 0)
    if magic != MAGIC:
        raise DataError(f"{path}: bad magic {magic!r}")
    if dim == 0:
        raise DataError(f"{path}: zero embedding dimension")
    offset = _HEADER.size
    ids = []
    for _ in range(count):
        if offset + 4 > len(blob):
            raise DataError(f"{path}: id table truncated")
        (id_len,) = struct.unpack_from("<I", blob, offset)
        offset += 4
        if offset + id_len > len(blob):
            raise DataError(f"{path}: id table truncated")
        ids.append(blob[offset : offset + id_len].decode("utf-8"))
        offset += id_len
    expected_payload = count * dim * 4
    payload = blob[offset:]
    if len(payload) < expected_payload:
        raise DataError(
            f"{path}: payload shorter than n*d*4 "
            f"({len(payload)} bytes, expected {expected_payload})"
        )
    if len(payload) > expected_payload:
        raise DataError(f"{path}: {len(payload) - expected_payload} trailing bytes after payload")
    rows = np.frombuffer(payload, dtype="<f4").reshape(count, dim)
    if len(set(ids)) != len(ids):
        raise DataError(f"{path}: duplicate article ids")
    if not np.all(np.isfinite(rows)):
        raise DataError(f"{path}: payload contains non-finite values")
    return EmbeddingSet(ids=ids, rows=rows.copy())


def verify_embeddings(path: str | Path) -> dict:
    """Structural validation; raises DataError naming the first violation."""
    emb = read_embeddings(path)
    return {
        "ok": True,
        "n": len(emb.ids),
        "d": emb.dim,
        "bytes": Path(path).stat().st_size,
    }
