"""Run a pretrained sentence transformer over a headline CSV and write EMB1.

The output is consumable by any EMB1 reader. EMB1 layout (little-endian):
magic b"EMB1", u32 row count, u32 dimension, u8 normalized flag, then per row
a u32 id byte length, the UTF-8 id bytes, and dimension float32 values.

The CSV contract matches the headline-ingest schema of the analysis pipeline:
a header with (case-insensitive) ``date`` and ``title`` columns, ISO dates,
rows with an empty title skipped, and ids assigned as 0-based positions among
the kept rows.
"""

from __future__ import annotations

import csv
import datetime as dt
import logging
import struct
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Sequence

import numpy as np

log = logging.getLogger(__name__)

MAGIC = b"EMB1"
DEFAULT_MODEL = "sentence-transformers/all-MiniLM-L6-v2"
DEFAULT_BATCH_SIZE = 32

# Maps a batch of titles to a (batch, dim) float array. Injectable for tests
# and for callers that manage model loading themselves.
Encoder = Callable[[Sequence[str]], np.ndarray]


class SchemaError(ValueError):
    """Input CSV does not match the headline schema."""


@dataclass(frozen=True)
class ExportJob:
    input_path: str | Path
    output_path: str | Path
    model_name: str = DEFAULT_MODEL
    batch_size: int = DEFAULT_BATCH_SIZE
    normalize: bool = True

    def __post_init__(self):
        if self.batch_size < 1:
            raise ValueError(f"batch size must be >= 1, got {self.batch_size}")


def read_titles(path: str | Path) -> list[str]:
    """Read headline titles, skipping empty-title rows like the ingest does."""
    path = Path(path)
    if not path.is_file():
        raise SchemaError(f"headlines file not found: {path}")
    titles: list[str] = []
    skipped = 0
    with path.open(newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames is None:
            raise SchemaError(f"{path}: file has no header row")
        lowered = {name.strip().lower(): name for name in reader.fieldnames if name}
        missing = [col for col in ("date", "title") if col not in lowered]
        if missing:
            raise SchemaError(
                f"{path}: header is missing column(s) {', '.join(missing)}"
            )
        for row in reader:
            title = (row[lowered["title"]] or "").strip()
            if not title:
                skipped += 1
                continue
            raw = (row[lowered["date"]] or "").strip()
            try:
                dt.date.fromisoformat(raw)
            except ValueError:
                raise SchemaError(
                    f"{path}:{reader.line_num}: unparsable date {raw!r} "
                    "(expected YYYY-MM-DD)"
                ) from None
            titles.append(title)
    if skipped:
        log.warning("skipped %d empty-title row(s) in %s", skipped, path)
    return titles


def write_emb1(
    path: str | Path, ids: Sequence[str], data: np.ndarray, normalized: bool
) -> None:
    data = np.asarray(data, dtype=np.float32)
    if data.ndim != 2 or data.shape[0] != len(ids):
        raise ValueError(
            f"data shape {data.shape} inconsistent with {len(ids)} ids"
        )
    with Path(path).open("wb") as fh:
        fh.write(MAGIC)
        fh.write(struct.pack("<IIB", data.shape[0], data.shape[1], int(normalized)))
        for row_id, row in zip(ids, data):
            encoded = row_id.encode("utf-8")
            fh.write(struct.pack("<I", len(encoded)))
            fh.write(encoded)
            fh.write(row.tobytes())


def _default_encoder(job: ExportJob) -> Encoder:
    from sentence_transformers import SentenceTransformer

    model = SentenceTransformer(job.model_name)

    def encode(batch: Sequence[str]) -> np.ndarray:
        return np.asarray(
            model.encode(list(batch), batch_size=job.batch_size,
                         show_progress_bar=False)
        )

    return encode


def export_embeddings(job: ExportJob, encoder: Encoder | None = None) -> int:
    """Embed every headline in the input CSV and write the EMB1 file.

    Returns the number of rows written. ``encoder`` defaults to the pretrained
    model named by the job; pass a callable to override (e.g. in tests).
    """
    titles = read_titles(job.input_path)
    if not titles:
        raise SchemaError(f"{job.input_path}: no non-empty headlines to embed")
    if encoder is None:
        encoder = _default_encoder(job)
    chunks = []
    for start in range(0, len(titles), job.batch_size):
        batch = titles[start : start + job.batch_size]
        vecs = np.asarray(encoder(batch), dtype=np.float64)
        if vecs.ndim != 2 or vecs.shape[0] != len(batch):
            raise ValueError(
                f"encoder returned shape {vecs.shape} for a {len(batch)}-title batch"
            )
        chunks.append(vecs)
    matrix = np.vstack(chunks)
    if any(c.shape[1] != matrix.shape[1] for c in chunks):
        raise ValueError("encoder returned inconsistent dimensions across batches")
    if job.normalize:
        norms = np.linalg.norm(matrix, axis=1, keepdims=True)
        matrix = np.divide(matrix, norms, out=matrix.copy(), where=norms > 0.0)
    ids = [str(i) for i in range(matrix.shape[0])]
    write_emb1(job.output_path, ids, matrix.astype(np.float32), job.normalize)
    return matrix.shape[0]
