"""Batch-export sentence-transformer embeddings of headline CSVs to EMB1 files."""

from embed_exporter.exporter import (
    DEFAULT_MODEL,
    ExportJob,
    SchemaError,
    export_embeddings,
    read_titles,
    write_emb1,
)

__all__ = [
    "DEFAULT_MODEL",
    "ExportJob",
    "SchemaError",
    "export_embeddings",
    "read_titles",
    "write_emb1",
]
