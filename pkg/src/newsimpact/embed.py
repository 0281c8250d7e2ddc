"""Headline embedding providers and the EMB1 on-disk matrix format."""

from __future__ import annotations

import hashlib
import os
import struct
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
import requests

from newsimpact.corpus import Headline
from newsimpact.errors import InputError
from newsimpact.text import tokenize

EMB1_MAGIC = b"EMB1"
NORM_TOL = 1e-6

EMBED_URL_ENV = "NEWSIMPACT_EMBED_URL"
EMBED_TOKEN_ENV = "NEWSIMPACT_EMBED_TOKEN"


@dataclass
class EmbeddingMatrix:
    """Dense n x d headline embeddings with stable string ids."""

    ids: list[str]
    data: np.ndarray  # (n, d) float64
    normalized: bool = False

    def __post_init__(self):
        self.data = np.asarray(self.data, dtype=np.float64)
        if self.data.ndim != 2:
            raise InputError(f"embedding data must be 2-D, got shape {self.data.shape}")
        if len(self.ids) != self.data.shape[0]:
            raise InputError(
                f"{len(self.ids)} ids for {self.data.shape[0]} embedding rows"
            )
        if self.data.shape[1] < 1:
            raise InputError("embedding dimension must be positive")
        if len(set(self.ids)) != len(self.ids):
            raise InputError("duplicate ids in embedding matrix")
        if self.normalized:
            norms = np.linalg.norm(self.data, axis=1)
            nonzero = norms > 0
            if nonzero.any() and np.abs(norms[nonzero] - 1.0).max() > NORM_TOL:
                raise InputError("normalized flag set but row norms deviate from 1")

    @property
    def n(self) -> int:
        return self.data.shape[0]

    @property
    def dim(self) -> int:
        return self.data.shape[1]

    @classmethod
    def from_array(cls, data, ids=None, normalized=False) -> "EmbeddingMatrix":
        data = np.asarray(data, dtype=np.float64)
        if ids is None:
            ids = [str(i) for i in range(data.shape[0])]
        return cls(list(ids), data, normalized)


@dataclass(frozen=True)
class EmbeddingProviderSpec:
    """Which provider to use and its provider-specific settings."""

    kind: str  # hashing | file | http
    dim: int = 256
    endpoint: str = ""
    source: str = ""
    seed: int = 42
    normalize: bool = True
    batch_size: int = 64

    def __post_init__(self):
        if self.kind not in ("hashing", "file", "http"):
            raise InputError(f"unknown embedding provider {self.kind!r}")
        if self.kind == "http" and not self.endpoint:
            raise InputError("http provider requires an endpoint")
        if self.kind == "file" and not self.source:
            raise InputError("file provider requires a source path")


def _l2_normalize_rows(data: np.ndarray) -> np.ndarray:
    norms = np.linalg.norm(data, axis=1, keepdims=True)
    safe = np.where(norms > 0, norms, 1.0)
    return data / safe


def embed_hashing(
    headlines: list[Headline],
    dim: int = 256,
    seed: int = 42,
    normalize: bool = True,
) -> EmbeddingMatrix:
    """Signed feature-hashing bag of words over headline tokens.

    Deterministic for a fixed (titles, dim, seed). Titles with no usable
    tokens produce all-zero rows.
    """
    if dim < 2:
        raise InputError(f"hashing dimension must be >= 2, got {dim}")
    key = struct.pack("<q", seed & 0x7FFFFFFFFFFFFFFF)
    data = np.zeros((len(headlines), dim), dtype=np.float64)
    for i, h in enumerate(headlines):
        for token in tokenize(h.title):
            digest = hashlib.blake2b(token.encode("utf-8"), digest_size=9, key=key).digest()
            bucket = int.from_bytes(digest[:8], "little") % dim
            sign = 1.0 if digest[8] & 1 else -1.0
            data[i, bucket] += sign
    if normalize:
        data = _l2_normalize_rows(data)
    return EmbeddingMatrix([str(h.id) for h in headlines], data, normalized=normalize)


def save_embeddings(matrix: EmbeddingMatrix, path: str | Path) -> None:
    """Write EMB1: magic, u32 n, u32 dim, u8 normalized, then id+f32 records."""
    path = Path(path)
    payload = bytearray()
    payload += EMB1_MAGIC
    payload += struct.pack("<IIB", matrix.n, matrix.dim, 1 if matrix.normalized else 0)
    data32 = matrix.data.astype("<f4")
    for i, ident in enumerate(matrix.ids):
        raw = ident.encode("utf-8")
        payload += struct.pack("<I", len(raw))
        payload += raw
        payload += data32[i].tobytes()
    try:
        path.write_bytes(bytes(payload))
    except OSError as exc:
        raise InputError(f"cannot write embeddings to {path}: {exc}") from exc


def load_embeddings(path: str | Path) -> EmbeddingMatrix:
    """Read an EMB1 file; floats are restored at 32-bit fidelity."""
    path = Path(path)
    if not path.is_file():
        raise InputError(f"embeddings file not found: {path}")
    buf = path.read_bytes()
    if buf[:4] != EMB1_MAGIC:
        raise InputError(f"{path}: bad magic {buf[:4]!r}, expected {EMB1_MAGIC!r}")
    if len(buf) < 13:
        raise InputError(f"{path}: truncated header")
    n, dim, norm_flag = struct.unpack_from("<IIB", buf, 4)
    if dim == 0:
        raise InputError(f"{path}: embedding dimension is 0")
    off = 13
    ids: list[str] = []
    rows = np.empty((n, dim), dtype=np.float64)
    row_bytes = 4 * dim
    for i in range(n):
        if off + 4 > len(buf):
            raise InputError(f"{path}: truncated at record {i} (declared n={n})")
        (id_len,) = struct.unpack_from("<I", buf, off)
        off += 4
        if off + id_len + row_bytes > len(buf):
            raise InputError(f"{path}: truncated at record {i} (declared n={n})")
        ids.append(buf[off : off + id_len].decode("utf-8"))
        off += id_len
        rows[i] = np.frombuffer(buf, dtype="<f4", count=dim, offset=off)
        off += row_bytes
    if off != len(buf):
        raise InputError(f"{path}: {len(buf) - off} trailing bytes after last record")
    return EmbeddingMatrix(ids, rows, normalized=bool(norm_flag))


def embed_http(
    headlines: list[Headline],
    endpoint: str,
    batch_size: int = 64,
    timeout: float = 30.0,
    normalize: bool = True,
) -> EmbeddingMatrix:
    """Fetch embeddings from a JSON service, batch by batch, in input order.

    Protocol: POST {"texts": [...]} -> {"embeddings": [[...], ...]}.
    """
    if batch_size < 1:
        raise InputError(f"batch_size must be >= 1, got {batch_size}")
    headers = {}
    token = os.environ.get(EMBED_TOKEN_ENV)
    if token:
        headers["Authorization"] = f"Bearer {token}"
    chunks: list[np.ndarray] = []
    dim: int | None = None
    for start in range(0, len(headlines), batch_size):
        batch = headlines[start : start + batch_size]
        texts = [h.title for h in batch]
        try:
            resp = requests.post(
                endpoint, json={"texts": texts}, headers=headers, timeout=timeout
            )
        except requests.RequestException as exc:
            raise InputError(f"embedding request to {endpoint} failed: {exc}") from exc
        if not 200 <= resp.status_code < 300:
            raise InputError(
                f"embedding service returned {resp.status_code}: {resp.text[:200]}"
            )
        rows = resp.json().get("embeddings")
        if rows is None or len(rows) != len(texts):
            got = 0 if rows is None else len(rows)
            raise InputError(
                f"embedding service returned {got} rows for {len(texts)} inputs"
            )
        arr = np.asarray(rows, dtype=np.float64)
        if arr.ndim != 2:
            raise InputError("embedding rows have inconsistent lengths within a batch")
        if dim is None:
            dim = arr.shape[1]
        elif arr.shape[1] != dim:
            raise InputError(
                f"inconsistent embedding dimension across batches: {dim} then {arr.shape[1]}"
            )
        chunks.append(arr)
    if not chunks:
        data = np.zeros((0, 1))
    else:
        data = np.vstack(chunks)
    if normalize and data.size:
        data = _l2_normalize_rows(data)
    return EmbeddingMatrix([str(h.id) for h in headlines], data, normalized=normalize)


def embed_headlines(headlines: list[Headline], spec: EmbeddingProviderSpec) -> EmbeddingMatrix:
    """Dispatch to the provider named by spec."""
    if spec.kind == "hashing":
        return embed_hashing(headlines, dim=spec.dim, seed=spec.seed, normalize=spec.normalize)
    if spec.kind == "file":
        matrix = load_embeddings(spec.source)
        if len(headlines) and matrix.n != len(headlines):
            raise InputError(
                f"embedding file has {matrix.n} rows for {len(headlines)} headlines"
            )
        return matrix
    return embed_http(
        headlines, spec.endpoint, batch_size=spec.batch_size, normalize=spec.normalize
    )
