"""Exact cosine top-k vector store with metadata and persistence.

Vectors are l2-normalized and quantized to float32 at insert, so cosine
similarity is a dot product at query time and a persistence round trip
is bit-exact. Queries are full scans against a contiguous matrix; ties
break by insertion order.

File layout: header (magic "CMIX", u32 version, u32 dim, u64 count,
u32 CRC32 of the body), then the id table (u16 length-prefixed utf-8),
float32 little-endian row-major vectors, and a u64-length-prefixed JSON
metadata block.
"""

from __future__ import annotations

import json
import struct
import threading
import zlib
from typing import Dict, List, Optional, Tuple

import numpy as np

from .errors import (
    CorruptFile,
    DimMismatch,
    DuplicateId,
    EmptyIndex,
    NormalizationFailure,
    VersionMismatch,
)

MAGIC = b"CMIX"
FORMAT_VERSION = 1
_HEADER = struct.Struct("<4sIIQI")


class VectorIndex:
    """Flat exact-search index. Many readers or one writer at a time;
    queries never observe a partially inserted record."""

    def __init__(self, dim: int):
        if dim < 1:
            raise ValueError("dim must be positive")
        self._dim = dim
        self._count = 0
        self._ids: List[str] = []
        self._id_pos: Dict[str, int] = {}
        self._buffer = np.zeros((16, dim), dtype=np.float32)
        self._metadata: List[Optional[dict]] = []
        self._lock = threading.Lock()

    @property
    def dim(self) -> int:
        return self._dim

    def __len__(self) -> int:
        return self._count

    def __contains__(self, record_id: str) -> bool:
        return record_id in self._id_pos

    @property
    def _vectors(self) -> np.ndarray:
        return self._buffer[: self._count]

    def _normalize(self, vector, what: str) -> np.ndarray:
        vec = np.asarray(vector, dtype=np.float64).reshape(-1)
        if vec.shape[0] != self._dim:
            raise DimMismatch(f"{what} has dim {vec.shape[0]}, index is {self._dim}-d")
        norm = float(np.linalg.norm(vec))
        if norm == 0.0 or not np.isfinite(norm):
            raise NormalizationFailure(f"cannot normalize {what} with norm {norm}")
        return vec / norm

    def insert(self, record_id: str, vector: np.ndarray, metadata: Optional[dict] = None):
        """Normalize, quantize to float32, and append one record."""
        row = self._normalize(vector, "vector").astype(np.float32)
        with self._lock:
            if record_id in self._id_pos:
                raise DuplicateId(f"id {record_id!r} already indexed")
            if self._count == self._buffer.shape[0]:
                grown = np.zeros((2 * self._buffer.shape[0], self._dim), dtype=np.float32)
                grown[: self._count] = self._buffer[: self._count]
                self._buffer = grown
            self._buffer[self._count] = row
            self._ids.append(record_id)
            self._metadata.append(metadata)
            self._id_pos[record_id] = self._count
            self._count += 1  # must be last: publishes the record to readers

    def insert_many(self, ids: List[str], vectors: np.ndarray, metadata=None):
        """Vectorized bulk insert; equivalent to repeated insert()."""
        vectors = np.asarray(vectors, dtype=np.float64)
        if vectors.ndim != 2 or vectors.shape[0] != len(ids):
            raise DimMismatch("vectors must be (len(ids), dim)")
        if vectors.shape[1] != self._dim:
            raise DimMismatch(f"vectors have dim {vectors.shape[1]}, index is {self._dim}-d")
        norms = np.linalg.norm(vectors, axis=1)
        if np.any(norms == 0.0) or not np.all(np.isfinite(norms)):
            raise NormalizationFailure("cannot normalize zero or non-finite vector")
        rows = (vectors / norms[:, None]).astype(np.float32)
        metadata = metadata if metadata is not None else [None] * len(ids)
        with self._lock:
            fresh = set(ids)
            if len(fresh) != len(ids) or fresh & self._id_pos.keys():
                raise DuplicateId("duplicate id in bulk insert")
            needed = self._count + len(ids)
            if needed > self._buffer.shape[0]:
                capacity = max(needed, 2 * self._buffer.shape[0])
                grown = np.zeros((capacity, self._dim), dtype=np.float32)
                grown[: self._count] = self._buffer[: self._count]
                self._buffer = grown
            self._buffer[self._count : needed] = rows
            for offset, rid in enumerate(ids):
                self._id_pos[rid] = self._count + offset
            self._ids.extend(ids)
            self._metadata.extend(metadata)
            self._count = needed

    def query_topn(self, vector: np.ndarray, n: int) -> List[Tuple[str, float]]:
        """Exact cosine top-n: descending score, insertion order on ties."""
        if self._count == 0:
            raise EmptyIndex("query against an empty index")
        if n < 1:
            raise ValueError("n must be >= 1")
        q = self._normalize(vector, "query")
        scores = self._vectors.astype(np.float64) @ q
        order = np.argsort(-scores, kind="stable")[: min(n, self._count)]
        return [(self._ids[i], float(scores[i])) for i in order]

    def metadata_for(self, record_id: str) -> Optional[dict]:
        return self._metadata[self._id_pos[record_id]]

    # -- persistence -----------------------------------------------------

    def _body_bytes(self) -> bytes:
        parts = []
        for record_id in self._ids:
            encoded = record_id.encode("utf-8")
            parts.append(struct.pack("<H", len(encoded)))
            parts.append(encoded)
        parts.append(self._vectors.astype("<f4").tobytes())
        meta_bytes = json.dumps(self._metadata, sort_keys=True).encode("utf-8")
        parts.append(struct.pack("<Q", len(meta_bytes)))
        parts.append(meta_bytes)
        return b"".join(parts)

    def persist(self, path) -> None:
        with self._lock:
            body = self._body_bytes()
            header = _HEADER.pack(
                MAGIC, FORMAT_VERSION, self._dim, self._count, zlib.crc32(body)
            )
        with open(path, "wb") as fh:
            fh.write(header)
            fh.write(body)

    @classmethod
    def load(cls, path) -> "VectorIndex":
        """Load a persisted index; answers queries bit-identically."""
        with open(path, "rb") as fh:
            raw_header = fh.read(_HEADER.size)
            if len(raw_header) != _HEADER.size:
                raise CorruptFile("file too short for header")
            magic, version, dim, count, checksum = _HEADER.unpack(raw_header)
            if magic != MAGIC:
                raise CorruptFile("bad magic: not an index file")
            if version != FORMAT_VERSION:
                raise VersionMismatch(f"index format v{version}, expected v{FORMAT_VERSION}")
            body = fh.read()
        if zlib.crc32(body) != checksum:
            raise CorruptFile("checksum mismatch (truncated or corrupted file)")

        index = cls(dim)
        offset = 0
        ids = []
        for _ in range(count):
            if offset + 2 > len(body):
                raise CorruptFile("id table truncated")
            (id_len,) = struct.unpack_from("<H", body, offset)
            offset += 2
            ids.append(body[offset : offset + id_len].decode("utf-8"))
            offset += id_len
        vec_bytes = 4 * dim * count
        if offset + vec_bytes + 8 > len(body):
            raise CorruptFile("vector block truncated")
        vectors = np.frombuffer(
            body, dtype="<f4", count=dim * count, offset=offset
        ).reshape(count, dim)
        offset += vec_bytes
        (meta_len,) = struct.unpack_from("<Q", body, offset)
        offset += 8
        metadata = json.loads(body[offset : offset + meta_len].decode("utf-8"))
        if len(metadata) != count:
            raise CorruptFile("metadata block does not match record count")

        index._buffer = np.ascontiguousarray(vectors, dtype=np.float32).copy()
        if count == 0:
            index._buffer = np.zeros((16, dim), dtype=np.float32)
        index._count = count
        index._ids = ids
        index._id_pos = {rid: i for i, rid in enumerate(ids)}
        index._metadata = list(metadata)
        return index
