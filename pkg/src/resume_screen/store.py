"""Knowledge store: criteria ingestion, dense retrieval, persistence.

External criteria documents (hiring rubrics, certification lists, university
rankings, summaries of past outstanding hires) are chunked, embedded, and
scanned exhaustively at query time. An exhaustive scan is exact and, at the
hundreds-of-chunks scale of criteria corpora, faster to build and reason
about than any approximate index.

Retrieval keeps every chunk whose cosine similarity clears the relevance
threshold (inclusive), sorts by similarity descending with chunk-id
tiebreak, and truncates to the optional top-k cap.

Persistence is a single versioned binary file: a header (magic, version,
dimension, embedding model id, chunk count) followed by length-prefixed
chunk records with little-endian float32 embeddings. Embeddings are rounded
to float32 at insert so the in-memory store and its file round-trip
bit-exactly.
"""

from __future__ import annotations

import logging
import os
import struct
import tempfile
from array import array
from dataclasses import dataclass
from pathlib import Path

from . import _kernels as kernels
from .chunking import chunk_spans
from .errors import (
    DimensionMismatchError,
    DomainValidationError,
    StoreFormatError,
    UnsupportedVersionError,
    ZeroVectorError,
)
from .gateway import EmbeddingVector

logger = logging.getLogger(__name__)

_MAGIC = b"RSKS"
_VERSION = 1


@dataclass(frozen=True)
class SourceDocument:
    """One external criteria document to ingest."""

    doc_id: str
    title: str
    body: str
    tags: tuple[str, ...] = ()

    def __post_init__(self) -> None:
        if not self.doc_id:
            raise DomainValidationError("doc_id must be non-empty")
        if not self.body.strip():
            raise DomainValidationError(f"document {self.doc_id!r} has an empty body")
        object.__setattr__(self, "tags", tuple(self.tags))


@dataclass(frozen=True)
class KnowledgeChunk:
    """A contiguous slice of a source document, plus its embedding once indexed."""

    chunk_id: str
    doc_id: str
    text: str
    char_span: tuple[int, int]
    embedding: EmbeddingVector | None = None

    def __post_init__(self) -> None:
        if not self.text:
            raise DomainValidationError(f"chunk {self.chunk_id!r} has empty text")
        start, end = self.char_span
        if not (0 <= start < end):
            raise DomainValidationError(f"chunk {self.chunk_id!r} has invalid span {self.char_span}")


@dataclass(frozen=True)
class RetrievalConfig:
    """Chunking and retrieval knobs.

    ``tau`` is the inclusive relevance threshold (default 0.3). ``top_k_cap``
    bounds the retrieved context; set it to ``None`` to disable the cap and
    apply the threshold rule literally.
    """

    tau: float = 0.3
    top_k_cap: int | None = 8
    chunk_size_chars: int = 800
    chunk_overlap_chars: int = 120

    def __post_init__(self) -> None:
        if not -1.0 <= self.tau <= 1.0:
            raise DomainValidationError(f"tau must be in [-1, 1], got {self.tau}")
        if self.top_k_cap is not None and self.top_k_cap < 1:
            raise DomainValidationError(f"top_k_cap must be positive or None, got {self.top_k_cap}")
        if self.chunk_size_chars < 1:
            raise DomainValidationError("chunk_size_chars must be positive")
        if not 0 <= self.chunk_overlap_chars < self.chunk_size_chars:
            raise DomainValidationError("chunk overlap must be in [0, chunk_size)")


@dataclass(frozen=True)
class RetrievalResult:
    """Chunks that cleared the threshold, ordered by similarity descending."""

    chunks: tuple[tuple[KnowledgeChunk, float], ...]
    query_text: str

    def __len__(self) -> int:
        return len(self.chunks)

    def chunk_ids(self) -> list[str]:
        return [chunk.chunk_id for chunk, _ in self.chunks]


def cosine_similarity(a: EmbeddingVector, b: EmbeddingVector) -> float:
    """Cosine similarity of two comparable embeddings.

    Raises DimensionMismatchError when dimensions or model ids differ and
    ZeroVectorError when either vector is all-zero.
    """
    if a.dim != b.dim:
        raise DimensionMismatchError(f"dimensions differ: {a.dim} vs {b.dim}")
    if a.model_id != b.model_id:
        raise DimensionMismatchError(
            f"embedding models differ: {a.model_id!r} vs {b.model_id!r}"
        )
    if a.is_zero() or b.is_zero():
        raise ZeroVectorError("cosine similarity undefined for a zero vector")
    return kernels.cosine(array("d", a.values), array("d", b.values))


def chunk_document(doc: SourceDocument, cfg: RetrievalConfig) -> list[KnowledgeChunk]:
    """Split a document into chunks (embeddings not yet attached).

    Chunk ids are ``{doc_id}#{index:04d}`` so the documented ascending-id
    tiebreak is also document order.
    """
    spans = chunk_spans(doc.body, cfg.chunk_size_chars, cfg.chunk_overlap_chars)
    return [
        KnowledgeChunk(
            chunk_id=f"{doc.doc_id}#{i:04d}",
            doc_id=doc.doc_id,
            text=doc.body[start:end],
            char_span=(start, end),
        )
        for i, (start, end) in enumerate(spans)
    ]


def _to_float32(vec: EmbeddingVector) -> EmbeddingVector:
    """Round an embedding to float32 precision (the storage format)."""
    return EmbeddingVector(values=tuple(array("f", vec.values)), model_id=vec.model_id)


class KnowledgeStore:
    """In-memory chunk index with exhaustive cosine scan.

    Concurrent ``retrieve`` calls are safe; ``index``/``save``/``load``
    require exclusive access (the screening pipeline only reads).
    """

    def __init__(self, gateway, dim: int | None = None, model_id: str | None = None) -> None:
        self._gateway = gateway
        self._dim = dim if dim is not None else gateway.embedding_dim
        self._model_id = model_id if model_id is not None else gateway.embedding_model
        self._docs: dict[str, list[KnowledgeChunk]] = {}
        self._ordered: list[KnowledgeChunk] = []
        self._matrix: array = array("f")
        self._norms: array = array("d")
        self._dirty = False

    def __len__(self) -> int:
        return sum(len(chunks) for chunks in self._docs.values())

    @property
    def dim(self) -> int:
        return self._dim

    @property
    def model_id(self) -> str:
        return self._model_id

    def chunks(self) -> list[KnowledgeChunk]:
        """All chunks, grouped by document in insertion order."""
        return [chunk for chunks in self._docs.values() for chunk in chunks]

    # ------------------------------------------------------------------
    # Ingestion
    # ------------------------------------------------------------------

    def index(self, doc: SourceDocument, cfg: RetrievalConfig) -> int:
        """Chunk, embed, and insert a document; returns the chunk count.

        Re-indexing an existing doc_id replaces its chunks atomically: all
        embeddings are fetched before anything is committed, so a gateway
        failure partway through leaves the store unchanged.
        """
        drafts = chunk_document(doc, cfg)
        staged: list[KnowledgeChunk] = []
        for draft in drafts:
            embedding = _to_float32(self._gateway.embed(draft.text))
            self._check_embedding(embedding)
            staged.append(
                KnowledgeChunk(
                    chunk_id=draft.chunk_id,
                    doc_id=draft.doc_id,
                    text=draft.text,
                    char_span=draft.char_span,
                    embedding=embedding,
                )
            )
        self._docs[doc.doc_id] = staged
        self._dirty = True
        logger.debug("indexed %s: %d chunk(s)", doc.doc_id, len(staged))
        return len(staged)

    def _check_embedding(self, embedding: EmbeddingVector) -> None:
        if embedding.dim != self._dim:
            raise DimensionMismatchError(
                f"embedding dim {embedding.dim} does not match store dim {self._dim}"
            )
        if embedding.model_id != self._model_id:
            raise DimensionMismatchError(
                f"embedding model {embedding.model_id!r} does not match "
                f"store model {self._model_id!r}"
            )

    def _rebuild(self) -> None:
        self._ordered = self.chunks()
        matrix = array("f")
        for chunk in self._ordered:
            matrix.extend(chunk.embedding.values)
        self._matrix = matrix
        self._norms = kernels.row_norms(matrix, self._dim) if self._ordered else array("d")
        self._dirty = False

    # ------------------------------------------------------------------
    # Retrieval
    # ------------------------------------------------------------------

    def retrieve(self, query_text: str, cfg: RetrievalConfig) -> RetrievalResult:
        """Threshold-filtered similarity search over every indexed chunk.

        Embeds the query, scores all chunks, keeps similarities >= tau
        (inclusive), sorts descending with ascending chunk_id breaking ties,
        and truncates to the cap. Chunks whose stored embedding is the zero
        vector are never retrievable.
        """
        if not query_text.strip():
            raise DomainValidationError("query_text must be non-empty")
        if self._dirty:
            self._rebuild()
        if not self._ordered:
            return RetrievalResult(chunks=(), query_text=query_text)
        query = self._gateway.embed(query_text)
        self._check_embedding(query)
        if query.is_zero():
            raise ZeroVectorError("query embedded to the zero vector")
        sims = kernels.scan_scores(
            array("d", query.values), self._matrix, self._norms, self._dim
        )
        kept = [
            (chunk, sim)
            for chunk, sim in zip(self._ordered, sims)
            if sim == sim and sim >= cfg.tau  # NaN marks zero-norm rows
        ]
        kept.sort(key=lambda pair: (-pair[1], pair[0].chunk_id))
        if cfg.top_k_cap is not None:
            kept = kept[: cfg.top_k_cap]
        return RetrievalResult(chunks=tuple(kept), query_text=query_text)

    # ------------------------------------------------------------------
    # Persistence
    # ------------------------------------------------------------------

    def save(self, path: str | Path) -> None:
        """Write the versioned binary store file (atomic rename)."""
        path = Path(path)
        model_bytes = self._model_id.encode("utf-8")
        chunks = self.chunks()
        fd, tmp_name = tempfile.mkstemp(dir=path.parent or Path("."), suffix=".tmp")
        try:
            with os.fdopen(fd, "wb") as fh:
                fh.write(_MAGIC)
                fh.write(struct.pack("<II", _VERSION, self._dim))
                fh.write(struct.pack("<H", len(model_bytes)))
                fh.write(model_bytes)
                fh.write(struct.pack("<I", len(chunks)))
                for chunk in chunks:
                    _write_str(fh, chunk.doc_id)
                    _write_str(fh, chunk.chunk_id)
                    fh.write(struct.pack("<II", *chunk.char_span))
                    text = chunk.text.encode("utf-8")
                    fh.write(struct.pack("<I", len(text)))
                    fh.write(text)
                    fh.write(struct.pack(f"<{self._dim}f", *chunk.embedding.values))
            os.replace(tmp_name, path)
        except BaseException:
            if os.path.exists(tmp_name):
                os.unlink(tmp_name)
            raise

    @classmethod
    def load(cls, path: str | Path, gateway) -> "KnowledgeStore":
        """Read a store file; corrupt or truncated input raises with the offset."""
        data = Path(path).read_bytes()
        reader = _Reader(data)
        magic = reader.take(4, "magic")
        if magic != _MAGIC:
            raise StoreFormatError(f"bad magic {magic!r}", 0)
        version, dim = reader.unpack("<II", "header")
        if version != _VERSION:
            raise UnsupportedVersionError(version, _VERSION)
        model_id = reader.string16("model_id")
        (count,) = reader.unpack("<I", "chunk count")
        store = cls(gateway, dim=dim, model_id=model_id)
        docs: dict[str, list[KnowledgeChunk]] = {}
        for _ in range(count):
            doc_id = reader.string16("doc_id")
            chunk_id = reader.string16("chunk_id")
            start, end = reader.unpack("<II", "char_span")
            (text_len,) = reader.unpack("<I", "text length")
            text = reader.take(text_len, "text").decode("utf-8")
            values = reader.unpack(f"<{dim}f", "embedding")
            chunk = KnowledgeChunk(
                chunk_id=chunk_id,
                doc_id=doc_id,
                text=text,
                char_span=(start, end),
                embedding=EmbeddingVector(values=values, model_id=model_id),
            )
            docs.setdefault(doc_id, []).append(chunk)
        if reader.remaining():
            raise StoreFormatError(
                f"{reader.remaining()} trailing byte(s) after last chunk", reader.offset
            )
        store._docs = docs
        store._dirty = True
        return store


def _write_str(fh, value: str) -> None:
    raw = value.encode("utf-8")
    fh.write(struct.pack("<H", len(raw)))
    fh.write(raw)


class _Reader:
    """Byte-offset-tracking reader so parse errors can name the position."""

    def __init__(self, data: bytes) -> None:
        self._data = data
        self.offset = 0

    def take(self, n: int, what: str) -> bytes:
        if self.offset + n > len(self._data):
            raise StoreFormatError(f"truncated while reading {what}", self.offset)
        out = self._data[self.offset : self.offset + n]
        self.offset += n
        return out

    def unpack(self, fmt: str, what: str) -> tuple:
        size = struct.calcsize(fmt)
        return struct.unpack(fmt, self.take(size, what))

    def string16(self, what: str) -> str:
        (length,) = self.unpack("<H", what)
        raw = self.take(length, what)
        try:
            return raw.decode("utf-8")
        except UnicodeDecodeError as exc:
            raise StoreFormatError(f"invalid UTF-8 in {what}", self.offset) from exc

    def remaining(self) -> int:
        return len(self._data) - self.offset
