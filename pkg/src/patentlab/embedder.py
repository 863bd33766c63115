"""Text embedding providers, persistent cache, and cosine distance.

The mock provider hashes tokens into a fixed vocabulary space and projects
term counts through a seeded random matrix, so vectors are deterministic
and stable across machines. The remote client speaks the JSON-over-HTTP
embeddings protocol (POST /v1/embeddings) with bounded retries.
"""

from __future__ import annotations

import hashlib
import os
import re
import struct
import threading
import time
from dataclasses import dataclass

import httpx
import numpy as np

EMBED_DIM = 1536
TITLE_ABSTRACT_SEPARATOR = "\n"

_VOCAB_DIM = 4096
_PROJECTION_SEED = 271828
_TOKEN_RE = re.compile(r"[a-z0-9]+")

# Remote inputs beyond this many UTF-8 bytes are truncated and counted.
MAX_INPUT_BYTES = 16000


class EmbeddingError(Exception):
    """Base error for embedding providers."""


class TransportError(EmbeddingError):
    """Network-level failure after exhausting retries."""


class ProviderStatusError(EmbeddingError):
    """Provider returned a non-2xx status."""

    def __init__(self, status_code: int, detail: str = ""):
        self.status_code = status_code
        super().__init__(f"provider returned status {status_code}: {detail}")


class DimensionError(EmbeddingError):
    """Provider returned a vector of unexpected length."""


class CacheIntegrityError(EmbeddingError):
    """Cache file contents are inconsistent; never silently recomputed."""


@dataclass(frozen=True)
class Embedding:
    values: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.values, dtype=np.float32)
        if v.shape != (EMBED_DIM,):
            raise DimensionError(f"expected {EMBED_DIM} values, got shape {v.shape}")
        if not np.all(np.isfinite(v)):
            raise EmbeddingError("embedding contains non-finite entries")
        if float(np.dot(v.astype(np.float64), v.astype(np.float64))) == 0.0:
            raise EmbeddingError("embedding has zero norm")
        object.__setattr__(self, "values", v)


def build_request(title: str, abstract: str) -> str:
    """Combine title and abstract into one embedding input."""
    text = (title + TITLE_ABSTRACT_SEPARATOR + abstract).strip()
    if not text:
        raise ValueError("empty text after trim")
    return text


def cosine_distance(a: Embedding, b: Embedding) -> float:
    """1 - cos(a, b), in [0, 2]; zero-norm inputs are rejected upstream."""
    va = a.values.astype(np.float64)
    vb = b.values.astype(np.float64)
    if np.array_equal(va, vb):
        return 0.0
    na2 = float(np.dot(va, va))
    nb2 = float(np.dot(vb, vb))
    if na2 == 0.0 or nb2 == 0.0:
        raise EmbeddingError("cosine distance of zero-norm vector")
    cos = float(np.dot(va, vb)) / (np.sqrt(na2) * np.sqrt(nb2))
    return 1.0 - max(-1.0, min(1.0, cos))


def _tokens(text: str) -> list[str]:
    return _TOKEN_RE.findall(text.lower())


def _token_index(token: str) -> int:
    digest = hashlib.blake2b(token.encode("utf-8"), digest_size=8).digest()
    return int.from_bytes(digest, "little") % _VOCAB_DIM


_projection_lock = threading.Lock()
_projection: np.ndarray | None = None


def _projection_matrix() -> np.ndarray:
    global _projection
    with _projection_lock:
        if _projection is None:
            rng = np.random.default_rng(_PROJECTION_SEED)
            _projection = rng.standard_normal((_VOCAB_DIM, EMBED_DIM)).astype(np.float32)
        return _projection


class MockEmbedder:
    """Deterministic local provider: hashed term counts, random projection,
    unit norm. Never fails on valid (tokenizable) input."""

    def __init__(self):
        self.call_count = 0

    def embed(self, text: str) -> Embedding:
        if not text.strip():
            raise ValueError("empty text after trim")
        toks = _tokens(text)
        if not toks:
            raise EmbeddingError("text has no tokens")
        self.call_count += 1
        proj = _projection_matrix()
        vec = np.zeros(EMBED_DIM, dtype=np.float64)
        counts: dict[int, int] = {}
        for t in toks:
            idx = _token_index(t)
            counts[idx] = counts.get(idx, 0) + 1
        for idx in sorted(counts):
            vec += counts[idx] * proj[idx].astype(np.float64)
        norm = float(np.linalg.norm(vec))
        if norm == 0.0:
            raise EmbeddingError("degenerate token projection")
        return Embedding(values=(vec / norm).astype(np.float32))


class RemoteEmbedder:
    """Client for the JSON embeddings endpoint.

    Transient failures (transport errors, 429, 5xx) are retried a bounded
    number of times with exponential backoff and then surfaced as typed
    errors; there is no silent fallback to the mock.
    """

    def __init__(
        self,
        base_url: str | None = None,
        api_key: str | None = None,
        model: str = "text-embedding-ada-002",
        max_retries: int = 3,
        backoff_s: float = 0.5,
        timeout_s: float = 30.0,
        transport: httpx.BaseTransport | None = None,
    ):
        self.base_url = (base_url or os.environ.get("EMBED_API_URL", "")).rstrip("/")
        if not self.base_url:
            raise EmbeddingError("no base URL; set EMBED_API_URL or pass base_url")
        self.api_key = api_key or os.environ.get("EMBED_API_KEY", "")
        self.model = model
        self.max_retries = max_retries
        self.backoff_s = backoff_s
        self.call_count = 0
        self.n_truncated = 0
        self._client = httpx.Client(timeout=timeout_s, transport=transport)

    def close(self):
        self._client.close()

    def _truncate(self, text: str) -> str:
        raw = text.encode("utf-8")
        if len(raw) <= MAX_INPUT_BYTES:
            return text
        self.n_truncated += 1
        return raw[:MAX_INPUT_BYTES].decode("utf-8", errors="ignore")

    def embed(self, text: str) -> Embedding:
        if not text.strip():
            raise ValueError("empty text after trim")
        body = {"model": self.model, "input": self._truncate(text)}
        headers = {"Authorization": f"Bearer {self.api_key}"}
        last_exc: Exception | None = None
        for attempt in range(self.max_retries + 1):
            if attempt:
                time.sleep(self.backoff_s * 2 ** (attempt - 1))
            try:
                resp = self._client.post(f"{self.base_url}/v1/embeddings", json=body, headers=headers)
            except httpx.TransportError as exc:
                last_exc = exc
                continue
            if resp.status_code == 429 or resp.status_code >= 500:
                last_exc = ProviderStatusError(resp.status_code, resp.text[:200])
                continue
            if resp.status_code >= 300:
                raise ProviderStatusError(resp.status_code, resp.text[:200])
            self.call_count += 1
            try:
                values = resp.json()["data"][0]["embedding"]
            except (KeyError, IndexError, ValueError) as exc:
                raise EmbeddingError(f"malformed provider response: {exc}") from None
            if len(values) != EMBED_DIM:
                raise DimensionError(f"provider returned {len(values)} values, expected {EMBED_DIM}")
            return Embedding(values=np.asarray(values, dtype=np.float32))
        if isinstance(last_exc, ProviderStatusError):
            raise last_exc
        raise TransportError(f"transport failed after {self.max_retries + 1} attempts: {last_exc}")


_HASH_BYTES = 32
_RECORD_BYTES = _HASH_BYTES + EMBED_DIM * 4
_FLOAT_STRUCT = struct.Struct(f"<{EMBED_DIM}f")


def text_key(text: str) -> bytes:
    return hashlib.sha256(text.encode("utf-8")).digest()


class EmbeddingCache:
    """Content-addressed persistent cache.

    One append-only file of (sha256, 1536 little-endian float32) records;
    the in-memory index is rebuilt on open. A file length that is not a
    multiple of the record size is a corruption, reported loudly.
    """

    def __init__(self, path):
        self.path = str(path)
        self._lock = threading.Lock()
        self._index: dict[bytes, np.ndarray] = {}
        if os.path.exists(self.path):
            self._load()

    def _load(self):
        with open(self.path, "rb") as fh:
            blob = fh.read()
        if len(blob) % _RECORD_BYTES != 0:
            raise CacheIntegrityError(
                f"{self.path}: size {len(blob)} is not a multiple of the "
                f"{_RECORD_BYTES}-byte record"
            )
        for off in range(0, len(blob), _RECORD_BYTES):
            key = blob[off:off + _HASH_BYTES]
            vec = np.frombuffer(blob, dtype="<f4", count=EMBED_DIM, offset=off + _HASH_BYTES)
            self._index[key] = vec.copy()

    def __len__(self) -> int:
        return len(self._index)

    def get(self, text: str) -> Embedding | None:
        vec = self._index.get(text_key(text))
        return None if vec is None else Embedding(values=vec)

    def put(self, text: str, embedding: Embedding) -> None:
        key = text_key(text)
        record = key + _FLOAT_STRUCT.pack(*embedding.values.tolist())
        with self._lock:
            if key in self._index:
                return
            with open(self.path, "ab") as fh:
                fh.write(record)
            self._index[key] = embedding.values.copy()


def get_or_embed(text: str, cache: EmbeddingCache | None, provider) -> tuple[Embedding, bool]:
    """Cached embedding lookup; returns (embedding, cache_hit)."""
    if cache is not None:
        hit = cache.get(text)
        if hit is not None:
            return hit, True
    emb = provider.embed(text)
    if cache is not None:
        cache.put(text, emb)
    return emb, False
