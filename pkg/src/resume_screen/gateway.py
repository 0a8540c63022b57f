"""Uniform chat/embedding provider interface.

Two backends behind one surface:

* :class:`HttpGateway`: OpenAI-compatible wire protocol (POST
  ``{base_url}/chat/completions`` and ``{base_url}/embeddings`` with a
  bearer token), retrying transient transport failures with exponential
  backoff. Works against hosted aggregators and local runtimes alike.
* :class:`MockGateway`: fully offline and deterministic. Chat replies come
  from a scripts file mapping prompt digests to canned text; embeddings are
  feature-hashed bags of tokens (see :func:`mock_embed`), so identical text
  always yields bit-identical vectors.

API keys are read only from the environment variable named in the config,
never from config file values.
"""

from __future__ import annotations

import hashlib
import json
import logging
import math
import os
import re
import threading
import time
from dataclasses import dataclass
from pathlib import Path
from typing import Mapping
from urllib.parse import urlparse

import requests

from .errors import (
    AuthMissingError,
    ConfigError,
    DomainValidationError,
    GatewayTimeoutError,
    MockScriptMissingError,
    TransportError,
)

logger = logging.getLogger(__name__)

DEFAULT_EMBEDDING_DIM = 256

# FNV-1a 64-bit parameters; the offset basis doubles as the documented hash
# seed for the mock embedding's token->bucket assignment.
_FNV_OFFSET = 0xCBF29CE484222325
_FNV_PRIME = 0x100000001B3
_TOKEN_SPLIT = re.compile(r"[^0-9a-z]+")

_RETRYABLE_STATUS = {408, 429, 500, 502, 503, 504}
_BACKOFF_BASE = 0.5


@dataclass(frozen=True)
class ChatRequest:
    """One chat-completion call: fixed system role plus the user payload."""

    system_prompt: str
    user_prompt: str
    model_id: str
    temperature: float = 0.0
    max_tokens: int = 1024

    def __post_init__(self) -> None:
        if not self.system_prompt.strip() or not self.user_prompt.strip():
            raise DomainValidationError("chat prompts must be non-empty")
        if self.temperature < 0:
            raise DomainValidationError(f"temperature must be >= 0, got {self.temperature}")
        if self.max_tokens < 1:
            raise DomainValidationError(f"max_tokens must be positive, got {self.max_tokens}")


@dataclass(frozen=True)
class EmbeddingVector:
    """Fixed-length dense vector tagged with the model that produced it.

    Vectors are only comparable when both the dimension and model_id match.
    """

    values: tuple[float, ...]
    model_id: str

    def __post_init__(self) -> None:
        object.__setattr__(self, "values", tuple(float(v) for v in self.values))
        if not self.values:
            raise DomainValidationError("embedding must have at least one dimension")
        for v in self.values:
            if not math.isfinite(v):
                raise DomainValidationError("embedding contains a non-finite value")

    @property
    def dim(self) -> int:
        return len(self.values)

    def is_zero(self) -> bool:
        return all(v == 0.0 for v in self.values)


@dataclass(frozen=True)
class ProviderConfig:
    """Connection settings for one provider endpoint.

    ``base_url`` with a ``mock:`` scheme selects the offline provider; its
    path (or ``mock_scripts``) points at the scripts file.
    """

    base_url: str
    api_key_env_var: str = "RESUME_SCREEN_API_KEY"
    chat_model: str = "mock-chat"
    embedding_model: str = "mock-embed"
    timeout: float = 30.0
    max_retries: int = 2
    embedding_dim: int = DEFAULT_EMBEDDING_DIM
    max_concurrency: int = 4
    mock_scripts: str | None = None

    def __post_init__(self) -> None:
        if self.max_retries < 0:
            raise ConfigError(f"max_retries must be >= 0, got {self.max_retries}")
        if self.timeout <= 0:
            raise ConfigError(f"timeout must be positive, got {self.timeout}")
        if self.embedding_dim < 1:
            raise ConfigError(f"embedding_dim must be positive, got {self.embedding_dim}")
        if self.max_concurrency < 1:
            raise ConfigError(f"max_concurrency must be >= 1, got {self.max_concurrency}")
        parsed = urlparse(self.base_url)
        if not parsed.scheme:
            raise ConfigError(f"base_url is not a well-formed URL: {self.base_url!r}")
        if not self.is_mock and not parsed.netloc:
            raise ConfigError(f"base_url is not a well-formed URL: {self.base_url!r}")

    @property
    def is_mock(self) -> bool:
        return urlparse(self.base_url).scheme == "mock"

    def scripts_path(self) -> str | None:
        if self.mock_scripts:
            return self.mock_scripts
        parsed = urlparse(self.base_url)
        path = (parsed.netloc + parsed.path) if parsed.netloc else parsed.path
        return path or None


def prompt_digest(system_prompt: str, user_prompt: str) -> str:
    """Stable digest keying scripted mock replies.

    SHA-256 over ``system_prompt + "\\x1e" + user_prompt`` (UTF-8); the
    record separator keeps (a, bc) and (ab, c) distinct.
    """
    payload = system_prompt + "\x1e" + user_prompt
    return hashlib.sha256(payload.encode("utf-8")).hexdigest()


def _bucket(token: str) -> int:
    h = _FNV_OFFSET
    for byte in token.encode("utf-8"):
        h ^= byte
        h = (h * _FNV_PRIME) & 0xFFFFFFFFFFFFFFFF
    return h


def mock_embed(text: str, dim: int = DEFAULT_EMBEDDING_DIM, model_id: str = "mock-embed") -> EmbeddingVector:
    """Feature-hashed bag-of-tokens embedding.

    Lowercase, split on non-alphanumeric runs, FNV-1a-hash each token onto
    one of ``dim`` buckets, accumulate counts, then L2-normalize. A text with
    no tokens yields the zero vector. Deterministic across runs and
    platforms; whitespace-only differences never change the vector.
    """
    counts = [0.0] * dim
    for token in _TOKEN_SPLIT.split(text.lower()):
        if token:
            counts[_bucket(token) % dim] += 1.0
    total = math.sqrt(math.fsum(c * c for c in counts))
    if total == 0.0:
        return EmbeddingVector(values=tuple(counts), model_id=model_id)
    return EmbeddingVector(values=tuple(c / total for c in counts), model_id=model_id)


def token_bucket(token: str, dim: int) -> int:
    """Bucket a single token exactly as :func:`mock_embed` does."""
    return _bucket(token) % dim


class MockGateway:
    """Offline provider: scripted chat, feature-hashed embeddings.

    Call counters let tests assert that a mock-configured run touches the
    network zero times.
    """

    def __init__(self, scripts: Mapping[str, str] | None = None,
                 embedding_dim: int = DEFAULT_EMBEDDING_DIM,
                 embedding_model: str = "mock-embed") -> None:
        self._scripts = dict(scripts or {})
        self._dim = embedding_dim
        self._model = embedding_model
        self._lock = threading.Lock()
        self.chat_calls = 0
        self.embed_calls = 0

    @classmethod
    def from_file(cls, path: str | Path, embedding_dim: int = DEFAULT_EMBEDDING_DIM,
                  embedding_model: str = "mock-embed") -> "MockGateway":
        try:
            raw = json.loads(Path(path).read_text(encoding="utf-8"))
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot load mock scripts from {path}: {exc}") from exc
        if not isinstance(raw, dict):
            raise ConfigError(f"mock scripts file {path} must hold a JSON object")
        return cls(raw, embedding_dim=embedding_dim, embedding_model=embedding_model)

    @property
    def embedding_dim(self) -> int:
        return self._dim

    @property
    def embedding_model(self) -> str:
        return self._model

    def add_script(self, digest: str, reply: str) -> None:
        self._scripts[digest] = reply

    def chat(self, req: ChatRequest) -> str:
        with self._lock:
            self.chat_calls += 1
        digest = prompt_digest(req.system_prompt, req.user_prompt)
        try:
            return self._scripts[digest]
        except KeyError:
            raise MockScriptMissingError(digest, req.user_prompt[:120]) from None

    def embed(self, text: str) -> EmbeddingVector:
        if not text:
            raise DomainValidationError("cannot embed empty text")
        with self._lock:
            self.embed_calls += 1
        return mock_embed(text, dim=self._dim, model_id=self._model)


class HttpGateway:
    """OpenAI-compatible HTTP provider with bounded retries and concurrency."""

    def __init__(self, config: ProviderConfig, session: requests.Session | None = None) -> None:
        if config.is_mock:
            raise ConfigError("HttpGateway cannot serve a mock base_url")
        self._config = config
        self._session = session or requests.Session()
        self._semaphore = threading.Semaphore(config.max_concurrency)

    @property
    def embedding_dim(self) -> int:
        return self._config.embedding_dim

    @property
    def embedding_model(self) -> str:
        return self._config.embedding_model

    def chat(self, req: ChatRequest) -> str:
        body = {
            "model": req.model_id,
            "messages": [
                {"role": "system", "content": req.system_prompt},
                {"role": "user", "content": req.user_prompt},
            ],
            "temperature": req.temperature,
            "max_tokens": req.max_tokens,
        }
        data = self._post("/chat/completions", body)
        try:
            return str(data["choices"][0]["message"]["content"])
        except (KeyError, IndexError, TypeError) as exc:
            raise TransportError(None, f"malformed chat response: {data!r}", 1) from exc

    def embed(self, text: str) -> EmbeddingVector:
        if not text:
            raise DomainValidationError("cannot embed empty text")
        body = {"model": self._config.embedding_model, "input": text}
        data = self._post("/embeddings", body)
        try:
            values = data["data"][0]["embedding"]
        except (KeyError, IndexError, TypeError) as exc:
            raise TransportError(None, f"malformed embedding response: {data!r}", 1) from exc
        return EmbeddingVector(values=tuple(values), model_id=self._config.embedding_model)

    # ------------------------------------------------------------------
    # Transport
    # ------------------------------------------------------------------

    def _auth_header(self) -> dict[str, str]:
        key = os.environ.get(self._config.api_key_env_var, "").strip()
        if not key:
            raise AuthMissingError(self._config.api_key_env_var)
        return {"Authorization": f"Bearer {key}"}

    def _post(self, endpoint: str, body: dict) -> dict:
        url = self._config.base_url.rstrip("/") + endpoint
        headers = {"Content-Type": "application/json", **self._auth_header()}
        attempts = self._config.max_retries + 1
        last_status: int | None = None
        last_body = ""
        timed_out = False
        for attempt in range(attempts):
            if attempt:
                time.sleep(_BACKOFF_BASE * (2 ** (attempt - 1)))
            try:
                with self._semaphore:
                    response = self._session.post(
                        url, headers=headers, json=body, timeout=self._config.timeout
                    )
            except requests.Timeout:
                timed_out = True
                logger.warning("timeout talking to %s (attempt %d/%d)", url, attempt + 1, attempts)
                continue
            except requests.RequestException as exc:
                last_status, last_body, timed_out = None, str(exc), False
                logger.warning("transport error to %s (attempt %d/%d): %s",
                               url, attempt + 1, attempts, exc)
                continue
            if response.status_code in _RETRYABLE_STATUS:
                last_status, last_body, timed_out = response.status_code, response.text, False
                logger.warning("retryable status %d from %s (attempt %d/%d)",
                               response.status_code, url, attempt + 1, attempts)
                continue
            if response.status_code >= 400:
                raise TransportError(response.status_code, response.text, attempt + 1)
            try:
                return response.json()
            except ValueError as exc:
                raise TransportError(response.status_code, response.text, attempt + 1) from exc
        if timed_out:
            raise GatewayTimeoutError(self._config.timeout, attempts)
        raise TransportError(last_status, last_body, attempts)


def make_gateway(config: ProviderConfig) -> MockGateway | HttpGateway:
    """Build the gateway the config calls for; mock configs never touch HTTP."""
    if config.is_mock:
        scripts_path = config.scripts_path()
        if scripts_path:
            return MockGateway.from_file(
                scripts_path,
                embedding_dim=config.embedding_dim,
                embedding_model=config.embedding_model,
            )
        return MockGateway(
            embedding_dim=config.embedding_dim, embedding_model=config.embedding_model
        )
    return HttpGateway(config)
