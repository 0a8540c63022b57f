"""Exception taxonomy for the screening engine.

Grouped by subsystem; everything derives from :class:`ResumeScreenError` so
callers can catch the whole family at the CLI boundary. Exceptions carry the
structured fields tests and batch failure records need (category names,
offending values, byte offsets, attempt counts) instead of burying them in
the message string.
"""

from __future__ import annotations


class ResumeScreenError(Exception):
    """Base class for every error raised by this package."""


# ------------------------------------------------------------------
# Domain model
# ------------------------------------------------------------------

class DomainValidationError(ResumeScreenError):
    """A domain type invariant was violated."""


class WrongArityError(DomainValidationError):
    """A raw score list did not have exactly five entries."""

    def __init__(self, got: int) -> None:
        super().__init__(f"score vector needs exactly 5 entries, got {got}")
        self.got = got


class OutOfBoundsError(DomainValidationError):
    """A category score fell outside its closed bound."""

    def __init__(self, category: str, value: float, low: float, high: float) -> None:
        super().__init__(
            f"score {value!r} for {category!r} outside [{low}, {high}]"
        )
        self.category = category
        self.value = value
        self.low = low
        self.high = high


class NonFiniteError(DomainValidationError):
    """A category score was NaN or infinite."""

    def __init__(self, category: str, value: float) -> None:
        super().__init__(f"score for {category!r} is not finite: {value!r}")
        self.category = category
        self.value = value


# ------------------------------------------------------------------
# LLM gateway
# ------------------------------------------------------------------

class GatewayError(ResumeScreenError):
    """Base for chat/embedding provider failures."""


class TransportError(GatewayError):
    """HTTP-level failure that survived all retries."""

    def __init__(self, status: int | None, body: str, attempts: int) -> None:
        super().__init__(
            f"provider request failed after {attempts} attempt(s): "
            f"status={status} body={body[:200]!r}"
        )
        self.status = status
        self.body = body
        self.attempts = attempts


class GatewayTimeoutError(GatewayError):
    """The provider did not answer within the configured timeout."""

    def __init__(self, timeout: float, attempts: int) -> None:
        super().__init__(f"provider timed out after {timeout}s ({attempts} attempt(s))")
        self.timeout = timeout
        self.attempts = attempts


class AuthMissingError(GatewayError):
    """The configured API-key environment variable is unset or empty."""

    def __init__(self, env_var: str) -> None:
        super().__init__(f"environment variable {env_var!r} is not set")
        self.env_var = env_var


class MockScriptMissingError(GatewayError):
    """The mock provider has no scripted reply for a prompt digest."""

    def __init__(self, digest: str, prompt_head: str) -> None:
        super().__init__(
            f"no scripted reply for digest {digest}; prompt starts: {prompt_head!r}"
        )
        self.digest = digest
        self.prompt_head = prompt_head


# ------------------------------------------------------------------
# Knowledge store
# ------------------------------------------------------------------

class StoreError(ResumeScreenError):
    """Base for knowledge-store failures."""


class DimensionMismatchError(StoreError):
    """Two vectors (or a vector and the store) disagree on dimension/model."""

    def __init__(self, detail: str) -> None:
        super().__init__(detail)


class ZeroVectorError(StoreError):
    """Cosine similarity is undefined for an all-zero vector."""


class StoreFormatError(StoreError):
    """A persisted store file is corrupt or truncated."""

    def __init__(self, detail: str, offset: int) -> None:
        super().__init__(f"{detail} (at byte offset {offset})")
        self.offset = offset


class UnsupportedVersionError(StoreError):
    """A persisted store file declares a format version we cannot read."""

    def __init__(self, found: int, supported: int) -> None:
        super().__init__(f"store file version {found} not supported (expected {supported})")
        self.found = found
        self.supported = supported


# ------------------------------------------------------------------
# Agent pipeline
# ------------------------------------------------------------------

class AgentError(ResumeScreenError):
    """Base for agent-stage failures; carries the stage name."""

    stage = "agent"


class ExtractionParseError(AgentError):
    """Extractor replies stayed unparseable after all repair attempts."""

    stage = "extract"

    def __init__(self, attempts: int, last_response: str,
                 transcripts: tuple = ()) -> None:
        super().__init__(
            f"extraction output unparseable after {attempts} attempt(s)"
        )
        self.attempts = attempts
        self.last_response = last_response
        self.transcripts = transcripts


class EvaluationParseError(AgentError):
    """Evaluator replies never yielded an in-bounds five-score array."""

    stage = "evaluate"

    def __init__(self, detail: str, last_response: str,
                 transcripts: tuple = ()) -> None:
        super().__init__(detail)
        self.last_response = last_response
        self.transcripts = transcripts


class FormatterParseError(AgentError):
    """No five-element numeric array could be located in a response."""

    stage = "format"

    def __init__(self, text: str) -> None:
        super().__init__(f"no 5-element numeric array found in: {text[:200]!r}")
        self.text = text


class SummarizationError(AgentError):
    """A summarizer sub-agent failed; partial views are preserved."""

    stage = "summarize"

    def __init__(self, detail: str, partial_views: dict[str, str],
                 transcripts: tuple = ()) -> None:
        super().__init__(detail)
        self.partial_views = partial_views
        self.transcripts = transcripts


class ScreeningError(ResumeScreenError):
    """Wraps the first unrecoverable agent error for one resume.

    ``screen_batch`` converts this into a structured failure record so the
    rest of the batch continues.
    """

    def __init__(self, resume_id: str, stage: str, cause: Exception, transcripts: tuple) -> None:
        super().__init__(f"screening {resume_id!r} failed at {stage}: {cause}")
        self.resume_id = resume_id
        self.stage = stage
        self.cause = cause
        self.transcripts = transcripts


# ------------------------------------------------------------------
# Evaluation harness
# ------------------------------------------------------------------

class MetricsError(ResumeScreenError):
    """Base for metric computation failures."""


class LengthMismatchError(MetricsError):
    def __init__(self, nx: int, ny: int) -> None:
        super().__init__(f"series lengths differ: {nx} vs {ny}")
        self.nx = nx
        self.ny = ny


class DegenerateSeriesError(MetricsError):
    """Correlation is undefined for a constant series."""


class EmptyInputError(MetricsError):
    """An operation requiring records received none."""


class InsufficientDataError(MetricsError):
    """A percentile subset is too small for correlation."""

    def __init__(self, percentile: float, n: int, needed: int = 3) -> None:
        super().__init__(
            f"percentile {percentile} subset has {n} record(s), needs >= {needed}"
        )
        self.percentile = percentile
        self.n = n
        self.needed = needed


# ------------------------------------------------------------------
# Prompt templates
# ------------------------------------------------------------------

class TemplateError(ResumeScreenError):
    """Base for prompt-template failures."""


class TemplateNotFoundError(TemplateError):
    def __init__(self, name: str, where: str) -> None:
        super().__init__(f"template {name!r} not found in {where}")
        self.name = name
        self.where = where


class UnknownPlaceholderError(TemplateError):
    def __init__(self, placeholder: str, template: str) -> None:
        super().__init__(
            f"template {template!r} references unknown placeholder {{{placeholder}}}"
        )
        self.placeholder = placeholder
        self.template = template


# ------------------------------------------------------------------
# Configuration / CLI
# ------------------------------------------------------------------

class ConfigError(ResumeScreenError):
    """Invalid or unresolvable application configuration."""
