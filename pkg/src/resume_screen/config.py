"""Application configuration: one YAML file describing a whole run.

The config never holds secrets. ``provider.api_key_env_var`` names the
environment variable the key is read from at call time; validation happens
entirely offline, before any network activity. Relative paths in the file
resolve against the config file's own directory, so a config travels with
its fixtures.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, replace
from pathlib import Path

import yaml

from .errors import ConfigError, DomainValidationError
from .gateway import ProviderConfig
from .models import SCORE_CATEGORIES, ScoringWeights
from .store import RetrievalConfig

logger = logging.getLogger(__name__)

_TOP_LEVEL_KEYS = {"provider", "retrieval", "weights", "mode", "paths", "concurrency"}
_WEIGHT_FIELDS = dict(zip(SCORE_CATEGORIES, ("w_self", "w_skills", "w_work", "w_basic", "w_education")))


@dataclass(frozen=True)
class AppConfig:
    """Validated run settings for the CLI."""

    provider: ProviderConfig
    retrieval: RetrievalConfig
    weights: ScoringWeights
    extraction: bool = True
    normalize_weights: bool = False
    discussion_rounds: int = 2
    store_path: Path = Path("criteria.store")
    template_dir: Path | None = None
    output_dir: Path = Path("out")
    concurrency: int = 4

    def __post_init__(self) -> None:
        if self.concurrency < 1:
            raise ConfigError(f"concurrency must be >= 1, got {self.concurrency}")
        if self.discussion_rounds < 2:
            raise ConfigError(
                f"mode.discussion_rounds must be >= 2, got {self.discussion_rounds}"
            )

    def effective_weights(self) -> ScoringWeights:
        """Weights as the pipeline should apply them for this run."""
        return self.weights.normalized() if self.normalize_weights else self.weights


def _require_map(raw: object, where: str) -> dict:
    if raw is None:
        return {}
    if not isinstance(raw, dict):
        raise ConfigError(f"{where} must be a mapping, got {type(raw).__name__}")
    return raw


def _reject_unknown(section: dict, allowed: set[str], where: str) -> None:
    unknown = sorted(set(section) - allowed)
    if unknown:
        raise ConfigError(f"unknown {where} key(s): {', '.join(unknown)}")


def _resolve(base: Path, value: str) -> Path:
    path = Path(value)
    return path if path.is_absolute() else (base / path)


def load_config(path: str | Path) -> AppConfig:
    """Parse and validate a YAML config file.

    Raises ConfigError with a key-specific message for every problem; never
    touches the network or reads the API key.
    """
    config_path = Path(path)
    try:
        raw = yaml.safe_load(config_path.read_text(encoding="utf-8"))
    except OSError as exc:
        raise ConfigError(f"cannot read config {config_path}: {exc}") from exc
    except yaml.YAMLError as exc:
        raise ConfigError(f"config {config_path} is not valid YAML: {exc}") from exc
    root = _require_map(raw, "config root")
    _reject_unknown(root, _TOP_LEVEL_KEYS, "top-level")
    base = config_path.resolve().parent

    provider_raw = _require_map(root.get("provider"), "provider")
    _reject_unknown(provider_raw, {
        "base_url", "api_key_env_var", "chat_model", "embedding_model",
        "timeout_seconds", "max_retries", "embedding_dim", "max_concurrency",
        "mock_scripts",
    }, "provider")
    if "base_url" not in provider_raw:
        raise ConfigError("provider.base_url is required")
    try:
        mock_scripts = provider_raw.get("mock_scripts")
        provider = ProviderConfig(
            base_url=str(provider_raw["base_url"]),
            api_key_env_var=str(provider_raw.get("api_key_env_var", "RESUME_SCREEN_API_KEY")),
            chat_model=str(provider_raw.get("chat_model", "mock-chat")),
            embedding_model=str(provider_raw.get("embedding_model", "mock-embed")),
            timeout=float(provider_raw.get("timeout_seconds", 30.0)),
            max_retries=int(provider_raw.get("max_retries", 2)),
            embedding_dim=int(provider_raw.get("embedding_dim", 256)),
            max_concurrency=int(provider_raw.get("max_concurrency", 4)),
            mock_scripts=str(_resolve(base, mock_scripts)) if mock_scripts else None,
        )
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"provider section: {exc}") from exc
    if provider.is_mock and provider.mock_scripts is None:
        # Resolve a relative scripts path carried inside the mock: URL.
        scripts = provider.scripts_path()
        if scripts:
            provider = replace(provider, mock_scripts=str(_resolve(base, scripts)))

    retrieval_raw = _require_map(root.get("retrieval"), "retrieval")
    _reject_unknown(retrieval_raw, {"tau", "top_k_cap", "chunk_size_chars", "chunk_overlap_chars"}, "retrieval")
    top_k_cap = retrieval_raw.get("top_k_cap", 8)
    try:
        retrieval = RetrievalConfig(
            tau=float(retrieval_raw.get("tau", 0.3)),
            top_k_cap=None if top_k_cap is None else int(top_k_cap),
            chunk_size_chars=int(retrieval_raw.get("chunk_size_chars", 800)),
            chunk_overlap_chars=int(retrieval_raw.get("chunk_overlap_chars", 120)),
        )
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"retrieval section: {exc}") from exc

    weights_raw = _require_map(root.get("weights"), "weights")
    _reject_unknown(weights_raw, set(_WEIGHT_FIELDS), "weights")
    try:
        weights = ScoringWeights(**{
            _WEIGHT_FIELDS[category]: float(weights_raw.get(category, 1.0))
            for category in SCORE_CATEGORIES
        })
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"weights section: {exc}") from exc

    mode_raw = _require_map(root.get("mode"), "mode")
    _reject_unknown(mode_raw, {"extraction", "normalize_weights", "discussion_rounds"}, "mode")
    extraction = mode_raw.get("extraction", True)
    normalize = mode_raw.get("normalize_weights", False)
    if not isinstance(extraction, bool):
        raise ConfigError(f"mode.extraction must be true/false, got {extraction!r}")
    if not isinstance(normalize, bool):
        raise ConfigError(f"mode.normalize_weights must be true/false, got {normalize!r}")

    paths_raw = _require_map(root.get("paths"), "paths")
    _reject_unknown(paths_raw, {"store", "template_dir", "output_dir"}, "paths")
    template_dir = paths_raw.get("template_dir")
    if template_dir is not None:
        template_path = _resolve(base, str(template_dir))
        if not template_path.is_dir():
            raise ConfigError(f"paths.template_dir does not exist: {template_path}")
    else:
        template_path = None

    try:
        return AppConfig(
            provider=provider,
            retrieval=retrieval,
            weights=weights,
            extraction=extraction,
            normalize_weights=normalize,
            discussion_rounds=int(mode_raw.get("discussion_rounds", 2)),
            store_path=_resolve(base, str(paths_raw.get("store", "criteria.store"))),
            template_dir=template_path,
            output_dir=_resolve(base, str(paths_raw.get("output_dir", "out"))),
            concurrency=int(root.get("concurrency", 4)),
        )
    except (TypeError, ValueError, DomainValidationError) as exc:
        raise ConfigError(f"config {config_path}: {exc}") from exc
