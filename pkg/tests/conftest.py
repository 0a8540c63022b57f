"""Shared test fixtures: the scripted corpus, mock gateway, config writer.

Everything here reads from the checked-in ``fixtures/`` directory; no test
may touch the network. Configs are written into per-test tmp directories
with absolute paths back into the fixture corpus.
"""

from __future__ import annotations

import json
from pathlib import Path

import pytest

from resume_screen.gateway import MockGateway
from resume_screen.store import KnowledgeStore, RetrievalConfig, SourceDocument

FIXTURES = Path(__file__).resolve().parent.parent / "fixtures"
EMBEDDING_DIM = 256
EMBEDDING_MODEL = "mock-embed"
RETRIEVAL = RetrievalConfig(tau=0.3, top_k_cap=8, chunk_size_chars=800, chunk_overlap_chars=120)

RESUME_FILES = sorted(str(p) for p in (FIXTURES / "resumes").glob("*.txt"))
CRITERIA_FILES = sorted(str(p) for p in (FIXTURES / "criteria").glob("*.txt"))


def load_scripts(name: str = "mock_scripts.json") -> dict[str, str]:
    return json.loads((FIXTURES / name).read_text(encoding="utf-8"))


def build_fixture_store(gateway) -> KnowledgeStore:
    store = KnowledgeStore(gateway, dim=EMBEDDING_DIM, model_id=EMBEDDING_MODEL)
    for path in sorted((FIXTURES / "criteria").glob("*.txt")):
        doc = SourceDocument(doc_id=path.stem, title=path.name,
                             body=path.read_text(encoding="utf-8"))
        store.index(doc, RETRIEVAL)
    return store


@pytest.fixture()
def mock_gateway() -> MockGateway:
    return MockGateway(load_scripts(), embedding_dim=EMBEDDING_DIM,
                       embedding_model=EMBEDDING_MODEL)


@pytest.fixture()
def fixture_store(mock_gateway: MockGateway) -> KnowledgeStore:
    return build_fixture_store(mock_gateway)


@pytest.fixture(scope="session")
def store_file(tmp_path_factory: pytest.TempPathFactory) -> Path:
    """The fixture criteria store, saved once for CLI tests to load."""
    gateway = MockGateway(embedding_dim=EMBEDDING_DIM, embedding_model=EMBEDDING_MODEL)
    store = build_fixture_store(gateway)
    path = tmp_path_factory.mktemp("store") / "criteria.store"
    store.save(path)
    return path


def write_config(directory: Path, *, scripts: Path | None = None,
                 store: Path | None = None, output_dir: Path | None = None,
                 mode: dict | None = None, concurrency: int = 4) -> Path:
    """Write a YAML config into ``directory`` with absolute fixture paths."""
    scripts = scripts if scripts is not None else FIXTURES / "mock_scripts.json"
    store = store if store is not None else directory / "criteria.store"
    output_dir = output_dir if output_dir is not None else directory / "out"
    lines = [
        "provider:",
        f"  base_url: mock:{scripts}",
        "  chat_model: mock-chat",
        f"  embedding_model: {EMBEDDING_MODEL}",
        f"  embedding_dim: {EMBEDDING_DIM}",
        "retrieval:",
        f"  tau: {RETRIEVAL.tau}",
        f"  top_k_cap: {RETRIEVAL.top_k_cap}",
        f"  chunk_size_chars: {RETRIEVAL.chunk_size_chars}",
        f"  chunk_overlap_chars: {RETRIEVAL.chunk_overlap_chars}",
    ]
    if mode:
        lines.append("mode:")
        lines.extend(f"  {key}: {json.dumps(value)}" for key, value in mode.items())
    lines += [
        "paths:",
        f"  store: {store}",
        f"  output_dir: {output_dir}",
        f"concurrency: {concurrency}",
    ]
    path = directory / "config.yaml"
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    return path
