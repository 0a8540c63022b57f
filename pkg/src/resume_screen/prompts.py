"""Prompt assembly for the screening agents.

Templates are plain text files shipped as package data, optionally overridden
per file by a user-supplied directory. Placeholders look like ``{dotted.name}``
and are substituted in a single pass: braces inside substituted values are
never re-scanned, and a literal ``{}`` in a template survives because the
placeholder pattern requires at least one name character.

Each template body ends with a ``[prompt-template <name>/v<N>]`` tag line so a
transcript records exactly which prompt wording produced a reply.
"""

from __future__ import annotations

import logging
import re
from dataclasses import dataclass
from importlib import resources
from pathlib import Path
from typing import Mapping

from .errors import TemplateNotFoundError, UnknownPlaceholderError
from .models import ExtractedResume, JobPosition
from .store import RetrievalResult

logger = logging.getLogger(__name__)

PLACEHOLDER_RE = re.compile(r"\{([a-z0-9_.]+)\}")

# Injected as the criteria section when retrieval returns nothing; the
# evaluator then scores on the resume and position alone.
NO_CRITERIA_SENTINEL = "(no external criteria cleared the relevance threshold)"

# The JSON shape the extractor must return, injected into {schema}. Kept as
# one literal so prompt text and parser expectations cannot drift apart.
EXTRACTION_SCHEMA = """\
{
  "position": {"title": "<string>", "level": "<junior|mid|senior|leadership>"},
  "self_evaluation": "<string>",
  "skills_specialties": ["<string>", ...],
  "work_experience": [
    {"company": "<string>", "duration_months": <integer or null>, "responsibilities": "<string>"}
  ],
  "basic_information": {"<key>": "<value>", ...},
  "education": [
    {"institution": "<string>", "degree": "<string>", "field_of_study": "<string>"}
  ]
}"""


def render_template(text: str, mapping: Mapping[str, object], template: str = "<inline>") -> str:
    """Substitute ``{name}`` placeholders in one pass.

    Unknown placeholder names raise instead of passing through silently, so a
    typo in a template fails loudly rather than leaking braces into a prompt.
    """

    def _sub(match: re.Match[str]) -> str:
        key = match.group(1)
        if key not in mapping:
            raise UnknownPlaceholderError(key, template)
        return str(mapping[key])

    return PLACEHOLDER_RE.sub(_sub, text)


class TemplateSet:
    """Named prompt templates, loaded lazily and cached.

    ``directory`` overrides individual templates by file name; anything not
    found there falls back to the packaged defaults.
    """

    def __init__(self, directory: Path | None = None) -> None:
        self.directory = Path(directory) if directory is not None else None
        self._cache: dict[str, str] = {}

    def text(self, name: str) -> str:
        cached = self._cache.get(name)
        if cached is not None:
            return cached
        body = self._load(name)
        self._cache[name] = body
        return body

    def render(self, name: str, mapping: Mapping[str, object]) -> str:
        return render_template(self.text(name), mapping, template=name)

    def _load(self, name: str) -> str:
        filename = f"{name}.txt"
        if self.directory is not None:
            candidate = self.directory / filename
            if candidate.is_file():
                return candidate.read_text(encoding="utf-8")
        packaged = resources.files(__package__) / "templates" / filename
        try:
            return packaged.read_text(encoding="utf-8")
        except FileNotFoundError:
            where = str(self.directory) if self.directory is not None else "packaged templates"
            raise TemplateNotFoundError(name, where) from None


# ------------------------------------------------------------------
# Candidate profile rendering
# ------------------------------------------------------------------

def _work_lines(extracted: ExtractedResume) -> str:
    if not extracted.work_experience:
        return "(none listed)"
    lines = []
    for entry in extracted.work_experience:
        if entry.duration_months is None:
            duration = "duration unknown"
        else:
            duration = f"{entry.duration_months} months"
        lines.append(f"- {entry.company} ({duration}): {entry.responsibilities}")
    return "\n".join(lines)


def _basic_lines(extracted: ExtractedResume) -> str:
    if not extracted.basic_information:
        return "(none listed)"
    return "\n".join(f"- {key}: {value}" for key, value in extracted.basic_information.items())


def _education_lines(extracted: ExtractedResume) -> str:
    if not extracted.education:
        return "(none listed)"
    lines = []
    for entry in extracted.education:
        what = entry.degree
        if entry.field_of_study:
            what = f"{what} in {entry.field_of_study}" if what else entry.field_of_study
        lines.append(f"- {what}, {entry.institution}" if what else f"- {entry.institution}")
    return "\n".join(lines)


def render_profile(templates: TemplateSet, extracted: ExtractedResume) -> str:
    """Render the structured candidate section of the evaluator prompt."""
    position = extracted.position
    mapping = {
        "extracted.position": f"{position.title} ({position.level.value} level)",
        "extracted.self_evaluation": extracted.self_evaluation or "(none stated)",
        "extracted.skills": ", ".join(extracted.skills_specialties) or "(none listed)",
        "extracted.work_experience": _work_lines(extracted),
        "extracted.basic_information": _basic_lines(extracted),
        "extracted.education": _education_lines(extracted),
    }
    return templates.render("profile_extracted", mapping)


def render_raw_profile(templates: TemplateSet, resume_text: str) -> str:
    """Candidate section when extraction is disabled: the raw resume verbatim."""
    return templates.render("profile_raw", {"resume_text": resume_text})


# ------------------------------------------------------------------
# Evaluator prompt
# ------------------------------------------------------------------

def format_context(retrieval: RetrievalResult) -> str:
    """Label retrieved criteria so transcripts show what informed each score.

    Similarities are fixed to four decimals; the prompt string is part of the
    mock-script digest, so its formatting must be stable across runs.
    """
    if not retrieval.chunks:
        return NO_CRITERIA_SENTINEL
    blocks = []
    for i, (chunk, sim) in enumerate(retrieval.chunks, start=1):
        header = f"--- criterion {i} (chunk {chunk.chunk_id}, relevance {sim:.4f}) ---"
        blocks.append(f"{header}\n{chunk.text.strip()}")
    return "\n\n".join(blocks)


@dataclass(frozen=True)
class EvaluationPrompt:
    """The fully rendered evaluator call, with its sections kept addressable."""

    system: str
    user: str
    query: str
    context: str
    profile: str


def build_evaluation_prompt(
    templates: TemplateSet,
    job: JobPosition,
    profile: str,
    retrieval: RetrievalResult,
) -> EvaluationPrompt:
    """Assemble the scoring prompt from task, position, criteria, and profile."""
    query = templates.text("evaluate_query").rstrip("\n")
    context = format_context(retrieval)
    user = templates.render(
        "evaluate_user",
        {
            "query": query,
            "job_title": job.title,
            "job_level": job.level.value,
            "context": context,
            "profile": profile,
        },
    )
    return EvaluationPrompt(
        system=templates.text("evaluate_system"),
        user=user,
        query=query,
        context=context,
        profile=profile,
    )
