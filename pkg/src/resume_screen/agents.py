"""The four screening agents and the per-resume orchestration that chains them.

The extractor turns raw resume text into six structured fields, the evaluator
scores the candidate against the applied position using retrieved criteria,
the summarizer produces three role views (CEO, CTO, HR) and consolidates them
into one recommendation, and the formatter normalizes free-form score replies
into the fixed five-number array. Every chat call is recorded as a transcript
so a reviewer can replay each step.

One deliberate asymmetry guard: the retrieval query is built from the applied
job alone, never from extractor output, so screening with and without
extraction retrieves identical criteria and the evaluator prompts differ only
in their candidate section.
"""

from __future__ import annotations

import json
import logging
import math
import re
import time
from collections import Counter
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable, Sequence

from .errors import (
    DomainValidationError,
    EvaluationParseError,
    ExtractionParseError,
    FormatterParseError,
    GatewayError,
    ResumeScreenError,
    ScreeningError,
    SummarizationError,
)
from .gateway import ChatRequest
from .models import (
    CATEGORY_BOUNDS,
    SCORE_CATEGORIES,
    EducationEntry,
    ExtractedResume,
    FinalScore,
    JobLevel,
    JobPosition,
    Resume,
    ScoreVector,
    ScoringWeights,
    WorkEntry,
    final_score,
    serialize_scores,
    validate_score_vector,
)
from .prompts import (
    EXTRACTION_SCHEMA,
    EvaluationPrompt,
    TemplateSet,
    build_evaluation_prompt,
    render_profile,
    render_raw_profile,
)
from .store import KnowledgeStore, RetrievalConfig, RetrievalResult

logger = logging.getLogger(__name__)

MAX_EXTRACTION_REPAIRS = 2
CLAMP_TOLERANCE = 0.5
MAX_FEEDBACK_BULLETS = 10

_ROLE_ORDER = ("ceo", "cto", "hr")


# ------------------------------------------------------------------
# Records
# ------------------------------------------------------------------

@dataclass(frozen=True)
class AgentTranscript:
    """One chat call: what was asked, what came back, and how it parsed.

    ``attempts`` is the 1-based ordinal of this call within its agent stage,
    so a stage that needed two repairs leaves entries with attempts 1, 2, 3.
    ``elapsed`` is wall seconds and is excluded from serialized records.
    """

    agent_name: str
    system_prompt: str
    user_prompt: str
    raw_response: str
    parsed_ok: bool
    attempts: int
    elapsed: float = 0.0
    warnings: tuple[str, ...] = ()

    def __post_init__(self) -> None:
        if self.attempts < 1:
            raise DomainValidationError(f"attempts must be >= 1, got {self.attempts}")
        object.__setattr__(self, "warnings", tuple(self.warnings))

    @property
    def prompt(self) -> str:
        """Full prompt text as the provider saw it."""
        return f"{self.system_prompt}\n\n{self.user_prompt}"


@dataclass(frozen=True)
class FeedbackReport:
    """Multi-perspective feedback: three role views plus the consolidation."""

    ceo_view: str
    cto_view: str
    hr_view: str
    consolidated: str
    strengths: tuple[str, ...] = ()
    weaknesses: tuple[str, ...] = ()

    def __post_init__(self) -> None:
        object.__setattr__(self, "strengths", tuple(self.strengths))
        object.__setattr__(self, "weaknesses", tuple(self.weaknesses))
        if not self.consolidated.strip():
            raise DomainValidationError("consolidated feedback must be non-empty")
        for label, bullets in (("strengths", self.strengths), ("weaknesses", self.weaknesses)):
            if len(bullets) > MAX_FEEDBACK_BULLETS:
                raise DomainValidationError(
                    f"{label} capped at {MAX_FEEDBACK_BULLETS} bullets, got {len(bullets)}"
                )


@dataclass(frozen=True)
class ScreeningResult:
    """Everything one successful screening produced."""

    resume_id: str
    job: JobPosition
    extracted: ExtractedResume | None
    scores: ScoreVector
    final: FinalScore
    feedback: FeedbackReport
    retrieval: RetrievalResult
    transcripts: tuple[AgentTranscript, ...]
    extraction_enabled: bool = True

    def __post_init__(self) -> None:
        object.__setattr__(self, "transcripts", tuple(self.transcripts))


@dataclass(frozen=True)
class ScreeningFailure:
    """A resume the batch could not score; the rest of the batch continues."""

    resume_id: str
    stage: str
    error_type: str
    message: str
    transcripts: tuple[AgentTranscript, ...] = ()

    @classmethod
    def from_error(cls, exc: ScreeningError) -> "ScreeningFailure":
        return cls(
            resume_id=exc.resume_id,
            stage=exc.stage,
            error_type=type(exc.cause).__name__,
            message=str(exc.cause),
            transcripts=tuple(exc.transcripts),
        )


# ------------------------------------------------------------------
# Reply parsing helpers
# ------------------------------------------------------------------

_FENCE_RE = re.compile(r"```[a-zA-Z0-9_+-]*\s*(.*?)```", re.DOTALL)
_NUMBER_RE = re.compile(r"[-+]?(?:\d+\.?\d*|\.\d+)(?:[eE][-+]?\d+)?")
_BRACKET_RE = re.compile(r"\[([^\[\]]*)\]")


def strip_code_fences(text: str) -> str:
    """Unwrap a markdown-fenced reply; anything else passes through."""
    stripped = text.strip()
    if stripped.startswith("```"):
        match = _FENCE_RE.search(stripped)
        if match:
            return match.group(1).strip()
    return stripped


def parse_json_object(reply: str) -> dict | None:
    """Best-effort JSON object from an LLM reply, or None.

    Tries the fence-stripped reply verbatim, then the outermost brace span,
    which tolerates prose before or after the object.
    """
    body = strip_code_fences(reply)
    for candidate in (body, _brace_span(body)):
        if candidate is None:
            continue
        try:
            obj = json.loads(candidate)
        except json.JSONDecodeError:
            continue
        if isinstance(obj, dict):
            return obj
    return None


def _brace_span(text: str) -> str | None:
    start, end = text.find("{"), text.rfind("}")
    if 0 <= start < end:
        return text[start:end + 1]
    return None


def format_scores(raw_response: str) -> list[float]:
    """Normalize a free-form score reply into the five-number array.

    Takes the first bracketed group holding exactly five numbers; failing
    that, falls back to the bare numeric tokens of the whole reply provided
    there are exactly five, so "scores 1.0 / 1.5 / 3.5 / 0.8 / 1.5" parses
    but a reply with stray extra numbers does not silently guess.
    """
    for match in _BRACKET_RE.finditer(raw_response):
        tokens = [t for t in re.split(r"[,;\s]+", match.group(1).strip()) if t]
        if len(tokens) != 5:
            continue
        try:
            return [float(t) for t in tokens]
        except ValueError:
            continue
    tokens = _NUMBER_RE.findall(strip_code_fences(raw_response))
    if len(tokens) == 5:
        return [float(t) for t in tokens]
    raise FormatterParseError(raw_response)


# --- extractor reply -> ExtractedResume ---------------------------

_EXTRACTION_KEYS = frozenset({
    "position",
    "self_evaluation",
    "skills_specialties",
    "work_experience",
    "basic_information",
    "education",
})


def _as_text(value: object, what: str) -> str:
    if value is None:
        return ""
    if isinstance(value, str):
        return value
    if isinstance(value, (int, float)):
        return str(value)
    raise DomainValidationError(f"{what} must be text, got {type(value).__name__}")


def _as_months(value: object) -> int | None:
    if value is None:
        return None
    if isinstance(value, bool):
        raise DomainValidationError("duration_months must be a number or null")
    if isinstance(value, int):
        return value
    if isinstance(value, float) and value.is_integer():
        return int(value)
    if isinstance(value, str):
        token = value.strip().lower()
        if token in {"", "null", "none", "unknown"}:
            return None
        try:
            return int(token)
        except ValueError:
            pass
    raise DomainValidationError(f"duration_months must be an integer or null, got {value!r}")


def _build_extracted(obj: dict) -> ExtractedResume:
    position = obj["position"]
    if not isinstance(position, dict):
        raise DomainValidationError("position must be an object with title and level")
    title = _as_text(position.get("title"), "position.title").strip() or "unspecified"
    level = JobLevel.parse(_as_text(position.get("level"), "position.level"))

    skills_raw = obj["skills_specialties"]
    if skills_raw is None:
        skills_raw = []
    if not isinstance(skills_raw, list):
        raise DomainValidationError("skills_specialties must be a list")
    skills = []
    for item in skills_raw:
        text = _as_text(item, "skills_specialties entry").strip()
        if text:
            skills.append(text)

    work_raw = obj["work_experience"]
    if work_raw is None:
        work_raw = []
    if not isinstance(work_raw, list):
        raise DomainValidationError("work_experience must be a list")
    work = []
    for item in work_raw:
        if not isinstance(item, dict):
            raise DomainValidationError("work_experience entries must be objects")
        work.append(WorkEntry(
            company=_as_text(item.get("company"), "company").strip() or "unspecified",
            duration_months=_as_months(item.get("duration_months")),
            responsibilities=_as_text(item.get("responsibilities"), "responsibilities").strip(),
        ))

    basic_raw = obj["basic_information"]
    if basic_raw is None:
        basic_raw = {}
    if not isinstance(basic_raw, dict):
        raise DomainValidationError("basic_information must be an object")
    basic = {str(k): _as_text(v, f"basic_information[{k!r}]") for k, v in basic_raw.items()}

    education_raw = obj["education"]
    if education_raw is None:
        education_raw = []
    if not isinstance(education_raw, list):
        raise DomainValidationError("education must be a list")
    education = []
    for item in education_raw:
        if not isinstance(item, dict):
            raise DomainValidationError("education entries must be objects")
        education.append(EducationEntry(
            institution=_as_text(item.get("institution"), "institution").strip(),
            degree=_as_text(item.get("degree"), "degree").strip(),
            field_of_study=_as_text(item.get("field_of_study"), "field_of_study").strip(),
        ))

    return ExtractedResume(
        position=JobPosition(title=title, level=level),
        self_evaluation=_as_text(obj["self_evaluation"], "self_evaluation").strip(),
        skills_specialties=tuple(skills),
        work_experience=tuple(work),
        basic_information=basic,
        education=tuple(education),
    )


def parse_extraction(reply: str) -> tuple[ExtractedResume | None, str | None]:
    """Parse an extractor reply; returns (extracted, None) or (None, problem)."""
    obj = parse_json_object(reply)
    if obj is None:
        return None, "reply is not a JSON object"
    keys = set(obj)
    if keys != _EXTRACTION_KEYS:
        problems = []
        missing = sorted(_EXTRACTION_KEYS - keys)
        extra = sorted(keys - _EXTRACTION_KEYS)
        if missing:
            problems.append(f"missing keys: {', '.join(missing)}")
        if extra:
            problems.append(f"unexpected keys: {', '.join(extra)}")
        return None, "; ".join(problems)
    try:
        return _build_extracted(obj), None
    except DomainValidationError as exc:
        return None, str(exc)


# --- evaluator reply -> ScoreVector -------------------------------

def parse_evaluation(reply: str) -> tuple[ScoreVector | None, list[str], str | None]:
    """Parse and bound-check an evaluator reply.

    Returns (scores, clamp warnings, None) on success or (None, [], problem)
    when the reply needs a repair call: either no five-number array was found
    or some value sits more than CLAMP_TOLERANCE outside its category bound.
    Values within the tolerance are clamped to the bound and noted.
    """
    try:
        raw = format_scores(reply)
    except FormatterParseError:
        return None, [], "no five-number score array found in the reply"
    warnings: list[str] = []
    adjusted: list[float] = []
    for category, value in zip(SCORE_CATEGORIES, raw):
        if not math.isfinite(value):
            return None, [], f"{category} score is not finite"
        low, high = CATEGORY_BOUNDS[category]
        if value < low - CLAMP_TOLERANCE or value > high + CLAMP_TOLERANCE:
            return None, [], (
                f"{category} score {value:g} is outside [{low:g}, {high:g}] "
                f"by more than {CLAMP_TOLERANCE}"
            )
        if value < low:
            warnings.append(f"clamped {category} from {value:g} to {low:g}")
            value = low
        elif value > high:
            warnings.append(f"clamped {category} from {value:g} to {high:g}")
            value = high
        adjusted.append(value)
    return validate_score_vector(adjusted), warnings, None


# ------------------------------------------------------------------
# Retrieval query
# ------------------------------------------------------------------

def retrieval_query(job: JobPosition) -> str:
    """The text embedded to fetch scoring criteria for one applied position.

    Built from the job alone, never from extractor output: retrieval must be
    identical with and without extraction so the two modes are comparable
    prompt-for-prompt. Kept as one function so the composition is easy to
    revise in one place.
    """
    return f"{job.title} {job.level.value}"


# ------------------------------------------------------------------
# Pipeline
# ------------------------------------------------------------------

class ScreeningPipeline:
    """Chains extractor, evaluator, summarizer, and formatter for one store.

    The per-resume agent chain is strictly sequential; only the summarizer's
    role calls within one resume fan out. The knowledge store is treated as
    read-only here.
    """

    def __init__(
        self,
        gateway,
        store: KnowledgeStore,
        *,
        retrieval: RetrievalConfig | None = None,
        templates: TemplateSet | None = None,
        weights: ScoringWeights | None = None,
        chat_model: str = "mock-chat",
        temperature: float = 0.0,
        max_tokens: int = 1024,
        extraction_enabled: bool = True,
        discussion_rounds: int = 2,
    ) -> None:
        if discussion_rounds < 2:
            raise DomainValidationError(
                f"discussion_rounds must be >= 2 (views then consolidation), got {discussion_rounds}"
            )
        self._gateway = gateway
        self._store = store
        self._retrieval = retrieval or RetrievalConfig()
        self._templates = templates or TemplateSet()
        self._weights = weights or ScoringWeights.unit()
        self._chat_model = chat_model
        self._temperature = temperature
        self._max_tokens = max_tokens
        self._extraction_enabled = extraction_enabled
        self._discussion_rounds = discussion_rounds

    @property
    def extraction_enabled(self) -> bool:
        return self._extraction_enabled

    @property
    def weights(self) -> ScoringWeights:
        return self._weights

    @property
    def templates(self) -> TemplateSet:
        return self._templates

    def _call(self, system_prompt: str, user_prompt: str) -> tuple[str, float]:
        request = ChatRequest(
            system_prompt=system_prompt,
            user_prompt=user_prompt,
            model_id=self._chat_model,
            temperature=self._temperature,
            max_tokens=self._max_tokens,
        )
        started = time.perf_counter()
        reply = self._gateway.chat(request)
        return reply, time.perf_counter() - started

    # --- extractor -------------------------------------------------

    def extract(self, resume: Resume) -> tuple[ExtractedResume, list[AgentTranscript]]:
        """Extract the six structured fields, repairing malformed JSON twice."""
        system = self._templates.text("extract_system")
        user = self._templates.render("extract_user", {
            "schema": EXTRACTION_SCHEMA,
            "position_hint": resume.applied_position_hint or "(none)",
            "resume_text": resume.raw_text,
        })
        transcripts: list[AgentTranscript] = []
        attempt = 1
        reply, elapsed = self._call(system, user)
        extracted, problem = parse_extraction(reply)
        transcripts.append(AgentTranscript(
            agent_name="extract",
            system_prompt=system,
            user_prompt=user,
            raw_response=reply,
            parsed_ok=extracted is not None,
            attempts=attempt,
            elapsed=elapsed,
            warnings=(f"parse failed: {problem}",) if problem else (),
        ))
        while extracted is None and attempt <= MAX_EXTRACTION_REPAIRS:
            attempt += 1
            repair_user = self._templates.render("extract_repair_user", {
                "malformed": reply,
                "schema": EXTRACTION_SCHEMA,
                "resume_text": resume.raw_text,
            })
            reply, elapsed = self._call(system, repair_user)
            extracted, problem = parse_extraction(reply)
            transcripts.append(AgentTranscript(
                agent_name="extract",
                system_prompt=system,
                user_prompt=repair_user,
                raw_response=reply,
                parsed_ok=extracted is not None,
                attempts=attempt,
                elapsed=elapsed,
                warnings=(f"parse failed: {problem}",) if problem else (),
            ))
        if extracted is None:
            raise ExtractionParseError(attempts=attempt, last_response=reply,
                                       transcripts=tuple(transcripts))
        return extracted, transcripts

    # --- evaluator ---------------------------------------------------

    def evaluate(
        self, extracted: ExtractedResume, job: JobPosition
    ) -> tuple[ScoreVector, RetrievalResult, EvaluationPrompt, list[AgentTranscript]]:
        """Score a structured candidate against the applied position."""
        profile = render_profile(self._templates, extracted)
        return self._evaluate_profile(profile, job)

    def _evaluate_profile(
        self, profile: str, job: JobPosition
    ) -> tuple[ScoreVector, RetrievalResult, EvaluationPrompt, list[AgentTranscript]]:
        retrieval = self._store.retrieve(retrieval_query(job), self._retrieval)
        prompt = build_evaluation_prompt(self._templates, job, profile, retrieval)
        transcripts: list[AgentTranscript] = []

        reply, elapsed = self._call(prompt.system, prompt.user)
        scores, warnings, problem = parse_evaluation(reply)
        transcripts.append(AgentTranscript(
            agent_name="evaluate",
            system_prompt=prompt.system,
            user_prompt=prompt.user,
            raw_response=reply,
            parsed_ok=scores is not None,
            attempts=1,
            elapsed=elapsed,
            warnings=tuple(warnings) if scores is not None else (f"parse failed: {problem}",),
        ))
        if scores is None:
            repair_user = self._templates.render("evaluate_repair_user", {
                "malformed": reply,
                "problem": problem,
            })
            reply, elapsed = self._call(prompt.system, repair_user)
            scores, warnings, problem = parse_evaluation(reply)
            transcripts.append(AgentTranscript(
                agent_name="evaluate",
                system_prompt=prompt.system,
                user_prompt=repair_user,
                raw_response=reply,
                parsed_ok=scores is not None,
                attempts=2,
                elapsed=elapsed,
                warnings=tuple(warnings) if scores is not None else (f"parse failed: {problem}",),
            ))
            if scores is None:
                raise EvaluationParseError(problem or "unparseable evaluation", reply,
                                           transcripts=tuple(transcripts))
        return scores, retrieval, prompt, transcripts

    # --- summarizer --------------------------------------------------

    def summarize(
        self,
        profile: str,
        scores: ScoreVector,
        final: FinalScore,
        job: JobPosition,
    ) -> tuple[FeedbackReport, list[AgentTranscript]]:
        """Run the panel: parallel role views, then one consolidation call.

        With discussion_rounds > 2, the middle rounds show each role the
        other views and ask for a refined take before consolidating.
        """
        shared_user = self._templates.render("summarize_user", {
            "job_title": job.title,
            "job_level": job.level.value,
            "profile": profile,
            "scores": json.dumps(serialize_scores(scores)),
            "final": f"{final.value:.1f}",
        })
        transcripts: list[AgentTranscript] = []
        role_systems = {
            role: self._templates.text(f"summarize_{role}_system") for role in _ROLE_ORDER
        }

        views = self._role_round(role_systems, {role: shared_user for role in _ROLE_ORDER},
                                 attempt=1, transcripts=transcripts)

        for round_index in range(3, self._discussion_rounds + 1):
            refine_user = self._templates.render("summarize_refine_user", {
                "job_title": job.title,
                "job_level": job.level.value,
                "ceo_view": views["ceo"],
                "cto_view": views["cto"],
                "hr_view": views["hr"],
            })
            views = self._role_round(role_systems, {role: refine_user for role in _ROLE_ORDER},
                                     attempt=round_index - 1, transcripts=transcripts)

        consolidate_system = self._templates.text("consolidate_system")
        consolidate_user = self._templates.render("consolidate_user", {
            "job_title": job.title,
            "job_level": job.level.value,
            "ceo_view": views["ceo"],
            "cto_view": views["cto"],
            "hr_view": views["hr"],
        })
        reply, elapsed = self._call(consolidate_system, consolidate_user)
        report, warnings, problem = _parse_consolidation(reply, views)
        transcripts.append(AgentTranscript(
            agent_name="consolidate",
            system_prompt=consolidate_system,
            user_prompt=consolidate_user,
            raw_response=reply,
            parsed_ok=report is not None,
            attempts=1,
            elapsed=elapsed,
            warnings=tuple(warnings) if report is not None else (f"parse failed: {problem}",),
        ))
        if report is None:
            raise SummarizationError(
                f"consolidation failed: {problem}", dict(views), tuple(transcripts)
            )
        return report, transcripts

    def _role_round(
        self,
        role_systems: dict[str, str],
        role_users: dict[str, str],
        attempt: int,
        transcripts: list[AgentTranscript],
    ) -> dict[str, str]:
        """One parallel round of role calls; results land in fixed role order."""
        with ThreadPoolExecutor(max_workers=len(_ROLE_ORDER)) as pool:
            futures = {
                role: pool.submit(self._call, role_systems[role], role_users[role])
                for role in _ROLE_ORDER
            }
        views: dict[str, str] = {}
        failures: dict[str, str] = {}
        for role in _ROLE_ORDER:
            try:
                reply, elapsed = futures[role].result()
            except GatewayError as exc:
                failures[role] = str(exc)
                continue
            views[role] = reply
            transcripts.append(AgentTranscript(
                agent_name=f"summarize.{role}",
                system_prompt=role_systems[role],
                user_prompt=role_users[role],
                raw_response=reply,
                parsed_ok=True,
                attempts=attempt,
                elapsed=elapsed,
            ))
        if failures:
            detail = "; ".join(f"{role} view failed: {msg}" for role, msg in failures.items())
            raise SummarizationError(detail, dict(views), tuple(transcripts))
        return views

    # --- orchestration ----------------------------------------------

    def screen(self, resume: Resume, job: JobPosition) -> ScreeningResult:
        """Run the full chain for one resume; wraps stage failures."""
        transcripts: list[AgentTranscript] = []
        stage = "extract"
        try:
            if self._extraction_enabled:
                extracted, stage_transcripts = self.extract(resume)
                transcripts.extend(stage_transcripts)
                profile = render_profile(self._templates, extracted)
            else:
                extracted = None
                profile = render_raw_profile(self._templates, resume.raw_text)

            stage = "evaluate"
            scores, retrieval, _, stage_transcripts = self._evaluate_profile(profile, job)
            transcripts.extend(stage_transcripts)
            final = final_score(scores, self._weights, job)

            stage = "summarize"
            feedback, stage_transcripts = self.summarize(profile, scores, final, job)
            transcripts.extend(stage_transcripts)
        except ResumeScreenError as exc:
            if isinstance(exc, ScreeningError):
                raise
            partial = getattr(exc, "transcripts", ())
            raise ScreeningError(
                resume.id, stage, exc, tuple(transcripts) + tuple(partial)
            ) from exc
        return ScreeningResult(
            resume_id=resume.id,
            job=job,
            extracted=extracted,
            scores=scores,
            final=final,
            feedback=feedback,
            retrieval=retrieval,
            transcripts=tuple(transcripts),
            extraction_enabled=self._extraction_enabled,
        )


def screen_batch(
    pipeline: ScreeningPipeline,
    resumes: Sequence[Resume],
    assign_job: Callable[[Resume], JobPosition],
    concurrency: int = 4,
) -> list[ScreeningResult | ScreeningFailure]:
    """Screen a batch under bounded parallelism, preserving input order.

    Each resume fails independently: a ScreeningError becomes a
    ScreeningFailure record in its slot and the rest of the batch proceeds.
    """
    counts = Counter(resume.id for resume in resumes)
    duplicates = sorted(rid for rid, n in counts.items() if n > 1)
    if duplicates:
        raise DomainValidationError(f"duplicate resume ids: {', '.join(duplicates)}")

    def _one(resume: Resume) -> ScreeningResult | ScreeningFailure:
        try:
            return pipeline.screen(resume, assign_job(resume))
        except ScreeningError as exc:
            logger.warning("resume %s failed at %s: %s", exc.resume_id, exc.stage, exc.cause)
            return ScreeningFailure.from_error(exc)

    if not resumes:
        return []
    with ThreadPoolExecutor(max_workers=max(1, concurrency)) as pool:
        futures = [pool.submit(_one, resume) for resume in resumes]
        return [future.result() for future in futures]


def _parse_consolidation(
    reply: str, views: dict[str, str]
) -> tuple[FeedbackReport | None, list[str], str | None]:
    """Parse the consolidation reply into a FeedbackReport.

    Over-long bullet lists are truncated to the cap with a warning rather
    than failing the whole screening.
    """
    obj = parse_json_object(reply)
    if obj is None:
        return None, [], "reply is not a JSON object"
    consolidated = obj.get("consolidated")
    if not isinstance(consolidated, str) or not consolidated.strip():
        return None, [], 'missing or empty "consolidated" text'
    warnings: list[str] = []
    bullets: dict[str, tuple[str, ...]] = {}
    for label in ("strengths", "weaknesses"):
        raw = obj.get(label, [])
        if raw is None:
            raw = []
        if not isinstance(raw, list):
            return None, [], f'"{label}" must be a list of bullets'
        cleaned = [str(item).strip() for item in raw if str(item).strip()]
        if len(cleaned) > MAX_FEEDBACK_BULLETS:
            warnings.append(
                f"truncated {label} from {len(cleaned)} to {MAX_FEEDBACK_BULLETS} bullets"
            )
            cleaned = cleaned[:MAX_FEEDBACK_BULLETS]
        bullets[label] = tuple(cleaned)
    report = FeedbackReport(
        ceo_view=views["ceo"],
        cto_view=views["cto"],
        hr_view=views["hr"],
        consolidated=consolidated.strip(),
        strengths=bullets["strengths"],
        weaknesses=bullets["weaknesses"],
    )
    return report, warnings, None
