"""Agent tests: reply parsing, repair flows, the panel, and orchestration.

Pipeline-level tests replay the scripted fixture corpus through the mock
gateway; parser tests are plain function calls.
"""

from __future__ import annotations

import json

import pytest
from conftest import RETRIEVAL, build_fixture_store, load_scripts

from resume_screen.agents import (
    CLAMP_TOLERANCE,
    MAX_FEEDBACK_BULLETS,
    AgentTranscript,
    FeedbackReport,
    ScreeningFailure,
    ScreeningPipeline,
    format_scores,
    parse_evaluation,
    parse_extraction,
    parse_json_object,
    retrieval_query,
    screen_batch,
    strip_code_fences,
)
from resume_screen.errors import (
    DomainValidationError,
    ExtractionParseError,
    FormatterParseError,
    ScreeningError,
    SummarizationError,
    TransportError,
)
from resume_screen.gateway import MockGateway, mock_embed
from resume_screen.models import JobLevel, JobPosition, Resume
from conftest import EMBEDDING_DIM, EMBEDDING_MODEL, FIXTURES


def fixture_resume(rid: str) -> Resume:
    manifest = json.loads((FIXTURES / "manifest.json").read_text(encoding="utf-8"))
    hint = manifest["resumes"].get(rid, {}).get("hint")
    return Resume(
        id=rid,
        raw_text=(FIXTURES / "resumes" / f"{rid}.txt").read_text(encoding="utf-8"),
        applied_position_hint=hint,
    )


def fixture_job(rid: str) -> JobPosition:
    manifest = json.loads((FIXTURES / "manifest.json").read_text(encoding="utf-8"))
    entry = manifest["resumes"].get(rid, manifest["default"])
    return JobPosition(entry["title"], JobLevel.parse(entry["level"]))


def make_pipeline(gateway, **kwargs) -> ScreeningPipeline:
    store = build_fixture_store(gateway)
    return ScreeningPipeline(gateway, store, retrieval=RETRIEVAL, **kwargs)


# ---------------------------------------------------------------------------
# Fences and JSON extraction
# ---------------------------------------------------------------------------

def test_strip_code_fences_variants() -> None:
    assert strip_code_fences('{"a": 1}') == '{"a": 1}'
    assert strip_code_fences('```json\n{"a": 1}\n```') == '{"a": 1}'
    assert strip_code_fences('```\n[1, 2]\n```') == '[1, 2]'
    assert strip_code_fences("  plain text  ") == "plain text"


def test_parse_json_object_paths() -> None:
    assert parse_json_object('{"a": 1}') == {"a": 1}
    assert parse_json_object('```json\n{"a": 1}\n```') == {"a": 1}
    assert parse_json_object('Sure! Here it is: {"a": 1}. Enjoy.') == {"a": 1}
    assert parse_json_object("[1, 2, 3]") is None
    assert parse_json_object("no json here") is None
    assert parse_json_object("{broken") is None


# ---------------------------------------------------------------------------
# Formatter
# ---------------------------------------------------------------------------

def test_format_scores_bracketed() -> None:
    assert format_scores("[0.5, 1.2, 2.5, 0.8, 1.3]") == [0.5, 1.2, 2.5, 0.8, 1.3]
    assert format_scores("[0.5; 1.2;2.5 0.8,1.3]") == [0.5, 1.2, 2.5, 0.8, 1.3]
    assert format_scores("```json\n[1, 2, 3, 1, 2]\n```") == [1.0, 2.0, 3.0, 1.0, 2.0]


def test_format_scores_skips_wrong_arity_brackets() -> None:
    reply = "ranges [0, 10] apply; scores: [0.5, 1.2, 2.5, 0.8, 1.3]"
    assert format_scores(reply) == [0.5, 1.2, 2.5, 0.8, 1.3]


def test_format_scores_first_five_number_bracket_wins() -> None:
    reply = "[0.5, 1.2, 2.5, 0.8, 1.3] not [1, 1, 1, 1, 1]"
    assert format_scores(reply) == [0.5, 1.2, 2.5, 0.8, 1.3]


def test_format_scores_bare_tokens_fallback() -> None:
    assert format_scores("scores 1.0 / 1.5 / 3.5 / 0.8 / 1.5") == [1.0, 1.5, 3.5, 0.8, 1.5]


def test_format_scores_rejects_ambiguous_or_missing() -> None:
    with pytest.raises(FormatterParseError):
        format_scores("only 1.0 2.0 3.0")
    with pytest.raises(FormatterParseError):
        format_scores("six loose numbers 1 2 3 4 5 6")
    with pytest.raises(FormatterParseError):
        format_scores("I would hire this candidate.")


# ---------------------------------------------------------------------------
# Extractor parsing
# ---------------------------------------------------------------------------

def valid_extraction() -> dict:
    return {
        "position": {"title": "Data Engineer", "level": "senior"},
        "self_evaluation": "careful builder",
        "skills_specialties": ["python", " sql ", ""],
        "work_experience": [
            {"company": "Initech", "duration_months": "18", "responsibilities": "ETL"},
            {"company": "", "duration_months": None, "responsibilities": "ops"},
        ],
        "basic_information": {"location": "Malmo"},
        "education": [{"institution": "Lund", "degree": "BSc", "field_of_study": ""}],
    }


def test_parse_extraction_valid_with_coercions() -> None:
    extracted, problem = parse_extraction(json.dumps(valid_extraction()))
    assert problem is None
    assert extracted.position.level is JobLevel.SENIOR
    assert extracted.skills_specialties == ("python", "sql")
    assert extracted.work_experience[0].duration_months == 18
    assert extracted.work_experience[1].company == "unspecified"
    assert extracted.work_experience[1].duration_months is None


def test_parse_extraction_level_aliases_and_blank_title() -> None:
    payload = valid_extraction()
    payload["position"] = {"title": "  ", "level": "Entry"}
    extracted, problem = parse_extraction(json.dumps(payload))
    assert problem is None
    assert extracted.position.title == "unspecified"
    assert extracted.position.level is JobLevel.JUNIOR


def test_parse_extraction_null_sections_become_empty() -> None:
    payload = valid_extraction()
    payload["skills_specialties"] = None
    payload["work_experience"] = None
    payload["education"] = None
    payload["basic_information"] = None
    extracted, problem = parse_extraction(json.dumps(payload))
    assert problem is None
    assert extracted.skills_specialties == ()
    assert extracted.work_experience == ()
    assert extracted.education == ()
    assert extracted.basic_information == {}


def test_parse_extraction_reports_missing_and_extra_keys() -> None:
    payload = valid_extraction()
    del payload["education"]
    payload["rating"] = 5
    _, problem = parse_extraction(json.dumps(payload))
    assert "missing keys: education" in problem
    assert "unexpected keys: rating" in problem


def test_parse_extraction_rejects_bad_durations() -> None:
    payload = valid_extraction()
    payload["work_experience"][0]["duration_months"] = True
    _, problem = parse_extraction(json.dumps(payload))
    assert "duration_months" in problem
    payload["work_experience"][0]["duration_months"] = "eighteen"
    _, problem = parse_extraction(json.dumps(payload))
    assert "duration_months" in problem


def test_parse_extraction_junk_reply() -> None:
    extracted, problem = parse_extraction("A strong candidate, hire them.")
    assert extracted is None
    assert problem == "reply is not a JSON object"


# ---------------------------------------------------------------------------
# Evaluator parsing and the clamp rule
# ---------------------------------------------------------------------------

def test_parse_evaluation_in_bounds() -> None:
    scores, warnings, problem = parse_evaluation("[0.5, 1.2, 2.5, 0.8, 1.3]")
    assert problem is None and warnings == []
    assert scores.as_list() == [0.5, 1.2, 2.5, 0.8, 1.3]


def test_parse_evaluation_clamps_within_tolerance() -> None:
    scores, warnings, problem = parse_evaluation("[1.3, 2.1, 4.5, -0.4, 0.0]")
    assert problem is None
    assert scores.as_list() == [1.0, 2.0, 4.0, 0.0, 0.0]
    assert warnings == [
        "clamped self_evaluation from 1.3 to 1",
        "clamped skills from 2.1 to 2",
        "clamped work_experience from 4.5 to 4",
        "clamped basic_information from -0.4 to 0",
    ]


def test_parse_evaluation_rejects_beyond_tolerance() -> None:
    scores, warnings, problem = parse_evaluation("[0.5, 2.6, 2.0, 0.5, 1.0]")
    assert scores is None and warnings == []
    assert "skills score 2.6 is outside [0, 2]" in problem
    assert str(CLAMP_TOLERANCE) in problem


def test_parse_evaluation_rejects_non_finite() -> None:
    scores, _, problem = parse_evaluation("[nan, 1.0, 2.0, 0.5, 1.0]")
    assert scores is None
    assert "not finite" in problem


def test_parse_evaluation_unparseable() -> None:
    scores, _, problem = parse_evaluation("looks great overall")
    assert scores is None
    assert problem == "no five-number score array found in the reply"


# ---------------------------------------------------------------------------
# Retrieval query composition
# ---------------------------------------------------------------------------

def test_retrieval_query_uses_job_only() -> None:
    job = JobPosition("Machine Learning Engineer", JobLevel.SENIOR)
    assert retrieval_query(job) == "Machine Learning Engineer senior"


# ---------------------------------------------------------------------------
# Records
# ---------------------------------------------------------------------------

def test_transcript_validation_and_prompt() -> None:
    t = AgentTranscript("extract", "sys", "user", "reply", True, 1)
    assert t.prompt == "sys\n\nuser"
    with pytest.raises(DomainValidationError):
        AgentTranscript("extract", "s", "u", "r", True, 0)


def test_feedback_report_caps_bullets() -> None:
    with pytest.raises(DomainValidationError):
        FeedbackReport("c", "t", "h", "fine", strengths=("s",) * (MAX_FEEDBACK_BULLETS + 1))
    with pytest.raises(DomainValidationError):
        FeedbackReport("c", "t", "h", "   ")


# ---------------------------------------------------------------------------
# Pipeline over the scripted corpus
# ---------------------------------------------------------------------------

def test_screen_single_resume_end_to_end(mock_gateway) -> None:
    pipeline = make_pipeline(mock_gateway)
    result = pipeline.screen(fixture_resume("r01"), fixture_job("r01"))
    assert result.scores.as_list() == [0.9, 1.8, 3.5, 0.9, 1.6]
    assert result.final.value == pytest.approx(8.7, abs=1e-12)
    assert result.extracted is not None
    assert result.feedback.consolidated
    assert result.feedback.ceo_view and result.feedback.cto_view and result.feedback.hr_view
    assert len(result.retrieval) >= 1
    names = [t.agent_name for t in result.transcripts]
    assert names == [
        "extract", "evaluate", "summarize.ceo", "summarize.cto", "summarize.hr", "consolidate",
    ]


def test_screen_clamps_near_bound_score(mock_gateway) -> None:
    pipeline = make_pipeline(mock_gateway)
    result = pipeline.screen(fixture_resume("r05"), fixture_job("r05"))
    assert result.scores.skills == 2.0
    evaluate = [t for t in result.transcripts if t.agent_name == "evaluate"][-1]
    assert any("clamped skills" in w for w in evaluate.warnings)


def test_screen_repairs_malformed_evaluation(mock_gateway) -> None:
    pipeline = make_pipeline(mock_gateway)
    result = pipeline.screen(fixture_resume("r07"), fixture_job("r07"))
    evaluates = [t for t in result.transcripts if t.agent_name == "evaluate"]
    assert [(t.attempts, t.parsed_ok) for t in evaluates] == [(1, False), (2, True)]
    assert result.scores.as_list() == [0.6, 1.0, 2.1, 0.8, 1.1]


def test_extraction_failure_raises_after_two_repairs() -> None:
    gateway = MockGateway(load_scripts("mock_scripts_broken.json"),
                          embedding_dim=EMBEDDING_DIM, embedding_model=EMBEDDING_MODEL)
    pipeline = make_pipeline(gateway)
    with pytest.raises(ScreeningError) as excinfo:
        pipeline.screen(fixture_resume("r03"), fixture_job("r03"))
    err = excinfo.value
    assert err.stage == "extract"
    assert isinstance(err.cause, ExtractionParseError)
    extract_transcripts = [t for t in err.transcripts if t.agent_name == "extract"]
    assert [t.attempts for t in extract_transcripts] == [1, 2, 3]
    assert not any(t.parsed_ok for t in extract_transcripts)


def test_ablation_prompts_differ_only_in_candidate_section(mock_gateway) -> None:
    normal = make_pipeline(mock_gateway)
    gateway2 = MockGateway(load_scripts(), embedding_dim=EMBEDDING_DIM,
                           embedding_model=EMBEDDING_MODEL)
    ablation = make_pipeline(gateway2, extraction_enabled=False)
    for rid in ("r01", "r02", "r05"):
        resume, job = fixture_resume(rid), fixture_job(rid)
        with_extraction = normal.screen(resume, job)
        without = ablation.screen(resume, job)
        assert without.extracted is None and not without.extraction_enabled
        prompt_a = [t for t in with_extraction.transcripts if t.agent_name == "evaluate"][0]
        prompt_b = [t for t in without.transcripts if t.agent_name == "evaluate"][0]
        marker = "## Candidate"
        assert prompt_a.user_prompt.split(marker)[0] == prompt_b.user_prompt.split(marker)[0]
        assert prompt_a.user_prompt != prompt_b.user_prompt
        assert with_extraction.retrieval.chunks == without.retrieval.chunks


def test_screen_batch_preserves_order_and_isolates_failures() -> None:
    gateway = MockGateway(load_scripts("mock_scripts_broken.json"),
                          embedding_dim=EMBEDDING_DIM, embedding_model=EMBEDDING_MODEL)
    pipeline = make_pipeline(gateway)
    rids = [f"r{i:02d}" for i in range(1, 11)]
    resumes = [fixture_resume(rid) for rid in rids]
    outcomes = screen_batch(pipeline, resumes, lambda r: fixture_job(r.id), concurrency=4)
    assert [o.resume_id for o in outcomes] == rids
    failures = [o for o in outcomes if isinstance(o, ScreeningFailure)]
    assert len(failures) == 1
    failure = failures[0]
    assert failure.resume_id == "r03"
    assert failure.stage == "extract"
    assert failure.error_type == "ExtractionParseError"
    assert failure.transcripts  # partial transcripts retained


def test_screen_batch_rejects_duplicate_ids(mock_gateway) -> None:
    pipeline = make_pipeline(mock_gateway)
    resume = fixture_resume("r01")
    with pytest.raises(DomainValidationError, match="duplicate resume ids: r01"):
        screen_batch(pipeline, [resume, resume], lambda r: fixture_job("r01"))


def test_screen_batch_empty_input(mock_gateway) -> None:
    pipeline = make_pipeline(mock_gateway)
    assert screen_batch(pipeline, [], lambda r: fixture_job("r01")) == []


def test_discussion_rounds_must_cover_views_and_consolidation(mock_gateway) -> None:
    with pytest.raises(DomainValidationError):
        make_pipeline(mock_gateway, discussion_rounds=1)


# ---------------------------------------------------------------------------
# Summarizer failure modes and the refine round
# ---------------------------------------------------------------------------

class _RoleFailingGateway:
    """Delegates to the scripted gateway but fails one role's calls."""

    def __init__(self, inner, marker: str) -> None:
        self._inner = inner
        self._marker = marker
        self.embedding_dim = inner.embedding_dim
        self.embedding_model = inner.embedding_model

    def chat(self, req):
        if self._marker in req.system_prompt:
            raise TransportError(500, "synthetic outage", 1)
        return self._inner.chat(req)

    def embed(self, text):
        return self._inner.embed(text)


def test_role_failure_surfaces_partial_views(mock_gateway) -> None:
    gateway = _RoleFailingGateway(mock_gateway, "HR lead")
    pipeline = make_pipeline(gateway)
    with pytest.raises(ScreeningError) as excinfo:
        pipeline.screen(fixture_resume("r01"), fixture_job("r01"))
    err = excinfo.value
    assert err.stage == "summarize"
    cause = err.cause
    assert isinstance(cause, SummarizationError)
    assert set(cause.partial_views) == {"ceo", "cto"}
    assert "hr view failed" in str(cause)
    # Transcripts for the successful roles are preserved on the wrapper.
    assert any(t.agent_name == "summarize.ceo" for t in err.transcripts)


class _AnsweringGateway:
    """Computes replies from prompt markers; for protocol-shape tests."""

    embedding_dim = EMBEDDING_DIM
    embedding_model = EMBEDDING_MODEL

    def __init__(self, bullets: int = 2) -> None:
        self.bullets = bullets
        self.refine_calls = 0

    def chat(self, req):
        user, system = req.user_prompt, req.system_prompt
        if "[prompt-template summarize-refine/v1]" in user:
            self.refine_calls += 1
            return f"refined take ({self._role(system)})"
        if "[prompt-template summarize/v1]" in user:
            return f"initial take ({self._role(system)})"
        if "[prompt-template consolidate/v1]" in user:
            return json.dumps({
                "consolidated": "overall solid",
                "strengths": [f"s{i}" for i in range(self.bullets)],
                "weaknesses": ["w0"],
            })
        raise AssertionError(f"unexpected prompt: {user[:80]}")

    @staticmethod
    def _role(system: str) -> str:
        for role, marker in (("ceo", "CEO"), ("cto", "CTO"), ("hr", "HR lead")):
            if marker in system:
                return role
        raise AssertionError("unknown role system prompt")

    def embed(self, text):
        return mock_embed(text, dim=EMBEDDING_DIM, model_id=EMBEDDING_MODEL)


def summarize_inputs(mock_gateway):
    pipeline = make_pipeline(mock_gateway)
    resume, job = fixture_resume("r01"), fixture_job("r01")
    extracted, _ = pipeline.extract(resume)
    scores, _, prompt, _ = pipeline.evaluate(extracted, job)
    from resume_screen.models import ScoringWeights, final_score
    final = final_score(scores, ScoringWeights.unit(), job)
    return prompt.profile, scores, final, job


def test_extra_discussion_rounds_refine_views(mock_gateway) -> None:
    profile, scores, final, job = summarize_inputs(mock_gateway)
    gateway = _AnsweringGateway()
    pipeline = ScreeningPipeline(gateway, build_fixture_store(mock_gateway),
                                 retrieval=RETRIEVAL, discussion_rounds=3)
    report, transcripts = pipeline.summarize(profile, scores, final, job)
    assert gateway.refine_calls == 3  # one refine round, all three roles
    assert report.ceo_view == "refined take (ceo)"
    names = [t.agent_name for t in transcripts]
    assert names == [
        "summarize.ceo", "summarize.cto", "summarize.hr",
        "summarize.ceo", "summarize.cto", "summarize.hr",
        "consolidate",
    ]
    refine = [t for t in transcripts if t.attempts == 2 and t.agent_name.startswith("summarize")]
    assert len(refine) == 3
    assert all("initial take (ceo)" in t.user_prompt for t in refine)


def test_consolidation_truncates_excess_bullets(mock_gateway) -> None:
    profile, scores, final, job = summarize_inputs(mock_gateway)
    gateway = _AnsweringGateway(bullets=MAX_FEEDBACK_BULLETS + 3)
    pipeline = ScreeningPipeline(gateway, build_fixture_store(mock_gateway),
                                 retrieval=RETRIEVAL)
    report, transcripts = pipeline.summarize(profile, scores, final, job)
    assert len(report.strengths) == MAX_FEEDBACK_BULLETS
    consolidate = [t for t in transcripts if t.agent_name == "consolidate"][0]
    assert any("truncated strengths" in w for w in consolidate.warnings)
