#!/usr/bin/env python3
"""Regenerate the committed fixture corpus under fixtures/.

The corpus is 10 synthetic resumes, 3 criteria documents, a job manifest,
HR labels, a YAML config, and the mock-provider script files. Scripts are
produced by running the real pipeline against a recording gateway, so every
digest in mock_scripts.json is guaranteed to match what the mock provider
computes at replay time; there is no hand-maintained prompt copy to drift.

Covered chains:
  - normal mode (extraction on) for all 10 resumes, including one near-bound
    score that exercises the clamp rule (r05) and one junk first evaluator
    reply that exercises the repair call (r07)
  - ablation mode (extraction off) for all 10 resumes
  - role probes: every resume evaluated as junior and as leadership with the
    work-experience score strictly higher for the junior variant
  - a broken variant (mock_scripts_broken.json) where r03's extractor replies
    are garbage through all repair attempts, for failure-isolation tests

Run from the repository root:  python3 tools/gen_fixtures.py
"""

from __future__ import annotations

import json
import re
import sys
from pathlib import Path

ROOT = Path(__file__).resolve().parent.parent
sys.path.insert(0, str(ROOT / "src"))

from resume_screen.agents import ScreeningPipeline, ScreeningResult, retrieval_query, screen_batch
from resume_screen.errors import ScreeningError
from resume_screen.gateway import mock_embed, prompt_digest, MockGateway
from resume_screen.models import JobLevel, JobPosition, Resume
from resume_screen.prompts import TemplateSet
from resume_screen.store import KnowledgeStore, RetrievalConfig, SourceDocument

FIXTURES = ROOT / "fixtures"
EMBEDDING_DIM = 256
EMBEDDING_MODEL = "mock-embed"
RETRIEVAL = RetrievalConfig(tau=0.3, top_k_cap=8, chunk_size_chars=800, chunk_overlap_chars=120)
PROBE_LEVELS = ("junior", "leadership")

# ------------------------------------------------------------------
# Criteria documents: each role paragraph repeats its title and level words
# so the job-built retrieval query clears the 0.3 relevance threshold.
# ------------------------------------------------------------------

CRITERIA = {
    "engineering-rubric": """\
Engineering hiring rubric

Data engineer openings: a senior data engineer owns data pipelines end to end.
The data engineer we hire, junior data engineer or senior data engineer alike,
must show fluency in SQL and Python; a senior engineer additionally shows
warehouse modeling judgment and mentors the junior engineer bench. Leadership
expectations apply when a data engineer moves toward platform ownership.

Software engineer openings: the software engineer ladder spans junior software
engineer, mid software engineer, senior software engineer, and leadership
roles. A mid software engineer ships features independently; a senior software
engineer sets design direction. Judge the software engineer on code quality,
testing discipline, and the seniority the engineer is applying for.

Machine learning engineer openings: a machine learning engineer, whether a
junior machine learning engineer or a senior machine learning engineer, is
scored on modeling rigor and deployment experience. The senior machine
learning engineer must show production learning systems; leadership in
machine learning adds research-to-product judgment.

DevOps engineer openings: the devops engineer keeps delivery reliable. A mid
devops engineer automates builds and deploys; a senior devops engineer designs
the platform. Score the devops engineer on infrastructure-as-code depth, from
junior devops engineer fundamentals up to leadership of the devops practice.
""",
    "leadership-and-product": """\
Leadership and product criteria

Product manager openings: a product manager at leadership level owns outcomes
across teams. The product manager must show discovery habits and delivery
judgment; a senior product manager or leadership product manager is expected
to set strategy, while a junior product manager learns the craft under
supervision. Weigh the product manager's stakeholder record heavily for
leadership scope.

Engineering director openings: the engineering director is a leadership role.
An engineering director grows managers and sets technical direction; the
engineering director we seek pairs delivery leadership with calm judgment.
Score the engineering director on org design, hiring record, and how the
director handles incidents. Director and leadership candidates with thin
management history should score modestly on work experience.

General leadership guidance: for junior openings, reward trajectory over
scope; for senior and leadership openings, expect evidence of ownership.
Work experience is calibrated to the level applied for: the same history that
is strong for a junior candidate is thin for a leadership candidate.
""",
    "early-career-guidelines": """\
Early-career and quality guidelines

Frontend developer openings: a junior frontend developer is scored on
fundamentals. The frontend developer must know HTML, CSS, and JavaScript; a
junior frontend developer with a tidy portfolio outranks one with buzzwords.
For the frontend developer track, reward accessibility awareness and the
junior developer's learning pace; a senior frontend developer adds
architecture judgment.

QA analyst openings: the QA analyst guards release quality. A junior QA
analyst writes clear defect reports; the QA analyst we hire shows curiosity
and method. Score the QA analyst on test design, regression discipline, and
tooling comfort, from junior QA analyst up to senior QA analyst.

Shared early-career guidance: for junior roles, education background and
self-evaluation carry more signal than long work experience. A junior
candidate with one internship and strong fundamentals can score well; the
same record applying for senior or leadership scope scores low on work
experience.
""",
}

# ------------------------------------------------------------------
# Candidate plans: literal, reviewable, deterministic.
# hr = ground-truth label scores; ai = the evaluator reply array (r05 carries
# a deliberate 2.1 that the pipeline clamps to 2.0).
# ------------------------------------------------------------------

PLANS = [
    dict(
        rid="r01", name="Mara Lindqvist", title="Data Engineer", level="senior",
        hint="Data Engineer", style="plain",
        self_eval="Thorough pipeline engineer who automates the boring parts and documents the rest.",
        skills=["Python", "SQL", "Spark", "Airflow", "data modeling"],
        work=[("Northwind Analytics", 48, "Built batch and streaming data pipelines feeding the finance warehouse."),
              ("Harborline Retail", 30, "Owned SQL warehouse models and nightly load reliability.")],
        education=[("Uppsala University", "MSc", "Computer Science")],
        basic={"email": "mara.lindqvist@example.com", "location": "Gothenburg", "phone": "+46-70-555-0141"},
        hr=[0.8, 1.7, 3.4, 0.9, 1.7], ai=[0.9, 1.8, 3.5, 0.9, 1.6],
    ),
    dict(
        rid="r02", name="Deniz Acar", title="Software Engineer", level="mid",
        hint=None, style="fenced",
        self_eval="Product-minded developer, happiest pairing on tricky backend bugs.",
        skills=["Java", "Spring", "PostgreSQL", "REST APIs"],
        work=[("Kestrel Logistics", 36, "Shipped the shipment-tracking service and its public API.")],
        education=[("Ege University", "BSc", "Software Engineering")],
        basic={"email": "deniz.acar@example.com", "location": "Izmir"},
        hr=[0.6, 1.2, 2.5, 0.8, 1.3], ai=[0.5, 1.3, 2.4, 0.7, 1.4],
    ),
    dict(
        rid="r03", name="Priya Raghunathan", title="Machine Learning Engineer", level="senior",
        hint="ML Engineer", style="prose",
        self_eval="I take models from notebook to production and keep them honest with monitoring.",
        skills=["Python", "PyTorch", "scikit-learn", "MLOps", "feature stores", "model monitoring"],
        work=[("Veridian Health", 54, "Led the readmission-risk model line from prototype to production."),
              ("Quantack Labs", 28, "Built training pipelines and drift monitoring for ranking models.")],
        education=[("IIT Madras", "MTech", "Machine Learning"), ("Anna University", "BE", "Electronics")],
        basic={"email": "priya.raghunathan@example.com", "location": "Chennai", "phone": "+91-98-5550-1203"},
        hr=[0.9, 1.8, 3.7, 0.9, 1.8], ai=[0.9, 1.9, 3.8, 1.0, 1.7],
    ),
    dict(
        rid="r04", name="Tomas Herrera", title="Frontend Developer", level="junior",
        hint=None, style="plain",
        self_eval="Recent graduate who ships small, accessible interfaces and asks good questions.",
        skills=["JavaScript", "TypeScript", "React", "CSS"],
        work=[("Solvia Media", 10, "Built landing pages and a component library during an internship.")],
        education=[("Universidad de Valparaiso", "BSc", "Informatics")],
        basic={"email": "tomas.herrera@example.com", "location": "Valparaiso"},
        hr=[0.4, 0.9, 1.6, 0.7, 1.0], ai=[0.5, 0.8, 1.8, 0.6, 1.1],
    ),
    dict(
        rid="r05", name="Yuki Hamasaki", title="Product Manager", level="leadership",
        hint="Head of Product", style="plain",
        self_eval="Outcome-driven product leader; I keep teams pointed at the few metrics that matter.",
        skills=["product strategy", "roadmapping", "user research", "A/B testing", "stakeholder management"],
        work=[("Aster Mobility", 60, "Directed the rider-growth product group across three squads."),
              ("Kanal Commerce", 42, "Owned checkout and payments; doubled conversion over two years.")],
        education=[("Keio University", "MBA", "Business Administration")],
        basic={"email": "yuki.hamasaki@example.com", "location": "Yokohama", "phone": "+81-80-5550-0707"},
        hr=[0.7, 1.5, 2.9, 0.8, 1.5], ai=[0.8, 2.1, 3.0, 0.8, 1.4],
    ),
    dict(
        rid="r06", name="Agnes Okafor", title="QA Analyst", level="junior",
        hint=None, style="fenced",
        self_eval="Curious tester; I write defect reports people thank me for.",
        skills=["test design", "Selenium", "API testing"],
        work=[("Bluepeak Systems", 8, "Ran regression suites and triaged defects for the billing team.")],
        education=[("University of Lagos", "BSc", "Computer Science")],
        basic={"email": "agnes.okafor@example.com", "location": "Lagos"},
        hr=[0.3, 0.7, 1.1, 0.6, 0.8], ai=[0.2, 0.8, 1.3, 0.7, 0.9],
    ),
    dict(
        rid="r07", name="Petr Zeman", title="DevOps Engineer", level="mid",
        hint=None, style="plain",
        self_eval="I automate deploys until releases are boring, then I automate the monitoring.",
        skills=["Kubernetes", "Terraform", "CI/CD", "AWS", "Bash"],
        work=[("Cobalt Fintech", 30, "Moved the platform to infrastructure-as-code and cut deploy time."),
              ("Orion Hosting", 18, "Operated build agents and on-call rotations.")],
        education=[("Czech Technical University", "BSc", "Information Systems")],
        basic={"email": "petr.zeman@example.com", "location": "Brno"},
        hr=[0.5, 1.1, 2.2, 0.7, 1.2], ai=[0.6, 1.0, 2.1, 0.8, 1.1],
    ),
    dict(
        rid="r08", name="Helene Fournier", title="Engineering Director", level="leadership",
        hint="Director of Engineering", style="prose",
        self_eval="I grow managers, keep delivery predictable, and stay calm in incidents.",
        skills=["org design", "hiring", "technical strategy", "incident management"],
        work=[("Meridian Bank", 66, "Directed four teams across payments; built the manager bench."),
              ("Calla Software", 48, "Managed the platform group through a re-architecture.")],
        education=[("INSA Lyon", "MEng", "Computer Engineering")],
        basic={"email": "helene.fournier@example.com", "location": "Lyon", "phone": "+33-6-55-50-2288"},
        hr=[0.8, 1.6, 3.1, 0.9, 1.6], ai=[0.7, 1.7, 3.2, 0.8, 1.7],
    ),
    dict(
        rid="r09", name="Sam Beaulieu", title="Frontend Developer", level="junior",
        hint=None, style="plain",
        self_eval="Self-taught and eager; my portfolio is small but every page in it is mine.",
        skills=["HTML", "CSS", "JavaScript"],
        work=[("Freelance", 6, "Built sites for two local shops, including a small booking form.")],
        education=[("Cegep de Sainte-Foy", "DEC", "Web Development")],
        basic={"email": "sam.beaulieu@example.com", "location": "Quebec City"},
        hr=[0.2, 0.5, 0.9, 0.5, 0.7], ai=[0.3, 0.4, 1.0, 0.4, 0.6],
    ),
    dict(
        rid="r10", name="Ilya Brandt", title="Software Engineer", level="mid",
        hint=None, style="fenced",
        self_eval="Backend generalist; I like deleting code more than writing it.",
        skills=["Go", "gRPC", "Redis", "PostgreSQL"],
        work=[("Femto Games", 32, "Maintained matchmaking services under seasonal load spikes."),
              ("Arcadia Tools", 14, "Built internal CLIs for the release team.")],
        education=[("University of Tartu", "BSc", "Computer Science")],
        basic={"email": "ilya.brandt@example.com", "location": "Tartu"},
        hr=[0.6, 1.3, 2.6, 0.8, 1.4], ai=[0.7, 1.2, 2.7, 0.7, 1.3],
    ),
]

# r10 is deliberately absent from the manifest's per-resume entries so the
# manifest default path gets exercised end to end.
MANIFEST_DEFAULT = {"title": "Software Engineer", "level": "mid"}

# Garbage extractor replies for the broken variant: never a parseable object.
BROKEN_REPLIES = [
    "I could not find any structured data in this resume, sorry!",
    "{'position': this is not JSON at all",
    "```\nstill not json\n```",
]


# ------------------------------------------------------------------
# Rendering planned data into fixture content
# ------------------------------------------------------------------

def resume_text(plan: dict) -> str:
    lines = [plan["name"]]
    contact = " | ".join(plan["basic"][k] for k in ("location", "email", "phone") if k in plan["basic"])
    lines += [contact, "", "OBJECTIVE",
              f"Seeking a {plan['title']} position ({plan['level']} level).", "",
              "SELF-EVALUATION", plan["self_eval"], "", "SKILLS"]
    lines += [f"- {skill}" for skill in plan["skills"]]
    lines += ["", "WORK EXPERIENCE"]
    for company, months, responsibilities in plan["work"]:
        lines.append(f"- {company} ({months} months): {responsibilities}")
    lines += ["", "EDUCATION"]
    for institution, degree, field in plan["education"]:
        lines.append(f"- {degree} in {field}, {institution}")
    return "\n".join(lines) + "\n"


def extraction_payload(plan: dict) -> dict:
    return {
        "position": {"title": plan["title"], "level": plan["level"]},
        "self_evaluation": plan["self_eval"],
        "skills_specialties": list(plan["skills"]),
        "work_experience": [
            {"company": company, "duration_months": months, "responsibilities": responsibilities}
            for company, months, responsibilities in plan["work"]
        ],
        "basic_information": {"name": plan["name"], **plan["basic"]},
        "education": [
            {"institution": institution, "degree": degree, "field_of_study": field}
            for institution, degree, field in plan["education"]
        ],
    }


def extraction_reply(plan: dict) -> str:
    body = json.dumps(extraction_payload(plan), indent=2)
    style = plan["style"]
    if style == "fenced":
        return f"```json\n{body}\n```"
    if style == "prose":
        return f"Here is the structured candidate record you asked for:\n\n{body}\n\nLet me know if anything is missing."
    return body


def eval_reply(scores: list[float]) -> str:
    return json.dumps(scores)


def view_text(role: str, plan: dict) -> str:
    name = plan["name"]
    title = plan["title"]
    if role == "ceo":
        return (f"{name} shows the kind of ownership I want near the {title} roadmap; "
                f"the trajectory here suggests growth beyond the current scope.")
    if role == "cto":
        return (f"Technically, {name} covers what the {title} role demands; "
                f"the depth in {plan['skills'][0]} stands out and nothing in the history alarms me.")
    return (f"{name} communicates clearly and the history suggests steady collaboration; "
            f"I see no cultural-fit concerns for the {title} opening.")


def consolidation_reply(plan: dict) -> str:
    name = plan["name"]
    return json.dumps({
        "consolidated": (
            f"The panel agrees {name} is a credible candidate for the {plan['title']} opening: "
            f"technically sound per the CTO, with the ownership the CEO looks for and no "
            f"people-risk flags from HR. Proceed to interview with attention to the weaknesses below."
        ),
        "strengths": [
            f"Hands-on depth in {plan['skills'][0]}",
            "Track record of finishing what they start",
            "Clear, verifiable work history",
        ],
        "weaknesses": [
            "Breadth beyond the core stack is limited",
            "Scope of past roles is smaller than the opening's ceiling",
        ],
    })


def clamped(scores: list[float]) -> list[float]:
    bounds = [(0, 1), (0, 2), (0, 4), (0, 1), (0, 2)]
    return [min(max(v, low), high) for v, (low, high) in zip(scores, bounds)]


def probe_scores(plan: dict, level: str) -> list[float]:
    base = clamped(plan["ai"])
    if level == plan["level"]:
        # Same applied level means the probe prompt is byte-identical to the
        # normal chain's, so it must replay the normal chain's outcome.
        return base
    work = base[2]
    if level == "junior":
        work = min(4.0, round(work + 0.5, 1))
    else:
        work = max(0.0, round(work - 1.0, 1))
    return [base[0], base[1], work, base[3], base[4]]


# ------------------------------------------------------------------
# Recording gateway: answers from the plan, records digest -> reply
# ------------------------------------------------------------------

class ScriptingGateway:
    """Chat gateway that computes replies on demand and records them."""

    def __init__(self) -> None:
        self.scripts: dict[str, str] = {}
        self.answer = None

    def chat(self, req) -> str:
        reply = self.answer(req)
        self.scripts[prompt_digest(req.system_prompt, req.user_prompt)] = reply
        return reply

    def embed(self, text: str):
        return mock_embed(text, dim=EMBEDDING_DIM, model_id=EMBEDDING_MODEL)


def make_answerer(plan: dict, eval_arrays: dict[str, list[float]] | None = None,
                  junk_first_eval: bool = False,
                  extraction_replies: list[str] | None = None):
    """Reply chooser for one resume's chains.

    ``eval_arrays`` maps the job level seen in the prompt to the reply array
    (used for role probes); without it the plan's own array answers.
    ``extraction_replies`` overrides extractor output per attempt (broken
    variant). Role calls are identified by their system prompts, so the
    summarizer's parallel round needs no shared state.
    """
    state = {"extract": 0, "evaluate": 0}

    def answer(req) -> str:
        user = req.user_prompt
        system = req.system_prompt
        if "[prompt-template extract/v1]" in user or "[prompt-template extract-repair/v1]" in user:
            index = min(state["extract"], 2)
            state["extract"] += 1
            if extraction_replies is not None:
                return extraction_replies[index]
            return extraction_reply(plan)
        if "[prompt-template evaluate/v1]" in user:
            state["evaluate"] += 1
            if junk_first_eval and state["evaluate"] == 1:
                return "Strong operations background overall; I would hire."
            return eval_reply(_eval_array_for(user))
        if "[prompt-template evaluate-repair/v1]" in user:
            return eval_reply(_eval_array_for(user))
        if "[prompt-template summarize/v1]" in user or "[prompt-template summarize-refine/v1]" in user:
            for role, marker in (("ceo", "CEO"), ("cto", "CTO"), ("hr", "HR lead")):
                if marker in system:
                    return view_text(role, plan)
            raise AssertionError(f"unrecognized summarizer system prompt: {system[:80]}")
        if "[prompt-template consolidate/v1]" in user:
            return consolidation_reply(plan)
        raise AssertionError(f"unrecognized prompt: {user[:120]}")

    def _eval_array_for(user: str) -> list[float]:
        if eval_arrays is None:
            return plan["ai"]
        # The applied level must come from the position line; the profile can
        # mention a different level for the candidate's own stated target.
        match = re.search(
            r"## Applied position\n.+\((junior|mid|senior|leadership) level\)", user
        )
        assert match, "no applied-position line in evaluator prompt"
        return eval_arrays[match.group(1)]

    return answer


# ------------------------------------------------------------------
# Generation
# ------------------------------------------------------------------

def build_store(gateway) -> KnowledgeStore:
    store = KnowledgeStore(gateway, dim=EMBEDDING_DIM, model_id=EMBEDDING_MODEL)
    for doc_id in sorted(CRITERIA):
        store.index(SourceDocument(doc_id=doc_id, title=f"{doc_id}.txt", body=CRITERIA[doc_id]), RETRIEVAL)
    return store


def write_static_files() -> None:
    (FIXTURES / "criteria").mkdir(parents=True, exist_ok=True)
    (FIXTURES / "resumes").mkdir(parents=True, exist_ok=True)
    for doc_id, body in CRITERIA.items():
        (FIXTURES / "criteria" / f"{doc_id}.txt").write_text(body, encoding="utf-8")
    for plan in PLANS:
        (FIXTURES / "resumes" / f"{plan['rid']}.txt").write_text(resume_text(plan), encoding="utf-8")

    manifest = {
        "default": MANIFEST_DEFAULT,
        "resumes": {
            plan["rid"]: {
                "title": plan["title"],
                "level": plan["level"],
                **({"hint": plan["hint"]} if plan["hint"] else {}),
            }
            for plan in PLANS
            if plan["rid"] != "r10"
        },
    }
    (FIXTURES / "manifest.json").write_text(
        json.dumps(manifest, indent=2, ensure_ascii=False) + "\n", encoding="utf-8"
    )

    with open(FIXTURES / "labels.jsonl", "w", encoding="utf-8") as fh:
        for plan in PLANS:
            fh.write(json.dumps({"resume_id": plan["rid"], "scores": plan["hr"]}) + "\n")

    config = f"""\
provider:
  base_url: mock:mock_scripts.json
  chat_model: mock-chat
  embedding_model: {EMBEDDING_MODEL}
  embedding_dim: {EMBEDDING_DIM}
retrieval:
  tau: {RETRIEVAL.tau}
  top_k_cap: {RETRIEVAL.top_k_cap}
  chunk_size_chars: {RETRIEVAL.chunk_size_chars}
  chunk_overlap_chars: {RETRIEVAL.chunk_overlap_chars}
mode:
  extraction: true
paths:
  store: out/criteria.store
  output_dir: out
concurrency: 4
"""
    (FIXTURES / "config.yaml").write_text(config, encoding="utf-8")


def job_for(plan: dict) -> JobPosition:
    return JobPosition(plan["title"], JobLevel.parse(plan["level"]))


def resume_for(plan: dict) -> Resume:
    return Resume(
        id=plan["rid"],
        raw_text=(FIXTURES / "resumes" / f"{plan['rid']}.txt").read_text(encoding="utf-8"),
        applied_position_hint=plan["hint"],
    )


def record_all() -> tuple[dict[str, str], dict[str, str]]:
    gateway = ScriptingGateway()
    store = build_store(gateway)

    queries = {retrieval_query(job_for(plan)) for plan in PLANS}
    for plan in PLANS:
        for level in PROBE_LEVELS:
            queries.add(retrieval_query(JobPosition(plan["title"], JobLevel.parse(level))))
    for query in sorted(queries):
        hits = store.retrieve(query, RETRIEVAL)
        assert len(hits) >= 1, f"query {query!r} retrieves nothing above tau={RETRIEVAL.tau}"

    templates = TemplateSet()

    def pipeline(extraction: bool) -> ScreeningPipeline:
        return ScreeningPipeline(gateway, store, retrieval=RETRIEVAL, templates=templates,
                                 extraction_enabled=extraction)

    normal = pipeline(True)
    ablation = pipeline(False)
    eval_prompts: dict[str, dict[bool, str]] = {}

    for plan in PLANS:
        resume = resume_for(plan)
        job = job_for(plan)
        gateway.answer = make_answerer(plan, junk_first_eval=(plan["rid"] == "r07"))
        result = normal.screen(resume, job)
        assert result.scores.as_list() == clamped(plan["ai"]), plan["rid"]
        eval_prompts.setdefault(plan["rid"], {})[True] = _eval_user_prompt(result)

        gateway.answer = make_answerer(plan)
        ablation_result = ablation.screen(resume, job)
        assert ablation_result.extracted is None
        eval_prompts[plan["rid"]][False] = _eval_user_prompt(ablation_result)

        for level in PROBE_LEVELS:
            if level == plan["level"]:
                continue  # already recorded by the normal chain above
            probe_job = JobPosition(plan["title"], JobLevel.parse(level))
            gateway.answer = make_answerer(
                plan, eval_arrays={one: probe_scores(plan, one) for one in PROBE_LEVELS}
            )
            extracted, _ = normal.extract(resume)
            scores, _, _, _ = normal.evaluate(extracted, probe_job)
            assert scores.as_list() == probe_scores(plan, level), (plan["rid"], level)

        junior = probe_scores(plan, "junior")[2]
        leadership = probe_scores(plan, "leadership")[2]
        assert junior > leadership, (plan["rid"], junior, leadership)

    for plan in PLANS:
        with_extraction = eval_prompts[plan["rid"]][True]
        without = eval_prompts[plan["rid"]][False]
        marker = "## Candidate"
        assert with_extraction.split(marker)[0] == without.split(marker)[0], plan["rid"]

    scripts = dict(gateway.scripts)

    broken_plan = next(plan for plan in PLANS if plan["rid"] == "r03")
    gateway.answer = make_answerer(broken_plan, extraction_replies=BROKEN_REPLIES)
    try:
        normal.screen(resume_for(broken_plan), job_for(broken_plan))
    except Exception as exc:
        assert type(exc).__name__ == "ScreeningError", exc
    else:
        raise AssertionError("broken extraction chain unexpectedly succeeded")
    broken_scripts = dict(gateway.scripts)
    return scripts, broken_scripts


def _eval_user_prompt(result: ScreeningResult) -> str:
    prompts = [t.user_prompt for t in result.transcripts
               if t.agent_name == "evaluate" and t.attempts == 1]
    assert len(prompts) == 1
    return prompts[0]


def replay_check(scripts: dict[str, str], broken: dict[str, str]) -> None:
    """Re-run everything through the real mock gateway as the tests will."""
    gateway = MockGateway(scripts, embedding_dim=EMBEDDING_DIM, embedding_model=EMBEDDING_MODEL)
    store = build_store(gateway)
    resumes = [resume_for(plan) for plan in PLANS]
    jobs = {plan["rid"]: job_for(plan) for plan in PLANS}

    normal = ScreeningPipeline(gateway, store, retrieval=RETRIEVAL, extraction_enabled=True)
    outcomes = screen_batch(normal, resumes, lambda r: jobs[r.id], concurrency=4)
    assert all(isinstance(outcome, ScreeningResult) for outcome in outcomes), outcomes
    for plan, outcome in zip(PLANS, outcomes):
        assert outcome.scores.as_list() == clamped(plan["ai"])

    ablation = ScreeningPipeline(gateway, store, retrieval=RETRIEVAL, extraction_enabled=False)
    ablation_outcomes = screen_batch(ablation, resumes, lambda r: jobs[r.id], concurrency=4)
    assert all(isinstance(outcome, ScreeningResult) for outcome in ablation_outcomes)

    for plan, resume in zip(PLANS, resumes):
        extracted, _ = normal.extract(resume)
        for level in PROBE_LEVELS:
            probe_job = JobPosition(plan["title"], JobLevel.parse(level))
            scores, _, _, _ = normal.evaluate(extracted, probe_job)
            assert scores.as_list() == probe_scores(plan, level)

    broken_gateway = MockGateway(broken, embedding_dim=EMBEDDING_DIM, embedding_model=EMBEDDING_MODEL)
    broken_store = build_store(broken_gateway)
    broken_pipeline = ScreeningPipeline(broken_gateway, broken_store, retrieval=RETRIEVAL)
    broken_outcomes = screen_batch(broken_pipeline, resumes, lambda r: jobs[r.id], concurrency=4)
    failures = [o for o in broken_outcomes if not isinstance(o, ScreeningResult)]
    assert len(failures) == 1 and failures[0].resume_id == "r03", failures
    assert failures[0].stage == "extract"


def main() -> int:
    write_static_files()
    scripts, broken_scripts = record_all()
    (FIXTURES / "mock_scripts.json").write_text(
        json.dumps(scripts, indent=2, sort_keys=True, ensure_ascii=False) + "\n",
        encoding="utf-8",
    )
    (FIXTURES / "mock_scripts_broken.json").write_text(
        json.dumps(broken_scripts, indent=2, sort_keys=True, ensure_ascii=False) + "\n",
        encoding="utf-8",
    )
    replay_check(scripts, broken_scripts)
    print(f"wrote {len(PLANS)} resumes, {len(CRITERIA)} criteria docs")
    print(f"mock scripts: {len(scripts)} entries (+{len(broken_scripts) - len(scripts)} broken-variant)")
    return 0


if __name__ == "__main__":
    sys.exit(main())
