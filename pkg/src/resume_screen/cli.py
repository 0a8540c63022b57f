"""Command-line surface: index criteria, screen resumes, evaluate, report.

Exit codes are fixed so scripted pipelines can branch on them:
  0  success
  2  preflight, ingestion, or join failure (bad config, unreadable input,
     missing store, unmatched label ids)
  3  partial failure: some resumes screened, at least one failed
  4  zero resumes screened successfully
  5  insufficient data: no requested percentile could produce correlations

All outputs are UTF-8. Batch results are JSONL, one record per resume, in
input order, with no timing fields, so a mock-provider run is byte-identical
across repeats.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

from .agents import (
    ScreeningFailure,
    ScreeningPipeline,
    ScreeningResult,
    screen_batch,
)
from .config import AppConfig, load_config
from .errors import ConfigError, ResumeScreenError
from .gateway import make_gateway
from .metrics import (
    EvaluationRecord,
    evaluate_run,
    make_record,
    render_table,
    report_from_dict,
    report_to_dict,
    write_category_scatter_csv,
    write_histogram_csv,
    write_scatter_csv,
)
from .models import (
    ExtractedResume,
    JobLevel,
    JobPosition,
    Resume,
    final_score,
    serialize_scores,
    validate_score_vector,
)
from .prompts import TemplateSet
from .store import KnowledgeStore, SourceDocument

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_PREFLIGHT = 2
EXIT_PARTIAL = 3
EXIT_NO_SUCCESS = 4
EXIT_INSUFFICIENT = 5

DEFAULT_PERCENTILES = "10,15,20"


def _fail(message: str) -> int:
    print(f"error: {message}", file=sys.stderr)
    return EXIT_PREFLIGHT


# ------------------------------------------------------------------
# Serialization of screening output
# ------------------------------------------------------------------

def _extracted_to_dict(extracted: ExtractedResume) -> dict:
    return {
        "position": {
            "title": extracted.position.title,
            "level": extracted.position.level.value,
        },
        "self_evaluation": extracted.self_evaluation,
        "skills_specialties": list(extracted.skills_specialties),
        "work_experience": [
            {
                "company": entry.company,
                "duration_months": entry.duration_months,
                "responsibilities": entry.responsibilities,
            }
            for entry in extracted.work_experience
        ],
        "basic_information": dict(extracted.basic_information),
        "education": [
            {
                "institution": entry.institution,
                "degree": entry.degree,
                "field_of_study": entry.field_of_study,
            }
            for entry in extracted.education
        ],
    }


def result_to_record(result: ScreeningResult, config: AppConfig) -> dict:
    """JSONL record for one screened resume.

    Scores are the one-decimal wire form and ``final`` is recomputed from
    them, so a reader can verify the record arithmetic with nothing but the
    record and the configured weights.
    """
    wire_scores = serialize_scores(result.scores)
    wire_final = final_score(
        validate_score_vector(wire_scores), config.effective_weights(), result.job
    ).value
    warnings = [w for transcript in result.transcripts for w in transcript.warnings]
    return {
        "resume_id": result.resume_id,
        "status": "ok",
        "job": {"title": result.job.title, "level": result.job.level.value},
        "extraction_enabled": result.extraction_enabled,
        "extracted": (
            _extracted_to_dict(result.extracted) if result.extracted is not None else None
        ),
        "scores": wire_scores,
        "final": round(wire_final, 4),
        "feedback": {
            "ceo_view": result.feedback.ceo_view,
            "cto_view": result.feedback.cto_view,
            "hr_view": result.feedback.hr_view,
            "consolidated": result.feedback.consolidated,
            "strengths": list(result.feedback.strengths),
            "weaknesses": list(result.feedback.weaknesses),
        },
        "retrieval": {
            "query": result.retrieval.query_text,
            "chunks": [
                {"chunk_id": chunk.chunk_id, "similarity": round(sim, 4)}
                for chunk, sim in result.retrieval.chunks
            ],
        },
        "warnings": warnings,
    }


def failure_to_record(failure: ScreeningFailure) -> dict:
    return {
        "resume_id": failure.resume_id,
        "status": "failed",
        "stage": failure.stage,
        "error_type": failure.error_type,
        "message": failure.message,
    }


def _transcripts_payload(resume_id: str, status: str, transcripts) -> dict:
    return {
        "resume_id": resume_id,
        "status": status,
        "transcripts": [
            {
                "agent_name": t.agent_name,
                "attempts": t.attempts,
                "parsed_ok": t.parsed_ok,
                "system_prompt": t.system_prompt,
                "user_prompt": t.user_prompt,
                "raw_response": t.raw_response,
                "warnings": list(t.warnings),
            }
            for t in transcripts
        ],
    }


# ------------------------------------------------------------------
# Input loading
# ------------------------------------------------------------------

def _read_jsonl(path: Path) -> list[dict]:
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read {path}: {exc}") from exc
    rows: list[dict] = []
    for lineno, line in enumerate(text.splitlines(), start=1):
        if not line.strip():
            continue
        try:
            obj = json.loads(line)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"{path}:{lineno}: invalid JSON: {exc}") from exc
        if not isinstance(obj, dict):
            raise ConfigError(f"{path}:{lineno}: expected a JSON object per line")
        rows.append(obj)
    return rows


def _load_resumes(paths: list[str], hints: dict[str, str]) -> list[Resume]:
    resumes = []
    seen: set[str] = set()
    for path_str in paths:
        path = Path(path_str)
        try:
            text = path.read_text(encoding="utf-8")
        except OSError as exc:
            raise ConfigError(f"cannot read resume {path}: {exc}") from exc
        resume_id = path.stem
        if resume_id in seen:
            raise ConfigError(f"duplicate resume id {resume_id!r} (from {path})")
        seen.add(resume_id)
        resumes.append(Resume(
            id=resume_id,
            raw_text=text,
            applied_position_hint=hints.get(resume_id),
        ))
    return resumes


def _load_manifest(path: str | None) -> tuple[dict | None, dict[str, dict]]:
    """Returns (default entry, per-resume entries); both may be empty."""
    if path is None:
        return None, {}
    manifest_path = Path(path)
    try:
        raw = json.loads(manifest_path.read_text(encoding="utf-8"))
    except OSError as exc:
        raise ConfigError(f"cannot read manifest {manifest_path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"manifest {manifest_path} is not valid JSON: {exc}") from exc
    if not isinstance(raw, dict):
        raise ConfigError(f"manifest {manifest_path} must be a JSON object")
    unknown = sorted(set(raw) - {"default", "resumes"})
    if unknown:
        raise ConfigError(f"manifest {manifest_path}: unknown key(s): {', '.join(unknown)}")
    default = raw.get("default")
    entries = raw.get("resumes", {})
    if default is not None and not isinstance(default, dict):
        raise ConfigError(f"manifest {manifest_path}: 'default' must be an object")
    if not isinstance(entries, dict):
        raise ConfigError(f"manifest {manifest_path}: 'resumes' must be an object")
    for resume_id, entry in entries.items():
        if not isinstance(entry, dict):
            raise ConfigError(f"manifest entry {resume_id!r} must be an object")
        bad = sorted(set(entry) - {"title", "level", "hint"})
        if bad:
            raise ConfigError(f"manifest entry {resume_id!r}: unknown key(s): {', '.join(bad)}")
    return default, entries


def _resolve_jobs(
    resumes: list[Resume],
    default: dict | None,
    entries: dict[str, dict],
    cli_title: str | None,
    cli_level: str | None,
) -> dict[str, JobPosition]:
    """Per-resume job: manifest entry, then manifest default, then CLI flags."""
    default = default or {}
    jobs: dict[str, JobPosition] = {}
    for resume in resumes:
        entry = entries.get(resume.id, {})
        title = entry.get("title") or default.get("title") or cli_title
        level = entry.get("level") or default.get("level") or cli_level
        if not title or not level:
            raise ConfigError(
                f"no job for resume {resume.id!r}: supply a manifest entry, a manifest "
                f"default, or --job-title/--job-level"
            )
        jobs[resume.id] = JobPosition(title=str(title), level=JobLevel.parse(str(level)))
    return jobs


# ------------------------------------------------------------------
# Subcommands
# ------------------------------------------------------------------

def cmd_index(args: argparse.Namespace) -> int:
    config = load_config(args.config)
    documents: list[SourceDocument] = []
    seen: set[str] = set()
    for path_str in args.criteria:
        path = Path(path_str)
        try:
            body = path.read_text(encoding="utf-8")
        except OSError as exc:
            return _fail(f"cannot read criteria document {path}: {exc}")
        if path.stem in seen:
            return _fail(f"duplicate criteria document id {path.stem!r} (from {path})")
        seen.add(path.stem)
        try:
            documents.append(SourceDocument(doc_id=path.stem, title=path.name, body=body))
        except ResumeScreenError as exc:
            return _fail(f"criteria document {path}: {exc}")

    gateway = make_gateway(config.provider)
    store = KnowledgeStore(
        gateway,
        dim=config.provider.embedding_dim,
        model_id=config.provider.embedding_model,
    )
    for document in documents:
        count = store.index(document, config.retrieval)
        print(f"{document.doc_id}: {count} chunks")
    config.store_path.parent.mkdir(parents=True, exist_ok=True)
    store.save(config.store_path)
    print(f"indexed {len(store)} chunks into {config.store_path}")
    return EXIT_OK


def cmd_screen(args: argparse.Namespace) -> int:
    config = load_config(args.config)
    if not config.store_path.is_file():
        return _fail(f"knowledge store not found: {config.store_path} (run 'index' first)")

    default, entries = _load_manifest(args.manifest)
    hints = {
        resume_id: entry["hint"]
        for resume_id, entry in entries.items()
        if isinstance(entry.get("hint"), str)
    }
    resumes = _load_resumes(args.resumes, hints)
    jobs = _resolve_jobs(resumes, default, entries, args.job_title, args.job_level)

    gateway = make_gateway(config.provider)
    store = KnowledgeStore.load(config.store_path, gateway)
    if store.model_id != config.provider.embedding_model:
        return _fail(
            f"store {config.store_path} was built with embedding model "
            f"{store.model_id!r}, config says {config.provider.embedding_model!r}"
        )

    extraction_enabled = config.extraction and not args.no_extraction
    pipeline = ScreeningPipeline(
        gateway,
        store,
        retrieval=config.retrieval,
        templates=TemplateSet(config.template_dir),
        weights=config.effective_weights(),
        chat_model=config.provider.chat_model,
        extraction_enabled=extraction_enabled,
        discussion_rounds=config.discussion_rounds,
    )
    outcomes = screen_batch(
        pipeline, resumes, lambda resume: jobs[resume.id], concurrency=config.concurrency
    )

    output_path = Path(args.output) if args.output else config.output_dir / "results.jsonl"
    output_path.parent.mkdir(parents=True, exist_ok=True)
    with open(output_path, "w", encoding="utf-8") as fh:
        for outcome in outcomes:
            if isinstance(outcome, ScreeningResult):
                record = result_to_record(outcome, config)
            else:
                record = failure_to_record(outcome)
            fh.write(json.dumps(record, ensure_ascii=False) + "\n")

    if args.transcripts:
        transcripts_dir = Path(args.transcripts)
        transcripts_dir.mkdir(parents=True, exist_ok=True)
        for outcome in outcomes:
            status = "ok" if isinstance(outcome, ScreeningResult) else "failed"
            payload = _transcripts_payload(outcome.resume_id, status, outcome.transcripts)
            sidecar = transcripts_dir / f"{outcome.resume_id}.json"
            sidecar.write_text(
                json.dumps(payload, ensure_ascii=False, indent=2) + "\n", encoding="utf-8"
            )

    succeeded = sum(1 for outcome in outcomes if isinstance(outcome, ScreeningResult))
    failed = len(outcomes) - succeeded
    print(f"screened {succeeded}/{len(outcomes)} resumes -> {output_path}")
    for outcome in outcomes:
        if isinstance(outcome, ScreeningFailure):
            print(
                f"  failed {outcome.resume_id} at {outcome.stage}: {outcome.message}",
                file=sys.stderr,
            )
    if succeeded == 0:
        return EXIT_NO_SUCCESS
    if failed:
        return EXIT_PARTIAL
    return EXIT_OK


def _parse_percentiles(raw: str) -> list[float]:
    percentiles: list[float] = []
    for token in raw.split(","):
        token = token.strip()
        if not token:
            continue
        try:
            value = float(token)
        except ValueError:
            raise ConfigError(f"invalid percentile {token!r}") from None
        percentiles.append(int(value) if value.is_integer() else value)
    if not percentiles:
        raise ConfigError("at least one percentile is required")
    return percentiles


def cmd_evaluate(args: argparse.Namespace) -> int:
    config = load_config(args.config)
    percentiles = _parse_percentiles(args.percentiles)

    result_rows = _read_jsonl(Path(args.results))
    ok_rows = [row for row in result_rows if row.get("status") == "ok"]
    failed_rows = [row for row in result_rows if row.get("status") != "ok"]
    if failed_rows:
        print(
            f"note: skipping {len(failed_rows)} failed screening record(s)",
            file=sys.stderr,
        )
    if not ok_rows:
        return _fail(f"no successful screening records in {args.results}")

    labels: dict[str, list[float]] = {}
    for row in _read_jsonl(Path(args.labels)):
        resume_id = row.get("resume_id")
        scores = row.get("scores")
        if not isinstance(resume_id, str) or not isinstance(scores, list):
            return _fail(f"label rows need string 'resume_id' and list 'scores': {row}")
        labels[resume_id] = scores

    missing = [row["resume_id"] for row in ok_rows if row["resume_id"] not in labels]
    if missing:
        return _fail(f"no HR label for resume id(s): {', '.join(sorted(missing))}")
    extra = sorted(set(labels) - {row["resume_id"] for row in ok_rows})
    if extra:
        print(f"note: ignoring {len(extra)} unmatched label(s): {', '.join(extra)}", file=sys.stderr)

    weights = config.effective_weights()
    records: list[EvaluationRecord] = []
    for row in ok_rows:
        job_raw = row.get("job", {})
        job = JobPosition(
            title=str(job_raw.get("title", "unspecified")),
            level=JobLevel.parse(str(job_raw.get("level", "mid"))),
        )
        records.append(make_record(
            resume_id=row["resume_id"],
            hr_scores=validate_score_vector(labels[row["resume_id"]]),
            ai_scores=validate_score_vector(row["scores"]),
            job=job,
            weights=weights,
        ))

    report = evaluate_run(records, percentiles, weights)

    out_dir = Path(args.out_dir) if args.out_dir else config.output_dir
    out_dir.mkdir(parents=True, exist_ok=True)
    (out_dir / "report.json").write_text(
        json.dumps(report_to_dict(report), ensure_ascii=False, indent=2) + "\n",
        encoding="utf-8",
    )
    label = args.label or Path(args.results).stem
    table = render_table(report, label=label)
    (out_dir / "table.txt").write_text(table, encoding="utf-8")
    write_histogram_csv(report, out_dir / "histogram.csv")
    write_scatter_csv(records, out_dir / "scatter_final.csv")
    write_category_scatter_csv(records, out_dir / "scatter_categories.csv")

    print(table, end="")
    for issue in report.issues:
        print(f"note: {issue}", file=sys.stderr)

    computed = [p for p in report.percentiles if report.pc[p] is not None and report.sc[p] is not None]
    if not computed:
        print("error: no percentile produced correlations (too little data)", file=sys.stderr)
        return EXIT_INSUFFICIENT
    return EXIT_OK


def cmd_report(args: argparse.Namespace) -> int:
    report_path = Path(args.report)
    try:
        data = json.loads(report_path.read_text(encoding="utf-8"))
    except OSError as exc:
        return _fail(f"cannot read report {report_path}: {exc}")
    except json.JSONDecodeError as exc:
        return _fail(f"report {report_path} is not valid JSON: {exc}")
    try:
        report = report_from_dict(data)
    except (KeyError, TypeError, ValueError) as exc:
        return _fail(f"report {report_path} is missing fields: {exc}")
    print(render_table(report, label=args.label or report_path.stem), end="")
    return EXIT_OK


# ------------------------------------------------------------------
# Parser
# ------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="resume-screen",
        description="Multi-agent resume screening with retrieval-backed scoring.",
    )
    parser.add_argument("-v", "--verbose", action="store_true", help="debug logging")
    sub = parser.add_subparsers(dest="command", required=True)

    p_index = sub.add_parser("index", help="chunk, embed, and persist criteria documents")
    p_index.add_argument("criteria", nargs="+", help="plain-text criteria documents")
    p_index.add_argument("--config", "-c", required=True, help="YAML config file")
    p_index.set_defaults(func=cmd_index)

    p_screen = sub.add_parser("screen", help="screen resume files against the store")
    p_screen.add_argument("resumes", nargs="+", help="plain-text resume files (id = file stem)")
    p_screen.add_argument("--config", "-c", required=True, help="YAML config file")
    p_screen.add_argument("--manifest", help="JSON manifest assigning jobs per resume id")
    p_screen.add_argument("--job-title", help="fallback job title for unlisted resumes")
    p_screen.add_argument("--job-level", help="fallback job level (junior|mid|senior|leadership)")
    p_screen.add_argument("--output", "-o", help="results JSONL path (default: <output_dir>/results.jsonl)")
    p_screen.add_argument("--transcripts", help="directory for per-resume transcript sidecars")
    p_screen.add_argument("--no-extraction", action="store_true",
                          help="skip the extractor; evaluator sees raw resume text")
    p_screen.set_defaults(func=cmd_screen)

    p_eval = sub.add_parser("evaluate", help="compare screening results against HR labels")
    p_eval.add_argument("--config", "-c", required=True, help="YAML config file")
    p_eval.add_argument("--results", required=True, help="JSONL from the screen subcommand")
    p_eval.add_argument("--labels", required=True, help="JSONL of HR labels: {resume_id, scores}")
    p_eval.add_argument("--percentiles", default=DEFAULT_PERCENTILES,
                        help=f"comma-separated percentile cuts (default: {DEFAULT_PERCENTILES})")
    p_eval.add_argument("--out-dir", help="report output directory (default: config output_dir)")
    p_eval.add_argument("--label", help="row label in the text table (default: results file stem)")
    p_eval.set_defaults(func=cmd_evaluate)

    p_report = sub.add_parser("report", help="re-render the text table from a saved report.json")
    p_report.add_argument("report", help="report.json produced by evaluate")
    p_report.add_argument("--label", help="row label in the text table")
    p_report.set_defaults(func=cmd_report)

    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.DEBUG if args.verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
        stream=sys.stderr,
    )
    try:
        return args.func(args)
    except ResumeScreenError as exc:
        return _fail(str(exc))


if __name__ == "__main__":
    sys.exit(main())
