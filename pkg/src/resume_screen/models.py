"""Domain types and the score arithmetic.

The five evaluation categories and their closed bounds:

    self_evaluation    0-1
    skills             0-2
    work_experience    0-4
    basic_information  0-1
    education          0-2

Scores are kept at full precision in memory; the one-decimal presentation
granularity is applied only when serializing (see :func:`serialize_scores`),
so downstream metrics never accumulate rounding error.

All types here are immutable value objects and safe to share across threads.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import Mapping, Sequence

from .errors import (
    DomainValidationError,
    NonFiniteError,
    OutOfBoundsError,
    WrongArityError,
)

# Fixed category order. Serialized score arrays, prompt renderings, and the
# formatter contract all follow this order.
SCORE_CATEGORIES: tuple[str, ...] = (
    "self_evaluation",
    "skills",
    "work_experience",
    "basic_information",
    "education",
)

CATEGORY_BOUNDS: dict[str, tuple[float, float]] = {
    "self_evaluation": (0.0, 1.0),
    "skills": (0.0, 2.0),
    "work_experience": (0.0, 4.0),
    "basic_information": (0.0, 1.0),
    "education": (0.0, 2.0),
}

MAX_TOTAL_SCORE = 10.0


class JobLevel(str, Enum):
    """The four seniority bands every applied position maps onto."""

    JUNIOR = "junior"
    MID = "mid"
    SENIOR = "senior"
    LEADERSHIP = "leadership"

    @classmethod
    def parse(cls, raw: str) -> "JobLevel":
        """Normalize a free-form level string onto the enum.

        Accepts common synonyms ("mid-level", "entry", "director", ...);
        raises DomainValidationError for anything unrecognizable.
        """
        key = raw.strip().lower().replace("_", "-")
        if key in _LEVEL_ALIASES:
            return _LEVEL_ALIASES[key]
        raise DomainValidationError(f"unknown job level: {raw!r}")


_LEVEL_ALIASES: dict[str, JobLevel] = {
    "junior": JobLevel.JUNIOR,
    "entry": JobLevel.JUNIOR,
    "entry-level": JobLevel.JUNIOR,
    "intern": JobLevel.JUNIOR,
    "mid": JobLevel.MID,
    "mid-level": JobLevel.MID,
    "middle": JobLevel.MID,
    "intermediate": JobLevel.MID,
    "senior": JobLevel.SENIOR,
    "senior-level": JobLevel.SENIOR,
    "leadership": JobLevel.LEADERSHIP,
    "lead": JobLevel.LEADERSHIP,
    "director": JobLevel.LEADERSHIP,
    "executive": JobLevel.LEADERSHIP,
}


@dataclass(frozen=True)
class JobPosition:
    """Applied position: free-form title plus one of four seniority levels."""

    title: str
    level: JobLevel

    def __post_init__(self) -> None:
        if not self.title.strip():
            raise DomainValidationError("job title must be non-empty")
        if not isinstance(self.level, JobLevel):
            object.__setattr__(self, "level", JobLevel.parse(str(self.level)))

    def describe(self) -> str:
        return f"{self.title} ({self.level.value} level)"


@dataclass(frozen=True)
class Resume:
    """Raw applicant text as submitted, before any agent touches it."""

    id: str
    raw_text: str
    applied_position_hint: str | None = None

    def __post_init__(self) -> None:
        if not self.id:
            raise DomainValidationError("resume id must be non-empty")
        if not self.raw_text.strip():
            raise DomainValidationError(f"resume {self.id!r} has empty text")


@dataclass(frozen=True)
class WorkEntry:
    """One employment record. ``duration_months=None`` means unknown, not zero."""

    company: str
    duration_months: int | None
    responsibilities: str

    def __post_init__(self) -> None:
        if self.duration_months is not None and self.duration_months < 0:
            raise DomainValidationError(
                f"duration_months must be >= 0, got {self.duration_months}"
            )


@dataclass(frozen=True)
class EducationEntry:
    institution: str
    degree: str = ""
    field_of_study: str = ""

    def __post_init__(self) -> None:
        if not self.institution.strip():
            raise DomainValidationError("education entry needs an institution")


@dataclass(frozen=True)
class ExtractedResume:
    """The six-field structured form produced by the extractor agent.

    Every field is always present; anything the extractor could not find is
    an explicit empty value (empty string/tuple/map), never absent.
    """

    position: JobPosition
    self_evaluation: str
    skills_specialties: tuple[str, ...]
    work_experience: tuple[WorkEntry, ...]
    basic_information: Mapping[str, str]
    education: tuple[EducationEntry, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "skills_specialties", tuple(self.skills_specialties))
        object.__setattr__(self, "work_experience", tuple(self.work_experience))
        object.__setattr__(self, "education", tuple(self.education))
        object.__setattr__(self, "basic_information", dict(self.basic_information))


@dataclass(frozen=True)
class ScoreVector:
    """The five bounded category scores for one candidate/job pairing."""

    self_evaluation: float
    skills: float
    work_experience: float
    basic_information: float
    education: float

    def __post_init__(self) -> None:
        for category in SCORE_CATEGORIES:
            value = float(getattr(self, category))
            object.__setattr__(self, category, value)
            if not math.isfinite(value):
                raise NonFiniteError(category, value)
            low, high = CATEGORY_BOUNDS[category]
            if not (low <= value <= high):
                raise OutOfBoundsError(category, value, low, high)

    def as_list(self) -> list[float]:
        """Full-precision values in the fixed category order."""
        return [getattr(self, c) for c in SCORE_CATEGORIES]

    def total(self) -> float:
        return math.fsum(self.as_list())


@dataclass(frozen=True)
class ScoringWeights:
    """Per-category weights, fixed across job roles.

    Defaults are all 1.0: a raw sum on the 0-10 scale. ``normalized()``
    rescales so the weights sum to 1 for the literal weighted-mean mode.
    """

    w_self: float = 1.0
    w_skills: float = 1.0
    w_work: float = 1.0
    w_basic: float = 1.0
    w_education: float = 1.0

    def __post_init__(self) -> None:
        values = self.as_list()
        for name, value in zip(self._FIELDS, values):
            if not math.isfinite(value) or value < 0:
                raise DomainValidationError(f"weight {name} must be >= 0, got {value!r}")
        if all(v == 0 for v in values):
            raise DomainValidationError("weights must not all be zero")

    _FIELDS = ("w_self", "w_skills", "w_work", "w_basic", "w_education")

    def as_list(self) -> list[float]:
        return [self.w_self, self.w_skills, self.w_work, self.w_basic, self.w_education]

    def normalized(self) -> "ScoringWeights":
        total = math.fsum(self.as_list())
        return ScoringWeights(*(w / total for w in self.as_list()))

    @classmethod
    def unit(cls) -> "ScoringWeights":
        return cls()


@dataclass(frozen=True)
class FinalScore:
    """Weighted final score for one candidate under one applied job."""

    value: float
    job: JobPosition


def validate_score_vector(raw: Sequence[float]) -> ScoreVector:
    """Check a raw five-entry list against the category bounds.

    Out-of-bound values are an error here, never clamped; near-bound
    clamping is an explicit, separate step in the agent pipeline.

    Raises:
        WrongArityError: not exactly 5 entries.
        NonFiniteError: a NaN/inf entry.
        OutOfBoundsError: an entry outside its category's closed bound.
    """
    entries = list(raw)
    if len(entries) != 5:
        raise WrongArityError(len(entries))
    for category, value in zip(SCORE_CATEGORIES, entries):
        value = float(value)
        if not math.isfinite(value):
            raise NonFiniteError(category, value)
        low, high = CATEGORY_BOUNDS[category]
        if not (low <= value <= high):
            raise OutOfBoundsError(category, value, low, high)
    return ScoreVector(*(float(v) for v in entries))


def final_score(scores: ScoreVector, weights: ScoringWeights, job: JobPosition) -> FinalScore:
    """Dot product of weights and category scores, in the fixed order."""
    value = 0.0
    for w, s in zip(weights.as_list(), scores.as_list()):
        value += w * s
    return FinalScore(value=value, job=job)


def serialize_scores(scores: ScoreVector) -> list[float]:
    """Score vector as a 5-element array, rounded to one decimal place.

    This is the wire form: [self, skills, work, basic, education]. The field
    order is part of the formatter contract and must not change.
    """
    return [round(v, 1) for v in scores.as_list()]
