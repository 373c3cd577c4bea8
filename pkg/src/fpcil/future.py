"""Future-class prediction from a text-completion service.

Builds a fixed prompt listing the currently known class names, queries a
completion service several times, parses each transcript into candidate
class names, and tallies how many transcripts predicted each name.
Restriction levels then keep only names predicted at least min_count times.

Two service implementations: a fixture replayer that returns transcripts
from files (used by all tests), and a remote HTTP client configured through
environment variables.  Live-service output never participates in
acceptance checks.
"""

from __future__ import annotations

import re
import time
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path

import requests

from .errors import ConfigurationError, DataFormatError, PromptError

PROMPT_PREFIX = "The dataset contains the following 100 classes: "

LEVEL_FULL = "full"
LEVEL_R1 = "R1"
LEVEL_R2 = "R2"

ENV_ENDPOINT = "FPCIL_COMPLETION_URL"
ENV_TOKEN = "FPCIL_COMPLETION_TOKEN"

_MAX_NAME_CHARS = 60
_MAX_NAME_WORDS = 4

_LIST_MARKER = re.compile(r"^\s*(?:\d+\s*[.):]\s*|[-*•]\s+)")
_TERMINAL_PUNCT = re.compile(r"[.!?;:\"'`]+$")
_DIGITS_ONLY = re.compile(r"^\d+$")


@dataclass(frozen=True)
class CompletionRequest:
    prompt: str
    repeats: int = 10
    max_output: int = 2048

    def __post_init__(self):
        if self.repeats < 1:
            raise ConfigurationError(f"repeats must be >= 1, got {self.repeats}")
        if self.max_output < 1:
            raise ConfigurationError(f"max_output must be >= 1, got {self.max_output}")


@dataclass(frozen=True)
class PredictionTally:
    counts: dict[str, int]
    repeats: int
    source_transcripts: tuple[str, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "counts", dict(self.counts))
        object.__setattr__(self, "source_transcripts", tuple(self.source_transcripts))
        bad = {n: c for n, c in self.counts.items() if not 0 <= c <= self.repeats}
        if bad:
            raise ConfigurationError(f"counts outside [0, {self.repeats}]: {bad}")


@dataclass(frozen=True)
class RestrictionLevel:
    level: str
    min_count: int

    def __post_init__(self):
        if self.level not in (LEVEL_FULL, LEVEL_R1, LEVEL_R2):
            raise ConfigurationError(f"unknown restriction level {self.level!r}")
        if self.min_count < 0:
            raise ConfigurationError(f"min_count must be >= 0, got {self.min_count}")


def default_levels(full_min: int = 1, r1_min: int = 4, r2_min: int = 7) -> dict[str, RestrictionLevel]:
    """Threshold ladder; must be nondecreasing toward stricter levels."""
    if not full_min <= r1_min <= r2_min:
        raise ConfigurationError(
            f"restriction thresholds must be nondecreasing, got {full_min}/{r1_min}/{r2_min}"
        )
    return {
        LEVEL_FULL: RestrictionLevel(LEVEL_FULL, full_min),
        LEVEL_R1: RestrictionLevel(LEVEL_R1, r1_min),
        LEVEL_R2: RestrictionLevel(LEVEL_R2, r2_min),
    }


def normalize_name(name: str) -> str:
    return " ".join(name.lower().split())


def build_future_prompt(initial_names) -> str:
    """Completion prompt listing known names; the leading count is fixed text."""
    names = list(initial_names)
    if not names:
        raise PromptError("cannot build a prompt from zero class names")
    for n in names:
        if "," in n or "\n" in n:
            raise PromptError(f"class name may not contain a delimiter: {n!r}")
    return PROMPT_PREFIX + ", ".join(names) + ","


def parse_transcript(completion_text: str, known_vocabulary=None) -> list[str]:
    """Candidate class names from one completion, in first-seen order.

    Splits on commas and newlines, strips list markers and terminal
    punctuation, lowercases, and drops junk: overlong tokens, digits-only
    tokens, and narrative fragments of more than four words.  Unparseable
    text yields an empty list rather than an error.
    """
    vocab = None if known_vocabulary is None else {normalize_name(v) for v in known_vocabulary}
    seen = set()
    out = []
    for raw in re.split(r"[,\n]+", completion_text):
        token = _LIST_MARKER.sub("", raw.strip())
        token = _TERMINAL_PUNCT.sub("", token).strip()
        token = normalize_name(token)
        if not token or len(token) > _MAX_NAME_CHARS:
            continue
        if _DIGITS_ONLY.match(token) or len(token.split()) > _MAX_NAME_WORDS:
            continue
        if vocab is not None and token not in vocab:
            continue
        if token not in seen:
            seen.add(token)
            out.append(token)
    return out


def tally_transcripts(transcript_names: list[list[str]]) -> PredictionTally:
    """Per-name count of how many transcripts predicted it."""
    counts: dict[str, int] = {}
    for names in transcript_names:
        for name in set(names):
            counts[name] = counts.get(name, 0) + 1
    return PredictionTally(counts=counts, repeats=len(transcript_names))


def restrict(tally: PredictionTally, level: RestrictionLevel, exclude=()) -> set[str]:
    excluded = {normalize_name(n) for n in exclude}
    return {n for n, c in tally.counts.items() if c >= level.min_count and n not in excluded}


def aggregate_and_restrict(
    transcript_names: list[list[str]], level: RestrictionLevel, exclude=()
) -> tuple[PredictionTally, set[str]]:
    tally = tally_transcripts(transcript_names)
    return tally, restrict(tally, level, exclude)


def overlap(selected, target_names) -> tuple[int, Fraction]:
    """How many target names were hit, and the exact hit fraction."""
    targets = {normalize_name(n) for n in target_names}
    if not targets:
        raise ConfigurationError("no target names to compare against")
    hits = len({normalize_name(n) for n in selected} & targets)
    return hits, Fraction(hits, len(targets))


# ---------------------------------------------------------------------------
# Completion services


class FixtureReplayer:
    """Replays transcripts stored one-per-file in a directory.

    Files are read in sorted name order; non-.txt entries (such as a golden
    tally) are ignored.
    """

    def __init__(self, directory):
        self.directory = Path(directory)
        if not self.directory.is_dir():
            raise DataFormatError(f"fixture directory not found: {self.directory}")
        self.paths = sorted(self.directory.glob("*.txt"))
        if not self.paths:
            raise DataFormatError(f"no transcript files in {self.directory}")

    def complete(self, request: CompletionRequest) -> list[str]:
        if request.repeats > len(self.paths):
            raise ConfigurationError(
                f"requested {request.repeats} transcripts but fixtures hold {len(self.paths)}"
            )
        return [p.read_text() for p in self.paths[: request.repeats]]


class RemoteClient:
    """Minimal HTTP completion client.

    Endpoint and bearer credential come from the environment
    (FPCIL_COMPLETION_URL, FPCIL_COMPLETION_TOKEN).  Each repeat is a POST of
    {"model", "prompt", "max_output"}; the response body must carry a
    "completion" string.  Transient failures retry up to 3 attempts with
    exponential backoff.
    """

    ATTEMPTS = 3

    def __init__(self, model: str = "default", endpoint: str | None = None,
                 token: str | None = None, timeout: float = 60.0, backoff: float = 1.0):
        import os

        self.model = model
        self.endpoint = endpoint or os.environ.get(ENV_ENDPOINT)
        self.token = token if token is not None else os.environ.get(ENV_TOKEN)
        self.timeout = timeout
        self.backoff = backoff
        if not self.endpoint:
            raise ConfigurationError(
                f"no completion endpoint: set {ENV_ENDPOINT} or pass endpoint="
            )

    def _one(self, request: CompletionRequest) -> str:
        headers = {}
        if self.token:
            headers["Authorization"] = f"Bearer {self.token}"
        body = {"model": self.model, "prompt": request.prompt, "max_output": request.max_output}
        last_error = None
        for attempt in range(self.ATTEMPTS):
            if attempt:
                time.sleep(self.backoff * 2 ** (attempt - 1))
            try:
                resp = requests.post(self.endpoint, json=body, headers=headers, timeout=self.timeout)
                resp.raise_for_status()
                payload = resp.json()
            except (requests.RequestException, ValueError) as err:
                last_error = err
                continue
            if "completion" not in payload:
                raise DataFormatError(f"completion response lacks 'completion': {sorted(payload)}")
            return str(payload["completion"])
        raise DataFormatError(f"completion request failed after {self.ATTEMPTS} attempts: {last_error}")

    def complete(self, request: CompletionRequest) -> list[str]:
        return [self._one(request) for _ in range(request.repeats)]


@dataclass(frozen=True)
class FuturePrediction:
    prompt: str
    tally: PredictionTally
    selections: dict[str, tuple[str, ...]] = field(default_factory=dict)

    def selected(self, level: str) -> tuple[str, ...]:
        return self.selections[level]


def predict_future(
    service,
    initial_names,
    repeats: int = 10,
    max_output: int = 2048,
    known_vocabulary=None,
    levels: dict[str, RestrictionLevel] | None = None,
    log_dir=None,
) -> FuturePrediction:
    """Query, parse, tally, and restrict in one pass.

    Transcripts are logged verbatim (one file each) when log_dir is given.
    Initial-step names are always excluded from selections.
    """
    names = list(initial_names)
    prompt = build_future_prompt(names)
    transcripts = service.complete(CompletionRequest(prompt=prompt, repeats=repeats, max_output=max_output))
    if log_dir is not None:
        log_dir = Path(log_dir)
        log_dir.mkdir(parents=True, exist_ok=True)
        width = len(str(len(transcripts)))
        for i, text in enumerate(transcripts, start=1):
            (log_dir / f"transcript_{i:0{width}d}.txt").write_text(text)
    parsed = [parse_transcript(t, known_vocabulary) for t in transcripts]
    tally = PredictionTally(
        counts=tally_transcripts(parsed).counts,
        repeats=len(transcripts),
        source_transcripts=tuple(transcripts),
    )
    if levels is None:
        levels = default_levels()
    selections = {
        key: tuple(sorted(restrict(tally, lvl, exclude=names))) for key, lvl in levels.items()
    }
    return FuturePrediction(prompt=prompt, tally=tally, selections=selections)
