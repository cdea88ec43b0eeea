"""Corpus ingestion: the canonical JSONL interchange format plus one-way
converters from USR-style annotated JSON and forum-style (vote-based) JSON.

Every loader enforces the global tie-exclusion invariant: no emitted
EvaluationSet has equal human scores.
"""

from __future__ import annotations

import json
import logging
import random
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence, TypeVar

from .core import EvaluationSet

log = logging.getLogger(__name__)

T = TypeVar("T")


@dataclass(frozen=True)
class AnnotatedResponse:
    """A response with per-annotator quality scores (1-5 scale)."""

    text: str
    quality_scores: tuple[float, ...]
    is_reference: bool = False

    def __post_init__(self) -> None:
        if not self.is_reference and not self.quality_scores:
            raise ValueError("non-reference response needs at least one quality score")

    @property
    def final_score(self) -> float:
        return sum(self.quality_scores) / len(self.quality_scores)


@dataclass(frozen=True)
class ForumAnswer:
    """A forum answer with community votes and the accepted-answer flag."""

    text: str
    votes: int
    is_answer: bool
    normalized_vote: float = 0.0

    def __post_init__(self) -> None:
        if self.votes < 0:
            raise ValueError("votes must be >= 0")
        if not 0.0 <= self.normalized_vote <= 1.0:
            raise ValueError("normalized_vote must lie in [0, 1]")


def _require(obj: dict, key: str, where: str):
    if key not in obj:
        raise ValueError(f"{where}: missing field {key!r}")
    return obj[key]


def _as_context(value) -> tuple[str, ...]:
    if value is None:
        return ()
    if isinstance(value, str):
        return (value,)
    if isinstance(value, list) and all(isinstance(v, str) for v in value):
        return tuple(value)
    raise ValueError("context must be a string or a list of strings")


def load_jsonl(path: str | Path) -> list[EvaluationSet]:
    """Load the canonical corpus format: one evaluation set per line.

    Lines whose two human scores are equal are skipped (counted and logged);
    malformed lines raise with their line number. An empty result is an error.
    """
    path = Path(path)
    sets: list[EvaluationSet] = []
    skipped_ties = 0
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            where = f"{path}: line {lineno}"
            try:
                obj = json.loads(line)
            except json.JSONDecodeError as exc:
                raise ValueError(f"{where}: malformed JSON ({exc.msg})") from None
            if not isinstance(obj, dict):
                raise ValueError(f"{where}: expected a JSON object")
            set_id = str(_require(obj, "id", where))
            context = _as_context(obj.get("context"))
            reference = _require(obj, "reference", where)
            candidates = _require(obj, "candidates", where)
            if not isinstance(candidates, list) or len(candidates) != 2:
                raise ValueError(f"{where}: 'candidates' must list exactly 2 entries")
            texts = []
            humans = []
            for k, cand in enumerate(candidates):
                cwhere = f"{where}: candidates[{k}]"
                texts.append(str(_require(cand, "text", cwhere)))
                humans.append(float(_require(cand, "human", cwhere)))
            if humans[0] == humans[1]:
                skipped_ties += 1
                continue
            sets.append(
                EvaluationSet(
                    id=set_id,
                    context=context,
                    reference=str(reference),
                    candidate_a=texts[0],
                    candidate_b=texts[1],
                    human_a=humans[0],
                    human_b=humans[1],
                )
            )
    if skipped_ties:
        log.warning("%s: skipped %d tied-score line(s)", path, skipped_ties)
    if not sets:
        raise ValueError(f"{path}: no evaluation sets")
    return sets


def write_jsonl(sets: Sequence[EvaluationSet], path: str | Path) -> None:
    """Write evaluation sets in the canonical JSONL format."""
    with open(path, "w", encoding="utf-8") as fh:
        for ev in sets:
            obj = {
                "id": ev.id,
                "context": list(ev.context),
                "reference": ev.reference,
                "candidates": [
                    {"text": ev.candidate_a, "human": ev.human_a},
                    {"text": ev.candidate_b, "human": ev.human_b},
                ],
            }
            fh.write(json.dumps(obj, ensure_ascii=False) + "\n")


def build_usr_sets(
    contexts: Sequence[tuple[tuple[str, ...], str, Sequence[AnnotatedResponse]]],
) -> list[EvaluationSet]:
    """Pair up annotated responses per context into evaluation sets.

    Final score = mean of the quality scores. Every unordered pair with
    distinct final scores becomes one set, higher-scored response in slot a.
    Reference-flagged responses never enter pairs; contexts with fewer than
    two scoreable responses are skipped (counted).
    """
    sets: list[EvaluationSet] = []
    skipped_contexts = 0
    for ci, (context, reference, responses) in enumerate(contexts):
        scored = [(k, r) for k, r in enumerate(responses) if not r.is_reference]
        if len(scored) < 2:
            skipped_contexts += 1
            continue
        for x in range(len(scored)):
            for y in range(x + 1, len(scored)):
                i, first = scored[x]
                j, second = scored[y]
                if first.final_score == second.final_score:
                    continue
                if first.final_score > second.final_score:
                    good, bad = first, second
                else:
                    good, bad = second, first
                sets.append(
                    EvaluationSet(
                        id=f"usr-{ci}-{i}-{j}",
                        context=context,
                        reference=reference,
                        candidate_a=good.text,
                        candidate_b=bad.text,
                        human_a=good.final_score,
                        human_b=bad.final_score,
                    )
                )
    if skipped_contexts:
        log.warning("skipped %d context(s) with < 2 scoreable responses", skipped_contexts)
    return sets


def reservoir_sample(items: Iterable[T], k: int, seed: int) -> list[T]:
    """Uniform sample of k items in stream order (classic Algorithm R)."""
    if k < 1:
        raise ValueError("sample size must be >= 1")
    rng = random.Random(seed)
    reservoir: list[tuple[int, T]] = []
    for idx, item in enumerate(items):
        if idx < k:
            reservoir.append((idx, item))
        else:
            j = rng.randint(0, idx)
            if j < k:
                reservoir[j] = (idx, item)
    reservoir.sort(key=lambda pair: pair[0])
    return [item for _, item in reservoir]


def normalize_votes(answers: Sequence[ForumAnswer]) -> list[ForumAnswer]:
    """Fill normalized_vote = votes / max votes in the dialogue (0 if max is 0)."""
    max_votes = max((a.votes for a in answers), default=0)
    out = []
    for a in answers:
        nv = a.votes / max_votes if max_votes > 0 else 0.0
        out.append(ForumAnswer(a.text, a.votes, a.is_answer, nv))
    return out


def build_forum_sets(
    dialogues: Sequence[tuple[str, Sequence[ForumAnswer]]],
    sample: int | None = None,
    seed: int = 0,
) -> list[EvaluationSet]:
    """Build evaluation sets from vote-annotated forum dialogues.

    The first accepted answer is the reference; any further accepted answers
    are held out of the candidate pool. Candidate pairs need distinct vote
    counts; the higher-voted answer goes in slot a with raw votes as the
    human scores. Dialogues without a reference or without two distinct-vote
    candidates are skipped (counted). With `sample` set, a deterministic
    reservoir sample of that many sets is drawn under `seed`.
    """
    sets: list[EvaluationSet] = []
    skipped = 0
    for di, (question, answers) in enumerate(dialogues):
        reference = next((a for a in answers if a.is_answer), None)
        candidates = [(k, a) for k, a in enumerate(answers) if not a.is_answer]
        if reference is None or len(candidates) < 2:
            skipped += 1
            continue
        emitted = 0
        for x in range(len(candidates)):
            for y in range(x + 1, len(candidates)):
                i, first = candidates[x]
                j, second = candidates[y]
                if first.votes == second.votes:
                    continue
                if first.votes > second.votes:
                    good, bad = first, second
                else:
                    good, bad = second, first
                sets.append(
                    EvaluationSet(
                        id=f"forum-{di}-{i}-{j}",
                        context=(question,) if question else (),
                        reference=reference.text,
                        candidate_a=good.text,
                        candidate_b=bad.text,
                        human_a=float(good.votes),
                        human_b=float(bad.votes),
                    )
                )
                emitted += 1
        if emitted == 0:
            skipped += 1
    if skipped:
        log.warning("skipped %d dialogue(s) unusable for pairing", skipped)
    if sample is not None and sample < len(sets):
        sets = reservoir_sample(sets, sample, seed)
    return sets


def vote_gt_curve(
    dialogues: Sequence[tuple[str, Sequence[ForumAnswer]]],
) -> list[tuple[float, float]]:
    """Fraction of accepted answers per normalized-vote bin.

    Ten equal-width bins over [0, 1]; each row is (bin lower edge, fraction
    of that bin's answers flagged is_answer). Empty bins report 0.
    """
    totals = [0] * 10
    hits = [0] * 10
    for _, answers in dialogues:
        for a in normalize_votes(answers):
            b = min(int(a.normalized_vote * 10), 9)
            totals[b] += 1
            if a.is_answer:
                hits[b] += 1
    return [
        (b / 10, hits[b] / totals[b] if totals[b] else 0.0) for b in range(10)
    ]


def load_usr_json(
    path: str | Path,
) -> list[tuple[tuple[str, ...], str, list[AnnotatedResponse]]]:
    """Read USR-style annotated data: a JSON array of context objects.

    Each object holds `context` (string or list), `responses` (each with
    `text` and a `quality` score list), and the reference either as a
    top-level `reference` string or as the single response flagged
    `is_reference` (which is then excluded from pairing).
    """
    path = Path(path)
    with open(path, encoding="utf-8") as fh:
        data = json.load(fh)
    if not isinstance(data, list):
        raise ValueError(f"{path}: expected a top-level JSON array")
    out = []
    for ci, obj in enumerate(data):
        where = f"{path}: item {ci}"
        if not isinstance(obj, dict):
            raise ValueError(f"{where}: expected an object")
        context = _as_context(obj.get("context"))
        raw_responses = _require(obj, "responses", where)
        if not isinstance(raw_responses, list):
            raise ValueError(f"{where}: 'responses' must be a list")
        responses = []
        for k, r in enumerate(raw_responses):
            rwhere = f"{where}: responses[{k}]"
            text = str(_require(r, "text", rwhere))
            is_ref = bool(r.get("is_reference", False))
            quality = r.get("quality", [])
            if not isinstance(quality, list):
                raise ValueError(f"{rwhere}: 'quality' must be a list of numbers")
            responses.append(
                AnnotatedResponse(
                    text=text,
                    quality_scores=tuple(float(q) for q in quality),
                    is_reference=is_ref,
                )
            )
        if "reference" in obj:
            reference = str(obj["reference"])
        else:
            flagged = [r for r in responses if r.is_reference]
            if len(flagged) != 1:
                raise ValueError(
                    f"{where}: needs a 'reference' field or exactly one "
                    f"is_reference response, found {len(flagged)}"
                )
            reference = flagged[0].text
        out.append((context, reference, responses))
    return out


def load_forum_json(
    path: str | Path,
) -> list[tuple[str, list[ForumAnswer]]]:
    """Read forum-style data: a JSON array of dialogue objects.

    Each object holds `question` (string) and `answers`, each answer with
    `text`, integer `votes`, and boolean `is_answer`. Normalized votes are
    filled per dialogue.
    """
    path = Path(path)
    with open(path, encoding="utf-8") as fh:
        data = json.load(fh)
    if not isinstance(data, list):
        raise ValueError(f"{path}: expected a top-level JSON array")
    out = []
    for di, obj in enumerate(data):
        where = f"{path}: item {di}"
        if not isinstance(obj, dict):
            raise ValueError(f"{where}: expected an object")
        question = str(obj.get("question", ""))
        raw_answers = _require(obj, "answers", where)
        if not isinstance(raw_answers, list):
            raise ValueError(f"{where}: 'answers' must be a list")
        answers = []
        for k, a in enumerate(raw_answers):
            awhere = f"{where}: answers[{k}]"
            text = str(_require(a, "text", awhere))
            votes = _require(a, "votes", awhere)
            if not isinstance(votes, int) or isinstance(votes, bool) or votes < 0:
                raise ValueError(f"{awhere}: 'votes' must be a non-negative integer")
            answers.append(ForumAnswer(text, votes, bool(a.get("is_answer", False))))
        out.append((question, normalize_votes(answers)))
    return out
